//! Spectral projections of J-normal operators and the structures built on
//! them: Riesz projections, local spectral functions, resolvent probes and
//! fundamental decompositions.

mod lsf;
mod probes;
mod region;
mod riesz;
mod subspaces;

pub use lsf::{
    local_spectral_function, verify_lsf_axioms, verify_maximality, LocalSpectralFunction,
    LsfReport, LSF_TOL,
};
pub use probes::{
    resolvent_probe, strong_stability_check, FundamentalDecomposition, RadiusSample,
    ResolventProbe, StabilityReport,
};
pub use region::{BorelSetDescriptor, Primitive};
pub use riesz::{
    projection_defect, projector_from_decomposition, restriction_normality,
    riesz_projection_contour, riesz_projection_oracle, verify_spectral_set_theorem,
    ProjectionDefect, ProjectionRoute, SpectralProjectionResult, SpectralSetReport, DOUBLING_TOL,
};
pub use subspaces::{
    disk_subspace, join_subspaces, krein_orthogonal_projection, DiskSubspace, JoinedSubspace,
};
