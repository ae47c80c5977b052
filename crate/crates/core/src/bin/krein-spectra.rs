fn main() {
    std::process::exit(krein_spectra::harness::run(std::env::args_os()));
}
