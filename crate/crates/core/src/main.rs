fn main() {
    std::process::exit(chain_spectra::cli::run_from_env());
}
