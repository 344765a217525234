fn main() {
    std::process::exit(maxwell_dg::cli::run_from(std::env::args()));
}
