fn main() {
    std::process::exit(apdg::harness::cli::run(std::env::args_os()));
}
