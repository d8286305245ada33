fn main() {
    std::process::exit(hcov_cli::run(std::env::args_os()));
}
