fn main() {
    std::process::exit(chanrank::cli::run_cli(std::env::args_os()));
}
