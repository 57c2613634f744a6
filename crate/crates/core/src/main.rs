fn main() {
    std::process::exit(numrange::cli::run_cli(std::env::args_os()));
}
