fn main() {
    std::process::exit(dualmcts_cli::run_from_args(std::env::args_os()));
}
