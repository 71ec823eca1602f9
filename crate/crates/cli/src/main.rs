fn main() {
    std::process::exit(fms_cantilever_cli::run_cli(std::env::args_os()));
}
