fn main() {
    std::process::exit(aqec_cli::cli::main_with_args(std::env::args_os()));
}
