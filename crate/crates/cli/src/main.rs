fn main() {
    std::process::exit(efdm_cli::main_with_args(std::env::args_os()));
}
