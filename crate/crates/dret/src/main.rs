fn main() {
    std::process::exit(dret::cli::main_with_args(std::env::args_os()));
}
