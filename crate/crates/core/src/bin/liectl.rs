fn main() {
    std::process::exit(lie_control::cli::main_with_args(std::env::args_os()));
}
