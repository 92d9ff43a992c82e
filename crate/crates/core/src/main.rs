fn main() {
    std::process::exit(rydberg_reversal::cli::main_with_args(std::env::args_os()));
}
