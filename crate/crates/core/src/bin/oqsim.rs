fn main() {
    std::process::exit(oqsim::cli::main_with_args(std::env::args_os()));
}
