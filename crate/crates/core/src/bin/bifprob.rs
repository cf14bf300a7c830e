fn main() {
    std::process::exit(bifprob::cli::main_with_args(std::env::args_os()));
}
