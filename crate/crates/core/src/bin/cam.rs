fn main() {
    std::process::exit(causal_additive::cli::main_with_args(std::env::args_os()));
}
