fn main() {
    std::process::exit(contagion_cli::main_with_args(std::env::args_os().collect()));
}
