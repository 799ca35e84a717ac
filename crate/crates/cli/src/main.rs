fn main() {
    std::process::exit(graphtomo::cli::main_with_args(std::env::args_os()));
}
