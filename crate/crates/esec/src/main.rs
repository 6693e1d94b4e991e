fn main() {
    std::process::exit(esec::cli::main_with_args(std::env::args_os()));
}
