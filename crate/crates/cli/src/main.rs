fn main() {
    std::process::exit(quermass_cli::main_with_args(std::env::args_os()));
}
