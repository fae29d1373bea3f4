fn main() {
    std::process::exit(topoprobe::cli::main_with_args(std::env::args_os()));
}
