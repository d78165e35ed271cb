fn main() {
    std::process::exit(planarqc_cli::main_with(std::env::args_os()));
}
