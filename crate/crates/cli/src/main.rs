fn main() {
    std::process::exit(asep_cli::main_with_std());
}
