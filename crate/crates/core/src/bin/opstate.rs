fn main() {
    std::process::exit(opstate::cli::main());
}
