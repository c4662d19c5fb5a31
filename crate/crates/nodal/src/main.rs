fn main() {
    std::process::exit(nodal::cli::main());
}
