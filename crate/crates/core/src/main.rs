fn main() {
    std::process::exit(freeaut::cli::main());
}
