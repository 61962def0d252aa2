fn main() {
    std::process::exit(hypjac::cli::main());
}
