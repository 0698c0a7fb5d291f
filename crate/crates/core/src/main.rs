fn main() {
    std::process::exit(qfactor::cli::main());
}
