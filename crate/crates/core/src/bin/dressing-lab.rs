fn main() {
    std::process::exit(dressing_lab::cli::main());
}
