fn main() {
    std::process::exit(quadtwist::cli::main_entry());
}
