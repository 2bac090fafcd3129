fn main() {
    std::process::exit(bsl::cli::main());
}
