fn main() {
    std::process::exit(smcsn_link::cli::main());
}
