fn main() {
    std::process::exit(supercong::cli::main_entry());
}
