fn main() {
    std::process::exit(qdepth::cli::main_entry());
}
