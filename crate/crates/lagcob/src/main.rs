fn main() {
    std::process::exit(lagcob::cli::main_with(std::env::args()));
}
