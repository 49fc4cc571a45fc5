fn main() {
    std::process::exit(graphfb::cli::run());
}
