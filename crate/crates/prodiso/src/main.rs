fn main() {
    std::process::exit(prodiso::cli::run());
}
