fn main() {
    std::process::exit(texkit::cli::run());
}
