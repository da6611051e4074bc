fn main() {
    std::process::exit(langtree::cli::run_from(std::env::args_os()));
}
