fn main() {
    std::process::exit(rbisim::cli::run(std::env::args_os()));
}
