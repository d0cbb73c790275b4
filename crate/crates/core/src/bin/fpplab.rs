fn main() {
    std::process::exit(fpplab::cli::run(std::env::args_os()));
}
