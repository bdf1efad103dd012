fn main() {
    std::process::exit(ellipquad::cli::run(std::env::args_os()));
}
