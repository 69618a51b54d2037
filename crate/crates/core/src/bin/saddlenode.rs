fn main() {
    std::process::exit(saddlenode::cli::run(std::env::args_os()));
}
