fn main() {
    std::process::exit(qdicke::cli::run(std::env::args_os()));
}
