fn main() {
    std::process::exit(heis::cli::run(std::env::args_os()));
}
