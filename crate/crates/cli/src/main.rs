fn main() {
    std::process::exit(selberg_cli::run(std::env::args_os()));
}
