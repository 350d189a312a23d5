fn main() {
    std::process::exit(hasse_cli::run(std::env::args_os()));
}
