fn main() {
    std::process::exit(delone_cli::run(std::env::args_os()));
}
