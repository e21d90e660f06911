fn main() {
    std::process::exit(polysched_cli::run(std::env::args_os()));
}
