fn main() {
    std::process::exit(lightalign::cli::run_cli(std::env::args_os()));
}
