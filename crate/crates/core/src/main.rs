fn main() {
    std::process::exit(layered_defense::cli::run_cli(std::env::args_os()));
}
