fn main() {
    std::process::exit(entbound::cli::run(std::env::args_os()));
}
