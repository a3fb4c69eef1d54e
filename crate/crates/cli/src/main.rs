fn main() {
    std::process::exit(rationale_cli::run(std::env::args_os()));
}
