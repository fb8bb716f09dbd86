fn main() {
    std::process::exit(sympcert_cli::run(std::env::args_os()));
}
