fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(planes4_cli::run_command(&argv));
}
