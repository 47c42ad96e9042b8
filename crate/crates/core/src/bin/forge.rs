fn main() {
    std::process::exit(trojan_forge::cli::run(std::env::args_os()));
}
