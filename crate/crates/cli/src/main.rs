fn main() {
    std::process::exit(k0_cli::run(std::env::args_os()));
}
