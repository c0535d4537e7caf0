fn main() {
    std::process::exit(anyon_cli::run(std::env::args_os()));
}
