fn main() {
    std::process::exit(ropelab_cli::run(std::env::args_os()));
}
