fn main() {
    std::process::exit(isoatlas_cli::run(std::env::args_os()));
}
