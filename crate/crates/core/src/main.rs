fn main() {
    std::process::exit(lprev::cli::run(std::env::args_os()));
}
