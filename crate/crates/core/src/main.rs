fn main() {
    std::process::exit(solvmaps::cli::run(std::env::args_os()));
}
