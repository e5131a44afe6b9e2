fn main() {
    std::process::exit(d2d_coverage_cli::run(std::env::args_os()));
}
