fn main() {
    std::process::exit(smms_geometry::cli::run(std::env::args_os()));
}
