fn main() {
    std::process::exit(vortex_rigidity::cli::run(std::env::args_os()));
}
