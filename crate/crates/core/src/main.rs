fn main() {
    std::process::exit(interp_scales::cli::run(std::env::args_os()));
}
