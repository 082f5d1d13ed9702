fn main() {
    std::process::exit(incidence_core::cli::run(std::env::args_os()));
}
