fn main() {
    std::process::exit(regowl::cli::run(std::env::args_os()));
}
