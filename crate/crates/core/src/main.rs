fn main() {
    std::process::exit(lifting_core::cli::run(std::env::args_os()));
}
