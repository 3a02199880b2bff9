fn main() {
    std::process::exit(abspec::cli::run(std::env::args_os()));
}
