fn main() {
    std::process::exit(charwave::cli::run(std::env::args_os()));
}
