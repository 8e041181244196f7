fn main() {
    std::process::exit(relspin::cli::run(std::env::args_os()));
}
