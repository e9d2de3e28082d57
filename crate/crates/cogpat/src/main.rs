fn main() {
    std::process::exit(cogpat::cli::run(std::env::args_os()));
}
