fn main() {
    std::process::exit(ratrecon::cli::run(std::env::args_os()));
}
