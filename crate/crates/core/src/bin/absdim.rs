fn main() {
    std::process::exit(absdim::cli::cli_main(std::env::args_os()));
}
