fn main() {
    std::process::exit(qrw::cli::run(std::env::args_os()));
}
