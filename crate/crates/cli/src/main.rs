fn main() {
    std::process::exit(arithdeg_cli::app::run(std::env::args_os()));
}
