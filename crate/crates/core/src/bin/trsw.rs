fn main() {
    std::process::exit(trsw::cli::run_cli(std::env::args_os()));
}
