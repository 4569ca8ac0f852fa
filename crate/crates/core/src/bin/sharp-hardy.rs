fn main() {
    env_logger::init();
    std::process::exit(sharp_hardy::cli::main_with_args(std::env::args_os()));
}
