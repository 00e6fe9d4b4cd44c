fn main() {
    std::process::exit(infobounds::cli::main_with_args(std::env::args_os()));
}
