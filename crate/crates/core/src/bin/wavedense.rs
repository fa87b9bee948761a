fn main() {
    std::process::exit(wavedense::cli::main_with(std::env::args_os()));
}
