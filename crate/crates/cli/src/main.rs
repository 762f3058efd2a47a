fn main() {
    std::process::exit(hdsim_cli::main_with_args(std::env::args_os()));
}
