fn main() {
    std::process::exit(sphere_chaos::cli::main_with_args(std::env::args_os()));
}
