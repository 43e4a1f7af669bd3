fn main() {
    std::process::exit(quartic_cremona::cli::main_with_args(std::env::args_os()));
}
