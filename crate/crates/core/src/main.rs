fn main() {
    std::process::exit(thermosc::cli::main_with_args(std::env::args_os()));
}
