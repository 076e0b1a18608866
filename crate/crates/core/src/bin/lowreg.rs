fn main() {
    std::process::exit(lowreg::cli_experiments::main_with(std::env::args_os()));
}
