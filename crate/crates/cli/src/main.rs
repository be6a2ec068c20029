fn main() {
    std::process::exit(rabi_cli::app::main());
}
