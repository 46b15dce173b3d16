fn main() {
    std::process::exit(bframe::run_command(std::env::args_os()));
}
