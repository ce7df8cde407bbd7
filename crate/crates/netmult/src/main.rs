fn main() {
    std::process::exit(netmult::cli::run(std::env::args_os()));
}
