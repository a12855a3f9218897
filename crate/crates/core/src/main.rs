fn main() {
    std::process::exit(lepage::cli_io::run(std::env::args()));
}
