fn main() {
    std::process::exit(hfsurg::cli::main());
}
