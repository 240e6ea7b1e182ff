fn main() {
    std::process::exit(fwdgame::cli::main());
}
