fn main() {
    std::process::exit(lmm_cli::run());
}
