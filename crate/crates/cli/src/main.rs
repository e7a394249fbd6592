fn main() {
    std::process::exit(tdsim_cli::run());
}
