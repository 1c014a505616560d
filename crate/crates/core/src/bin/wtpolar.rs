fn main() {
    std::process::exit(wiretap_polar::cli::run());
}
