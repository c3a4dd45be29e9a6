fn main() {
    std::process::exit(unruh_qfi::cli::run());
}
