fn main() {
    std::process::exit(pam_chaos::cli::run());
}
