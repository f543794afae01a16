fn main() {
    std::process::exit(vecstab::cli::run(std::env::args_os()));
}
