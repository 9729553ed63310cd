fn main() {
    std::process::exit(tsvd_core::cli::run(std::env::args_os()));
}
