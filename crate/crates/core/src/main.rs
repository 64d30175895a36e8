fn main() {
    std::process::exit(ivc_kind::cli::run(std::env::args_os()));
}
