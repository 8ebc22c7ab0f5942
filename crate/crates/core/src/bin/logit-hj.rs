fn main() {
    std::process::exit(logit_hj::cli::run(std::env::args_os()));
}
