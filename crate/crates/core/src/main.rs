fn main() {
    let code = planchlab::cli::run(std::env::args_os());
    std::process::exit(code);
}
