fn main() {
    let code = telesim::run(std::env::args_os());
    std::process::exit(code);
}
