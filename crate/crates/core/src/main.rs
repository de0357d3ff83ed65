fn main() {
    let code = jutila::cli::run(std::env::args(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
