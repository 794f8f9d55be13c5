fn main() {
    let (code, out) = bdlab::cli::run(std::env::args_os());
    print!("{out}");
    std::process::exit(code);
}
