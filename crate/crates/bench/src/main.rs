fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(divload_bench::cli::main_with(&argv));
}
