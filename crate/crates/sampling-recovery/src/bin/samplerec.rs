fn main() {
    let code = sampling_recovery::cli::cli_main(std::env::args().skip(1));
    std::process::exit(code);
}
