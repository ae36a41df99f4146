fn main() {
    let mut stdout = std::io::stdout().lock();
    let code = poisson_waves_cli::main_with(std::env::args_os(), &mut stdout);
    std::process::exit(code);
}
