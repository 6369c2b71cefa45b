use clap::Parser;

fn main() {
    let cli = cem_cli::Cli::parse();
    if let Err(err) = cem_cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(cem_cli::exit_code(&err));
    }
}
