use clap::Parser;

fn main() {
    let cli = vizing_cli::Cli::parse();
    if let Err(e) = vizing_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
