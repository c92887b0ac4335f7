use clap::Parser;

fn main() {
    if let Err(e) = xylem_cli::run(xylem_cli::Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
