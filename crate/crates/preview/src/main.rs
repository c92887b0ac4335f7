use clap::Parser;
use xylem_preview::{serve, ServiceConfig};

/// Procedural wood preview server.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Seed for requests that do not set one.
    #[arg(long)]
    seed: Option<u64>,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    eprintln!("listening on http://{}:{}", args.host, args.port);
    serve(&args.host, args.port, ServiceConfig { seed: args.seed }).await
}
