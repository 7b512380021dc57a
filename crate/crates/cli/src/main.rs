use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hcc_cli::commands::{self, ClusterArgs, CompareArgs, SimulateArgs};
use hcc_cli::service::{self, ServiceConfig, DEFAULT_BODY_LIMIT};
use hcc_cli::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "hcc", version, about = "Hierarchical cluster coherence for multichannel recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate replicates of a named experiment or a spec file.
    Simulate(SimulateArgs),
    /// Cluster a CSV recording and write scree, merge and partition outputs.
    Cluster(ClusterArgs),
    /// Compare methods across replicates via affinity matrices and agreement.
    Compare(CompareArgs),
    /// Serve the JSON API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "HCC_ADDR", default_value = "127.0.0.1")]
    addr: IpAddr,
    #[arg(long, env = "HCC_PORT", default_value_t = 8080)]
    port: u16,
    /// Persist datasets under this directory.
    #[arg(long, env = "HCC_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Request body limit in bytes.
    #[arg(long, env = "HCC_BODY_LIMIT", default_value_t = DEFAULT_BODY_LIMIT)]
    body_limit: usize,
}

fn serve(args: ServeArgs) -> CliResult<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let config = ServiceConfig { body_limit: args.body_limit, data_dir: args.data_dir };
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::io("starting runtime"))?;
    runtime.block_on(service::serve(SocketAddr::new(args.addr, args.port), config))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(&a, &argv),
        Command::Cluster(a) => commands::cluster(&a, &argv),
        Command::Compare(a) => commands::compare(&a, &argv),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
