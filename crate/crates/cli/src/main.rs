//! `birkhoff`: exact Ehrhart polynomials and volumes of Birkhoff polytopes.

mod commands;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Invalid command lines exit with this code.
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "birkhoff", version, about = "Exact Ehrhart polynomials and volumes of Birkhoff polytopes")]
struct Cli {
    /// Worker threads for independent evaluations (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Dp,
    Ct,
    Naive,
}

#[derive(Debug, Args)]
pub struct EngineOpts {
    /// Counting engine (default: dp for n <= 4, ct otherwise).
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
}

impl EngineOpts {
    fn resolve(&self, n: usize) -> EngineArg {
        self.engine.unwrap_or(if n <= 4 { EngineArg::Dp } else { EngineArg::Ct })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count H_n(t) for one dilation or a range of them.
    Count {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, conflicts_with = "t_max", required_unless_present = "t_max")]
        t: Option<u32>,
        /// Count every t in 0..=t-max.
        #[arg(long)]
        t_max: Option<u32>,
        #[command(flatten)]
        engine: EngineOpts,
        /// Composition range [lo, hi) for the ct engine (partial sums).
        #[arg(long, requires = "hi")]
        lo: Option<u64>,
        #[arg(long, requires = "lo")]
        hi: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble the Ehrhart polynomial from T(n) evaluations.
    Ehrhart(PipelineOpts),
    /// Assemble the polynomial and report leading coefficient and volume.
    Volume(PipelineOpts),
    /// Write a task manifest for a distributed run.
    Tasks {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        /// Dilations to include (default: 1..=T(n)).
        #[arg(long, value_delimiter = ',', conflicts_with = "t_max")]
        ts: Vec<u32>,
        #[arg(long)]
        t_max: Option<u32>,
        /// Compositions per chunk.
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        chunk: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve a manifest to TCP workers until every task is done.
    Coordinate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "0.0.0.0:7437")]
        listen: SocketAddr,
        /// Lease timeout in seconds.
        #[arg(long, default_value_t = 900.0)]
        lease_timeout: f64,
        /// Write the bound address here once listening.
        #[arg(long)]
        addr_file: Option<PathBuf>,
    },
    /// Evaluate chunks from a coordinator or from a shared directory.
    Worker(WorkerOpts),
    /// Sum a results log; assemble the polynomial when the manifest covers 1..=T(n).
    Aggregate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a volume with a golden value, or check a result file's structure.
    Verify {
        /// Golden name (b10) or an explicit p/q fraction.
        #[arg(long, requires = "volume_file")]
        golden: Option<String>,
        /// Result document or a file holding a single p/q.
        #[arg(long)]
        volume_file: Option<PathBuf>,
        /// Result document to check against the structural identities.
        #[arg(long, required_unless_present = "golden")]
        result_file: Option<PathBuf>,
    },
    /// Read-only progress report for a distributed run.
    Status {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        results: PathBuf,
        /// Lock directory of a local-mode run, to count live leases.
        #[arg(long)]
        lock_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 900.0)]
        lease_timeout: f64,
    },
}

#[derive(Debug, Args)]
pub struct PipelineOpts {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[command(flatten)]
    engine: EngineOpts,
    /// Also record wall-clock time in the --out document.
    #[arg(long)]
    wall_time: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WorkerOpts {
    /// Coordinator address.
    #[arg(long, conflicts_with = "local_dir", required_unless_present = "local_dir")]
    connect: Option<String>,
    /// Shared lock directory (local mode, needs --manifest and --results).
    #[arg(long, requires_all = ["manifest", "results"])]
    local_dir: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    results: Option<PathBuf>,
    #[arg(long)]
    worker_id: Option<String>,
    /// Failed connection attempts tolerated in a row.
    #[arg(long, default_value_t = 10)]
    retries: u32,
    #[arg(long, default_value_t = 100)]
    backoff_ms: u64,
    /// Heartbeat interval in seconds.
    #[arg(long, default_value_t = 30.0)]
    heartbeat: f64,
    /// Lease timeout in seconds (local mode).
    #[arg(long, default_value_t = 900.0)]
    lease_timeout: f64,
    /// Sleep after each evaluation (fault-injection runs).
    #[arg(long, default_value_t = 0)]
    throttle_ms: u64,
    /// Exit cleanly after this many chunks.
    #[arg(long)]
    max_tasks: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BIRKHOFF_LOG", "error"))
        .format_timestamp_millis()
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global().expect("thread pool configured once");
    }
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
