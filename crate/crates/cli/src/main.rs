use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use aloha::sim::{derive_row_seed, SimConfig, DEFAULT_MEASURE_SLOTS, DEFAULT_SEED, DEFAULT_WARMUP_SLOTS};
use aloha::steady_state::{Cutoff, NetworkConfig};

use aloha_lab::grid::QGrid;
use aloha_lab::output::{emit, to_json, Csv, Format};
use aloha_lab::records::{AnalyzeRecord, RegionsRecord, SimulateRecord, SweepRecord, SweepRow};
use aloha_lab::suites::{run_suite, SUITES};

/// Seed environment variable consulted when --seed is not given.
const SEED_ENV: &str = "ALOHA_LAB_SEED";

#[derive(Parser)]
#[command(
    name = "aloha-lab",
    version,
    about = "Stability analysis and slot-level simulation of buffered slotted Aloha \
             with K-exponential backoff",
    after_help = "Seeds default to 0xBAC0FF (12239103); the ALOHA_LAB_SEED environment \
                  variable overrides the default and --seed overrides both. Reruns with \
                  the same parameters and seed emit byte-identical files.\n\
                  Exit codes: 0 success, 1 validation failure, 2 usage or domain error."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct NetArgs {
    /// Number of nodes
    #[arg(long)]
    n: u32,
    /// Aggregate arrival rate in packets per slot
    #[arg(long)]
    rate: f64,
    /// Cutoff phase: a positive integer, or "inf" for exponential backoff
    #[arg(long = "K", value_parser = parse_cutoff)]
    k: Cutoff,
}

#[derive(Args)]
struct SimArgs {
    /// Measured slots
    #[arg(long, default_value_t = DEFAULT_MEASURE_SLOTS)]
    slots: u64,
    /// Warmup slots excluded from measurement
    #[arg(long, default_value_t = DEFAULT_WARMUP_SLOTS)]
    warmup: u64,
    /// Master random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Bottomless queues: every node always holds a packet
    #[arg(long)]
    saturated: bool,
}

#[derive(Args)]
struct OutArgs {
    /// Output format (analyze and regions print a text block when omitted)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stable points, region bounds, classification and predicted throughput
    #[command(after_help = csv_help(AnalyzeRecord::CSV_HEADER))]
    Analyze {
        #[command(flatten)]
        net: NetArgs,
        /// Retransmission factor in (0, 1)
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Region bounds and maximum stable throughput for (n, rate, K)
    #[command(after_help = csv_help(RegionsRecord::CSV_HEADER))]
    Regions {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sweep the retransmission factor: analytic predictions per q, plus
    /// measured counterparts when --simulate is given
    #[command(after_help = csv_help(SweepRow::CSV_HEADER))]
    Sweep {
        #[command(flatten)]
        net: NetArgs,
        /// Single retransmission factor (alternative to --q-grid)
        #[arg(long)]
        q: Option<f64>,
        /// Grid start:stop:points[:log]
        #[arg(long = "q-grid")]
        q_grid: Option<QGrid>,
        /// Run the simulator for each row
        #[arg(long)]
        simulate: bool,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// One simulation run with full measured counters
    #[command(after_help = csv_help(SimulateRecord::CSV_HEADER))]
    Simulate {
        #[command(flatten)]
        net: NetArgs,
        /// Retransmission factor in (0, 1)
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Per-slot queue length of one node
    #[command(after_help = "CSV columns: slot,queue_len")]
    Trace {
        #[command(flatten)]
        net: NetArgs,
        /// Retransmission factor in (0, 1)
        #[arg(long)]
        q: f64,
        /// Node whose queue is recorded
        #[arg(long = "trace-node", default_value_t = 0)]
        trace_node: u32,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a named validation suite of paired analytic/simulated checks
    #[command(after_help = "CSV columns: suite,check,predicted,measured,tolerance,kind,pass")]
    Validate {
        /// Suite name (see --list)
        #[arg(long)]
        suite: Option<String>,
        /// List available suites
        #[arg(long)]
        list: bool,
        /// Master random seed
        #[arg(long)]
        seed: Option<u64>,
        /// Format of the --out file
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Write the check table to a file as well
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn csv_help(header: &[&str]) -> String {
    format!("CSV columns: {}", header.join(","))
}

fn parse_cutoff(s: &str) -> Result<Cutoff, String> {
    s.parse().map_err(|e: aloha::Error| e.to_string())
}

fn resolve_seed(cli_seed: Option<u64>) -> anyhow::Result<u64> {
    if let Some(seed) = cli_seed {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .with_context(|| format!("{SEED_ENV} must be an unsigned integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> anyhow::Result<ExitCode> {
    match cmd {
        Cmd::Analyze { net, q, out } => {
            let config = NetworkConfig::new(net.n, net.rate, net.k, q)?;
            let record = AnalyzeRecord::build(&config)?;
            let content = match out.format {
                None => record.to_text(),
                Some(Format::Csv) => record.to_csv(),
                Some(Format::Json) => to_json(&record)?,
            };
            emit(out.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Regions { net, out } => {
            let record = RegionsRecord::build(net.n, net.rate, net.k)?;
            let content = match out.format {
                None => record.to_text(),
                Some(Format::Csv) => record.to_csv(),
                Some(Format::Json) => to_json(&record)?,
            };
            emit(out.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sweep { net, q, q_grid, simulate, sim, out } => {
            let grid = match (q, q_grid) {
                (Some(q), None) => QGrid::single(q),
                (None, Some(grid)) => grid,
                _ => bail!("give exactly one of --q or --q-grid"),
            };
            let qs = grid.values();
            let mut rows = Vec::with_capacity(qs.len());
            for &qv in &qs {
                let config = NetworkConfig::new(net.n, net.rate, net.k, qv)?;
                rows.push(SweepRow::analytic(&config)?);
            }
            if simulate {
                let master = resolve_seed(sim.seed)?;
                let configs: Vec<SimConfig> = qs
                    .iter()
                    .enumerate()
                    .map(|(i, &qv)| {
                        Ok(SimConfig {
                            seed: derive_row_seed(master, i as u64),
                            warmup_slots: sim.warmup,
                            measure_slots: sim.slots,
                            saturated: sim.saturated,
                            trace_node: None,
                            network: NetworkConfig::new(net.n, net.rate, net.k, qv)?,
                        })
                    })
                    .collect::<Result<_, aloha::Error>>()?;
                let metrics = aloha::sweep(&configs)?;
                for ((row, cfg), m) in rows.iter_mut().zip(&configs).zip(&metrics) {
                    row.attach_metrics(cfg.seed, m);
                }
            }
            let record = SweepRecord {
                n: net.n,
                aggregate_rate: net.rate,
                cutoff: net.k,
                rows,
            };
            let content = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => record.to_csv(),
                Format::Json => to_json(&record)?,
            };
            emit(out.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate { net, q, sim, out } => {
            let cfg = SimConfig {
                seed: resolve_seed(sim.seed)?,
                warmup_slots: sim.warmup,
                measure_slots: sim.slots,
                saturated: sim.saturated,
                trace_node: None,
                network: NetworkConfig::new(net.n, net.rate, net.k, q)?,
            };
            let record = SimulateRecord::build(&cfg)?;
            let content = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => record.to_csv(),
                Format::Json => to_json(&record)?,
            };
            emit(out.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Trace { net, q, trace_node, sim, out } => {
            let cfg = SimConfig {
                seed: resolve_seed(sim.seed)?,
                warmup_slots: sim.warmup,
                measure_slots: sim.slots,
                saturated: sim.saturated,
                trace_node: Some(trace_node),
                network: NetworkConfig::new(net.n, net.rate, net.k, q)?,
            };
            let metrics = aloha::run(&cfg)?;
            let trace = metrics.queue_trace.unwrap_or_default();
            let content = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut csv = Csv::new(vec!["slot", "queue_len"]);
                    for t in &trace {
                        csv.push(vec![t.slot.to_string(), t.queue_len.to_string()]);
                    }
                    csv.render()
                }
                Format::Json => to_json(&trace)?,
            };
            emit(out.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Validate { suite, list, seed, format, out } => {
            if list {
                let mut s = String::new();
                for (name, blurb) in SUITES {
                    s += &format!("{name:<14} {blurb}\n");
                }
                emit(None, &s)?;
                return Ok(ExitCode::SUCCESS);
            }
            let Some(name) = suite else {
                bail!("validate needs --suite NAME (or --list)");
            };
            let report = run_suite(&name, resolve_seed(seed)?)?;
            print!("{}", report.to_text());
            if let Some(path) = out {
                let content = match format.unwrap_or(Format::Csv) {
                    Format::Csv => report.to_csv(),
                    Format::Json => to_json(&report)?,
                };
                emit(Some(&path), &content)?;
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
