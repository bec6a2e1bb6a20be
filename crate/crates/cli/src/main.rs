use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use entpur::codes::bundle;
use entpur::experiments::{self, ExperimentConfig, ProtocolKind, Threshold};
use entpur::logical;
use entpur::oracle;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "entpur", version, about = "Entanglement purification with stabilizer codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Logical error rate of the decoder on one noisy channel.
    DecodeBench(RunArgs),
    /// Bell-pair distillation.
    Bell(RunArgs),
    /// GHZ distillation with joint decoding at Bob.
    Ghz1 {
        #[command(flatten)]
        run: RunArgs,
        /// clifford_by_alice, clifford_by_bob or none.
        #[arg(long)]
        placement: Option<String>,
        /// strict or ghz-equivalent.
        #[arg(long)]
        failure_metric: Option<String>,
    },
    /// GHZ distillation with separate decoding at Bob and Charlie.
    Ghz2 {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        failure_metric: Option<String>,
    },
    /// Separate decoding over a tree network of parties.
    Ghz2Multi {
        #[command(flatten)]
        run: RunArgs,
        /// star, chain, or edges such as A-B,B-C,A-D.
        #[arg(long)]
        topology: Option<String>,
        /// Number of parties including the root.
        #[arg(long)]
        parties: Option<usize>,
        #[arg(long)]
        failure_metric: Option<String>,
    },
    /// Print the logical operators produced for a code.
    Logicals {
        #[arg(long, default_value = "five_qubit")]
        code: String,
    },
    /// Run the dense-oracle equivalence suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print every check, not only the summary.
        #[arg(long)]
        verbose: bool,
    },
    /// Estimate the threshold from result CSVs holding several code sizes.
    Threshold { csv: Vec<PathBuf> },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundle name, .code or .lift path.
    #[arg(long)]
    code: Option<String>,
    /// X-check alist (with --hz).
    #[arg(long)]
    hx: Option<String>,
    /// Z-check alist (with --hx).
    #[arg(long)]
    hz: Option<String>,
    /// Comma-separated depolarizing probabilities.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    target_errors: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV file to append results to.
    #[arg(long)]
    out: Option<PathBuf>,
    /// auto, ml or msa.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    norm: Option<f64>,
    /// sequential or flooding.
    #[arg(long)]
    schedule: Option<String>,
    /// Write zero wall time so repeated runs give identical CSVs.
    #[arg(long)]
    no_timing: bool,
}

impl RunArgs {
    fn config(&self, protocol: ProtocolKind, extra: &[(&str, Option<String>)]) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::new(protocol, "toric3");
        if let Some(path) = &self.config {
            c.apply_file(path)?;
            if c.protocol != protocol {
                bail!("config file sets protocol {}, command is {protocol}", c.protocol);
            }
        }
        let flags: Vec<(&str, Option<String>)> = vec![
            ("code", self.code.clone()),
            ("hx", self.hx.clone()),
            ("hz", self.hz.clone()),
            ("p", self.p.clone()),
            ("target-errors", self.target_errors.map(|v| v.to_string())),
            ("max-trials", self.max_trials.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("threads", self.threads.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|v| v.display().to_string())),
            ("decoder", self.decoder.clone()),
            ("max-iter", self.max_iter.map(|v| v.to_string())),
            ("norm", self.norm.map(|v| v.to_string())),
            ("schedule", self.schedule.clone()),
        ];
        for (k, v) in flags.into_iter().chain(extra.iter().cloned()) {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        if self.hx.is_some() != self.hz.is_some() && !c.code.contains(',') {
            bail!("--hx and --hz must be given together");
        }
        if self.no_timing {
            c.timing = false;
        }
        Ok(c)
    }
}

fn run(config: ExperimentConfig) -> Result<()> {
    let rows = experiments::run(&config)?;
    let bytes = experiments::to_csv(&rows, true)?;
    std::io::stdout().write_all(&bytes)?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::DecodeBench(a) => run(a.config(ProtocolKind::DecodeBench, &[])?),
        Command::Bell(a) => run(a.config(ProtocolKind::Bell, &[])?),
        Command::Ghz1 {
            run: a,
            placement,
            failure_metric,
        } => run(a.config(
            ProtocolKind::Ghz1,
            &[("placement", placement), ("failure-metric", failure_metric)],
        )?),
        Command::Ghz2 { run: a, failure_metric } => {
            run(a.config(ProtocolKind::Ghz2, &[("failure-metric", failure_metric)])?)
        }
        Command::Ghz2Multi {
            run: a,
            topology,
            parties,
            failure_metric,
        } => run(a.config(
            ProtocolKind::Ghz2Multi,
            &[
                ("topology", topology),
                ("parties", parties.map(|v| v.to_string())),
                ("failure-metric", failure_metric),
            ],
        )?),
        Command::Logicals { code } => {
            let c = bundle::load_spec(&code)?;
            let s = c.stabilizer();
            let l = logical::logical_paulis(s).with_context(|| format!("logical operators of {}", s.name))?;
            println!("{} [[{}, {}]]", s.name, s.n, s.k);
            for g in &s.generators {
                println!("  stabilizer {g}");
            }
            for z in &l.z {
                println!("  logical_z  {z}");
            }
            for x in &l.x {
                println!("  logical_x  {x}");
            }
            Ok(())
        }
        Command::Verify { seed, verbose } => {
            let reports = oracle::standard_suite(seed);
            let worst = reports.iter().map(|r| r.deviation).fold(0.0, f64::max);
            let exact = |r: &oracle::Report| r.deviation < 1e-10;
            let failed: Vec<_> = reports.iter().filter(|r| !exact(r)).collect();
            for r in &reports {
                if verbose || !exact(r) {
                    println!("{r}");
                }
            }
            println!("{} checks, max deviation {worst:.3e}, {} above 1e-10", reports.len(), failed.len());
            if failed.is_empty() {
                Ok(())
            } else {
                bail!("oracle suite failed")
            }
        }
        Command::Threshold { csv } => {
            let mut rows = Vec::new();
            for path in &csv {
                rows.extend(experiments::read_csv(path)?);
            }
            match experiments::estimate_threshold(&rows) {
                Threshold::NoCrossing => println!("no crossing"),
                Threshold::Crossing { low, high, crossings } => {
                    println!("threshold in [{low}, {high}]");
                    for (a, b, p) in crossings {
                        println!("  {a} / {b}: {p:.5}");
                    }
                }
            }
            Ok(())
        }
    }
}
