//! Monte Carlo campaigns, configuration files, CSV output and threshold
//! estimation.
//!
//! Trials are run in batches on the rayon pool. Trial `t` at point `i`
//! always draws from `trial_rng(seed, i, t)` and the stop rule is applied
//! by scanning outcomes in trial order, so the counts do not depend on
//! the number of workers.

use crate::channels::trial_rng;
use crate::codes::bundle::{self, Code};
use crate::decoders::{MsaConfig, Schedule};
use crate::protocols::{
    BellProtocol, Classification, Decoder, FailureMetric, Ghz1Protocol, Ghz2Protocol, NetworkTopology,
    Placement, Protocol, ProtocolError, TrialOutcome,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

const FIRST_BATCH: u64 = 256;
const MAX_BATCH: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Code(#[from] crate::codes::CodeError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolKind {
    DecodeBench,
    Bell,
    Ghz1,
    Ghz2,
    Ghz2Multi,
}

impl FromStr for ProtocolKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.replace('-', "_").as_str() {
            "decode_bench" => Ok(ProtocolKind::DecodeBench),
            "bell" => Ok(ProtocolKind::Bell),
            "ghz1" => Ok(ProtocolKind::Ghz1),
            "ghz2" => Ok(ProtocolKind::Ghz2),
            "ghz2_multi" => Ok(ProtocolKind::Ghz2Multi),
            _ => Err(format!("unknown protocol {s:?}")),
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::DecodeBench => "decode_bench",
            ProtocolKind::Bell => "bell",
            ProtocolKind::Ghz1 => "ghz1",
            ProtocolKind::Ghz2 => "ghz2",
            ProtocolKind::Ghz2Multi => "ghz2_multi",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderKind {
    /// Min-sum for CSS codes, lookup otherwise.
    Auto,
    Ml,
    Msa,
}

impl FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(DecoderKind::Auto),
            "ml" => Ok(DecoderKind::Ml),
            "msa" => Ok(DecoderKind::Msa),
            _ => Err(format!("unknown decoder {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    /// Bundle name, `.code`/`.lift` path, or `hx,hz` alist paths.
    pub code: String,
    pub p_values: Vec<f64>,
    pub target_errors: Option<u64>,
    pub max_trials: Option<u64>,
    pub decoder: DecoderKind,
    pub msa: MsaConfig,
    pub placement: Placement,
    pub failure_metric: FailureMetric,
    pub topology: String,
    pub parties: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    /// Record wall-clock time; off makes the CSV reproducible byte for byte.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(protocol: ProtocolKind, code: &str) -> Self {
        let (p_values, target) = match protocol {
            ProtocolKind::DecodeBench => (vec![0.01, 0.03, 0.05, 0.07, 0.09, 0.1, 0.104, 0.108], 100),
            ProtocolKind::Ghz2 | ProtocolKind::Ghz2Multi => (vec![0.09, 0.1, 0.104, 0.108, 0.11], 10_000),
            _ => (vec![0.01, 0.03], 100),
        };
        ExperimentConfig {
            protocol,
            code: code.to_string(),
            p_values,
            target_errors: Some(target),
            max_trials: Some(1_000_000),
            decoder: DecoderKind::Auto,
            msa: MsaConfig::default(),
            placement: Placement::CliffordByBob,
            failure_metric: FailureMetric::Strict,
            topology: "star".into(),
            parties: 4,
            seed: 1,
            threads: None,
            out: None,
            timing: true,
        }
    }

    /// Applies one `key = value` setting; keys mirror the CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let bad = |e: String| ExperimentError::Config(format!("{key}: {e}"));
        let num = |v: &str| v.parse::<u64>().map_err(|e| bad(e.to_string()));
        let float = |v: &str| v.parse::<f64>().map_err(|e| bad(e.to_string()));
        match key.replace('_', "-").as_str() {
            "protocol" => self.protocol = value.parse().map_err(bad)?,
            "code" => self.code = value.to_string(),
            "hx" | "hz" => {
                let (hx, hz) = self.code.split_once(',').unwrap_or(("", ""));
                let (hx, hz) = if key == "hx" { (value, hz) } else { (hx, value) };
                self.code = format!("{hx},{hz}");
            }
            "p" => {
                self.p_values = value
                    .split(',')
                    .map(|s| float(s.trim()))
                    .collect::<Result<_, _>>()?
            }
            "target-errors" => self.target_errors = Some(num(value)?).filter(|&n| n > 0),
            "max-trials" => self.max_trials = Some(num(value)?).filter(|&n| n > 0),
            "decoder" => self.decoder = value.parse().map_err(bad)?,
            "max-iter" => self.msa.max_iters = num(value)? as usize,
            "norm" => self.msa.normalization = float(value)?,
            "schedule" => self.msa.schedule = value.parse::<Schedule>().map_err(bad)?,
            "placement" => self.placement = value.parse().map_err(bad)?,
            "failure-metric" => self.failure_metric = value.parse().map_err(bad)?,
            "topology" => self.topology = value.to_string(),
            "parties" => self.parties = num(value)? as usize,
            "seed" => self.seed = num(value)?,
            "threads" => self.threads = Some(num(value)? as usize).filter(|&t| t > 0),
            "out" => self.out = Some(PathBuf::from(value)),
            "timing" => self.timing = value.parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
            _ => return Err(ExperimentError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ExperimentError::Config(format!("{}:{}: expected key = value", path.display(), ln + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.p_values.is_empty() {
            return Err(ExperimentError::Config("no p values".into()));
        }
        if let Some(p) = self.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(ExperimentError::Config(format!("p = {p} outside [0, 1]")));
        }
        if self.target_errors.is_none() && self.max_trials.is_none() {
            return Err(ExperimentError::Config("need target-errors or max-trials".into()));
        }
        let norm_ok = self.msa.normalization > 0.0 && self.msa.normalization <= 1.0;
        if self.msa.max_iters == 0 || !norm_ok {
            return Err(ExperimentError::Config("max-iter must be positive and norm in (0, 1]".into()));
        }
        if self.protocol == ProtocolKind::Ghz2Multi && self.parties < 3 {
            return Err(ExperimentError::Config("ghz2_multi needs at least 3 parties".into()));
        }
        Ok(())
    }

    fn decoder_for(&self, code: &Code) -> Decoder {
        match (self.decoder, code.css()) {
            (DecoderKind::Ml, _) | (DecoderKind::Auto, None) => Decoder::Ml,
            _ => Decoder::Msa(self.msa),
        }
    }
}

/// One CSV row per (protocol, code, p).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub protocol: String,
    pub code_name: String,
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub logical_errors: u64,
    pub heralded_failures: u64,
    pub failure_rate: f64,
    pub mean_iterations: f64,
    pub wall_seconds: f64,
    pub seed: u64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

pub const CSV_HEADER: [&str; 15] = [
    "protocol",
    "code_name",
    "n",
    "k",
    "p",
    "trials",
    "successes",
    "logical_errors",
    "heralded_failures",
    "failure_rate",
    "mean_iterations",
    "wall_seconds",
    "seed",
    "wilson_low",
    "wilson_high",
];

/// 95% Wilson score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let ph = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (ph + z * z / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tally {
    pub trials: u64,
    pub successes: u64,
    pub logical_errors: u64,
    pub heralded_failures: u64,
    pub iterations: u64,
}

impl Tally {
    fn add(&mut self, o: &TrialOutcome) {
        self.trials += 1;
        self.iterations += o.iterations as u64;
        match o.classification {
            Classification::Success => self.successes += 1,
            Classification::LogicalError => self.logical_errors += 1,
            Classification::HeraldedFailure => self.heralded_failures += 1,
        }
    }

    pub fn failures(&self) -> u64 {
        self.logical_errors + self.heralded_failures
    }
}

/// Runs trials until `target` failures or `max` trials, whichever first.
pub fn run_point(
    proto: &dyn Protocol,
    seed: u64,
    point: u64,
    target: Option<u64>,
    max: Option<u64>,
) -> Tally {
    let mut tally = Tally::default();
    let mut batch = FIRST_BATCH;
    loop {
        let start = tally.trials;
        let end = max.map_or(start + batch, |m| m.min(start + batch));
        if end <= start {
            break;
        }
        let outcomes: Vec<TrialOutcome> = (start..end)
            .into_par_iter()
            .map(|t| proto.trial(&mut trial_rng(seed, point, t)))
            .collect();
        for o in &outcomes {
            tally.add(o);
            if target.is_some_and(|n| tally.failures() >= n) {
                return tally;
            }
        }
        if max.is_some_and(|m| tally.trials >= m) {
            break;
        }
        batch = (batch * 2).min(MAX_BATCH);
    }
    tally
}

/// Builds the protocol instance for one channel parameter.
pub fn prepare(config: &ExperimentConfig, code: &Code, p: f64) -> Result<Box<dyn Protocol>, ExperimentError> {
    let decoder = config.decoder_for(code);
    Ok(match config.protocol {
        ProtocolKind::DecodeBench | ProtocolKind::Bell => Box::new(BellProtocol::new(code, decoder, p)?),
        ProtocolKind::Ghz1 => Box::new(Ghz1Protocol::new(
            code.stabilizer(),
            decoder,
            p,
            config.placement,
            config.failure_metric,
        )?),
        ProtocolKind::Ghz2 | ProtocolKind::Ghz2Multi => {
            let css = code.clone().into_css()?;
            let topo = if config.protocol == ProtocolKind::Ghz2 {
                NetworkTopology::star(3)
            } else {
                NetworkTopology::parse(&config.topology, config.parties)?
            };
            Box::new(Ghz2Protocol::new(&css, decoder, p, topo, config.failure_metric)?)
        }
    })
}

/// Runs every point of `config`, appending rows to `config.out` if set.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    config.validate()?;
    let code = bundle::load_spec(&config.code)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let mut rows = Vec::with_capacity(config.p_values.len());
    for (i, &p) in config.p_values.iter().enumerate() {
        let started = Instant::now();
        let proto = prepare(config, &code, p)?;
        let tally = pool.install(|| run_point(proto.as_ref(), config.seed, i as u64, config.target_errors, config.max_trials));
        let wall = if config.timing { started.elapsed().as_secs_f64() } else { 0.0 };
        let row = result_row(config, proto.as_ref(), p, &tally, wall);
        log::info!(
            "{} {} p={p}: {}/{} failed ({:.4e}) in {:.1}s",
            config.protocol,
            row.code_name,
            tally.failures(),
            tally.trials,
            row.failure_rate,
            wall
        );
        if let Some(out) = &config.out {
            append_csv(out, std::slice::from_ref(&row))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn result_row(config: &ExperimentConfig, proto: &dyn Protocol, p: f64, t: &Tally, wall: f64) -> ResultRow {
    let trials = t.trials.max(1) as f64;
    let (lo, hi) = wilson_interval(t.failures(), t.trials);
    ResultRow {
        protocol: config.protocol.to_string(),
        code_name: proto.code_name().to_string(),
        n: proto.n(),
        k: proto.k(),
        p,
        trials: t.trials,
        successes: t.successes,
        logical_errors: t.logical_errors,
        heralded_failures: t.heralded_failures,
        failure_rate: if t.trials == 0 { 0.0 } else { (t.trials - t.successes) as f64 / trials },
        mean_iterations: t.iterations as f64 / trials,
        wall_seconds: wall,
        seed: config.seed,
        wilson_low: lo,
        wilson_high: hi,
    }
}

/// Serializes rows, with a header when `header` is set.
pub fn to_csv(rows: &[ResultRow], header: bool) -> Result<Vec<u8>, ExperimentError> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if header && rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.into_inner().map_err(|e| ExperimentError::Config(e.to_string()))
}

/// Appends rows in a single write; a header is written to new files.
pub fn append_csv(path: &Path, rows: &[ResultRow]) -> Result<(), ExperimentError> {
    let io = |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    };
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let bytes = to_csv(rows, fresh)?;
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    f.write_all(&bytes).map_err(io)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, ExperimentError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Threshold {
    NoCrossing,
    Crossing {
        /// Hull of all sign-change brackets.
        low: f64,
        high: f64,
        /// Log-linear crossing estimate per pair of consecutive code sizes.
        crossings: Vec<(String, String, f64)>,
    },
}

/// Locates where the failure-rate curves of consecutive code sizes cross.
pub fn estimate_threshold(rows: &[ResultRow]) -> Threshold {
    let mut by_code: BTreeMap<(usize, String), BTreeMap<u64, f64>> = BTreeMap::new();
    for r in rows {
        by_code
            .entry((r.n, r.code_name.clone()))
            .or_default()
            .insert(r.p.to_bits(), r.failure_rate);
    }
    let codes: Vec<_> = by_code.into_iter().collect();
    let mut low = f64::INFINITY;
    let mut high = f64::NEG_INFINITY;
    let mut crossings = Vec::new();
    for pair in codes.windows(2) {
        let ((_, small_name), small) = &pair[0];
        let ((_, large_name), large) = &pair[1];
        let mut pts: Vec<(f64, f64)> = small
            .iter()
            .filter_map(|(pb, &fs)| {
                let fl = *large.get(pb)?;
                (fs > 0.0 && fl > 0.0).then(|| (f64::from_bits(*pb), (fs / fl).ln()))
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (i, &(p, d)) in pts.iter().enumerate() {
            let bracket = if d == 0.0 {
                Some((p, p, p))
            } else {
                pts.get(i + 1).and_then(|&(q, e)| {
                    (d * e < 0.0).then(|| (p, q, p + (q - p) * d / (d - e)))
                })
            };
            if let Some((lo, hi, x)) = bracket {
                low = low.min(lo);
                high = high.max(hi);
                crossings.push((small_name.clone(), large_name.clone(), x));
            }
        }
    }
    if crossings.is_empty() {
        Threshold::NoCrossing
    } else {
        Threshold::Crossing { low, high, crossings }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(code: &str, n: usize, p: f64, f: f64) -> ResultRow {
        ResultRow {
            protocol: "test".into(),
            code_name: code.into(),
            n,
            k: 1,
            p,
            trials: 1000,
            successes: ((1.0 - f) * 1000.0) as u64,
            logical_errors: 0,
            heralded_failures: 0,
            failure_rate: f,
            mean_iterations: 0.0,
            wall_seconds: 0.0,
            seed: 0,
            wilson_low: 0.0,
            wilson_high: 0.0,
        }
    }

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(30, 1000);
        assert!(lo < 0.03 && 0.03 < hi);
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        // Textbook value for 0 of 10: upper bound 0.2775.
        assert!((wilson_interval(0, 10).1 - 0.2775).abs() < 1e-4);
    }

    #[test]
    fn threshold_no_crossing() {
        let rows = vec![row("a", 10, 0.1, 0.5), row("a", 10, 0.2, 0.6), row("b", 20, 0.1, 0.3), row("b", 20, 0.2, 0.4)];
        assert_eq!(estimate_threshold(&rows), Threshold::NoCrossing);
    }

    #[test]
    fn threshold_interpolates() {
        let rows = vec![row("a", 10, 0.1, 0.2), row("a", 10, 0.2, 0.4), row("b", 20, 0.1, 0.1), row("b", 20, 0.2, 0.8)];
        match estimate_threshold(&rows) {
            Threshold::Crossing { low, high, crossings } => {
                assert_eq!((low, high), (0.1, 0.2));
                // ln 2 at 0.1, ln 0.5 at 0.2: midpoint.
                assert!((crossings[0].2 - 0.15).abs() < 1e-12);
            }
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn config_keys() {
        let mut c = ExperimentConfig::new(ProtocolKind::Ghz2, "steane");
        c.set("p", "0.01, 0.02").unwrap();
        c.set("max-iter", "50").unwrap();
        c.set("schedule", "flooding").unwrap();
        c.set("hx", "a.alist").unwrap();
        c.set("hz", "b.alist").unwrap();
        assert_eq!(c.p_values, vec![0.01, 0.02]);
        assert_eq!(c.msa.max_iters, 50);
        assert_eq!(c.msa.schedule, Schedule::Flooding);
        assert_eq!(c.code, "a.alist,b.alist");
        assert!(c.set("bogus", "1").is_err());
        c.set("p", "1.5").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_roundtrip_and_header() {
        let rows = vec![row("a", 10, 0.1, 0.25)];
        let text = String::from_utf8(to_csv(&rows, true).unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let back: Vec<ResultRow> = r.deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(back, rows);
    }
}
