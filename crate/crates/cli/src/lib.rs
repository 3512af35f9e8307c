//! Grid-scan driver: config validation, parallel scenario evaluation over a
//! (q, SNR) grid, and deterministic CSV/JSON emission.

use serde::Serialize;
use sparse_rates::oracle::{mc_i1, mc_i2};
use sparse_rates::rates::{
    mac_rate, memoryless_optimality_scan, rate_causal_state, rate_controlled,
    rate_pattern_info, rate_unknown_pattern, secrecy_controlled, secrecy_unavailable,
    secrecy_uncontrolled,
};
use sparse_rates::replica::i1_replica;
use sparse_rates::rigorous::i1_rigorous;
use sparse_rates::shannon_transform::i2;
use sparse_rates::{ChannelParams, Route, SparsityLaw, WiretapParams};
use std::io::Write as _;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What to compute at each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    I1Replica,
    I1Rigorous,
    I2,
    Controlled,
    Unknown,
    CausalState,
    PatternInfo,
    WiretapControlled,
    WiretapUnavailable,
    WiretapUncontrolled,
    Mac,
    MemorylessScan,
    OracleI1,
    OracleI2,
}

impl Scenario {
    pub fn is_wiretap(self) -> bool {
        matches!(
            self,
            Scenario::WiretapControlled
                | Scenario::WiretapUnavailable
                | Scenario::WiretapUncontrolled
        )
    }

    pub fn is_oracle(self) -> bool {
        matches!(self, Scenario::OracleI1 | Scenario::OracleI2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Nats,
    Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Error categories double as exit codes: config = 1, compute = 2, io = 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(String),
    Io(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Compute(_) => "compute",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Compute(m) | CliError::Io(m) => m,
        }
    }
}

/// Parses `a:b:step` ranges or comma lists into a grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Config(m);
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("range syntax is a:b:step, got {text:?}")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("bad number in range {text:?}: {e}")))?;
        let (a, b, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || b < a {
            return Err(bad(format!("range {text:?} needs b >= a and step > 0")));
        }
        let count = ((b - a) / step + 1.0 + 1e-9).floor() as usize;
        (0..count).map(|i| a + i as f64 * step).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("bad number in list {text:?}: {e}")))?
    };
    if values.is_empty() {
        return Err(bad(format!("empty grid {text:?}")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad(format!("grid {text:?} must be strictly increasing")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad(format!("grid {text:?} contains non-finite values")));
    }
    Ok(values)
}

/// A validated scan request.
#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub scenario: Scenario,
    pub p: f64,
    pub q_grid: Vec<f64>,
    pub snr_db_grid: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub units: Units,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub format: Format,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad(format!("--p must be in (0,1), got {}", self.p));
        }
        for &q in &self.q_grid {
            if !(q > 0.0 && q <= 1.0) {
                return bad(format!("--q values must be in (0,1], got {q}"));
            }
        }
        match (self.scenario.is_wiretap(), self.q2) {
            (true, None) => return bad("--q2 is required for wiretap scenarios".into()),
            (false, Some(_)) => return bad("--q2 only applies to wiretap scenarios".into()),
            (true, Some(q2)) if !(q2 > 0.0 && q2 <= 1.0) => {
                return bad(format!("--q2 must be in (0,1], got {q2}"))
            }
            _ => {}
        }
        match (self.scenario == Scenario::Mac, self.alpha) {
            (true, None) => return bad("--alpha is required for the mac scenario".into()),
            (false, Some(_)) => return bad("--alpha only applies to the mac scenario".into()),
            (true, Some(a)) if !(0.0..1.0).contains(&a) => {
                return bad(format!("--alpha must be in [0,1), got {a}"))
            }
            _ => {}
        }
        match (self.scenario.is_oracle(), self.n) {
            (true, None) => return bad("--n is required for oracle scenarios".into()),
            (false, Some(_)) => return bad("--n only applies to oracle scenarios".into()),
            (true, Some(0)) => return bad("--n must be >= 1".into()),
            _ => {}
        }
        if self.trials == 0 {
            return bad("--trials must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanMeta {
    pub version: String,
    pub wall_ms: u128,
}

/// Row-major results (q outer, snr inner), with per-cell clamp flags and
/// diagnostics for failed cells.
#[derive(Debug, Clone, Serialize)]
pub struct ScanTable {
    pub config: ScanConfig,
    pub axes: Axes,
    pub values: Vec<Option<f64>>,
    pub clamped: Vec<bool>,
    pub meta: ScanMeta,
    #[serde(skip)]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Axes {
    pub q: Vec<f64>,
    pub snr_db: Vec<f64>,
}

fn eval_cell(cfg: &ScanConfig, q: f64, snr_db: f64) -> sparse_rates::Result<(f64, bool)> {
    let params = ChannelParams::from_snr_db(cfg.p, snr_db, q)?;
    let law = SparsityLaw::memoryless(cfg.p)?;
    let route = Route::Rigorous;
    let report = |r: sparse_rates::RateReport| (r.rate, r.clamped);
    Ok(match cfg.scenario {
        Scenario::I1Replica => (i1_replica(&params)?, false),
        Scenario::I1Rigorous => (i1_rigorous(&params, &law)?, false),
        Scenario::I2 => (i2(&params)?.i2, false),
        Scenario::Controlled => report(rate_controlled(&params, &law, route)?),
        Scenario::Unknown => report(rate_unknown_pattern(&params, &law, route)?),
        Scenario::CausalState => report(rate_causal_state(&params, Route::Replica)?),
        Scenario::PatternInfo => report(rate_pattern_info(&params, &law, route)?),
        Scenario::WiretapControlled => {
            let wp = WiretapParams::new(params, cfg.q2.unwrap())?;
            report(secrecy_controlled(&wp, &law, route)?)
        }
        Scenario::WiretapUnavailable => {
            let wp = WiretapParams::new(params, cfg.q2.unwrap())?;
            report(secrecy_unavailable(&wp, &law, route)?)
        }
        Scenario::WiretapUncontrolled => {
            let wp = WiretapParams::new(params, cfg.q2.unwrap())?;
            report(secrecy_uncontrolled(&wp, &law, route)?)
        }
        Scenario::Mac => report(mac_rate(&params, &law, cfg.alpha.unwrap(), route)?),
        Scenario::MemorylessScan => {
            let r = memoryless_optimality_scan(&params, 3, cfg.trials, cfg.seed, None)?;
            (r.max_gap, false)
        }
        Scenario::OracleI1 => (mc_i1(cfg.n.unwrap(), cfg.trials, &params, &law, cfg.seed)?.mean, false),
        Scenario::OracleI2 => (mc_i2(cfg.n.unwrap(), cfg.trials, &params, cfg.seed)?.mean, false),
    })
}

/// Evaluates every cell in parallel; failed cells become missing values with
/// a diagnostic line instead of aborting the sweep.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanTable, CliError> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let start = std::time::Instant::now();

    let cells: Vec<(usize, f64, f64)> = cfg
        .q_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &q)| {
            cfg.snr_db_grid
                .iter()
                .enumerate()
                .map(move |(j, &s)| (i * cfg.snr_db_grid.len() + j, q, s))
        })
        .collect();

    let results: Vec<Result<(f64, bool), String>> = pool.install(|| {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(_, q, snr)| {
                eval_cell(cfg, q, snr).map_err(|e| format!("q={q}, snr_db={snr}: {e}"))
            })
            .collect()
    });

    let scale = match cfg.units {
        Units::Nats => 1.0,
        Units::Bits => std::f64::consts::LN_2.recip(),
    };
    let mut values = Vec::with_capacity(results.len());
    let mut clamped = Vec::with_capacity(results.len());
    let mut diagnostics = Vec::new();
    for r in results {
        match r {
            Ok((v, c)) => {
                values.push(Some(v * scale));
                clamped.push(c);
            }
            Err(msg) => {
                values.push(None);
                clamped.push(false);
                diagnostics.push(msg);
            }
        }
    }

    Ok(ScanTable {
        config: cfg.clone(),
        axes: Axes { q: cfg.q_grid.clone(), snr_db: cfg.snr_db_grid.clone() },
        values,
        clamped,
        meta: ScanMeta { version: VERSION.into(), wall_ms: start.elapsed().as_millis() },
        diagnostics,
    })
}

/// Thread pool capped by `SPARSE_RATES_THREADS` (0 or unset = auto).
fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var("SPARSE_RATES_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("SPARSE_RATES_THREADS must be a count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// 12 significant digits, '.' decimal separator.
fn fmt_value(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn to_csv(table: &ScanTable) -> String {
    let mut out = String::from("q,snr_db,value,clamped\n");
    let ncols = table.axes.snr_db.len();
    for (idx, value) in table.values.iter().enumerate() {
        let q = table.axes.q[idx / ncols];
        let snr = table.axes.snr_db[idx % ncols];
        let v = value.map(fmt_value).unwrap_or_default();
        out.push_str(&format!("{q},{snr},{v},{}\n", table.clamped[idx]));
    }
    out
}

pub fn to_json(table: &ScanTable) -> Result<String, CliError> {
    serde_json::to_string_pretty(table)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(format!("json encoding: {e}")))
}

/// Writes the table (and a companion diagnostics file when cells failed).
/// `path = None` prints to stdout.
pub fn emit(table: &ScanTable, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let body = match format {
        Format::Csv => to_csv(table),
        Format::Json => to_json(table)?,
    };
    match path {
        Some(p) => {
            std::fs::write(p, body)
                .map_err(|e| CliError::Io(format!("writing {}: {e}", p.display())))?;
            if !table.diagnostics.is_empty() {
                let diag = p.with_extension(format!(
                    "{}.diagnostics.txt",
                    p.extension().and_then(|e| e.to_str()).unwrap_or("out")
                ));
                let text = table.diagnostics.join("\n") + "\n";
                std::fs::write(&diag, text)
                    .map_err(|e| CliError::Io(format!("writing {}: {e}", diag.display())))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Io(format!("writing stdout: {e}")))?;
            for d in &table.diagnostics {
                eprintln!("cell failed: {d}");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(scenario: Scenario) -> ScanConfig {
        ScanConfig {
            scenario,
            p: 0.2,
            q_grid: vec![0.5],
            snr_db_grid: vec![10.0],
            q2: None,
            alpha: None,
            units: Units::Nats,
            seed: 0,
            trials: 100,
            n: None,
            format: Format::Csv,
        }
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_grid("1,2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        let g = parse_grid("0.1:1.0:0.1").unwrap();
        assert_eq!(g.len(), 10);
        assert!((g[9] - 1.0).abs() < 1e-9);
        assert!(parse_grid("3,2").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn validation_catches_field_mismatches() {
        let mut cfg = config(Scenario::I2);
        cfg.q2 = Some(0.3);
        assert!(cfg.validate().is_err());

        let cfg = config(Scenario::WiretapControlled);
        assert!(cfg.validate().is_err());

        let mut cfg = config(Scenario::Mac);
        assert!(cfg.validate().is_err());
        cfg.alpha = Some(0.5);
        assert!(cfg.validate().is_ok());

        let cfg = config(Scenario::OracleI2);
        assert!(cfg.validate().is_err());

        let mut cfg = config(Scenario::I2);
        cfg.q_grid = vec![1.5];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_cell_i2_matches_library() {
        let cfg = config(Scenario::I2);
        let table = run_scan(&cfg).unwrap();
        assert_eq!(table.values.len(), 1);
        let params = ChannelParams::from_snr_db(0.2, 10.0, 0.5).unwrap();
        let expected = i2(&params).unwrap().i2;
        assert_eq!(table.values[0], Some(expected));
        let csv = to_csv(&table);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("q,snr_db,value,clamped\n"));
    }

    #[test]
    fn bits_units_divide_by_ln2() {
        let mut cfg = config(Scenario::I2);
        let nats = run_scan(&cfg).unwrap().values[0].unwrap();
        cfg.units = Units::Bits;
        let bits = run_scan(&cfg).unwrap().values[0].unwrap();
        assert!((bits * std::f64::consts::LN_2 - nats).abs() < 1e-14);
    }

    #[test]
    fn wiretap_equal_rates_row_is_zero() {
        let mut cfg = config(Scenario::WiretapControlled);
        cfg.q_grid = vec![0.3, 0.6];
        cfg.q2 = Some(0.3);
        let table = run_scan(&cfg).unwrap();
        assert_eq!(table.values[0], Some(0.0));
        assert!(table.values[1].unwrap() > 0.0);
    }

    #[test]
    fn failed_cells_become_missing_not_fatal() {
        let mut cfg = config(Scenario::WiretapControlled);
        // q1 = 0.1 < q2 = 0.3 is invalid at that cell only
        cfg.q_grid = vec![0.1, 0.6];
        cfg.q2 = Some(0.3);
        let table = run_scan(&cfg).unwrap();
        assert_eq!(table.values[0], None);
        assert!(table.values[1].is_some());
        assert_eq!(table.diagnostics.len(), 1);
        let csv = to_csv(&table);
        assert!(csv.contains("0.1,10,,false\n"));
    }

    #[test]
    fn csv_values_have_twelve_significant_digits() {
        assert_eq!(fmt_value(0.5), "5.00000000000e-1");
        assert_eq!(fmt_value(123.456), "1.23456000000e2");
    }
}
