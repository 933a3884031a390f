//! Benchmark reports and their CSV/JSON files.

use std::fs;
use std::path::{Path, PathBuf};

use mixbeam::element::Integration;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::benchmarks::{BenchParams, Benchmark, CaseResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fitted convergence rate of one series of runs that differ only in `nelem`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub benchmark: Benchmark,
    pub k: usize,
    pub rho: Option<f64>,
    pub integration: Integration,
    pub nelem: Vec<usize>,
    pub e_l2: Vec<f64>,
    pub rate: Option<f64>,
}

/// A run that did not produce a result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub benchmark: Benchmark,
    pub params: BenchParams,
    pub error: String,
    /// True when the solver gave up, false for rejected input.
    pub nonconvergence: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema_version: u32,
    pub version: String,
    /// SHA-256 of the canonical JSON of `input`.
    pub config_hash: String,
    pub input: serde_json::Value,
    pub cases: Vec<CaseResult>,
    #[serde(default)]
    pub rates: Vec<RateFit>,
    #[serde(default)]
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// Hex SHA-256 of the JSON of `value` with object keys sorted.
pub fn config_hash(value: &serde_json::Value) -> String {
    // serde_json's default map is ordered by key, so this is canonical
    let bytes = serde_json::to_vec(value).expect("JSON values always serialize");
    format!("{:x}", Sha256::digest(&bytes))
}

impl BenchmarkReport {
    pub fn new(input: &impl Serialize, cases: Vec<CaseResult>, rates: Vec<RateFit>, failures: Vec<Failure>) -> Self {
        let input = serde_json::to_value(input).expect("inputs serialize to JSON");
        let passed = failures.is_empty() && cases.iter().all(CaseResult::passed);
        Self {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(&input),
            input,
            cases,
            rates,
            failures,
            passed,
        }
    }

    /// Drops timings so that reruns give byte-identical files.
    pub fn make_reproducible(&mut self) {
        for c in &mut self.cases {
            c.wall_ms = 0.0;
        }
    }

    pub fn mismatches(&self) -> impl Iterator<Item = (&CaseResult, &crate::benchmarks::Check)> {
        self.cases.iter().flat_map(|c| c.checks.iter().filter(|k| !k.pass).map(move |k| (c, k)))
    }

    fn rate_of(&self, c: &CaseResult) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| {
                r.benchmark == c.benchmark
                    && r.k == c.params.k
                    && r.rho == c.params.rho
                    && r.integration == c.params.integration
                    && r.nelem.contains(&c.params.nelem)
            })
            .and_then(|r| r.rate)
    }

    pub fn write_csv(&self, path: &Path) -> csv::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for c in &self.cases {
            w.serialize(CsvRow {
                benchmark: c.benchmark.name(),
                k: c.params.k,
                nelem: c.params.nelem,
                rho: c.params.rho,
                integration: integration_name(c.params.integration),
                e_l2: c.e_l2,
                rate: self.rate_of(c),
                u1: c.tip[0],
                u2: c.tip[1],
                u3: c.tip[2],
                newton_total_iters: c.newton_total_iters,
                wall_ms: c.wall_ms,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_centerline_csv(&self, path: &Path) -> csv::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["benchmark", "k", "nelem", "s", "x", "y", "z"])?;
        for c in &self.cases {
            for p in &c.centerline {
                w.write_record([
                    c.benchmark.name().to_string(),
                    c.params.k.to_string(),
                    c.params.nelem.to_string(),
                    p[0].to_string(),
                    p[1].to_string(),
                    p[2].to_string(),
                    p[3].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        fs::write(path, s)
    }

    /// Writes `<stem>.csv` or `<stem>.json` into `dir`, plus
    /// `<stem>_centerline.csv` when centerlines were sampled.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> anyhow::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let main = match format {
            Format::Csv => {
                let p = dir.join(format!("{stem}.csv"));
                self.write_csv(&p)?;
                p
            }
            Format::Json => {
                let p = dir.join(format!("{stem}.json"));
                self.write_json(&p)?;
                p
            }
        };
        out.push(main);
        if self.cases.iter().any(|c| !c.centerline.is_empty()) {
            let p = dir.join(format!("{stem}_centerline.csv"));
            self.write_centerline_csv(&p)?;
            out.push(p);
        }
        Ok(out)
    }
}

pub fn integration_name(i: Integration) -> &'static str {
    match i {
        Integration::Full => "full",
        Integration::ReducedGamma => "reduced",
    }
}

#[derive(Serialize)]
struct CsvRow {
    benchmark: &'static str,
    k: usize,
    nelem: usize,
    rho: Option<f64>,
    integration: &'static str,
    e_l2: Option<f64>,
    rate: Option<f64>,
    u1: f64,
    u2: f64,
    u3: f64,
    newton_total_iters: usize,
    wall_ms: f64,
}
