//! Parameter grids over the benchmarks and fitted convergence rates.

use std::collections::BTreeMap;

use mixbeam::element::Integration;
use mixbeam::solver::convergence_rate_above;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{run, BenchError, BenchParams, Benchmark, CaseResult};
use crate::report::{BenchmarkReport, Failure, RateFit};

/// Errors below this are treated as round-off when fitting rates.
pub const RATE_FLOOR: f64 = 1e-12;

/// One block of the grid: the Cartesian product of the listed values.
/// Empty lists fall back to the benchmark's default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub benchmark: Benchmark,
    #[serde(default)]
    pub k: Vec<usize>,
    #[serde(default)]
    pub nelem: Vec<usize>,
    #[serde(default)]
    pub rho: Vec<f64>,
    #[serde(default)]
    pub integration: Vec<Integration>,
    pub increments: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub centerline: bool,
    pub grid: Vec<Grid>,
}

impl Grid {
    pub fn expand(&self) -> Vec<BenchParams> {
        let d = self.benchmark.defaults();
        let or = |v: &Vec<usize>, x: usize| if v.is_empty() { vec![x] } else { v.clone() };
        let ks = or(&self.k, d.k);
        let ns = or(&self.nelem, d.nelem);
        let rhos: Vec<Option<f64>> =
            if self.rho.is_empty() { vec![d.rho] } else { self.rho.iter().map(|&r| Some(r)).collect() };
        let ints = if self.integration.is_empty() { vec![d.integration] } else { self.integration.clone() };
        let mut out = Vec::new();
        for &integration in &ints {
            for &rho in &rhos {
                for &k in &ks {
                    for &nelem in &ns {
                        out.push(BenchParams {
                            k,
                            nelem,
                            rho,
                            integration,
                            increments: self.increments.unwrap_or(d.increments),
                        });
                    }
                }
            }
        }
        out
    }
}

impl SweepSpec {
    pub fn from_toml(s: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(s)
    }

    pub fn runs(&self) -> Vec<(Benchmark, BenchParams)> {
        self.grid.iter().flat_map(|g| g.expand().into_iter().map(move |p| (g.benchmark, p))).collect()
    }
}

/// Runs every grid point (in parallel, results in grid order) and fits
/// `log e_l2` against `log h` for every series that differs only in `nelem`.
pub fn run_sweep(spec: &SweepSpec) -> BenchmarkReport {
    let runs = spec.runs();
    let results: Vec<Result<CaseResult, BenchError>> =
        runs.par_iter().map(|(b, p)| run(*b, p, spec.centerline)).collect();
    let mut cases = Vec::new();
    let mut failures = Vec::new();
    for ((b, p), r) in runs.iter().zip(results) {
        match r {
            Ok(c) => cases.push(c),
            Err(e) => failures.push(Failure {
                benchmark: *b,
                params: *p,
                nonconvergence: matches!(e, BenchError::Solve(_)),
                error: e.to_string(),
            }),
        }
    }
    let rates = fit_rates(&cases);
    BenchmarkReport::new(spec, cases, rates, failures)
}

/// Groups cases with an L² error by everything but `nelem`.
pub fn fit_rates(cases: &[CaseResult]) -> Vec<RateFit> {
    type Key = (Benchmark, usize, Option<u64>, u8);
    let mut groups: BTreeMap<Key, Vec<&CaseResult>> = BTreeMap::new();
    for c in cases.iter().filter(|c| c.e_l2.is_some()) {
        let p = &c.params;
        let key = (c.benchmark, p.k, p.rho.map(f64::to_bits), p.integration as u8);
        groups.entry(key).or_default().push(c);
    }
    groups
        .into_values()
        .filter(|g| g.len() >= 2)
        .map(|mut g| {
            g.sort_by_key(|c| c.params.nelem);
            let nelem: Vec<usize> = g.iter().map(|c| c.params.nelem).collect();
            let e: Vec<f64> = g.iter().map(|c| c.e_l2.unwrap()).collect();
            let h: Vec<f64> = nelem.iter().map(|&n| 1.0 / n as f64).collect();
            let p = g[0].params;
            RateFit {
                benchmark: g[0].benchmark,
                k: p.k,
                rho: p.rho,
                integration: p.integration,
                rate: convergence_rate_above(&h, &e, RATE_FLOOR),
                nelem,
                e_l2: e,
            }
        })
        .collect()
}
