use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use mixbeam::element::Integration;
use mixbeam::solver::Solver;
use mixbeam_bench::benchmarks::{run, BenchError, Benchmark};
use mixbeam_bench::problem::{ProblemDoc, RunResult};
use mixbeam_bench::report::{config_hash, BenchmarkReport, Format};
use mixbeam_bench::sweep::{fit_rates, run_sweep, SweepSpec};

const EXIT_MISMATCH: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_INVALID: u8 = 4;

#[derive(Parser)]
#[command(name = "beam", version, about = "Mixed finite elements for geometrically exact beams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegrationArg {
    Full,
    Reduced,
}

impl From<IntegrationArg> for Integration {
    fn from(i: IntegrationArg) -> Self {
        match i {
            IntegrationArg::Full => Integration::Full,
            IntegrationArg::Reduced => Integration::ReducedGamma,
        }
    }
}

#[derive(clap::Args)]
struct Output {
    /// Output directory.
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Zero all timings so that reruns produce identical files.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one benchmark, overriding its defaults.
    Bench {
        #[arg(value_enum)]
        name: Benchmark,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        nelem: Option<usize>,
        /// Slenderness ratio.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, value_enum)]
        integration: Option<IntegrationArg>,
        /// Load increments per phase.
        #[arg(long)]
        increments: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a grid of benchmarks described by a TOML file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Solve a problem described by a TOML file.
    Run {
        #[arg(long)]
        problem: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// List the benchmarks with their defaults.
    List,
}

/// Failure with the exit code it maps to.
struct Fail(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(1, e.into())
    }
}

fn invalid(e: impl Into<anyhow::Error>) -> Fail {
    Fail(EXIT_INVALID, e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Fail> {
    match cmd {
        Command::List => {
            for b in Benchmark::ALL {
                let d = b.defaults();
                let rho = d.rho.map_or("-".to_string(), |r| r.to_string());
                println!(
                    "{:<12} k={} nelem={} rho={} increments={}\n    {}",
                    b.name(),
                    d.k,
                    d.nelem,
                    rho,
                    d.increments,
                    b.description()
                );
            }
            Ok(())
        }
        Command::Bench { name, k, nelem, rho, integration, increments, output } => {
            let mut p = name.defaults();
            if let Some(k) = k {
                p.k = k;
            }
            if let Some(n) = nelem {
                p.nelem = n;
            }
            if let Some(r) = rho {
                if !name.uses_rho() {
                    return Err(invalid(anyhow::anyhow!("{name} has no slenderness parameter")));
                }
                p.rho = Some(r);
            }
            if let Some(i) = integration {
                p.integration = i.into();
            }
            if let Some(i) = increments {
                p.increments = i;
            }
            let case = match run(name, &p, true) {
                Ok(c) => c,
                Err(e @ BenchError::Solve(_)) => return Err(Fail(EXIT_NONCONVERGENCE, e.into())),
                Err(e) => return Err(invalid(e)),
            };
            let input = serde_json::json!({ "benchmark": name, "params": p });
            let rates = fit_rates(std::slice::from_ref(&case));
            let report = BenchmarkReport::new(&input, vec![case], rates, Vec::new());
            finish(report, &output, name.name())
        }
        Command::Sweep { spec, output } => {
            let text = read(&spec)?;
            let stem = spec.file_stem().map_or("sweep".into(), |s| s.to_string_lossy().into_owned());
            let spec = SweepSpec::from_toml(&text).map_err(invalid)?;
            let report = run_sweep(&spec);
            for f in &report.failures {
                eprintln!("{} k={} nelem={}: {}", f.benchmark, f.params.k, f.params.nelem, f.error);
            }
            let nonconv = report.failures.iter().any(|f| f.nonconvergence);
            let bad_input = report.failures.iter().any(|f| !f.nonconvergence);
            let res = finish(report, &output, &stem);
            if bad_input {
                return Err(invalid(anyhow::anyhow!("some grid points have invalid parameters")));
            }
            if nonconv {
                return Err(Fail(EXIT_NONCONVERGENCE, anyhow::anyhow!("some grid points did not converge")));
            }
            res
        }
        Command::Run { problem, output } => {
            let text = read(&problem)?;
            let doc = ProblemDoc::from_toml(&text).map_err(invalid)?;
            let prob = doc.problem().map_err(invalid)?;
            let solver = Solver::new(&prob, doc.solver).map_err(invalid)?;
            let report = solver.continuation().map_err(|e| Fail(EXIT_NONCONVERGENCE, e.into()))?;
            let mut result = RunResult::new(&solver, &report);
            if output.reproducible {
                result.wall_ms = 0.0;
            }
            fs::create_dir_all(&output.out)?;
            let hash = config_hash(&serde_json::to_value(&doc)?);
            let doc_json = serde_json::json!({
                "schema_version": mixbeam_bench::report::SCHEMA_VERSION,
                "version": env!("CARGO_PKG_VERSION"),
                "config_hash": hash,
                "input": doc,
                "result": result,
            });
            let path = match output.format {
                Format::Json => {
                    let p = output.out.join("run.json");
                    fs::write(&p, serde_json::to_string_pretty(&doc_json)? + "\n")?;
                    p
                }
                Format::Csv => {
                    let p = output.out.join("run_nodes.csv");
                    let mut w = csv::Writer::from_path(&p)?;
                    w.write_record(["node", "x0", "y0", "z0", "x", "y", "z", "psi1", "psi2", "psi3"])?;
                    for n in &result.nodes {
                        let mut rec = vec![n.id.to_string()];
                        rec.extend(n.r0.0.iter().chain(&n.r.0).chain(&n.psi.0).map(|v| v.to_string()));
                        w.write_record(&rec)?;
                    }
                    w.flush()?;
                    p
                }
            };
            println!(
                "{} nodes, {} elements, {} dofs; {} steps, {} Newton iterations -> {}",
                result.n_nodes,
                result.n_elements,
                result.n_dofs,
                result.steps.len(),
                result.newton_total_iters,
                path.display()
            );
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(invalid)
}

fn finish(mut report: BenchmarkReport, output: &Output, stem: &str) -> Result<(), Fail> {
    if output.reproducible {
        report.make_reproducible();
    }
    for c in &report.cases {
        let rho = c.params.rho.map_or(String::new(), |r| format!(" rho={r}"));
        let e = c.e_l2.map_or(String::new(), |e| format!(" e_l2={e:.4e}"));
        println!(
            "{} k={} nelem={}{}{} u=({:.7e}, {:.7e}, {:.7e}) iters={}",
            c.benchmark, c.params.k, c.params.nelem, rho, e, c.tip[0], c.tip[1], c.tip[2], c.newton_total_iters
        );
        for k in &c.checks {
            println!("  [{}] {} (max deviation {:.3e})", if k.pass { "ok" } else { "MISMATCH" }, k.name, k.max_deviation());
        }
    }
    for r in &report.rates {
        if let Some(rate) = r.rate {
            let rho = r.rho.map_or(String::new(), |v| format!(" rho={v}"));
            let int = mixbeam_bench::report::integration_name(r.integration);
            println!("rate {} k={}{rho} {int}: {rate:.3}", r.benchmark, r.k);
        }
    }
    let paths = report.write(&output.out, stem, output.format)?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    if report.mismatches().next().is_some() {
        return Err(Fail(EXIT_MISMATCH, anyhow::anyhow!("results differ from the reference values")));
    }
    Ok(())
}
