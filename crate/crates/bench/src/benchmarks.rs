//! The benchmark problems: geometry, stiffness, loading and measurements.

use std::f64::consts::PI;
use std::fmt;

use mixbeam::constitutive::CrossSection;
use mixbeam::element::{eval_centerline, Integration};
use mixbeam::model::{
    build_arc, build_fork, build_polyline, build_straight, BoundaryCondition, HelixCurve, LoadCase,
    LoadPhase, Mesh, MomentFrame, Problem,
};
use mixbeam::solver::{
    error_l2_position, moment_energy, ContinuationError, SolveReport, Solver, SolverConfig,
};
use mixbeam::{BeamError, Vec3};
use serde::{Deserialize, Serialize};

use crate::oracles;

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Rollup,
    Objectivity,
    Arc45,
    Helix,
    Helical,
    Slope,
    Fork,
}

impl Benchmark {
    pub const ALL: [Benchmark; 7] = [
        Self::Rollup,
        Self::Objectivity,
        Self::Arc45,
        Self::Helix,
        Self::Helical,
        Self::Slope,
        Self::Fork,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rollup => "rollup",
            Self::Objectivity => "objectivity",
            Self::Arc45 => "arc45",
            Self::Helix => "helix",
            Self::Helical => "helical",
            Self::Slope => "slope",
            Self::Fork => "fork",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn defaults(self) -> BenchParams {
        let (k, nelem, rho, increments) = match self {
            Self::Rollup => (2, 16, Some(1000.0), 8),
            Self::Objectivity => (3, 4, Some(10.0), 71),
            Self::Arc45 => (4, 32, Some(100.0), 10),
            Self::Helix => (1, 5, Some(10.0), 10),
            Self::Helical => (3, 30, None, 200),
            Self::Slope => (4, 24, None, 20),
            Self::Fork => (4, 30, None, 10),
        };
        BenchParams { k, nelem, rho, integration: Integration::ReducedGamma, increments }
    }

    /// Whether `rho` is a parameter of the benchmark.
    pub fn uses_rho(self) -> bool {
        self.defaults().rho.is_some()
    }

    /// Constants of the benchmark, for `beam list`.
    pub fn description(self) -> &'static str {
        match self {
            Self::Rollup => {
                "cantilever L=1, square section a=L/ρ: EA=a², GA₂=GA₃=EA/2, GIt=EI₂=EI₃=a⁴/12; \
                 tip moment 4πEI₃/L e₃ (double circle), 8 increments; error against the exact circle"
            }
            Self::Objectivity => {
                "cantilever L=1, ρ=10 (roll-up section); follower tip moment −πEI₂/(2L) e₂ in 4 \
                 increments, then ten full turns about e₃ prescribed at the clamp in 71 increments"
            }
            Self::Arc45 => {
                "45° arc R=100 in the x₁x₂-plane, a=R/ρ: EA=1e7a², GA=EA/2, GIt=EI=1e7a⁴/12; \
                 tip force 600(100/ρ)⁴ e₃, 10 increments"
            }
            Self::Helix => {
                "straight beam of helix length, R₀=10, h₀=50, 2 coils; circular section r=L/(2ρ), \
                 E=1, G=1/2; clamp rotation −atan(c) e₂ and follower tip moment \
                 (GIt c g₁ + EI₃ g₃)/(R₀(1+c²)), 10 increments"
            }
            Self::Helical => {
                "cantilever L=10, EA=GA=1e4, EI=GIt=1e2; spatial tip moment 20πEI/L e₃ and tip \
                 force 50 e₃, 200 increments"
            }
            Self::Slope => {
                "unit segments (0,0,0)→(1,0,0)→(1,1,0)→(1,1,1), EA=2GA=1e4, GIt=EI=100/12; \
                 tip force −10(e₁+e₃), 20 increments"
            }
            Self::Fork => {
                "shaft L=1 branching into a semicircle R=1, EA=GA=1e4, GIt=EI=1e2; F=200 e₃ at \
                 (2,1,0) in 10 increments, then −F e₃ at (2,−1,0) in 10 more"
            }
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one benchmark run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchParams {
    pub k: usize,
    /// Total element count. Slope and fork need a multiple of three.
    pub nelem: usize,
    pub rho: Option<f64>,
    pub integration: Integration,
    /// Increments per load phase.
    pub increments: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] BeamError),
    #[error(transparent)]
    Solve(#[from] ContinuationError),
}

/// Comparison with a tabulated value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: Vec<f64>,
    pub actual: Vec<f64>,
    /// Allowed deviation per component.
    pub tolerance: Vec<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: &[f64], actual: &[f64], tolerance: &[f64]) -> Self {
        let pass = expected
            .iter()
            .zip(actual)
            .zip(tolerance)
            .all(|((e, a), t)| (e - a).abs() <= *t);
        Self {
            name: name.into(),
            expected: expected.to_vec(),
            actual: actual.to_vec(),
            tolerance: tolerance.to_vec(),
            pass,
        }
    }

    /// Tolerance `rel·|expected|` per component.
    pub fn relative(name: impl Into<String>, expected: &[f64], actual: &[f64], rel: f64) -> Self {
        let tol: Vec<f64> = expected.iter().map(|e| rel * e.abs()).collect();
        Self::new(name, expected, actual, &tol)
    }

    pub fn absolute(name: impl Into<String>, expected: &[f64], actual: &[f64], tol: f64) -> Self {
        Self::new(name, expected, actual, &vec![tol; expected.len()])
    }

    pub fn max_deviation(&self) -> f64 {
        self.expected.iter().zip(&self.actual).map(|(e, a)| (e - a).abs()).fold(0.0, f64::max)
    }
}

/// Result of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub benchmark: Benchmark,
    pub params: BenchParams,
    /// Normalized L² position error, where a closed-form reference exists.
    pub e_l2: Option<f64>,
    /// Tip displacement (tip position for `helical`, `u/L` for slope and
    /// fork, the upper tine for the fork).
    pub tip: [f64; 3],
    /// Further named measurements.
    pub extra: Vec<(String, f64)>,
    pub newton_total_iters: usize,
    pub wall_ms: f64,
    pub checks: Vec<Check>,
    /// `[s, x, y, z]` at 20 points per element.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub centerline: Vec<[f64; 4]>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extra.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Square section of side `a` with the given Young's modulus and `G = E/2`.
pub fn square_section(e: f64, a: f64) -> CrossSection {
    let ea = e * a * a;
    let ei = e * a.powi(4) / 12.0;
    CrossSection::new(ea, ea / 2.0, ea / 2.0, ei, ei, ei).expect("positive stiffness")
}

fn clamp(node: usize, at: Vec3) -> Vec<BoundaryCondition> {
    vec![
        BoundaryCondition::ClampPosition { node, value: at },
        BoundaryCondition::ClampRotation { node },
    ]
}

fn one_phase(increments: usize, conditions: Vec<BoundaryCondition>) -> Vec<LoadPhase> {
    vec![LoadPhase { increments, conditions }]
}

fn check_params(b: Benchmark, p: &BenchParams) -> Result<(), BenchError> {
    let bad = |m: String| Err(BenchError::Invalid(m));
    if !(1..=8).contains(&p.k) {
        return bad(format!("order k = {} outside 1..=8", p.k));
    }
    if p.nelem == 0 || p.increments == 0 {
        return bad("nelem and increments must be positive".into());
    }
    if matches!(b, Benchmark::Slope | Benchmark::Fork) && p.nelem % 3 != 0 {
        return bad(format!("{b} needs a multiple of three elements"));
    }
    match (b.uses_rho(), p.rho) {
        (true, Some(r)) if !(r.is_finite() && r > 0.0) => bad(format!("slenderness {r} must be positive")),
        (true, None) => bad(format!("{b} needs a slenderness")),
        _ => Ok(()),
    }
}

/// Problem definition of a benchmark together with the nodes of interest.
pub struct Setup {
    pub problem: Problem,
    /// Node whose displacement is reported.
    pub tip: usize,
}

pub fn rollup_section(rho: f64) -> CrossSection {
    square_section(1.0, 1.0 / rho)
}

pub fn rollup(p: &BenchParams) -> Result<Setup, BenchError> {
    let cs = rollup_section(p.rho.unwrap_or(1000.0));
    let mesh = build_straight(1.0, p.nelem, p.k, cs)?;
    let tip = mesh.nodes.len() - 1;
    let m = Vec3::unit(2) * (4.0 * PI * cs.ei3);
    let phases = one_phase(
        p.increments,
        vec![BoundaryCondition::PointMoment { node: tip, moment: m, frame: MomentFrame::Spatial }],
    );
    let load_case = LoadCase { supports: clamp(0, Vec3::zeros()), phases };
    Ok(Setup { problem: Problem { mesh, load_case }, tip })
}

/// The double circle `r(s)` of the roll-up.
pub fn rollup_reference(s: f64) -> Vec3 {
    let kap = 4.0 * PI;
    let h = (0.5 * kap * s).sin();
    Vec3::new((kap * s).sin() / kap, 2.0 * h * h / kap, 0.0)
}

/// Quarter-circle moment, then `turns` full rotations of the clamp.
pub fn objectivity(p: &BenchParams, turns: f64) -> Result<Setup, BenchError> {
    let cs = rollup_section(p.rho.unwrap_or(10.0));
    let mesh = build_straight(1.0, p.nelem, p.k, cs)?;
    let tip = mesh.nodes.len() - 1;
    let m = Vec3::unit(1) * (-PI * cs.ei2 / 2.0);
    let phases = vec![
        LoadPhase {
            increments: 4,
            conditions: vec![
                BoundaryCondition::PrescribeRotation { node: 0, rotation: Vec3::zeros() },
                BoundaryCondition::PointMoment { node: tip, moment: m, frame: MomentFrame::Material },
            ],
        },
        LoadPhase {
            increments: p.increments,
            conditions: vec![BoundaryCondition::PrescribeRotation {
                node: 0,
                rotation: Vec3::unit(2) * (2.0 * PI * turns),
            }],
        },
    ];
    let load_case = LoadCase {
        supports: vec![BoundaryCondition::ClampPosition { node: 0, value: Vec3::zeros() }],
        phases,
    };
    Ok(Setup { problem: Problem { mesh, load_case }, tip })
}

pub const ARC_RADIUS: f64 = 100.0;

pub fn arc45(p: &BenchParams) -> Result<Setup, BenchError> {
    let rho = p.rho.unwrap_or(100.0);
    let cs = square_section(1e7, ARC_RADIUS / rho);
    let mesh = build_arc(ARC_RADIUS, PI / 4.0, p.nelem, p.k, cs)?;
    let tip = mesh.nodes.len() - 1;
    let f = Vec3::unit(2) * (600.0 * (100.0 / rho).powi(4));
    let phases = one_phase(p.increments, vec![BoundaryCondition::PointForce { node: tip, force: f }]);
    let load_case = LoadCase { supports: clamp(0, Vec3::zeros()), phases };
    Ok(Setup { problem: Problem { mesh, load_case }, tip })
}

pub const HELIX: HelixCurve = HelixCurve { r0: 10.0, h0: 50.0, n_coils: 2.0 };

pub fn helix_section(rho: f64) -> CrossSection {
    let r = HELIX.length() / (2.0 * rho);
    CrossSection::circular(1.0, 0.5, r).expect("positive stiffness")
}

/// Straight beam that the tip moment bends into [`HELIX`].
pub fn helix(p: &BenchParams) -> Result<Setup, BenchError> {
    let cs = helix_section(p.rho.unwrap_or(10.0));
    let start = HELIX.position(0.0);
    let len = HELIX.length();
    let mesh = build_polyline(&[start, start + Vec3::unit(0) * len], p.nelem, p.k, cs)?;
    let tip = mesh.nodes.len() - 1;
    let c = HELIX.slope();
    let m = Vec3::new(cs.git * c, 0.0, cs.ei3) * (1.0 / (HELIX.r0 * (1.0 + c * c)));
    let phases = one_phase(
        p.increments,
        vec![
            BoundaryCondition::PrescribeRotation { node: 0, rotation: HELIX.initial_rotation() },
            BoundaryCondition::PointMoment { node: tip, moment: m, frame: MomentFrame::Material },
        ],
    );
    let load_case = LoadCase {
        supports: vec![BoundaryCondition::ClampPosition { node: 0, value: start }],
        phases,
    };
    Ok(Setup { problem: Problem { mesh, load_case }, tip })
}

pub fn helical(p: &BenchParams) -> Result<Setup, BenchError> {
    let len = 10.0;
    let cs = CrossSection::new(1e4, 1e4, 1e4, 1e2, 1e2, 1e2).map_err(BeamError::from)?;
    let mesh = build_straight(len, p.nelem, p.k, cs)?;
    let tip = mesh.nodes.len() - 1;
    let m = Vec3::unit(2) * (20.0 * PI * cs.ei2 / len);
    let phases = one_phase(
        p.increments,
        vec![
            BoundaryCondition::PointMoment { node: tip, moment: m, frame: MomentFrame::Spatial },
            BoundaryCondition::PointForce { node: tip, force: Vec3::unit(2) * 50.0 },
        ],
    );
    let load_case = LoadCase { supports: clamp(0, Vec3::zeros()), phases };
    Ok(Setup { problem: Problem { mesh, load_case }, tip })
}

pub fn slope_points() -> [Vec3; 4] {
    [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 1.0)]
}

pub fn slope(p: &BenchParams) -> Result<Setup, BenchError> {
    let ei = 100.0 / 12.0;
    let cs = CrossSection::new(1e4, 5e3, 5e3, ei, ei, ei).map_err(BeamError::from)?;
    let mesh = build_polyline(&slope_points(), p.nelem / 3, p.k, cs)?;
    let tip = mesh.nodes.len() - 1;
    let f = Vec3::new(-10.0, 0.0, -10.0);
    let phases = one_phase(p.increments, vec![BoundaryCondition::PointForce { node: tip, force: f }]);
    let load_case = LoadCase { supports: clamp(0, Vec3::zeros()), phases };
    Ok(Setup { problem: Problem { mesh, load_case }, tip })
}

/// Fork nodes: `[P₁, P₂, P_B]`.
pub struct ForkSetup {
    pub setup: Setup,
    pub points: [usize; 3],
}

/// Fork with the force at `P₁` applied first, or at `P₂` first if `swapped`.
pub fn fork(p: &BenchParams, swapped: bool) -> Result<ForkSetup, BenchError> {
    let cs = CrossSection::new(1e4, 1e4, 1e4, 1e2, 1e2, 1e2).map_err(BeamError::from)?;
    let per = p.nelem / 3;
    let (mesh, pts) = build_fork(1.0, 1.0, per, per, p.k, cs)?;
    let f = Vec3::unit(2) * 200.0;
    let mut phases = vec![
        LoadPhase {
            increments: p.increments,
            conditions: vec![BoundaryCondition::PointForce { node: pts.tip_upper, force: f }],
        },
        LoadPhase {
            increments: p.increments,
            conditions: vec![BoundaryCondition::PointForce { node: pts.tip_lower, force: -f }],
        },
    ];
    if swapped {
        phases.reverse();
    }
    let load_case = LoadCase { supports: clamp(pts.root, Vec3::zeros()), phases };
    Ok(ForkSetup {
        setup: Setup { problem: Problem { mesh, load_case }, tip: pts.tip_upper },
        points: [pts.tip_upper, pts.tip_lower, pts.branch],
    })
}

/// Solver settings used by every benchmark.
pub fn solver_config(p: &BenchParams) -> SolverConfig {
    SolverConfig { integration: p.integration, ..SolverConfig::default() }
}

fn solve(problem: &Problem, cfg: SolverConfig) -> Result<(Solver<'_>, SolveReport), BenchError> {
    let solver = Solver::new(problem, cfg)?;
    let report = solver.continuation()?;
    Ok((solver, report))
}

fn displacement(solver: &Solver, x: &[f64], node: usize) -> Vec3 {
    solver.layout.node_position(x, node) - solver.mesh().nodes[node].r0
}

/// Centerline samples `[s, x, y, z]`, 20 per element.
pub fn sample_centerline(mesh: &Mesh, solver: &Solver, x: &[f64]) -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(20 * mesh.elements.len());
    for (e, def) in mesh.elements.iter().enumerate() {
        let dofs = solver.layout.gather(mesh, e, x);
        for i in 0..20 {
            let xi = -1.0 + 2.0 * i as f64 / 19.0;
            let r = eval_centerline(&dofs.r, xi).0;
            let s = def.span[0] + (xi + 1.0) * def.jacobian();
            out.push([s, r[0], r[1], r[2]]);
        }
    }
    out
}

/// Half a unit in the last of four significant digits.
fn half_ulp4(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    0.5 * 10f64.powi(v.abs().log10().floor() as i32 - 3)
}

/// Runs a benchmark and compares with the tables where the parameters
/// match a tabulated discretization.
pub fn run(b: Benchmark, p: &BenchParams, centerline: bool) -> Result<CaseResult, BenchError> {
    check_params(b, p)?;
    let cfg = solver_config(p);
    let mut res = CaseResult {
        benchmark: b,
        params: *p,
        e_l2: None,
        tip: [0.0; 3],
        extra: Vec::new(),
        newton_total_iters: 0,
        wall_ms: 0.0,
        checks: Vec::new(),
        centerline: Vec::new(),
    };
    let finish = |res: &mut CaseResult, solver: &Solver, report: &SolveReport| {
        res.newton_total_iters = report.total_iterations();
        res.wall_ms = report.wall_ms;
        if centerline {
            res.centerline = sample_centerline(solver.mesh(), solver, &report.state);
        }
    };
    match b {
        Benchmark::Rollup => {
            let s = rollup(p)?;
            let (solver, report) = solve(&s.problem, cfg)?;
            let x = &report.state;
            res.tip = displacement(&solver, x, s.tip).0;
            res.e_l2 = Some(error_l2_position(solver.mesh(), &solver.layout, x, rollup_reference, 1.0));
            finish(&mut res, &solver, &report);
        }
        Benchmark::Objectivity => {
            let s = objectivity(p, 10.0)?;
            let cfg = SolverConfig { keep_snapshots: true, ..cfg };
            let (solver, report) = solve(&s.problem, cfg)?;
            let bent = report.steps.iter().filter(|st| st.phase == 0).count();
            let measure = |x: &[f64]| {
                let u3 = displacement(&solver, x, s.tip)[2];
                (u3, 2.0 * moment_energy(solver.mesh(), &solver.layout, x))
            };
            let (u0, phi0) = measure(&report.snapshots[bent - 1]);
            let (mut du, mut dphi) = (0.0f64, 0.0f64);
            for x in &report.snapshots[bent..] {
                let (u, phi) = measure(x);
                du = du.max((u - u0).abs());
                dphi = dphi.max((phi - phi0).abs());
            }
            res.tip = displacement(&solver, &report.state, s.tip).0;
            res.extra = vec![
                ("u3_bent".into(), u0),
                ("energy_bent".into(), phi0),
                ("max_du3".into(), du),
                ("max_denergy_rel".into(), dphi / phi0),
            ];
            res.checks.push(Check::absolute("objectivity: max |Δu₃|/L", &[0.0], &[du], 1e-9));
            res.checks.push(Check::absolute("objectivity: max |ΔΦ̄κ|/Φ̄κ", &[0.0], &[dphi / phi0], 1e-9));
            finish(&mut res, &solver, &report);
        }
        Benchmark::Arc45 => {
            let s = arc45(p)?;
            let (solver, report) = solve(&s.problem, cfg)?;
            res.tip = displacement(&solver, &report.state, s.tip).0;
            if let (Some(rho), Integration::ReducedGamma) = (p.rho, p.integration) {
                if let Some(row) = oracles::arc(rho, p.k, p.nelem) {
                    res.checks.push(Check::relative(format!("arc45 ρ={rho} u(L)"), &row, &res.tip, 1e-3));
                }
            }
            finish(&mut res, &solver, &report);
        }
        Benchmark::Helix => {
            let s = helix(p)?;
            let (solver, report) = solve(&s.problem, cfg)?;
            let x = &report.state;
            let mesh = solver.mesh();
            let mut node_err = 0.0f64;
            for (i, n) in mesh.nodes.iter().enumerate() {
                let s0 = n.r0[0] - mesh.nodes[0].r0[0];
                node_err = node_err.max((solver.layout.node_position(x, i) - HELIX.position(s0)).max_abs());
            }
            let tip_err = (solver.layout.node_position(x, s.tip) - HELIX.position(HELIX.length())).max_abs();
            res.tip = displacement(&solver, x, s.tip).0;
            res.e_l2 = Some(error_l2_position(mesh, &solver.layout, x, |s| HELIX.position(s), mesh.total_length()));
            res.extra = vec![("tip_error".into(), tip_err), ("max_node_error".into(), node_err)];
            res.checks.push(Check::absolute("helix: tip node", &[0.0], &[tip_err], 1e-8));
            finish(&mut res, &solver, &report);
        }
        Benchmark::Helical => {
            let s = helical(p)?;
            let (solver, report) = solve(&s.problem, cfg)?;
            res.tip = solver.layout.node_position(&report.state, s.tip).0;
            if p.integration == Integration::ReducedGamma {
                if let Some([r, e]) = oracles::helical(p.k, p.nelem) {
                    let tol: Vec<f64> = (0..3).map(|i| half_ulp4(r[i]) + 2.0 * e[i]).collect();
                    res.checks.push(Check::new("helical r(L)", &r, &res.tip, &tol));
                }
            }
            finish(&mut res, &solver, &report);
        }
        Benchmark::Slope => {
            let s = slope(p)?;
            let (solver, report) = solve(&s.problem, cfg)?;
            res.tip = displacement(&solver, &report.state, s.tip).0;
            if p.integration == Integration::ReducedGamma {
                if let Some(row) = oracles::slope(p.k, p.nelem) {
                    let tol = if p.k == 1 { 1e-3 } else { 1e-4 };
                    res.checks.push(Check::absolute("slope u/L", &row, &res.tip, tol));
                }
            }
            finish(&mut res, &solver, &report);
        }
        Benchmark::Fork => {
            let fs = fork(p, false)?;
            let cfg = SolverConfig { keep_snapshots: true, ..cfg };
            let (solver, report) = solve(&fs.setup.problem, cfg)?;
            let first = &report.snapshots[p.increments - 1];
            let u1 = displacement(&solver, first, fs.points[0]);
            let u2 = displacement(&solver, &report.state, fs.points[0]);
            let pb = displacement(&solver, &report.state, fs.points[2]);
            res.tip = u2.0;
            res.extra = vec![
                ("u1_config1".into(), u1[0]),
                ("u2_config1".into(), u1[1]),
                ("u3_config1".into(), u1[2]),
                ("branch_u1".into(), pb[0]),
                ("branch_u2".into(), pb[1]),
                ("branch_u3".into(), pb[2]),
            ];
            if p.integration == Integration::ReducedGamma {
                if let Some([c1, c2]) = oracles::fork(p.k, p.nelem) {
                    res.checks.push(Check::absolute("fork u(P₁) config (1)", &c1, &u1.0, 1e-4));
                    res.checks.push(Check::absolute("fork u(P₁) config (2)", &c2, &u2.0, 1e-4));
                }
            }
            finish(&mut res, &solver, &report);
        }
    }
    Ok(res)
}

/// Final displacements of `[P₁, P₂, P_B]` with the given load order.
pub fn fork_final(p: &BenchParams, swapped: bool) -> Result<[Vec3; 3], BenchError> {
    let fs = fork(p, swapped)?;
    let (solver, report) = solve(&fs.setup.problem, solver_config(p))?;
    Ok(fs.points.map(|n| displacement(&solver, &report.state, n)))
}
