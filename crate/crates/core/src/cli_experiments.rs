//! Command-line experiments: tree dumps, scheme derivation, single runs,
//! convergence studies and per-tree local-error studies.
//!
//! Every CSV starts with a `# config_sha256=…` line hashing the validated
//! configuration, so identical configurations give identical files apart
//! from the wall-time column.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::integrators::{reference_solve, EngineSpec, SchemeId, Stepper, StepperConfig};
use crate::scheme_engine::{
    build_scheme, enumerate_trees, pi_exact, pi_term, EquationKind, EquationSpec, Evaluator, RegularityDomain,
};
use crate::spectral_backend::{rough_data, smooth_data, Basis, Field, Grid, Parity};
use crate::tree_core::{deg, n_plus, DecoratedTree, PlusLabel};

/// Process exit code for an error: 2 for rejected input, 3 for an oracle
/// that could not certify itself, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Validation(_) | Error::Spec(_) | Error::Unsupported(_) => 2,
        Error::Oracle(_) | Error::Quadrature { .. } => 3,
        Error::Io(_) | Error::Json(_) => 1,
    }
}

#[derive(Parser, Debug)]
#[command(name = "lowreg", version, about = "Low-regularity exponential integrators from decorated trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the trees of an order-p scheme (JSON + DOT).
    Trees(ExperimentArgs),
    /// Derive a scheme and write it serialized and pretty-printed.
    Derive(ExperimentArgs),
    /// Integrate to --t-end with the first step of --tau-list and write a snapshot.
    Run(ExperimentArgs),
    /// Global error against a Richardson-certified reference over --tau-list.
    Converge(ExperimentArgs),
    /// Per-tree local error against the quadrature oracle over --tau-list.
    TreeOrder(ExperimentArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Trees(_) => "trees",
            Command::Derive(_) => "derive",
            Command::Run(_) => "run",
            Command::Converge(_) => "converge",
            Command::TreeOrder(_) => "tree-order",
        }
    }

    fn args(&self) -> &ExperimentArgs {
        match self {
            Command::Trees(a) | Command::Derive(a) | Command::Run(a) | Command::Converge(a) | Command::TreeOrder(a) => a,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentArgs {
    /// Equation: gp, nls or sg.
    #[arg(long, default_value = "gp")]
    pub eq: String,
    /// Scheme order p (local error O(τ^{p+1})).
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    /// Sobolev regularity s of the data, steering branch selection.
    #[arg(long, default_value_t = 1.0)]
    pub sobolev: f64,
    /// Spatial basis: periodic or dirichlet.
    #[arg(long, default_value = "periodic")]
    pub basis: String,
    /// Number of Fourier modes N.
    #[arg(long, default_value_t = 64)]
    pub modes: usize,
    /// Step sizes, strictly decreasing: comma-separated numbers, `2^-k`, or `2^-a..2^-b`.
    #[arg(long, default_value = "2^-4..2^-9")]
    pub tau_list: String,
    /// Final time.
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Seed of the random data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Scheme id (gp1, gp1_classical, gp2, gp2_stab, sg1, sg1_classical, engine); defaults by equation and order.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Initial data: rough (H^s) or smooth (analytic). Defaults to smooth for tree-order, rough otherwise.
    #[arg(long)]
    pub data: Option<String>,
    /// Sine-Gordon mass m, as an integer or fraction.
    #[arg(long, default_value = "1")]
    pub mass: String,
    /// Stabiliser order p of Ψ_p for gp2_stab.
    #[arg(long, default_value_t = 2)]
    pub stab_order: u32,
    /// Restrict tree-order to one tree (index into the `trees` listing).
    #[arg(long)]
    pub tree: Option<usize>,
    /// Sobolev index of the second error norm.
    #[arg(long, default_value_t = 1.0)]
    pub error_sobolev: f64,
    /// Dealias products by the 2/3 rule.
    #[arg(long)]
    pub dealias: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Rough,
    Smooth,
}

/// A validated experiment configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub eq: EquationKind,
    pub order: u32,
    pub sobolev: f64,
    pub basis: Basis,
    pub modes: usize,
    pub taus: Vec<f64>,
    pub t_end: f64,
    pub seed: u64,
    pub scheme: SchemeId,
    pub data: DataKind,
    pub mass: Rational64,
    pub stab_order: u32,
    pub tree: Option<usize>,
    pub error_sobolev: f64,
    pub dealias: bool,
    #[serde(skip)]
    pub out: PathBuf,
}

/// Parses `0.1,0.05`, `2^-4,2^-5` and ranges `2^-4..2^-9`.
pub fn parse_tau_list(s: &str) -> Result<Vec<f64>> {
    let pow = |t: &str| -> Result<i32> {
        t.trim()
            .strip_prefix("2^")
            .and_then(|e| e.parse::<i32>().ok())
            .ok_or_else(|| Error::Usage(format!("bad power-of-two step `{t}`")))
    };
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (pow(a)?, pow(b)?);
            let step = if b >= a { 1 } else { -1 };
            let mut e = a;
            loop {
                out.push(2f64.powi(e));
                if e == b {
                    break;
                }
                e += step;
            }
        } else if part.starts_with("2^") {
            out.push(2f64.powi(pow(part)?));
        } else {
            out.push(part.parse::<f64>().map_err(|_| Error::Usage(format!("bad step size `{part}`")))?);
        }
    }
    Ok(out)
}

fn default_scheme(eq: EquationKind, order: u32) -> SchemeId {
    match (eq, order) {
        (EquationKind::Sg, 1) => SchemeId::Sg1,
        (EquationKind::Gp | EquationKind::Nls, 1) => SchemeId::Gp1,
        (EquationKind::Gp | EquationKind::Nls, 2) => SchemeId::Gp2,
        _ => SchemeId::Engine,
    }
}

impl ExperimentConfig {
    pub fn from_args(a: &ExperimentArgs, command: &str) -> Result<Self> {
        let eq: EquationKind = a.eq.parse()?;
        let basis: Basis = a.basis.parse().map_err(|_| Error::Validation(format!("unknown basis `{}`", a.basis)))?;
        let scheme = match &a.scheme {
            Some(s) => s.parse().map_err(|_| Error::Validation(format!("unknown scheme `{s}`")))?,
            None => default_scheme(eq, a.order),
        };
        let data = match a.data.as_deref() {
            Some("rough") => DataKind::Rough,
            Some("smooth") => DataKind::Smooth,
            Some(other) => return Err(Error::Validation(format!("unknown data kind `{other}`"))),
            None if command == "tree-order" => DataKind::Smooth,
            None => DataKind::Rough,
        };
        let mass: Rational64 = a.mass.parse().map_err(|_| Error::Validation(format!("bad mass `{}`", a.mass)))?;
        let cfg = ExperimentConfig {
            eq,
            order: a.order,
            sobolev: a.sobolev,
            basis,
            modes: a.modes,
            taus: parse_tau_list(&a.tau_list)?,
            t_end: a.t_end,
            seed: a.seed,
            scheme,
            data,
            mass,
            stab_order: a.stab_order,
            tree: a.tree,
            error_sobolev: a.error_sobolev,
            dealias: a.dealias,
            out: a.out.clone(),
        };
        cfg.validate(command)?;
        Ok(cfg)
    }

    pub fn validate(&self, command: &str) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.order == 0 {
            return bad("order must be at least 1".into());
        }
        if !(self.sobolev >= 0.0 && self.sobolev.is_finite()) {
            return bad(format!("Sobolev index must be nonnegative, got {}", self.sobolev));
        }
        if self.modes < 4 {
            return bad(format!("need at least 4 modes, got {}", self.modes));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.t_end));
        }
        if self.taus.is_empty() {
            return Err(Error::Usage("empty τ list".into()));
        }
        if self.taus.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("step sizes must be finite and nonnegative".into());
        }
        if self.taus.windows(2).any(|w| w[1] >= w[0]) {
            return bad("τ list must be strictly decreasing".into());
        }
        let sweeps = matches!(command, "converge" | "tree-order");
        if sweeps && self.taus.len() < 3 {
            return Err(Error::Usage(format!("{command} needs at least 3 step sizes, got {}", self.taus.len())));
        }
        if matches!(command, "run" | "converge") && self.taus.iter().any(|t| *t <= 0.0) {
            return bad("step sizes must be positive".into());
        }
        if self.eq == EquationKind::Sg && self.mass == Rational64::from_integer(0) {
            return bad("sine-Gordon needs a nonzero mass".into());
        }
        let sg_scheme = self.scheme.is_sine_gordon();
        if self.scheme != SchemeId::Engine && sg_scheme != (self.eq == EquationKind::Sg) {
            return bad(format!("scheme {} does not integrate {:?}", self.scheme, self.eq));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, excluding the output directory.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.basis, self.modes, self.default_length(), self.dealias)
    }

    fn default_length(&self) -> f64 {
        match self.basis {
            Basis::Periodic => 2.0 * PI,
            Basis::Dirichlet => PI,
        }
    }

    pub fn equation(&self) -> EquationSpec {
        match self.eq {
            EquationKind::Sg => EquationSpec::sg(self.mass),
            k => EquationSpec::from_kind(k),
        }
    }

    pub fn stepper_config(&self, tau: f64) -> Result<StepperConfig> {
        let base = match self.scheme {
            SchemeId::Engine => {
                StepperConfig::engine(EngineSpec { kind: self.eq, order: self.order, sobolev: self.sobolev }, tau)?
            }
            id => StepperConfig::new(id, tau)?,
        };
        base.with_mass(self.mass)?.with_stab_order(self.stab_order)
    }

    /// Seeded initial datum and, for GP, a real potential of the same class.
    pub fn initial_data(&self, grid: &Arc<Grid>) -> (Field, Option<Field>) {
        let u = match self.data {
            DataKind::Rough => rough_data(self.sobolev, self.seed, grid),
            DataKind::Smooth => smooth_data(self.seed, grid, 1.0),
        };
        let v = match self.eq {
            EquationKind::Gp => Some(potential(self, grid)),
            _ => None,
        };
        (u, v)
    }
}

/// A real potential. On the sine basis it is an even cosine series so that
/// `V·u` keeps the odd parity of `u`.
fn potential(cfg: &ExperimentConfig, grid: &Arc<Grid>) -> Field {
    let seed = cfg.seed.wrapping_add(0x5eed);
    match (grid.basis(), cfg.data) {
        (Basis::Periodic, DataKind::Rough) => rough_data(cfg.sobolev, seed, grid).map(|z| Complex64::new(z.re, 0.0)),
        (Basis::Periodic, DataKind::Smooth) => smooth_data(seed, grid, 1.0).map(|z| Complex64::new(z.re, 0.0)),
        (Basis::Dirichlet, _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (0..8).map(|k| rng.gen_range(-1.0..1.0) * (-(k as f64)).exp()).collect();
            Field::from_fn_reflected(grid, Parity::Even, |x| {
                Complex64::new(a.iter().enumerate().map(|(k, c)| c * (2.0 * k as f64 * x).cos()).sum(), 0.0)
            })
        }
    }
}

/// One row of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub tree: Option<String>,
    pub tau: f64,
    pub err_l2: f64,
    pub err_hs: f64,
    pub slope: f64,
    pub residual: f64,
    pub wall_time_s: f64,
}

/// Least-squares slope of `ln err` against `ln τ` and the RMS residual of
/// the fit, over points with `τ > 0` and `err > 0`.
pub fn fit_slope(taus: &[f64], errs: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(errs)
        .filter(|(t, e)| **t > 0.0 && **e > 0.0)
        .map(|(t, e)| (t.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

fn fill_fit(rows: &mut [ResultRow]) {
    let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.err_l2).collect();
    let (s, res) = fit_slope(&taus, &errs);
    for r in rows {
        r.slope = s;
        r.residual = res;
    }
}

fn write_csv<T: Serialize>(path: &Path, hash: &str, command: &str, rows: &[T]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "# config_sha256={hash} command={command}")?;
    let mut w = csv::Writer::from_writer(f);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// What a command produced.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub rows: Vec<ResultRow>,
    pub summary: String,
}

#[derive(Serialize)]
struct TreeEntry {
    index: usize,
    display: String,
    n_plus: u32,
    deg: i32,
    tree: DecoratedTree,
}

/// Writes `trees.json` and `trees.dot` for the order-p trees of component `o`.
pub fn cmd_trees(cfg: &ExperimentConfig) -> Result<Outcome> {
    let eq = cfg.equation();
    let trees = enumerate_trees(&eq, cfg.order, &PlusLabel::new("o"))?;
    fs::create_dir_all(&cfg.out)?;
    let entries: Vec<TreeEntry> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| TreeEntry { index: i, display: t.to_string(), n_plus: n_plus(t), deg: deg(t), tree: t.clone() })
        .collect();
    let json = cfg.out.join("trees.json");
    write_json(&json, &serde_json::json!({ "config_sha256": cfg.hash(), "count": trees.len(), "trees": entries }))?;
    let dot = cfg.out.join("trees.dot");
    let text: String = trees.iter().enumerate().map(|(i, t)| t.to_dot(&format!("T{i}"))).collect();
    fs::write(&dot, text)?;
    let summary = entries.iter().map(|e| format!("T{} = {}", e.index, e.display)).collect::<Vec<_>>().join("\n");
    Ok(Outcome { files: vec![json, dot], rows: vec![], summary: format!("{} trees\n{summary}", trees.len()) })
}

/// Writes `scheme.json` (serialized terms) and `scheme.txt` (pretty form).
pub fn cmd_derive(cfg: &ExperimentConfig) -> Result<Outcome> {
    let eq = cfg.equation();
    let scheme = build_scheme(&eq, &PlusLabel::new("o"), cfg.order, RegularityDomain::new(cfg.sobolev))?;
    fs::create_dir_all(&cfg.out)?;
    let json = cfg.out.join("scheme.json");
    write_json(
        &json,
        &serde_json::json!({ "config_sha256": cfg.hash(), "scheme": &scheme, "term": &*scheme.term }),
    )?;
    let txt = cfg.out.join("scheme.txt");
    let pretty = scheme.to_string();
    fs::write(&txt, &pretty)?;
    Ok(Outcome { files: vec![json, txt], rows: vec![], summary: pretty })
}

#[derive(Serialize)]
struct RunMeta {
    config_sha256: String,
    basis: Basis,
    modes: usize,
    length: f64,
    tau: f64,
    steps: usize,
    l2_initial: f64,
    l2_final: f64,
    h1_final: f64,
}

/// Integrates to `t_end` with the first step size; writes `run.csv` and `run.json`.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let (u0, v) = cfg.initial_data(&grid);
    let tau = cfg.taus[0];
    let mut st = Stepper::new(cfg.stepper_config(tau)?, &grid, v.as_ref())?;
    let steps = st.steps_to(cfg.t_end)?;
    let u = st.run(&u0, cfg.t_end)?;
    fs::create_dir_all(&cfg.out)?;
    let hash = cfg.hash();
    let csv = cfg.out.join("run.csv");
    write_csv(&csv, &hash, "run", &u.snapshot())?;
    let meta = RunMeta {
        config_sha256: hash,
        basis: grid.basis(),
        modes: grid.modes(),
        length: grid.length(),
        tau,
        steps,
        l2_initial: u0.l2_norm(),
        l2_final: u.l2_norm(),
        h1_final: u.sobolev_norm(1.0),
    };
    let json = cfg.out.join("run.json");
    write_json(&json, &meta)?;
    let summary = format!("{} steps of τ = {tau}: ‖u‖ {:.6e} → {:.6e}", steps, meta.l2_initial, meta.l2_final);
    Ok(Outcome { files: vec![csv, json], rows: vec![], summary })
}

/// Global errors at `t_end` against a certified reference; writes `converge.csv`.
pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let (u0, v) = cfg.initial_data(&grid);
    let tau_min = *cfg.taus.last().expect("validated nonempty");
    let reference = reference_solve(cfg.eq, &u0, v.as_ref(), cfg.mass, cfg.t_end, tau_min)?;
    let mut rows = cfg
        .taus
        .par_iter()
        .map(|&tau| -> Result<ResultRow> {
            let t0 = Instant::now();
            let u = Stepper::new(cfg.stepper_config(tau)?, &grid, v.as_ref())?.run(&u0, cfg.t_end)?;
            let e = u.sub(&reference.solution);
            Ok(ResultRow {
                tree: None,
                tau,
                err_l2: e.l2_norm(),
                err_hs: e.sobolev_norm(cfg.error_sobolev),
                slope: f64::NAN,
                residual: f64::NAN,
                wall_time_s: t0.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fill_fit(&mut rows);
    fs::create_dir_all(&cfg.out)?;
    let csv = cfg.out.join("converge.csv");
    write_csv(&csv, &cfg.hash(), "converge", &rows)?;
    let json = cfg.out.join("converge.json");
    write_json(
        &json,
        &serde_json::json!({
            "config_sha256": cfg.hash(),
            "config": cfg,
            "reference": { "tau": reference.tau, "agreement": reference.agreement, "ratio": reference.ratio },
            "slope": rows[0].slope,
            "residual": rows[0].residual,
        }),
    )?;
    let summary = format!("{}: slope {:.3} (residual {:.3})", cfg.scheme, rows[0].slope, rows[0].residual);
    Ok(Outcome { files: vec![csv, json], rows, summary })
}

/// `‖Π ℐ_o(T)(τ) − Π^r ℐ_o(T)(τ)‖` for each τ, with `r = order − 1`.
pub fn tree_errors(
    eq: &EquationSpec,
    t: &DecoratedTree,
    r: i32,
    dom: RegularityDomain,
    inputs: &crate::scheme_engine::Inputs,
    taus: &[f64],
    error_sobolev: f64,
) -> Result<Vec<ResultRow>> {
    let o = PlusLabel::new("o");
    let term = pi_term(eq, &o, t, r, dom)?;
    let grid = inputs.get("o").ok_or_else(|| Error::Spec("missing input `o`".into()))?.grid().clone();
    taus.par_iter()
        .map(|&tau| -> Result<ResultRow> {
            let t0 = Instant::now();
            let exact = pi_exact(eq, &o, t, inputs, tau)?;
            let approx = match &term {
                Some(x) => Evaluator::new(grid.clone(), tau).eval(x, inputs)?,
                None => Field::zeros(&grid),
            };
            let e = exact.sub(&approx);
            Ok(ResultRow {
                tree: Some(t.to_string()),
                tau,
                err_l2: e.l2_norm(),
                err_hs: e.sobolev_norm(error_sobolev),
                slope: f64::NAN,
                residual: f64::NAN,
                wall_time_s: t0.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Per-tree local errors for the order-p trees; writes `tree_order.csv`.
pub fn cmd_tree_order(cfg: &ExperimentConfig) -> Result<Outcome> {
    let eq = cfg.equation();
    let grid = cfg.grid()?;
    let (u0, v) = cfg.initial_data(&grid);
    let inputs = eq.inputs(&u0, v.as_ref());
    let trees = enumerate_trees(&eq, cfg.order, &PlusLabel::new("o"))?;
    let selected: Vec<&DecoratedTree> = match cfg.tree {
        Some(i) => vec![trees
            .get(i)
            .ok_or_else(|| Error::Validation(format!("tree index {i} out of range (0..{})", trees.len())))?],
        None => trees.iter().collect(),
    };
    let dom = RegularityDomain::new(cfg.sobolev);
    let r = cfg.order as i32 - 1;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for t in selected {
        let mut rs = tree_errors(&eq, t, r, dom, &inputs, &cfg.taus, cfg.error_sobolev)?;
        fill_fit(&mut rs);
        lines.push(format!("{t}: slope {:.3} (residual {:.3})", rs[0].slope, rs[0].residual));
        rows.extend(rs);
    }
    fs::create_dir_all(&cfg.out)?;
    let csv = cfg.out.join("tree_order.csv");
    write_csv(&csv, &cfg.hash(), "tree-order", &rows)?;
    Ok(Outcome { files: vec![csv], rows, summary: lines.join("\n") })
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let name = cli.command.name();
    let cfg = ExperimentConfig::from_args(cli.command.args(), name)?;
    match &cli.command {
        Command::Trees(_) => cmd_trees(&cfg),
        Command::Derive(_) => cmd_derive(&cfg),
        Command::Run(_) => cmd_run(&cfg),
        Command::Converge(_) => cmd_converge(&cfg),
        Command::TreeOrder(_) => cmd_tree_order(&cfg),
    }
}

/// Entry point shared by the binary and the tests: parses `args`, runs the
/// command, reports on stdout/stderr and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(o) => {
            println!("{}", o.summary);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
