//! The `fiflab` command line: validate, render, dimension, measure,
//! fracint and report.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dimension::{
    box_count_oscillation, box_count_polyline, dyadic_scales, holder_estimate, moran_solve,
    projection_monotonicity, space_predicates_with_graph, upper_box_cap, Bounds, DimensionReport,
    HolderEstimate, Method, PointCloud, ProjectionReport, SpacePredicateReport, DEFAULT_MORAN_TOL,
};
use crate::error::FifError;
use crate::fif::{
    contraction_ratios, evaluate_fif, knot_error, FifSystem, GraphSample, ValidationReport,
};
use crate::fracint::{
    derive_fractional_ifs, fractional_dimension_report, rl_integral, verify_fractional_identity,
    FracDimReport, FracOrder,
};
use crate::io::{write_json, FracIntJson, SystemSpec};
use crate::measure::{
    chaos_game, default_centers, default_radii, local_dimension, measure_dim_bounds,
    MeasureSummary, ProbabilityVector, DEFAULT_BURN_IN,
};

/// Iteration cap for rendering.
pub const MAX_ITER: usize = 10_000;
/// Number of ball centers used for local dimensions.
pub const LOCAL_DIM_CENTERS: usize = 32;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fiflab", version, about = "Fractal interpolation functions: render, measure, estimate dimensions, integrate fractionally")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the endpoint and scaling conditions; writes validation.json.
    Validate(RunArgs),
    /// Render the FIF on a grid; writes graph.csv.
    Render(RunArgs),
    /// Box-counting estimates, bounds and predicates; writes dimension.json.
    Dimension(RunArgs),
    /// Chaos-game sample of the invariant measure; writes measure.csv and measure.json.
    Measure(RunArgs),
    /// Riemann-Liouville integral and its derived system; writes fracint.csv and fracint.json.
    Fracint(RunArgs),
    /// Run every stage and write all artifacts.
    Report(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Validate(a)
            | Command::Render(a)
            | Command::Dimension(a)
            | Command::Measure(a)
            | Command::Fracint(a)
            | Command::Report(a) => a,
        }
    }
}

/// Flags shared by every verb; each overrides the config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    /// System specification (JSON).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of uniform grid cells used for rendering.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Stopping tolerance of the fixed-point iteration.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Chaos-game sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Order of the fractional integral.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Hölder exponent used by the predicates.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Exponent of the V_alpha space and box-dimension cap.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dyadic scale range `j0..j1`, scales |J|·2^-j.
    #[arg(long)]
    pub deltas: Option<String>,
    /// JSON file with any of the above keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub spec: PathBuf,
    pub out: PathBuf,
    pub grid: usize,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub beta: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub deltas: (u32, u32),
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<FifError> for CliError {
    fn from(e: FifError) -> Self {
        let msg = e.to_string();
        match e {
            FifError::Io(_)
            | FifError::Json(_)
            | FifError::InvalidData(_)
            | FifError::DimensionMismatch { .. }
            | FifError::InvalidProbability(_) => CliError::Input(msg),
            FifError::InvalidScaling { .. }
            | FifError::Domain(_)
            | FifError::TooFewScales(_)
            | FifError::GridMismatch(_)
            | FifError::Unsupported(_) => CliError::Domain(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_deltas(s: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::Input(format!("--deltas expects j0..j1 with j0 < j1, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let j0: u32 = a.trim().parse().map_err(|_| bad())?;
    let j1: u32 = b.trim().parse().map_err(|_| bad())?;
    if j0 >= j1 || j1 > 60 {
        return Err(bad());
    }
    Ok((j0, j1))
}

impl RunConfig {
    /// Merge flags over the optional config file over defaults.
    pub fn resolve(flags: &RunArgs) -> CliResult<Self> {
        let file: RunArgs = match &flags.config {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Input(format!("bad config {}: {e}", p.display())))?
            }
            None => RunArgs::default(),
        };
        macro_rules! pick {
            ($f:ident, $d:expr) => {
                flags.$f.clone().or(file.$f.clone()).unwrap_or($d)
            };
        }
        let spec = flags
            .spec
            .clone()
            .or(file.spec.clone())
            .ok_or_else(|| CliError::Input("--spec is required".into()))?;
        let cfg = RunConfig {
            spec,
            out: pick!(out, PathBuf::from(".")),
            grid: pick!(grid, 4096),
            tol: pick!(tol, 1e-10),
            samples: pick!(samples, 100_000),
            seed: pick!(seed, 0),
            beta: pick!(beta, 0.5),
            sigma: pick!(sigma, 0.5),
            alpha: pick!(alpha, 1.0),
            deltas: parse_deltas(&pick!(deltas, "3..11".to_string()))?,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        let fail = |m: &str| Err(CliError::Input(m.to_string()));
        if self.grid < 2 {
            return fail("--grid must be at least 2");
        }
        if !(self.tol > 0.0) {
            return fail("--tol must be positive");
        }
        if self.samples == 0 {
            return fail("--samples must be positive");
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return fail("--beta must be positive");
        }
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return fail("--sigma must lie in (0, 1]");
        }
        if !(self.alpha >= 1.0) || !self.alpha.is_finite() {
            return fail("--alpha must be at least 1");
        }
        Ok(())
    }
}

/// Loaded system plus parameters.
struct Session {
    cfg: RunConfig,
    spec: SystemSpec,
    sys: FifSystem,
}

impl Session {
    fn open(cfg: RunConfig) -> CliResult<Self> {
        let spec = SystemSpec::read(&cfg.spec)?;
        let sys = spec.build()?;
        fs::create_dir_all(&cfg.out)?;
        Ok(Self { cfg, spec, sys })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn validation(&self) -> CliResult<ValidationReport> {
        let report = self.sys.validate();
        write_json(&self.path("validation.json"), &report)?;
        Ok(report)
    }

    fn require_valid(&self) -> CliResult<()> {
        let report = self.sys.validate();
        if report.valid {
            Ok(())
        } else {
            Err(CliError::Domain(format!(
                "system violates {} condition(s); run `fiflab validate` for details",
                report.violations.len()
            )))
        }
    }

    fn render(&self) -> CliResult<GraphSample> {
        self.require_valid()?;
        let h = evaluate_fif(&self.sys, self.cfg.grid, self.cfg.tol, MAX_ITER)?;
        write_csv(&self.path("graph.csv"), &h, "h")?;
        eprintln!(
            "rendered {} points in {} iterations, residual {:.3e}, knot error {:.3e}",
            h.len(),
            h.iterations,
            h.residual,
            knot_error(&self.sys, &h)
        );
        Ok(h)
    }

    fn scales(&self) -> Vec<f64> {
        let (j0, j1) = self.cfg.deltas;
        dyadic_scales(self.sys.data().width(), j0, j1)
    }

    fn dimension(&self, h: &GraphSample) -> CliResult<DimensionOutput> {
        let scales = self.scales();
        let predicates = space_predicates_with_graph(&self.sys, self.cfg.sigma, self.cfg.alpha, h)?;
        let ratios = contraction_ratios(&self.sys);
        let moran_lower = if ratios.iter().any(|r| r.degenerate) {
            None
        } else {
            let c: Vec<f64> = ratios.iter().map(|r| r.lower).collect();
            Some(moran_solve(&c, DEFAULT_MORAN_TOL)?.s)
        };
        let big: Vec<f64> = ratios.iter().map(|r| r.upper).collect();
        let moran_upper = Some(moran_solve(&big, DEFAULT_MORAN_TOL)?.s);
        let mut notes = Vec::new();
        let cap = if self.sys.dim() == 1 {
            upper_box_cap(&self.sys, self.cfg.alpha)?
        } else {
            match upper_box_cap(&self.sys, self.cfg.alpha) {
                Err(FifError::Unsupported(m)) => {
                    notes.push(m);
                    None
                }
                other => other?,
            }
        };
        let two_minus_sigma = predicates.holder.holds.then_some(2.0 - self.cfg.sigma);
        let bounds = Bounds {
            moran_lower,
            moran_upper,
            two_minus_sigma,
            cap,
        };
        let cloud = PointCloud::from_graph(h).normalized();
        let unit_scales = dyadic_scales(1.0, self.cfg.deltas.0, self.cfg.deltas.1);
        let mesh = box_count_polyline(&cloud, &unit_scales)?.with_bounds(bounds);
        let components = (0..h.dim())
            .map(|i| {
                Ok(box_count_oscillation(h, i, &scales)?.with_bounds(Bounds {
                    two_minus_sigma,
                    ..Bounds::default()
                }))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let projection = if h.dim() > 1 {
            Some(projection_monotonicity(&cloud, &unit_scales, Method::Polyline)?)
        } else {
            None
        };
        let out = DimensionOutput {
            mesh,
            components,
            holder: holder_estimate(h)?,
            predicates,
            projection,
            notes,
        };
        write_json(&self.path("dimension.json"), &out)?;
        eprintln!("mesh slope {:.4} (R^2 {:.4})", out.mesh.slope, out.mesh.r2);
        Ok(out)
    }

    fn probabilities(&self) -> CliResult<ProbabilityVector> {
        Ok(self.spec.probability_vector()?)
    }

    fn measure(&self) -> CliResult<MeasureOutput> {
        self.require_valid()?;
        let p = self.probabilities()?;
        let mu = chaos_game(&self.sys, &p, self.cfg.samples, DEFAULT_BURN_IN, self.cfg.seed)?;
        let file = fs::File::create(self.path("measure.csv"))?;
        mu.write_csv(BufWriter::new(file))?;
        let bounds = measure_dim_bounds(&self.sys, &p)?;
        let local = local_dimension(&mu, &default_centers(&mu, LOCAL_DIM_CENTERS), &default_radii(&mu))?;
        let out = MeasureOutput {
            summary: MeasureSummary::new(&bounds, &local),
            operative_upper: bounds.operative_upper,
            lower_degenerate: bounds.lower_degenerate,
            n: mu.len(),
            seed: mu.seed,
            burn_in: mu.burn_in,
            probabilities: p.as_slice().to_vec(),
            branch_frequencies: mu.branch_frequencies(self.sys.branch_count()),
            notes: local.notes.clone(),
        };
        write_json(&self.path("measure.json"), &out)?;
        eprintln!(
            "entropy bound {:.4}, local dimension median {}",
            out.summary.entropy_bound,
            out.summary
                .local_dim_median
                .map_or("n/a".to_string(), |v| format!("{v:.4}"))
        );
        Ok(out)
    }

    fn fracint(&self, h: &GraphSample) -> CliResult<()> {
        let beta = FracOrder::new(self.cfg.beta)?;
        let fsys = derive_fractional_ifs(&self.sys, beta, h)?;
        let ih = fsys.integral();
        write_csv(&self.path("fracint.csv"), ih, "Ih")?;
        let identity = verify_fractional_identity(&fsys, ih)?;
        let predicates = space_predicates_with_graph(&self.sys, self.cfg.sigma, self.cfg.alpha, h)?;
        let statements =
            fractional_dimension_report(&self.sys, beta, self.cfg.sigma, &predicates, &self.probabilities()?)?;
        let out = FracIntOutput {
            derived: FracIntJson::new(&fsys, identity)?,
            oracle: constant_oracle(h, beta)?,
            statements,
        };
        write_json(&self.path("fracint.json"), &out)?;
        eprintln!(
            "identity residual {:.3e} (budget {:.3e}), constant oracle error {:.3e}",
            out.derived.identity.residual, out.derived.identity.budget, out.oracle.max_relative_error
        );
        Ok(())
    }
}

fn write_csv(path: &Path, g: &GraphSample, prefix: &str) -> CliResult<()> {
    let file = fs::File::create(path)?;
    g.write_csv(BufWriter::new(file), prefix)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct DimensionOutput {
    mesh: DimensionReport,
    components: Vec<DimensionReport>,
    holder: HolderEstimate,
    predicates: SpacePredicateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    projection: Option<ProjectionReport>,
    notes: Vec<String>,
}

#[derive(Debug, Serialize)]
struct MeasureOutput {
    #[serde(flatten)]
    summary: MeasureSummary,
    operative_upper: f64,
    lower_degenerate: bool,
    n: usize,
    seed: u64,
    burn_in: usize,
    probabilities: Vec<f64>,
    branch_frequencies: Vec<f64>,
    notes: Vec<String>,
}

/// `f ≡ 1` integrated on the rendering grid against `(t - x_1)^β / Γ(β + 1)`.
#[derive(Debug, Serialize)]
struct ConstantOracle {
    beta: f64,
    max_relative_error: f64,
}

fn constant_oracle(h: &GraphSample, beta: FracOrder) -> CliResult<ConstantOracle> {
    let ones = GraphSample::new(h.grid().to_vec(), vec![1.0; h.len()], 1)?;
    let out = rl_integral(&ones, beta)?;
    let x1 = h.grid()[0];
    let g1 = beta.gamma() * beta.value();
    let err = h
        .grid()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &t)| {
            let exact = (t - x1).powf(beta.value()) / g1;
            ((out.value(j)[0] - exact) / exact).abs()
        })
        .fold(0.0, f64::max);
    Ok(ConstantOracle {
        beta: beta.value(),
        max_relative_error: err,
    })
}

#[derive(Debug, Serialize)]
struct FracIntOutput {
    #[serde(flatten)]
    derived: FracIntJson,
    oracle: ConstantOracle,
    statements: FracDimReport,
}

fn execute(command: &Command) -> CliResult<()> {
    let cfg = RunConfig::resolve(command.args())?;
    let s = Session::open(cfg)?;
    match command {
        Command::Validate(_) => {
            let report = s.validation()?;
            if report.valid {
                eprintln!("valid");
                Ok(())
            } else {
                Err(CliError::Domain(format!(
                    "{} violation(s) written to validation.json",
                    report.violations.len()
                )))
            }
        }
        Command::Render(_) => s.render().map(|_| ()),
        Command::Dimension(_) => {
            let h = s.render()?;
            s.dimension(&h).map(|_| ())
        }
        Command::Measure(_) => s.measure().map(|_| ()),
        Command::Fracint(_) => {
            let h = s.render()?;
            s.fracint(&h)
        }
        Command::Report(_) => {
            let report = s.validation()?;
            if !report.valid {
                return Err(CliError::Domain(format!(
                    "{} violation(s) written to validation.json",
                    report.violations.len()
                )));
            }
            let h = s.render()?;
            s.dimension(&h)?;
            s.measure()?;
            s.fracint(&h)
        }
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

/// Cap the global thread pool from `FIFLAB_THREADS`.
pub fn configure_threads() -> CliResult<()> {
    match std::env::var("FIFLAB_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Input(format!("FIFLAB_THREADS must be a positive integer, got {v:?}")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Input(e.to_string()))
        }
        Err(_) => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deltas_parse() {
        assert_eq!(parse_deltas("3..11").unwrap(), (3, 11));
        assert!(parse_deltas("11..3").is_err());
        assert!(parse_deltas("3-11").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("cfg.json");
        fs::write(&cfg_path, r#"{"spec":"a.json","grid":100,"seed":7,"beta":0.3}"#).unwrap();
        let flags = RunArgs {
            grid: Some(200),
            config: Some(cfg_path),
            ..RunArgs::default()
        };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.grid, 200);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.beta, 0.3);
        assert_eq!(cfg.spec, PathBuf::from("a.json"));
        assert_eq!(cfg.deltas, (3, 11));
    }

    #[test]
    fn invalid_parameters_are_input_errors() {
        let flags = RunArgs {
            spec: Some("a.json".into()),
            sigma: Some(1.5),
            ..RunArgs::default()
        };
        assert_eq!(RunConfig::resolve(&flags).unwrap_err().code(), EXIT_INPUT);
        assert_eq!(RunConfig::resolve(&RunArgs::default()).unwrap_err().code(), EXIT_INPUT);
    }
}
