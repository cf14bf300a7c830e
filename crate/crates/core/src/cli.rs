//! The `bifprob` command line: JSON experiment configs in, a plain-text
//! report, a JSON sidecar and CSV tables out.
//!
//! ```json
//! {
//!   "name": "ps_d",
//!   "model": "lorenz",
//!   "inputs": {
//!     "zeta": {"kind": "genbeta", "alpha": 2, "beta": 5, "a": -0.5, "b": 0.5},
//!     "theta": {"kind": "gamma", "shape": 8, "rate": 1}
//!   },
//!   "method": "mellin_pce_gmm",
//!   "params": {"N": 2, "n_moms": 5, "k": 2, "n_samples": 1000000, "seed": 20211},
//!   "eval_cdf": [-0.15, -0.05, 0.0, 0.05],
//!   "output_dir": "out/ps_d"
//! }
//! ```
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
//! failures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::mellin::{self, two_columns, Example31, PiecewisePdf};
use crate::models::BifurcationModel;
use crate::moments::{coefficient_moments, MomentSequence};
use crate::montecarlo::{mc_run, sample_model, McOptions, McResult};
use crate::pce::{project, PowerPolynomial, ProjectOptions};
use crate::reconstruct::{
    default_init, default_weight_matrix, fit_gmm, legendre_pdf_approx, monic_pdf_approx, support_from_samples,
    transformed_moments_pdf_approx, ApproxKind, DensityApprox, Diagnostics, FitOptions, GaussianMixture, GmmFit,
    MonicOptions,
};
use crate::unscented::{default_kappa, sigma_points_p3, sigma_points_p5, ut_sign_probability, Precision};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Samples in the pilot draw used to bound the support when none is given.
pub const PILOT_SAMPLES: usize = 10_000;
pub const PILOT_TAIL: f64 = 1e-9;
/// Points in every tabulated density or CDF.
pub const TABLE_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    MellinPceGmm,
    PolynomialReconstruct,
    Unscented,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MellinPceGmm => "mellin_pce_gmm",
            Method::PolynomialReconstruct => "polynomial_reconstruct",
            Method::Unscented => "unscented",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Method parameters; which ones are required depends on the method.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodParams {
    /// PCE truncation degree.
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Gauss nodes for the PCE projection (default `N + 1`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// PCE germ (default `U(0, 1)`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub germ: Option<Distribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_moms: Option<usize>,
    /// Mixture components.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<usize>,
    /// Unscented precision, 3 or 5.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Monte Carlo samples; for methods other than `monte_carlo` a nonzero
    /// value adds a Monte Carlo column to the report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<(f64, f64)>,
    /// Polynomial approximant degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<ApproxKind>,
    /// Clip negative lobes of a polynomial approximant and renormalize.
    pub clip: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: String,
    pub inputs: BTreeMap<String, Distribution>,
    pub method: Method,
    #[serde(default)]
    pub params: MethodParams,
    #[serde(default)]
    pub eval_cdf: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Checks the model name and inputs; returns the inputs in model order.
    pub fn resolve(&self) -> Result<(BifurcationModel, Vec<Distribution>)> {
        let model = BifurcationModel::by_name(&self.model)?;
        let names = model.inputs();
        if let Some(extra) = self.inputs.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(Error::Config(format!("`{}` has no input `{extra}` (expects {names:?})", model.name())));
        }
        let inputs = names
            .iter()
            .map(|n| {
                self.inputs
                    .get(*n)
                    .copied()
                    .ok_or_else(|| Error::Config(format!("missing input `{n}` for `{}`", model.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((model, inputs))
    }

    fn seed(&self) -> u64 {
        self.params.seed.unwrap_or(0)
    }

    fn n_samples(&self) -> usize {
        self.params.n_samples.unwrap_or(0)
    }

    fn require<T: Copy>(&self, v: Option<T>, what: &str) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("missing params.{what}")))
    }

    /// Checks that the parameters required by the configured method are present.
    pub fn validate(&self) -> Result<()> {
        let (model, _) = self.resolve()?;
        let p = &self.params;
        match self.method {
            Method::Analytic => {
                if model == BifurcationModel::WattGovernor {
                    return Err(Error::Config("method `analytic` needs a product-form model".into()));
                }
            }
            Method::MellinPceGmm => {
                if model == BifurcationModel::Lorenz {
                    self.require(p.n, "N")?;
                }
                if !model.has_product_form() {
                    return Err(Error::Config(format!("`{}` has no Mellin decomposition", model.name())));
                }
                self.require(p.n_moms, "n_moms")?;
                self.require(p.k, "k")?;
            }
            Method::PolynomialReconstruct => {
                self.require(p.degree, "degree")?;
                if !model.has_product_form() {
                    return Err(Error::Config(format!("`{}` has no Mellin decomposition", model.name())));
                }
            }
            Method::Unscented => {
                Precision::from_order(self.require(p.precision, "precision")?).map_err(|e| Error::Config(e.to_string()))?;
            }
            Method::MonteCarlo => {
                if self.require(p.n_samples, "n_samples")? == 0 {
                    return Err(Error::Config("params.n_samples must be positive".into()));
                }
            }
        }
        if let Some((lo, hi)) = p.support {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("params.support [{lo}, {hi}] must be finite and increasing")));
            }
        }
        let uses_pce = matches!(self.method, Method::MellinPceGmm | Method::PolynomialReconstruct) && model == BifurcationModel::Lorenz;
        if let (true, Some(g)) = (uses_pce, p.germ) {
            crate::pce::OrthoBasis::for_germ(&g, 0).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub source: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mellin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub y: f64,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PceSummary {
    pub degree: usize,
    pub germ: Distribution,
    /// Coefficients on the orthonormal basis.
    pub coefficients: Vec<f64>,
    pub powers: PowerPolynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxSummary {
    pub kind: ApproxKind,
    pub support: (f64, f64),
    pub degree: usize,
    pub clipped: bool,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtSummary {
    pub precision: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub count: usize,
    pub total: usize,
    pub fraction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub command: String,
    pub model: BifurcationModel,
    pub inputs: BTreeMap<String, Distribution>,
    pub method: Method,
    pub seed: u64,
    /// `"X < 0"` or `"X > 0"`.
    pub subcritical_event: String,
    pub probabilities: Vec<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_provenance: Option<String>,
    pub moments: Vec<MomentRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pce: Option<PceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixture: Option<GmmFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approximant: Option<ApproxSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unscented: Option<UtSummary>,
    pub cdf: Vec<CdfRow>,
    pub warnings: Vec<String>,
    /// Names of the files written next to the report.
    pub files: Vec<String>,
}

/// A finished run: the report plus the CSV/JSON tables to persist.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<(String, String)>,
}

impl Outcome {
    fn new(cmd: Command, cfg: &ExperimentConfig, model: BifurcationModel) -> Self {
        let event = match model.subcritical_when() {
            crate::models::SubcriticalWhen::Negative => "X < 0",
            crate::models::SubcriticalWhen::Positive => "X > 0",
        };
        Outcome {
            report: Report {
                name: cfg.name.clone().unwrap_or_else(|| model.name().to_string()),
                command: cmd.name().to_string(),
                model,
                inputs: cfg.inputs.clone(),
                method: cfg.method,
                seed: cfg.seed(),
                subcritical_event: event.to_string(),
                probabilities: Vec::new(),
                moment_provenance: None,
                moments: Vec::new(),
                pce: None,
                mixture: None,
                approximant: None,
                unscented: None,
                cdf: cfg.eval_cdf.iter().map(|&y| CdfRow { y, values: BTreeMap::new() }).collect(),
                warnings: Vec::new(),
                files: Vec::new(),
            },
            tables: Vec::new(),
        }
    }

    fn table(&mut self, name: &str, body: String) {
        self.tables.push((name.to_string(), body));
    }

    fn cdf_column(&mut self, source: &str, f: impl Fn(f64) -> f64) {
        for row in &mut self.report.cdf {
            row.values.insert(source.to_string(), f(row.y));
        }
    }

    fn moment_row(&mut self, order: usize) -> &mut MomentRow {
        if let Some(i) = self.report.moments.iter().position(|r| r.order == order) {
            return &mut self.report.moments[i];
        }
        self.report.moments.push(MomentRow {
            order,
            mellin: None,
            fitted: None,
            mc: None,
            mc_std_error: None,
        });
        self.report.moments.sort_by_key(|r| r.order);
        let i = self.report.moments.iter().position(|r| r.order == order).unwrap();
        &mut self.report.moments[i]
    }

    /// Writes `report.txt`, `report.json` and all tables into `dir`.
    pub fn write(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.report.files = self.tables.iter().map(|(n, _)| n.clone()).collect();
        self.report.files.push("report.json".into());
        self.report.files.push("report.txt".into());
        for (name, body) in &self.tables {
            std::fs::write(dir.join(name), body)?;
        }
        let mut json = serde_json::to_string_pretty(&self.report)?;
        json.push('\n');
        std::fs::write(dir.join("report.json"), json)?;
        std::fs::write(dir.join("report.txt"), self.report.render())?;
        Ok(())
    }
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

impl Report {
    /// The plain-text table printed to stdout and saved as `report.txt`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "bifprob {}: {}", self.command, self.name);
        let _ = writeln!(s, "model   {}  (subcritical iff {})", self.model.name(), self.subcritical_event);
        for name in self.model.inputs() {
            if let Some(d) = self.inputs.get(*name) {
                let _ = writeln!(s, "  {name:<6} ~ {d}");
            }
        }
        let _ = writeln!(s, "method  {}  seed {}", self.method.name(), self.seed);

        if !self.probabilities.is_empty() {
            let _ = writeln!(s, "\nP({})", self.subcritical_event);
            for e in &self.probabilities {
                let _ = write!(s, "  {:<14} {:.6}", e.source, e.value);
                if let Some(f) = &e.fraction {
                    let _ = write!(s, "  ({f})");
                }
                if let Some(se) = e.std_error {
                    let _ = write!(s, "  ± {se:.1e}");
                }
                s.push('\n');
            }
        }

        if let Some(p) = &self.pce {
            let _ = writeln!(s, "\nPCE of zeta/(1+zeta), N = {}, germ {}", p.degree, p.germ);
            let _ = writeln!(s, "  coefficients   {}", p.coefficients.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(", "));
            let _ = writeln!(s, "  powers of xi   {}", p.powers.coeffs.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(", "));
        }

        if !self.moments.is_empty() {
            let _ = writeln!(
                s,
                "\nmoments{}",
                self.moment_provenance.as_deref().map(|p| format!(" ({p})")).unwrap_or_default()
            );
            type Col = (&'static str, fn(&MomentRow) -> Option<f64>);
            let all: [Col; 4] = [
                ("mellin", |r| r.mellin),
                ("fitted", |r| r.fitted),
                ("mc", |r| r.mc),
                ("mc std err", |r| r.mc_std_error),
            ];
            let cols: Vec<&Col> = all.iter().filter(|(_, f)| self.moments.iter().any(|r| f(r).is_some())).collect();
            let _ = write!(s, "  {:>3}", "n");
            for (name, _) in &cols {
                let _ = write!(s, "  {name:>14}");
            }
            s.push('\n');
            for r in &self.moments {
                let _ = write!(s, "  {:>3}", r.order);
                for (_, f) in &cols {
                    let _ = write!(s, "  {:>14}", f(r).map(sci).unwrap_or_else(|| "-".into()));
                }
                s.push('\n');
            }
        }

        if let Some(fit) = &self.mixture {
            let m = &fit.mixture;
            let _ = writeln!(
                s,
                "\nGaussian mixture, k = {} (objective {:.3e}, restart {} of {})",
                m.k(),
                fit.objective,
                fit.best + 1,
                fit.restarts.len()
            );
            let _ = writeln!(s, "  {:>3}  {:>10}  {:>14}  {:>14}", "i", "pi", "mu", "sigma");
            for i in 0..m.k() {
                let _ = writeln!(s, "  {:>3}  {:>10.6}  {:>14}  {:>14}", i + 1, m.pi[i], sci(m.mu[i]), sci(m.sigma[i]));
            }
            let objs: Vec<String> = fit.restarts.iter().map(|r| format!("{:.3e}", r.objective)).collect();
            let _ = writeln!(s, "  restart objectives: {}", objs.join(", "));
        }

        if let Some(a) = &self.approximant {
            let d = &a.diagnostics;
            let _ = writeln!(
                s,
                "\n{:?} approximant, degree {} on [{}, {}]{}",
                a.kind,
                a.degree,
                sci(a.support.0),
                sci(a.support.1),
                if a.clipped { ", clipped" } else { "" }
            );
            let _ = writeln!(
                s,
                "  integral {:.6}  |integral| {:.6}  negative mass {:.3e}  min {:.3e}",
                d.integral, d.abs_integral, d.negative_mass, d.min_value
            );
        }

        if let Some(u) = &self.unscented {
            let _ = writeln!(
                s,
                "\nsigma points: precision {}{}  {} of {} subcritical",
                u.precision,
                u.kappa.map(|k| format!(", kappa {k}")).unwrap_or_default(),
                u.count,
                u.total
            );
        }

        if self.cdf.iter().any(|r| !r.values.is_empty()) {
            let sources: Vec<&String> = {
                let mut v: Vec<&String> = self.cdf.iter().flat_map(|r| r.values.keys()).collect();
                v.sort();
                v.dedup();
                v
            };
            let _ = write!(s, "\nCDF\n  {:>12}", "y");
            for src in &sources {
                let _ = write!(s, "  {src:>12}");
            }
            s.push('\n');
            for r in &self.cdf {
                let _ = write!(s, "  {:>12}", format!("{}", r.y));
                for src in &sources {
                    match r.values.get(*src) {
                        Some(v) => {
                            let _ = write!(s, "  {v:>12.6}");
                        }
                        None => {
                            let _ = write!(s, "  {:>12}", "-");
                        }
                    }
                }
                s.push('\n');
            }
        }

        for w in &self.warnings {
            let _ = writeln!(s, "\nwarning: {w}");
        }
        if !self.files.is_empty() {
            let _ = writeln!(s, "\nfiles: {}", self.files.join(", "));
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Pipeline stages

/// Which operation to run. `Analyze` follows the configured method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    MellinProduct,
    Pce,
    Moments,
    FitGmm,
    Reconstruct,
    Ut,
    Mc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::MellinProduct => "mellin-product",
            Command::Pce => "pce",
            Command::Moments => "moments",
            Command::FitGmm => "fit-gmm",
            Command::Reconstruct => "reconstruct",
            Command::Ut => "ut",
            Command::Mc => "mc",
        }
    }
}

fn project_options(cfg: &ExperimentConfig) -> ProjectOptions {
    ProjectOptions {
        degree: cfg.params.n.unwrap_or(ProjectOptions::default().degree),
        nodes: cfg.params.nodes,
    }
}

fn germ(cfg: &ExperimentConfig) -> Distribution {
    cfg.params.germ.unwrap_or(Distribution::Uniform { a: 0.0, b: 1.0 })
}

fn default_moments(cfg: &ExperimentConfig) -> usize {
    cfg.params.n_moms.unwrap_or(5)
}

fn mellin_moments(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution], n_moms: usize) -> Result<MomentSequence> {
    let e = model
        .mellin_decomposition(inputs, &germ(cfg), project_options(cfg))
        .ok_or_else(|| Error::Config(format!("`{}` has no Mellin decomposition", model.name())))??;
    let m = coefficient_moments(&e, n_moms)?;
    for (i, &mu) in m.mu.iter().enumerate() {
        out.moment_row(i + 1).mellin = Some(mu);
    }
    out.report.moment_provenance = Some(
        serde_json::to_value(m.provenance)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
    );
    if !m.hankel_ok() {
        out.report.warnings.push("moment sequence has negative variance (PCE truncation error)".into());
    }
    out.table("moments.json", serde_json::to_string_pretty(&m)? + "\n");
    Ok(m)
}

fn mc_stage(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution], n: usize) -> Result<McResult> {
    let opts = McOptions {
        n_moms: default_moments(cfg),
        bins: cfg.params.bins.unwrap_or(crate::montecarlo::DEFAULT_BINS),
    };
    let r = mc_run(model, inputs, n, cfg.seed(), opts)?;
    out.report.probabilities.push(Estimate {
        source: "monte_carlo".into(),
        value: r.sign_probability,
        std_error: Some(r.sign_std_error()),
        fraction: None,
    });
    for (i, (&mu, &se)) in r.moments.mu.iter().zip(&r.moment_std_errors).enumerate() {
        let row = out.moment_row(i + 1);
        row.mc = Some(mu);
        row.mc_std_error = Some(se);
    }
    let ecdf = r.ecdf();
    out.cdf_column("monte_carlo", |y| ecdf.eval(y));
    out.table("mc_histogram.csv", r.histogram.to_csv());
    out.table("mc_ecdf.csv", ecdf.to_csv(TABLE_POINTS));
    Ok(r)
}

/// Support from the config, or from a pilot Monte Carlo draw.
fn support(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution]) -> Result<(f64, f64)> {
    if let Some(s) = cfg.params.support {
        return Ok(s);
    }
    let pilot = sample_model(model, inputs, PILOT_SAMPLES, cfg.seed())?;
    let s = support_from_samples(&pilot, PILOT_TAIL)?;
    out.report
        .warnings
        .push(format!("support [{}, {}] estimated from a {PILOT_SAMPLES}-sample pilot draw", sci(s.0), sci(s.1)));
    Ok(s)
}

fn grid(support: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = support;
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn subcritical_mass(model: BifurcationModel, cdf_at_zero: f64) -> f64 {
    match model.subcritical_when() {
        crate::models::SubcriticalWhen::Negative => cdf_at_zero,
        crate::models::SubcriticalWhen::Positive => 1.0 - cdf_at_zero,
    }
}

fn gmm_stage(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution]) -> Result<GaussianMixture> {
    let k = cfg.require(cfg.params.k, "k")?;
    let m = mellin_moments(out, cfg, model, inputs, default_moments(cfg))?;
    let sup = support(out, cfg, model, inputs)?;
    let init = default_init(k, sup)?;
    let defaults = FitOptions::default();
    let opts = FitOptions {
        max_evals: cfg.params.max_evals.unwrap_or(defaults.max_evals),
        restarts: cfg.params.restarts.unwrap_or(defaults.restarts),
        seed: cfg.seed(),
    };
    let fit = fit_gmm(&m, k, &default_weight_matrix(&m), &init, opts)?;
    let gm = fit.mixture.clone();
    out.report.probabilities.push(Estimate {
        source: "gmm".into(),
        value: subcritical_mass(model, gm.cdf(0.0)),
        std_error: None,
        fraction: None,
    });
    for i in 0..m.n_moms() {
        out.moment_row(i + 1).fitted = Some(gm.moment(i as u32 + 1));
    }
    out.cdf_column("gmm", |y| gm.cdf(y));
    let xs = grid(sup, TABLE_POINTS);
    let pdf: Vec<f64> = xs.iter().map(|&x| gm.pdf(x)).collect();
    let cdf: Vec<f64> = xs.iter().map(|&x| gm.cdf(x)).collect();
    out.table("gmm_pdf.csv", two_columns("density", &xs, &pdf));
    out.table("gmm_cdf.csv", two_columns("cumulative", &xs, &cdf));
    out.table("mixture.json", serde_json::to_string_pretty(&fit)? + "\n");
    out.report.mixture = Some(fit);
    Ok(gm)
}

fn reconstruct_stage(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution]) -> Result<()> {
    let degree = cfg.require(cfg.params.degree, "degree")?;
    let kind = cfg.params.approx.unwrap_or(ApproxKind::Legendre);
    let m = mellin_moments(out, cfg, model, inputs, cfg.params.n_moms.unwrap_or(degree))?;
    let sup = support(out, cfg, model, inputs)?;
    let approx: DensityApprox = match kind {
        ApproxKind::Legendre => legendre_pdf_approx(&m, sup, degree)?,
        ApproxKind::Monic => monic_pdf_approx(&m, sup, degree, &MonicOptions::default())?,
        ApproxKind::Transformed => {
            if sup.0 != 0.0 {
                return Err(Error::Config("the transformed approximant needs params.support = [0, b]".into()));
            }
            transformed_moments_pdf_approx(&m, sup.1, degree)?
        }
    };
    let diagnostics = approx.diagnostics()?;
    if diagnostics.negative_mass > 0.0 {
        out.report.warnings.push(format!(
            "approximant is negative somewhere (negative mass {:.3e}, min {:.3e})",
            diagnostics.negative_mass, diagnostics.min_value
        ));
    }
    out.table("approx_pdf.csv", approx.to_csv(TABLE_POINTS));
    let clip = cfg.params.clip;
    if clip {
        let pdf = approx.clipped(TABLE_POINTS)?;
        out.report.probabilities.push(Estimate {
            source: "approximant".into(),
            value: subcritical_mass(model, pdf.cdf(0.0)),
            std_error: None,
            fraction: None,
        });
        out.cdf_column("approximant", |y| pdf.cdf(y));
        out.table("approx_clipped_pdf.csv", pdf.to_csv());
        out.table("approx_cdf.csv", pdf.cdf_csv());
    } else {
        // raw running integral, which may leave [0, 1]
        let (xs, ys) = approx.tabulate(TABLE_POINTS);
        let mut cum = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cum[i] = cum[i - 1] + 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
        }
        let at = |y: f64| -> f64 {
            if y <= xs[0] {
                return 0.0;
            }
            if y >= xs[xs.len() - 1] {
                return cum[cum.len() - 1];
            }
            let j = xs.partition_point(|&x| x <= y) - 1;
            let t = (y - xs[j]) / (xs[j + 1] - xs[j]);
            cum[j] + t * (cum[j + 1] - cum[j])
        };
        out.report.probabilities.push(Estimate {
            source: "approximant".into(),
            value: subcritical_mass(model, at(0.0)),
            std_error: None,
            fraction: None,
        });
        out.cdf_column("approximant", at);
        out.table("approx_cdf.csv", two_columns("cumulative", &xs, &cum));
    }
    out.report.approximant = Some(ApproxSummary {
        kind,
        support: sup,
        degree,
        clipped: clip,
        diagnostics,
    });
    Ok(())
}

fn ut_stage(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution]) -> Result<()> {
    let precision = Precision::from_order(cfg.require(cfg.params.precision, "precision")?).map_err(|e| Error::Config(e.to_string()))?;
    let sp = match precision {
        Precision::Three => sigma_points_p3(inputs, cfg.params.kappa.unwrap_or(default_kappa(inputs.len())))?,
        Precision::Five => sigma_points_p5(inputs)?,
    };
    let est = ut_sign_probability(model, &sp)?;
    out.report.probabilities.push(Estimate {
        source: "unscented".into(),
        value: est.probability,
        std_error: None,
        fraction: Some(est.fraction()),
    });
    out.table("ut_points.csv", est.to_csv(model));
    out.report.unscented = Some(UtSummary {
        precision: precision.order(),
        kappa: sp.kappa,
        count: est.count,
        total: est.total,
        fraction: est.fraction(),
    });
    Ok(())
}

fn pce_stage(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution]) -> Result<()> {
    if model != BifurcationModel::Lorenz {
        return Err(Error::Config(format!("`{}` has no PCE factor", model.name())));
    }
    let zeta = inputs[0];
    if zeta.support().0 <= -1.0 {
        return Err(Error::Singularity {
            model: model.name().into(),
            detail: format!("zeta = -1 lies in the support of {zeta}"),
        });
    }
    let g = germ(cfg);
    let opts = project_options(cfg);
    let pce = project(|z| z / (1.0 + z), &zeta, &g, opts)?;
    let powers = pce.collect_powers();
    out.table("pce.json", serde_json::to_string_pretty(&powers)? + "\n");
    out.report.pce = Some(PceSummary {
        degree: opts.degree,
        germ: g,
        coefficients: pce.coeffs,
        powers,
    });
    Ok(())
}

/// Exact sign probability of a product-form coefficient from the input CDFs.
fn analytic_sign_probability(model: BifurcationModel, inputs: &[Distribution]) -> Result<f64> {
    match model {
        BifurcationModel::PitchforkProduct => {
            let (a, b) = (&inputs[0], &inputs[1]);
            let (fa, fb) = (a.cdf(0.0), b.cdf(0.0));
            Ok(fa * (1.0 - fb) + (1.0 - fa) * fb)
        }
        BifurcationModel::Lorenz => {
            let (zeta, theta) = (&inputs[0], &inputs[1]);
            if !(theta.support().0 >= 0.0 && theta.cdf(0.0) == 0.0) {
                return Err(Error::Unsupported {
                    op: "analytic sign probability",
                    detail: format!("theta ~ {theta} must be a.s. positive"),
                });
            }
            if zeta.support().0 <= -1.0 {
                return Err(Error::Singularity {
                    model: model.name().into(),
                    detail: format!("zeta = -1 lies in the support of {zeta}"),
                });
            }
            Ok(zeta.cdf(0.0))
        }
        BifurcationModel::WattGovernor => Err(Error::Config("method `analytic` needs a product-form model".into())),
    }
}

fn product_density_stage(out: &mut Outcome, cfg: &ExperimentConfig, inputs: &[Distribution]) -> Result<PiecewisePdf> {
    let (f, g) = (inputs[0], inputs[1]);
    let n = cfg.params.grid_points.unwrap_or(mellin::DEFAULT_GRID_POINTS);
    let xs = match cfg.params.support {
        Some(s) => grid(s, n),
        None => mellin::default_grid(&f, &g, n, cfg.seed()),
    };
    let pdf = mellin::product_pdf_convolution(&f, &g, &xs)?;
    out.cdf_column("convolution", |y| pdf.cdf(y));
    if (f, g) == Example31::factors() {
        out.cdf_column("closed_form", |y| Example31.cdf(y));
    }
    out.table("product_pdf.csv", pdf.to_csv());
    out.table("product_cdf.csv", pdf.cdf_csv());
    Ok(pdf)
}

fn analytic_stage(out: &mut Outcome, cfg: &ExperimentConfig, model: BifurcationModel, inputs: &[Distribution]) -> Result<()> {
    let p = analytic_sign_probability(model, inputs)?;
    out.report.probabilities.push(Estimate {
        source: "analytic".into(),
        value: p,
        std_error: None,
        fraction: None,
    });
    if model == BifurcationModel::PitchforkProduct {
        mellin_moments(out, cfg, model, inputs, default_moments(cfg))?;
        if inputs[1].is_nonnegative() {
            product_density_stage(out, cfg, inputs)?;
        } else {
            out.report.warnings.push("product density needs a nonnegative second factor; skipped".into());
        }
    } else if !out.report.cdf.is_empty() {
        out.report.warnings.push("no closed-form CDF for this model; only P is analytic".into());
    }
    Ok(())
}

/// Runs `cmd` on a parsed config.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    let (model, inputs) = cfg.resolve()?;
    if cmd == Command::Analyze {
        cfg.validate()?;
    }
    let mut out = Outcome::new(cmd, cfg, model);
    let n_samples = cfg.n_samples();
    match cmd {
        Command::Analyze => {
            match cfg.method {
                Method::Analytic => analytic_stage(&mut out, cfg, model, &inputs)?,
                Method::MellinPceGmm => {
                    gmm_stage(&mut out, cfg, model, &inputs)?;
                }
                Method::PolynomialReconstruct => reconstruct_stage(&mut out, cfg, model, &inputs)?,
                Method::Unscented => ut_stage(&mut out, cfg, model, &inputs)?,
                Method::MonteCarlo => {
                    mc_stage(&mut out, cfg, model, &inputs, n_samples)?;
                }
            }
            if cfg.method != Method::MonteCarlo && n_samples > 0 {
                mc_stage(&mut out, cfg, model, &inputs, n_samples)?;
            }
        }
        Command::MellinProduct => {
            mellin_moments(&mut out, cfg, model, &inputs, default_moments(cfg))?;
            if model == BifurcationModel::PitchforkProduct && inputs[1].is_nonnegative() {
                let pdf = product_density_stage(&mut out, cfg, &inputs)?;
                out.report.probabilities.push(Estimate {
                    source: "convolution".into(),
                    value: subcritical_mass(model, pdf.cdf(0.0)),
                    std_error: None,
                    fraction: None,
                });
            }
        }
        Command::Pce => pce_stage(&mut out, cfg, model, &inputs)?,
        Command::Moments => {
            mellin_moments(&mut out, cfg, model, &inputs, default_moments(cfg))?;
            if n_samples > 0 {
                mc_stage(&mut out, cfg, model, &inputs, n_samples)?;
            }
        }
        Command::FitGmm => {
            gmm_stage(&mut out, cfg, model, &inputs)?;
        }
        Command::Reconstruct => reconstruct_stage(&mut out, cfg, model, &inputs)?,
        Command::Ut => ut_stage(&mut out, cfg, model, &inputs)?,
        Command::Mc => {
            if n_samples == 0 {
                return Err(Error::Config("`mc` needs params.n_samples > 0".into()));
            }
            mc_stage(&mut out, cfg, model, &inputs, n_samples)?;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Debug, Parser)]
#[command(name = "bifprob", version, about = "Probability that a random bifurcation is subcritical")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `params.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Points at which to report CDF values, e.g. `-0.15,0,0.05`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eval_cdf: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run the configured method and print the full report.
    Analyze(CommonArgs),
    /// Mellin moments of the product form; product density for two-factor products.
    MellinProduct(CommonArgs),
    /// Polynomial chaos expansion of the Lorenz ratio factor.
    Pce(CommonArgs),
    /// Mellin moments, plus Monte Carlo moments when `n_samples` is set.
    Moments(CommonArgs),
    /// Gaussian-mixture fit to the Mellin moments.
    FitGmm(CommonArgs),
    /// Polynomial density approximant from the Mellin moments.
    Reconstruct(CommonArgs),
    /// Unscented-transform sign probability.
    Ut(CommonArgs),
    /// Monte Carlo sampling of the coefficient.
    Mc(CommonArgs),
}

impl CliCommand {
    fn split(self) -> (Command, CommonArgs) {
        match self {
            CliCommand::Analyze(a) => (Command::Analyze, a),
            CliCommand::MellinProduct(a) => (Command::MellinProduct, a),
            CliCommand::Pce(a) => (Command::Pce, a),
            CliCommand::Moments(a) => (Command::Moments, a),
            CliCommand::FitGmm(a) => (Command::FitGmm, a),
            CliCommand::Reconstruct(a) => (Command::Reconstruct, a),
            CliCommand::Ut(a) => (Command::Ut, a),
            CliCommand::Mc(a) => (Command::Mc, a),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Loads the config, applies flag overrides, runs and persists the result.
pub fn execute(cmd: Command, args: &CommonArgs) -> Result<Outcome> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.params.seed = Some(seed);
    }
    if let Some(points) = &args.eval_cdf {
        cfg.eval_cdf = points.clone();
    }
    let mut out = run(cmd, &cfg)?;
    let dir = args.out.clone().or_else(|| cfg.output_dir.clone());
    if let Some(dir) = dir {
        out.write(&dir)?;
    }
    Ok(out)
}

/// Entry point of the `bifprob` binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let (cmd, args) = cli.command.split();
    match execute(cmd, &args) {
        Ok(out) => {
            print!("{}", out.report.render());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
