//! Config-driven experiments with deterministic JSON and CSV artifacts.
//!
//! A run reads an [`ExperimentConfig`], evaluates every check of the named
//! experiment, and writes `summary.json` plus experiment-specific tables into
//! the output directory. The directory may be overridden with the
//! [`OUTPUT_DIR_ENV`] environment variable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{
    discrete_modnorm, dual_window, expansion_residual, frame_bounds, frame_reconstruct,
    quotient_independence_residual, FrameReport, GaborSystem, QuasiLattice,
};
use crate::group::{Group, GroupSpec};
use crate::io::{
    write_json, write_matrix_csv, write_norm_sweep_csv, write_phase_csv, write_rows_csv,
    MatrixJson, NormSweepRow, SymbolJson,
};
use crate::norms::{
    check_moderate, inclusion_check, mixed_quasi_norm,
    rnorm_subadditivity_residual, wiener_norm, young_admissible, Exponent, Exponents, Weight,
    WindowSet,
};
use crate::operators::{
    convolution_relation_probe, gabor_matrix, gabor_matrix_closed_form, kernel_identity_residual,
    kn_weak_residual, loc_kn_residual, localization_matrix, localization_weak_residual,
    rihaczek_continuity_probe, ConvolutionExponents, ConvolutionWeights, RihaczekExponents,
};
use crate::random::SeededRng;
use crate::signal::{PhaseFunction, Signal};
use crate::spectral::{
    bump_symbol, decay_comparison, eigen_residual, hermitian_eigen, random_hermitian,
};
use crate::tfa::{
    gaussian_window, magic_formula_residual, rihaczek_covariance_residual, stft,
    stft_shift_identity_residual, testfunction_rihaczek, testfunction_stft, TestFunction,
};

/// Overrides `output.dir` when set.
pub const OUTPUT_DIR_ENV: &str = "LCA_TFA_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Identities,
    Frames,
    Norms,
    Locop,
    Decay,
    Young,
    Convrel,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Identities => "identities",
            ExperimentKind::Frames => "frames",
            ExperimentKind::Norms => "norms",
            ExperimentKind::Locop => "locop",
            ExperimentKind::Decay => "decay",
            ExperimentKind::Young => "young",
            ExperimentKind::Convrel => "convrel",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            ExperimentKind::Identities => 50,
            ExperimentKind::Frames | ExperimentKind::Norms => 100,
            ExperimentKind::Locop => 20,
            ExperimentKind::Decay => 500,
            ExperimentKind::Young | ExperimentKind::Convrel => 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Ones,
    Polynomial { s: f64 },
    Exponential { s: f64 },
}

impl WeightSpec {
    pub fn id(&self) -> String {
        match self {
            WeightSpec::Ones => "ones".into(),
            WeightSpec::Polynomial { s } => format!("poly-{s}"),
            WeightSpec::Exponential { s } => format!("exp-{s}"),
        }
    }

    pub fn build(&self, group: &Group) -> Result<Weight> {
        match self {
            WeightSpec::Ones => Ok(Weight::ones(group.phase_len())),
            WeightSpec::Polynomial { s } => Weight::polynomial(group, *s),
            WeightSpec::Exponential { s } => Weight::exponential(group, *s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Unit,
    Canonical,
    DiscreteCanonical,
    Full,
}

impl WindowKind {
    pub fn id(self) -> &'static str {
        match self {
            WindowKind::Unit => "unit",
            WindowKind::Canonical => "canonical",
            WindowKind::DiscreteCanonical => "discrete_canonical",
            WindowKind::Full => "full",
        }
    }

    pub fn build(self, group: &Arc<Group>) -> WindowSet {
        match self {
            WindowKind::Unit => WindowSet::unit(group.clone()),
            WindowKind::Canonical => WindowSet::canonical(group.clone()),
            WindowKind::DiscreteCanonical => WindowSet::discrete_canonical(group.clone()),
            WindowKind::Full => WindowSet::full(group.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("lca-tfa-output")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_output_dir(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesConfig {
    /// Shifts `[x, xi]` whose translates of the canonical lattice are united.
    #[serde(default)]
    pub oversample_shifts: Vec<[usize; 2]>,
    /// Adds `eps * delta_1` to the Gaussian window.
    #[serde(default)]
    pub perturbation: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    /// Sparse symbol file; a bump on a `|K| x |K^perp|` box is used otherwise.
    #[serde(default)]
    pub symbol_path: Option<PathBuf>,
    #[serde(default)]
    pub width_x: Option<usize>,
    #[serde(default)]
    pub width_xi: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    /// Asserted upper bound for the top eigenfunction's percentile.
    #[serde(default)]
    pub percentile_max: Option<f64>,
    /// Number of random-Hermitian control seeds (`seed + i`).
    #[serde(default)]
    pub control_seeds: usize,
    #[serde(default = "default_control_top_k")]
    pub control_top_k: usize,
    #[serde(default = "default_control_band")]
    pub control_band: [f64; 2],
    /// Minimum number of control seeds whose mean percentile lies in the band.
    #[serde(default)]
    pub control_min_in_band: Option<usize>,
}

fn default_gammas() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 1.5, 2.0]
}

fn default_top_k() -> usize {
    4
}

fn default_control_top_k() -> usize {
    16
}

fn default_control_band() -> [f64; 2] {
    [20.0, 80.0]
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            gammas: default_gammas(),
            top_k: default_top_k(),
            percentile_max: None,
            control_seeds: 0,
            control_top_k: default_control_top_k(),
            control_band: default_control_band(),
            control_min_in_band: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvrelConfig {
    #[serde(default = "default_convolution_sets")]
    pub exponents: Vec<ConvolutionExponents>,
    #[serde(default = "default_rihaczek_sets")]
    pub rihaczek: Vec<RihaczekExponents>,
    #[serde(default = "default_stability")]
    pub stability_max: f64,
}

fn default_convolution_sets() -> Vec<ConvolutionExponents> {
    vec![
        ConvolutionExponents::new(1.0, 1.0, 1.0, 2.0, 2.0, 1.0).expect("admissible"),
        ConvolutionExponents::new(0.5, 0.5, 0.5, 1.0, 1.0, 0.5).expect("admissible"),
        ConvolutionExponents::new(1.0, 2.0, 2.0, f64::INFINITY, 2.0, 2.0).expect("admissible"),
    ]
}

fn default_rihaczek_sets() -> Vec<RihaczekExponents> {
    let d = |p| Exponents::diagonal(p).expect("positive");
    vec![
        RihaczekExponents {
            outer: d(2.0),
            first: d(2.0),
            second: d(2.0),
        },
        RihaczekExponents {
            outer: d(1.0),
            first: d(1.0),
            second: d(1.0),
        },
    ]
}

fn default_stability() -> f64 {
    10.0
}

impl Default for ConvrelConfig {
    fn default() -> Self {
        ConvrelConfig {
            exponents: default_convolution_sets(),
            rihaczek: default_rihaczek_sets(),
            stability_max: default_stability(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub group: GroupSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub exponents: Vec<Exponents>,
    #[serde(default)]
    pub weights: Vec<WeightSpec>,
    #[serde(default)]
    pub windows: Vec<WindowKind>,
    /// Per-check tolerance overrides keyed by check id.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub frames: FramesConfig,
    #[serde(default)]
    pub symbol: SymbolConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub convrel: ConvrelConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.group.validate()?;
        for key in self.tolerances.keys() {
            if !CHECKS.iter().any(|c| c.id == key) {
                return Err(Error::ConfigInvalid(format!("unknown tolerance key {key:?}")));
            }
        }
        if let Some(&(_, t)) = self.tolerances.iter().find(|(_, t)| t.is_nan() || **t < 0.0).as_ref() {
            return Err(Error::ConfigInvalid(format!("tolerance must be >= 0, got {t}")));
        }
        if self.trials == Some(0) {
            return Err(Error::ConfigInvalid("trials must be positive".into()));
        }
        for e in &self.convrel.exponents {
            e.validate()?;
        }
        for e in &self.convrel.rihaczek {
            e.validate()?;
        }
        Ok(())
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(self.experiment.default_trials())
    }

    /// `output.dir`, or the value of [`OUTPUT_DIR_ENV`] when set and nonempty.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output.dir.clone(),
        }
    }

    fn tolerance(&self, id: &str) -> f64 {
        self.tolerances
            .get(id)
            .copied()
            .unwrap_or_else(|| check_spec(id).tolerance)
    }
}

/// A registered check: what is computed and its default tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckSpec {
    pub id: &'static str,
    pub experiment: &'static str,
    pub operation: &'static str,
    pub relation: &'static str,
    pub tolerance: f64,
}

pub const CHECKS: &[CheckSpec] = &[
    CheckSpec { id: "commutation", experiment: "identities", operation: "Signal::translate/modulate", relation: "M_xi T_x f = <xi,x> T_x M_xi f", tolerance: 1e-14 },
    CheckSpec { id: "stft-shift", experiment: "identities", operation: "stft_shift_identity_residual", relation: "V_{M_eta T_y g} M_w T_u f = conj<xi-w,u> <eta,x-u> T_(u-y,w-eta) V_g f", tolerance: 1e-12 },
    CheckSpec { id: "rihaczek-covariance", experiment: "identities", operation: "rihaczek_covariance_residual", relation: "R(pi(x)f, pi(y)g) = <eta,x-y> M_J(y-x) T_(x,eta) R(f,g)", tolerance: 1e-12 },
    CheckSpec { id: "gaussian-stft", experiment: "identities", operation: "stft(phi, phi)", relation: "V_phi phi = |K| mass_G chi_(K x K^perp), support exact", tolerance: 1e-13 },
    CheckSpec { id: "testfunction-stft", experiment: "identities", operation: "testfunction_stft", relation: "closed double sum equals stft of materialized test functions", tolerance: 1e-11 },
    CheckSpec { id: "testfunction-rihaczek", experiment: "identities", operation: "testfunction_rihaczek", relation: "covariance expansion equals rihaczek of materialized test functions", tolerance: 1e-11 },
    CheckSpec { id: "moyal", experiment: "identities", operation: "stft", relation: "||V_g f||^2 = ||f||^2 ||g||^2 (relative)", tolerance: 1e-12 },
    CheckSpec { id: "rihaczek-stft-product", experiment: "identities", operation: "magic_formula_residual", relation: "V_R(psi,psi) R(g,f)((x,xi),(w,u)) = conj<xi,u> V_psi g(x,xi+w) conj V_psi f(x+u,xi)", tolerance: 1e-10 },
    CheckSpec { id: "kn-weak-form", experiment: "identities", operation: "kn_weak_residual", relation: "<Op(sigma) f, g> = <sigma, R(g,f)>", tolerance: 1e-11 },
    CheckSpec { id: "kn-kernel", experiment: "identities", operation: "kn_kernel", relation: "<Op(sigma) f, g> = <k_sigma, g (x) conj f>", tolerance: 1e-11 },
    CheckSpec { id: "gabor-matrix-closed-form", experiment: "identities", operation: "gabor_matrix_closed_form", relation: "<Op(sigma) pi(u)g, pi(w)g> = conj<nu,w-u> V_Phi sigma((w,nu), J(u-w))", tolerance: 1e-10 },
    CheckSpec { id: "localization-weak-form", experiment: "identities", operation: "localization_weak_residual", relation: "<A f, g> = <a, conj(V_psi1 f) V_psi2 g>", tolerance: 1e-11 },
    CheckSpec { id: "localization-kn-symbol", experiment: "identities", operation: "loc_to_kn_symbol", relation: "A_a^(psi1,psi2) = Op(a * R(psi2, psi1))", tolerance: 1e-9 },
    CheckSpec { id: "frame-tight", experiment: "frames", operation: "frame_bounds", relation: "chi_K system on D1 x D2 is tight: B/A - 1", tolerance: 1e-10 },
    CheckSpec { id: "frame-constant", experiment: "frames", operation: "frame_bounds", relation: "A = |K| mass_G for the chi_K system", tolerance: 1e-10 },
    CheckSpec { id: "gabor-expansion", experiment: "frames", operation: "expansion_residual", relation: "f = sum <f, pi(w)g> pi(w)h and swapped", tolerance: 1e-10 },
    CheckSpec { id: "missing-coset", experiment: "frames", operation: "frame_bounds", relation: "dropping one time coset yields NotAFrame (1 = reported)", tolerance: 0.0 },
    CheckSpec { id: "frame-reconstruction", experiment: "frames", operation: "frame_reconstruct", relation: "S^-1 C_g^* C_g f = f for a perturbed window", tolerance: 1e-10 },
    CheckSpec { id: "discrete-norm-exactness", experiment: "norms", operation: "wiener_norm", relation: "K = {e}, Q = {e} x Ĝ: ||V_phi f||_W = ||V_phi f||_(L^(p,q))", tolerance: 1e-13 },
    CheckSpec { id: "wiener-dominates", experiment: "norms", operation: "wiener_norm", relation: "||V f||_(L^(p,q)) - ||V f||_W <= 0", tolerance: 0.0 },
    CheckSpec { id: "quotient-independence", experiment: "norms", operation: "quotient_independence_residual", relation: "coset maxima independent of representative", tolerance: 0.0 },
    CheckSpec { id: "localization-hermitian", experiment: "locop", operation: "localization_matrix", relation: "real symbol, equal windows: max |A - A^H|", tolerance: 1e-12 },
    CheckSpec { id: "eigen-residual", experiment: "locop", operation: "hermitian_eigen", relation: "max ||A v - lambda v|| / ||A||", tolerance: 1e-9 },
    CheckSpec { id: "trace", experiment: "locop", operation: "hermitian_eigen", relation: "|sum lambda - tr A| / max(1, |tr A|)", tolerance: 1e-9 },
    CheckSpec { id: "top-percentile", experiment: "decay", operation: "decay_comparison", relation: "percentile of top eigenfunction M^0.5/M^2 among random unit vectors", tolerance: 100.0 },
    CheckSpec { id: "control-in-band", experiment: "decay", operation: "decay_comparison", relation: "control seeds with mean percentile inside the band (shortfall)", tolerance: 0.0 },
    CheckSpec { id: "young", experiment: "young", operation: "young_verify", relation: "max ||F*H||_r / (C ||F||_p ||H||_q) - 1", tolerance: 1e-10 },
    CheckSpec { id: "rnorm-subadditivity", experiment: "young", operation: "rnorm_subadditivity_residual", relation: "||F+H||^r - ||F||^r - ||H||^r (relative)", tolerance: 1e-12 },
    CheckSpec { id: "inclusion", experiment: "young", operation: "inclusion_check", relation: "max ||f||_(M^(p2,q2)) / (C' ||f||_(M^(p1,q1))) - 1", tolerance: 1e-10 },
    CheckSpec { id: "convolution-stability", experiment: "convrel", operation: "convolution_relation_probe", relation: "max / min realized constant per exponent set", tolerance: 10.0 },
    CheckSpec { id: "rihaczek-continuity-finite", experiment: "convrel", operation: "rihaczek_continuity_probe", relation: "realized constants finite (1 = some infinite)", tolerance: 0.0 },
];

fn check_spec(id: &str) -> &'static CheckSpec {
    CHECKS.iter().find(|c| c.id == id).expect("registered check")
}

/// Outcome of one check: `value <= tolerance` passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub group: GroupSpec,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub failures: Vec<String>,
    /// Reported quantities that are not asserted.
    pub observations: BTreeMap<String, f64>,
}

impl Summary {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

struct Recorder<'a> {
    cfg: &'a ExperimentConfig,
    checks: Vec<CheckResult>,
    observations: BTreeMap<String, f64>,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Recorder {
            cfg,
            checks: Vec::new(),
            observations: BTreeMap::new(),
        }
    }

    fn check(&mut self, id: &str, value: f64) {
        let tolerance = self.cfg.tolerance(id);
        self.checks.push(CheckResult {
            id: id.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }

    fn observe(&mut self, key: impl Into<String>, value: f64) {
        self.observations.insert(key.into(), value);
    }

    fn finish(self) -> Summary {
        let failures: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id.clone())
            .collect();
        Summary {
            experiment: self.cfg.experiment.name().into(),
            group: self.cfg.group.clone(),
            seed: self.cfg.seed,
            trials: self.cfg.trials(),
            passed: failures.is_empty(),
            checks: self.checks,
            failures,
            observations: self.observations,
        }
    }
}

/// Runs the configured experiment and writes its artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary> {
    cfg.validate()?;
    let group = Group::new(cfg.group.clone())?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut rec = Recorder::new(cfg);
    match cfg.experiment {
        ExperimentKind::Identities => run_identities(cfg, &group, &dir, &mut rec)?,
        ExperimentKind::Frames => run_frames(cfg, &group, &dir, &mut rec)?,
        ExperimentKind::Norms => run_norms(cfg, &group, &dir, &mut rec)?,
        ExperimentKind::Locop => run_locop(cfg, &group, &dir, &mut rec)?,
        ExperimentKind::Decay => run_decay(cfg, &group, &dir, &mut rec)?,
        ExperimentKind::Young => run_young(cfg, &group, &dir, &mut rec)?,
        ExperimentKind::Convrel => run_convrel(cfg, &group, &dir, &mut rec)?,
    }
    let summary = rec.finish();
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Reads, runs and maps the outcome to an exit code: 0 pass, 2 check failure,
/// 1 configuration or I/O error.
pub fn run_path(path: &Path) -> (i32, std::result::Result<Summary, Error>) {
    match ExperimentConfig::read(path).and_then(|cfg| run(&cfg)) {
        Ok(summary) => (summary.exit_code(), Ok(summary)),
        Err(e) => (1, Err(e)),
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn random_test_function(group: &Group, rng: &mut SeededRng, terms: usize) -> TestFunction {
    TestFunction::new(
        (0..terms)
            .map(|_| {
                (
                    rng.complex(),
                    group.element_at(rng.index(group.order())),
                    group.dual_at(rng.index(group.order())),
                )
            })
            .collect(),
    )
}

/// Residuals of every exact identity on one random instance, in `CHECKS` order.
fn identity_trial(group: &Arc<Group>, seed: u64, trial: usize) -> Result<Vec<(&'static str, f64)>> {
    let mut rng = SeededRng::for_trial(seed, trial as u64);
    let n = group.order();
    let phi = gaussian_window(group);
    let (f, g) = (rng.signal(group), rng.signal(group));
    let (x, xi) = (rng.index(n), rng.index(n));
    let commutation = f
        .translate_idx(x)
        .modulate_idx(xi)
        .max_abs_diff(&f.modulate_idx(xi).translate_idx(x).scale(group.char_idx(xi, x)));
    let pick = |rng: &mut SeededRng| group.element_at(rng.index(n));
    let pick_dual = |rng: &mut SeededRng| group.dual_at(rng.index(n));
    let (u, y, om, et) = (pick(&mut rng), pick(&mut rng), pick_dual(&mut rng), pick_dual(&mut rng));
    let shift = stft_shift_identity_residual(&f, &g, &u, &y, &om, &et)?;
    let covariance = rihaczek_covariance_residual(&f, &g, (&u, &om), (&y, &et))?;

    let (tf, tg) = (random_test_function(group, &mut rng, 3), random_test_function(group, &mut rng, 2));
    let (mf, mg) = (tf.materialize(group)?, tg.materialize(group)?);
    let ts = testfunction_stft(group, &tf, &tg)?.max_abs_diff(&stft(&mf, &mg)?);
    let tr = testfunction_rihaczek(group, &tf, &tg)?.max_abs_diff(&crate::tfa::rihaczek(&mf, &mg)?);

    let energy = stft(&f, &g)?.norm().powi(2);
    let expected = f.norm_sqr() * g.norm_sqr();
    let moyal = (energy - expected).abs() / expected;

    let psi = if trial.is_multiple_of(2) { phi.clone() } else { rng.signal(group) };
    let (ff, gg) = (rng.signal(group), rng.signal(group));
    let product = magic_formula_residual(&psi, &ff, &gg)?;

    let sigma = rng.phase_function(group);
    let (a1, a2) = (rng.signal(group), rng.signal(group));
    let weak = kn_weak_residual(&sigma, &a1, &a2)?;
    let kernel = kernel_identity_residual(&sigma, &a1, &a2)?;
    let points = QuasiLattice::canonical(group.clone()).points().to_vec();
    let closed = gabor_matrix(&sigma, &phi, &points)?
        .max_abs_diff(&gabor_matrix_closed_form(&sigma, &phi, &points)?);

    let a = rng.phase_function(group);
    let (p1, p2) = if trial.is_multiple_of(2) {
        (phi.clone(), phi.clone())
    } else {
        (rng.signal(group), rng.signal(group))
    };
    let loc_weak = localization_weak_residual(&a, &p1, &p2, &a1, &a2)?;
    let loc_kn = loc_kn_residual(&a, &p1, &p2)?;

    Ok(vec![
        ("commutation", commutation),
        ("stft-shift", shift),
        ("rihaczek-covariance", covariance),
        ("testfunction-stft", ts),
        ("testfunction-rihaczek", tr),
        ("moyal", moyal),
        ("rihaczek-stft-product", product),
        ("kn-weak-form", weak),
        ("kn-kernel", kernel),
        ("gabor-matrix-closed-form", closed),
        ("localization-weak-form", loc_weak),
        ("localization-kn-symbol", loc_kn),
    ])
}

/// `max |V_phi phi - |K| mass_G|` on `K x K^perp`, infinite if the support differs.
pub fn gaussian_stft_defect(group: &Arc<Group>) -> Result<f64> {
    let phi = gaussian_window(group);
    let v = stft(&phi, &phi)?;
    let ck = group.subgroup_order() as f64 * group.mass_g();
    let mut worst = 0.0f64;
    for x in 0..group.order() {
        for xi in 0..group.order() {
            let inside = group.in_subgroup(x) && group.in_annihilator(xi);
            let value = v.at(x, xi);
            if inside != (value != Complex64::new(0.0, 0.0)) {
                return Ok(f64::INFINITY);
            }
            if inside {
                worst = worst.max((value - ck).norm());
            }
        }
    }
    Ok(worst)
}

/// Max residual per identity over `trials` seeded instances.
pub fn identity_suite(group: &Arc<Group>, seed: u64, trials: usize) -> Result<Vec<(&'static str, f64)>> {
    let per_trial: Vec<Vec<(&'static str, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| identity_trial(group, seed, t))
        .collect::<Result<_>>()?;
    let mut out: Vec<(&'static str, f64)> = vec![("gaussian-stft", gaussian_stft_defect(group)?)];
    if let Some(first) = per_trial.first() {
        for (k, (id, _)) in first.iter().enumerate() {
            out.push((id, max_of(per_trial.iter().map(|r| r[k].1))));
        }
    }
    Ok(out)
}

fn run_identities(cfg: &ExperimentConfig, group: &Arc<Group>, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let results = identity_suite(group, cfg.seed, cfg.trials())?;
    let mut rows = Vec::new();
    for (id, value) in results {
        rec.check(id, value);
        let tol = cfg.tolerance(id);
        rows.push((id, cfg.trials(), value, tol, value <= tol));
    }
    write_rows_csv(
        &dir.join("identities.csv"),
        &["id", "trials", "max_residual", "tolerance", "passed"],
        &rows,
    )
}

fn run_frames(cfg: &ExperimentConfig, group: &Arc<Group>, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let phi = gaussian_window(group);
    let lattice = QuasiLattice::canonical(group.clone());
    let report = FrameReport::build(&phi, &lattice, cfg.tolerance("frame-tight"))?;
    rec.check("frame-tight", report.upper / report.lower - 1.0);
    let k = group.subgroup_order() as f64 * group.mass_g();
    rec.check("frame-constant", (report.lower - k).abs().max((report.upper - k).abs()));
    write_json(&dir.join("frame_report.json"), &report)?;

    let h = dual_window(&phi, &lattice)?;
    let residuals: Vec<f64> = (0..cfg.trials())
        .into_par_iter()
        .map(|t| {
            let f = SeededRng::for_trial(cfg.seed, t as u64).signal(group);
            let (a, b) = expansion_residual(&f, &phi, &h, &lattice)?;
            Ok(a.max(b))
        })
        .collect::<Result<_>>()?;
    rec.check("gabor-expansion", max_of(residuals.iter().copied()));

    let reps = group.time_representative_indices();
    let dropped = reps.get(1).copied().unwrap_or(reps[0]);
    let missing = QuasiLattice::without_time_coset(group.clone(), dropped);
    let reported = matches!(frame_bounds(&phi, &missing), Err(Error::NotAFrame { .. }));
    rec.check("missing-coset", if reported { 0.0 } else { 1.0 });

    if let Some(eps) = cfg.frames.perturbation {
        let window = &phi + &Signal::delta(group.clone(), 1 % group.order()).scale(Complex64::new(eps, 0.0));
        let sys = GaborSystem::new(lattice.clone(), window.clone())?;
        let worst = (0..cfg.trials())
            .map(|t| {
                let f = SeededRng::for_trial(cfg.seed, t as u64).signal(group);
                Ok(frame_reconstruct(&sys.analysis(&f)?, &window, &lattice)?.max_abs_diff(&f))
            })
            .collect::<Result<Vec<f64>>>()?;
        rec.check("frame-reconstruction", max_of(worst));
        let perturbed = FrameReport::build(&window, &lattice, cfg.tolerance("frame-tight"))?;
        write_json(&dir.join("frame_report_perturbed.json"), &perturbed)?;
    }

    let mut rows = vec![("canonical".to_string(), lattice.len(), lattice.redundancy(), report.lower, report.upper)];
    if !cfg.frames.oversample_shifts.is_empty() {
        let shifts: Vec<(usize, usize)> = cfg
            .frames
            .oversample_shifts
            .iter()
            .map(|[a, b]| (a % group.order(), b % group.order()))
            .collect();
        let over = QuasiLattice::oversampled(group.clone(), &shifts);
        let b = frame_bounds(&phi, &over)?;
        rows.push(("oversampled".into(), over.len(), over.redundancy(), b.lower, b.upper));
        rec.observe("oversampled_redundancy", over.redundancy());
        rec.observe("oversampled_A", b.lower);
        rec.observe("oversampled_B", b.upper);
    }
    write_rows_csv(&dir.join("frames.csv"), &["lattice", "points", "redundancy", "A", "B"], &rows)
}

fn default_exponent_grid() -> Vec<Exponents> {
    let values = [0.5, 1.0, 2.0, f64::INFINITY];
    values
        .iter()
        .flat_map(|&p| values.iter().map(move |&q| Exponents::new(p, q).expect("positive")))
        .collect()
}

fn run_norms(cfg: &ExperimentConfig, group: &Arc<Group>, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let exps = if cfg.exponents.is_empty() { default_exponent_grid() } else { cfg.exponents.clone() };
    let weights = if cfg.weights.is_empty() {
        vec![WeightSpec::Ones, WeightSpec::Polynomial { s: 1.0 }]
    } else {
        cfg.weights.clone()
    };
    let windows = if cfg.windows.is_empty() {
        vec![WindowKind::Unit, WindowKind::Canonical, WindowKind::DiscreteCanonical]
    } else {
        cfg.windows.clone()
    };
    let phi = gaussian_window(group);
    let lattice = QuasiLattice::canonical(group.clone());
    let reference = SeededRng::for_trial(cfg.seed, 0).signal(group);
    let v_ref = stft(&reference, &phi)?;
    let mut sweep = Vec::new();
    for w in &weights {
        let weight = w.build(group)?;
        for kind in &windows {
            let q = kind.build(group);
            for e in &exps {
                sweep.push(NormSweepRow {
                    p: e.p.to_string(),
                    q: e.q.to_string(),
                    weight_id: w.id(),
                    window_id: kind.id().into(),
                    value: wiener_norm(&v_ref, &q, *e, &weight)?,
                });
            }
        }
    }
    write_norm_sweep_csv(&dir.join("norm_sweep.csv"), &sweep)?;

    let ones = Weight::ones(group.phase_len());
    let default_q = WindowSet::default_for(group.clone());
    let trials: Vec<(f64, f64, f64, Vec<f64>)> = (0..cfg.trials())
        .into_par_iter()
        .map(|t| {
            let f = SeededRng::for_trial(cfg.seed, t as u64).signal(group);
            let v = stft(&f, &phi)?;
            let mut exact = 0.0f64;
            let mut dominance = f64::NEG_INFINITY;
            let mut ratios = Vec::new();
            for e in &exps {
                let plain = mixed_quasi_norm(&v, *e, &ones)?;
                let wien = wiener_norm(&v, &default_q, *e, &ones)?;
                exact = exact.max((wien - plain).abs() / (1.0 + plain));
                dominance = dominance.max(plain - wien);
                let disc = discrete_modnorm(&f, &phi, &lattice, *e, &ones)?;
                ratios.push(disc / wien);
            }
            Ok((exact, dominance, quotient_independence_residual(&f, &phi)?, ratios))
        })
        .collect::<Result<_>>()?;
    if group.subgroup_order() == 1 {
        rec.check("discrete-norm-exactness", max_of(trials.iter().map(|t| t.0)));
    } else {
        rec.observe("plain_vs_wiener_max_relative_gap", max_of(trials.iter().map(|t| t.0)));
    }
    rec.check("wiener-dominates", trials.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max).max(0.0));
    rec.check("quotient-independence", max_of(trials.iter().map(|t| t.2)));
    let mut rows = Vec::new();
    for (k, e) in exps.iter().enumerate() {
        let lo = trials.iter().map(|t| t.3[k]).fold(f64::INFINITY, f64::min);
        let hi = trials.iter().map(|t| t.3[k]).fold(0.0, f64::max);
        rows.push((e.p.to_string(), e.q.to_string(), lo, hi));
    }
    write_rows_csv(
        &dir.join("discrete_ratio.csv"),
        &["p", "q", "min_discrete_over_modulation", "max_discrete_over_modulation"],
        &rows,
    )
}

fn symbol_from_config(cfg: &ExperimentConfig, group: &Arc<Group>) -> Result<PhaseFunction> {
    match &cfg.symbol.symbol_path {
        Some(path) => SymbolJson::read(path)?.to_phase_function(group),
        None => Ok(bump_symbol(
            group,
            cfg.symbol.width_x.unwrap_or(group.subgroup_order()),
            cfg.symbol.width_xi.unwrap_or(group.annihilator_order()),
        )),
    }
}

fn run_locop(cfg: &ExperimentConfig, group: &Arc<Group>, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let phi = gaussian_window(group);
    let a = symbol_from_config(cfg, group)?;
    let m = localization_matrix(&a, &phi, &phi)?;
    let real_symbol = a.values().iter().all(|v| v.im == 0.0);
    if real_symbol {
        rec.check("localization-hermitian", m.hermitian_defect());
    }
    rec.check("localization-kn-symbol", loc_kn_residual(&a, &phi, &phi)?);
    let weak: Vec<f64> = (0..cfg.trials())
        .map(|t| {
            let mut rng = SeededRng::for_trial(cfg.seed, t as u64);
            localization_weak_residual(&a, &phi, &phi, &rng.signal(group), &rng.signal(group))
        })
        .collect::<Result<_>>()?;
    rec.check("localization-weak-form", max_of(weak));
    write_phase_csv(&dir.join("symbol.csv"), &a)?;
    write_matrix_csv(&dir.join("operator.csv"), &m)?;
    write_json(&dir.join("operator.json"), &MatrixJson::from(&m))?;
    if real_symbol {
        let pairs = hermitian_eigen(&m)?;
        let scale = m.norm().max(f64::MIN_POSITIVE);
        rec.check("eigen-residual", eigen_residual(&m, &pairs)? / scale);
        let sum: f64 = pairs.iter().map(|p| p.value).sum();
        let tr = m.trace().re;
        rec.check("trace", (sum - tr).abs() / tr.abs().max(1.0));
        let rows: Vec<(usize, f64)> = pairs.iter().map(|p| p.value).enumerate().collect();
        write_rows_csv(&dir.join("eigenvalues.csv"), &["index", "value"], &rows)?;
    }
    Ok(())
}

fn run_decay(cfg: &ExperimentConfig, group: &Arc<Group>, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let phi = gaussian_window(group);
    let a = symbol_from_config(cfg, group)?;
    let m = localization_matrix(&a, &phi, &phi)?;
    let d = &cfg.decay;
    let report = decay_comparison(&m, &phi, &d.gammas, cfg.trials(), cfg.seed, d.top_k)?;
    write_json(&dir.join("decay_report.json"), &report)?;
    if let Some(limit) = d.percentile_max {
        let id = "top-percentile";
        let tolerance = cfg.tolerances.get(id).copied().unwrap_or(limit);
        let value = report.percentiles[0];
        rec.checks.push(CheckResult { id: id.into(), value, tolerance, passed: value <= tolerance });
    } else {
        rec.observe("top_percentile", report.percentiles[0]);
    }
    if d.control_seeds > 0 {
        let controls: Vec<(u64, f64, f64)> = (0..d.control_seeds as u64)
            .map(|i| {
                let seed = cfg.seed.wrapping_add(i);
                let h = random_hermitian(group, &mut SeededRng::new(seed));
                let r = decay_comparison(&h, &phi, &[], cfg.trials(), seed, d.control_top_k)?;
                Ok((seed, r.percentiles[0], r.mean_percentile()))
            })
            .collect::<Result<_>>()?;
        let [lo, hi] = d.control_band;
        let in_band = controls.iter().filter(|c| c.2 >= lo && c.2 <= hi).count();
        rec.observe("control_in_band", in_band as f64);
        if let Some(min) = d.control_min_in_band {
            rec.check("control-in-band", min.saturating_sub(in_band) as f64);
        }
        write_rows_csv(
            &dir.join("control.csv"),
            &["seed", "top_percentile", "mean_top_k_percentile"],
            &controls,
        )?;
    }
    Ok(())
}

/// Exponents `1, 4/3, 2, 4, inf` and every admissible Young triple among them.
pub fn young_grid() -> Vec<(Exponent, Exponent, Exponent)> {
    let values = [1.0, 4.0 / 3.0, 2.0, 4.0, f64::INFINITY];
    let mut out = Vec::new();
    for &a in &values {
        for &b in &values {
            let (a, b) = (Exponent::new(a).expect("positive"), Exponent::new(b).expect("positive"));
            let rc = a.reciprocal() + b.reciprocal() - 1.0;
            if rc < -1e-12 {
                continue;
            }
            let c = Exponent::from_reciprocal(rc.max(0.0)).expect("nonnegative");
            if young_admissible(a, b, c) {
                out.push((a, b, c));
            }
        }
    }
    out
}

fn run_young(cfg: &ExperimentConfig, group: &Arc<Group>, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let weights = if cfg.weights.is_empty() {
        vec![WeightSpec::Ones, WeightSpec::Polynomial { s: 1.0 }]
    } else {
        cfg.weights.clone()
    };
    let grid = young_grid();
    let mut rows: Vec<(String, String, f64, usize)> = Vec::new();
    let mut young_worst = 0.0f64;
    let mut rnorm_worst = f64::NEG_INFINITY;
    let mut incl_worst = 0.0f64;
    for spec in &weights {
        let m = spec.build(group)?;
        let constant = check_moderate(group, &m, &m)?;
        let per_trial: Vec<(f64, usize, f64, f64)> = (0..cfg.trials())
            .into_par_iter()
            .map(|t| {
                let mut rng = SeededRng::for_trial(cfg.seed, t as u64);
                let (f, h) = (rng.phase_function(group), rng.phase_function(group));
                let conv = f.convolve(&h)?;
                let mut worst = 0.0f64;
                let mut violations = 0;
                for &(p1, q1, r1) in &grid {
                    for &(p2, q2, r2) in &grid {
                        let lhs = mixed_quasi_norm(&conv, Exponents { p: r1, q: r2 }, &m)?;
                        let rhs = constant
                            * mixed_quasi_norm(&f, Exponents { p: p1, q: p2 }, &m)?
                            * mixed_quasi_norm(&h, Exponents { p: q1, q: q2 }, &m)?;
                        worst = worst.max(lhs / rhs - 1.0);
                        violations += usize::from(lhs > rhs * (1.0 + 1e-10));
                    }
                }
                let mut rn = f64::NEG_INFINITY;
                for p in [0.5, 1.0, 2.0] {
                    for q in [0.5, 1.0, 2.0] {
                        let e = Exponents::new(p, q)?;
                        let scale = mixed_quasi_norm(&f, e, &m)?.powf(e.r())
                            + mixed_quasi_norm(&h, e, &m)?.powf(e.r());
                        rn = rn.max(rnorm_subadditivity_residual(&f, &h, e, &m)? / scale);
                    }
                }
                let sig = rng.signal(group);
                let phi = gaussian_window(group);
                let q = WindowSet::default_for(group.clone());
                let ones = Weight::ones(group.phase_len());
                let mut incl = 0.0f64;
                let values = [0.5, 1.0, 2.0, f64::INFINITY];
                for &p1 in &values {
                    for &p2 in values.iter().filter(|&&v| v >= p1) {
                        let small = Exponents::new(p1, p1)?;
                        let large = Exponents::new(p2, p2)?;
                        let chk = inclusion_check(&sig, &phi, small, large, &m, &ones, &q)?;
                        incl = incl.max(chk.ratio() - 1.0);
                    }
                }
                Ok((worst, violations, rn, incl))
            })
            .collect::<Result<_>>()?;
        let worst = per_trial.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        let violations: usize = per_trial.iter().map(|t| t.1).sum();
        let rn = per_trial.iter().map(|t| t.2).fold(f64::NEG_INFINITY, f64::max);
        let incl = per_trial.iter().map(|t| t.3).fold(f64::NEG_INFINITY, f64::max);
        rows.push(("young".into(), spec.id(), worst, violations));
        rows.push(("rnorm".into(), spec.id(), rn, usize::from(rn > 1e-12)));
        rows.push(("inclusion".into(), spec.id(), incl, usize::from(incl > 1e-10)));
        rec.observe(format!("moderateness_{}", spec.id()), constant);
        young_worst = young_worst.max(worst);
        rnorm_worst = rnorm_worst.max(rn);
        incl_worst = incl_worst.max(incl);
    }
    rec.check("young", young_worst.max(0.0));
    rec.check("rnorm-subadditivity", rnorm_worst.max(0.0));
    rec.check("inclusion", incl_worst.max(0.0));
    rec.observe("young_grid_size", grid.len() as f64);
    write_rows_csv(
        &dir.join("inequalities.csv"),
        &["inequality", "weight_id", "max_excess", "violations"],
        &rows,
    )
}

fn run_convrel(cfg: &ExperimentConfig, group: &Arc<Group>, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let weights = ConvolutionWeights::unweighted(group);
    let mut rows = Vec::new();
    let mut stability = 0.0f64;
    for (k, e) in cfg.convrel.exponents.iter().enumerate() {
        let ratios: Vec<f64> = (0..cfg.trials())
            .into_par_iter()
            .map(|t| {
                let mut rng = SeededRng::for_trial(cfg.seed, t as u64);
                Ok(convolution_relation_probe(&rng.signal(group), &rng.signal(group), *e, &weights)?.ratio())
            })
            .collect::<Result<_>>()?;
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let s = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        stability = stability.max(s);
        rows.push((format!("convolution-{k}"), serde_json::to_string(e)?, lo, hi, s));
    }
    let tolerance = cfg
        .tolerances
        .get("convolution-stability")
        .copied()
        .unwrap_or(cfg.convrel.stability_max);
    rec.checks.push(CheckResult {
        id: "convolution-stability".into(),
        value: stability,
        tolerance,
        passed: stability <= tolerance,
    });
    let v = Weight::ones(group.phase_len());
    let mut infinite = false;
    let trials = cfg.trials().min(50);
    for (k, e) in cfg.convrel.rihaczek.iter().enumerate() {
        let ratios: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = SeededRng::for_trial(cfg.seed, t as u64);
                Ok(rihaczek_continuity_probe(&rng.signal(group), &rng.signal(group), *e, &v)?.ratio())
            })
            .collect::<Result<_>>()?;
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        infinite |= !hi.is_finite();
        rows.push((format!("rihaczek-{k}"), serde_json::to_string(e)?, lo, hi, hi / lo));
    }
    rec.check("rihaczek-continuity-finite", if infinite { 1.0 } else { 0.0 });
    write_rows_csv(
        &dir.join("realized_constants.csv"),
        &["probe", "exponents", "min_constant", "max_constant", "max_over_min"],
        &rows,
    )
}

/// `id, experiment, operation, tolerance, relation` for every registered check.
pub fn identity_table() -> String {
    let mut out = format!("{:<28} {:<11} {:<32} {:>9}  {}\n", "id", "experiment", "operation", "tolerance", "relation");
    for c in CHECKS {
        out.push_str(&format!(
            "{:<28} {:<11} {:<32} {:>9.0e}  {}\n",
            c.id, c.experiment, c.operation, c.tolerance, c.relation
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_json(text)
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(config(r#"{"experiment":"frames","group":{"factors":[4],"subgroup_divisors":[3]}}"#).is_err());
        assert!(config(r#"{"experiment":"frames","group":{"factors":[4],"subgroup_divisors":[2]},"bogus":1}"#).is_err());
        assert!(config(r#"{"experiment":"nope","group":{"factors":[4],"subgroup_divisors":[2]}}"#).is_err());
        assert!(config(r#"{"experiment":"frames","group":{"factors":[4],"subgroup_divisors":[2]},"tolerances":{"nope":1}}"#).is_err());
        assert!(config(r#"{"experiment":"frames","group":{"factors":[4],"subgroup_divisors":[2]},"trials":0}"#).is_err());
        let ok = config(r#"{"experiment":"norms","group":{"factors":[4],"subgroup_divisors":[2]},"exponents":[{"p":0.5,"q":"inf"}],"weights":[{"kind":"polynomial","s":1}]}"#).unwrap();
        assert_eq!(ok.trials(), 100);
        assert_eq!(ok.weights[0].id(), "poly-1");
    }

    #[test]
    fn registry_is_complete() {
        assert!(CHECKS.len() >= 12);
        let mut ids: Vec<&str> = CHECKS.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
        assert!(identity_table().contains("rihaczek-stft-product"));
        assert!(identity_table().contains("localization-kn-symbol"));
    }

    #[test]
    fn young_grid_is_admissible() {
        let grid = young_grid();
        assert_eq!(grid.len(), 15);
        assert!(grid.iter().all(|&(a, b, c)| young_admissible(a, b, c)));
    }
}
