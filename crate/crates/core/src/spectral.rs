//! Hermitian eigendecomposition by cyclic Jacobi rotations, and measurement
//! of eigenfunction time-frequency concentration through modulation-norm
//! ratios.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::matrix::OperatorMatrix;
use crate::norms::{mixed_quasi_norm, maximal_function, Exponents, Weight, WindowSet};
use crate::random::SeededRng;
use crate::signal::{PhaseFunction, Signal};
use crate::tfa::{require_window, stft};

const SWEEP_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-10;
/// Exponent whose ratio `M^gamma / M^2` ranks eigenfunctions against random vectors.
pub const REFERENCE_GAMMA: f64 = 0.5;
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Signal,
}

/// Full spectrum of a Hermitian matrix, ordered by decreasing `|lambda|`.
/// Each vector has unit `L^2` norm and its first non-negligible component is
/// real positive.
pub fn hermitian_eigen(m: &OperatorMatrix) -> Result<Vec<EigenPair>> {
    let scale = m.norm();
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { defect });
    }
    let n = m.dim();
    let mut a: Vec<Complex64> = m.entries().to_vec();
    for i in 0..n {
        for j in 0..i {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a, n) <= SWEEP_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let group = m.group().clone();
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let column = (0..n).map(|i| v[i * n + k]).collect();
            EigenPair {
                value: a[k * n + k].re,
                vector: fix_phase(Signal::new(group.clone(), column).expect("dimension")),
            }
        })
        .collect();
    pairs.sort_by(|x, y| y.value.abs().total_cmp(&x.value.abs()));
    Ok(pairs)
}

fn off_diagonal(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided rotation annihilating `a[p][q]`: a diagonal phase makes the
/// pivot real, then a real Jacobi rotation diagonalizes the block.
fn rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = phase.conj();
    // W = [[c, s], [-s e, c e]] acting on columns p, q.
    let (wpp, wpq, wqp, wqq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0), -e * s, e * c);
    for k in 0..n {
        let (akp, akq) = (a[k * n + p], a[k * n + q]);
        a[k * n + p] = akp * wpp + akq * wqp;
        a[k * n + q] = akp * wpq + akq * wqq;
        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
        v[k * n + p] = vkp * wpp + vkq * wqp;
        v[k * n + q] = vkp * wpq + vkq * wqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[p * n + k], a[q * n + k]);
        a[p * n + k] = wpp.conj() * apk + wqp.conj() * aqk;
        a[q * n + k] = wpq.conj() * apk + wqq.conj() * aqk;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
}

fn fix_phase(vector: Signal) -> Signal {
    let unit = vector.normalized().expect("eigenvector columns are nonzero");
    let peak = unit.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    match unit.values().iter().find(|v| v.norm() > 1e-8 * peak) {
        Some(first) => unit.scale(first.conj() / first.norm()),
        None => unit,
    }
}

/// `max_i ||A v_i - lambda_i v_i||`.
pub fn eigen_residual(m: &OperatorMatrix, pairs: &[EigenPair]) -> Result<f64> {
    let mut worst = 0.0f64;
    for pair in pairs {
        let av = m.apply(&pair.vector)?;
        worst = worst.max((&av - &pair.vector.scale(Complex64::new(pair.value, 0.0))).norm());
    }
    Ok(worst)
}

/// `max |A - V diag(lambda) V^H|` entrywise.
pub fn reconstruction_residual(m: &OperatorMatrix, pairs: &[EigenPair]) -> f64 {
    let n = m.dim();
    let mass = m.group().mass_g();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s: Complex64 = pairs
                .iter()
                .map(|p| p.vector.at(i) * p.vector.at(j).conj() * p.value * mass)
                .sum();
            worst = worst.max((s - m.at(i, j)).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub gamma: f64,
    pub norm: f64,
    pub ratio: f64,
}

/// `M^gamma` norms of a unit vector and their ratios to `M^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    pub entries: Vec<ProfileEntry>,
}

impl DecayProfile {
    pub fn ratio_at(&self, gamma: f64) -> Option<f64> {
        self.entries.iter().find(|e| e.gamma == gamma).map(|e| e.ratio)
    }
}

/// Modulation norms `M^{gamma,gamma}` with unit weight and the default window set.
pub fn decay_profile(f: &Signal, g: &Signal, gammas: &[f64]) -> Result<DecayProfile> {
    require_window(g)?;
    let group = f.group();
    let q = WindowSet::default_for(group.clone());
    let maximal = maximal_function(&stft(f, g)?, &q)?;
    profile_from_maximal(&maximal, gammas)
}

fn profile_from_maximal(maximal: &PhaseFunction, gammas: &[f64]) -> Result<DecayProfile> {
    let w = Weight::ones(maximal.group().phase_len());
    let base = mixed_quasi_norm(maximal, Exponents::diagonal(2.0)?, &w)?;
    let entries = gammas
        .iter()
        .map(|&gamma| {
            let norm = mixed_quasi_norm(maximal, Exponents::diagonal(gamma)?, &w)?;
            Ok(ProfileEntry {
                gamma,
                norm,
                ratio: if base > 0.0 { norm / base } else { f64::NAN },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayProfile { entries })
}

/// `M^{0.5} / M^2` for the default window set.
pub fn reference_ratio(f: &Signal, g: &Signal) -> Result<f64> {
    let profile = decay_profile(f, g, &[REFERENCE_GAMMA])?;
    Ok(profile.entries[0].ratio)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub eigenvalues: Vec<f64>,
    pub profiles: Vec<Vec<ProfileEntry>>,
    pub percentiles: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub top_eigenvalue_tied: bool,
}

impl DecayReport {
    pub fn mean_percentile(&self) -> f64 {
        self.percentiles.iter().sum::<f64>() / self.percentiles.len() as f64
    }
}

/// Reference ratios of `trials` Haar-random unit vectors, trial `t` drawn
/// from stream `t` of `seed`.
pub fn random_baseline(group: &Arc<Group>, g: &Signal, trials: usize, seed: u64) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = SeededRng::for_trial(seed, t as u64).unit_signal(group);
            reference_ratio(&f, g)
        })
        .collect()
}

/// Percentage of `baseline` entries at or below `value`.
pub fn percentile(baseline: &[f64], value: f64) -> f64 {
    100.0 * baseline.iter().filter(|b| **b <= value).count() as f64 / baseline.len() as f64
}

/// Ranks the top `top_k` eigenfunctions of `a` against random unit vectors.
pub fn decay_comparison(
    a: &OperatorMatrix,
    g: &Signal,
    gammas: &[f64],
    trials: usize,
    seed: u64,
    top_k: usize,
) -> Result<DecayReport> {
    require_window(g)?;
    let pairs = hermitian_eigen(a)?;
    let top = pairs.first().map(|p| p.value.abs()).unwrap_or(0.0);
    if top <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateSpectrum(top));
    }
    let tied = pairs
        .get(1)
        .is_some_and(|p| (p.value.abs() - top).abs() <= 1e-10 * top);
    let baseline = random_baseline(a.group(), g, trials, seed)?;
    let mut with_reference: Vec<f64> = gammas.to_vec();
    if !with_reference.contains(&REFERENCE_GAMMA) {
        with_reference.push(REFERENCE_GAMMA);
    }
    let q = WindowSet::default_for(a.group().clone());
    let mut profiles = Vec::new();
    let mut percentiles = Vec::new();
    for pair in pairs.iter().take(top_k.max(1)) {
        let maximal = maximal_function(&stft(&pair.vector, g)?, &q)?;
        let profile = profile_from_maximal(&maximal, &with_reference)?;
        let reference = profile.ratio_at(REFERENCE_GAMMA).expect("reference present");
        percentiles.push(percentile(&baseline, reference));
        profiles.push(
            profile
                .entries
                .into_iter()
                .filter(|e| gammas.contains(&e.gamma))
                .collect(),
        );
    }
    Ok(DecayReport {
        eigenvalues: pairs.iter().map(|p| p.value).collect(),
        profiles,
        percentiles,
        seed,
        trials,
        top_eigenvalue_tied: tied,
    })
}

/// `cos^2` taper on `width` consecutive residues centred at 0.
fn taper(t: usize, n: usize, width: usize) -> f64 {
    let signed = if t >= n.div_ceil(2) { t as i64 - n as i64 } else { t as i64 };
    let lo = -((width / 2) as i64);
    let hi = lo + width as i64 - 1;
    if signed < lo || signed > hi {
        0.0
    } else {
        (std::f64::consts::PI * signed as f64 / (width as f64 + 1.0)).cos().powi(2)
    }
}

/// Smooth bump on the box of `width_x` time residues by `width_xi`
/// frequency residues around the origin in every factor, peak value 1.
pub fn bump_symbol(group: &Arc<Group>, width_x: usize, width_xi: usize) -> PhaseFunction {
    let factors = group.factors().to_vec();
    let profile = |idx: usize, width: usize| -> f64 {
        group
            .digits(idx)
            .iter()
            .zip(&factors)
            .map(|(&t, &n)| taper(t, n, width.min(n)))
            .product()
    };
    PhaseFunction::from_fn(group.clone(), |x, xi| {
        Complex64::new(profile(x, width_x) * profile(xi, width_xi), 0.0)
    })
}

/// `(X + X^H) / 2` with standard complex normal `X`.
pub fn random_hermitian(group: &Arc<Group>, rng: &mut SeededRng) -> OperatorMatrix {
    let n = group.order();
    let x = rng.complex_vec(n * n);
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = (x[i * n + j] + x[j * n + i].conj()) * 0.5;
        }
    }
    OperatorMatrix::new(group.clone(), entries).expect("dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;
    use crate::tfa::gaussian_window;

    #[test]
    fn identity_and_diagonal() {
        let g = make_group(&[4], &[1]).unwrap();
        let pairs = hermitian_eigen(&OperatorMatrix::identity(g.clone())).unwrap();
        assert!(pairs.iter().all(|p| p.value == 1.0));
        let h = make_group(&[3], &[1]).unwrap();
        let pairs = hermitian_eigen(&OperatorMatrix::diagonal(h, &[1.0, 2.0, 3.0])).unwrap();
        let values: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        assert_eq!(values, vec![3.0, 2.0, 1.0]);
        assert_eq!(pairs[0].vector.at(2), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let g = make_group(&[2], &[1]).unwrap();
        let mut m = OperatorMatrix::identity(g);
        m.set(0, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn random_hermitian_decomposition() {
        let g = make_group(&[12], &[1]).unwrap();
        let mut rng = SeededRng::new(21);
        for _ in 0..5 {
            let m = random_hermitian(&g, &mut rng);
            let pairs = hermitian_eigen(&m).unwrap();
            let scale = m.norm();
            assert!(eigen_residual(&m, &pairs).unwrap() <= 1e-9 * scale);
            assert!(reconstruction_residual(&m, &pairs) <= 1e-9 * scale);
            let sum: f64 = pairs.iter().map(|p| p.value).sum();
            assert!((sum - m.trace().re).abs() <= 1e-9 * m.trace().re.abs().max(1.0));
            assert!(pairs.windows(2).all(|w| w[0].value.abs() >= w[1].value.abs()));
            for p in &pairs {
                assert!((p.vector.norm() - 1.0).abs() < 1e-12);
                let first = p.vector.values().iter().find(|v| v.norm() > 1e-8).unwrap();
                assert!(first.im.abs() < 1e-15 && first.re > 0.0);
            }
        }
    }

    #[test]
    fn flat_vector_profile_closed_form() {
        let n = 16usize;
        let g = make_group(&[n], &[n]).unwrap();
        let flat = Signal::from_fn(g.clone(), |_| Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
        let delta = gaussian_window(&g);
        let gammas = [0.5, 1.0, 1.5, 2.0];
        let profile = decay_profile(&flat, &delta, &gammas).unwrap();
        for e in &profile.entries {
            let expected = (n as f64).powf(1.0 / e.gamma - 0.5);
            assert!((e.ratio - expected).abs() <= 1e-12 * expected);
        }
        assert!((profile.ratio_at(2.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn profile_is_monotone() {
        let g = make_group(&[16], &[4]).unwrap();
        let phi = gaussian_window(&g);
        let mut rng = SeededRng::new(22);
        let gammas = [0.25, 0.5, 1.0, 1.5, 2.0];
        for _ in 0..10 {
            let f = rng.unit_signal(&g);
            let p = decay_profile(&f, &phi, &gammas).unwrap();
            assert!(p.entries.windows(2).all(|w| w[0].norm >= w[1].norm * (1.0 - 1e-12)));
            assert!(p.entries.iter().all(|e| e.ratio >= 1.0 - 1e-12));
        }
    }

    #[test]
    fn concentrated_vector_has_minimal_ratio() {
        let g = make_group(&[16], &[4]).unwrap();
        let phi = gaussian_window(&g);
        let unit_phi = phi.normalized().unwrap();
        for x in 0..16 {
            for xi in [0, 3, 7] {
                let f = unit_phi.tf_shift_idx(x, xi);
                let r = reference_ratio(&f, &phi).unwrap();
                assert!((r - 1.0).abs() < 1e-12, "{x} {xi} {r}");
            }
        }
    }

    #[test]
    fn comparison_rejects_zero_operator() {
        let g = make_group(&[4], &[2]).unwrap();
        let phi = gaussian_window(&g);
        let zero = OperatorMatrix::zeros(g.clone());
        assert!(matches!(
            decay_comparison(&zero, &phi, &[0.5], 10, 1, 1),
            Err(Error::DegenerateSpectrum(_))
        ));
        let report = decay_comparison(&OperatorMatrix::identity(g), &phi, &[0.5], 10, 1, 1).unwrap();
        assert!(report.top_eigenvalue_tied);
    }
}
