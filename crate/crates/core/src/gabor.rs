//! Quasi-lattices in phase space, Gabor systems, frame operators, frame
//! bounds, dual windows and the quotient coefficient operator.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::matrix::OperatorMatrix;
use crate::norms::{mixed_norm_grid, Exponents, Weight};
use crate::signal::Signal;
use crate::spectral::hermitian_eigen;
use crate::tfa::{stft, stft_at};

/// Relative lower-bound threshold separating frames from rank deficiency.
pub const FRAME_TOL: f64 = 1e-10;

/// A finite set of phase-space points `(w, mu)` stored as index pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiLattice {
    group: Arc<Group>,
    points: Vec<(usize, usize)>,
}

impl QuasiLattice {
    /// `D1 x D2`, time representatives outer and frequency representatives inner.
    pub fn canonical(group: Arc<Group>) -> Self {
        let d2 = group.frequency_representative_indices();
        let points = group
            .time_representative_indices()
            .into_iter()
            .flat_map(|w| d2.iter().map(move |&mu| (w, mu)))
            .collect();
        QuasiLattice { group, points }
    }

    /// Every point of `G x Ĝ`.
    pub fn full(group: Arc<Group>) -> Self {
        let n = group.order();
        let points = (0..n).flat_map(|x| (0..n).map(move |xi| (x, xi))).collect();
        QuasiLattice { group, points }
    }

    pub fn from_points(group: Arc<Group>, points: Vec<(usize, usize)>) -> Result<Self> {
        let n = group.order();
        if let Some(&(x, xi)) = points.iter().find(|(x, xi)| *x >= n || *xi >= n) {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: x.max(xi),
            });
        }
        Ok(QuasiLattice { group, points })
    }

    /// The canonical lattice with every point over time representative `w` removed.
    pub fn without_time_coset(group: Arc<Group>, w: usize) -> Self {
        let mut lattice = Self::canonical(group);
        lattice.points.retain(|&(x, _)| x != w);
        lattice
    }

    /// `Lambda' = union_s (Lambda + s)` in first-seen order.
    pub fn oversampled(group: Arc<Group>, shifts: &[(usize, usize)]) -> Self {
        let base = Self::canonical(group.clone());
        let mut seen = vec![false; group.phase_len()];
        let mut points = Vec::new();
        for &(sx, sxi) in shifts {
            for &(w, mu) in &base.points {
                let p = (group.add_idx(w, sx), group.add_idx(mu, sxi));
                let key = group.phase_index(p.0, p.1);
                if !seen[key] {
                    seen[key] = true;
                    points.push(p);
                }
            }
        }
        QuasiLattice { group, points }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `|Lambda| / |G|`.
    pub fn redundancy(&self) -> f64 {
        self.points.len() as f64 / self.group.order() as f64
    }

    /// Whether the translates `w + K x K^perp` tile phase space exactly once.
    pub fn is_partition(&self) -> bool {
        let group = &self.group;
        let k = group.subgroup_indices();
        let kp = group.annihilator_indices();
        let mut hits = vec![0u32; group.phase_len()];
        for &(w, mu) in &self.points {
            for &a in &k {
                for &b in &kp {
                    hits[group.phase_index(group.add_idx(w, a), group.add_idx(mu, b))] += 1;
                }
            }
        }
        hits.iter().all(|&h| h == 1)
    }
}

/// The family `{ pi(w) g : w in Lambda }`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaborSystem {
    pub lattice: QuasiLattice,
    pub window: Signal,
}

impl GaborSystem {
    pub fn new(lattice: QuasiLattice, window: Signal) -> Result<Self> {
        lattice.group.ensure_same(window.group())?;
        Ok(GaborSystem { lattice, window })
    }

    /// `c_w = <f, pi(w) g> = V_g f(w)`.
    pub fn analysis(&self, f: &Signal) -> Result<Vec<Complex64>> {
        self.lattice.group.ensure_same(f.group())?;
        Ok(self
            .lattice
            .points
            .par_iter()
            .map(|&(w, mu)| stft_at(f, &self.window, w, mu))
            .collect())
    }

    /// `sum_w c_w pi(w) g`, accumulated in lattice order.
    pub fn synthesis(&self, c: &[Complex64]) -> Result<Signal> {
        synthesize(&self.lattice, &self.window, c)
    }
}

fn synthesize(lattice: &QuasiLattice, h: &Signal, c: &[Complex64]) -> Result<Signal> {
    if c.len() != lattice.len() {
        return Err(Error::LengthMismatch {
            expected: lattice.len(),
            actual: c.len(),
        });
    }
    let group = &lattice.group;
    group.ensure_same(h.group())?;
    let mut out = vec![Complex64::new(0.0, 0.0); group.order()];
    for (&(w, mu), &cw) in lattice.points.iter().zip(c) {
        if cw == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (x, o) in out.iter_mut().enumerate() {
            *o += cw * group.char_idx(mu, x) * h.at(group.sub_idx(x, w));
        }
    }
    Signal::new(group.clone(), out)
}

/// Matrix of `f -> sum_w <f, pi(w) g> pi(w) h`.
pub fn frame_operator(h: &Signal, g: &Signal, lattice: &QuasiLattice) -> Result<OperatorMatrix> {
    lattice.group.ensure_same(h.group())?;
    let analysis = GaborSystem::new(lattice.clone(), g.clone())?;
    let group = lattice.group.clone();
    let columns: Vec<Result<Signal>> = (0..group.order())
        .into_par_iter()
        .map(|y| synthesize(lattice, h, &analysis.analysis(&Signal::delta(group.clone(), y))?))
        .collect();
    let n = group.order();
    let mut m = OperatorMatrix::zeros(group);
    for (y, col) in columns.into_iter().enumerate() {
        let col = col?;
        for x in 0..n {
            m.set(x, y, col.at(x));
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameBounds {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
}

impl FrameBounds {
    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }

    pub fn is_tight(&self, tol: f64) -> bool {
        self.condition() - 1.0 <= tol
    }
}

/// Extreme eigenvalues of `S_{g,g}`; `NotAFrame` when `A <= FRAME_TOL * B`.
pub fn frame_bounds(g: &Signal, lattice: &QuasiLattice) -> Result<FrameBounds> {
    let pairs = frame_spectrum(g, lattice)?;
    let lower = pairs.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let upper = pairs.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    Ok(FrameBounds { lower, upper })
}

/// Eigendecomposition of `S_{g,g}`, failing with `NotAFrame` on rank deficiency.
fn frame_spectrum(g: &Signal, lattice: &QuasiLattice) -> Result<Vec<crate::spectral::EigenPair>> {
    let pairs = hermitian_eigen(&frame_operator(g, g, lattice)?)?;
    let upper = pairs.iter().map(|p| p.value).fold(0.0, f64::max);
    let lower = pairs.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    if lower <= FRAME_TOL * upper || upper <= 0.0 {
        return Err(Error::NotAFrame { lower, upper });
    }
    Ok(pairs)
}

fn apply_inverse(pairs: &[crate::spectral::EigenPair], f: &Signal) -> Result<Signal> {
    let mut out = Signal::zeros(f.group().clone());
    for p in pairs {
        out = &out + &p.vector.scale(f.inner(&p.vector)? / p.value);
    }
    Ok(out)
}

/// `h = S_{g,g}^{-1} g`, accepted only if `S_{h,g} = S_{g,h} = I` within `1e-10`.
///
/// On a lattice that is not a subgroup, `S_{g,g}` need not commute with the
/// lattice shifts and such an `h` may not exist; use [`frame_reconstruct`]
/// for exact recovery in that case.
pub fn dual_window(g: &Signal, lattice: &QuasiLattice) -> Result<Signal> {
    let h = apply_inverse(&frame_spectrum(g, lattice)?, g)?;
    let residual = duality_residual(g, &h, lattice)?;
    if residual > 1e-10 {
        return Err(Error::NoGaborDual { residual });
    }
    Ok(h)
}

/// `S_{g,g}^{-1} sum_w c_w pi(w) g`: recovery with the canonical dual frame.
pub fn frame_reconstruct(c: &[Complex64], g: &Signal, lattice: &QuasiLattice) -> Result<Signal> {
    apply_inverse(&frame_spectrum(g, lattice)?, &synthesize(lattice, g, c)?)
}

/// `||sum <f, pi(w) g> pi(w) h - f||` and the same with `g`, `h` swapped.
pub fn expansion_residual(
    f: &Signal,
    g: &Signal,
    h: &Signal,
    lattice: &QuasiLattice,
) -> Result<(f64, f64)> {
    let one = synthesize(lattice, h, &GaborSystem::new(lattice.clone(), g.clone())?.analysis(f)?)?;
    let two = synthesize(lattice, g, &GaborSystem::new(lattice.clone(), h.clone())?.analysis(f)?)?;
    Ok(((&one - f).norm(), (&two - f).norm()))
}

/// Max entry of `|S_{h,g} - I|` and `|S_{g,h} - I|`.
pub fn duality_residual(g: &Signal, h: &Signal, lattice: &QuasiLattice) -> Result<f64> {
    let id = OperatorMatrix::identity(lattice.group.clone());
    let a = frame_operator(h, g, lattice)?.max_abs_diff(&id);
    let b = frame_operator(g, h, lattice)?.max_abs_diff(&id);
    Ok(a.max(b))
}

/// `l^{p,q}_m` quasi-norm of `(V_g f(w))_w` with unit point masses: inner sum
/// over time points sharing a frequency, outer sum over frequencies.
pub fn discrete_modnorm(
    f: &Signal,
    g: &Signal,
    lattice: &QuasiLattice,
    e: Exponents,
    m: &Weight,
) -> Result<f64> {
    let group = &lattice.group;
    if m.len() != group.phase_len() {
        return Err(Error::LengthMismatch {
            expected: group.phase_len(),
            actual: m.len(),
        });
    }
    let coeffs = GaborSystem::new(lattice.clone(), g.clone())?.analysis(f)?;
    let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (&(w, mu), c) in lattice.points.iter().zip(&coeffs) {
        rows.entry(mu)
            .or_default()
            .push(c.norm() * m.at(group.phase_index(w, mu)));
    }
    let rows: Vec<Vec<f64>> = rows.into_values().collect();
    Ok(mixed_norm_grid(&rows, 1.0, 1.0, Exponents::new(e.p.value(), e.q.value())?))
}

/// `max_{z in K x K^perp} |V_g f(w + z)|` for each point of the canonical lattice.
pub fn quotient_coefficients(f: &Signal, g: &Signal) -> Result<Vec<f64>> {
    let group = f.group();
    let v = stft(f, g)?.abs();
    let lattice = QuasiLattice::canonical(group.clone());
    Ok(lattice
        .points
        .iter()
        .map(|&(w, mu)| coset_max(group, &v, w, mu))
        .collect())
}

fn coset_max(group: &Group, abs: &[f64], w: usize, mu: usize) -> f64 {
    let mut best = 0.0f64;
    for a in group.subgroup_indices() {
        for b in group.annihilator_indices() {
            best = best.max(abs[group.phase_index(group.add_idx(w, a), group.add_idx(mu, b))]);
        }
    }
    best
}

/// Largest deviation of the quotient coefficient when each canonical
/// representative is replaced by every other member of its coset.
pub fn quotient_independence_residual(f: &Signal, g: &Signal) -> Result<f64> {
    let group = f.group();
    let v = stft(f, g)?.abs();
    let lattice = QuasiLattice::canonical(group.clone());
    let mut worst = 0.0f64;
    for &(w, mu) in &lattice.points {
        let reference = coset_max(group, &v, w, mu);
        for a in group.subgroup_indices() {
            for b in group.annihilator_indices() {
                let other = coset_max(group, &v, group.add_idx(w, a), group.add_idx(mu, b));
                worst = worst.max((other - reference).abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub tight: bool,
    pub redundancy: f64,
    /// `None` when no Gabor-structured dual exists on the lattice.
    pub dual_window: Option<crate::io::SignalJson>,
}

impl FrameReport {
    pub fn build(g: &Signal, lattice: &QuasiLattice, tight_tol: f64) -> Result<Self> {
        let bounds = frame_bounds(g, lattice)?;
        let dual = match dual_window(g, lattice) {
            Ok(h) => Some(crate::io::SignalJson::from(&h)),
            Err(Error::NoGaborDual { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(FrameReport {
            lower: bounds.lower,
            upper: bounds.upper,
            tight: bounds.is_tight(tight_tol),
            redundancy: lattice.redundancy(),
            dual_window: dual,
        })
    }
}
