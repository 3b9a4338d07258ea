//! Weights, weighted mixed quasi-norms on phase space, maximal functions,
//! Wiener amalgam norms and modulation quasi-norms.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::signal::{PhaseFunction, Signal};
use crate::tfa::{gaussian_window, require_window, stft};

/// A Lebesgue exponent in `(0, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::NonPositiveExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// `1/p`, zero for `p = inf`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if r == 0.0 {
            Ok(Exponent::Infinite)
        } else {
            Exponent::new(1.0 / r)
        }
    }

    fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) => Exponent::new(p),
            Exponent::Infinite => Ok(self),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Number(p) => p,
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
            Raw::Text(t) => return Err(serde::de::Error::custom(format!("bad exponent {t:?}"))),
        };
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// The pair `(p, q)`: `p` acts on the time variable, `q` on frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: Exponent,
    pub q: Exponent,
}

impl Exponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        Ok(Exponents {
            p: Exponent::new(p)?,
            q: Exponent::new(q)?,
        })
    }

    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    /// `r = min(1, p, q)`.
    pub fn r(&self) -> f64 {
        1f64.min(self.p.value()).min(self.q.value())
    }

    fn validate(self) -> Result<Self> {
        Ok(Exponents {
            p: self.p.validate()?,
            q: self.q.validate()?,
        })
    }
}

impl fmt::Display for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A strictly positive weight on a finite index set, usually `G x Ĝ` in
/// x-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    values: Vec<f64>,
}

impl Weight {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(Weight { values })
        } else {
            Err(Error::NonPositiveWeight)
        }
    }

    pub fn ones(len: usize) -> Self {
        Weight { values: vec![1.0; len] }
    }

    /// `(1 + |x| + |xi|)^s` with the cyclic word length `|x| = sum_j min(x_j, N_j - x_j)`.
    pub fn polynomial(group: &Group, s: f64) -> Result<Self> {
        Self::new(phase_lengths(group).map(|l| (1.0 + l).powf(s)).collect())
    }

    /// `exp(s (|x| + |xi|))`.
    pub fn exponential(group: &Group, s: f64) -> Result<Self> {
        Self::new(phase_lengths(group).map(|l| (s * l).exp()).collect())
    }

    /// `w(x, xi) = a(x) b(xi)`.
    pub fn tensor(group: &Group, a: &[f64], b: &[f64]) -> Result<Self> {
        check_len(group.order(), a.len())?;
        check_len(group.order(), b.len())?;
        let n = group.order();
        Self::new((0..n * n).map(|i| a[i / n] * b[i % n]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn reciprocal(&self) -> Weight {
        Weight {
            values: self.values.iter().map(|v| 1.0 / v).collect(),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Tight constant `C` with `other <= C * self`.
    pub fn domination_constant(&self, other: &Weight) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(other
            .values
            .iter()
            .zip(&self.values)
            .map(|(o, s)| o / s)
            .fold(0.0, f64::max))
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

fn word_length(group: &Group, idx: usize) -> f64 {
    group
        .digits(idx)
        .iter()
        .zip(group.factors())
        .map(|(&r, &n)| r.min(n - r) as f64)
        .sum()
}

fn phase_lengths(group: &Group) -> impl Iterator<Item = f64> + '_ {
    let n = group.order();
    (0..n * n).map(move |i| word_length(group, i / n) + word_length(group, i % n))
}

/// Exhaustive check of `v(a + b) <= v(a) v(b)` over phase space.
pub fn check_submultiplicative(group: &Group, v: &Weight) -> Result<bool> {
    check_len(group.phase_len(), v.len())?;
    let len = group.phase_len();
    Ok((0..len).all(|a| {
        (0..len).all(|b| v.at(group.phase_add(a, b)) <= v.at(a) * v.at(b) * (1.0 + 1e-12))
    }))
}

/// Tight moderateness constant `C = max m(a + b) / (v(a) m(b))`.
pub fn check_moderate(group: &Group, m: &Weight, v: &Weight) -> Result<f64> {
    check_len(group.phase_len(), m.len())?;
    check_len(group.phase_len(), v.len())?;
    let len = group.phase_len();
    Ok((0..len)
        .flat_map(|a| (0..len).map(move |b| (a, b)))
        .map(|(a, b)| m.at(group.phase_add(a, b)) / (v.at(a) * m.at(b)))
        .fold(0.0, f64::max))
}

/// `(sum_i mass a_i^p)^{1/p}`, or `max a_i` for `p = inf`. Zero entries are skipped.
fn lp(values: impl Iterator<Item = f64>, mass: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => values.fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let s: f64 = values.filter(|a| *a > 0.0).map(|a| mass * a.powf(p)).sum();
            if s == 0.0 {
                0.0
            } else {
                s.powf(1.0 / p)
            }
        }
    }
}

/// Mixed norm of a nonnegative array indexed `[outer][inner]`: inner `L^p`
/// with `inner_mass` per point, outer `L^q` with `outer_mass` per point.
pub fn mixed_norm_grid(
    rows: &[Vec<f64>],
    inner_mass: f64,
    outer_mass: f64,
    e: Exponents,
) -> f64 {
    let inner: Vec<f64> = rows
        .iter()
        .map(|row| lp(row.iter().cloned(), inner_mass, e.p))
        .collect();
    lp(inner.into_iter(), outer_mass, e.q)
}

/// Regroups a nonnegative phase-space array into rows indexed by `xi`.
fn frequency_rows(group: &Group, values: impl Fn(usize) -> f64) -> Vec<Vec<f64>> {
    let n = group.order();
    (0..n)
        .map(|xi| (0..n).map(|x| values(group.phase_index(x, xi))).collect())
        .collect()
}

/// `(sum_xi mass_dual (sum_x mass_G |F m|^p)^{q/p})^{1/q}`.
pub fn mixed_quasi_norm(f: &PhaseFunction, e: Exponents, m: &Weight) -> Result<f64> {
    let e = e.validate()?;
    let group = f.group();
    check_len(group.phase_len(), m.len())?;
    let rows = frequency_rows(group, |i| f.values()[i].norm() * m.at(i));
    Ok(mixed_norm_grid(&rows, group.mass_g(), group.mass_dual(), e))
}

/// `||F + H||^r - ||F||^r - ||H||^r` with `r = min(1, p, q)`.
pub fn rnorm_subadditivity_residual(
    f: &PhaseFunction,
    h: &PhaseFunction,
    e: Exponents,
    m: &Weight,
) -> Result<f64> {
    f.group().ensure_same(h.group())?;
    let r = e.r();
    let sum = mixed_quasi_norm(&(f + h), e, m)?;
    Ok(sum.powf(r) - mixed_quasi_norm(f, e, m)?.powf(r) - mixed_quasi_norm(h, e, m)?.powf(r))
}

/// A set of phase-space offsets containing the unit.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSet {
    group: Arc<Group>,
    offsets: Vec<usize>,
}

impl WindowSet {
    /// Offsets given as phase-space indices `phase_index(x, xi)`.
    pub fn from_indices(group: Arc<Group>, mut offsets: Vec<usize>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::EmptyWindow);
        }
        offsets.sort_unstable();
        offsets.dedup();
        if let Some(&bad) = offsets.iter().find(|&&i| i >= group.phase_len()) {
            return Err(Error::LengthMismatch {
                expected: group.phase_len(),
                actual: bad,
            });
        }
        if offsets[0] != 0 {
            return Err(Error::WindowMissingUnit);
        }
        Ok(WindowSet { group, offsets })
    }

    pub fn from_points(group: Arc<Group>, points: &[(usize, usize)]) -> Result<Self> {
        let idx = points.iter().map(|&(x, xi)| group.phase_index(x, xi)).collect();
        Self::from_indices(group, idx)
    }

    pub fn unit(group: Arc<Group>) -> Self {
        WindowSet { group, offsets: vec![0] }
    }

    pub fn full(group: Arc<Group>) -> Self {
        let offsets = (0..group.phase_len()).collect();
        WindowSet { group, offsets }
    }

    /// `U = K x K^perp`.
    pub fn canonical(group: Arc<Group>) -> Self {
        let ann = group.annihilator_indices();
        let mut offsets: Vec<usize> = group
            .subgroup_indices()
            .into_iter()
            .flat_map(|x| ann.iter().map(move |&xi| (x, xi)))
            .map(|(x, xi)| group.phase_index(x, xi))
            .collect();
        offsets.sort_unstable();
        WindowSet { group, offsets }
    }

    /// `{e} x Ĝ`.
    pub fn discrete_canonical(group: Arc<Group>) -> Self {
        let offsets = (0..group.order()).map(|xi| group.phase_index(0, xi)).collect();
        WindowSet { group, offsets }
    }

    /// `{e} x Ĝ` when `K = {e}`, otherwise `K x K^perp`.
    pub fn default_for(group: Arc<Group>) -> Self {
        if group.subgroup_order() == 1 {
            Self::discrete_canonical(group)
        } else {
            Self::canonical(group)
        }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn is_subset_of(&self, other: &WindowSet) -> bool {
        self.offsets.iter().all(|o| other.offsets.binary_search(o).is_ok())
    }
}

/// `(M_Q F)(z) = max_{q in Q} |F(z + q)|`.
pub fn maximal_function(f: &PhaseFunction, q: &WindowSet) -> Result<PhaseFunction> {
    f.group().ensure_same(&q.group)?;
    PhaseFunction::new(f.group().clone(), maximal_values(f, q))
}

fn maximal_values(f: &PhaseFunction, q: &WindowSet) -> Vec<Complex64> {
    let group = f.group();
    let abs = f.abs();
    (0..group.phase_len())
        .map(|z| {
            let m = q
                .offsets
                .iter()
                .map(|&o| abs[group.phase_add(z, o)])
                .fold(0.0, f64::max);
            Complex64::new(m, 0.0)
        })
        .collect()
}

/// Mixed quasi-norm of the maximal function.
pub fn wiener_norm(f: &PhaseFunction, q: &WindowSet, e: Exponents, m: &Weight) -> Result<f64> {
    mixed_quasi_norm(&maximal_function(f, q)?, e, m)
}

/// `||V_g f||_{W(L^inf, L^{p,q}_m)}`.
pub fn modulation_norm(
    f: &Signal,
    g: &Signal,
    e: Exponents,
    m: &Weight,
    q: &WindowSet,
) -> Result<f64> {
    require_window(g)?;
    wiener_norm(&stft(f, g)?, q, e, m)
}

/// Modulation norm with the Gaussian window and the default window set.
pub fn modulation_norm_default(f: &Signal, e: Exponents, m: &Weight) -> Result<f64> {
    let group = f.group();
    modulation_norm(
        f,
        &gaussian_window(group),
        e,
        m,
        &WindowSet::default_for(group.clone()),
    )
}

/// Outcome of a numerical inequality `lhs <= constant * rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
}

impl InequalityCheck {
    /// `lhs / (constant * rhs)`, zero when both sides vanish.
    pub fn ratio(&self) -> f64 {
        let bound = self.constant * self.rhs;
        if bound == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / bound
        }
    }

    /// Multiplicative slack `1 + slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.constant * self.rhs * (1.0 + slack)
    }
}

/// `||f||_{M^{p2,q2}_{m2}} <= C' ||f||_{M^{p1,q1}_{m1}}` for `p1 <= p2`, `q1 <= q2`,
/// with `C' = max(m2/m1) mass_G^{1/p2 - 1/p1} mass_dual^{1/q2 - 1/q1}`.
pub fn inclusion_check(
    f: &Signal,
    g: &Signal,
    small: Exponents,
    large: Exponents,
    m1: &Weight,
    m2: &Weight,
    q: &WindowSet,
) -> Result<InequalityCheck> {
    if small.p.value() > large.p.value() || small.q.value() > large.q.value() {
        return Err(Error::InadmissibleExponents(format!(
            "inclusion needs {small} <= {large} componentwise"
        )));
    }
    let group = f.group();
    let constant = m1.domination_constant(m2)?
        * group.mass_g().powf(large.p.reciprocal() - small.p.reciprocal())
        * group.mass_dual().powf(large.q.reciprocal() - small.q.reciprocal());
    let v = stft(f, g)?;
    let maximal = maximal_function(&v, q)?;
    Ok(InequalityCheck {
        lhs: mixed_quasi_norm(&maximal, large, m2)?,
        rhs: mixed_quasi_norm(&maximal, small, m1)?,
        constant,
    })
}

/// `1/a + 1/b = 1 + 1/c` with all exponents in `[1, inf]`.
pub fn young_admissible(a: Exponent, b: Exponent, c: Exponent) -> bool {
    let ok = |e: Exponent| e.value() >= 1.0;
    ok(a) && ok(b) && ok(c) && (a.reciprocal() + b.reciprocal() - 1.0 - c.reciprocal()).abs() < 1e-12
}

/// Mixed-norm Young inequality on phase space:
/// `||F * H||_{L^{r1,r2}_m} <= C ||F||_{L^{p1,p2}_m} ||H||_{L^{q1,q2}_v}` where
/// `C` is the moderateness constant of `m` with respect to `v`.
pub fn young_verify(
    f: &PhaseFunction,
    h: &PhaseFunction,
    p: Exponents,
    q: Exponents,
    r: Exponents,
    m: &Weight,
    v: &Weight,
) -> Result<InequalityCheck> {
    if !young_admissible(p.p, q.p, r.p) || !young_admissible(p.q, q.q, r.q) {
        return Err(Error::InadmissibleExponents(format!(
            "1/p + 1/q = 1 + 1/r fails for p={p}, q={q}, r={r}"
        )));
    }
    let group = f.group();
    let constant = check_moderate(group, m, v)?;
    Ok(InequalityCheck {
        lhs: mixed_quasi_norm(&f.convolve(h)?, r, m)?,
        rhs: mixed_quasi_norm(f, p, m)? * mixed_quasi_norm(h, q, v)?,
        constant,
    })
}
