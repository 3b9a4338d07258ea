//! Kohn-Nirenberg operators and kernels, Gabor matrices, localization
//! operators, and numerical probes of the Rihaczek continuity and
//! convolution estimates for modulation spaces.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::matrix::OperatorMatrix;
use crate::norms::{modulation_norm, Exponent, Exponents, InequalityCheck, Weight, WindowSet};
use crate::signal::{PhaseFunction, Signal};
use crate::tfa::{gaussian_circ, gaussian_window, rihaczek, stft, stft_at};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(Op(sigma) f)(x) = sum_xi mass_dual sigma(x, xi) f^(xi) <xi, x>`.
pub fn kn_apply(sigma: &PhaseFunction, f: &Signal) -> Result<Signal> {
    sigma.group().ensure_same(f.group())?;
    let group = f.group();
    let fh = f.fourier();
    let n = group.order();
    let md = group.mass_dual();
    Ok(Signal::from_fn(group.clone(), |x| {
        (0..n)
            .map(|xi| sigma.at(x, xi) * fh.at(xi) * group.char_idx(xi, x))
            .sum::<Complex64>()
            * md
    }))
}

pub fn kn_matrix(sigma: &PhaseFunction) -> OperatorMatrix {
    OperatorMatrix::from_linear_map(sigma.group().clone(), |f| {
        kn_apply(sigma, f).expect("same group")
    })
}

/// `|<Op(sigma) f, g> - <sigma, R(g, f)>|` with the phase-space pairing.
pub fn kn_weak_residual(sigma: &PhaseFunction, f: &Signal, g: &Signal) -> Result<f64> {
    let lhs = kn_apply(sigma, f)?.inner(g)?;
    let rhs = sigma.inner(&rihaczek(g, f)?)?;
    Ok((lhs - rhs).norm())
}

/// An integral kernel on `G x G`, x-major: `(Tf)(x) = sum_u mass_G k(x, u) f(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    group: Arc<Group>,
    values: Vec<Complex64>,
}

impl Kernel {
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x: usize, u: usize) -> Complex64 {
        self.values[x * self.group.order() + u]
    }

    /// `<k, g (x) conj f>` over `G x G` with mass `mass_G^2` per point.
    pub fn pair(&self, f: &Signal, g: &Signal) -> Result<Complex64> {
        self.group.ensure_same(f.group())?;
        self.group.ensure_same(g.group())?;
        let n = self.group.order();
        let m = self.group.mass_g();
        let mut s = ZERO;
        for x in 0..n {
            for u in 0..n {
                s += self.at(x, u) * g.at(x).conj() * f.at(u);
            }
        }
        Ok(s * m * m)
    }

    pub fn to_matrix(&self) -> OperatorMatrix {
        let m = self.group.mass_g();
        OperatorMatrix::new(
            self.group.clone(),
            self.values.iter().map(|v| v * m).collect(),
        )
        .expect("dimension")
    }
}

/// `k(x, u) = sum_xi mass_dual sigma(x, xi) conj<xi, u - x>`.
pub fn kn_kernel(sigma: &PhaseFunction) -> Kernel {
    let group = sigma.group().clone();
    let n = group.order();
    let md = group.mass_dual();
    let values = (0..n * n)
        .map(|i| {
            let (x, u) = (i / n, i % n);
            let d = group.sub_idx(u, x);
            (0..n)
                .map(|xi| sigma.at(x, xi) * group.char_idx(xi, d).conj())
                .sum::<Complex64>()
                * md
        })
        .collect();
    Kernel { group, values }
}

/// `|<Op(sigma) f, g> - <k_sigma, g (x) conj f>|`.
pub fn kernel_identity_residual(sigma: &PhaseFunction, f: &Signal, g: &Signal) -> Result<f64> {
    let lhs = kn_apply(sigma, f)?.inner(g)?;
    Ok((lhs - kn_kernel(sigma).pair(f, g)?).norm())
}

/// `[M]_{w,u} = <Op(sigma) pi(u) g, pi(w) g>` for `w, u` in `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaborMatrix {
    pub points: Vec<(usize, usize)>,
    pub entries: Vec<Complex64>,
}

impl GaborMatrix {
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.points.len() + col]
    }

    pub fn max_abs_diff(&self, other: &GaborMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn conj_transpose(&self) -> GaborMatrix {
        let k = self.points.len();
        GaborMatrix {
            points: self.points.clone(),
            entries: (0..k * k).map(|i| self.at(i % k, i / k).conj()).collect(),
        }
    }
}

/// Gabor matrix by applying `Op(sigma)` to each `pi(u) g`.
pub fn gabor_matrix(
    sigma: &PhaseFunction,
    g: &Signal,
    points: &[(usize, usize)],
) -> Result<GaborMatrix> {
    gabor_matrix_of(&kn_matrix(sigma), g, points)
}

/// Gabor matrix of an assembled operator.
pub fn gabor_matrix_of(
    op: &OperatorMatrix,
    g: &Signal,
    points: &[(usize, usize)],
) -> Result<GaborMatrix> {
    let shifted: Vec<Signal> = points.iter().map(|&(x, xi)| g.tf_shift_idx(x, xi)).collect();
    let images: Vec<Signal> = shifted.iter().map(|s| op.apply(s)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(points.len() * points.len());
    for row in &shifted {
        for image in &images {
            entries.push(image.inner(row)?);
        }
    }
    Ok(GaborMatrix {
        points: points.to_vec(),
        entries,
    })
}

/// Closed form `[M]_{(w,mu),(u,nu)} = conj<nu, w - u> V_Phi sigma((w, nu), J((u,nu) - (w,mu)))`
/// with `Phi = R(g, g)` and the outer STFT taken on `G x Ĝ`.
pub fn gabor_matrix_closed_form(
    sigma: &PhaseFunction,
    g: &Signal,
    points: &[(usize, usize)],
) -> Result<GaborMatrix> {
    sigma.group().ensure_same(g.group())?;
    let group = g.group();
    let phase = group.phase_space();
    let window = rihaczek(g, g)?.to_signal_on(&phase)?;
    let target = sigma.to_signal_on(&phase)?;
    let mut entries = Vec::with_capacity(points.len() * points.len());
    for &(w, mu) in points {
        for &(u, nu) in points {
            let z = group.phase_index(w, nu);
            let zeta = group.phase_index(group.sub_idx(mu, nu), group.sub_idx(u, w));
            entries.push(
                group.char_idx(nu, group.sub_idx(w, u)).conj() * stft_at(&target, &window, z, zeta),
            );
        }
    }
    Ok(GaborMatrix {
        points: points.to_vec(),
        entries,
    })
}

/// `A f = sum_{u,w} mass_G mass_dual a(u,w) V_psi1 f(u,w) pi(u,w) psi2`.
pub fn localization_apply(
    a: &PhaseFunction,
    psi1: &Signal,
    psi2: &Signal,
    f: &Signal,
) -> Result<Signal> {
    a.group().ensure_same(f.group())?;
    a.group().ensure_same(psi1.group())?;
    a.group().ensure_same(psi2.group())?;
    let group = f.group();
    let n = group.order();
    let v = stft(f, psi1)?;
    let mass = group.mass_g() * group.mass_dual();
    let mut out = vec![ZERO; n];
    for u in 0..n {
        for omega in 0..n {
            let c = a.at(u, omega) * v.at(u, omega);
            if c == ZERO {
                continue;
            }
            let c = c * mass;
            for (x, o) in out.iter_mut().enumerate() {
                *o += c * group.char_idx(omega, x) * psi2.at(group.sub_idx(x, u));
            }
        }
    }
    Signal::new(group.clone(), out)
}

pub fn localization_matrix(a: &PhaseFunction, psi1: &Signal, psi2: &Signal) -> Result<OperatorMatrix> {
    a.group().ensure_same(psi1.group())?;
    a.group().ensure_same(psi2.group())?;
    Ok(OperatorMatrix::from_linear_map(a.group().clone(), |f| {
        localization_apply(a, psi1, psi2, f).expect("same group")
    }))
}

/// `|<A f, g> - <a, conj(V_psi1 f) V_psi2 g>|`.
pub fn localization_weak_residual(
    a: &PhaseFunction,
    psi1: &Signal,
    psi2: &Signal,
    f: &Signal,
    g: &Signal,
) -> Result<f64> {
    let lhs = localization_apply(a, psi1, psi2, f)?.inner(g)?;
    let h = stft(f, psi1)?.conj().mul(&stft(g, psi2)?)?;
    Ok((lhs - a.inner(&h)?).norm())
}

/// `a * R(psi2, psi1)`, the Kohn-Nirenberg symbol of the localization operator.
pub fn loc_to_kn_symbol(a: &PhaseFunction, psi2: &Signal, psi1: &Signal) -> Result<PhaseFunction> {
    a.convolve(&rihaczek(psi2, psi1)?)
}

/// Max entry of `|A - Op(a * R(psi2, psi1))|` over the assembled matrices.
pub fn loc_kn_residual(a: &PhaseFunction, psi1: &Signal, psi2: &Signal) -> Result<f64> {
    let loc = localization_matrix(a, psi1, psi2)?;
    let kn = kn_matrix(&loc_to_kn_symbol(a, psi2, psi1)?);
    Ok(loc.max_abs_diff(&kn))
}

/// Exponents `(p, q)` of the Rihaczek distribution and `(p1, q1)`, `(p2, q2)`
/// of its two arguments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RihaczekExponents {
    pub outer: Exponents,
    pub first: Exponents,
    pub second: Exponents,
}

impl RihaczekExponents {
    pub fn validate(&self) -> Result<()> {
        let q = self.outer.q.value();
        let all = [self.first.p, self.first.q, self.second.p, self.second.q];
        if all.iter().any(|e| e.value() > q) {
            return Err(Error::InadmissibleExponents(format!(
                "p_i, q_i must not exceed q = {}",
                self.outer.q
            )));
        }
        let lhs = (self.first.p.reciprocal() + self.second.p.reciprocal())
            .min(self.first.q.reciprocal() + self.second.q.reciprocal());
        if lhs < self.outer.p.reciprocal() + self.outer.q.reciprocal() - 1e-12 {
            return Err(Error::InadmissibleExponents(
                "min(1/p1 + 1/p2, 1/q1 + 1/q2) < 1/p + 1/q".into(),
            ));
        }
        Ok(())
    }
}

/// `||R(g, f)||_{M^{p,q}_{1 (x) v o J^-1}}` against `||g||_{M^{p1,q1}_v} ||f||_{M^{p2,q2}_v}`.
/// The outer norm lives on `G x Ĝ` with window `R(phi, phi)`; the inner
/// norms use `phi`. The constant is reported as 1; `ratio()` is the realized one.
pub fn rihaczek_continuity_probe(
    g: &Signal,
    f: &Signal,
    e: RihaczekExponents,
    v: &Weight,
) -> Result<InequalityCheck> {
    e.validate()?;
    let group = f.group();
    let phase = group.phase_space();
    let phi = gaussian_window(group);
    let n = group.order();
    let big_n = phase.order();
    let lifted = Weight::new(
        (0..big_n * big_n)
            .map(|i| {
                let (omega, u) = (i % big_n / n, i % big_n % n);
                v.at(group.phase_index(u, group.neg_idx(omega)))
            })
            .collect(),
    )?;
    let window = rihaczek(&phi, &phi)?.to_signal_on(&phase)?;
    let lhs = modulation_norm(
        &rihaczek(g, f)?.to_signal_on(&phase)?,
        &window,
        e.outer,
        &lifted,
        &WindowSet::default_for(phase.clone()),
    )?;
    let q = WindowSet::default_for(group.clone());
    let rhs = modulation_norm(g, &phi, e.first, v, &q)? * modulation_norm(f, &phi, e.second, v, &q)?;
    Ok(InequalityCheck { lhs, rhs, constant: 1.0 })
}

/// Exponents of the convolution relation
/// `M^{p,u} * M^{q,t} -> M^{r,gamma}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionExponents {
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub u: Exponent,
    pub t: Exponent,
    pub gamma: Exponent,
}

impl ConvolutionExponents {
    pub fn new(p: f64, q: f64, r: f64, u: f64, t: f64, gamma: f64) -> Result<Self> {
        let e = ConvolutionExponents {
            p: Exponent::new(p)?,
            q: Exponent::new(q)?,
            r: Exponent::new(r)?,
            u: Exponent::new(u)?,
            t: Exponent::new(t)?,
            gamma: Exponent::new(gamma)?,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        if !close(self.u.reciprocal() + self.t.reciprocal(), self.gamma.reciprocal()) {
            return Err(Error::InadmissibleExponents("1/u + 1/t != 1/gamma".into()));
        }
        let r = self.r.value();
        let ok = if r >= 1.0 {
            close(
                self.p.reciprocal() + self.q.reciprocal(),
                1.0 + self.r.reciprocal(),
            )
        } else {
            self.p == self.r && self.q == self.r
        };
        if !ok {
            return Err(Error::InadmissibleExponents(
                "need 1/p + 1/q = 1 + 1/r for r >= 1, or p = q = r for r < 1".into(),
            ));
        }
        Ok(())
    }
}

/// Weights of the convolution relation: `m` on phase space, `v` its
/// submultiplicative control, `nu` on `Ĝ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionWeights {
    pub m: Weight,
    pub v: Weight,
    pub nu: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn unweighted(group: &Group) -> Self {
        ConvolutionWeights {
            m: Weight::ones(group.phase_len()),
            v: Weight::ones(group.phase_len()),
            nu: vec![1.0; group.order()],
        }
    }

    /// `(m1 (x) nu, v1 (x) v2 / nu)` with `m1 = m(., ê)`, `v1 = v(., ê)`, `v2 = v(e, .)`.
    pub fn factor_weights(&self, group: &Group) -> Result<(Weight, Weight)> {
        let n = group.order();
        let m1: Vec<f64> = (0..n).map(|x| self.m.at(group.phase_index(x, 0))).collect();
        let v1: Vec<f64> = (0..n).map(|x| self.v.at(group.phase_index(x, 0))).collect();
        let v2nu: Vec<f64> = (0..n)
            .map(|xi| self.v.at(group.phase_index(0, xi)) / self.nu[xi])
            .collect();
        Ok((
            Weight::tensor(group, &m1, &self.nu)?,
            Weight::tensor(group, &v1, &v2nu)?,
        ))
    }
}

/// `||f * g||_{M^{r,gamma}_m}` (window `phi * phi`) against
/// `||f||_{M^{p,u}_{m1 (x) nu}} ||g||_{M^{q,t}_{v1 (x) v2/nu}}` (window `phi`).
pub fn convolution_relation_probe(
    f: &Signal,
    g: &Signal,
    e: ConvolutionExponents,
    w: &ConvolutionWeights,
) -> Result<InequalityCheck> {
    e.validate()?;
    let group = f.group();
    let phi = gaussian_window(group);
    let q = WindowSet::default_for(group.clone());
    let (left, right) = w.factor_weights(group)?;
    let lhs = modulation_norm(
        &f.convolve(g)?,
        &gaussian_circ(group),
        Exponents { p: e.r, q: e.gamma },
        &w.m,
        &q,
    )?;
    let rhs = modulation_norm(f, &phi, Exponents { p: e.p, q: e.u }, &left, &q)?
        * modulation_norm(g, &phi, Exponents { p: e.q, q: e.t }, &right, &q)?;
    Ok(InequalityCheck { lhs, rhs, constant: 1.0 })
}
