//! Functions on `G` and on phase space `G x Ĝ`, with the fundamental
//! operators. Every sum carries the Haar mass of the group it runs over.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{DualElement, Group, GroupElement, GroupSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex function on a finite group, in canonical element order.
///
/// The same type holds functions on the dual group (e.g. Fourier
/// transforms), since `Ĝ` is identified with `G`.
#[derive(Clone, Debug)]
pub struct Signal {
    group: Arc<Group>,
    values: Vec<Complex64>,
}

impl PartialEq for Signal {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.values == other.values
    }
}

impl Signal {
    pub fn new(group: Arc<Group>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::LengthMismatch {
                expected: group.order(),
                actual: values.len(),
            });
        }
        Ok(Signal { group, values })
    }

    pub fn from_real(group: Arc<Group>, values: &[f64]) -> Result<Self> {
        Self::new(group, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(group: Arc<Group>) -> Self {
        let n = group.order();
        Signal {
            group,
            values: vec![ZERO; n],
        }
    }

    pub fn from_fn(group: Arc<Group>, f: impl Fn(usize) -> Complex64) -> Self {
        let values = (0..group.order()).map(f).collect();
        Signal { group, values }
    }

    /// Unit mass at the element with index `at`.
    pub fn delta(group: Arc<Group>, at: usize) -> Self {
        Self::from_fn(group, |i| if i == at { Complex64::new(1.0, 0.0) } else { ZERO })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    pub fn get(&self, x: &GroupElement) -> Result<Complex64> {
        Ok(self.values[self.group.index_of(x)?])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
    }

    fn same_group(&self, other: &Signal) -> Result<()> {
        self.group.ensure_same(&other.group)
    }

    pub fn translate_idx(&self, x: usize) -> Signal {
        let g = &self.group;
        Self::from_fn(g.clone(), |y| self.values[g.sub_idx(y, x)])
    }

    pub fn modulate_idx(&self, xi: usize) -> Signal {
        let g = &self.group;
        Self::from_fn(g.clone(), |y| g.char_idx(xi, y) * self.values[y])
    }

    /// `pi(x, xi) f = M_xi T_x f`.
    pub fn tf_shift_idx(&self, x: usize, xi: usize) -> Signal {
        let g = &self.group;
        Self::from_fn(g.clone(), |y| g.char_idx(xi, y) * self.values[g.sub_idx(y, x)])
    }

    /// `(T_x f)(y) = f(y - x)`.
    pub fn translate(&self, x: &GroupElement) -> Result<Signal> {
        Ok(self.translate_idx(self.group.index_of(x)?))
    }

    /// `(M_xi f)(y) = <xi, y> f(y)`.
    pub fn modulate(&self, xi: &DualElement) -> Result<Signal> {
        Ok(self.modulate_idx(self.group.dual_index_of(xi)?))
    }

    pub fn tf_shift(&self, x: &GroupElement, xi: &DualElement) -> Result<Signal> {
        Ok(self.tf_shift_idx(self.group.index_of(x)?, self.group.dual_index_of(xi)?))
    }

    /// `f^(xi) = sum_x f(x) conj<xi,x> mass_G`. The result is indexed by `Ĝ`.
    pub fn fourier(&self) -> Signal {
        let g = &self.group;
        let m = g.mass_g();
        Self::from_fn(g.clone(), |xi| {
            self.values
                .iter()
                .enumerate()
                .map(|(x, v)| v * g.char_idx(xi, x).conj())
                .sum::<Complex64>()
                * m
        })
    }

    /// `f(x) = sum_xi F(xi) <xi,x> mass_dual`.
    pub fn inverse_fourier(&self) -> Signal {
        let g = &self.group;
        let m = g.mass_dual();
        Self::from_fn(g.clone(), |x| {
            self.values
                .iter()
                .enumerate()
                .map(|(xi, v)| v * g.char_idx(xi, x))
                .sum::<Complex64>()
                * m
        })
    }

    /// `(f * g)(x) = sum_y f(y) g(x - y) mass_G`.
    pub fn convolve(&self, other: &Signal) -> Result<Signal> {
        self.same_group(other)?;
        let g = &self.group;
        let m = g.mass_g();
        Ok(Self::from_fn(g.clone(), |x| {
            self.values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != ZERO)
                .map(|(y, v)| v * other.values[g.sub_idx(x, y)])
                .sum::<Complex64>()
                * m
        }))
    }

    /// `f*(x) = conj f(-x)`.
    pub fn involution(&self) -> Signal {
        let g = &self.group;
        Self::from_fn(g.clone(), |x| self.values[g.neg_idx(x)].conj())
    }

    pub fn conj(&self) -> Signal {
        Self::from_fn(self.group.clone(), |x| self.values[x].conj())
    }

    /// `<f, g> = sum_x f(x) conj g(x) mass_G`, antilinear in `g`.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        self.same_group(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Signal) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.group.mass_g()
    }

    /// Inner product of two functions on the dual group, with the dual mass.
    pub fn inner_dual(&self, other: &Signal) -> Result<Complex64> {
        self.same_group(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.group.mass_dual())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.group.mass_g()
    }

    /// L2 norm of a function on the dual group.
    pub fn dual_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.group.mass_dual()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Self::from_fn(self.group.clone(), |x| self.values[x] * c)
    }

    pub fn normalized(&self) -> Result<Signal> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroWindow);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(f (x) g)(x, z) = f(x) g(z)` on `G1 x G2`; masses multiply.
    pub fn tensor(&self, other: &Signal) -> Result<Signal> {
        let (a, b) = (self.group.spec(), other.group.spec());
        let spec = GroupSpec::new(
            a.factors.iter().chain(&b.factors).copied().collect(),
            a.subgroup_divisors
                .iter()
                .chain(&b.subgroup_divisors)
                .copied()
                .collect(),
        )?;
        let group = Group::with_mass(spec, self.group.mass_g() * other.group.mass_g())?;
        let values = self
            .values
            .iter()
            .flat_map(|a| other.values.iter().map(move |b| a * b))
            .collect();
        Signal::new(group, values)
    }
}

impl Add for &Signal {
    type Output = Signal;
    fn add(self, rhs: &Signal) -> Signal {
        assert!(self.group.same_as(&rhs.group), "group mismatch");
        Signal::from_fn(self.group.clone(), |x| self.values[x] + rhs.values[x])
    }
}

impl Sub for &Signal {
    type Output = Signal;
    fn sub(self, rhs: &Signal) -> Signal {
        assert!(self.group.same_as(&rhs.group), "group mismatch");
        Signal::from_fn(self.group.clone(), |x| self.values[x] - rhs.values[x])
    }
}

impl Mul<Complex64> for &Signal {
    type Output = Signal;
    fn mul(self, rhs: Complex64) -> Signal {
        self.scale(rhs)
    }
}

/// A complex function on phase space `G x Ĝ`, stored `x`-major:
/// index `x * |G| + xi`.
#[derive(Clone, Debug)]
pub struct PhaseFunction {
    group: Arc<Group>,
    values: Vec<Complex64>,
}

impl PartialEq for PhaseFunction {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.values == other.values
    }
}

impl PhaseFunction {
    pub fn new(group: Arc<Group>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.phase_len() {
            return Err(Error::LengthMismatch {
                expected: group.phase_len(),
                actual: values.len(),
            });
        }
        Ok(PhaseFunction { group, values })
    }

    pub fn zeros(group: Arc<Group>) -> Self {
        let n = group.phase_len();
        PhaseFunction {
            group,
            values: vec![ZERO; n],
        }
    }

    /// Builds from a closure of `(x index, xi index)`.
    pub fn from_fn(group: Arc<Group>, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let n = group.order();
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        PhaseFunction { group, values }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, x: usize, xi: usize) -> Complex64 {
        self.values[self.group.phase_index(x, xi)]
    }

    pub fn get(&self, x: &GroupElement, xi: &DualElement) -> Result<Complex64> {
        Ok(self.at(self.group.index_of(x)?, self.group.dual_index_of(xi)?))
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
    }

    pub fn scale(&self, c: Complex64) -> PhaseFunction {
        PhaseFunction {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn conj(&self) -> PhaseFunction {
        PhaseFunction {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &PhaseFunction) -> Result<PhaseFunction> {
        self.group.ensure_same(&other.group)?;
        Ok(PhaseFunction {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &PhaseFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `T_(a, alpha) F(x, xi) = F(x - a, xi - alpha)`.
    pub fn translate_idx(&self, a: usize, alpha: usize) -> PhaseFunction {
        let g = &self.group;
        Self::from_fn(g.clone(), |x, xi| {
            self.at(g.sub_idx(x, a), g.sub_idx(xi, alpha))
        })
    }

    /// `M_(w, u) F(x, xi) = <w, x><xi, u> F(x, xi)` for `(w, u)` in `Ĝ x G`.
    pub fn modulate_idx(&self, omega: usize, u: usize) -> PhaseFunction {
        let g = &self.group;
        Self::from_fn(g.clone(), |x, xi| {
            g.char_idx(omega, x) * g.char_idx(xi, u) * self.at(x, xi)
        })
    }

    /// `(F * H)(z) = sum_y F(y) H(z - y) mass_G mass_dual`.
    pub fn convolve(&self, other: &PhaseFunction) -> Result<PhaseFunction> {
        self.group.ensure_same(&other.group)?;
        let g = &self.group;
        let m = g.mass_g() * g.mass_dual();
        let support: Vec<(usize, Complex64)> = self
            .values
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| *v != ZERO)
            .collect();
        let values = (0..g.phase_len())
            .map(|z| {
                support
                    .iter()
                    .map(|&(y, v)| v * other.values[g.phase_sub(z, y)])
                    .sum::<Complex64>()
                    * m
            })
            .collect();
        Ok(PhaseFunction {
            group: g.clone(),
            values,
        })
    }

    /// `<F, H> = sum F conj H mass_G mass_dual`.
    pub fn inner(&self, other: &PhaseFunction) -> Result<Complex64> {
        self.group.ensure_same(&other.group)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.group.mass_g()
            * self.group.mass_dual())
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
            * self.group.mass_g()
            * self.group.mass_dual())
        .sqrt()
    }

    /// Reinterprets as a signal on the group `G x Ĝ` (see [`Group::phase_space`]).
    pub fn to_signal(&self) -> Signal {
        Signal {
            group: self.group.phase_space(),
            values: self.values.clone(),
        }
    }

    /// Same as [`PhaseFunction::to_signal`] with a precomputed phase-space group.
    pub fn to_signal_on(&self, phase_group: &Arc<Group>) -> Result<Signal> {
        Signal::new(phase_group.clone(), self.values.clone())
    }
}

/// Convenience free functions mirroring the method API.
pub fn convolve_phase(f: &PhaseFunction, h: &PhaseFunction) -> Result<PhaseFunction> {
    f.convolve(h)
}

pub fn inner_phase(f: &PhaseFunction, h: &PhaseFunction) -> Result<Complex64> {
    f.inner(h)
}

impl Add for &PhaseFunction {
    type Output = PhaseFunction;
    fn add(self, rhs: &PhaseFunction) -> PhaseFunction {
        assert!(self.group.same_as(&rhs.group), "group mismatch");
        PhaseFunction {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &PhaseFunction {
    type Output = PhaseFunction;
    fn sub(self, rhs: &PhaseFunction) -> PhaseFunction {
        assert!(self.group.same_as(&rhs.group), "group mismatch");
        PhaseFunction {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;
    use crate::random::SeededRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn translation_examples() {
        let g = make_group(&[4], &[2]).unwrap();
        let mut rng = SeededRng::new(1);
        let f = rng.signal(&g);
        assert_eq!(f.translate(&g.identity()).unwrap(), f);
        let d0 = Signal::delta(g.clone(), 0);
        assert_eq!(d0.translate(&g.element(&[1]).unwrap()).unwrap(), Signal::delta(g.clone(), 1));
        let x = g.element(&[3]).unwrap();
        let back = f.translate(&x).unwrap().translate(&g.neg(&x).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn modulation_examples() {
        let g = make_group(&[4], &[2]).unwrap();
        let ones = Signal::from_real(g.clone(), &[1.0; 4]).unwrap();
        let m1 = ones.modulate(&g.dual_element(&[1]).unwrap()).unwrap();
        let expected = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (a, b) in m1.values().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
        let mut rng = SeededRng::new(2);
        let f = rng.signal(&g);
        assert_eq!(f.modulate(&g.dual_identity()).unwrap(), f);
        let mf = f.modulate(&g.dual_element(&[3]).unwrap()).unwrap();
        for (a, b) in mf.values().iter().zip(f.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn tf_shift_examples() {
        let z2 = make_group(&[2], &[1]).unwrap();
        let f = Signal::new(z2.clone(), vec![c(2.0, 1.0), c(-3.0, 0.5)]).unwrap();
        let shifted = f.tf_shift_idx(1, 1);
        // (pi(1,1) f)(y) = (-1)^y f(y-1) = (b, -a)
        assert!((shifted.at(0) - f.at(1)).norm() < 1e-15);
        assert!((shifted.at(1) + f.at(0)).norm() < 1e-15);
        assert_eq!(f.tf_shift_idx(0, 0), f);
    }

    #[test]
    fn commutation_relation() {
        let g = make_group(&[6, 2], &[3, 1]).unwrap();
        let mut rng = SeededRng::new(3);
        let f = rng.signal(&g);
        for x in 0..g.order() {
            for xi in 0..g.order() {
                let lhs = f.translate_idx(x).modulate_idx(xi);
                let rhs = f.modulate_idx(xi).translate_idx(x).scale(g.char_idx(xi, x));
                assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
            }
        }
    }

    #[test]
    fn fourier_examples() {
        let g = make_group(&[4], &[2]).unwrap();
        let d0 = Signal::delta(g.clone(), 0);
        for v in d0.fourier().values() {
            assert!((v - 1.0).norm() < 1e-15);
        }
        let chi = Signal::from_real(g.clone(), &[1.0, 0.0, 1.0, 0.0]).unwrap();
        let expected = [2.0, 0.0, 2.0, 0.0];
        for (v, e) in chi.fourier().values().iter().zip(expected) {
            assert!((v - e).norm() < 1e-15);
        }
        let mut rng = SeededRng::new(4);
        let f = rng.signal(&g);
        assert!(f.fourier().inverse_fourier().max_abs_diff(&f) <= 1e-12);
        let constant = Signal::from_real(g.clone(), &[1.0; 4]).unwrap();
        assert!(constant.inverse_fourier().max_abs_diff(&d0) < 1e-15);
    }

    #[test]
    fn plancherel_and_shift_duality() {
        let g = make_group(&[6, 2], &[2, 2]).unwrap();
        let mut rng = SeededRng::new(5);
        for _ in 0..10 {
            let f = rng.signal(&g);
            let h = rng.signal(&g);
            let lhs = f.fourier().inner_dual(&h.fourier()).unwrap();
            assert!((lhs - f.inner(&h).unwrap()).norm() <= 1e-12);
            assert!((f.fourier().dual_norm() - f.norm()).abs() <= 1e-12);
            for x in 0..g.order() {
                let lhs = f.translate_idx(x).fourier();
                let fh = f.fourier();
                let rhs = Signal::from_fn(g.clone(), |xi| g.char_idx(xi, x).conj() * fh.at(xi));
                assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
            }
        }
    }

    #[test]
    fn convolution_examples() {
        let g = make_group(&[6], &[2]).unwrap();
        let mut rng = SeededRng::new(6);
        let f = rng.signal(&g);
        let d0 = Signal::delta(g.clone(), 0);
        assert!(f.convolve(&d0).unwrap().max_abs_diff(&f) < 1e-15);

        // chi_K * chi_K = |K| chi_K, checked by direct summation over K.
        let k = g.subgroup_indices();
        let chi = Signal::from_fn(g.clone(), |x| c(if g.in_subgroup(x) { 1.0 } else { 0.0 }, 0.0));
        let conv = chi.convolve(&chi).unwrap();
        for x in 0..g.order() {
            let direct = k.iter().filter(|&&y| g.in_subgroup(g.sub_idx(x, y))).count() as f64;
            assert!((conv.at(x) - direct).norm() < 1e-14);
            let expected = if g.in_subgroup(x) { k.len() as f64 } else { 0.0 };
            assert_eq!(direct, expected);
        }

        let h = rng.signal(&g);
        let lhs = f.convolve(&h).unwrap().fourier();
        let (fh, hh) = (f.fourier(), h.fourier());
        let rhs = Signal::from_fn(g.clone(), |xi| fh.at(xi) * hh.at(xi));
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn convolution_commutes_and_associates() {
        let g = make_group(&[4, 3], &[2, 1]).unwrap();
        let mut rng = SeededRng::new(7);
        for _ in 0..5 {
            let (a, b, d) = (rng.signal(&g), rng.signal(&g), rng.signal(&g));
            let ab = a.convolve(&b).unwrap();
            assert!(ab.max_abs_diff(&b.convolve(&a).unwrap()) <= 1e-11);
            let left = ab.convolve(&d).unwrap();
            let right = a.convolve(&b.convolve(&d).unwrap()).unwrap();
            assert!(left.max_abs_diff(&right) <= 1e-11);
        }
    }

    #[test]
    fn involution_examples() {
        let g = make_group(&[3], &[1]).unwrap();
        let d0 = Signal::delta(g.clone(), 0);
        assert_eq!(d0.involution(), d0);
        let f = Signal::new(g.clone(), vec![c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.5)]).unwrap();
        let inv = f.involution();
        assert_eq!(inv.values(), &[c(1.0, -2.0), c(0.5, -0.5), c(3.0, 1.0)]);
        assert_eq!(inv.involution(), f);
    }

    #[test]
    fn inner_product_examples() {
        let g = make_group(&[8], &[2]).unwrap();
        let d0 = Signal::delta(g.clone(), 0);
        assert_eq!(d0.inner(&d0).unwrap(), c(1.0, 0.0));
        let mut rng = SeededRng::new(8);
        for _ in 0..20 {
            let f = rng.signal(&g);
            let h = rng.signal(&g);
            assert!(f.inner(&h).unwrap().norm() <= f.norm() * h.norm() * (1.0 + 1e-12));
            assert!((f.inner(&f).unwrap().re - f.norm_sqr()).abs() < 1e-12);
            let i = c(0.0, 1.0);
            let anti = f.inner(&h.scale(i)).unwrap();
            assert!((anti - f.inner(&h).unwrap() * i.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_examples() {
        let g1 = make_group(&[4], &[2]).unwrap();
        let g2 = make_group(&[3], &[3]).unwrap();
        let d = Signal::delta(g1.clone(), 0).tensor(&Signal::delta(g2.clone(), 0)).unwrap();
        assert_eq!(d.group().factors(), &[4, 3]);
        assert_eq!(d, Signal::delta(d.group().clone(), 0));
        let chi1 = Signal::from_fn(g1.clone(), |x| c(g1.in_subgroup(x) as u8 as f64, 0.0));
        let chi2 = Signal::from_fn(g2.clone(), |x| c(g2.in_subgroup(x) as u8 as f64, 0.0));
        let t = chi1.tensor(&chi2).unwrap();
        let pg = t.group().clone();
        for x in 0..pg.order() {
            assert_eq!(t.at(x).re, pg.in_subgroup(x) as u8 as f64);
        }
        let mut rng = SeededRng::new(9);
        let (f, h) = (rng.signal(&g1), rng.signal(&g2));
        assert!((f.tensor(&h).unwrap().norm() - f.norm() * h.norm()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = make_group(&[4], &[2]).unwrap();
        let b = make_group(&[4], &[1]).unwrap();
        let f = Signal::zeros(a);
        let h = Signal::zeros(b);
        assert!(matches!(f.inner(&h), Err(Error::GroupMismatch)));
        assert!(matches!(f.convolve(&h), Err(Error::GroupMismatch)));
    }

    #[test]
    fn phase_convolution_unit() {
        let g = make_group(&[4], &[2]).unwrap();
        let mut rng = SeededRng::new(10);
        let f = rng.phase_function(&g);
        let unit_mass = 1.0 / (g.mass_g() * g.mass_dual());
        let delta = PhaseFunction::from_fn(g.clone(), |x, xi| {
            c(if x == 0 && xi == 0 { unit_mass } else { 0.0 }, 0.0)
        });
        assert!(delta.convolve(&f).unwrap().max_abs_diff(&f) < 1e-13);
        assert!(f.convolve(&delta).unwrap().max_abs_diff(&f) < 1e-13);
    }
}
