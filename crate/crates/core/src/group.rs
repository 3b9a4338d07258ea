//! Finite abelian groups `Z_{N_1} x ... x Z_{N_r}` with a chosen compact-open
//! subgroup `K = d_1 Z_{N_1} x ... x d_r Z_{N_r}`.
//!
//! The dual group is identified with the group itself through
//! `xi -> (x -> exp(2 pi i sum_j xi_j x_j / N_j))`, so elements of `G` and of
//! its dual share the same residue storage and the same canonical ordering
//! (lexicographic over residue tuples, first factor most significant).
//!
//! Every group carries a [`HaarMeasure`]. The default puts mass 1 on each
//! point of `G` and mass `1/|G|` on each character, which makes the Fourier
//! transform unitary. The phase-space group `G x Ĝ` built by
//! [`Group::phase_space`] inherits the product measure.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cyclic orders and subgroup divisors. Serialized verbatim as
/// `{"factors":[...], "subgroup_divisors":[...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub factors: Vec<usize>,
    pub subgroup_divisors: Vec<usize>,
}

impl GroupSpec {
    pub fn new(factors: Vec<usize>, subgroup_divisors: Vec<usize>) -> Result<Self> {
        let spec = GroupSpec {
            factors,
            subgroup_divisors,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::EmptyGroup);
        }
        if self.factors.len() != self.subgroup_divisors.len() {
            return Err(Error::LengthMismatch {
                expected: self.factors.len(),
                actual: self.subgroup_divisors.len(),
            });
        }
        for (&n, &d) in self.factors.iter().zip(&self.subgroup_divisors) {
            if n == 0 {
                return Err(Error::ZeroFactor(n));
            }
            if d == 0 || n % d != 0 {
                return Err(Error::NonDivisor {
                    factor: n,
                    divisor: d,
                });
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    /// `|K| = prod N_j / d_j`.
    pub fn subgroup_order(&self) -> usize {
        self.factors
            .iter()
            .zip(&self.subgroup_divisors)
            .map(|(n, d)| n / d)
            .product()
    }

    /// `|K^perp| = prod d_j`.
    pub fn annihilator_order(&self) -> usize {
        self.subgroup_divisors.iter().product()
    }
}

/// Point masses of the Haar measures on `G` and on its dual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarMeasure {
    pub mass_g: f64,
    pub mass_dual: f64,
}

/// An element of `G`, stored as reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    residues: Vec<usize>,
}

/// A character of `G`, stored as reduced residues under the fixed identification.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualElement {
    residues: Vec<usize>,
}

impl GroupElement {
    pub fn residues(&self) -> &[usize] {
        &self.residues
    }
}

impl DualElement {
    pub fn residues(&self) -> &[usize] {
        &self.residues
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.residues)
    }
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "^{:?}", self.residues)
    }
}

/// A validated finite abelian group with cached index arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    spec: GroupSpec,
    measure: HaarMeasure,
    order: usize,
    /// Row-major digit table, `order x rank`.
    digits: Vec<usize>,
    strides: Vec<usize>,
    /// `L / N_j` where `L = lcm(N_j)`.
    root_scale: Vec<usize>,
    /// `exp(2 pi i k / L)` for `k in 0..L`.
    roots: Vec<Complex64>,
}

/// Builds a group with the default (unitary) measure.
pub fn make_group(factors: &[usize], subgroup_divisors: &[usize]) -> Result<Arc<Group>> {
    Group::new(GroupSpec::new(factors.to_vec(), subgroup_divisors.to_vec())?)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Arc<Group>> {
        spec.validate()?;
        let order = spec.order();
        Ok(Arc::new(Self::build(spec, 1.0, 1.0 / order as f64)))
    }

    /// A group whose points each weigh `mass_g`; the dual mass is fixed by
    /// `mass_g * mass_dual * |G| = 1`.
    pub fn with_mass(spec: GroupSpec, mass_g: f64) -> Result<Arc<Group>> {
        spec.validate()?;
        let order = spec.order();
        Ok(Arc::new(Self::build(spec, mass_g, 1.0 / (mass_g * order as f64))))
    }

    fn build(spec: GroupSpec, mass_g: f64, mass_dual: f64) -> Group {
        let rank = spec.factors.len();
        let order = spec.order();
        let mut strides = vec![1; rank];
        for j in (0..rank.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * spec.factors[j + 1];
        }
        let mut digits = Vec::with_capacity(order * rank);
        for idx in 0..order {
            for j in 0..rank {
                digits.push((idx / strides[j]) % spec.factors[j]);
            }
        }
        let lcm = spec.factors.iter().fold(1, |l, &n| l / gcd(l, n) * n);
        let root_scale = spec.factors.iter().map(|n| lcm / n).collect();
        let roots = (0..lcm)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / lcm as f64))
            .collect();
        Group {
            spec,
            measure: HaarMeasure { mass_g, mass_dual },
            order,
            digits,
            strides,
            root_scale,
            roots,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn measure(&self) -> HaarMeasure {
        self.measure
    }

    pub fn mass_g(&self) -> f64 {
        self.measure.mass_g
    }

    pub fn mass_dual(&self) -> f64 {
        self.measure.mass_dual
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.spec.factors.len()
    }

    pub fn factors(&self) -> &[usize] {
        &self.spec.factors
    }

    pub fn subgroup_order(&self) -> usize {
        self.spec.subgroup_order()
    }

    pub fn annihilator_order(&self) -> usize {
        self.spec.annihilator_order()
    }

    /// `G x Ĝ` as a group in its own right: factors `[N.., N..]`, subgroup
    /// `K x K^perp` and product measure. Its dual is `Ĝ x G` with pairing
    /// `<(w,u),(x,xi)> = <w,x><xi,u>`.
    pub fn phase_space(&self) -> Arc<Group> {
        let mut factors = self.spec.factors.clone();
        factors.extend_from_slice(&self.spec.factors);
        let mut divisors = self.spec.subgroup_divisors.clone();
        divisors.extend(
            self.spec
                .factors
                .iter()
                .zip(&self.spec.subgroup_divisors)
                .map(|(n, d)| n / d),
        );
        let spec = GroupSpec {
            factors,
            subgroup_divisors: divisors,
        };
        let mass = self.measure.mass_g * self.measure.mass_dual;
        Arc::new(Self::build(spec, mass, mass))
    }

    /// Number of points of `G x Ĝ`.
    pub fn phase_len(&self) -> usize {
        self.order * self.order
    }

    #[inline]
    pub fn phase_index(&self, x: usize, xi: usize) -> usize {
        x * self.order + xi
    }

    #[inline]
    pub fn phase_split(&self, idx: usize) -> (usize, usize) {
        (idx / self.order, idx % self.order)
    }

    #[inline]
    pub fn digits(&self, idx: usize) -> &[usize] {
        let r = self.rank();
        &self.digits[idx * r..(idx + 1) * r]
    }

    #[inline]
    fn index_from_digits<I: Iterator<Item = usize>>(&self, it: I) -> usize {
        it.zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.digits(a), self.digits(b));
        self.index_from_digits(
            da.iter()
                .zip(db)
                .zip(&self.spec.factors)
                .map(|((x, y), n)| (x + y) % n),
        )
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        let da = self.digits(a);
        self.index_from_digits(da.iter().zip(&self.spec.factors).map(|(x, n)| (n - x) % n))
    }

    #[inline]
    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.digits(a), self.digits(b));
        self.index_from_digits(
            da.iter()
                .zip(db)
                .zip(&self.spec.factors)
                .map(|((x, y), n)| (x + n - y) % n),
        )
    }

    /// `<xi, x>` by index.
    #[inline]
    pub fn char_idx(&self, xi: usize, x: usize) -> Complex64 {
        let l = self.roots.len();
        let (dxi, dx) = (self.digits(xi), self.digits(x));
        let mut phase = 0usize;
        for j in 0..dxi.len() {
            phase = (phase + dxi[j] * dx[j] % self.spec.factors[j] * self.root_scale[j]) % l;
        }
        self.roots[phase]
    }

    /// Phase-space addition.
    #[inline]
    pub fn phase_add(&self, a: usize, b: usize) -> usize {
        let (ax, axi) = self.phase_split(a);
        let (bx, bxi) = self.phase_split(b);
        self.phase_index(self.add_idx(ax, bx), self.add_idx(axi, bxi))
    }

    #[inline]
    pub fn phase_sub(&self, a: usize, b: usize) -> usize {
        let (ax, axi) = self.phase_split(a);
        let (bx, bxi) = self.phase_split(b);
        self.phase_index(self.sub_idx(ax, bx), self.sub_idx(axi, bxi))
    }

    fn reduce(&self, residues: &[i64]) -> Result<Vec<usize>> {
        if residues.len() != self.rank() {
            return Err(Error::LengthMismatch {
                expected: self.rank(),
                actual: residues.len(),
            });
        }
        Ok(residues
            .iter()
            .zip(&self.spec.factors)
            .map(|(&r, &n)| r.rem_euclid(n as i64) as usize)
            .collect())
    }

    fn check(&self, residues: &[usize]) -> Result<()> {
        if residues.len() != self.rank()
            || residues.iter().zip(&self.spec.factors).any(|(r, n)| r >= n)
        {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    /// Builds an element, reducing each residue mod `N_j`.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        Ok(GroupElement {
            residues: self.reduce(residues)?,
        })
    }

    pub fn dual_element(&self, residues: &[i64]) -> Result<DualElement> {
        Ok(DualElement {
            residues: self.reduce(residues)?,
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.rank()],
        }
    }

    pub fn dual_identity(&self) -> DualElement {
        DualElement {
            residues: vec![0; self.rank()],
        }
    }

    pub fn element_at(&self, idx: usize) -> GroupElement {
        GroupElement {
            residues: self.digits(idx).to_vec(),
        }
    }

    pub fn dual_at(&self, idx: usize) -> DualElement {
        DualElement {
            residues: self.digits(idx).to_vec(),
        }
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize> {
        self.check(&x.residues)?;
        Ok(self.index_from_digits(x.residues.iter().copied()))
    }

    pub fn dual_index_of(&self, xi: &DualElement) -> Result<usize> {
        self.check(&xi.residues)?;
        Ok(self.index_from_digits(xi.residues.iter().copied()))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(|i| self.element_at(i))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        Ok(self.element_at(self.add_idx(self.index_of(x)?, self.index_of(y)?)))
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement> {
        Ok(self.element_at(self.neg_idx(self.index_of(x)?)))
    }

    pub fn dual_add(&self, a: &DualElement, b: &DualElement) -> Result<DualElement> {
        Ok(self.dual_at(self.add_idx(self.dual_index_of(a)?, self.dual_index_of(b)?)))
    }

    pub fn dual_neg(&self, a: &DualElement) -> Result<DualElement> {
        Ok(self.dual_at(self.neg_idx(self.dual_index_of(a)?)))
    }

    /// `<xi, x> = exp(2 pi i sum_j xi_j x_j / N_j)`.
    pub fn character(&self, xi: &DualElement, x: &GroupElement) -> Result<Complex64> {
        Ok(self.char_idx(self.dual_index_of(xi)?, self.index_of(x)?))
    }

    /// Membership in `K`: every residue is a multiple of `d_j`.
    #[inline]
    pub fn in_subgroup(&self, x: usize) -> bool {
        self.digits(x)
            .iter()
            .zip(&self.spec.subgroup_divisors)
            .all(|(r, d)| r % d == 0)
    }

    /// Membership in `K^perp`: every residue is a multiple of `N_j / d_j`.
    #[inline]
    pub fn in_annihilator(&self, xi: usize) -> bool {
        self.digits(xi)
            .iter()
            .zip(self.spec.factors.iter().zip(&self.spec.subgroup_divisors))
            .all(|(r, (n, d))| r % (n / d) == 0)
    }

    pub fn subgroup_indices(&self) -> Vec<usize> {
        (0..self.order).filter(|&x| self.in_subgroup(x)).collect()
    }

    pub fn annihilator_indices(&self) -> Vec<usize> {
        (0..self.order).filter(|&x| self.in_annihilator(x)).collect()
    }

    pub fn subgroup(&self) -> Vec<GroupElement> {
        self.subgroup_indices()
            .into_iter()
            .map(|i| self.element_at(i))
            .collect()
    }

    /// `K^perp`, enumerated from the closed form `prod (N_j/d_j) Z_{N_j}`.
    pub fn annihilator(&self) -> Vec<DualElement> {
        self.annihilator_indices()
            .into_iter()
            .map(|i| self.dual_at(i))
            .collect()
    }

    /// Indices of `D1 = prod {0..d_j-1}` (representatives of `G/K`).
    pub fn time_representative_indices(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&x| {
                self.digits(x)
                    .iter()
                    .zip(&self.spec.subgroup_divisors)
                    .all(|(r, d)| r < d)
            })
            .collect()
    }

    /// Indices of `D2 = prod {0..N_j/d_j - 1}` (representatives of `Ĝ/K^perp`).
    pub fn frequency_representative_indices(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&xi| {
                self.digits(xi)
                    .iter()
                    .zip(self.spec.factors.iter().zip(&self.spec.subgroup_divisors))
                    .all(|(r, (n, d))| *r < n / d)
            })
            .collect()
    }

    pub fn coset_representatives(&self) -> (Vec<GroupElement>, Vec<DualElement>) {
        (
            self.time_representative_indices()
                .into_iter()
                .map(|i| self.element_at(i))
                .collect(),
            self.frequency_representative_indices()
                .into_iter()
                .map(|i| self.dual_at(i))
                .collect(),
        )
    }

    /// Splits `x = w + k` with `w` in `D1`, `k` in `K`; returns indices `(w, k)`.
    pub fn time_coset_split(&self, x: usize) -> (usize, usize) {
        let w = self.index_from_digits(
            self.digits(x)
                .iter()
                .zip(&self.spec.subgroup_divisors)
                .map(|(r, d)| r % d),
        );
        (w, self.sub_idx(x, w))
    }

    /// Splits `xi = mu + kappa` with `mu` in `D2`, `kappa` in `K^perp`.
    pub fn frequency_coset_split(&self, xi: usize) -> (usize, usize) {
        let mu = self.index_from_digits(
            self.digits(xi)
                .iter()
                .zip(self.spec.factors.iter().zip(&self.spec.subgroup_divisors))
                .map(|(r, (n, d))| r % (n / d)),
        );
        (mu, self.sub_idx(xi, mu))
    }

    pub fn same_as(&self, other: &Group) -> bool {
        std::ptr::eq(self, other) || (self.spec == other.spec && self.measure == other.measure)
    }

    pub(crate) fn ensure_same(&self, other: &Group) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}

/// Annihilator computed by testing every character against every element of
/// `K`; independent of the closed form used by [`Group::annihilator`].
pub fn annihilator_by_search(group: &Group) -> Vec<DualElement> {
    let k = group.subgroup_indices();
    (0..group.order())
        .filter(|&xi| {
            k.iter()
                .all(|&x| (group.char_idx(xi, x) - Complex64::new(1.0, 0.0)).norm() < 1e-12)
        })
        .map(|xi| group.dual_at(xi))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residues(v: &[DualElement]) -> Vec<Vec<usize>> {
        v.iter().map(|e| e.residues().to_vec()).collect()
    }

    #[test]
    fn z4_with_k_2z4() {
        let g = make_group(&[4], &[2]).unwrap();
        assert_eq!(g.order(), 4);
        let k: Vec<_> = g.subgroup().iter().map(|e| e.residues()[0]).collect();
        assert_eq!(k, vec![0, 2]);
        assert_eq!(residues(&g.annihilator()), vec![vec![0], vec![2]]);
        assert_eq!(g.annihilator(), annihilator_by_search(&g));
    }

    #[test]
    fn trivial_group() {
        let g = make_group(&[1], &[1]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.subgroup().len(), 1);
        assert_eq!(g.annihilator().len(), 1);
    }

    #[test]
    fn orders_of_z6_by_z2() {
        let g = make_group(&[6, 2], &[3, 1]).unwrap();
        assert_eq!(g.order(), 12);
        assert_eq!(g.subgroup().len(), 4);
        assert_eq!(g.annihilator().len(), 3);
        assert_eq!(g.subgroup_order(), 4);
        assert_eq!(g.annihilator_order(), 3);
        assert_eq!(g.annihilator(), annihilator_by_search(&g));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(make_group(&[], &[]), Err(Error::EmptyGroup)));
        assert!(matches!(
            make_group(&[6], &[4]),
            Err(Error::NonDivisor { factor: 6, divisor: 4 })
        ));
        assert!(matches!(make_group(&[0], &[1]), Err(Error::ZeroFactor(0))));
        assert!(matches!(
            make_group(&[4, 4], &[2]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn characters_on_small_groups() {
        let z4 = make_group(&[4], &[2]).unwrap();
        let one = z4.element(&[1]).unwrap();
        let c = z4.character(&z4.dual_element(&[1]).unwrap(), &one).unwrap();
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        for x in z4.elements() {
            let c = z4.character(&z4.dual_identity(), &x).unwrap();
            assert_eq!(c, Complex64::new(1.0, 0.0));
        }
        let z2 = make_group(&[2], &[1]).unwrap();
        let c = z2
            .character(&z2.dual_element(&[1]).unwrap(), &z2.element(&[1]).unwrap())
            .unwrap();
        assert!((c + 1.0).norm() < 1e-15);
    }

    #[test]
    fn character_rejects_foreign_elements() {
        let z4 = make_group(&[4], &[2]).unwrap();
        let z4z2 = make_group(&[4, 2], &[2, 1]).unwrap();
        let x = z4z2.element(&[1, 1]).unwrap();
        assert!(matches!(
            z4.character(&z4.dual_identity(), &x),
            Err(Error::GroupMismatch)
        ));
    }

    #[test]
    fn annihilator_of_2z8() {
        let g = make_group(&[8], &[2]).unwrap();
        assert_eq!(g.subgroup().len(), 4);
        assert_eq!(residues(&g.annihilator()), vec![vec![0], vec![4]]);
        assert_eq!(g.annihilator(), annihilator_by_search(&g));
    }

    #[test]
    fn annihilator_extremes() {
        let full = make_group(&[6], &[1]).unwrap();
        assert_eq!(full.annihilator(), vec![full.dual_identity()]);
        let trivial = make_group(&[6], &[6]).unwrap();
        assert_eq!(trivial.subgroup(), vec![trivial.identity()]);
        assert_eq!(trivial.annihilator().len(), 6);
    }

    #[test]
    fn coset_representatives_examples() {
        let z4 = make_group(&[4], &[2]).unwrap();
        let (d1, d2) = z4.coset_representatives();
        assert_eq!(d1, vec![z4.element(&[0]).unwrap(), z4.element(&[1]).unwrap()]);
        assert_eq!(
            d2,
            vec![z4.dual_element(&[0]).unwrap(), z4.dual_element(&[1]).unwrap()]
        );
        let full = make_group(&[5], &[1]).unwrap();
        assert_eq!(full.coset_representatives().0, vec![full.identity()]);
        let z6 = make_group(&[6], &[3]).unwrap();
        let (d1, d2) = z6.coset_representatives();
        assert_eq!(d1.len(), 3);
        assert_eq!(d2.len(), 2);
        assert_eq!(d1.len() * z6.subgroup_order(), 6);
        assert_eq!(d2.len() * z6.annihilator_order(), 6);
    }

    #[test]
    fn negative_residues_are_reduced() {
        let g = make_group(&[4, 3], &[2, 3]).unwrap();
        assert_eq!(g.element(&[-1, -4]).unwrap().residues(), &[3, 2]);
    }

    #[test]
    fn partition_is_unique() {
        let g = make_group(&[6, 4], &[3, 2]).unwrap();
        let d1 = g.time_representative_indices();
        let k = g.subgroup_indices();
        for x in 0..g.order() {
            let hits = d1
                .iter()
                .flat_map(|&w| k.iter().map(move |&kk| (w, kk)))
                .filter(|&(w, kk)| g.add_idx(w, kk) == x)
                .count();
            assert_eq!(hits, 1);
            let (w, kk) = g.time_coset_split(x);
            assert!(d1.contains(&w) && g.in_subgroup(kk));
        }
    }

    #[test]
    fn phase_space_measure_is_unitary() {
        let g = make_group(&[6, 2], &[3, 1]).unwrap();
        let h = g.phase_space();
        assert_eq!(h.order(), 144);
        let m = h.measure();
        assert!((m.mass_g * m.mass_dual * h.order() as f64 - 1.0).abs() < 1e-14);
        assert_eq!(h.subgroup_order(), 4 * 3);
    }

    #[test]
    fn bicharacter_and_orthogonality() {
        let g = make_group(&[6, 4], &[2, 2]).unwrap();
        let n = g.order();
        for xi in 0..n {
            let mut sum = Complex64::new(0.0, 0.0);
            for x in 0..n {
                sum += g.char_idx(xi, x);
                for y in 0..n {
                    let lhs = g.char_idx(xi, g.add_idx(x, y));
                    let rhs = g.char_idx(xi, x) * g.char_idx(xi, y);
                    assert!((lhs - rhs).norm() <= 1e-14);
                }
            }
            let expected = if xi == 0 { n as f64 } else { 0.0 };
            assert!((sum - expected).norm() <= 1e-10 * n as f64);
        }
    }
}
