//! Dense complex matrices of operators on `L^2(G)` in the canonical basis.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::signal::Signal;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major `|G| x |G|` matrix; `(A f)(x) = sum_y A[x][y] f(y)`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    group: Arc<Group>,
    entries: Vec<Complex64>,
}

impl PartialEq for OperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.entries == other.entries
    }
}

impl OperatorMatrix {
    pub fn new(group: Arc<Group>, entries: Vec<Complex64>) -> Result<Self> {
        let expected = group.order() * group.order();
        if entries.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: entries.len(),
            });
        }
        Ok(OperatorMatrix { group, entries })
    }

    pub fn zeros(group: Arc<Group>) -> Self {
        let n = group.order();
        OperatorMatrix {
            group,
            entries: vec![ZERO; n * n],
        }
    }

    pub fn identity(group: Arc<Group>) -> Self {
        Self::diagonal(group.clone(), &vec![1.0; group.order()])
    }

    pub fn diagonal(group: Arc<Group>, diag: &[f64]) -> Self {
        let n = group.order();
        let mut m = Self::zeros(group);
        for (i, d) in diag.iter().enumerate().take(n) {
            m.entries[i * n + i] = Complex64::new(*d, 0.0);
        }
        m
    }

    /// Column `y` is the image of the unit impulse at `y`.
    pub fn from_linear_map<F>(group: Arc<Group>, map: F) -> Self
    where
        F: Fn(&Signal) -> Signal + Sync,
    {
        let n = group.order();
        let columns: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|y| map(&Signal::delta(group.clone(), y)).into_values())
            .collect();
        let mut entries = vec![ZERO; n * n];
        for (y, col) in columns.iter().enumerate() {
            for (x, v) in col.iter().enumerate() {
                entries[x * n + y] = *v;
            }
        }
        OperatorMatrix { group, entries }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.group.order()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        let n = self.dim();
        self.entries[row * n + col] = v;
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        self.group.ensure_same(f.group())?;
        let n = self.dim();
        let out = (0..n)
            .map(|x| {
                self.entries[x * n..(x + 1) * n]
                    .iter()
                    .zip(f.values())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Signal::new(self.group.clone(), out)
    }

    /// Conjugate transpose; the adjoint for the uniform Haar inner product.
    pub fn adjoint(&self) -> OperatorMatrix {
        let n = self.dim();
        let mut out = Self::zeros(self.group.clone());
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.group.ensure_same(&other.group)?;
        let n = self.dim();
        let mut out = Self::zeros(self.group.clone());
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            group: self.group.clone(),
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.group.ensure_same(&other.group)?;
        Ok(OperatorMatrix {
            group: self.group.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.at(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A^H|` entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;
    use crate::random::SeededRng;

    #[test]
    fn linear_map_assembly_matches_apply() {
        let g = make_group(&[6], &[2]).unwrap();
        let m = OperatorMatrix::from_linear_map(g.clone(), |f| f.translate_idx(1));
        let mut rng = SeededRng::new(1);
        let f = rng.signal(&g);
        assert!(m.apply(&f).unwrap().max_abs_diff(&f.translate_idx(1)) < 1e-15);
        assert_eq!(m.at(1, 0), Complex64::new(1.0, 0.0));
        assert!((m.trace()).norm() < 1e-15);
        let id = OperatorMatrix::identity(g.clone());
        assert_eq!(id.matmul(&m).unwrap(), m);
        assert!(m.matmul(&m.adjoint()).unwrap().max_abs_diff(&id) < 1e-15);
    }

    #[test]
    fn hermitian_defect_detects_asymmetry() {
        let g = make_group(&[3], &[1]).unwrap();
        let mut m = OperatorMatrix::identity(g.clone());
        assert_eq!(m.hermitian_defect(), 0.0);
        m.set(0, 1, Complex64::new(0.0, 1.0));
        assert_eq!(m.hermitian_defect(), 1.0);
        m.set(1, 0, Complex64::new(0.0, -1.0));
        assert!(m.is_hermitian(0.0));
    }
}
