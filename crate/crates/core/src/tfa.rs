//! Short-time Fourier transform, the generalized Gaussian window, the
//! Rihaczek distribution, special test functions and the exact covariance and
//! product identities that tie them together.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{DualElement, Group, GroupElement};
use crate::signal::{PhaseFunction, Signal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The generalized Gaussian of a purely discrete group: `phi = chi_K`.
pub fn gaussian_window(group: &Arc<Group>) -> Signal {
    Signal::from_fn(group.clone(), |x| {
        Complex64::new(if group.in_subgroup(x) { 1.0 } else { 0.0 }, 0.0)
    })
}

/// `phi o = phi * phi`, which is `|K| mass_G chi_K` here.
pub fn gaussian_circ(group: &Arc<Group>) -> Signal {
    let phi = gaussian_window(group);
    phi.convolve(&phi).expect("same group")
}

/// `V_g f(x, xi) = <f, M_xi T_x g>`.
///
/// Samples below the worst-case rounding bound of their defining sum are
/// returned as exact zeros.
pub fn stft(f: &Signal, g: &Signal) -> Result<PhaseFunction> {
    f.group().ensure_same(g.group())?;
    let group = f.group();
    let n = group.order();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let windowed = windowed_products(f, g, x);
            (0..n).map(|xi| windowed_sum(group, &windowed, xi)).collect()
        })
        .collect();
    PhaseFunction::new(group.clone(), rows.into_iter().flatten().collect())
}

/// A single STFT sample `V_g f(x, xi)`, bit-identical to the entry of [`stft`].
pub fn stft_at(f: &Signal, g: &Signal, x: usize, xi: usize) -> Complex64 {
    windowed_sum(f.group(), &windowed_products(f, g, x), xi)
}

fn windowed_products(f: &Signal, g: &Signal, x: usize) -> Vec<(usize, Complex64)> {
    let group = f.group();
    let (fv, gv) = (f.values(), g.values());
    (0..group.order())
        .filter_map(|y| {
            let w = fv[y] * gv[group.sub_idx(y, x)].conj();
            (w != ZERO).then_some((y, w))
        })
        .collect()
}

fn windowed_sum(group: &Group, windowed: &[(usize, Complex64)], xi: usize) -> Complex64 {
    let s: Complex64 = windowed
        .iter()
        .map(|&(y, w)| w * group.char_idx(xi, y).conj())
        .sum();
    let floor = windowed.len() as f64
        * f64::EPSILON
        * windowed.iter().map(|(_, w)| w.norm()).sum::<f64>();
    if s.norm() <= floor {
        ZERO
    } else {
        s * group.mass_g()
    }
}

/// Max pointwise defect of
/// `V_{M_eta T_y g} M_w T_u f (x,xi) = conj<xi-w,u> <eta,x-u> T_(u-y, w-eta) V_g f (x,xi)`.
pub fn stft_shift_identity_residual(
    f: &Signal,
    g: &Signal,
    u: &GroupElement,
    y: &GroupElement,
    omega: &DualElement,
    eta: &DualElement,
) -> Result<f64> {
    let group = f.group();
    let (u, y) = (group.index_of(u)?, group.index_of(y)?);
    let (omega, eta) = (group.dual_index_of(omega)?, group.dual_index_of(eta)?);
    let lhs = stft(&f.tf_shift_idx(u, omega), &g.tf_shift_idx(y, eta))?;
    let shifted = stft(f, g)?.translate_idx(group.sub_idx(u, y), group.sub_idx(omega, eta));
    let rhs = PhaseFunction::from_fn(group.clone(), |x, xi| {
        group.char_idx(group.sub_idx(xi, omega), u).conj()
            * group.char_idx(eta, group.sub_idx(x, u))
            * shifted.at(x, xi)
    });
    Ok(lhs.max_abs_diff(&rhs))
}

/// `R(f, g)(x, xi) = f(x) conj(g^(xi)) conj<xi, x>`.
pub fn rihaczek(f: &Signal, g: &Signal) -> Result<PhaseFunction> {
    f.group().ensure_same(g.group())?;
    let group = f.group();
    let gh = g.fourier();
    Ok(PhaseFunction::from_fn(group.clone(), |x, xi| {
        f.at(x) * gh.at(xi).conj() * group.char_idx(xi, x).conj()
    }))
}

/// `J(x, xi) = (-xi, x)`, mapping `G x Ĝ` onto `Ĝ x G`.
pub fn jmap(group: &Group, x: &GroupElement, xi: &DualElement) -> Result<(DualElement, GroupElement)> {
    let (xi_idx, x_idx) = jmap_idx(group, group.index_of(x)?, group.dual_index_of(xi)?);
    Ok((group.dual_at(xi_idx), group.element_at(x_idx)))
}

/// `J^{-1}(xi, x) = (x, -xi)`.
pub fn jmap_inverse(
    group: &Group,
    xi: &DualElement,
    x: &GroupElement,
) -> Result<(GroupElement, DualElement)> {
    let (x_idx, xi_idx) = jmap_inverse_idx(group, group.dual_index_of(xi)?, group.index_of(x)?);
    Ok((group.element_at(x_idx), group.dual_at(xi_idx)))
}

#[inline]
pub fn jmap_idx(group: &Group, x: usize, xi: usize) -> (usize, usize) {
    (group.neg_idx(xi), x)
}

#[inline]
pub fn jmap_inverse_idx(group: &Group, xi: usize, x: usize) -> (usize, usize) {
    (x, group.neg_idx(xi))
}

/// Max pointwise defect of
/// `R(pi(x,xi) f, pi(y,eta) g) = <eta, x-y> M_{J(y-x)} T_(x,eta) R(f, g)`.
pub fn rihaczek_covariance_residual(
    f: &Signal,
    g: &Signal,
    point_x: (&GroupElement, &DualElement),
    point_y: (&GroupElement, &DualElement),
) -> Result<f64> {
    let group = f.group();
    let (x, xi) = (group.index_of(point_x.0)?, group.dual_index_of(point_x.1)?);
    let (y, eta) = (group.index_of(point_y.0)?, group.dual_index_of(point_y.1)?);
    let lhs = rihaczek(&f.tf_shift_idx(x, xi), &g.tf_shift_idx(y, eta))?;
    let (omega, u) = jmap_idx(group, group.sub_idx(y, x), group.sub_idx(eta, xi));
    let rhs = rihaczek(f, g)?
        .translate_idx(x, eta)
        .modulate_idx(omega, u)
        .scale(group.char_idx(eta, group.sub_idx(x, y)));
    Ok(lhs.max_abs_diff(&rhs))
}

/// A finite combination `sum_k a_k pi(x_k, xi_k) phi` of shifted Gaussians.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TestFunction {
    pub terms: Vec<(Complex64, GroupElement, DualElement)>,
}

impl TestFunction {
    pub fn new(terms: Vec<(Complex64, GroupElement, DualElement)>) -> Self {
        TestFunction { terms }
    }

    pub fn gaussian(group: &Group) -> Self {
        TestFunction {
            terms: vec![(Complex64::new(1.0, 0.0), group.identity(), group.dual_identity())],
        }
    }

    pub fn materialize(&self, group: &Arc<Group>) -> Result<Signal> {
        let phi = gaussian_window(group);
        let mut out = Signal::zeros(group.clone());
        for (a, x, xi) in &self.terms {
            out = &out + &phi.tf_shift(x, xi)?.scale(*a);
        }
        Ok(out)
    }

    fn indexed(&self, group: &Group) -> Result<Vec<(Complex64, usize, usize)>> {
        self.terms
            .iter()
            .map(|(a, x, xi)| Ok((*a, group.index_of(x)?, group.dual_index_of(xi)?)))
            .collect()
    }
}

/// `V_phi phi` in closed form `c(K) chi_{K x K^perp}`, with `c(K)` read off
/// as `V_phi phi(e, ê)` rather than assumed.
pub fn gaussian_stft(group: &Arc<Group>) -> PhaseFunction {
    let phi = gaussian_window(group);
    let c = stft_at(&phi, &phi, 0, 0);
    PhaseFunction::from_fn(group.clone(), |x, xi| {
        if group.in_subgroup(x) && group.in_annihilator(xi) {
            c
        } else {
            ZERO
        }
    })
}

/// STFT of two test functions from the double-sum closed form
/// `sum_k sum_j a_k conj(b_j <xi - w_k, u_k>) <eta_j, x - u_k> T_{u_k - y_j} V_phi phi (x, xi)`.
pub fn testfunction_stft(
    group: &Arc<Group>,
    f: &TestFunction,
    g: &TestFunction,
) -> Result<PhaseFunction> {
    let vpp = gaussian_stft(group);
    let (fk, gj) = (f.indexed(group)?, g.indexed(group)?);
    Ok(PhaseFunction::from_fn(group.clone(), |x, xi| {
        let mut acc = ZERO;
        for &(a, u, omega) in &fk {
            for &(b, y, eta) in &gj {
                let phase = (b * group.char_idx(group.sub_idx(xi, omega), u)).conj()
                    * group.char_idx(eta, group.sub_idx(x, u));
                let v = vpp.at(
                    group.sub_idx(x, group.sub_idx(u, y)),
                    group.sub_idx(xi, group.sub_idx(omega, eta)),
                );
                acc += a * phase * v;
            }
        }
        acc
    }))
}

/// Cross-Rihaczek distribution of two test functions from the covariance
/// property: `sum_k sum_j a_k conj(b_j) <eta_j, u_k - y_j> M_{J(y_j - u_k)} T_(u_k, eta_j) R(phi, phi)`.
pub fn testfunction_rihaczek(
    group: &Arc<Group>,
    f: &TestFunction,
    g: &TestFunction,
) -> Result<PhaseFunction> {
    let phi = gaussian_window(group);
    let rpp = rihaczek(&phi, &phi)?;
    let (fk, gj) = (f.indexed(group)?, g.indexed(group)?);
    let mut out = PhaseFunction::zeros(group.clone());
    for &(a, u, omega) in &fk {
        for &(b, y, eta) in &gj {
            let (mw, mu) = jmap_idx(group, group.sub_idx(y, u), group.sub_idx(eta, omega));
            let term = rpp
                .translate_idx(u, eta)
                .modulate_idx(mw, mu)
                .scale(a * b.conj() * group.char_idx(eta, group.sub_idx(u, y)));
            out = &out + &term;
        }
    }
    Ok(out)
}

/// Max defect of the product formula
/// `V_{R(psi,psi)} R(g,f)((x,xi),(w,u)) = conj<xi,u> V_psi g(x, xi+w) conj(V_psi f(x+u, xi))`,
/// where the left side is the STFT on the group `G x Ĝ`.
pub fn magic_formula_residual(psi: &Signal, f: &Signal, g: &Signal) -> Result<f64> {
    psi.group().ensure_same(f.group())?;
    psi.group().ensure_same(g.group())?;
    let group = psi.group();
    let n = group.order();
    let phase_group = group.phase_space();
    let window = rihaczek(psi, psi)?.to_signal_on(&phase_group)?;
    let target = rihaczek(g, f)?.to_signal_on(&phase_group)?;
    let lhs = stft(&target, &window)?;
    let vg = stft(g, psi)?;
    let vf = stft(f, psi)?;
    let mut worst = 0.0f64;
    for x in 0..n {
        for xi in 0..n {
            let point = group.phase_index(x, xi);
            for omega in 0..n {
                for u in 0..n {
                    let dual_point = group.phase_index(omega, u);
                    let rhs = group.char_idx(xi, u).conj()
                        * vg.at(x, group.add_idx(xi, omega))
                        * vf.at(group.add_idx(x, u), xi).conj();
                    worst = worst.max((lhs.at(point, dual_point) - rhs).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Checks `g` is not identically zero.
pub(crate) fn require_window(g: &Signal) -> Result<()> {
    if g.is_zero() {
        Err(Error::ZeroWindow)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;
    use crate::random::SeededRng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gaussian_window_examples() {
        let z4 = make_group(&[4], &[2]).unwrap();
        let phi = gaussian_window(&z4);
        assert_eq!(phi.values(), &[c(1.0), c(0.0), c(1.0), c(0.0)]);
        let disc = make_group(&[5], &[5]).unwrap();
        assert_eq!(gaussian_window(&disc), Signal::delta(disc.clone(), 0));
        let g = make_group(&[6, 4], &[3, 2]).unwrap();
        let direct: f64 = (0..g.order()).filter(|&x| g.in_subgroup(x)).count() as f64;
        assert!((gaussian_window(&g).norm_sqr() - direct * g.mass_g()).abs() < 1e-14);
    }

    #[test]
    fn gaussian_circ_examples() {
        let z4 = make_group(&[4], &[2]).unwrap();
        assert_eq!(gaussian_circ(&z4).values(), &[c(2.0), c(0.0), c(2.0), c(0.0)]);
        let trivial = make_group(&[1], &[1]).unwrap();
        assert_eq!(gaussian_circ(&trivial).values(), &[c(1.0)]);
    }

    #[test]
    fn gaussian_stft_is_supported_on_k_times_kperp() {
        for (f, d) in [(vec![4], vec![2]), (vec![6], vec![3]), (vec![6, 2], vec![3, 1])] {
            let g = make_group(&f, &d).unwrap();
            let phi = gaussian_window(&g);
            let v = stft(&phi, &phi).unwrap();
            let ck = g.subgroup_order() as f64 * g.mass_g();
            for x in 0..g.order() {
                for xi in 0..g.order() {
                    let inside = g.in_subgroup(x) && g.in_annihilator(xi);
                    assert_eq!(v.at(x, xi) != ZERO, inside);
                    if inside {
                        assert!((v.at(x, xi) - ck).norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn stft_at_origin_is_inner_product() {
        let g = make_group(&[6], &[2]).unwrap();
        let mut rng = SeededRng::new(11);
        let (f, w) = (rng.signal(&g), rng.signal(&g));
        let v = stft(&f, &w).unwrap();
        assert!((v.at(0, 0) - f.inner(&w).unwrap()).norm() < 1e-14);
        assert!((stft_at(&f, &w, 3, 5) - v.at(3, 5)).norm() < 1e-14);
    }

    #[test]
    fn moyal_identity() {
        for (f, d) in [(vec![4], vec![2]), (vec![6], vec![3]), (vec![8], vec![2]), (vec![6, 2], vec![3, 1])] {
            let g = make_group(&f, &d).unwrap();
            let mut rng = SeededRng::new(12);
            for _ in 0..50 {
                let (a, b) = (rng.signal(&g), rng.signal(&g));
                let v = stft(&a, &b).unwrap();
                let energy = v.norm().powi(2);
                let expected = a.norm_sqr() * b.norm_sqr();
                assert!((energy - expected).abs() <= 1e-10 * (1.0 + expected));
            }
        }
    }

    #[test]
    fn stft_is_bounded_by_norms() {
        let g = make_group(&[8], &[4]).unwrap();
        let mut rng = SeededRng::new(13);
        let (a, b) = (rng.signal(&g), rng.signal(&g));
        let bound = a.norm() * b.norm() * (1.0 + 1e-12);
        assert!(stft(&a, &b).unwrap().values().iter().all(|v| v.norm() <= bound));
    }

    #[test]
    fn shift_identity_examples() {
        let g = make_group(&[6], &[3]).unwrap();
        let mut rng = SeededRng::new(14);
        let (f, w) = (rng.signal(&g), rng.signal(&g));
        let e = g.identity();
        let eh = g.dual_identity();
        assert!(stft_shift_identity_residual(&f, &w, &e, &e, &eh, &eh).unwrap() < 1e-15);
        for _ in 0..20 {
            let u = g.element_at(rng.index(6));
            let y = g.element_at(rng.index(6));
            let om = g.dual_at(rng.index(6));
            let et = g.dual_at(rng.index(6));
            assert!(stft_shift_identity_residual(&f, &w, &u, &y, &om, &et).unwrap() <= 1e-12);
            let phi = gaussian_window(&g);
            assert!(stft_shift_identity_residual(&phi, &phi, &u, &y, &om, &et).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn stft_magnitude_covariance() {
        let g = make_group(&[4, 2], &[2, 1]).unwrap();
        let mut rng = SeededRng::new(15);
        let (f, w) = (rng.signal(&g), rng.signal(&g));
        let v = stft(&f, &w).unwrap();
        for u in 0..g.order() {
            for om in 0..g.order() {
                let lhs = stft(&f.tf_shift_idx(u, om), &w).unwrap();
                let rhs = v.translate_idx(u, om);
                for (a, b) in lhs.values().iter().zip(rhs.values()) {
                    assert!((a.norm() - b.norm()).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rihaczek_examples() {
        let g = make_group(&[6], &[3]).unwrap();
        let phi = gaussian_window(&g);
        let r = rihaczek(&phi, &phi).unwrap();
        let ck = stft_at(&phi, &phi, 0, 0);
        for x in 0..6 {
            for xi in 0..6 {
                let inside = g.in_subgroup(x) && g.in_annihilator(xi);
                let expected = if inside { ck * g.char_idx(xi, x).conj() } else { ZERO };
                assert!((r.at(x, xi) - expected).norm() < 1e-13);
            }
        }
        let d0 = Signal::delta(g.clone(), 0);
        let rd = rihaczek(&d0, &d0).unwrap();
        for x in 0..6 {
            for xi in 0..6 {
                assert!((rd.at(x, xi) - c(if x == 0 { 1.0 } else { 0.0 })).norm() < 1e-15);
            }
        }
        let mut rng = SeededRng::new(16);
        let f = rng.signal(&g);
        let rf = rihaczek(&f, &f).unwrap();
        for x in 0..6 {
            let marginal: Complex64 = (0..6).map(|xi| rf.at(x, xi)).sum::<Complex64>() * g.mass_dual();
            assert!((marginal - f.at(x).norm_sqr()).norm() < 1e-13);
        }
    }

    #[test]
    fn jmap_examples() {
        let g = make_group(&[4], &[2]).unwrap();
        let (a, b) = jmap(&g, &g.identity(), &g.dual_identity()).unwrap();
        assert_eq!((a, b), (g.dual_identity(), g.identity()));
        let (a, b) = jmap(&g, &g.element(&[1]).unwrap(), &g.dual_element(&[3]).unwrap()).unwrap();
        assert_eq!(a, g.dual_element(&[1]).unwrap());
        assert_eq!(b, g.element(&[1]).unwrap());
        let h = make_group(&[3, 4], &[1, 2]).unwrap();
        for x in h.elements() {
            for xi in (0..h.order()).map(|i| h.dual_at(i)) {
                let (a, b) = jmap(&h, &x, &xi).unwrap();
                assert_eq!(jmap_inverse(&h, &a, &b).unwrap(), (x.clone(), xi));
            }
        }
    }

    #[test]
    fn rihaczek_covariance() {
        let g = make_group(&[4], &[2]).unwrap();
        let mut rng = SeededRng::new(17);
        let (f, w) = (rng.signal(&g), rng.signal(&g));
        let (e, eh) = (g.identity(), g.dual_identity());
        assert!(rihaczek_covariance_residual(&f, &w, (&e, &eh), (&e, &eh)).unwrap() < 1e-15);
        for _ in 0..30 {
            let x = g.element_at(rng.index(4));
            let xi = g.dual_at(rng.index(4));
            let y = g.element_at(rng.index(4));
            let eta = g.dual_at(rng.index(4));
            assert!(rihaczek_covariance_residual(&f, &w, (&x, &xi), (&y, &eta)).unwrap() <= 1e-12);
            assert!(rihaczek_covariance_residual(&f, &w, (&x, &xi), (&x, &xi)).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn testfunction_closed_forms() {
        let g = make_group(&[4], &[2]).unwrap();
        let single = TestFunction::gaussian(&g);
        let phi = gaussian_window(&g);
        let direct = stft(&phi, &phi).unwrap();
        assert!(testfunction_stft(&g, &single, &single).unwrap().max_abs_diff(&direct) < 1e-13);

        let empty = TestFunction::default();
        assert!(testfunction_stft(&g, &empty, &single).unwrap().is_zero());

        let mut rng = SeededRng::new(18);
        for _ in 0..20 {
            let mk = |rng: &mut SeededRng| {
                TestFunction::new(
                    (0..2)
                        .map(|_| (rng.complex(), g.element_at(rng.index(4)), g.dual_at(rng.index(4))))
                        .collect(),
                )
            };
            let (tf, tg) = (mk(&mut rng), mk(&mut rng));
            let (f, w) = (tf.materialize(&g).unwrap(), tg.materialize(&g).unwrap());
            let closed = testfunction_stft(&g, &tf, &tg).unwrap();
            assert!(closed.max_abs_diff(&stft(&f, &w).unwrap()) <= 1e-11);
            let closed_r = testfunction_rihaczek(&g, &tf, &tg).unwrap();
            assert!(closed_r.max_abs_diff(&rihaczek(&f, &w).unwrap()) <= 1e-11);
        }
    }

    #[test]
    fn magic_formula_examples() {
        let g = make_group(&[4], &[2]).unwrap();
        let phi = gaussian_window(&g);
        assert!(magic_formula_residual(&phi, &phi, &phi).unwrap() <= 1e-10);
        let mut rng = SeededRng::new(19);
        let zero = Signal::zeros(g.clone());
        let f = rng.signal(&g);
        assert_eq!(magic_formula_residual(&phi, &zero, &f).unwrap(), 0.0);
        for _ in 0..5 {
            let (f, w) = (rng.signal(&g), rng.signal(&g));
            assert!(magic_formula_residual(&phi, &f, &w).unwrap() <= 1e-10);
            let psi = rng.signal(&g);
            assert!(magic_formula_residual(&psi, &f, &w).unwrap() <= 1e-10);
        }
    }
}
