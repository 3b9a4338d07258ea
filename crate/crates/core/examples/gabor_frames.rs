//! Gabor frames on a quasi-lattice: bounds, duals and reconstruction.

use lca_tfa::error::Error;
use lca_tfa::gabor::{dual_window, expansion_residual, frame_bounds, frame_reconstruct, GaborSystem, QuasiLattice};
use lca_tfa::group::make_group;
use lca_tfa::random::SeededRng;
use lca_tfa::signal::Signal;
use lca_tfa::tfa::gaussian_window;
use num_complex::Complex64;

fn main() -> lca_tfa::error::Result<()> {
    let g = make_group(&[8], &[4])?;
    let phi = gaussian_window(&g);
    let lattice = QuasiLattice::canonical(g.clone());
    let b = frame_bounds(&phi, &lattice)?;
    println!("canonical lattice: {} points, A = {}, B = {}", lattice.len(), b.lower, b.upper);

    let f = SeededRng::new(2).signal(&g);
    let h = dual_window(&phi, &lattice)?;
    let (r1, r2) = expansion_residual(&f, &phi, &h, &lattice)?;
    println!("expansion residuals {r1:.2e} {r2:.2e}");

    let over = QuasiLattice::oversampled(g.clone(), &[(0, 0), (0, 2)]);
    let b = frame_bounds(&phi, &over)?;
    println!("oversampled: redundancy {}, A = {}, B = {}", over.redundancy(), b.lower, b.upper);

    let window = &phi + &Signal::delta(g.clone(), 1).scale(Complex64::new(0.2, 0.0));
    match dual_window(&window, &lattice) {
        Err(Error::NoGaborDual { residual }) => println!("perturbed window: no Gabor dual (residual {residual:.3})"),
        other => println!("perturbed window dual: {:?}", other.map(|s| s.norm())),
    }
    let c = GaborSystem::new(lattice.clone(), window.clone())?.analysis(&f)?;
    let back = frame_reconstruct(&c, &window, &lattice)?;
    println!("reconstruction through S^-1: {:.2e}", back.max_abs_diff(&f));

    let gap = QuasiLattice::without_time_coset(g.clone(), 1);
    println!("lattice without a coset: {:?}", frame_bounds(&phi, &gap).err());
    Ok(())
}
