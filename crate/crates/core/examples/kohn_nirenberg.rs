//! Kohn-Nirenberg operators, their kernels and Gabor matrices.

use lca_tfa::gabor::QuasiLattice;
use lca_tfa::group::make_group;
use lca_tfa::operators::{
    gabor_matrix, gabor_matrix_closed_form, kernel_identity_residual, kn_apply, kn_weak_residual,
};
use lca_tfa::random::SeededRng;
use lca_tfa::tfa::gaussian_window;

fn main() -> lca_tfa::error::Result<()> {
    let g = make_group(&[6], &[3])?;
    let mut rng = SeededRng::new(7);
    let sigma = rng.phase_function(&g);
    let (f, h) = (rng.signal(&g), rng.signal(&g));
    println!("Op(sigma) f = {:?}", kn_apply(&sigma, &f)?.values().iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    println!("weak form residual {:.2e}", kn_weak_residual(&sigma, &f, &h)?);
    println!("kernel residual    {:.2e}", kernel_identity_residual(&sigma, &f, &h)?);

    let phi = gaussian_window(&g);
    let points = QuasiLattice::canonical(g.clone()).points().to_vec();
    let direct = gabor_matrix(&sigma, &phi, &points)?;
    let closed = gabor_matrix_closed_form(&sigma, &phi, &points)?;
    println!("Gabor matrix {}x{}, closed form deviation {:.2e}", points.len(), points.len(), direct.max_abs_diff(&closed));
    Ok(())
}
