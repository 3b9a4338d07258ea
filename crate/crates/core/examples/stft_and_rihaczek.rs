//! STFT of the Gaussian window and a Rihaczek distribution on `Z_8`.

use lca_tfa::group::make_group;
use lca_tfa::random::SeededRng;
use lca_tfa::tfa::{gaussian_window, magic_formula_residual, rihaczek, stft};

fn main() -> lca_tfa::error::Result<()> {
    let g = make_group(&[8], &[4])?;
    let phi = gaussian_window(&g);
    let v = stft(&phi, &phi)?;
    println!("support of V_phi phi (x, xi):");
    for x in 0..g.order() {
        for xi in 0..g.order() {
            if v.at(x, xi).norm() > 0.0 {
                println!("  ({x}, {xi}) -> {:.3}", v.at(x, xi));
            }
        }
    }

    let mut rng = SeededRng::new(1);
    let (f, h) = (rng.signal(&g), rng.signal(&g));
    let energy = stft(&f, &h)?.norm().powi(2);
    println!("||V_h f||^2 = {energy:.6}, ||f||^2 ||h||^2 = {:.6}", f.norm_sqr() * h.norm_sqr());
    let r = rihaczek(&f, &h)?;
    println!("R(f, h)(0, 0) = {:.4}", r.at(0, 0));
    println!("STFT of a Rihaczek distribution, residual {:.2e}", magic_formula_residual(&phi, &f, &h)?);
    Ok(())
}
