//! Time-frequency concentration of localization eigenfunctions against random vectors.

use lca_tfa::group::make_group;
use lca_tfa::operators::localization_matrix;
use lca_tfa::random::SeededRng;
use lca_tfa::spectral::{bump_symbol, decay_comparison, random_hermitian};
use lca_tfa::tfa::gaussian_window;

fn main() -> lca_tfa::error::Result<()> {
    let g = make_group(&[32], &[4])?;
    let phi = gaussian_window(&g);
    let a = bump_symbol(&g, g.subgroup_order(), g.annihilator_order());
    let m = localization_matrix(&a, &phi, &phi)?;
    let report = decay_comparison(&m, &phi, &[0.5, 1.0, 2.0], 200, 11, 4)?;
    for (k, (value, pct)) in report.eigenvalues.iter().zip(&report.percentiles).enumerate() {
        println!("eigenfunction {k}: lambda = {value:.5}, percentile {pct:.1}");
    }
    let control = random_hermitian(&g, &mut SeededRng::new(11));
    let report = decay_comparison(&control, &phi, &[], 200, 11, 8)?;
    println!("random Hermitian control: mean percentile {:.1}", report.mean_percentile());
    Ok(())
}
