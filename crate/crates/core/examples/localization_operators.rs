//! Localization operators and their Kohn-Nirenberg symbols.

use lca_tfa::group::make_group;
use lca_tfa::operators::{loc_kn_residual, localization_matrix};
use lca_tfa::random::SeededRng;
use lca_tfa::spectral::{bump_symbol, hermitian_eigen};
use lca_tfa::tfa::gaussian_window;

fn main() -> lca_tfa::error::Result<()> {
    let g = make_group(&[16], &[4])?;
    let phi = gaussian_window(&g);
    let a = bump_symbol(&g, 4, 4);
    let m = localization_matrix(&a, &phi, &phi)?;
    println!("Hermitian defect {:.2e}", m.hermitian_defect());
    println!("symbol identity residual {:.2e}", loc_kn_residual(&a, &phi, &phi)?);
    let pairs = hermitian_eigen(&m)?;
    let top: Vec<String> = pairs.iter().take(5).map(|p| format!("{:.5}", p.value)).collect();
    println!("leading eigenvalues {}", top.join(" "));

    let mut rng = SeededRng::new(5);
    let (p1, p2) = (rng.signal(&g), rng.signal(&g));
    let b = rng.phase_function(&g);
    println!("random windows, symbol identity residual {:.2e}", loc_kn_residual(&b, &p1, &p2)?);
    Ok(())
}
