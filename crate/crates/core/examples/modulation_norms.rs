//! Modulation quasi-norms for several exponents and window sets, Gaussian and random windows.

use lca_tfa::group::make_group;
use lca_tfa::norms::{modulation_norm, Exponents, Weight, WindowSet};
use lca_tfa::random::SeededRng;
use lca_tfa::tfa::gaussian_window;

fn main() -> lca_tfa::error::Result<()> {
    let g = make_group(&[12], &[3])?;
    let mut rng = SeededRng::new(4);
    let f = rng.unit_signal(&g);
    let random_window = rng.unit_signal(&g);
    let weight = Weight::polynomial(&g, 1.0)?;
    let windows = [
        ("unit", WindowSet::unit(g.clone())),
        ("canonical", WindowSet::canonical(g.clone())),
    ];
    for (name, g_win) in [("gaussian", gaussian_window(&g)), ("random", random_window)] {
        println!("{name} window");
        println!("{:>6} {:>6} {:>12} {:>12}", "p", "q", windows[0].0, windows[1].0);
        for p in [0.5, 1.0, 2.0, f64::INFINITY] {
            for q in [0.5, 2.0] {
                let e = Exponents::new(p, q)?;
                let values: Vec<f64> = windows
                    .iter()
                    .map(|(_, w)| modulation_norm(&f, &g_win, e, &weight, w))
                    .collect::<Result<_, _>>()?;
                let (ps, qs) = (e.p.to_string(), e.q.to_string());
                println!("{ps:>6} {qs:>6} {:>12.5} {:>12.5}", values[0], values[1]);
            }
        }
    }
    Ok(())
}
