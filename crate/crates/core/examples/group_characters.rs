//! Characters, subgroups and coset representatives of `Z_6 x Z_2`.

use lca_tfa::group::make_group;

fn main() -> lca_tfa::error::Result<()> {
    let g = make_group(&[6, 2], &[3, 1])?;
    println!("|G| = {}, |K| = {}, |K^perp| = {}", g.order(), g.subgroup_order(), g.annihilator_order());
    println!("K = {:?}", g.subgroup());
    println!("K^perp = {:?}", g.annihilator());
    let (d1, d2) = g.coset_representatives();
    println!("time representatives {d1:?}");
    println!("frequency representatives {d2:?}");

    let xi = g.dual_element(&[1, 1])?;
    let x = g.element(&[2, 1])?;
    println!("<{xi:?}, {x:?}> = {:.4}", g.character(&xi, &x)?);
    let total: num_complex::Complex64 = (0..g.order()).map(|x| g.char_idx(3, x)).sum();
    println!("sum of a nontrivial character over G: {:.2e}", total.norm());
    Ok(())
}
