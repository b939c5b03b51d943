//! Standard tori and their root space decompositions at p = 3.

use rlct::{agt2_torus, Family, PrimeField};

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    for (family, n) in [(Family::W, 2), (Family::S, 3), (Family::H, 4)] {
        let t = agt2_torus(f, family, n)?;
        let w = t.adjoint_weights()?;
        println!("{}: dim {}, f0 = {}, generators {:?}", t.label(), t.dim(), t.f0(), t.generators());
        for e in w.entries() {
            println!("  weight {:?}: dim {}", e.lambda, e.dim);
        }
    }
    let k = agt2_torus(f, Family::K, 3)?;
    println!("{}: dim {}, f0 = {}", k.label(), k.dim(), k.f0());
    for note in k.notes() {
        println!("  note: {note}");
    }
    Ok(())
}
