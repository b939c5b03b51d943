//! Builds the Cartan type algebras at p = 3 and prints their dimensions.

use rlct::{build_family, witt_dim, Family, PrimeField};

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    for (family, n) in [(Family::W, 2), (Family::S, 3), (Family::H, 4), (Family::Kpp, 3), (Family::K, 3)] {
        let b = build_family(f, family, n)?;
        println!(
            "{family}({n}): dim {:>3} inside W({n}) of dim {:>3}, graded: {}",
            b.basis.dim(),
            witt_dim(f, n),
            b.graded
        );
        if let Some(w) = b.warning {
            println!("  note: {w}");
        }
    }
    Ok(())
}
