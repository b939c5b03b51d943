//! The three Witt algebra embeddings, each checked on all basis pairs.

use rlct::embeddings::{phi, phi_h, sigma};
use rlct::PrimeField;

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    let (s, _) = sigma(f, 3)?;
    let (p, _) = phi(f, 2)?;
    let (h, _) = phi_h(f, 2)?;
    for m in [s, p, h] {
        println!(
            "{:<10} {} -> {}: rank {}, {} brackets and {} p-maps checked",
            m.label,
            m.source,
            m.target,
            m.rank(),
            m.pairs_checked,
            m.powers_checked
        );
    }
    Ok(())
}
