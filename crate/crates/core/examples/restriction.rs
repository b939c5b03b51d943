//! Characteristic polynomials on A_n restricted to the standard torus.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rlct::invariants::{hamiltonian_charpoly_shape, restriction_identity_check};
use rlct::{Family, PrimeField};

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (family, n, samples) in [(Family::W, 2, 200), (Family::S, 3, 500)] {
        let rep = restriction_identity_check(f, family, n, &mut rng, samples)?;
        println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
    }
    let h = hamiltonian_charpoly_shape(f, 2, &mut rng, 20)?;
    println!("H(4): {}/{} characteristic polynomials supported on T^(p^(2+i))", h.ok, h.samples);
    Ok(())
}
