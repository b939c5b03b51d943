//! Jacobson's formula and the Jordan-Chevalley decomposition in W(2).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rlct::linalg::add_vec;
use rlct::{PrimeField, RestrictedAlgebra};

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    let w = RestrictedAlgebra::witt(f, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = w.random_element(&mut rng);
    let y = w.random_element(&mut rng);

    let mut rhs = add_vec(f, &w.p_power(&x), &w.p_power(&y));
    for s in w.jacobson_s_terms(&x, &y) {
        rhs = add_vec(f, &rhs, &s);
    }
    println!("(x+y)^[p] by operator power equals Jacobson's formula: {}", w.p_power(&add_vec(f, &x, &y)) == rhs);

    let cl = w.p_closure(&x);
    let real = w.realization().expect("W(2) is realized");
    println!("dim (kx)_p = {} (toral part {}, nilpotent part {})", cl.dim(), cl.torus.len(), cl.nil.len());
    println!("x_s = {}", real.to_derivation(&cl.x_s));
    println!("x_n = {}", real.to_derivation(&cl.x_n));
    println!("minimal p-polynomial coefficients: {:?}", w.minimal_p_polynomial(&x).coeffs());
    Ok(())
}
