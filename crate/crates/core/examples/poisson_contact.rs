//! Poisson and contact brackets on truncated polynomials.

use rlct::poisson::realize_l_in_poisson;
use rlct::{CenterKind, Contact, Poisson, PrimeField, TruncPoly};

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    let pa = Poisson::new(f, 1, CenterKind::Toral)?;
    let x1 = TruncPoly::var(f, 2, 0);
    let x2 = TruncPoly::var(f, 2, 1);
    println!("P(2): {{x1, x2}} = {}", pa.bracket(&x1, &x2)?);
    println!("P(2): (1 + x2)^[p] = {}", pa.p_power(&TruncPoly::xi(f, 2, 1))?);
    let (l, _) = realize_l_in_poisson(&pa)?;
    println!("P(2): l has dimension {}", l.rank());

    let c = Contact::build(f, 1)?;
    let xi3 = TruncPoly::xi(f, 3, 2);
    let u = TruncPoly::monomial(f, &[1, 1, 0], 1)?;
    println!("K(3): scale c = {}", c.scale());
    println!("K(3): <1 + x3, x1*x2*(1 + x3)> = {}", c.bracket(&xi3, &u.mul(&xi3)));
    println!("K(3): (x1*x2*(1 + x3))^[p] = {}", c.p_power(&u.mul(&xi3)));
    println!("K(3): x3 as a derivation: {}", c.to_derivation(&TruncPoly::var(f, 3, 2)));
    Ok(())
}
