//! Every element of GL_2(F_3) acting on W(2) by a substitution that
//! normalizes the standard torus.

use rlct::tori::weyl_exhaustive;
use rlct::PrimeField;

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    let rep = weyl_exhaustive(f, 2)?;
    println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
    Ok(())
}
