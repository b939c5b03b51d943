//! Dickson invariants as coefficients of prod (T - a.x).

use rlct::invariants::dickson_report;
use rlct::PrimeField;

fn main() -> rlct::Result<()> {
    let f = PrimeField::new(3)?;
    for m in 1..=2 {
        let rep = dickson_report(f, m)?;
        println!("m = {m}: invariant {}, support on p-powers {}, degrees {}", rep.invariant, rep.vanish_off_p_powers, rep.degrees_ok);
        for (i, c) in rep.coefficients.iter().enumerate() {
            println!("  T^{}: {c}", 3usize.pow(i as u32));
        }
    }
    Ok(())
}
