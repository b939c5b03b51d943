//! The contact algebra on the carrier `A_n`, `n = 2r + 1`.
//!
//! `K''(n)` is computed from the form condition, and identified with `A_n`
//! through `Theta_0(D) = omega_K(D)`. The bracket on `A_n` is pulled back
//! along `f -> Theta_0^{-1}(c f)`, where the scalar `c` is fixed at build
//! time by requiring `<1 + x_n, x_r x_{2r} (1 + x_n)> = 2 x_r x_{2r} (1 + x_n)`.

use crate::cartan::{contact_condition, SubalgebraBasis};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::forms::{cartan_form, DiffForm, FormKind};
use crate::linalg::{Echelon, Matrix};
use crate::restricted::RestrictedAlgebra;
use crate::truncpoly::{monomial_basis, TruncPoly};
use crate::witt::Derivation;

#[derive(Clone, Debug)]
pub struct Contact {
    field: PrimeField,
    r: usize,
    kpp: SubalgebraBasis,
    omega: DiffForm,
    /// Columns: `Theta_0^{-1}(x^a)` in `W(n)` coordinates, for the monomial basis.
    inverse_images: Vec<Derivation>,
    scale: u32,
    algebra: RestrictedAlgebra,
}

impl Contact {
    pub fn build(field: PrimeField, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::DimensionMismatch("the contact algebra needs r >= 1".into()));
        }
        let n = 2 * r + 1;
        let kpp = contact_condition(field, n)?;
        let omega = cartan_form(field, FormKind::K, n)?;
        let m = TruncPoly::dim(field, n);
        if kpp.dim() != m {
            return Err(Error::ContactNormalizationError(format!("dim K''({n}) = {} differs from dim A_n = {m}", kpp.dim())));
        }
        let basis = kpp.basis();
        let cols: Vec<Vec<u32>> = basis
            .iter()
            .map(|d| omega.eval_one_form(d).map(|u| u.to_dense()))
            .collect::<Result<_>>()?;
        let theta = Matrix::from_columns(field, &cols, m);
        let inv = theta
            .inverse()
            .map_err(|_| Error::ContactNormalizationError("omega_K(.) is not injective on K''(n)".into()))?;
        let inverse_images: Vec<Derivation> = (0..m)
            .map(|a| {
                let mut acc = Derivation::zero(field, n);
                for (k, d) in basis.iter().enumerate() {
                    let c = inv[(k, a)];
                    if c != 0 {
                        acc = acc.add(&d.scale(c));
                    }
                }
                acc
            })
            .collect();

        let mut ctx = Contact {
            field,
            r,
            kpp,
            omega,
            inverse_images,
            scale: 1,
            algebra: RestrictedAlgebra::new_unverified(field, vec![], &[], vec![])?,
        };
        let a = TruncPoly::xi(field, n, n - 1);
        let b = ctx.xr_x2r().mul(&a);
        let target = b.scale(2);
        let raw = ctx.theta0(&ctx.theta0_inv(&a).bracket(&ctx.theta0_inv(&b)));
        let scale = field
            .elements()
            .skip(1)
            .find(|&c| raw.scale(c) == target)
            .ok_or_else(|| Error::ContactNormalizationError(format!("no scalar maps {raw} to {target}")))?;
        ctx.scale = scale;
        let images: Vec<Derivation> = ctx.inverse_images.iter().map(|d| d.scale(scale)).collect();
        let labels = monomial_basis(field, n).iter().map(|a| format!("x^{:?}", a.0)).collect();
        ctx.algebra = RestrictedAlgebra::from_derivations(labels, images)?;
        Ok(ctx)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn nvars(&self) -> usize {
        2 * self.r + 1
    }

    /// The normalizing scalar `c`.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn kpp(&self) -> &SubalgebraBasis {
        &self.kpp
    }

    /// `A_n` with the contact bracket and p-map, on the monomial basis.
    pub fn algebra(&self) -> &RestrictedAlgebra {
        &self.algebra
    }

    fn xr_x2r(&self) -> TruncPoly {
        let n = self.nvars();
        TruncPoly::var(self.field, n, self.r - 1).mul(&TruncPoly::var(self.field, n, 2 * self.r - 1))
    }

    /// `Theta_0(D) = omega_K(D)`.
    pub fn theta0(&self, d: &Derivation) -> TruncPoly {
        self.omega.eval_one_form(d).expect("1-form")
    }

    /// The unique `D` in `K''(n)` with `omega_K(D) = f`.
    pub fn theta0_inv(&self, f: &TruncPoly) -> Derivation {
        let mut acc = Derivation::zero(self.field, self.nvars());
        for (a, c) in f.to_dense().iter().enumerate() {
            if *c != 0 {
                acc = acc.add(&self.inverse_images[a].scale(*c));
            }
        }
        acc
    }

    /// The derivation identified with `f`: `Theta_0^{-1}(c f)`.
    pub fn to_derivation(&self, f: &TruncPoly) -> Derivation {
        self.theta0_inv(&f.scale(self.scale))
    }

    /// `<f, g>`.
    pub fn bracket(&self, f: &TruncPoly, g: &TruncPoly) -> TruncPoly {
        let d = self.theta0_inv(f).bracket(&self.theta0_inv(g));
        self.theta0(&d).scale(self.scale)
    }

    /// `f^[p] = Theta_0((Theta_0^{-1} f)^p)`; the normalizing scalar drops out.
    pub fn p_power(&self, f: &TruncPoly) -> TruncPoly {
        self.theta0(&self.theta0_inv(f).p_power())
    }

    /// `K(n) = K''(n)^(1)` in carrier coordinates.
    pub fn derived(&self) -> Echelon {
        let dim = self.algebra.dim();
        let mut e = Echelon::new(self.field, dim);
        for i in 0..dim {
            for j in i + 1..dim {
                e.insert(self.algebra.basis_bracket(i, j));
            }
        }
        e
    }

    /// Generators `x_i (1 + x_{r+i})` and `sum_i x_i x_{r+i} - x_{2r+1}`.
    ///
    /// With `swap` the roles of `x_i` and `x_{r+i}` are exchanged, which
    /// moves the list from the convention `<x_i, x_{r+i}> = 1` to the one
    /// induced by `omega_K` here, where `<x_{r+i}, x_i> = 1`.
    pub fn agt2_torus(&self, swap: bool) -> Vec<TruncPoly> {
        let (f, n, r) = (self.field, self.nvars(), self.r);
        let (a, b) = if swap { (r, 0) } else { (0, r) };
        let mut out: Vec<TruncPoly> =
            (0..r).map(|i| TruncPoly::var(f, n, a + i).mul(&TruncPoly::xi(f, n, b + i))).collect();
        let mut last = TruncPoly::var(f, n, n - 1).neg();
        for i in 0..r {
            last = last.add(&TruncPoly::var(f, n, i).mul(&TruncPoly::var(f, n, i + r)));
        }
        out.push(last);
        out
    }

    /// Carrier degree `|a| + a_n - 2` of a monomial; the standard filtration
    /// piece of level `k` is spanned by monomials of degree `>= k`.
    pub fn filtration_span(&self, level: i32) -> Echelon {
        let n = self.nvars();
        let mut e = Echelon::new(self.field, self.algebra.dim());
        for (k, a) in monomial_basis(self.field, n).iter().enumerate() {
            let deg = a.degree() as i32 + a.0[n - 1] as i32 - 2;
            if deg >= level {
                e.insert(self.algebra.unit(k));
            }
        }
        e
    }

    pub fn element_json(&self, f: &TruncPoly) -> serde_json::Value {
        let mut v = serde_json::to_value(f).expect("serializable");
        let obj = v.as_object_mut().expect("object");
        obj.insert("structure".into(), "contact".into());
        obj.insert("r".into(), self.r.into());
        obj.insert("center".into(), "toral".into());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_values_at_p3() {
        let f = PrimeField::new(3).unwrap();
        let c = Contact::build(f, 1).unwrap();
        let n = 3;
        let xi_n = TruncPoly::xi(f, n, 2);
        let x1x2 = TruncPoly::monomial(f, &[1, 1, 0], 1).unwrap();
        assert!(c.bracket(&x1x2, &xi_n).is_zero());
        let b = x1x2.mul(&xi_n);
        assert_eq!(c.bracket(&xi_n, &b), b.scale(2));
        assert_eq!(c.p_power(&xi_n), xi_n);
        assert_eq!(c.p_power(&b), x1x2);
        assert_eq!(c.bracket(&TruncPoly::var(f, n, 1), &TruncPoly::var(f, n, 0)), TruncPoly::one(f, n));
    }

    #[test]
    fn theta_roundtrip() {
        let f = PrimeField::new(3).unwrap();
        let c = Contact::build(f, 1).unwrap();
        for a in monomial_basis(f, 3) {
            let m = TruncPoly::monomial(f, &a.0, 1).unwrap();
            let d = c.theta0_inv(&m);
            assert!(c.kpp().contains(&d));
            assert_eq!(c.theta0(&d), m);
        }
    }
}
