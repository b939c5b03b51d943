//! The Poisson algebra `P(2r)`: `A_{2r}` with the bracket
//! `{f, g} = sum_i (d_i f d_{i+r} g - d_{i+r} f d_i g)`, its p-map, the
//! Hamiltonian map `D_H`, the algebra `l_r` and the automorphisms
//! `f -> f + lambda(f)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{Echelon, Matrix};
use crate::restricted::RestrictedAlgebra;
use crate::truncpoly::{monomial_basis, Mono, TruncPoly};
use crate::witt::Derivation;

/// Which p-map the one-dimensional center carries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterKind {
    /// `1^[p] = 1`.
    #[default]
    Toral,
    /// `1^[p] = 0`.
    Unipotent,
}

impl std::str::FromStr for CenterKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toral" => Ok(CenterKind::Toral),
            "unipotent" => Ok(CenterKind::Unipotent),
            other => Err(Error::UnsupportedKind(format!("center {other}"))),
        }
    }
}

/// The Poisson bracket on `A_{2r}`.
pub fn poisson_bracket(f: &TruncPoly, g: &TruncPoly) -> Result<TruncPoly> {
    if f.field() != g.field() {
        return Err(Error::ModulusMismatch { left: f.p(), right: g.p() });
    }
    if f.nvars() != g.nvars() {
        return Err(Error::ArityMismatch { left: f.nvars(), right: g.nvars() });
    }
    if f.nvars() % 2 != 0 {
        return Err(Error::ParityError(format!("P(2r) needs an even number of variables, got {}", f.nvars())));
    }
    let r = f.nvars() / 2;
    let mut acc = TruncPoly::zero(f.field(), f.nvars());
    for i in 0..r {
        let a = f.partial_unchecked(i).mul(&g.partial_unchecked(i + r));
        let b = f.partial_unchecked(i + r).mul(&g.partial_unchecked(i));
        acc = acc.add(&a).sub(&b);
    }
    Ok(acc)
}

/// `D_H(f) = sum_i (d_i f) d_{i+r} - (d_{i+r} f) d_i`, so `D_H(f)(g) = {f, g}`.
pub fn hamiltonian_map(f: &TruncPoly) -> Result<Derivation> {
    let n = f.nvars();
    if n % 2 != 0 || n == 0 {
        return Err(Error::ParityError(format!("D_H needs an even number of variables, got {n}")));
    }
    let r = n / 2;
    let mut coeffs = vec![TruncPoly::zero(f.field(), n); n];
    for i in 0..r {
        coeffs[i + r] = f.partial_unchecked(i);
        coeffs[i] = f.partial_unchecked(i + r).neg();
    }
    Derivation::new(coeffs)
}

/// `P(2r)` with a chosen center kind, carrying its structure constants on
/// the monomial basis.
#[derive(Clone, Debug)]
pub struct Poisson {
    field: PrimeField,
    r: usize,
    center: CenterKind,
    algebra: RestrictedAlgebra,
}

impl Poisson {
    pub fn new(field: PrimeField, r: usize, center: CenterKind) -> Result<Self> {
        if r == 0 {
            return Err(Error::DimensionMismatch("P(2r) needs r >= 1".into()));
        }
        let n = 2 * r;
        let basis: Vec<TruncPoly> = monomial_basis(field, n)
            .iter()
            .map(|a| TruncPoly::monomial(field, &a.0, 1))
            .collect::<Result<_>>()?;
        let dim = basis.len();
        let mut sc = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let b = poisson_bracket(&basis[i], &basis[j])?;
                for &(m, c) in b.raw_terms() {
                    sc.push((i, j, m.rank(n, field.p()), c));
                }
            }
        }
        let pmap = basis.iter().map(|m| monomial_p_map(m, r, center).to_dense()).collect();
        let labels = basis.iter().map(|m| m.to_string()).collect();
        let algebra = RestrictedAlgebra::new_unverified(field, labels, &sc, pmap)?;
        Ok(Poisson { field, r, center, algebra })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn nvars(&self) -> usize {
        2 * self.r
    }

    pub fn center(&self) -> CenterKind {
        self.center
    }

    pub fn algebra(&self) -> &RestrictedAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    fn check(&self, f: &TruncPoly) -> Result<()> {
        if f.field() != self.field {
            return Err(Error::ModulusMismatch { left: f.p(), right: self.field.p() });
        }
        if f.nvars() != self.nvars() {
            return Err(Error::ArityMismatch { left: f.nvars(), right: self.nvars() });
        }
        Ok(())
    }

    pub fn bracket(&self, f: &TruncPoly, g: &TruncPoly) -> Result<TruncPoly> {
        self.check(f)?;
        self.check(g)?;
        poisson_bracket(f, g)
    }

    pub fn p_power(&self, f: &TruncPoly) -> Result<TruncPoly> {
        self.check(f)?;
        let v = self.algebra.p_power_general(&f.to_dense());
        Ok(self.from_coords(&v))
    }

    pub fn from_coords(&self, v: &[u32]) -> TruncPoly {
        TruncPoly::from_dense(self.field, self.nvars(), v)
    }

    /// `P(2r)^(1)`, the span of all brackets of monomials.
    pub fn derived_subalgebra(&self) -> Echelon {
        let dim = self.dim();
        let mut e = Echelon::new(self.field, dim);
        for i in 0..dim {
            for j in i + 1..dim {
                e.insert(self.algebra.basis_bracket(i, j));
                if e.rank() == dim {
                    return e;
                }
            }
        }
        e
    }

    /// The automorphism `f -> f + lambda(f) 1` for a linear form `lambda`
    /// (coefficients on the monomial basis) vanishing on `P(2r)^(1)`.
    pub fn phi_lambda(&self, lambda: &[u32]) -> Result<PhiLambda> {
        if lambda.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("form of length {} on a {}-dimensional space", lambda.len(), self.dim())));
        }
        let derived = self.derived_subalgebra();
        for b in derived.basis() {
            let v: u64 = b.iter().zip(lambda).map(|(&x, &l)| (x * l) as u64).sum();
            if v % self.field.p() as u64 != 0 {
                return Err(Error::InvalidForm);
            }
        }
        Ok(PhiLambda { field: self.field, n: self.nvars(), lambda: lambda.iter().map(|&c| c % self.field.p()).collect() })
    }

    /// Serializes an element with its context.
    pub fn element_json(&self, f: &TruncPoly) -> serde_json::Value {
        let mut v = serde_json::to_value(f).expect("serializable");
        let obj = v.as_object_mut().expect("object");
        obj.insert("structure".into(), "poisson".into());
        obj.insert("r".into(), self.r.into());
        obj.insert("center".into(), serde_json::to_value(self.center).expect("serializable"));
        v
    }
}

/// p-map on a monomial: `x^a` is toral for `a = e_i + e_{i+r}` and for
/// `a = 0` with a toral center, and is sent to zero otherwise.
pub fn monomial_p_map(m: &TruncPoly, r: usize, center: CenterKind) -> TruncPoly {
    let field = m.field();
    let n = 2 * r;
    assert_eq!(m.len(), 1, "expects a single monomial");
    let mono = m.raw_terms()[0].0;
    if mono == Mono(0) {
        return match center {
            CenterKind::Toral => m.clone(),
            CenterKind::Unipotent => TruncPoly::zero(field, n),
        };
    }
    for i in 0..r {
        if mono == Mono::unit(i).mul(Mono::unit(i + r), field.p()).expect("degree 2") {
            return m.clone();
        }
    }
    TruncPoly::zero(field, n)
}

/// `f -> f + lambda(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiLambda {
    field: PrimeField,
    n: usize,
    lambda: Vec<u32>,
}

impl PhiLambda {
    pub fn apply(&self, f: &TruncPoly) -> TruncPoly {
        let v: u64 = f.to_dense().iter().zip(&self.lambda).map(|(&x, &l)| (x * l) as u64).sum();
        let c = (v % self.field.p() as u64) as i64;
        f.add(&TruncPoly::constant(self.field, self.n, c))
    }

    pub fn matrix(&self) -> Matrix {
        let dim = self.lambda.len();
        let cols: Vec<Vec<u32>> = (0..dim)
            .map(|j| {
                let mut e = vec![0u32; dim];
                e[j] = 1;
                self.apply(&TruncPoly::from_dense(self.field, self.n, &e)).to_dense()
            })
            .collect();
        Matrix::from_columns(self.field, &cols, dim)
    }
}

/// The abstract algebra `l_r` with basis `z, x_1, t_1, ..., t_r`:
/// `[t_i, x_1] = delta_{i1} x_1`, `t_i^[p] = t_i`, `x_1^[p] = z = z^[p]`.
pub fn build_lr(field: PrimeField, r: usize) -> Result<RestrictedAlgebra> {
    if r == 0 {
        return Err(Error::DimensionMismatch("l_r needs r >= 1".into()));
    }
    let dim = r + 2;
    let mut labels = vec!["z".to_string(), "x1".to_string()];
    labels.extend((1..=r).map(|i| format!("t{i}")));
    // [x_1, t_1] = -x_1
    let sc = vec![(1, 2, 1, field.p() - 1)];
    let mut pmap = vec![vec![0u32; dim]; dim];
    pmap[0][0] = 1;
    pmap[1][0] = 1;
    for i in 2..dim {
        pmap[i][i] = 1;
    }
    RestrictedAlgebra::new(field, labels, &sc, pmap)
}

/// Images of `z, x_1, t_1, ..., t_r` in `P(2r)`:
/// `1`, `1 + x_{r+1}`, `x_i (1 + x_{i+r})`.
pub fn l_images(field: PrimeField, r: usize) -> Vec<TruncPoly> {
    let n = 2 * r;
    let mut out = vec![TruncPoly::one(field, n), TruncPoly::xi(field, n, r)];
    for i in 0..r {
        out.push(TruncPoly::var(field, n, i).mul(&TruncPoly::xi(field, n, i + r)));
    }
    out
}

/// The subalgebra `l` of `P(2r)` together with the verified isomorphism
/// from `l_r` (given by [`l_images`]).
pub fn realize_l_in_poisson(p: &Poisson) -> Result<(Echelon, Vec<TruncPoly>)> {
    let field = p.field();
    let lr = build_lr(field, p.r())?;
    let images = l_images(field, p.r());
    let image_of = |v: &[u32]| {
        let mut acc = TruncPoly::zero(field, p.nvars());
        for (c, f) in v.iter().zip(&images) {
            acc = acc.add(&f.scale(*c));
        }
        acc
    };
    for i in 0..lr.dim() {
        for j in 0..lr.dim() {
            let lhs = p.bracket(&images[i], &images[j])?;
            let rhs = image_of(&lr.basis_bracket(i, j));
            if lhs != rhs {
                return Err(Error::verification(
                    "l_r realization",
                    format!("[{}, {}]: {} vs {}", lr.labels()[i], lr.labels()[j], lhs, rhs),
                ));
            }
        }
        let lhs = p.p_power(&images[i])?;
        let rhs = image_of(lr.basis_p_map(i));
        if lhs != rhs {
            return Err(Error::verification("l_r realization", format!("{}^[p]: {} vs {}", lr.labels()[i], lhs, rhs)));
        }
    }
    let span = Echelon::from_vectors(field, p.dim(), &images.iter().map(|f| f.to_dense()).collect::<Vec<_>>());
    if span.rank() != lr.dim() {
        return Err(Error::verification("l_r realization", "images are linearly dependent"));
    }
    Ok((span, images))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn canonical_pairs() {
        let f = f3();
        for r in 1..=2 {
            let n = 2 * r;
            for i in 0..r {
                let b = poisson_bracket(&TruncPoly::var(f, n, i), &TruncPoly::var(f, n, i + r)).unwrap();
                assert_eq!(b, TruncPoly::one(f, n));
            }
        }
    }

    #[test]
    fn hamiltonian_kills_constants() {
        let f = f3();
        assert!(hamiltonian_map(&TruncPoly::one(f, 2)).unwrap().is_zero());
    }

    #[test]
    fn p_map_examples() {
        let f = f3();
        let p = Poisson::new(f, 1, CenterKind::Toral).unwrap();
        let x1x2 = TruncPoly::monomial(f, &[1, 1], 1).unwrap();
        assert_eq!(p.p_power(&x1x2).unwrap(), x1x2);
        assert_eq!(p.p_power(&TruncPoly::xi(f, 2, 1)).unwrap(), TruncPoly::one(f, 2));
        let t = TruncPoly::var(f, 2, 0).mul(&TruncPoly::xi(f, 2, 1));
        assert_eq!(p.p_power(&t).unwrap(), t);
        p.algebra().verify().unwrap();
        let u = Poisson::new(f, 1, CenterKind::Unipotent).unwrap();
        assert!(u.p_power(&TruncPoly::one(f, 2)).unwrap().is_zero());
    }

    #[test]
    fn lr_relations() {
        let f = f3();
        let lr = build_lr(f, 2).unwrap();
        assert_eq!(lr.basis_bracket(2, 1), lr.unit(1));
        for r in 1..=2 {
            let p = Poisson::new(f, r, CenterKind::Toral).unwrap();
            let (span, _) = realize_l_in_poisson(&p).unwrap();
            assert_eq!(span.rank(), r + 2);
        }
    }

    #[test]
    fn derived_has_codimension_one() {
        let f = f3();
        let p = Poisson::new(f, 1, CenterKind::Toral).unwrap();
        let d = p.derived_subalgebra();
        assert_eq!(d.rank(), p.dim() - 1);
        let top = TruncPoly::monomial(f, &[2, 2], 1).unwrap();
        assert!(!d.contains(&top.to_dense()));
        let mut lambda = vec![0u32; p.dim()];
        lambda[p.dim() - 1] = 1;
        assert!(p.phi_lambda(&lambda).is_ok());
        let mut bad = vec![0u32; p.dim()];
        bad[1] = 1;
        assert_eq!(p.phi_lambda(&bad), Err(Error::InvalidForm));
    }
}
