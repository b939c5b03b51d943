//! The Jacobson-Witt algebra `W(n) = Der(A_n)`.
//!
//! A derivation is stored as its values on the generators,
//! `D = sum_j f_j d_j` with `f_j = D(x_j)`. The coordinate basis of `W(n)`
//! is `x^a d_j`, indexed by `j * p^n + rank(a)` where `rank` is the
//! lexicographic position of `a` among all exponent vectors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::truncpoly::{Mono, TruncPoly};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DerivationJson", into = "DerivationJson")]
pub struct Derivation {
    field: PrimeField,
    n: usize,
    coeffs: Vec<TruncPoly>,
}

#[derive(Serialize, Deserialize)]
struct DerivationJson {
    p: u32,
    n: usize,
    coeffs: Vec<TruncPoly>,
}

impl From<Derivation> for DerivationJson {
    fn from(d: Derivation) -> Self {
        DerivationJson { p: d.field.p(), n: d.n, coeffs: d.coeffs }
    }
}

impl TryFrom<DerivationJson> for Derivation {
    type Error = Error;
    fn try_from(j: DerivationJson) -> Result<Self> {
        let field = PrimeField::new(j.p)?;
        if j.coeffs.len() != j.n {
            return Err(Error::ArityMismatch { left: j.coeffs.len(), right: j.n });
        }
        for c in &j.coeffs {
            if c.field() != field {
                return Err(Error::ModulusMismatch { left: c.p(), right: j.p });
            }
        }
        Derivation::new(j.coeffs)
    }
}

impl Derivation {
    /// `sum_j coeffs[j] d_j`; all coefficients must share field and arity.
    pub fn new(coeffs: Vec<TruncPoly>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::ArityMismatch { left: 0, right: 1 });
        };
        let (field, n) = (first.field(), first.nvars());
        if coeffs.len() != n {
            return Err(Error::ArityMismatch { left: coeffs.len(), right: n });
        }
        for c in &coeffs {
            if c.field() != field {
                return Err(Error::ModulusMismatch { left: c.p(), right: field.p() });
            }
            if c.nvars() != n {
                return Err(Error::ArityMismatch { left: c.nvars(), right: n });
            }
        }
        Ok(Derivation { field, n, coeffs })
    }

    pub fn zero(field: PrimeField, n: usize) -> Self {
        Derivation { field, n, coeffs: vec![TruncPoly::zero(field, n); n] }
    }

    /// `f * d_{i+1}`.
    pub fn with_coeff(f: TruncPoly, i: usize) -> Self {
        let mut d = Self::zero(f.field(), f.nvars());
        d.coeffs[i] = f;
        d
    }

    /// The partial derivative `d_{i+1}`.
    pub fn partial(field: PrimeField, n: usize, i: usize) -> Self {
        Self::with_coeff(TruncPoly::one(field, n), i)
    }

    /// `c * x^exps * d_{i+1}`.
    pub fn monomial(field: PrimeField, exps: &[u32], i: usize, c: i64) -> Result<Self> {
        if i >= exps.len() {
            return Err(Error::IndexError { index: i, len: exps.len() });
        }
        Ok(Self::with_coeff(TruncPoly::monomial(field, exps, c)?, i))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[TruncPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &TruncPoly {
        &self.coeffs[j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &Derivation) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch { left: self.p(), right: other.p() });
        }
        if self.n != other.n {
            return Err(Error::ArityMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    fn zip(&self, other: &Derivation, op: impl Fn(&TruncPoly, &TruncPoly) -> TruncPoly) -> Derivation {
        Derivation {
            field: self.field,
            n: self.n,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        self.check(other).expect("shape mismatch");
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        self.check(other).expect("shape mismatch");
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: u32) -> Derivation {
        Derivation { field: self.field, n: self.n, coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect() }
    }

    pub fn neg(&self) -> Derivation {
        self.scale(self.p() - 1)
    }

    /// The `A_n`-module action `u * D`.
    pub fn mul_poly(&self, u: &TruncPoly) -> Derivation {
        Derivation { field: self.field, n: self.n, coeffs: self.coeffs.iter().map(|f| u.mul(f)).collect() }
    }

    /// `D(f) = sum_j f_j * d_j(f)`.
    pub fn apply(&self, f: &TruncPoly) -> TruncPoly {
        assert_eq!(f.nvars(), self.n, "arity mismatch");
        let mut acc = TruncPoly::zero(self.field, self.n);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.partial_unchecked(j);
            if !d.is_zero() {
                acc = acc.add(&c.mul(&d));
            }
        }
        acc
    }

    pub fn try_bracket(&self, other: &Derivation) -> Result<Derivation> {
        self.check(other)?;
        Ok(self.bracket(other))
    }

    /// `[D, E]`, determined by `[D, E](x_j) = D(e_j) - E(d_j)`.
    pub fn bracket(&self, other: &Derivation) -> Derivation {
        self.check(other).expect("shape mismatch");
        let coeffs = (0..self.n)
            .map(|j| self.apply(&other.coeffs[j]).sub(&other.apply(&self.coeffs[j])))
            .collect();
        Derivation { field: self.field, n: self.n, coeffs }
    }

    /// The operator power `D^p`, evaluated on each generator.
    pub fn p_power(&self) -> Derivation {
        let p = self.p();
        let coeffs = self
            .coeffs
            .iter()
            .map(|f| {
                let mut g = f.clone();
                for _ in 1..p {
                    if g.is_zero() {
                        break;
                    }
                    g = self.apply(&g);
                }
                g
            })
            .collect();
        Derivation { field: self.field, n: self.n, coeffs }
    }

    /// `Div(D) = sum_j d_j(f_j)`.
    pub fn divergence(&self) -> TruncPoly {
        let mut acc = TruncPoly::zero(self.field, self.n);
        for (j, f) in self.coeffs.iter().enumerate() {
            acc = acc.add(&f.partial_unchecked(j));
        }
        acc
    }

    /// Components along the grading with variable weights `w`, where
    /// `x^a d_j` has degree `sum_i w_i a_i - w_j`.
    pub fn weighted_parts(&self, w: &[u32]) -> BTreeMap<i32, Derivation> {
        assert_eq!(w.len(), self.n);
        let mut parts: BTreeMap<i32, Vec<Vec<(Vec<u32>, i64)>>> = BTreeMap::new();
        for (j, f) in self.coeffs.iter().enumerate() {
            for (a, c) in f.terms() {
                let deg = a.0.iter().zip(w).map(|(&e, &wi)| (e * wi) as i32).sum::<i32>() - w[j] as i32;
                let slot = parts.entry(deg).or_insert_with(|| vec![Vec::new(); self.n]);
                slot[j].push((a.0, c as i64));
            }
        }
        parts
            .into_iter()
            .map(|(deg, cs)| {
                let coeffs = cs
                    .iter()
                    .map(|t| TruncPoly::from_terms(self.field, self.n, t).expect("valid terms"))
                    .collect();
                (deg, Derivation { field: self.field, n: self.n, coeffs })
            })
            .collect()
    }

    /// Components along the standard grading `deg(x^a d_j) = |a| - 1`.
    pub fn graded_parts(&self) -> BTreeMap<i32, Derivation> {
        self.weighted_parts(&vec![1; self.n])
    }

    /// Lowest degree with a nonzero component; `None` for `D = 0`.
    pub fn filtration_level(&self) -> Option<i32> {
        self.graded_parts().keys().next().copied()
    }

    /// Degree of a homogeneous derivation.
    pub fn degree(&self) -> Option<i32> {
        let parts = self.graded_parts();
        (parts.len() == 1).then(|| *parts.keys().next().unwrap())
    }

    /// Coordinates in the basis `x^a d_j` (length `n p^n`).
    pub fn to_coords(&self) -> Vec<u32> {
        let m = TruncPoly::dim(self.field, self.n);
        let mut v = vec![0u32; self.n * m];
        for (j, f) in self.coeffs.iter().enumerate() {
            for &(mono, c) in f.raw_terms() {
                v[j * m + mono.rank(self.n, self.p())] = c;
            }
        }
        v
    }

    pub fn from_coords(field: PrimeField, n: usize, v: &[u32]) -> Derivation {
        let m = TruncPoly::dim(field, n);
        assert_eq!(v.len(), n * m, "coordinate length");
        let coeffs = (0..n).map(|j| TruncPoly::from_dense(field, n, &v[j * m..(j + 1) * m])).collect();
        Derivation { field, n, coeffs }
    }

    /// Basis element with coordinate index `idx`.
    pub fn basis_element(field: PrimeField, n: usize, idx: usize) -> Derivation {
        let m = TruncPoly::dim(field, n);
        let (j, r) = (idx / m, idx % m);
        let mono = Mono::unrank(r, n, field.p());
        Derivation::with_coeff(TruncPoly::monomial(field, &mono.exps(n), 1).expect("basis"), j)
    }

    /// The full basis of `W(n)` in coordinate order.
    pub fn basis(field: PrimeField, n: usize) -> Vec<Derivation> {
        (0..witt_dim(field, n)).map(|i| Self::basis_element(field, n, i)).collect()
    }

    /// Matrix of `D` acting on `A_n` in the monomial basis.
    pub fn action_matrix(&self) -> Matrix {
        let m = TruncPoly::dim(self.field, self.n);
        let cols: Vec<Vec<u32>> = (0..m)
            .map(|r| {
                let mono = Mono::unrank(r, self.n, self.p());
                let x = TruncPoly::monomial(self.field, &mono.exps(self.n), 1).expect("basis");
                self.apply(&x).to_dense()
            })
            .collect();
        Matrix::from_columns(self.field, &cols, m)
    }

    /// Re-reads `D` as a derivation of `A_{n2}`, `n2 >= n`, not involving the new variables.
    pub fn extend_vars(&self, n2: usize) -> Derivation {
        let mut coeffs: Vec<TruncPoly> = self.coeffs.iter().map(|f| f.extend_vars(n2)).collect();
        coeffs.resize(n2, TruncPoly::zero(self.field, n2));
        Derivation { field: self.field, n: n2, coeffs }
    }
}

/// `dim W(n) = n p^n`.
pub fn witt_dim(field: PrimeField, n: usize) -> usize {
    n * TruncPoly::dim(field, n)
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| if c.len() == 1 { format!("{c}*d{}", j + 1) } else { format!("({c})*d{}", j + 1) })
            .collect();
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (k, part) in parts.iter().enumerate() {
            match (k, part.strip_prefix('-')) {
                (0, _) => write!(f, "{part}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {part}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation[p={}, n={}]({})", self.p(), self.n, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn bracket_example() {
        let f = f3();
        let x1d1 = Derivation::monomial(f, &[1, 0], 0, 1).unwrap();
        let d1 = Derivation::partial(f, 2, 0);
        assert_eq!(x1d1.bracket(&d1), d1.neg());
        assert!(x1d1.bracket(&x1d1).is_zero());
    }

    #[test]
    fn p_power_examples() {
        let f = f3();
        for d in Derivation::basis(f, 2) {
            let pw = d.p_power();
            let (j, c) = d.coeffs().iter().enumerate().find(|(_, c)| !c.is_zero()).unwrap();
            let mut unit = vec![0; 2];
            unit[j] = 1;
            if c.coeff(&unit) == 1 && c.len() == 1 {
                assert_eq!(pw, d);
            } else {
                assert!(pw.is_zero(), "{d}");
            }
        }
        let xi_d = Derivation::with_coeff(TruncPoly::xi(f, 2, 1), 1);
        assert_eq!(xi_d.p_power(), xi_d);
    }

    #[test]
    fn degrees() {
        let f = f3();
        assert_eq!(Derivation::partial(f, 2, 1).degree(), Some(-1));
        assert_eq!(Derivation::monomial(f, &[1, 1], 0, 1).unwrap().degree(), Some(1));
        let mixed = Derivation::partial(f, 2, 0).add(&Derivation::monomial(f, &[1, 0], 0, 1).unwrap());
        assert_eq!(mixed.filtration_level(), Some(-1));
        assert_eq!(mixed.degree(), None);
    }

    #[test]
    fn divergence_and_coords() {
        let f = f3();
        assert_eq!(Derivation::monomial(f, &[1, 0], 0, 1).unwrap().divergence(), TruncPoly::one(f, 2));
        for (i, d) in Derivation::basis(f, 2).iter().enumerate() {
            let v = d.to_coords();
            assert_eq!(v.iter().filter(|&&c| c != 0).count(), 1);
            assert_eq!(v[i], 1);
            assert_eq!(&Derivation::from_coords(f, 2, &v), d);
        }
        assert_eq!(witt_dim(f, 3), 81);
    }

    #[test]
    fn json_roundtrip() {
        let f = f3();
        let d = Derivation::monomial(f, &[1, 2], 1, 2).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.starts_with(r#"{"p":3,"n":2,"coeffs":["#));
        assert_eq!(serde_json::from_str::<Derivation>(&s).unwrap(), d);
    }
}
