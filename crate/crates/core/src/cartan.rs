//! Subalgebras of `W(n)` cut out by the Cartan forms, and their derived
//! algebras: `S(n)`, `H(2r)`, `K(2r+1)` and the intermediate algebras.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::forms::{cartan_form, FormKind};
use crate::linalg::{Echelon, Matrix};
use crate::restricted::RestrictedAlgebra;
use crate::truncpoly::TruncPoly;
use crate::witt::{witt_dim, Derivation};

/// A subspace of `W(n)` kept as a reduced echelon basis in the
/// coordinates `x^a d_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubalgebraBasis {
    field: PrimeField,
    n: usize,
    label: String,
    span: Echelon,
}

impl SubalgebraBasis {
    pub fn from_derivations(label: impl Into<String>, field: PrimeField, n: usize, ds: &[Derivation]) -> Self {
        let mut span = Echelon::new(field, witt_dim(field, n));
        for d in ds {
            span.insert(d.to_coords());
        }
        SubalgebraBasis { field, n, label: label.into(), span }
    }

    pub fn from_span(label: impl Into<String>, field: PrimeField, n: usize, span: Echelon) -> Self {
        assert_eq!(span.ambient_dim(), witt_dim(field, n));
        SubalgebraBasis { field, n, label: label.into(), span }
    }

    pub fn whole(field: PrimeField, n: usize) -> Self {
        Self::from_derivations("W", field, n, &Derivation::basis(field, n))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn span(&self) -> &Echelon {
        &self.span
    }

    pub fn basis(&self) -> Vec<Derivation> {
        self.span.basis().iter().map(|v| Derivation::from_coords(self.field, self.n, v)).collect()
    }

    pub fn contains(&self, d: &Derivation) -> bool {
        self.span.contains(&d.to_coords())
    }

    pub fn is_subspace_of(&self, other: &SubalgebraBasis) -> bool {
        self.span.is_subspace_of(&other.span)
    }

    pub fn is_bracket_closed(&self) -> bool {
        let b = self.basis();
        (0..b.len()).all(|i| (i + 1..b.len()).all(|j| self.contains(&b[i].bracket(&b[j]))))
    }

    pub fn is_p_closed(&self) -> bool {
        self.basis().iter().all(|d| self.contains(&d.p_power()))
    }

    /// Structure constants and p-map relative to the echelon basis.
    pub fn to_algebra(&self) -> Result<RestrictedAlgebra> {
        let basis = self.basis();
        let labels = basis.iter().map(|d| d.to_string()).collect();
        RestrictedAlgebra::from_derivations(labels, basis)
    }

    /// Intersection with the filtration piece of degree `>= level`
    /// for the grading with variable weights `w`.
    pub fn filtration_piece(&self, w: &[u32], level: i32) -> Echelon {
        let piece = filtration_span(self.field, self.n, w, level);
        self.span.intersection(&piece)
    }
}

/// Span of the basis vectors `x^a d_j` of weighted degree `>= level`.
pub fn filtration_span(field: PrimeField, n: usize, w: &[u32], level: i32) -> Echelon {
    let mut e = Echelon::new(field, witt_dim(field, n));
    for d in Derivation::basis(field, n) {
        let parts = d.weighted_parts(w);
        if parts.keys().next().is_some_and(|&k| k >= level) {
            e.insert(d.to_coords());
        }
    }
    e
}

/// Standard weights `(1, ..., 1)` for `W`, `S`, `H` and
/// `(1, ..., 1, 2)` for the contact family.
pub fn grading_weights(kind: Family, n: usize) -> Vec<u32> {
    let mut w = vec![1u32; n];
    if matches!(kind, Family::K | Family::Kpp) {
        w[n - 1] = 2;
    }
    w
}

fn kernel_subalgebra(label: &str, field: PrimeField, n: usize, images: Vec<Vec<u32>>) -> SubalgebraBasis {
    let rows = images[0].len();
    let m = Matrix::from_columns(field, &images, rows);
    let span = Echelon::from_vectors(field, witt_dim(field, n), &m.kernel());
    SubalgebraBasis { field, n, label: label.into(), span }
}

/// `X''(n) = {D : D.omega_X = 0}` for `X = S, H`.
pub fn annihilator_of_form(field: PrimeField, kind: FormKind, n: usize) -> Result<SubalgebraBasis> {
    if kind == FormKind::K {
        return Err(Error::UnsupportedKind("the contact condition is not an annihilator".into()));
    }
    let omega = cartan_form(field, kind, n)?;
    let images = Derivation::basis(field, n).iter().map(|d| omega.lie_derivative(d).to_coords()).collect();
    let label = match kind {
        FormKind::S => "S''",
        _ => "H''",
    };
    Ok(kernel_subalgebra(label, field, n, images))
}

/// `ker Div`.
pub fn divergence_kernel(field: PrimeField, n: usize) -> SubalgebraBasis {
    let images = Derivation::basis(field, n).iter().map(|d| d.divergence().to_dense()).collect();
    kernel_subalgebra("ker Div", field, n, images)
}

/// `K''(n) = {D : D.omega_K in A_n omega_K}`, `n = 2r + 1`.
pub fn contact_condition(field: PrimeField, n: usize) -> Result<SubalgebraBasis> {
    let omega = cartan_form(field, FormKind::K, n)?;
    let mut module = Echelon::new(field, n * TruncPoly::dim(field, n));
    for a in crate::truncpoly::monomial_basis(field, n) {
        let u = TruncPoly::monomial(field, &a.0, 1)?;
        module.insert(omega.mul_poly(&u).to_coords());
    }
    let images = Derivation::basis(field, n)
        .iter()
        .map(|d| module.reduce(&omega.lie_derivative(d).to_coords()))
        .collect();
    Ok(kernel_subalgebra("K''", field, n, images))
}

/// Whether `D.omega_K` lies in `A_n omega_K`.
pub fn satisfies_contact_condition(d: &Derivation) -> Result<bool> {
    let field = d.field();
    let n = d.nvars();
    let omega = cartan_form(field, FormKind::K, n)?;
    let lie = omega.lie_derivative(d);
    // D.omega_K = u omega_K forces u = (D.omega_K)(d_n) since omega_K(d_n) = 1.
    let u = lie.component(&[n - 1]);
    Ok(lie == omega.mul_poly(&u))
}

/// Span of all brackets of basis pairs.
pub fn derived_subalgebra(b: &SubalgebraBasis) -> SubalgebraBasis {
    let basis = b.basis();
    let mut span = Echelon::new(b.field, witt_dim(b.field, b.n));
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            span.insert(basis[i].bracket(&basis[j]).to_coords());
        }
    }
    SubalgebraBasis { field: b.field, n: b.n, label: format!("{}^(1)", b.label), span }
}

pub fn derived_series(b: &SubalgebraBasis, k: usize) -> SubalgebraBasis {
    let mut cur = b.clone();
    for _ in 0..k {
        cur = derived_subalgebra(&cur);
    }
    cur
}

/// The families that can be built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    W,
    S,
    H,
    K,
    #[serde(rename = "Kpp")]
    Kpp,
    P,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "W" => Ok(Family::W),
            "S" => Ok(Family::S),
            "H" => Ok(Family::H),
            "K" => Ok(Family::K),
            "Kpp" | "K''" => Ok(Family::Kpp),
            "P" => Ok(Family::P),
            other => Err(Error::UnsupportedKind(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::W => "W",
            Family::S => "S",
            Family::H => "H",
            Family::K => "K",
            Family::Kpp => "Kpp",
            Family::P => "P",
        };
        write!(f, "{s}")
    }
}

/// A constructed family member with its metadata.
#[derive(Clone, Debug)]
pub struct FamilyBuild {
    pub family: Family,
    pub n: usize,
    pub basis: SubalgebraBasis,
    /// Maximal torus dimension, as configuration metadata.
    pub mu: Option<usize>,
    /// Set when the parameters fall under a known small-prime caveat.
    pub warning: Option<String>,
    /// Whether the algebra is spanned by homogeneous elements of its grading.
    pub graded: bool,
}

/// Builds `W(n)`, `S(n)`, `H(n)`, `K(n)` or `K''(n)` inside `W(n)`.
pub fn build_family(field: PrimeField, family: Family, n: usize) -> Result<FamilyBuild> {
    if n == 0 {
        return Err(Error::DimensionMismatch("need at least one variable".into()));
    }
    let p = field.p();
    let (basis, mu) = match family {
        Family::W => (SubalgebraBasis::whole(field, n), Some(n)),
        Family::S => {
            if n < 2 {
                return Err(Error::DimensionMismatch("S(n) needs n >= 2".into()));
            }
            (derived_subalgebra(&divergence_kernel(field, n)).with_label("S"), Some(n - 1))
        }
        Family::H => {
            let hpp = annihilator_of_form(field, FormKind::H, n)?;
            (derived_series(&hpp, 2).with_label("H"), Some(n / 2))
        }
        Family::Kpp => (contact_condition(field, n)?, None),
        Family::K => {
            let kpp = contact_condition(field, n)?;
            (derived_subalgebra(&kpp).with_label("K"), Some((n - 1) / 2 + 1))
        }
        Family::P => return Err(Error::UnsupportedKind("P is not a subalgebra of W(n); use the poisson module".into())),
    };
    let warning = match family {
        Family::W if n == 1 && p < 5 => Some("W(1) is usually studied for p >= 5".to_string()),
        Family::H if n == 2 && p < 5 => Some("H(2) is usually studied for p >= 5".to_string()),
        _ => None,
    };
    let w = grading_weights(family, n);
    let graded = {
        let mut homog = Echelon::new(field, witt_dim(field, n));
        for d in basis.basis() {
            for part in d.weighted_parts(&w).values() {
                homog.insert(part.to_coords());
            }
        }
        homog.is_subspace_of(basis.span())
    };
    Ok(FamilyBuild { family, n, basis, mu, warning, graded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn s_from_form_equals_divergence_kernel() {
        let f = f3();
        for n in 1..=3 {
            let a = annihilator_of_form(f, FormKind::S, n).unwrap();
            let b = divergence_kernel(f, n);
            assert_eq!(a.span(), b.span());
            assert_eq!(a.dim(), witt_dim(f, n) - (TruncPoly::dim(f, n) - 1));
        }
    }

    #[test]
    fn contact_dimension() {
        let f = f3();
        let kpp = contact_condition(f, 3).unwrap();
        assert_eq!(kpp.dim(), 27);
        let d = Derivation::partial(f, 3, 2).scale(2);
        assert!(kpp.contains(&d));
        assert!(satisfies_contact_condition(&d).unwrap());
        let bad = Derivation::partial(f, 3, 0).add(&Derivation::monomial(f, &[0, 0, 1], 0, 1).unwrap());
        assert_eq!(kpp.contains(&bad), satisfies_contact_condition(&bad).unwrap());
    }

    #[test]
    fn families_are_closed() {
        let f = f3();
        for (fam, n) in [(Family::S, 2), (Family::S, 3), (Family::H, 2), (Family::K, 3), (Family::Kpp, 3)] {
            let b = build_family(f, fam, n).unwrap();
            assert!(b.basis.is_bracket_closed(), "{fam}{n}");
            assert!(b.basis.is_p_closed(), "{fam}{n}");
            assert!(b.graded, "{fam}{n}");
        }
        assert_eq!(build_family(f, Family::W, 2).unwrap().basis.dim(), 18);
    }

    #[test]
    fn abelian_input_has_zero_derived() {
        let f = f3();
        let t = SubalgebraBasis::from_derivations("t", f, 2, &[Derivation::partial(f, 2, 0), Derivation::partial(f, 2, 1)]);
        assert_eq!(derived_subalgebra(&t).dim(), 0);
    }

    #[test]
    fn parity_errors() {
        let f = f3();
        assert!(matches!(annihilator_of_form(f, FormKind::H, 3), Err(Error::ParityError(_))));
        assert!(matches!(contact_condition(f, 2), Err(Error::ParityError(_))));
        assert!("Q".parse::<Family>().is_err());
    }
}
