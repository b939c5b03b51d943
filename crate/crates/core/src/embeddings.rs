//! Explicit embeddings of Witt algebras:
//! `sigma_n : W(n-1) -> S(n)`, `phi_r : W(r) -> P(2r)` and
//! `D_H . phi_r : W(r) -> H(2r)`, each verified exhaustively on basis
//! pairs when constructed.

use std::fmt::Display;

use crate::cartan::{build_family, Family, SubalgebraBasis};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::poisson::{hamiltonian_map, CenterKind, Poisson};
use crate::truncpoly::TruncPoly;
use crate::witt::Derivation;

/// A linear map from `W(m)` recorded on its monomial basis.
#[derive(Clone, Debug)]
pub struct EmbeddingMap {
    pub label: String,
    pub source: String,
    pub target: String,
    /// Column `j` holds the target coordinates of the image of basis vector `j`.
    pub matrix: Matrix,
    /// Number of bracket pairs and p-map values checked.
    pub pairs_checked: usize,
    pub powers_checked: usize,
}

impl EmbeddingMap {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.matrix.cols()
    }
}

/// Checks `map([a, b]) = [map a, map b]` on all pairs and
/// `map(a^[p]) = (map a)^[p]` on all elements of `src`.
fn verify_homomorphism<T: PartialEq + Display>(
    context: &str,
    src: &[Derivation],
    map: impl Fn(&Derivation) -> T,
    bracket: impl Fn(&T, &T) -> T,
    p_power: impl Fn(&T) -> T,
) -> Result<(usize, usize)> {
    let images: Vec<T> = src.iter().map(&map).collect();
    let mut pairs = 0;
    for i in 0..src.len() {
        for j in i + 1..src.len() {
            let lhs = map(&src[i].bracket(&src[j]));
            let rhs = bracket(&images[i], &images[j]);
            if lhs != rhs {
                return Err(Error::verification(
                    context,
                    format!("bracket of ({}, {}): image {lhs}, bracket of images {rhs}", src[i], src[j]),
                ));
            }
            pairs += 1;
        }
    }
    for (d, img) in src.iter().zip(&images) {
        let lhs = map(&d.p_power());
        let rhs = p_power(img);
        if lhs != rhs {
            return Err(Error::verification(context, format!("p-map of {d}: image {lhs}, power of image {rhs}")));
        }
    }
    Ok((pairs, src.len()))
}

/// `sigma_n(D) = D - Div(D) x_n d_n` for `D` in `W(n-1)`.
pub fn sigma_apply(d: &Derivation) -> Derivation {
    let n = d.nvars() + 1;
    let field = d.field();
    let lifted = d.extend_vars(n);
    let correction = Derivation::with_coeff(lifted.divergence().mul(&TruncPoly::var(field, n, n - 1)), n - 1);
    lifted.sub(&correction)
}

/// `sigma_n : W(n-1) -> S(n)`.
pub fn sigma(field: PrimeField, n: usize) -> Result<(EmbeddingMap, SubalgebraBasis)> {
    if n < 2 {
        return Err(Error::DimensionMismatch("sigma_n needs n >= 2".into()));
    }
    let s = build_family(field, Family::S, n)?.basis;
    let src = Derivation::basis(field, n - 1);
    for d in &src {
        let img = sigma_apply(d);
        if !img.divergence().is_zero() {
            return Err(Error::verification("sigma_n", format!("Div(sigma({d})) != 0")));
        }
        if !s.contains(&img) {
            return Err(Error::verification("sigma_n", format!("sigma({d}) = {img} is not in S({n})")));
        }
    }
    let (pairs, powers) =
        verify_homomorphism("sigma_n", &src, sigma_apply, |a, b| a.bracket(b), |a| a.p_power())?;
    let cols: Vec<Vec<u32>> = src.iter().map(|d| sigma_apply(d).to_coords()).collect();
    let rows = cols[0].len();
    let map = EmbeddingMap {
        label: format!("sigma_{n}"),
        source: format!("W({})", n - 1),
        target: format!("S({n})"),
        matrix: Matrix::from_columns(field, &cols, rows),
        pairs_checked: pairs,
        powers_checked: powers,
    };
    Ok((map, s))
}

/// `phi_r(sum f_j d_j) = sum x_j f_j(x_{r+1}, ..., x_{2r})`.
pub fn phi_apply(d: &Derivation) -> TruncPoly {
    let r = d.nvars();
    let field = d.field();
    let mut acc = TruncPoly::zero(field, 2 * r);
    for (j, f) in d.coeffs().iter().enumerate() {
        acc = acc.add(&TruncPoly::var(field, 2 * r, j).mul(&f.shift_vars(r, 2 * r)));
    }
    acc
}

/// `phi_r : W(r) -> P(2r)` (toral center).
pub fn phi(field: PrimeField, r: usize) -> Result<(EmbeddingMap, Poisson)> {
    let poisson = Poisson::new(field, r, CenterKind::Toral)?;
    let src = Derivation::basis(field, r);
    let (pairs, powers) = verify_homomorphism(
        "phi_r",
        &src,
        phi_apply,
        |a, b| poisson.bracket(a, b).expect("same shape"),
        |a| poisson.p_power(a).expect("same shape"),
    )?;
    let cols: Vec<Vec<u32>> = src.iter().map(|d| phi_apply(d).to_dense()).collect();
    let map = EmbeddingMap {
        label: format!("phi_{r}"),
        source: format!("W({r})"),
        target: format!("P({})", 2 * r),
        matrix: Matrix::from_columns(field, &cols, poisson.dim()),
        pairs_checked: pairs,
        powers_checked: powers,
    };
    Ok((map, poisson))
}

/// `D_H(phi_r(D))`.
pub fn phi_h_apply(d: &Derivation) -> Derivation {
    hamiltonian_map(&phi_apply(d)).expect("even number of variables")
}

/// `D_H . phi_r : W(r) -> H(2r)`.
pub fn phi_h(field: PrimeField, r: usize) -> Result<(EmbeddingMap, SubalgebraBasis)> {
    let h = build_family(field, Family::H, 2 * r)?.basis;
    let src = Derivation::basis(field, r);
    for d in &src {
        let img = phi_h_apply(d);
        if !h.contains(&img) {
            return Err(Error::verification("D_H . phi_r", format!("image of {d} = {img} is not in H({})", 2 * r)));
        }
    }
    let (pairs, powers) =
        verify_homomorphism("D_H . phi_r", &src, phi_h_apply, |a, b| a.bracket(b), |a| a.p_power())?;
    let cols: Vec<Vec<u32>> = src.iter().map(|d| phi_h_apply(d).to_coords()).collect();
    let rows = cols[0].len();
    let map = EmbeddingMap {
        label: format!("D_H.phi_{r}"),
        source: format!("W({r})"),
        target: format!("H({})", 2 * r),
        matrix: Matrix::from_columns(field, &cols, rows),
        pairs_checked: pairs,
        powers_checked: powers,
    };
    Ok((map, h))
}
