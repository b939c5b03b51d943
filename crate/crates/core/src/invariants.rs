//! Characteristic polynomials of restricted module actions, Dickson
//! invariants, the minimal p-polynomial `Q(T; x)` and its coefficients
//! computed through alternating forms.
//!
//! Polynomial identities in `T` are always compared as exact coefficient
//! vectors. Over `F_p` every value satisfies `a^p = a`, so comparing values
//! of p-th powers would prove nothing.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::cartan::Family;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{axpy, Echelon, Matrix};
use crate::poisson::hamiltonian_map;
use crate::restricted::{PPolynomial, RestrictedAlgebra};
use crate::tori::{agt2_torus, Ambient, Torus};
use crate::truncpoly::TruncPoly;
use crate::witt::Derivation;

/// A polynomial in `x_1..x_m` over `F_p` with unbounded exponents.
#[derive(Clone, PartialEq, Eq)]
pub struct SymbolicPolynomial {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, u32>,
}

impl SymbolicPolynomial {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        SymbolicPolynomial { field, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: u32) -> Self {
        let mut s = Self::zero(field, nvars);
        s.add_term(vec![0; nvars], c);
        s
    }

    /// `x_{i+1}`.
    pub fn var(field: PrimeField, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut s = Self::zero(field, nvars);
        s.add_term(e, 1);
        s
    }

    /// `sum_i c_i x_i`.
    pub fn linear(field: PrimeField, coeffs: &[u32]) -> Self {
        let mut s = Self::zero(field, coeffs.len());
        for (i, &c) in coeffs.iter().enumerate() {
            s = s.add(&Self::var(field, coeffs.len(), i).scale(c));
        }
        s
    }

    fn add_term(&mut self, exp: Vec<u32>, c: u32) {
        let c = c % self.field.p();
        if c == 0 {
            return;
        }
        let f = self.field;
        let slot = self.terms.entry(exp).or_insert(0);
        *slot = f.add(*slot, c);
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, u32> {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.p() - 1)
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = Self::zero(self.field, self.nvars);
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), self.field.mul(v, c % self.field.p()));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.field, self.nvars);
        for (a, &c) in &self.terms {
            for (b, &d) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, self.field.mul(c, d));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(self.field, self.nvars, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn eval(&self, point: &[u32]) -> u32 {
        let f = self.field;
        let mut acc = 0;
        for (e, &c) in &self.terms {
            let mut v = c;
            for (&x, &k) in point.iter().zip(e) {
                v = f.mul(v, f.pow(x, k as u64));
            }
            acc = f.add(acc, v);
        }
        acc
    }

    /// The linear change of variables `x_i -> sum_j m[i][j] x_j`.
    pub fn substitute_linear(&self, m: &Matrix) -> Self {
        let images: Vec<Self> = (0..self.nvars).map(|i| Self::linear(self.field, m.row(i))).collect();
        let mut out = Self::zero(self.field, self.nvars);
        for (e, &c) in &self.terms {
            let mut term = Self::constant(self.field, self.nvars, c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&images[i].pow(k as u64));
                }
            }
            out = out.add(&term);
        }
        out
    }
}

impl fmt::Display for SymbolicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.terms.iter().rev() {
            let s = self.field.signed(c);
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            let body = mono.join("*");
            let (sign, mag) = if s < 0 { ("-", -s) } else { ("+", s) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (mag, body.is_empty()) {
                (m, true) => write!(f, "{m}")?,
                (1, false) => write!(f, "{body}")?,
                (m, false) => write!(f, "{m}*{body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for SymbolicPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exp: &'a [u32],
            coeff: u32,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            p: u32,
            nvars: usize,
            display: String,
            terms: Vec<Term<'a>>,
        }
        Repr {
            p: self.field.p(),
            nvars: self.nvars,
            display: self.to_string(),
            terms: self.terms.iter().map(|(e, &c)| Term { exp: e, coeff: c }).collect(),
        }
        .serialize(s)
    }
}

/// Coefficients of `prod_{a in F_p^m} (T - a_1 x_1 - ... - a_m x_m)` by
/// powers of `T`, from `T^0` to `T^{p^m}`.
pub fn dickson_expansion(field: PrimeField, m: usize) -> Result<Vec<SymbolicPolynomial>> {
    let p = field.p() as usize;
    let size = p.checked_pow(m as u32).unwrap_or(usize::MAX);
    if m == 0 || size > 27 {
        return Err(Error::EnvelopeError(format!("Dickson expansion for m = {m}, p = {p} is outside p^m <= 27")));
    }
    let mut poly = vec![SymbolicPolynomial::constant(field, m, 1)];
    for code in 0..size {
        let mut a = vec![0u32; m];
        let mut c = code;
        for slot in a.iter_mut().rev() {
            *slot = (c % p) as u32;
            c /= p;
        }
        let lin = SymbolicPolynomial::linear(field, &a);
        let mut next = vec![SymbolicPolynomial::zero(field, m); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&lin.mul(c));
        }
        poly = next;
    }
    Ok(poly)
}

/// `psi_{p^0}, ..., psi_{p^{m-1}}` and the leading `1`.
pub fn dickson_coefficients(field: PrimeField, m: usize) -> Result<Vec<SymbolicPolynomial>> {
    let all = dickson_expansion(field, m)?;
    let p = field.p() as usize;
    Ok((0..=m).map(|i| all[p.pow(i as u32)].clone()).collect())
}

/// Generators of `GL_m(F_p)`: a transvection, a diagonal matrix with a
/// primitive root and a cyclic permutation.
pub fn gl_generators(field: PrimeField, m: usize) -> Vec<Matrix> {
    let p = field.p();
    let g = (2..p)
        .find(|&g| (1..p - 1).all(|k| field.pow(g, k as u64) != 1))
        .unwrap_or(p - 1);
    let mut gens = Vec::new();
    let mut d = Matrix::identity(field, m);
    d[(0, 0)] = g;
    gens.push(d);
    if m >= 2 {
        let mut t = Matrix::identity(field, m);
        t[(0, 1)] = 1;
        gens.push(t);
        let mut c = Matrix::zeros(field, m, m);
        for i in 0..m {
            c[(i, (i + 1) % m)] = 1;
        }
        gens.push(c);
    }
    gens
}

#[derive(Clone, Debug, Serialize)]
pub struct DicksonReport {
    pub m: usize,
    pub p: u32,
    pub coefficients: Vec<SymbolicPolynomial>,
    pub invariant: bool,
    pub vanish_off_p_powers: bool,
    pub degrees_ok: bool,
}

/// Expands the product and checks invariance, support and degrees.
pub fn dickson_report(field: PrimeField, m: usize) -> Result<DicksonReport> {
    let all = dickson_expansion(field, m)?;
    let p = field.p() as usize;
    let powers: Vec<usize> = (0..=m).map(|i| p.pow(i as u32)).collect();
    let vanish = all.iter().enumerate().all(|(k, c)| powers.contains(&k) || c.is_zero());
    let coefficients: Vec<SymbolicPolynomial> = powers.iter().map(|&k| all[k].clone()).collect();
    let top = p.pow(m as u32);
    let degrees_ok = coefficients
        .iter()
        .zip(&powers)
        .all(|(c, &k)| c.is_homogeneous() && c.degree() == Some((top - k) as u32));
    let gens = gl_generators(field, m);
    let invariant = coefficients.iter().all(|c| gens.iter().all(|g| c.substitute_linear(g) == *c));
    Ok(DicksonReport { m, p: field.p(), coefficients, invariant, vanish_off_p_powers: vanish, degrees_ok })
}

/// Multiplies polynomials in `T` given by coefficient vectors from `T^0`.
pub fn poly_mul(field: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    out
}

pub fn poly_pow(field: PrimeField, a: &[u32], mut e: u64) -> Vec<u32> {
    let mut base = a.to_vec();
    let mut acc = vec![1u32];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul(field, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mul(field, &base, &base);
        }
    }
    acc
}

/// The polynomial `Q` with `Q^{p^e} = a`, if `a` only involves powers
/// `T^{k p^e}` (over `F_p` a coefficient is its own p-th root).
pub fn poly_p_root(a: &[u32], p: u32, e: u32) -> Option<Vec<u32>> {
    let step = (p as usize).pow(e);
    if a.iter().enumerate().any(|(k, &c)| c != 0 && k % step != 0) {
        return None;
    }
    Some(a.iter().step_by(step).copied().collect())
}

/// Dense coefficients of `sum_i c_i T^{p^i}`.
pub fn p_polynomial_dense(field: PrimeField, coeffs: &[u32]) -> Vec<u32> {
    PPolynomial::new(field, coeffs.to_vec()).to_dense()
}

/// A linear action of a restricted algebra on `F_p^N`, one matrix per basis element.
#[derive(Clone, Debug)]
pub struct ModuleAction {
    field: PrimeField,
    dim: usize,
    mats: Vec<Matrix>,
}

impl ModuleAction {
    pub fn new(field: PrimeField, dim: usize, mats: Vec<Matrix>) -> Self {
        ModuleAction { field, dim, mats }
    }

    /// The action on `A_n` of an algebra realized inside `W(n)`.
    pub fn natural(alg: &RestrictedAlgebra) -> Result<Self> {
        let real = alg
            .realization()
            .ok_or_else(|| Error::UnsupportedKind("the natural module needs an algebra realized in W(n)".into()))?;
        let mats: Vec<Matrix> = real.images().iter().map(|d| d.action_matrix()).collect();
        let dim = TruncPoly::dim(alg.field(), real.nvars());
        Ok(ModuleAction { field: alg.field(), dim, mats })
    }

    /// The quotient `A_n / k` of the natural module (the constants are the
    /// first monomial and are killed by every derivation).
    pub fn natural_mod_constants(alg: &RestrictedAlgebra) -> Result<Self> {
        let nat = Self::natural(alg)?;
        let d = nat.dim - 1;
        let mats = nat
            .mats
            .iter()
            .map(|m| {
                let rows: Vec<Vec<u32>> = (1..=d).map(|i| m.row(i)[1..].to_vec()).collect();
                Matrix::from_rows(nat.field, &rows, d)
            })
            .collect();
        Ok(ModuleAction { field: nat.field, dim: d, mats })
    }

    pub fn adjoint(alg: &RestrictedAlgebra) -> Self {
        let mats = (0..alg.dim()).map(|i| alg.ad(&alg.unit(i))).collect();
        ModuleAction { field: alg.field(), dim: alg.dim(), mats }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_of(&self, x: &[u32]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.dim, self.dim);
        for (c, b) in x.iter().zip(&self.mats) {
            if *c != 0 {
                m = m.add(&b.scaled(*c));
            }
        }
        m
    }

    /// Bracket compatibility on all basis pairs and `rho(e^[p]) = rho(e)^p`.
    pub fn verify(&self, alg: &RestrictedAlgebra) -> Result<()> {
        let p = self.field.p() as u64;
        for i in 0..alg.dim() {
            for j in i + 1..alg.dim() {
                let lhs = self.matrix_of(&alg.basis_bracket(i, j));
                let rhs = self.mats[i].mul(&self.mats[j]).sub(&self.mats[j].mul(&self.mats[i]));
                if lhs != rhs {
                    return Err(Error::verification("module action", format!("bracket of basis elements {i}, {j}")));
                }
            }
            if self.matrix_of(alg.basis_p_map(i)) != self.mats[i].pow(p) {
                return Err(Error::verification("module action", format!("p-map of basis element {i}")));
            }
        }
        Ok(())
    }
}

/// `det(T - rho(x))`, coefficients from `T^0`.
pub fn char_poly(m: &ModuleAction, x: &[u32]) -> Vec<u32> {
    m.matrix_of(x).charpoly()
}

/// Coefficient of `T^i` in the characteristic polynomial.
pub fn psi(m: &ModuleAction, x: &[u32], i: usize) -> u32 {
    char_poly(m, x).get(i).copied().unwrap_or(0)
}

/// The p-polynomial `Q(T; x) = sum_{i=0}^{mu} phi_i(x) T^{p^{i+ell}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QPolynomial {
    /// `phi_0, ..., phi_mu` with `phi_mu = 1`; for degenerate `x` these are
    /// the coefficients of the minimal p-polynomial instead.
    pub phi: Vec<u32>,
    pub ell: usize,
    /// `dim (kx)_p`.
    pub d: usize,
    /// Set when `x` does not have the rank profile `d = ell + mu` with
    /// vanishing lower coefficients.
    pub degenerate: bool,
}

impl QPolynomial {
    /// Coefficients as a polynomial in `T`, from `T^0`.
    pub fn dense(&self, field: PrimeField) -> Vec<u32> {
        let shift = if self.degenerate { 0 } else { self.ell };
        let mut c = vec![0u32; shift];
        c.extend_from_slice(&self.phi);
        p_polynomial_dense(field, &c)
    }
}

pub fn q_polynomial(alg: &RestrictedAlgebra, x: &[u32], mu: usize, ell: usize) -> QPolynomial {
    let min = alg.minimal_p_polynomial(x);
    let c = min.coeffs();
    let d = min.p_degree();
    let generic = d == ell + mu && c[..ell].iter().all(|&v| v == 0);
    if generic {
        QPolynomial { phi: c[ell..].to_vec(), ell, d, degenerate: false }
    } else {
        QPolynomial { phi: c.to_vec(), ell, d, degenerate: true }
    }
}

/// An alternating `mu`-linear form given by `mu` linear functionals:
/// `beta(a_1, ..., a_mu) = det [l_j(a_i)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaForm {
    field: PrimeField,
    functionals: Vec<Vec<u32>>,
}

impl BetaForm {
    pub fn new(field: PrimeField, functionals: Vec<Vec<u32>>) -> Self {
        BetaForm { field, functionals }
    }

    /// The minor on the given coordinate slots of the algebra.
    pub fn coordinate_minor(field: PrimeField, dim: usize, slots: &[usize]) -> Self {
        let functionals = slots
            .iter()
            .map(|&s| {
                let mut l = vec![0u32; dim];
                l[s] = 1;
                l
            })
            .collect();
        BetaForm { field, functionals }
    }

    /// The minor on `W(n)` coordinate slots, read through the realization.
    pub fn witt_minor(alg: &RestrictedAlgebra, slots: &[usize]) -> Result<Self> {
        let real = alg
            .realization()
            .ok_or_else(|| Error::UnsupportedKind("witt_minor needs a realized algebra".into()))?;
        let coords: Vec<Vec<u32>> = real.images().iter().map(|d| d.to_coords()).collect();
        let functionals = slots.iter().map(|&s| coords.iter().map(|c| c[s]).collect()).collect();
        Ok(BetaForm { field: alg.field(), functionals })
    }

    pub fn arity(&self) -> usize {
        self.functionals.len()
    }

    pub fn eval(&self, args: &[Vec<u32>]) -> u32 {
        assert_eq!(args.len(), self.arity());
        let f = self.field;
        let rows: Vec<Vec<u32>> = args
            .iter()
            .map(|a| {
                self.functionals
                    .iter()
                    .map(|l| l.iter().zip(a).fold(0u32, |acc, (&x, &y)| f.add(acc, f.mul(x, y))))
                    .collect()
            })
            .collect();
        Matrix::from_rows(f, &rows, self.arity()).det()
    }

    /// Whether the span lies in the kernel of every functional.
    pub fn kills(&self, span: &Echelon) -> bool {
        let f = self.field;
        span.basis().iter().all(|v| {
            self.functionals.iter().all(|l| l.iter().zip(v).fold(0u32, |acc, (&x, &y)| f.add(acc, f.mul(x, y))) == 0)
        })
    }
}

/// `phi_i(x) = -beta(.., x^{[p]^{ell+mu}} in slot i, ..) / beta(x^{[p]^ell}, ..., x^{[p]^{ell+mu-1}})`.
pub fn phi_via_beta(alg: &RestrictedAlgebra, x: &[u32], beta: &BetaForm, i: usize, ell: usize) -> Result<u32> {
    let mu = beta.arity();
    if i > mu {
        return Err(Error::IndexError { index: i, len: mu + 1 });
    }
    if i == mu {
        return Ok(1);
    }
    let mut powers = vec![alg.p_power_iter(x, ell)];
    for _ in 0..mu {
        let next = alg.p_power(powers.last().unwrap());
        powers.push(next);
    }
    let den = beta.eval(&powers[..mu]);
    if den == 0 {
        return Err(Error::OutsideOmegaBeta);
    }
    let mut args = powers[..mu].to_vec();
    args[i] = powers[mu].clone();
    let f = alg.field();
    Ok(f.neg(f.mul(beta.eval(&args), f.inv(den)?)))
}

/// All `phi_0..phi_mu` through `beta`.
pub fn phis_via_beta(alg: &RestrictedAlgebra, x: &[u32], beta: &BetaForm, ell: usize) -> Result<Vec<u32>> {
    (0..=beta.arity()).map(|i| phi_via_beta(alg, x, beta, i, ell)).collect()
}

/// The element `sum_i c_i t_i` of a torus.
pub fn torus_point(torus: &Torus, c: &[u32]) -> Vec<u32> {
    let f = torus.field();
    let mut v = vec![0u32; torus.ambient().algebra().dim()];
    for (k, &ck) in c.iter().enumerate() {
        axpy(f, &mut v, ck, &torus.basis()[k]);
    }
    v
}

/// All points of `F_p^m` in lexicographic order.
pub fn fp_points(field: PrimeField, m: usize) -> Vec<Vec<u32>> {
    let p = field.p() as usize;
    (0..p.pow(m as u32))
        .map(|mut code| {
            let mut a = vec![0u32; m];
            for slot in a.iter_mut().rev() {
                *slot = (code % p) as u32;
                code /= p;
            }
            a
        })
        .collect()
}

/// Summary of the identities between `P_{A_n}`, `Q` and the Dickson
/// invariants for one family.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub family: String,
    pub n: usize,
    pub mu: usize,
    /// Largest `dim (kx)_p` seen among the samples.
    pub d_max: usize,
    /// `d_max - mu`.
    pub ell_d: usize,
    /// `dim C_g(t) - mu` for the standard torus.
    pub ell_rank: usize,
    /// `p^e` with `P = Dickson^{p^e}` on the torus points, by rank count.
    pub torus_exponent: u32,
    pub torus_points: usize,
    pub torus_points_ok: usize,
    /// Exponents `e` found with `P(T; x) = Q(T; x)^{p^e}` on generic samples.
    pub q_exponents: Vec<u32>,
    pub q_samples: usize,
    pub q_samples_ok: usize,
    /// `Q(T; t) = P_{U_0(t)}(T; t)^{p^ell}`, with `Q(T; t)` read off `P` through the exponent above.
    pub q_torus_points_ok: usize,
    pub semisimple_samples: usize,
    pub p_polynomial_shape_ok: usize,
    /// Semisimple parts with `dim (kx_s)_p = ell + mu`, and those with `P = Q^{p^e}`.
    pub semisimple_regular: usize,
    pub semisimple_q_ok: usize,
    pub beta_samples: usize,
    pub beta_agree: usize,
    /// Samples where `x_s` is inside `Omega_beta` and `n_x` lies in `g_(0)`.
    pub beta_semisimple_samples: usize,
    pub beta_semisimple_agree: usize,
}

fn is_p_polynomial_shape(c: &[u32], p: u32) -> bool {
    c.iter().enumerate().all(|(k, &v)| v == 0 || (k > 0 && is_power_of(k, p as usize)))
}

fn is_power_of(mut k: usize, p: usize) -> bool {
    while k % p == 0 {
        k /= p;
    }
    k == 1
}

/// Runs the restriction identities for `W`, `S` or `H` with `n` variables.
pub fn restriction_identity_check<R: Rng>(
    field: PrimeField,
    family: Family,
    n: usize,
    rng: &mut R,
    samples: usize,
) -> Result<RestrictionReport> {
    if !matches!(family, Family::W | Family::S | Family::H) {
        return Err(Error::UnsupportedKind(format!("restriction identities for {family}")));
    }
    let torus = agt2_torus(field, family, n)?;
    let ambient: &Ambient = torus.ambient();
    let alg = ambient.algebra();
    let module = ModuleAction::natural(alg)?;
    let mu = torus.dim();
    let p = field.p();
    let carrier = module.dim();
    let dickson = dickson_expansion(field, mu)?;

    // Rank of A_n over U_0(t) is carrier / p^mu.
    let torus_exponent = {
        let mut e = 0;
        let mut r = carrier / (p as usize).pow(mu as u32);
        while r > 1 {
            r /= p as usize;
            e += 1;
        }
        e
    };

    let mut samples_x = Vec::with_capacity(samples);
    let mut d_max = 0;
    for _ in 0..samples {
        let x = alg.random_element(rng);
        d_max = d_max.max(alg.p_closure(&x).dim());
        samples_x.push(x);
    }
    let ell_d = d_max.saturating_sub(mu);

    // Generic samples: P = Q^{p^e}.
    let mut q_exponents = Vec::new();
    let (mut q_samples, mut q_ok) = (0, 0);
    for x in &samples_x {
        let q = q_polynomial(alg, x, mu, ell_d);
        if q.degenerate {
            continue;
        }
        q_samples += 1;
        let qd = q.dense(field);
        let pc = char_poly(&module, x);
        let ratio = (pc.len() - 1) / (qd.len() - 1);
        let e = (0..).find(|&e| (p as usize).pow(e) >= ratio).unwrap();
        if (p as usize).pow(e) == ratio && poly_pow(field, &qd, (p as u64).pow(e)) == pc {
            q_ok += 1;
            if !q_exponents.contains(&e) {
                q_exponents.push(e);
            }
        }
    }
    q_exponents.sort();

    // Torus points.
    let points = fp_points(field, mu);
    let (mut tp_ok, mut qt_ok) = (0, 0);
    let q_exp = q_exponents.first().copied();
    for c in &points {
        let t = torus_point(&torus, c);
        let pc = char_poly(&module, &t);
        let kappa: Vec<u32> = dickson.iter().map(|s| s.eval(c)).collect();
        let expect = poly_pow(field, &kappa, (p as u64).pow(torus_exponent));
        if pc == expect {
            tp_ok += 1;
        }
        if let Some(e) = q_exp {
            let target = poly_pow(field, &kappa, (p as u64).pow(ell_d as u32));
            if poly_p_root(&pc, p, e).as_deref() == Some(&target[..]) {
                qt_ok += 1;
            }
        }
    }

    // Semisimple parts: P-polynomial shape of the characteristic polynomial.
    let (mut ss, mut shape_ok, mut ss_reg, mut ss_q) = (0, 0, 0, 0);
    for x in &samples_x {
        let (xs, _) = alg.jordan_chevalley(x);
        ss += 1;
        let pc = char_poly(&module, &xs);
        if is_p_polynomial_shape(&pc, p) {
            shape_ok += 1;
        }
        let q = q_polynomial(alg, &xs, mu, ell_d);
        if q.degenerate {
            continue;
        }
        ss_reg += 1;
        if let Some(e) = q_exp {
            if poly_pow(field, &q.dense(field), (p as u64).pow(e)) == pc {
                ss_q += 1;
            }
        }
    }

    // beta on the first mu coordinates d_1, ..., d_mu (constant coefficients), which kill g_(0).
    let m = TruncPoly::dim(field, n);
    let slots: Vec<usize> = (0..mu).map(|j| j * m).collect();
    let beta = BetaForm::witt_minor(alg, &slots)?;
    debug_assert!(beta.kills(ambient.g0()));
    let (mut bs, mut bok, mut bss, mut bss_ok) = (0, 0, 0, 0);
    for x in &samples_x {
        let q = q_polynomial(alg, x, mu, ell_d);
        if q.degenerate {
            continue;
        }
        let Ok(phis) = phis_via_beta(alg, x, &beta, ell_d) else { continue };
        bs += 1;
        if phis == q.phi {
            bok += 1;
        }
        let cl = alg.p_closure(x);
        let nil = Echelon::from_vectors(field, alg.dim(), &cl.nil);
        if !nil.is_subspace_of(ambient.g0()) {
            continue;
        }
        if let Ok(phis_s) = phis_via_beta(alg, &cl.x_s, &beta, ell_d) {
            bss += 1;
            if phis_s == phis {
                bss_ok += 1;
            }
        }
    }

    Ok(RestrictionReport {
        family: family.to_string(),
        n,
        mu,
        d_max,
        ell_d,
        ell_rank: torus.rank_estimate() - mu,
        torus_exponent,
        torus_points: points.len(),
        torus_points_ok: tp_ok,
        q_exponents,
        q_samples,
        q_samples_ok: q_ok,
        q_torus_points_ok: qt_ok,
        semisimple_samples: ss,
        p_polynomial_shape_ok: shape_ok,
        semisimple_regular: ss_reg,
        semisimple_q_ok: ss_q,
        beta_samples: bs,
        beta_agree: bok,
        beta_semisimple_samples: bss,
        beta_semisimple_agree: bss_ok,
    })
}

/// Nonzero coefficients of `P_{A_{2r}}(T; D_H(f))` for random `f`, checked to
/// sit only at `T^{p^{r+i}}`, `0 <= i <= r`.
#[derive(Clone, Debug, Serialize)]
pub struct HamiltonianShape {
    pub r: usize,
    pub samples: usize,
    pub ok: usize,
}

pub fn hamiltonian_charpoly_shape<R: Rng>(field: PrimeField, r: usize, rng: &mut R, samples: usize) -> Result<HamiltonianShape> {
    let n = 2 * r;
    let p = field.p() as usize;
    let allowed: Vec<usize> = (0..=r).map(|i| p.pow((r + i) as u32)).collect();
    let dim = TruncPoly::dim(field, n);
    let mut ok = 0;
    for _ in 0..samples {
        let v: Vec<u32> = (0..dim).map(|_| rng.gen_range(0..field.p())).collect();
        let d: Derivation = hamiltonian_map(&TruncPoly::from_dense(field, n, &v))?;
        let c = d.action_matrix().charpoly();
        if c.iter().enumerate().all(|(k, &x)| x == 0 || allowed.contains(&k)) {
            ok += 1;
        }
    }
    Ok(HamiltonianShape { r, samples, ok })
}

/// Shares the ambient of a torus so reports can be built without rebuilding.
pub fn natural_module_of(torus: &Torus) -> Result<Arc<ModuleAction>> {
    Ok(Arc::new(ModuleAction::natural(torus.ambient().algebra())?))
}
