//! The truncated polynomial ring `A_n = F_p[x_1..x_n]/(x_1^p, ..., x_n^p)`.
//!
//! Elements are sparse, sorted by exponent vector in lexicographic order
//! (with `x_1` most significant) and never store zero coefficients, so
//! structural equality is ring equality. Variables are indexed from 0 in
//! the API: `var(0)` is `x_1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;

/// Largest supported number of variables (one packed byte per exponent).
pub const MAX_VARS: usize = 8;

/// Packed exponent vector: the exponent of variable `i` lives in byte
/// `7 - i`, so integer order on the packed word is lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub(crate) struct Mono(pub(crate) u64);

impl Mono {
    #[inline]
    fn shift(i: usize) -> u32 {
        ((MAX_VARS - 1 - i) * 8) as u32
    }

    pub(crate) fn from_exps(exps: &[u32]) -> Mono {
        let mut m = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            m |= (e as u64) << Self::shift(i);
        }
        Mono(m)
    }

    #[inline]
    pub(crate) fn exp(self, i: usize) -> u32 {
        ((self.0 >> Self::shift(i)) & 0xff) as u32
    }

    pub(crate) fn exps(self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.exp(i)).collect()
    }

    #[inline]
    pub(crate) fn unit(i: usize) -> Mono {
        Mono(1u64 << Self::shift(i))
    }

    pub(crate) fn degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exp(i)).sum()
    }

    /// Product monomial, or `None` when some exponent reaches `p`.
    #[inline]
    pub(crate) fn mul(self, other: Mono, p: u32) -> Option<Mono> {
        let s = self.0 + other.0;
        let k = (128 - p as u64) * 0x0101_0101_0101_0101;
        if (s + k) & 0x8080_8080_8080_8080 != 0 {
            None
        } else {
            Some(Mono(s))
        }
    }

    /// Divides by `x_i`; caller guarantees the exponent is positive.
    #[inline]
    pub(crate) fn lower(self, i: usize) -> Mono {
        Mono(self.0 - Self::unit(i).0)
    }

    /// Rank in the lexicographic enumeration of all `p^n` monomials.
    pub(crate) fn rank(self, n: usize, p: u32) -> usize {
        let mut r = 0usize;
        for i in 0..n {
            r = r * p as usize + self.exp(i) as usize;
        }
        r
    }

    pub(crate) fn unrank(mut r: usize, n: usize, p: u32) -> Mono {
        let mut exps = vec![0u32; n];
        for i in (0..n).rev() {
            exps[i] = (r % p as usize) as u32;
            r /= p as usize;
        }
        Mono::from_exps(&exps)
    }
}

/// Exponent vector `alpha` with `0 <= alpha_i < p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All `p^n` exponent vectors in lexicographic order.
pub fn monomial_basis(field: PrimeField, n: usize) -> Vec<MultiIndex> {
    let count = (field.p() as usize).pow(n as u32);
    (0..count)
        .map(|r| MultiIndex(Mono::unrank(r, n, field.p()).exps(n)))
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncPoly {
    field: PrimeField,
    n: usize,
    terms: Vec<(Mono, u32)>,
}

impl TruncPoly {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables");
        TruncPoly { field, n, terms: Vec::new() }
    }

    pub fn constant(field: PrimeField, n: usize, c: i64) -> Self {
        let mut f = Self::zero(field, n);
        let c = field.reduce(c);
        if c != 0 {
            f.terms.push((Mono(0), c));
        }
        f
    }

    pub fn one(field: PrimeField, n: usize) -> Self {
        Self::constant(field, n, 1)
    }

    /// The generator `x_{i+1}`.
    pub fn var(field: PrimeField, n: usize, i: usize) -> Self {
        assert!(i < n);
        TruncPoly { field, n, terms: vec![(Mono::unit(i), 1)] }
    }

    /// `1 + x_{i+1}`, an invertible element with `xi^p = 1`.
    pub fn xi(field: PrimeField, n: usize, i: usize) -> Self {
        Self::var(field, n, i).add(&Self::one(field, n))
    }

    pub fn monomial(field: PrimeField, exps: &[u32], coeff: i64) -> Result<Self> {
        let n = exps.len();
        if n > MAX_VARS {
            return Err(Error::ArityMismatch { left: n, right: MAX_VARS });
        }
        if let Some(i) = exps.iter().position(|&e| e >= field.p()) {
            return Err(Error::IndexError { index: i, len: n });
        }
        let mut f = Self::zero(field, n);
        let c = field.reduce(coeff);
        if c != 0 {
            f.terms.push((Mono::from_exps(exps), c));
        }
        Ok(f)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms(field: PrimeField, n: usize, terms: &[(Vec<u32>, i64)]) -> Result<Self> {
        let mut raw = Vec::with_capacity(terms.len());
        for (exps, c) in terms {
            if exps.len() != n {
                return Err(Error::ArityMismatch { left: exps.len(), right: n });
            }
            if let Some(i) = exps.iter().position(|&e| e >= field.p()) {
                return Err(Error::IndexError { index: i, len: n });
            }
            raw.push((Mono::from_exps(exps), field.reduce(*c)));
        }
        Ok(Self::from_raw(field, n, raw))
    }

    pub(crate) fn from_raw(field: PrimeField, n: usize, mut raw: Vec<(Mono, u32)>) -> Self {
        raw.sort_unstable_by_key(|t| t.0);
        let mut terms: Vec<(Mono, u32)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match terms.last_mut() {
                Some(last) if last.0 == m => last.1 = field.add(last.1, c),
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|t| t.1 != 0);
        TruncPoly { field, n, terms }
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn raw_terms(&self) -> &[(Mono, u32)] {
        &self.terms
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, u32)> + '_ {
        self.terms.iter().map(move |&(m, c)| (MultiIndex(m.exps(self.n)), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> u32 {
        let m = Mono::from_exps(exps);
        self.coeff_raw(m)
    }

    pub(crate) fn coeff_raw(&self, m: Mono) -> u32 {
        match self.terms.binary_search_by_key(&m, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff_raw(Mono(0))
    }

    /// Smallest total degree of a nonzero term.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    fn check(&self, other: &TruncPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch { left: self.p(), right: other.p() });
        }
        if self.n != other.n {
            return Err(Error::ArityMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    fn merge(&self, other: &TruncPoly, sign: bool) -> TruncPoly {
        let f = self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let conv = |c: u32| if sign { f.neg(c) } else { c };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, conv(b[j].1)));
                j += 1;
            } else {
                let c = f.add(a[i].1, conv(b[j].1));
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        TruncPoly { field: f, n: self.n, terms: out }
    }

    pub fn try_add(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.check(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.check(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Panics on shape mismatch; see [`TruncPoly::try_add`].
    pub fn add(&self, other: &TruncPoly) -> TruncPoly {
        self.try_add(other).expect("shape mismatch")
    }

    pub fn sub(&self, other: &TruncPoly) -> TruncPoly {
        self.try_sub(other).expect("shape mismatch")
    }

    pub fn mul(&self, other: &TruncPoly) -> TruncPoly {
        self.try_mul(other).expect("shape mismatch")
    }

    fn mul_unchecked(&self, other: &TruncPoly) -> TruncPoly {
        let f = self.field;
        let p = f.p();
        if self.is_zero() || other.is_zero() {
            return TruncPoly::zero(f, self.n);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                if let Some(m) = ma.mul(mb, p) {
                    raw.push((m, f.mul(ca, cb)));
                }
            }
        }
        TruncPoly::from_raw(f, self.n, raw)
    }

    pub fn scale(&self, c: u32) -> TruncPoly {
        let f = self.field;
        let c = c % f.p();
        if c == 0 {
            return TruncPoly::zero(f, self.n);
        }
        TruncPoly {
            field: f,
            n: self.n,
            terms: self.terms.iter().map(|&(m, v)| (m, f.mul(v, c))).collect(),
        }
    }

    pub fn neg(&self) -> TruncPoly {
        self.scale(self.field.p() - 1)
    }

    pub fn pow(&self, mut e: u64) -> TruncPoly {
        let mut acc = TruncPoly::one(self.field, self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// Formal partial derivative with respect to `x_{i+1}`.
    pub fn partial(&self, i: usize) -> Result<TruncPoly> {
        if i >= self.n {
            return Err(Error::IndexError { index: i, len: self.n });
        }
        Ok(self.partial_unchecked(i))
    }

    pub(crate) fn partial_unchecked(&self, i: usize) -> TruncPoly {
        let f = self.field;
        let terms = self
            .terms
            .iter()
            .filter_map(|&(m, c)| {
                let e = m.exp(i);
                let c2 = f.mul(c, e % f.p());
                (c2 != 0).then(|| (m.lower(i), c2))
            })
            .collect::<Vec<_>>();
        // lowering one variable can reorder terms
        TruncPoly::from_raw(f, self.n, terms)
    }

    /// Regards `self` as a polynomial in `n2 >= n` variables.
    pub fn extend_vars(&self, n2: usize) -> TruncPoly {
        assert!(n2 >= self.n && n2 <= MAX_VARS);
        TruncPoly { field: self.field, n: n2, terms: self.terms.clone() }
    }

    /// Renames `x_i` to `x_{i+offset}` inside a ring with `n2` variables.
    pub fn shift_vars(&self, offset: usize, n2: usize) -> TruncPoly {
        assert!(self.n + offset <= n2 && n2 <= MAX_VARS);
        let raw = self
            .terms
            .iter()
            .map(|&(m, c)| {
                let mut exps = vec![0u32; n2];
                for i in 0..self.n {
                    exps[i + offset] = m.exp(i);
                }
                (Mono::from_exps(&exps), c)
            })
            .collect();
        TruncPoly::from_raw(self.field, n2, raw)
    }

    /// Coordinates in the lexicographic monomial basis (length `p^n`).
    pub fn to_dense(&self) -> Vec<u32> {
        let p = self.p();
        let mut v = vec![0u32; (p as usize).pow(self.n as u32)];
        for &(m, c) in &self.terms {
            v[m.rank(self.n, p)] = c;
        }
        v
    }

    pub fn from_dense(field: PrimeField, n: usize, v: &[u32]) -> TruncPoly {
        let p = field.p();
        assert_eq!(v.len(), (p as usize).pow(n as u32));
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, &c)| c % p != 0)
            .map(|(r, &c)| (Mono::unrank(r, n, p), c % p))
            .collect();
        TruncPoly { field, n, terms }
    }

    pub fn dim(field: PrimeField, n: usize) -> usize {
        (field.p() as usize).pow(n as u32)
    }
}

impl Add for &TruncPoly {
    type Output = TruncPoly;
    fn add(self, rhs: &TruncPoly) -> TruncPoly {
        TruncPoly::add(self, rhs)
    }
}

impl Sub for &TruncPoly {
    type Output = TruncPoly;
    fn sub(self, rhs: &TruncPoly) -> TruncPoly {
        TruncPoly::sub(self, rhs)
    }
}

impl Mul for &TruncPoly {
    type Output = TruncPoly;
    fn mul(self, rhs: &TruncPoly) -> TruncPoly {
        TruncPoly::mul(self, rhs)
    }
}

impl Neg for &TruncPoly {
    type Output = TruncPoly;
    fn neg(self) -> TruncPoly {
        TruncPoly::neg(self)
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, &(m, c)) in self.terms.iter().enumerate() {
            let c = self.field.signed(c);
            let sign = if c < 0 { "-" } else { "+" };
            if k > 0 {
                write!(f, " {sign} ")?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.unsigned_abs();
            let mut factors = Vec::new();
            for i in 0..self.n {
                match m.exp(i) {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    e => factors.push(format!("x{}^{}", i + 1, e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncPoly[p={}, n={}]({})", self.p(), self.n, self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coeff: u32,
}

#[derive(Serialize, Deserialize)]
struct TruncPolyJson {
    p: u32,
    n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for TruncPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TruncPolyJson {
            p: self.p(),
            n: self.n,
            terms: self.terms.iter().map(|&(m, c)| TermJson { exp: m.exps(self.n), coeff: c }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TruncPolyJson::deserialize(d)?;
        let field = PrimeField::new(j.p).map_err(D::Error::custom)?;
        let terms: Vec<(Vec<u32>, i64)> = j.terms.into_iter().map(|t| (t.exp, t.coeff as i64)).collect();
        TruncPoly::from_terms(field, j.n, &terms).map_err(D::Error::custom)
    }
}

/// The unital algebra endomorphism of `A_n` determined by `x_i -> images[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    images: Vec<TruncPoly>,
    powers: Vec<Vec<TruncPoly>>,
}

impl Substitution {
    /// Images must have zero constant term so that `x_i^p = 0` is respected.
    pub fn new(images: Vec<TruncPoly>) -> Result<Self> {
        let Some(first) = images.first() else {
            return Err(Error::ArityMismatch { left: 0, right: 1 });
        };
        let (field, n) = (first.field(), first.nvars());
        if images.len() != n {
            return Err(Error::ArityMismatch { left: images.len(), right: n });
        }
        for (i, g) in images.iter().enumerate() {
            if g.field() != field {
                return Err(Error::ModulusMismatch { left: g.p(), right: field.p() });
            }
            if g.nvars() != n {
                return Err(Error::ArityMismatch { left: g.nvars(), right: n });
            }
            if g.constant_term() != 0 {
                return Err(Error::RelationViolation { index: i });
            }
        }
        let powers = images
            .iter()
            .map(|g| {
                let mut pw = vec![TruncPoly::one(field, n)];
                for k in 1..field.p() as usize {
                    let next = pw[k - 1].mul(g);
                    pw.push(next);
                }
                pw
            })
            .collect();
        Ok(Substitution { images, powers })
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self::new((0..n).map(|i| TruncPoly::var(field, n, i)).collect()).expect("identity substitution")
    }

    pub fn images(&self) -> &[TruncPoly] {
        &self.images
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn field(&self) -> PrimeField {
        self.images[0].field()
    }

    pub fn apply(&self, f: &TruncPoly) -> TruncPoly {
        let n = self.nvars();
        assert_eq!(f.nvars(), n);
        let mut acc = TruncPoly::zero(self.field(), n);
        for &(m, c) in f.raw_terms() {
            let mut term = TruncPoly::constant(self.field(), n, c as i64);
            for i in 0..n {
                let e = m.exp(i) as usize;
                if e > 0 {
                    term = term.mul(&self.powers[i][e]);
                    if term.is_zero() {
                        break;
                    }
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Matrix of the induced linear map on the monomial basis (columns are
    /// images of basis monomials).
    pub fn matrix(&self) -> Matrix {
        let field = self.field();
        let n = self.nvars();
        let cols: Vec<Vec<u32>> = monomial_basis(field, n)
            .iter()
            .map(|a| {
                let m = TruncPoly::monomial(field, &a.0, 1).expect("basis monomial");
                self.apply(&m).to_dense()
            })
            .collect();
        Matrix::from_columns(field, &cols, TruncPoly::dim(field, n))
    }

    pub fn is_automorphism(&self) -> bool {
        let m = self.matrix();
        m.rank() == m.rows()
    }

    /// `self` after `other`: `x_i -> self(other(x_i))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        Substitution::new(other.images.iter().map(|g| self.apply(g)).collect()).expect("composition keeps relations")
    }
}
