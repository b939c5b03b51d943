//! Differential forms on `A_n` and the `W(n)`-module structure on them.
//!
//! An `r`-form is stored as a map from strictly increasing index tuples
//! `(i_1 < ... < i_r)` to the coefficient of `dx_{i_1} ^ ... ^ dx_{i_r}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::truncpoly::TruncPoly;
use crate::witt::Derivation;

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DiffFormJson", into = "DiffFormJson")]
pub struct DiffForm {
    field: PrimeField,
    n: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, TruncPoly>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    subset: Vec<usize>,
    poly: TruncPoly,
}

#[derive(Serialize, Deserialize)]
struct DiffFormJson {
    degree: usize,
    p: u32,
    n: usize,
    components: Vec<ComponentJson>,
}

impl From<DiffForm> for DiffFormJson {
    fn from(w: DiffForm) -> Self {
        DiffFormJson {
            degree: w.degree,
            p: w.field.p(),
            n: w.n,
            components: w
                .comps
                .into_iter()
                .map(|(s, poly)| ComponentJson { subset: s.iter().map(|i| i + 1).collect(), poly })
                .collect(),
        }
    }
}

impl TryFrom<DiffFormJson> for DiffForm {
    type Error = Error;
    fn try_from(j: DiffFormJson) -> Result<Self> {
        let field = PrimeField::new(j.p)?;
        let mut w = DiffForm::zero(field, j.n, j.degree)?;
        for c in j.components {
            if c.subset.len() != j.degree || c.subset.iter().any(|&i| i == 0 || i > j.n) {
                return Err(Error::DegreeError(c.subset.len(), j.n));
            }
            let idx: Vec<usize> = c.subset.iter().map(|i| i - 1).collect();
            let (sign, sorted) = sort_sign(&idx).ok_or(Error::DegreeError(j.degree, j.n))?;
            let poly = if sign { c.poly.neg() } else { c.poly };
            w.add_component(sorted, &poly);
        }
        Ok(w)
    }
}

/// Sorts an index tuple, returning `(odd permutation?, sorted)`, or `None`
/// when an index repeats (the wedge product vanishes).
pub(crate) fn sort_sign(idx: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((odd, v))
}

impl DiffForm {
    pub fn zero(field: PrimeField, n: usize, degree: usize) -> Result<Self> {
        if degree > n {
            return Err(Error::DegreeError(degree, n));
        }
        Ok(DiffForm { field, n, degree, comps: BTreeMap::new() })
    }

    /// The 0-form `u`.
    pub fn function(u: &TruncPoly) -> Self {
        let mut w = DiffForm { field: u.field(), n: u.nvars(), degree: 0, comps: BTreeMap::new() };
        w.add_component(vec![], u);
        w
    }

    /// `dx_{i+1}`.
    pub fn dx(field: PrimeField, n: usize, i: usize) -> Self {
        let mut w = DiffForm { field, n, degree: 1, comps: BTreeMap::new() };
        w.add_component(vec![i], &TruncPoly::one(field, n));
        w
    }

    /// The 1-form `sum_i coeffs[i] dx_i`.
    pub fn one_form(coeffs: &[TruncPoly]) -> Self {
        let first = &coeffs[0];
        let mut w = DiffForm { field: first.field(), n: first.nvars(), degree: 1, comps: BTreeMap::new() };
        for (i, c) in coeffs.iter().enumerate() {
            w.add_component(vec![i], c);
        }
        w
    }

    fn add_component(&mut self, key: Vec<usize>, u: &TruncPoly) {
        if u.is_zero() {
            return;
        }
        let entry = self.comps.entry(key.clone()).or_insert_with(|| TruncPoly::zero(u.field(), u.nvars()));
        *entry = entry.add(u);
        if entry.is_zero() {
            self.comps.remove(&key);
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Coefficient at the increasing 0-based index tuple `subset`.
    pub fn component(&self, subset: &[usize]) -> TruncPoly {
        self.comps.get(subset).cloned().unwrap_or_else(|| TruncPoly::zero(self.field, self.n))
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &TruncPoly)> {
        self.comps.iter()
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        assert_eq!((self.n, self.degree), (other.n, other.degree), "form shape mismatch");
        let mut w = self.clone();
        for (k, u) in &other.comps {
            w.add_component(k.clone(), u);
        }
        w
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.add(&other.scale(self.field.p() - 1))
    }

    pub fn scale(&self, c: u32) -> DiffForm {
        let mut w = DiffForm { comps: BTreeMap::new(), ..self.clone() };
        for (k, u) in &self.comps {
            w.add_component(k.clone(), &u.scale(c));
        }
        w
    }

    /// The `A_n`-module action `u * omega`.
    pub fn mul_poly(&self, u: &TruncPoly) -> DiffForm {
        let mut w = DiffForm { comps: BTreeMap::new(), ..self.clone() };
        for (k, v) in &self.comps {
            w.add_component(k.clone(), &u.mul(v));
        }
        w
    }

    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch { left: self.field.p(), right: other.field.p() });
        }
        if self.n != other.n {
            return Err(Error::ArityMismatch { left: self.n, right: other.n });
        }
        let degree = self.degree + other.degree;
        let mut w = DiffForm::zero(self.field, self.n, degree)?;
        for (ka, ua) in &self.comps {
            for (kb, ub) in &other.comps {
                let joined: Vec<usize> = ka.iter().chain(kb).copied().collect();
                if let Some((odd, key)) = sort_sign(&joined) {
                    let prod = ua.mul(ub);
                    w.add_component(key, &if odd { prod.neg() } else { prod });
                }
            }
        }
        Ok(w)
    }

    /// `omega(D)` for a 1-form `omega`.
    pub fn eval_one_form(&self, d: &Derivation) -> Result<TruncPoly> {
        if self.degree != 1 {
            return Err(Error::DegreeError(self.degree, 1));
        }
        let mut acc = TruncPoly::zero(self.field, self.n);
        for (k, u) in &self.comps {
            acc = acc.add(&u.mul(d.coeff(k[0])));
        }
        Ok(acc)
    }

    /// Coefficients `omega(d_j)` of a 1-form.
    fn one_form_coeffs(&self) -> Vec<TruncPoly> {
        (0..self.n).map(|j| self.component(&[j])).collect()
    }

    /// Lie derivative `D.omega`.
    ///
    /// On 1-forms this is `(D.f)(E) = D(f(E)) - f([D, E])`, read off on the
    /// basis `E = d_j`; on `r`-forms each term `u dx_{i_1} ^ ... ^ dx_{i_r}`
    /// is treated as the wedge of the 1-forms `u dx_{i_1}, dx_{i_2}, ...`
    /// and the action is expanded by the Leibniz rule over the factors.
    pub fn lie_derivative(&self, d: &Derivation) -> DiffForm {
        assert_eq!(d.nvars(), self.n, "arity mismatch");
        match self.degree {
            0 => DiffForm::function(&d.apply(&self.component(&[]))),
            1 => lie_one_form(d, self),
            _ => {
                let mut acc = DiffForm::zero(self.field, self.n, self.degree).expect("degree checked");
                for (k, u) in &self.comps {
                    let mut factors: Vec<DiffForm> = k.iter().map(|&i| DiffForm::dx(self.field, self.n, i)).collect();
                    factors[0] = factors[0].mul_poly(u);
                    for i in 0..factors.len() {
                        let mut term = DiffForm::function(&TruncPoly::one(self.field, self.n));
                        for (j, f) in factors.iter().enumerate() {
                            let g = if i == j { lie_one_form(d, f) } else { f.clone() };
                            term = term.wedge(&g).expect("degree bounded by n");
                        }
                        acc = acc.add(&term);
                    }
                }
                acc
            }
        }
    }

    /// Flattens the form into coordinates: components in increasing order of
    /// index tuple, each followed by its `p^n` dense coefficients.
    pub fn to_coords(&self) -> Vec<u32> {
        let subsets = subsets(self.n, self.degree);
        let m = TruncPoly::dim(self.field, self.n);
        let mut v = vec![0u32; subsets.len() * m];
        for (s, key) in subsets.iter().enumerate() {
            if let Some(u) = self.comps.get(key) {
                v[s * m..(s + 1) * m].copy_from_slice(&u.to_dense());
            }
        }
        v
    }
}

fn lie_one_form(d: &Derivation, f: &DiffForm) -> DiffForm {
    let field = f.field;
    let n = f.n;
    let fc = f.one_form_coeffs();
    let coeffs: Vec<TruncPoly> = (0..n)
        .map(|j| {
            let dj = Derivation::partial(field, n, j);
            let first = d.apply(&fc[j]);
            let second = f.eval_one_form(&d.bracket(&dj)).expect("1-form");
            first.sub(&second)
        })
        .collect();
    DiffForm::one_form(&coeffs)
}

/// All increasing `r`-tuples from `0..n`, in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// `du = sum_i d_i(u) dx_i`, so that `du(D) = D(u)`.
pub fn exterior_d(u: &TruncPoly) -> DiffForm {
    let coeffs: Vec<TruncPoly> = (0..u.nvars()).map(|i| u.partial_unchecked(i)).collect();
    DiffForm::one_form(&coeffs)
}

/// The three Cartan forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormKind {
    S,
    H,
    K,
}

/// `omega_S`, `omega_H` (`n = 2r`) or `omega_K` (`n = 2r + 1`).
pub fn cartan_form(field: PrimeField, kind: FormKind, n: usize) -> Result<DiffForm> {
    let dx = |i: usize| DiffForm::dx(field, n, i);
    match kind {
        FormKind::S => {
            if n == 0 {
                return Err(Error::DegreeError(0, 0));
            }
            let mut w = dx(0);
            for i in 1..n {
                w = w.wedge(&dx(i))?;
            }
            Ok(w)
        }
        FormKind::H => {
            if n == 0 || n % 2 != 0 {
                return Err(Error::ParityError(format!("omega_H needs an even number of variables, got {n}")));
            }
            let r = n / 2;
            let mut w = DiffForm::zero(field, n, 2)?;
            for i in 0..r {
                w = w.add(&dx(i).wedge(&dx(i + r))?);
            }
            Ok(w)
        }
        FormKind::K => {
            if n % 2 != 1 {
                return Err(Error::ParityError(format!("omega_K needs an odd number of variables, got {n}")));
            }
            let r = (n - 1) / 2;
            let mut coeffs = vec![TruncPoly::zero(field, n); n];
            coeffs[n - 1] = TruncPoly::one(field, n);
            for i in 0..r {
                coeffs[i] = TruncPoly::var(field, n, i + r);
                coeffs[i + r] = TruncPoly::var(field, n, i).neg();
            }
            Ok(DiffForm::one_form(&coeffs))
        }
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(k, u)| {
                let basis: Vec<String> = k.iter().map(|i| format!("dx{}", i + 1)).collect();
                if k.is_empty() {
                    format!("{u}")
                } else {
                    format!("({u})*{}", basis.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffForm[deg={}]({})", self.degree, self)
    }
}
