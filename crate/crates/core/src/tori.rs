//! Tori, their centralizers and weight-space decompositions.
//!
//! Also holds the frame `xi_i = 1 + x_i`, `theta_i = xi_i d_i - xi_n d_n`,
//! `theta_n = xi_n d_n` of `W(n)` and the substitution automorphisms
//! `xi_i -> prod_j xi_j^{A_ji}` through which `GL_n(F_p)` acts on the
//! standard torus of `W(n)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::cartan::{build_family, grading_weights, Family, SubalgebraBasis};
use crate::contact::Contact;
use crate::embeddings::phi_h_apply;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{is_zero, Echelon, Matrix};
use crate::restricted::RestrictedAlgebra;
use crate::truncpoly::{monomial_basis, Substitution, TruncPoly};
use crate::witt::{witt_dim, Derivation};

/// One of `W(n)`, `S(n)`, `H(n)` (as subalgebras of `W(n)`) or the contact
/// algebra `K''(n)` on its carrier, with the standard filtration piece
/// `g_(0)` in the algebra's own coordinates.
#[derive(Clone, Debug)]
pub struct Ambient {
    family: Family,
    n: usize,
    algebra: Arc<RestrictedAlgebra>,
    g0: Echelon,
    contact: Option<Arc<Contact>>,
}

impl Ambient {
    /// `n` is the number of variables; for `K` it must be odd.
    pub fn build(field: PrimeField, family: Family, n: usize) -> Result<Self> {
        match family {
            Family::W | Family::S | Family::H => {
                let b = build_family(field, family, n)?;
                let algebra = Arc::new(b.basis.to_algebra()?);
                let piece = b.basis.filtration_piece(&grading_weights(family, n), 0);
                let real = algebra.realization().expect("realized in W(n)");
                let mut g0 = Echelon::new(field, algebra.dim());
                for v in piece.basis() {
                    let d = Derivation::from_coords(field, n, v);
                    g0.insert(real.from_derivation(&d).expect("inside the algebra"));
                }
                Ok(Ambient { family, n, algebra, g0, contact: None })
            }
            Family::K | Family::Kpp => {
                if n < 3 || n % 2 == 0 {
                    return Err(Error::ParityError(format!("the contact algebra needs an odd n >= 3, got {n}")));
                }
                let c = Contact::build(field, (n - 1) / 2)?;
                let algebra = Arc::new(c.algebra().clone());
                let g0 = c.filtration_span(0);
                Ok(Ambient { family, n, algebra, g0, contact: Some(Arc::new(c)) })
            }
            Family::P => Err(Error::UnsupportedKind("tori of P(2r) are handled in the poisson module".into())),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.algebra.field()
    }

    pub fn algebra(&self) -> &RestrictedAlgebra {
        &self.algebra
    }

    /// `g_(0)` in algebra coordinates.
    pub fn g0(&self) -> &Echelon {
        &self.g0
    }

    pub fn contact(&self) -> Option<&Contact> {
        self.contact.as_deref()
    }

    /// Algebra coordinates of a derivation of `A_n`, if it lies in the algebra.
    pub fn coords_of(&self, d: &Derivation) -> Option<Vec<u32>> {
        self.algebra.realization()?.from_derivation(d)
    }

    /// The derivation of `A_n` represented by algebra coordinates.
    pub fn derivation_of(&self, x: &[u32]) -> Derivation {
        self.algebra.realization().expect("realized in W(n)").to_derivation(x)
    }
}

/// A split torus given by a toral basis inside an [`Ambient`] algebra.
#[derive(Clone, Debug)]
pub struct Torus {
    label: String,
    ambient: Arc<Ambient>,
    basis: Vec<Vec<u32>>,
    generators: Vec<String>,
    notes: Vec<String>,
}

impl Torus {
    /// Checks that the vectors are independent, pairwise commuting and toral.
    pub fn new(label: impl Into<String>, ambient: Arc<Ambient>, basis: Vec<Vec<u32>>, generators: Vec<String>) -> Result<Self> {
        let label = label.into();
        let alg = ambient.algebra();
        for (i, t) in basis.iter().enumerate() {
            if alg.p_power(t) != *t {
                return Err(Error::verification(&label, format!("generator {} is not toral", generators[i])));
            }
            for (j, u) in basis.iter().enumerate().skip(i + 1) {
                if !is_zero(&alg.bracket(t, u)) {
                    return Err(Error::verification(
                        &label,
                        format!("generators {} and {} do not commute", generators[i], generators[j]),
                    ));
                }
            }
        }
        if Echelon::from_vectors(alg.field(), alg.dim(), &basis).rank() != basis.len() {
            return Err(Error::verification(&label, "generators are linearly dependent"));
        }
        Ok(Torus { label, ambient, basis, generators, notes: Vec::new() })
    }

    /// Builds a torus from derivations of `A_n` lying in a realized ambient.
    pub fn from_derivations(label: impl Into<String>, ambient: Arc<Ambient>, ds: &[Derivation]) -> Result<Self> {
        let label = label.into();
        let mut basis = Vec::with_capacity(ds.len());
        for d in ds {
            let v = ambient
                .coords_of(d)
                .ok_or_else(|| Error::verification(&label, format!("generator {d} is not in the ambient algebra")))?;
            basis.push(v);
        }
        let generators = ds.iter().map(|d| d.to_string()).collect();
        Self::new(label, ambient, basis, generators)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    /// Remarks recorded while the torus was selected.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn span(&self) -> Echelon {
        let alg = self.ambient.algebra();
        Echelon::from_vectors(alg.field(), alg.dim(), &self.basis)
    }

    /// `dim (t cap g_(0))`.
    pub fn f0(&self) -> usize {
        self.span().intersection(self.ambient.g0()).rank()
    }

    /// Centralizer in the ambient algebra, in its coordinates.
    pub fn centralizer(&self) -> Echelon {
        self.ambient.algebra().centralizer(&self.basis)
    }

    /// Dimension of the centralizer; an upper bound for the rank when the
    /// torus has maximal dimension.
    pub fn rank_estimate(&self) -> usize {
        self.centralizer().rank()
    }

    pub fn ad_matrices(&self) -> Vec<Matrix> {
        self.basis.iter().map(|t| self.ambient.algebra().ad(t)).collect()
    }

    /// Matrices of the generators acting on `A_n`.
    pub fn module_matrices(&self) -> Vec<Matrix> {
        self.basis.iter().map(|t| self.ambient.derivation_of(t).action_matrix()).collect()
    }

    pub fn adjoint_weights(&self) -> Result<WeightDecomposition> {
        weight_decomposition(self.field(), &self.ad_matrices())
    }

    pub fn module_weights(&self) -> Result<WeightDecomposition> {
        weight_decomposition(self.field(), &self.module_matrices())
    }

    pub fn field(&self) -> PrimeField {
        self.ambient.field()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "label": self.label,
            "family": self.ambient.family().to_string(),
            "n": self.ambient.nvars(),
            "dim": self.dim(),
            "generators": self.generators,
            "f0": self.f0(),
            "notes": self.notes,
        })
    }
}

/// `(1 + x_i) d_i - x_{i+r} d_{i+r}` for `i = 1..r`.
pub fn h_torus_generators(field: PrimeField, r: usize) -> Vec<Derivation> {
    let n = 2 * r;
    (0..r)
        .map(|i| {
            Derivation::with_coeff(TruncPoly::xi(field, n, i), i)
                .sub(&Derivation::with_coeff(TruncPoly::var(field, n, i + r), i + r))
        })
        .collect()
}

/// The list with the last generator read literally as
/// `(1 + x_r) d_{r+1} - x_{2r} d_{2r}`.
pub fn h_torus_generators_literal(field: PrimeField, r: usize) -> Vec<Derivation> {
    let n = 2 * r;
    let mut gens = h_torus_generators(field, r);
    gens[r - 1] = Derivation::with_coeff(TruncPoly::xi(field, n, r - 1), r)
        .sub(&Derivation::with_coeff(TruncPoly::var(field, n, n - 1), n - 1));
    gens
}

/// The standard torus of maximal dimension meeting `g_(0)` trivially.
///
/// `n` is the number of variables: `W(n)`, `S(n)`, `H(n)` with `n = 2r`,
/// and `K(n)` with `n = 2r + 1`.
pub fn agt2_torus(field: PrimeField, family: Family, n: usize) -> Result<Torus> {
    let ambient = Arc::new(Ambient::build(field, family, n)?);
    match family {
        Family::W => {
            let gens: Vec<Derivation> = (0..n).map(|i| Derivation::with_coeff(TruncPoly::xi(field, n, i), i)).collect();
            Torus::from_derivations(format!("t0(W({n}))"), ambient, &gens)
        }
        Family::S => {
            let xn = Derivation::with_coeff(TruncPoly::var(field, n, n - 1), n - 1);
            let gens: Vec<Derivation> =
                (0..n - 1).map(|i| Derivation::with_coeff(TruncPoly::xi(field, n, i), i).sub(&xn)).collect();
            Torus::from_derivations(format!("t0(S({n}))"), ambient, &gens)
        }
        Family::H => {
            if n % 2 != 0 {
                return Err(Error::ParityError(format!("H(n) needs even n, got {n}")));
            }
            let r = n / 2;
            let label = format!("t0(H({n}))");
            match Torus::from_derivations(label.clone(), ambient.clone(), &h_torus_generators(field, r)) {
                Ok(t) => Ok(t),
                Err(first) => {
                    let mut t = Torus::from_derivations(label, ambient, &h_torus_generators_literal(field, r))?;
                    t.notes.push(format!("index-corrected list rejected ({first}); literal list accepted"));
                    Ok(t)
                }
            }
        }
        Family::K | Family::Kpp => {
            let c = ambient.contact().expect("contact ambient").clone();
            let derived = c.derived();
            let label = format!("t0(K({n}))");
            let build = |swap: bool| -> Result<Torus> {
                let gens = c.agt2_torus(swap);
                for g in &gens {
                    if !derived.contains(&g.to_dense()) {
                        return Err(Error::verification(&label, format!("generator {g} is not in K({n})")));
                    }
                }
                let basis = gens.iter().map(|g| g.to_dense()).collect();
                Torus::new(label.clone(), ambient.clone(), basis, gens.iter().map(|g| g.to_string()).collect())
            };
            match build(false) {
                Ok(t) => Ok(t),
                Err(first) => {
                    let mut t = build(true)?;
                    t.notes.push(format!("literal list rejected ({first}); list with x_i and x_(r+i) exchanged accepted"));
                    Ok(t)
                }
            }
        }
        Family::P => Err(Error::UnsupportedKind("P".into())),
    }
}

/// The image of the standard torus of `W(r)` under `D_H . phi_r`, as a
/// torus of `H(2r)`.
pub fn h_torus_via_embedding(field: PrimeField, r: usize) -> Result<Torus> {
    let ambient = Arc::new(Ambient::build(field, Family::H, 2 * r)?);
    let gens: Vec<Derivation> =
        (0..r).map(|i| phi_h_apply(&Derivation::with_coeff(TruncPoly::xi(field, r, i), i))).collect();
    Torus::from_derivations(format!("D_H.phi_{r}(t0(W({r})))"), ambient, &gens)
}

/// `C_{W(n)}` of a family of derivations.
pub fn witt_centralizer(field: PrimeField, n: usize, ds: &[Derivation]) -> SubalgebraBasis {
    let dim = witt_dim(field, n);
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let basis = Derivation::basis(field, n);
    for t in ds {
        let cols: Vec<Vec<u32>> = basis.iter().map(|b| t.bracket(b).to_coords()).collect();
        let ad = Matrix::from_columns(field, &cols, dim);
        rows.extend((0..dim).map(|i| ad.row(i).to_vec()));
    }
    if rows.is_empty() {
        return SubalgebraBasis::whole(field, n);
    }
    let kernel = Matrix::from_rows(field, &rows, dim).kernel();
    SubalgebraBasis::from_span("C_W", field, n, Echelon::from_vectors(field, dim, &kernel))
}

/// Simultaneous `F_p`-eigenspaces of commuting operators.
#[derive(Clone, Debug)]
pub struct WeightDecomposition {
    field: PrimeField,
    carrier_dim: usize,
    ops: Vec<Matrix>,
    spaces: BTreeMap<Vec<u32>, Echelon>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightEntry {
    pub lambda: Vec<u32>,
    pub dim: usize,
}

impl WeightDecomposition {
    pub fn mu(&self) -> usize {
        self.ops.len()
    }

    pub fn carrier_dim(&self) -> usize {
        self.carrier_dim
    }

    /// Nonzero weight spaces keyed by the weight, in lexicographic order.
    pub fn spaces(&self) -> &BTreeMap<Vec<u32>, Echelon> {
        &self.spaces
    }

    pub fn space(&self, lambda: &[u32]) -> Option<&Echelon> {
        self.spaces.get(lambda)
    }

    pub fn dim_of(&self, lambda: &[u32]) -> usize {
        self.space(lambda).map_or(0, |e| e.rank())
    }

    pub fn entries(&self) -> Vec<WeightEntry> {
        self.spaces.iter().map(|(l, e)| WeightEntry { lambda: l.clone(), dim: e.rank() }).collect()
    }

    /// The weight of `v` if it is a simultaneous eigenvector.
    pub fn weight_of(&self, v: &[u32]) -> Option<Vec<u32>> {
        if is_zero(v) {
            return None;
        }
        let f = self.field;
        let mut lambda = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let w = op.mul_vec(v);
            let c = f.elements().find(|&c| w.iter().zip(v).all(|(&a, &b)| a == f.mul(c, b)))?;
            lambda.push(c);
        }
        Some(lambda)
    }

    /// Whether every nonzero weight space has the same dimension.
    pub fn uniform_root_dims(&self) -> bool {
        let zero = vec![0u32; self.mu()];
        let dims: Vec<usize> = self.spaces.iter().filter(|(l, _)| **l != zero).map(|(_, e)| e.rank()).collect();
        dims.windows(2).all(|w| w[0] == w[1])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "weights": self.entries(), "carrier_dim": self.carrier_dim })
    }
}

/// Decomposes `F_p^N` under commuting operators with eigenvalues in `F_p`.
pub fn weight_decomposition(field: PrimeField, ops: &[Matrix]) -> Result<WeightDecomposition> {
    let Some(first) = ops.first() else {
        return Err(Error::DimensionMismatch("no operators".into()));
    };
    let n = first.rows();
    let mut parts: Vec<(Vec<u32>, Vec<Vec<u32>>)> =
        vec![(Vec::new(), (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect())];
    for op in ops {
        let mut next = Vec::new();
        for (lambda, basis) in &parts {
            let images: Vec<Vec<u32>> = basis.iter().map(|b| op.mul_vec(b)).collect();
            for c in field.elements() {
                let cols: Vec<Vec<u32>> = images
                    .iter()
                    .zip(basis)
                    .map(|(img, b)| img.iter().zip(b).map(|(&x, &y)| field.sub(x, field.mul(c, y))).collect())
                    .collect();
                let m = Matrix::from_columns(field, &cols, n);
                let kernel = m.kernel();
                if kernel.is_empty() {
                    continue;
                }
                let vecs: Vec<Vec<u32>> = kernel
                    .iter()
                    .map(|y| {
                        let mut v = vec![0u32; n];
                        for (k, &yk) in y.iter().enumerate() {
                            crate::linalg::axpy(field, &mut v, yk, &basis[k]);
                        }
                        v
                    })
                    .collect();
                let mut l = lambda.clone();
                l.push(c);
                next.push((l, vecs));
            }
        }
        parts = next;
    }
    let found: usize = parts.iter().map(|(_, b)| b.len()).sum();
    if found != n {
        return Err(Error::NotSemisimple { found, expected: n });
    }
    let spaces = parts.into_iter().map(|(l, b)| (l, Echelon::from_vectors(field, n, &b))).collect();
    Ok(WeightDecomposition { field, carrier_dim: n, ops: ops.to_vec(), spaces })
}

/// The frame `xi`, `theta`, `zeta` of `W(n)`.
#[derive(Clone, Debug)]
pub struct ThetaFrame {
    field: PrimeField,
    n: usize,
    theta: Vec<Derivation>,
    zeta: TruncPoly,
}

impl ThetaFrame {
    pub fn new(field: PrimeField, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch("the frame needs n >= 2".into()));
        }
        let last = Derivation::with_coeff(TruncPoly::xi(field, n, n - 1), n - 1);
        let mut theta: Vec<Derivation> = (0..n - 1)
            .map(|i| Derivation::with_coeff(TruncPoly::xi(field, n, i), i).sub(&last))
            .collect();
        theta.push(last);
        let mut frame = ThetaFrame { field, n, theta, zeta: TruncPoly::one(field, n) };
        // The generator of the torus constants: xi^a with all a_i = a_n.
        frame.zeta = frame.xi_power(&vec![1; n]);
        Ok(frame)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// `xi^a` for integer exponents, read modulo `p` since `xi_i^p = 1`.
    pub fn xi_power(&self, a: &[i64]) -> TruncPoly {
        let p = self.field.p() as i64;
        let mut acc = TruncPoly::one(self.field, self.n);
        for (i, &e) in a.iter().enumerate() {
            acc = acc.mul(&TruncPoly::xi(self.field, self.n, i).pow(e.rem_euclid(p) as u64));
        }
        acc
    }

    /// `theta_1, ..., theta_n` (0-based).
    pub fn thetas(&self) -> &[Derivation] {
        &self.theta
    }

    /// `theta_1, ..., theta_{n-1}`, spanning the frame torus.
    pub fn frame_torus(&self) -> &[Derivation] {
        &self.theta[..self.n - 1]
    }

    /// `xi_1 ... xi_n`, which spans the constants of the frame torus as an algebra.
    pub fn zeta(&self) -> &TruncPoly {
        &self.zeta
    }

    /// `xi_1 ... xi_{n-1} xi_n^{-1}`.
    pub fn zeta_literal(&self) -> TruncPoly {
        let mut a = vec![1i64; self.n];
        a[self.n - 1] = -1;
        self.xi_power(&a)
    }

    /// Checks `theta_i(xi^a) = (a_i - a_n) xi^a` for all `a` in `[0, p)^n`
    /// and `theta_n(xi^a) = a_n xi^a`; returns the number of identities.
    pub fn check_weight_formula(&self) -> Result<usize> {
        let mut count = 0;
        for a in monomial_basis(self.field, self.n) {
            let e: Vec<i64> = a.0.iter().map(|&x| x as i64).collect();
            let v = self.xi_power(&e);
            for (i, th) in self.theta.iter().enumerate() {
                let c = if i + 1 < self.n { e[i] - e[self.n - 1] } else { e[self.n - 1] };
                let expect = v.scale(self.field.reduce(c));
                if th.apply(&v) != expect {
                    return Err(Error::verification("theta weights", format!("theta_{}(xi^{:?})", i + 1, a.0)));
                }
                count += 1;
            }
        }
        Ok(count)
    }

    /// Elements of `A_n` killed by the frame torus, in monomial coordinates.
    pub fn constants(&self) -> Echelon {
        let dim = TruncPoly::dim(self.field, self.n);
        let mut rows = Vec::new();
        for t in self.frame_torus() {
            let m = t.action_matrix();
            rows.extend((0..dim).map(|i| m.row(i).to_vec()));
        }
        Echelon::from_vectors(self.field, dim, &Matrix::from_rows(self.field, &rows, dim).kernel())
    }

    /// Span of `zeta^k`, `0 <= k < p`.
    pub fn zeta_algebra(&self) -> Echelon {
        let dim = TruncPoly::dim(self.field, self.n);
        let powers: Vec<Vec<u32>> = (0..self.field.p()).map(|k| self.zeta.pow(k as u64).to_dense()).collect();
        Echelon::from_vectors(self.field, dim, &powers)
    }

    /// Whether `f` is annihilated by the frame torus.
    pub fn is_constant(&self, f: &TruncPoly) -> bool {
        self.frame_torus().iter().all(|t| t.apply(f).is_zero())
    }

    /// `sum_{i <= m} k[zeta] theta_i` inside `W(n)`, for `m` leading thetas.
    pub fn zeta_span(&self, m: usize) -> SubalgebraBasis {
        let mut ds = Vec::new();
        for th in &self.theta[..m] {
            for k in 0..self.field.p() {
                ds.push(th.mul_poly(&self.zeta.pow(k as u64)));
            }
        }
        SubalgebraBasis::from_derivations(format!("sum k[zeta] theta_i (i <= {m})"), self.field, self.n, &ds)
    }

    /// Coefficients `f_i` with `D = sum f_i theta_i`.
    pub fn decompose(&self, d: &Derivation) -> Vec<TruncPoly> {
        let n = self.n;
        let inv = |i: usize| TruncPoly::xi(self.field, n, i).pow(self.field.p() as u64 - 1);
        let mut f: Vec<TruncPoly> = (0..n - 1).map(|j| d.coeff(j).mul(&inv(j))).collect();
        let mut last = d.coeff(n - 1).mul(&inv(n - 1));
        for fi in &f {
            last = last.add(fi);
        }
        f.push(last);
        f
    }
}

/// Checks the frame statements for `W(n)` and the `S(n)` centralizer.
#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub n: usize,
    pub weight_identities: usize,
    pub constants_dim: usize,
    pub constants_equal_zeta_algebra: bool,
    pub literal_zeta_is_constant: bool,
    pub centralizer_dim: usize,
    pub centralizer_matches: bool,
    /// Samples `x` in `C_{S(n)}(t)` whose constants in `A_n` are a
    /// subalgebra of `k[zeta]` larger than `k`.
    pub inclusion_samples: usize,
    pub inclusion_ok: usize,
}

pub fn frame_report<R: Rng>(field: PrimeField, n: usize, rng: &mut R, samples: usize) -> Result<FrameReport> {
    let frame = ThetaFrame::new(field, n)?;
    let weight_identities = frame.check_weight_formula()?;
    let constants = frame.constants();
    let zeta_alg = frame.zeta_algebra();
    let centralizer = witt_centralizer(field, n, frame.frame_torus());
    let expected = frame.zeta_span(n);
    let literal_zeta_is_constant = frame.is_constant(&frame.zeta_literal());

    let (mut inclusion_samples, mut inclusion_ok) = (0, 0);
    if samples > 0 {
        let ambient = Arc::new(Ambient::build(field, Family::S, n)?);
        let torus = Torus::from_derivations("frame", ambient.clone(), frame.frame_torus())?;
        let h = torus.centralizer();
        let target = frame.zeta_span(n - 1);
        let alg = ambient.algebra();
        for _ in 0..samples {
            let c: Vec<u32> = (0..h.rank()).map(|_| rng.gen_range(0..field.p())).collect();
            let x = h.combine(&c);
            let d = ambient.derivation_of(&x);
            let kernel = Echelon::from_vectors(field, constants.ambient_dim(), &d.action_matrix().kernel());
            if kernel.rank() < 2 || !kernel.is_subspace_of(&zeta_alg) {
                continue;
            }
            inclusion_samples += 1;
            let cl = alg.p_closure(&x);
            if cl.powers.iter().all(|v| target.contains(&ambient.derivation_of(v))) {
                inclusion_ok += 1;
            }
        }
    }
    Ok(FrameReport {
        n,
        weight_identities,
        constants_dim: constants.rank(),
        constants_equal_zeta_algebra: constants == zeta_alg,
        literal_zeta_is_constant,
        centralizer_dim: centralizer.dim(),
        centralizer_matches: centralizer.span() == expected.span(),
        inclusion_samples,
        inclusion_ok,
    })
}

/// The automorphism `Phi(D) = mu . D . mu^{-1}` of `W(n)` from the
/// substitution `mu: xi_i -> prod_j xi_j^{A_ji}`.
#[derive(Clone, Debug)]
pub struct WeylElement {
    matrix: Matrix,
    forward: Substitution,
    inverse: Substitution,
    induced: Matrix,
}

fn xi_substitution(field: PrimeField, a: &Matrix) -> Substitution {
    let n = a.rows();
    let images = (0..n)
        .map(|i| {
            let mut m = TruncPoly::one(field, n);
            for j in 0..n {
                m = m.mul(&TruncPoly::xi(field, n, j).pow(a[(j, i)] as u64));
            }
            m.sub(&TruncPoly::one(field, n))
        })
        .collect();
    Substitution::new(images).expect("zero constant term")
}

impl WeylElement {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn substitution(&self) -> &Substitution {
        &self.forward
    }

    /// Matrix of `Phi` on the standard torus in the basis `(1 + x_i) d_i`.
    pub fn induced(&self) -> &Matrix {
        &self.induced
    }

    pub fn conjugate(&self, d: &Derivation) -> Derivation {
        let coeffs = self
            .inverse
            .images()
            .iter()
            .map(|g| self.forward.apply(&d.apply(g)))
            .collect();
        Derivation::new(coeffs).expect("same shape")
    }
}

pub fn weyl_substitution(field: PrimeField, a: &Matrix) -> Result<WeylElement> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix", a.rows(), a.cols())));
    }
    let inv = a.inverse().map_err(|_| Error::NotInvertible)?;
    let forward = xi_substitution(field, a);
    let inverse = xi_substitution(field, &inv);
    let mut w = WeylElement { matrix: a.clone(), forward, inverse, induced: Matrix::zeros(field, n, n) };
    for i in 0..n {
        let t = Derivation::with_coeff(TruncPoly::xi(field, n, i), i);
        let img = w.conjugate(&t);
        let mut expect = Derivation::zero(field, n);
        for k in 0..n {
            let c = img.coeff(k).constant_term();
            w.induced[(k, i)] = c;
            expect = expect.add(&Derivation::with_coeff(TruncPoly::xi(field, n, k), k).scale(c));
        }
        if img != expect {
            return Err(Error::verification("weyl substitution", format!("image of xi_{} d_{} leaves the torus", i + 1, i + 1)));
        }
    }
    Ok(w)
}

/// All invertible `n x n` matrices over `F_p`, in lexicographic order of entries.
pub fn general_linear_group(field: PrimeField, n: usize) -> Vec<Matrix> {
    let p = field.p() as usize;
    let total = p.pow((n * n) as u32);
    (0..total)
        .filter_map(|mut code| {
            let mut rows = vec![vec![0u32; n]; n];
            for k in (0..n * n).rev() {
                rows[k / n][k % n] = (code % p) as u32;
                code /= p;
            }
            let m = Matrix::from_rows(field, &rows, n);
            (m.det() != 0).then_some(m)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub n: usize,
    pub p: u32,
    pub group_order: usize,
    pub distinct_induced: usize,
    pub normalizes: bool,
    pub homomorphism: bool,
    pub onto: bool,
    /// Weight spaces mapped onto the weight space of the transformed character.
    pub orbit_constant: bool,
}

/// Runs every substitution in `GL_n(F_p)` against the standard torus of `W(n)`.
pub fn weyl_exhaustive(field: PrimeField, n: usize) -> Result<WeylReport> {
    let group = general_linear_group(field, n);
    let torus = agt2_torus(field, Family::W, n)?;
    let weights = torus.adjoint_weights()?;
    let alg = torus.ambient().algebra();
    let mut elems = Vec::with_capacity(group.len());
    for a in &group {
        elems.push(weyl_substitution(field, a)?);
    }
    let key = |m: &Matrix| (0..n).flat_map(|i| m.row(i).to_vec()).collect::<Vec<u32>>();
    let induced: std::collections::BTreeSet<Vec<u32>> = elems.iter().map(|e| key(e.induced())).collect();
    let group_keys: std::collections::BTreeSet<Vec<u32>> = group.iter().map(key).collect();
    let index: BTreeMap<Vec<u32>, usize> = group.iter().enumerate().map(|(i, m)| (key(m), i)).collect();
    let mut homomorphism = true;
    for (i, a) in group.iter().enumerate() {
        for (j, b) in group.iter().enumerate() {
            let ab = index[&key(&a.mul(b))];
            if key(elems[ab].induced()) != key(&elems[i].induced().mul(elems[j].induced())) {
                homomorphism = false;
            }
        }
    }
    // Phi maps g_lambda into g_{lambda'} with lambda'(t) = lambda(Phi^{-1} t),
    // i.e. lambda' = (M^{-1})^T lambda for the induced matrix M.
    let mut orbit_constant = true;
    for e in &elems {
        let minv_t = e.induced().inverse()?.transpose();
        for (lambda, space) in weights.spaces() {
            let image_weight = minv_t.mul_vec(lambda);
            let target = weights.space(&image_weight);
            let ok = target.is_some_and(|t| {
                t.rank() == space.rank()
                    && space.basis().iter().all(|v| {
                        let d = e.conjugate(&Derivation::from_coords(field, n, &alg_to_witt(alg, v)));
                        t.contains(&d.to_coords())
                    })
            });
            if !ok {
                orbit_constant = false;
            }
        }
    }
    Ok(WeylReport {
        n,
        p: field.p(),
        group_order: group.len(),
        distinct_induced: induced.len(),
        normalizes: true,
        homomorphism,
        onto: induced == group_keys,
        orbit_constant,
    })
}

/// `W(n)` coordinates of an element of a realized algebra.
fn alg_to_witt(alg: &RestrictedAlgebra, v: &[u32]) -> Vec<u32> {
    alg.realization().expect("realized").to_derivation(v).to_coords()
}

/// Nilpotency of `h = C_g(t)` and the p-power behaviour of its elements.
#[derive(Clone, Debug, Serialize)]
pub struct CartanReport {
    pub torus_dim: usize,
    pub centralizer_dim: usize,
    /// `dim h - dim t`.
    pub ell: usize,
    pub lower_central_dims: Vec<usize>,
    pub nilpotent: bool,
    pub samples: usize,
    pub samples_in_torus: usize,
}

pub fn cartan_nilpotency_check<R: Rng>(torus: &Torus, rng: &mut R, samples: usize) -> CartanReport {
    let alg = torus.ambient().algebra();
    let field = alg.field();
    let h = torus.centralizer();
    let mut dims = vec![h.rank()];
    let mut cur = h.clone();
    while cur.rank() > 0 {
        let next = alg.bracket_span(&h, &cur);
        if next.rank() == cur.rank() {
            break;
        }
        dims.push(next.rank());
        cur = next;
    }
    let nilpotent = cur.rank() == 0;
    let ell = h.rank() - torus.dim();
    let t = torus.span();
    let mut ok = 0;
    for _ in 0..samples {
        let c: Vec<u32> = (0..h.rank()).map(|_| rng.gen_range(0..field.p())).collect();
        let x = h.combine(&c);
        if t.contains(&alg.p_power_iter(&x, ell)) {
            ok += 1;
        }
    }
    CartanReport {
        torus_dim: torus.dim(),
        centralizer_dim: h.rank(),
        ell,
        lower_central_dims: dims,
        nilpotent,
        samples,
        samples_in_torus: ok,
    }
}
