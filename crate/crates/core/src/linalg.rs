//! Dense linear algebra over `F_p`: row reduction, kernels, inverses,
//! incremental echelon bases and characteristic polynomials.

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// `y += c * x` on residue vectors.
#[inline]
pub fn axpy(f: PrimeField, y: &mut [u32], c: u32, x: &[u32]) {
    if c == 0 {
        return;
    }
    let p = f.p();
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            *yi = (*yi + c * xi) % p;
        }
    }
}

pub fn scale(f: PrimeField, x: &mut [u32], c: u32) {
    for v in x.iter_mut() {
        *v = f.mul(*v, c);
    }
}

pub fn is_zero(x: &[u32]) -> bool {
    x.iter().all(|&v| v == 0)
}

pub fn add_vec(f: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn sub_vec(f: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>], cols: usize) -> Self {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v % field.p();
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: PrimeField, cols: &[Vec<u32>], rows: usize) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v % field.p();
            }
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0 {
                    axpy(f, orow, a, other.row(k));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        let p = self.field.p() as u64;
        (0..self.rows)
            .map(|i| {
                let s: u64 = self.row(i).iter().zip(v).map(|(&a, &b)| (a as u64) * (b as u64)).sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: add_vec(f, &self.data, &other.data),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: sub_vec(f, &self.data, &other.data),
        }
    }

    pub fn scaled(&self, c: u32) -> Matrix {
        let mut m = self.clone();
        scale(self.field, &mut m.data, c);
        m
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = Matrix::identity(self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv_nz(self[(r, c)]);
            let cols = self.cols;
            scale(f, &mut self.data[r * cols..(r + 1) * cols], inv);
            let pivot_row: Vec<u32> = self.row(r).to_vec();
            for i in 0..self.rows {
                if i != r {
                    let factor = self[(i, c)];
                    if factor != 0 {
                        let neg = f.neg(factor);
                        axpy(f, &mut self.data[i * cols..(i + 1) * cols], neg, &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m[(r, free)]);
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotInvertible);
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = 1;
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NotInvertible);
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)];
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> u32 {
        assert_eq!(self.rows, self.cols);
        let f = self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1u32;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| m[(i, c)] != 0) else {
                return 0;
            };
            if piv != c {
                for j in 0..n {
                    m.data.swap(piv * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let d = m[(c, c)];
            det = f.mul(det, d);
            let inv = f.inv_nz(d);
            for i in c + 1..n {
                let factor = f.mul(m[(i, c)], inv);
                if factor != 0 {
                    let row_c: Vec<u32> = m.row(c).to_vec();
                    axpy(f, &mut m.data[i * n..(i + 1) * n], f.neg(factor), &row_c);
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(T - A)`, coefficients from `T^0` up,
    /// via similarity reduction to upper Hessenberg form.
    pub fn charpoly(&self) -> Vec<u32> {
        assert_eq!(self.rows, self.cols);
        let f = self.field;
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i0) = (m..n).find(|&i| h[(i, m - 1)] != 0) else {
                continue;
            };
            if i0 != m {
                for j in 0..n {
                    h.data.swap(i0 * n + j, m * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + i0, i * n + m);
                }
            }
            let inv = f.inv_nz(h[(m, m - 1)]);
            for i in m + 1..n {
                let u = f.mul(h[(i, m - 1)], inv);
                if u == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = f.mul(u, h[(m, j)]);
                    h[(i, j)] = f.sub(h[(i, j)], v);
                }
                for r in 0..n {
                    let v = f.mul(u, h[(r, i)]);
                    h[(r, m)] = f.add(h[(r, m)], v);
                }
            }
        }
        // p_k is the characteristic polynomial of the leading k x k block.
        let mut polys: Vec<Vec<u32>> = vec![vec![1]];
        for k in 1..=n {
            let prev = &polys[k - 1];
            let mut pk = vec![0u32; k + 1];
            let diag = h[(k - 1, k - 1)];
            for (d, &c) in prev.iter().enumerate() {
                pk[d + 1] = f.add(pk[d + 1], c);
                pk[d] = f.sub(pk[d], f.mul(diag, c));
            }
            let mut t = 1u32;
            for i in 1..k {
                t = f.mul(t, h[(k - i, k - i - 1)]);
                if t == 0 {
                    break;
                }
                let coef = f.mul(t, h[(k - i - 1, k - 1)]);
                if coef != 0 {
                    for (d, &c) in polys[k - i - 1].iter().enumerate() {
                        pk[d] = f.sub(pk[d], f.mul(coef, c));
                    }
                }
            }
            polys.push(pk);
        }
        polys.pop().unwrap()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = u32;
    fn index(&self, (i, j): (usize, usize)) -> &u32 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u32 {
        &mut self.data[i * self.cols + j]
    }
}

/// A subspace of `F_p^dim` kept as a fully reduced echelon basis.
///
/// Rows are sorted by pivot column, each row has a leading 1 and every
/// pivot column is zero outside its own row, so the basis of a subspace
/// is canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    field: PrimeField,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        Echelon { field, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors<'a>(field: PrimeField, dim: usize, vs: impl IntoIterator<Item = &'a Vec<u32>>) -> Self {
        let mut e = Echelon::new(field, dim);
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc];
            if c != 0 {
                axpy(f, &mut w, f.neg(c), row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the span.
    pub fn coords(&self, v: &[u32]) -> Option<Vec<u32>> {
        let c: Vec<u32> = self.pivots.iter().map(|&pc| v[pc]).collect();
        if self.contains(v) {
            Some(c)
        } else {
            None
        }
    }

    /// Inserts `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        assert_eq!(v.len(), self.dim);
        let f = self.field;
        let mut w = self.reduce(&v);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv_nz(w[pc]);
        scale(f, &mut w, inv);
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                axpy(f, row, f.neg(c), &w);
            }
        }
        let pos = self.pivots.partition_point(|&q| q < pc);
        self.pivots.insert(pos, pc);
        self.rows.insert(pos, w);
        true
    }

    /// Vector combination `sum c_i b_i` of the basis rows.
    pub fn combine(&self, coeffs: &[u32]) -> Vec<u32> {
        let mut v = vec![0u32; self.dim];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            axpy(self.field, &mut v, c, row);
        }
        v
    }

    pub fn intersection(&self, other: &Echelon) -> Echelon {
        // Solve sum a_i u_i = sum b_j w_j.
        let f = self.field;
        let k = self.rank();
        let mut cols = Vec::with_capacity(k + other.rank());
        for r in &self.rows {
            cols.push(r.clone());
        }
        for r in &other.rows {
            cols.push(r.iter().map(|&x| f.neg(x)).collect());
        }
        let m = Matrix::from_columns(f, &cols, self.dim);
        let mut out = Echelon::new(f, self.dim);
        for sol in m.kernel() {
            out.insert(self.combine(&sol[..k]));
        }
        out
    }

    pub fn sum(&self, other: &Echelon) -> Echelon {
        let mut out = self.clone();
        for r in &other.rows {
            out.insert(r.clone());
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Echelon) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }
}

/// Coordinates with respect to an arbitrary linearly independent family.
#[derive(Clone, Debug)]
pub struct BasisSolver {
    field: PrimeField,
    dim: usize,
    pivots: Vec<usize>,
    reduced: Vec<Vec<u32>>,
    transform: Vec<Vec<u32>>,
}

impl BasisSolver {
    pub fn new(field: PrimeField, dim: usize, vectors: &[Vec<u32>]) -> Result<Self> {
        let d = vectors.len();
        let mut aug = Matrix::zeros(field, d, dim + d);
        for (i, v) in vectors.iter().enumerate() {
            assert_eq!(v.len(), dim);
            for (j, &x) in v.iter().enumerate() {
                aug[(i, j)] = x;
            }
            aug[(i, dim + i)] = 1;
        }
        let pivots = aug.rref();
        if pivots.len() < d || pivots.iter().any(|&c| c >= dim) {
            return Err(Error::NotInvertible);
        }
        let reduced = (0..d).map(|i| aug.row(i)[..dim].to_vec()).collect();
        let transform = (0..d).map(|i| aug.row(i)[dim..].to_vec()).collect();
        Ok(BasisSolver { field, dim, pivots, reduced, transform })
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Coefficients `c` with `w = sum c_i vectors[i]`, if they exist.
    pub fn coords(&self, w: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(w.len(), self.dim);
        let f = self.field;
        let mut resid = w.to_vec();
        let mut out = vec![0u32; self.len()];
        for (k, &pc) in self.pivots.iter().enumerate() {
            let a = resid[pc];
            if a != 0 {
                axpy(f, &mut resid, f.neg(a), &self.reduced[k]);
                axpy(f, &mut out, a, &self.transform[k]);
            }
        }
        is_zero(&resid).then_some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(f: PrimeField, rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        let rows: Vec<Vec<u32>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..f.p())).collect()).collect();
        Matrix::from_rows(f, &rows, c)
    }

    // Polynomial-entry Laplace expansion of det(T - A): slow, independent.
    fn charpoly_laplace(a: &Matrix) -> Vec<u32> {
        let f = a.field();
        let n = a.rows();
        let entry = |i: usize, j: usize| -> Vec<u32> {
            if i == j {
                vec![f.neg(a[(i, j)]), 1]
            } else {
                vec![f.neg(a[(i, j)])]
            }
        };
        fn pmul(f: PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
            let mut out = vec![0; x.len() + y.len() - 1];
            for (i, &a) in x.iter().enumerate() {
                for (j, &b) in y.iter().enumerate() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
            out
        }
        fn det(f: PrimeField, rows: &[usize], cols: &[usize], entry: &dyn Fn(usize, usize) -> Vec<u32>) -> Vec<u32> {
            if rows.is_empty() {
                return vec![1];
            }
            let mut acc = vec![0u32; rows.len() + 1];
            for (k, &c) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det(f, &rows[1..], &rest, entry);
                let term = pmul(f, &entry(rows[0], c), &minor);
                for (d, &v) in term.iter().enumerate() {
                    let v = if k % 2 == 0 { v } else { f.neg(v) };
                    acc[d] = f.add(acc[d], v);
                }
            }
            acc
        }
        let idx: Vec<usize> = (0..n).collect();
        let mut out = det(f, &idx, &idx, &entry);
        out.truncate(n + 1);
        out
    }

    #[test]
    fn charpoly_matches_laplace_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3, 5, 7] {
            let f = PrimeField::new(p).unwrap();
            for n in 1..=5 {
                for _ in 0..20 {
                    let mut a = random_matrix(f, &mut rng, n, n);
                    // sprinkle zeros to exercise the Hessenberg pivot search
                    for i in 0..n {
                        if rng.gen_bool(0.3) {
                            a[(i, 0)] = 0;
                        }
                    }
                    assert_eq!(a.charpoly(), charpoly_laplace(&a));
                }
            }
        }
    }

    #[test]
    fn inverse_and_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = PrimeField::new(5).unwrap();
        for _ in 0..50 {
            let a = random_matrix(f, &mut rng, 4, 4);
            match a.inverse() {
                Ok(inv) => {
                    assert_ne!(a.det(), 0);
                    assert_eq!(a.mul(&inv), Matrix::identity(f, 4));
                }
                Err(_) => assert_eq!(a.det(), 0),
            }
        }
    }

    #[test]
    fn kernel_is_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = PrimeField::new(3).unwrap();
        for _ in 0..30 {
            let a = random_matrix(f, &mut rng, 4, 7);
            let ker = a.kernel();
            assert_eq!(ker.len() + a.rank(), 7);
            for v in &ker {
                assert!(is_zero(&a.mul_vec(v)));
            }
        }
    }

    #[test]
    fn echelon_is_canonical() {
        let f = PrimeField::new(3).unwrap();
        let a = Echelon::from_vectors(f, 3, &[vec![1, 1, 0], vec![0, 1, 1]]);
        let b = Echelon::from_vectors(f, 3, &[vec![1, 2, 1], vec![2, 0, 1]]);
        assert_eq!(a, b);
        assert_eq!(a.coords(&[1, 2, 1]), Some(vec![1, 2]));
        assert!(a.coords(&[0, 0, 1]).is_none());
        let c = Echelon::from_vectors(f, 3, &[vec![0, 0, 1], vec![1, 1, 0]]);
        assert_eq!(a.intersection(&c).rank(), 1);
        assert_eq!(a.sum(&c).rank(), 3);
    }

    #[test]
    fn basis_solver_coordinates() {
        let f = PrimeField::new(5).unwrap();
        let vs = vec![vec![1, 2, 0, 1], vec![0, 1, 3, 0], vec![2, 0, 0, 4]];
        let s = BasisSolver::new(f, 4, &vs).unwrap();
        let w: Vec<u32> = (0..4).map(|j| f.add(f.mul(3, vs[0][j]), f.mul(2, vs[2][j]))).collect();
        assert_eq!(s.coords(&w), Some(vec![3, 0, 2]));
        assert_eq!(s.coords(&[0, 0, 0, 1]), None);
        assert!(BasisSolver::new(f, 4, &[vec![1, 1, 0, 0], vec![2, 2, 0, 0]]).is_err());
    }
}
