//! Exact linear algebra over the Gaussian rationals: deterministic reduced
//! row echelon form, nullspaces, particular solutions with infeasibility
//! certificates, and the subspace calculus (images, intersections,
//! preimages, quotients) every kernel computation in the engine runs on.
//!
//! Determinism: columns are scanned left to right, the pivot row is the
//! first row with a nonzero entry in the current column, and free variables
//! of a nullspace basis are set to one in increasing column order. Two runs
//! on equal input produce identical matrices.

use crate::error::CoreError;
use crate::scalar::GaussRat;

/// A dense matrix of Gaussian rationals, row major.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<GaussRat>,
}

/// Row echelon data produced by `Matrix::rref`: the reduced matrix, the pivot
/// column of each pivot row, and the accumulated row transform `t` with
/// `t · original = reduced`.
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub transform: Matrix,
}

/// Result of a `particular` solve.
pub enum SolveOutcome {
    /// The echelon-canonical solution (free variables zero).
    Solution(Vec<GaussRat>),
    /// No solution exists; the witness `y` satisfies `yᵀA = 0`, `yᵀb ≠ 0`.
    Infeasible { witness: Vec<GaussRat> },
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![GaussRat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for k in 0..n {
            m[(k, k)] = GaussRat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussRat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<GaussRat>], dim: usize) -> Self {
        let mut m = Matrix::zero(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[GaussRat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<GaussRat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[GaussRat]) -> Vec<GaussRat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = GaussRat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &(&self[(i, j)] * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut rows = Vec::with_capacity(self.rows + other.rows);
        for i in 0..self.rows {
            rows.push(self.row(i).to_vec());
        }
        for i in 0..other.rows {
            rows.push(other.row(i).to_vec());
        }
        Matrix::from_rows(rows)
    }

    /// Reduced row echelon form with the row transform tracked.
    pub fn rref(&self) -> Echelon {
        let mut a = self.clone();
        let mut t = Matrix::identity(self.rows);
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            t.swap_rows(r, p);
            let inv = a[(r, c)].inv().expect("pivot nonzero");
            a.scale_row(r, &inv);
            t.scale_row(r, &inv);
            for i in 0..a.rows {
                if i != r && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    a.sub_scaled_row(i, r, &f);
                    t.sub_scaled_row(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: a, pivots, transform: t }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{x : Ax = 0}` in reduced-echelon (free-variable) form,
    /// ordered by increasing free column.
    pub fn nullspace(&self) -> Vec<Vec<GaussRat>> {
        let ech = self.rref();
        let mut basis = Vec::new();
        let mut pivot_cols = vec![None; self.cols];
        for (row, &c) in ech.pivots.iter().enumerate() {
            pivot_cols[c] = Some(row);
        }
        for free in 0..self.cols {
            if pivot_cols[free].is_some() {
                continue;
            }
            let mut v = vec![GaussRat::zero(); self.cols];
            v[free] = GaussRat::one();
            for (c, slot) in pivot_cols.iter().enumerate() {
                if let Some(row) = slot {
                    v[c] = -&ech.reduced[(*row, free)];
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `Ax = b`. On success the solution has all free variables zero;
    /// on failure the certificate row `y` has `yᵀA = 0` and `yᵀb ≠ 0`.
    pub fn particular(&self, b: &[GaussRat]) -> SolveOutcome {
        assert_eq!(b.len(), self.rows);
        let ech = self.rref();
        let tb = ech.transform.mul_vec(b);
        // A row of zeros in the reduced matrix with a nonzero transformed rhs
        // is exactly a left-null witness.
        for i in ech.pivots.len()..self.rows {
            if !tb[i].is_zero() {
                return SolveOutcome::Infeasible { witness: ech.transform.row(i).to_vec() };
            }
        }
        let mut x = vec![GaussRat::zero(); self.cols];
        for (row, &c) in ech.pivots.iter().enumerate() {
            x[c] = tb[row].clone();
        }
        SolveOutcome::Solution(x)
    }

    /// Is `v` in the column span?
    pub fn membership(&self, v: &[GaussRat]) -> bool {
        matches!(self.particular(v), SolveOutcome::Solution(_))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, f: &GaussRat) {
        for j in 0..self.cols {
            let v = &self[(r, j)] * f;
            self[(r, j)] = v;
        }
    }

    fn sub_scaled_row(&mut self, dst: usize, src: usize, f: &GaussRat) {
        for j in 0..self.cols {
            let v = &self[(dst, j)] - &(&self[(src, j)] * f);
            self[(dst, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = GaussRat;
    fn index(&self, (i, j): (usize, usize)) -> &GaussRat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussRat {
        &mut self.data[i * self.cols + j]
    }
}

/// A linear subspace of coordinate space, held as a reduced-echelon basis of
/// row vectors. Canonical: two equal subspaces have identical bases.
#[derive(Clone, PartialEq, Debug)]
pub struct Subspace {
    pub dim_ambient: usize,
    basis: Vec<Vec<GaussRat>>,
}

impl Subspace {
    pub fn from_spanning(vectors: &[Vec<GaussRat>], dim_ambient: usize) -> Self {
        for v in vectors {
            assert_eq!(v.len(), dim_ambient);
        }
        if vectors.is_empty() {
            return Subspace { dim_ambient, basis: Vec::new() };
        }
        let ech = Matrix::from_rows(vectors.to_vec()).rref();
        let basis = (0..ech.pivots.len()).map(|i| ech.reduced.row(i).to_vec()).collect();
        Subspace { dim_ambient, basis }
    }

    pub fn zero(dim_ambient: usize) -> Self {
        Subspace { dim_ambient, basis: Vec::new() }
    }

    pub fn full(dim_ambient: usize) -> Self {
        let id = Matrix::identity(dim_ambient);
        Subspace {
            dim_ambient,
            basis: (0..dim_ambient).map(|i| id.row(i).to_vec()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<GaussRat>] {
        &self.basis
    }

    /// Matrix whose columns are the basis vectors.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_cols(&self.basis, self.dim_ambient)
    }

    pub fn contains(&self, v: &[GaussRat]) -> bool {
        if self.basis.is_empty() {
            return v.iter().all(|x| x.is_zero());
        }
        self.basis_matrix().membership(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.dim_ambient, other.dim_ambient);
        if self.rank() == 0 || other.rank() == 0 {
            return Subspace::zero(self.dim_ambient);
        }
        // x = U s = V t  ⟺  (s, t) ∈ null [U | −V]; intersection = U s.
        let u = self.basis_matrix();
        let v = other.basis_matrix();
        let mut neg_v = v.clone();
        for i in 0..neg_v.rows {
            for j in 0..neg_v.cols {
                let x = -&neg_v[(i, j)];
                neg_v[(i, j)] = x;
            }
        }
        let stacked = u.hcat(&neg_v);
        let vectors: Vec<Vec<GaussRat>> = stacked
            .nullspace()
            .into_iter()
            .map(|st| u.mul_vec(&st[..u.cols]))
            .collect();
        Subspace::from_spanning(&vectors, self.dim_ambient)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.dim_ambient, other.dim_ambient);
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::from_spanning(&all, self.dim_ambient)
    }

    /// `{x : Mx ∈ self}` for a matrix acting on column vectors.
    pub fn preimage(&self, m: &Matrix) -> Subspace {
        assert_eq!(self.dim_ambient, m.rows);
        if self.rank() == 0 {
            return Subspace::from_spanning(&m.nullspace(), m.cols);
        }
        // M x = B t  ⟺  (x, t) ∈ null [M | −B].
        let b = self.basis_matrix();
        let mut neg_b = b.clone();
        for i in 0..neg_b.rows {
            for j in 0..neg_b.cols {
                let x = -&neg_b[(i, j)];
                neg_b[(i, j)] = x;
            }
        }
        let stacked = m.hcat(&neg_b);
        let vectors: Vec<Vec<GaussRat>> = stacked
            .nullspace()
            .into_iter()
            .map(|xt| xt[..m.cols].to_vec())
            .collect();
        Subspace::from_spanning(&vectors, m.cols)
    }

    /// Representatives extending `smaller` to a basis of `self`; the returned
    /// vectors project to a basis of `self / smaller`. Requires inclusion.
    pub fn quotient_representatives(&self, smaller: &Subspace) -> Vec<Vec<GaussRat>> {
        assert!(self.contains_subspace(smaller), "quotient requires inclusion");
        let mut reps = Vec::new();
        let mut span = smaller.clone();
        for v in &self.basis {
            if !span.contains(v) {
                reps.push(v.clone());
                let mut vs = span.basis.clone();
                vs.push(v.clone());
                span = Subspace::from_spanning(&vs, self.dim_ambient);
            }
        }
        reps
    }
}

/// Image of a matrix (column span) as a subspace.
pub fn image(m: &Matrix) -> Subspace {
    let cols: Vec<Vec<GaussRat>> = (0..m.cols).map(|j| m.col(j)).collect();
    Subspace::from_spanning(&cols, m.rows)
}

/// Nullspace of a matrix as a subspace.
pub fn kernel(m: &Matrix) -> Subspace {
    Subspace::from_spanning(&m.nullspace(), m.cols)
}

/// Public solve entry matching the engine-wide contract.
pub fn solve_particular(m: &Matrix, rhs: &[GaussRat]) -> Result<Vec<GaussRat>, CoreError> {
    match m.particular(rhs) {
        SolveOutcome::Solution(x) => Ok(x),
        SolveOutcome::Infeasible { witness } => {
            let w: Vec<String> = witness.iter().map(|v| v.to_literal()).collect();
            Err(CoreError::Infeasible(format!("left-null witness y = [{}]", w.join(", "))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

    #[test]
    fn nullspace_of_rank_one() {
        // nullspace([[1,1],[1,1]]) = span{(−1,1)} in free-variable form
        let m = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(1)]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![q(-1), q(1)]);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn membership_in_standard_span() {
        let m = Matrix::from_cols(&[vec![q(1), q(0)], vec![q(0), q(1)]], 2);
        assert!(m.membership(&[q(1), q(1)]));
        let m2 = Matrix::from_cols(&[vec![q(1), q(0)]], 2);
        assert!(!m2.membership(&[q(1), q(1)]));
    }

    #[test]
    fn infeasible_certificate() {
        // [[0]]·x = [1] is infeasible with witness y = (1)
        let m = Matrix::from_rows(vec![vec![q(0)]]);
        match m.particular(&[q(1)]) {
            SolveOutcome::Infeasible { witness } => {
                assert_eq!(witness, vec![q(1)]);
            }
            SolveOutcome::Solution(_) => panic!("expected infeasibility"),
        }
    }

    #[test]
    fn particular_residual_is_exactly_zero() {
        let m = Matrix::from_rows(vec![
            vec![q(2), q(1), q(-1)],
            vec![q(0), q(3), q(5)],
        ]);
        let b = [q(7), q(11)];
        match m.particular(&b) {
            SolveOutcome::Solution(x) => {
                let r = m.mul_vec(&x);
                assert_eq!(r, b.to_vec());
            }
            _ => panic!("solvable system"),
        }
    }

    #[test]
    fn witness_annihilates_matrix() {
        let m = Matrix::from_rows(vec![
            vec![q(1), q(2)],
            vec![q(2), q(4)],
        ]);
        match m.particular(&[q(1), q(3)]) {
            SolveOutcome::Infeasible { witness } => {
                let yt_a = m.transpose().mul_vec(&witness);
                assert!(yt_a.iter().all(|x| x.is_zero()));
                let ytb = &(&witness[0] * &q(1)) + &(&witness[1] * &q(3));
                assert!(!ytb.is_zero());
            }
            _ => panic!("expected infeasibility"),
        }
    }

    #[test]
    fn subspace_calculus() {
        let u = Subspace::from_spanning(&[vec![q(1), q(0), q(1)], vec![q(0), q(1), q(0)]], 3);
        let v = Subspace::from_spanning(&[vec![q(1), q(1), q(1)]], 3);
        assert!(u.contains(&[q(1), q(1), q(1)]));
        let w = u.intersect(&v);
        assert_eq!(w.rank(), 1);
        assert!(w.contains(&[q(1), q(1), q(1)]));
        let z = v.intersect(&Subspace::from_spanning(&[vec![q(1), q(0), q(0)]], 3));
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn deterministic_rref() {
        let m = Matrix::from_rows(vec![
            vec![q(0), q(2), q(4)],
            vec![q(1), q(1), q(1)],
            vec![q(2), q(4), q(6)],
        ]);
        let a = m.rref();
        let b = m.rref();
        assert_eq!(a.reduced, b.reduced);
        assert_eq!(a.pivots, b.pivots);
        assert_eq!(a.pivots, vec![0, 1]);
    }
}
