//! Dense helpers and a small CSR matrix for superoperators.
//!
//! Density matrices are vectorized row-major: `ρ_ij ↦ i·d + j`. With that
//! layout `vec(A ρ B)` has the entries `A_ik B_lj` at `(i·d + j, k·d + l)`.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use ndarray::{Array1, Array2};

use crate::{Error, Result, C64};

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], cols: vec![], vals: vec![] }
    }

    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets(nrows: usize, ncols: usize, mut entries: Vec<(usize, usize, C64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<C64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut m = CsrMatrix { nrows, ncols, row_ptr, cols, vals };
        m.prune();
        m
    }

    fn prune(&mut self) {
        let mut row_ptr = vec![0; self.nrows + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != C64::new(0.0, 0.0) {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(out.len(), self.nrows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    /// `out += factor · self · x`.
    pub fn mul_vec_add(&self, factor: C64, x: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o += factor * acc;
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.nrows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `x† · self` as a row, i.e. `selfᵀ · conj(x)` conjugated back.
    pub fn left_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.ncols];
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.cols[k]] += x[r] * self.vals[k];
            }
        }
        out
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.vals[k].norm()).sum())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.nrows, self.ncols));
        for (r, c, v) in self.triplets() {
            m[[r, c]] += v;
        }
        m
    }

    pub fn scaled(&self, factor: C64) -> CsrMatrix {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= factor);
        m
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let entries = self.triplets().chain(other.triplets()).collect();
        CsrMatrix::from_triplets(self.nrows, self.ncols, entries)
    }
}

/// Accumulates superoperator terms `c · A ρ B` as triplets.
#[derive(Debug)]
pub struct SuperopBuilder {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SuperopBuilder {
    pub fn new(dim: usize) -> Self {
        SuperopBuilder { dim, entries: Vec::new() }
    }

    /// Adds `coeff · A ρ B`.
    pub fn sandwich(&mut self, coeff: C64, a: &Array2<C64>, b: &Array2<C64>) {
        if coeff == C64::new(0.0, 0.0) {
            return;
        }
        let d = self.dim;
        let a_nz = nonzeros(a);
        let b_nz = nonzeros(b);
        for &(i, k, aik) in &a_nz {
            for &(l, j, blj) in &b_nz {
                self.entries.push((i * d + j, k * d + l, coeff * aik * blj));
            }
        }
    }

    /// Adds `coeff · A ρ`.
    pub fn left(&mut self, coeff: C64, a: &Array2<C64>) {
        if coeff == C64::new(0.0, 0.0) {
            return;
        }
        let d = self.dim;
        for (i, k, aik) in nonzeros(a) {
            for j in 0..d {
                self.entries.push((i * d + j, k * d + j, coeff * aik));
            }
        }
    }

    /// Adds `coeff · ρ B`.
    pub fn right(&mut self, coeff: C64, b: &Array2<C64>) {
        if coeff == C64::new(0.0, 0.0) {
            return;
        }
        let d = self.dim;
        for (l, j, blj) in nonzeros(b) {
            for i in 0..d {
                self.entries.push((i * d + j, i * d + l, coeff * blj));
            }
        }
    }

    /// `coeff · (−i)[H, ρ]`.
    pub fn commutator(&mut self, coeff: C64, h: &Array2<C64>) {
        let mi = C64::new(0.0, -1.0) * coeff;
        self.left(mi, h);
        self.right(-mi, h);
    }

    /// `coeff · (L ρ L† − ½{L†L, ρ})`.
    pub fn lindblad(&mut self, coeff: f64, l: &Array2<C64>) {
        if coeff == 0.0 {
            return;
        }
        let ld = l.t().mapv(|z| z.conj());
        let ldl = ld.dot(l);
        let c = C64::new(coeff, 0.0);
        self.sandwich(c, l, &ld);
        self.left(-0.5 * c, &ldl);
        self.right(-0.5 * c, &ldl);
    }

    pub fn build(self) -> CsrMatrix {
        let n = self.dim * self.dim;
        CsrMatrix::from_triplets(n, n, self.entries)
    }
}

fn nonzeros(m: &Array2<C64>) -> Vec<(usize, usize, C64)> {
    m.indexed_iter()
        .filter(|(_, v)| **v != C64::new(0.0, 0.0))
        .map(|((r, c), v)| (r, c, *v))
        .collect()
}

pub fn vectorize(m: &Array2<C64>) -> Vec<C64> {
    m.iter().copied().collect()
}

pub fn unvectorize(v: &[C64], dim: usize) -> Array2<C64> {
    Array2::from_shape_vec((dim, dim), v.to_vec()).expect("vector length is dim²")
}

pub fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖A − A†‖_F / ‖A‖_F`, zero for the zero matrix.
pub fn hermitian_defect(m: &Array2<C64>) -> f64 {
    let norm = frobenius(m);
    if norm == 0.0 {
        return 0.0;
    }
    let d = m.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (m[[i, j]] - m[[j, i]].conj()).norm_sqr();
        }
    }
    acc.sqrt() / norm
}

/// `Tr(A·B)` without forming the product.
pub fn trace_of_product(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    let d = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += a[[i, k]] * b[[k, i]];
        }
    }
    acc
}

/// Makes every dense and sparse kernel single-threaded, leaving parallelism
/// to index-ordered sweeps so results are bitwise reproducible.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

pub fn to_faer(m: &Array2<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

pub fn from_faer(m: &Mat<C64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Ascending eigenvalues of a Hermitian matrix (lower triangle is read).
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Result<Vec<f64>> {
    to_faer(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Singular(format!("eigenvalue solver failed: {e:?}")))
}

/// Eigen-decomposition `(values, vectors)` of a Hermitian matrix.
pub fn hermitian_eigen(m: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let evd = to_faer(m)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Singular(format!("eigen solver failed: {e:?}")))?;
    let s = evd.S();
    let values = (0..m.nrows()).map(|k| s[k].re).collect();
    let u = evd.U();
    let vectors = Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| u[(i, j)]);
    Ok((values, vectors))
}

/// Solves the dense system `A x = b` by partial-pivot LU.
pub fn solve_dense(a: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    let n = a.nrows();
    let lu = to_faer(a).partial_piv_lu();
    let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    let out = Array1::from_shape_fn(n, |i| x[(i, 0)]);
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular("dense solve produced non-finite values".into()));
    }
    Ok(out)
}

/// Sparse LU factorization reused across right-hand sides.
pub struct SparseLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, C64>,
    n: usize,
}

impl SparseLu {
    pub fn new(m: &CsrMatrix) -> Result<Self> {
        let trips: Vec<Triplet<usize, usize, C64>> =
            m.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let csc = SparseColMat::<usize, C64>::try_new_from_triplets(m.nrows(), m.ncols(), &trips)
            .map_err(|e| Error::Singular(format!("sparse assembly failed: {e:?}")))?;
        let lu = csc.sp_lu().map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
        Ok(SparseLu { lu, n: m.nrows() })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}
