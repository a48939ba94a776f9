//! Assembled operators (dense or compressed-row) and the matrix-vector
//! interface shared with the matrix-free Hamiltonian.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sector::SectorBasis;
use crate::spin::C64;

/// Rows per rayon task in parallel matrix-vector products.
const PAR_ROW_CHUNK: usize = 1024;

/// Anything that can apply a Hermitian operator to a vector.
///
/// Implementations must be reentrant: concurrent calls with distinct output
/// buffers are allowed.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

/// Compressed sparse row storage with sorted, duplicate-free columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    /// Builds the matrix from per-row entry lists. Duplicate columns within a
    /// row are summed; exact zeros are dropped.
    pub fn from_rows<F>(dim: usize, mut row: F) -> Self
    where
        F: FnMut(usize, &mut Vec<(usize, C64)>),
    {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut scratch = Vec::new();
        row_ptr.push(0);
        for i in 0..dim {
            scratch.clear();
            row(i, &mut scratch);
            merge_row(&mut scratch);
            for &(c, v) in scratch.iter() {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(p) => self.vals[span.start + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// True when no row lists the same column twice.
    pub fn has_unique_coordinates(&self) -> bool {
        (0..self.dim).all(|i| {
            self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
                .windows(2)
                .all(|w| w[0] < w[1])
        })
    }
}

/// Sorts `(col, value)` pairs and sums duplicates in place.
pub(crate) fn merge_row(entries: &mut Vec<(usize, C64)>) {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out = 0;
    for i in 0..entries.len() {
        if out > 0 && entries[out - 1].0 == entries[i].0 {
            let v = entries[i].1;
            entries[out - 1].1 += v;
        } else {
            entries[out] = entries[i];
            out += 1;
        }
    }
    entries.truncate(out);
    entries.retain(|e| e.1 != C64::new(0.0, 0.0));
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let row = |i: usize| -> C64 { self.row(i).map(|(c, v)| v * x[c]).sum() };
        if self.dim >= 2 * PAR_ROW_CHUNK {
            y.par_chunks_mut(PAR_ROW_CHUNK)
                .enumerate()
                .for_each(|(chunk, ys)| {
                    let base = chunk * PAR_ROW_CHUNK;
                    for (off, yi) in ys.iter_mut().enumerate() {
                        *yi = row(base + off);
                    }
                });
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row(i);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    Dense(DMatrix<C64>),
    Sparse(CsrMatrix),
}

/// Which basis an assembled matrix is written in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisTag {
    /// Full tensor-product space of `sites` sites with `local_dim` states each.
    Full { sites: usize, local_dim: usize },
    /// One total-S3 sector.
    Sector {
        sites: usize,
        two_j: u32,
        total_two_m: i32,
    },
}

/// Hermitian matrix with basis metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub storage: Storage,
    pub basis: BasisTag,
}

impl OperatorMatrix {
    pub fn dense(m: DMatrix<C64>, basis: BasisTag) -> Self {
        OperatorMatrix {
            storage: Storage::Dense(m),
            basis,
        }
    }

    pub fn sparse(m: CsrMatrix, basis: BasisTag) -> Self {
        OperatorMatrix {
            storage: Storage::Sparse(m),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(m) => m.dim(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(i, j)],
            Storage::Sparse(m) => m.get(i, j),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => {
                let mut d = DMatrix::zeros(m.dim(), m.dim());
                for i in 0..m.dim() {
                    for (c, v) in m.row(i) {
                        d[(i, c)] = v;
                    }
                }
                d
            }
        }
    }

    /// Visits every stored entry.
    pub fn for_each_entry<F: FnMut(usize, usize, C64)>(&self, mut f: F) {
        match &self.storage {
            Storage::Dense(m) => {
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        f(i, j, m[(i, j)]);
                    }
                }
            }
            Storage::Sparse(m) => {
                for i in 0..m.dim() {
                    for (c, v) in m.row(i) {
                        f(i, c, v);
                    }
                }
            }
        }
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        self.for_each_entry(|i, j, v| {
            worst = worst.max((v - self.get(j, i).conj()).norm());
        });
        worst
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        let mut worst = 0.0f64;
        self.for_each_entry(|i, j, v| worst = worst.max((v - other.get(i, j)).norm()));
        other.for_each_entry(|i, j, v| worst = worst.max((v - self.get(i, j)).norm()));
        worst
    }

    /// Restricts a full-space matrix to one S3 sector.
    ///
    /// Fails with [`Error::SectorCoupling`] if a sector row couples to a state
    /// outside the sector by more than `tol`.
    pub fn project(&self, basis: &SectorBasis, tol: f64) -> Result<OperatorMatrix> {
        match self.basis {
            BasisTag::Full { sites, local_dim }
                if sites == basis.sites() && local_dim == basis.spin().dim() => {}
            _ => {
                return Err(Error::InvalidArgument(
                    "projection needs a full-space matrix on the sector's chain".into(),
                ))
            }
        }
        let n = basis.len();
        let mut worst_leak = 0.0f64;
        let mut out = DMatrix::<C64>::zeros(n, n);
        let mut sparse_rows: Vec<Vec<(usize, C64)>> = Vec::new();
        let dense_out = n <= crate::model::AssemblyConfig::default().dense_max_dim;
        for (r, &full) in basis.states().iter().enumerate() {
            let full = full as usize;
            let mut row = Vec::new();
            let mut visit = |c: usize, v: C64| match basis.position(c as u64) {
                Some(cc) => row.push((cc, v)),
                None => worst_leak = worst_leak.max(v.norm()),
            };
            match &self.storage {
                Storage::Dense(m) => {
                    for c in 0..m.ncols() {
                        let v = m[(full, c)];
                        if v != C64::new(0.0, 0.0) {
                            visit(c, v);
                        }
                    }
                }
                Storage::Sparse(m) => {
                    for (c, v) in m.row(full) {
                        visit(c, v);
                    }
                }
            }
            if dense_out {
                for (c, v) in row {
                    out[(r, c)] = v;
                }
            } else {
                sparse_rows.push(row);
            }
        }
        if worst_leak > tol {
            return Err(Error::SectorCoupling {
                magnitude: worst_leak,
            });
        }
        let tag = BasisTag::Sector {
            sites: basis.sites(),
            two_j: basis.spin().two_j(),
            total_two_m: basis.total_two_m(),
        };
        if dense_out {
            Ok(OperatorMatrix::dense(out, tag))
        } else {
            let csr = CsrMatrix::from_rows(n, |i, e| e.extend_from_slice(&sparse_rows[i]));
            Ok(OperatorMatrix::sparse(csr, tag))
        }
    }

    pub fn mul_vec(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::zeros(self.dim());
        self.apply(x.as_slice(), y.as_mut_slice());
        y
    }
}

impl LinearOperator for OperatorMatrix {
    fn dim(&self) -> usize {
        OperatorMatrix::dim(self)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                for yi in y.iter_mut() {
                    *yi = C64::new(0.0, 0.0);
                }
                // Column-major traversal.
                for (j, &xj) in x.iter().enumerate().take(n) {
                    if xj == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let col = m.column(j);
                    for (yi, a) in y.iter_mut().zip(col.iter()) {
                        *yi += a * xj;
                    }
                }
            }
            Storage::Sparse(m) => m.apply(x, y),
        }
    }
}
