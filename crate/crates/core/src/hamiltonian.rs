//! Hamiltonians as sums of few-site terms on a chain.
//!
//! The same term list backs dense assembly, compressed-row assembly,
//! sector restriction and the matrix-free product, so every storage
//! format sees identical matrix elements.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{merge_row, BasisTag, CsrMatrix, LinearOperator, OperatorMatrix};
use crate::sector::{full_dim_u64, SectorBasis};
use crate::spin::{LocalOperator, Spin, C64};

const PAR_ROW_CHUNK: usize = 2048;

/// An operator acting on the contiguous sites `first..first + width` (1-based).
#[derive(Clone, Debug)]
pub struct LocalTerm {
    first: usize,
    width: usize,
    op: LocalOperator,
    /// `d^width`.
    block: u64,
    /// Full-space stride of the term's least significant site; 0 when the
    /// full space does not fit `u64` (index-based paths are then refused by
    /// [`Hamiltonian::dim_within`]).
    stride: u64,
    /// Nonzero entries of each row of `op`.
    rows: Vec<Vec<(u64, C64)>>,
}

impl LocalTerm {
    pub fn first_site(&self) -> usize {
        self.first
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn op(&self) -> &LocalOperator {
        &self.op
    }
}

/// Sum of local terms on a chain of `sites` spins.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    sites: usize,
    spin: Spin,
    terms: Vec<LocalTerm>,
}

impl Hamiltonian {
    pub fn new(sites: usize, spin: Spin) -> Result<Self> {
        if sites == 0 {
            return Err(Error::ChainTooShort { sites, min: 1 });
        }
        Ok(Hamiltonian {
            sites,
            spin,
            terms: Vec::new(),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    /// Adds `op` acting on sites starting at `first`; its width is inferred
    /// from the matrix size.
    pub fn add_term(&mut self, first: usize, op: LocalOperator) -> Result<()> {
        let d = self.spin.dim();
        let mut width = 0;
        let mut block = 1usize;
        while block < op.nrows() {
            block *= d;
            width += 1;
        }
        if block != op.nrows() || op.nrows() != op.ncols() || width == 0 {
            return Err(Error::InvalidArgument(format!(
                "term of size {}x{} is not a power of {d}",
                op.nrows(),
                op.ncols()
            )));
        }
        if first == 0 || first + width - 1 > self.sites {
            return Err(Error::SiteOutOfRange {
                site: first,
                lo: 1,
                hi: self.sites + 1 - width,
            });
        }
        let stride = (d as u64)
            .checked_pow((self.sites - (first + width - 1)) as u32)
            .filter(|_| full_dim_u64(self.sites, self.spin).is_some())
            .unwrap_or(0);
        let rows = (0..block)
            .map(|r| {
                (0..block)
                    .filter(|&c| op[(r, c)] != C64::new(0.0, 0.0))
                    .map(|c| (c as u64, op[(r, c)]))
                    .collect()
            })
            .collect();
        self.terms.push(LocalTerm {
            first,
            width,
            op,
            block: block as u64,
            stride,
            rows,
        });
        Ok(())
    }

    /// Full-space dimension, or an error if it does not fit `budget`.
    pub fn dim_within(&self, budget: usize) -> Result<usize> {
        match full_dim_u64(self.sites, self.spin) {
            Some(n) if n <= budget as u64 => Ok(n as usize),
            _ => Err(Error::DimensionOverflow {
                local: self.spin.dim(),
                sites: self.sites,
                budget,
            }),
        }
    }

    /// Calls `f(k, H[idx, k])` for every term contribution in row `idx`.
    /// Contributions to the same column are not merged.
    #[inline]
    pub fn for_each_in_row<F: FnMut(u64, C64)>(&self, idx: u64, mut f: F) {
        for t in &self.terms {
            let loc = (idx / t.stride) % t.block;
            let base = idx - loc * t.stride;
            for &(c, v) in &t.rows[loc as usize] {
                f(base + c * t.stride, v);
            }
        }
    }

    fn full_tag(&self) -> BasisTag {
        BasisTag::Full {
            sites: self.sites,
            local_dim: self.spin.dim(),
        }
    }

    pub fn to_dense(&self, budget: usize) -> Result<OperatorMatrix> {
        let n = self.dim_within(budget)?;
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            self.for_each_in_row(i as u64, |k, v| m[(i, k as usize)] += v);
        }
        Ok(OperatorMatrix::dense(m, self.full_tag()))
    }

    pub fn to_sparse(&self, budget: usize) -> Result<OperatorMatrix> {
        let n = self.dim_within(budget)?;
        let csr = CsrMatrix::from_rows(n, |i, e| {
            self.for_each_in_row(i as u64, |k, v| e.push((k as usize, v)))
        });
        Ok(OperatorMatrix::sparse(csr, self.full_tag()))
    }

    /// Restriction to the `b` states with a single site lowered once from
    /// `m = j`; row `x - 1` belongs to site `x`. Works on configurations
    /// rather than full-space indices, so any chain length is allowed.
    pub fn one_lowering_matrix(&self, tol: f64) -> Result<DMatrix<C64>> {
        let d = self.spin.dim() as u64;
        let b = self.sites;
        let mut m = DMatrix::<C64>::zeros(b, b);
        let mut leak = 0.0f64;
        for s in 1..=b {
            for t in &self.terms {
                let last = t.first + t.width - 1;
                let inside = (t.first..=last).contains(&s);
                let loc = if inside { d.pow((last - s) as u32) } else { 0 };
                for &(c, v) in &t.rows[loc as usize] {
                    // Digits of the output configuration, least significant last.
                    let mut lowered = Vec::new();
                    let mut rest = c;
                    for k in 0..t.width {
                        let digit = rest % d;
                        rest /= d;
                        if digit != 0 {
                            lowered.push((last - k, digit));
                        }
                    }
                    let target = match (inside, lowered.as_slice()) {
                        (false, []) => Some(s),
                        (true, [(site, 1)]) => Some(*site),
                        _ => None,
                    };
                    match target {
                        Some(site) => m[(s - 1, site - 1)] += v,
                        None => leak = leak.max(v.norm()),
                    }
                }
            }
        }
        if leak > tol {
            return Err(Error::SectorCoupling { magnitude: leak });
        }
        Ok(m)
    }

    /// Restricts the Hamiltonian to one S3 sector without touching the full
    /// space, so long chains with small sectors stay cheap.
    pub fn sector_matrix(
        &self,
        basis: &SectorBasis,
        dense_max_dim: usize,
        tol: f64,
    ) -> Result<OperatorMatrix> {
        if basis.sites() != self.sites || basis.spin() != self.spin {
            return Err(Error::InvalidArgument(
                "sector basis does not match the Hamiltonian's chain".into(),
            ));
        }
        let n = basis.len();
        let mut leak = 0.0f64;
        let mut rows: Vec<Vec<(usize, C64)>> = Vec::with_capacity(n);
        for &idx in basis.states() {
            let mut row = Vec::new();
            self.for_each_in_row(idx, |k, v| match basis.position(k) {
                Some(c) => row.push((c, v)),
                None => leak = leak.max(v.norm()),
            });
            merge_row(&mut row);
            rows.push(row);
        }
        if leak > tol {
            return Err(Error::SectorCoupling { magnitude: leak });
        }
        let tag = BasisTag::Sector {
            sites: self.sites,
            two_j: self.spin.two_j(),
            total_two_m: basis.total_two_m(),
        };
        if n <= dense_max_dim {
            let mut m = DMatrix::<C64>::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                for &(c, v) in row {
                    m[(i, c)] = v;
                }
            }
            Ok(OperatorMatrix::dense(m, tag))
        } else {
            let csr = CsrMatrix::from_rows(n, |i, e| e.extend_from_slice(&rows[i]));
            Ok(OperatorMatrix::sparse(csr, tag))
        }
    }
}

impl LinearOperator for Hamiltonian {
    fn dim(&self) -> usize {
        self.dim_within(usize::MAX).expect("dimension checked at construction")
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let row = |i: usize| -> C64 {
            let mut acc = C64::new(0.0, 0.0);
            self.for_each_in_row(i as u64, |k, v| acc += v * x[k as usize]);
            acc
        };
        y.par_chunks_mut(PAR_ROW_CHUNK)
            .enumerate()
            .for_each(|(chunk, ys)| {
                let base = chunk * PAR_ROW_CHUNK;
                for (off, yi) in ys.iter_mut().enumerate() {
                    *yi = row(base + off);
                }
            });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::spin_matrices;

    /// Embedding by explicit Kronecker products, independent of the stride logic.
    fn kron_embed(sites: usize, first: usize, op: &LocalOperator, d: usize) -> DMatrix<C64> {
        let width = (op.nrows() as f64).log(d as f64).round() as usize;
        let left = DMatrix::<C64>::identity(d.pow((first - 1) as u32), d.pow((first - 1) as u32));
        let rd = d.pow((sites + 1 - first - width) as u32);
        let right = DMatrix::<C64>::identity(rd, rd);
        left.kronecker(op).kronecker(&right)
    }

    #[test]
    fn stride_embedding_matches_kronecker() {
        let spin = Spin::ONE;
        let s = spin_matrices(spin);
        let bond = s.sx.kronecker(&s.sy) + s.sz.kronecker(&s.splus);
        let mut h = Hamiltonian::new(4, spin).unwrap();
        h.add_term(2, bond.clone()).unwrap();
        h.add_term(4, s.sx.clone()).unwrap();
        let dense = h.to_dense(1 << 20).unwrap().to_dense();
        let expect = kron_embed(4, 2, &bond, 3) + kron_embed(4, 4, &s.sx, 3);
        assert!((dense - expect).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn matrix_free_matches_assembly() {
        let spin = Spin::HALF;
        let s = spin_matrices(spin);
        let mut h = Hamiltonian::new(7, spin).unwrap();
        for x in 1..7 {
            h.add_term(x, s.sx.kronecker(&s.sx) + s.sy.kronecker(&s.sy)).unwrap();
        }
        h.add_term(3, s.dot([0.3, -0.7, 0.2])).unwrap();
        let n = h.dim();
        let x: Vec<C64> = (0..n).map(|i| C64::new((i as f64).sin(), (i as f64).cos())).collect();
        let mut y1 = vec![C64::new(0.0, 0.0); n];
        let mut y2 = y1.clone();
        h.apply(&x, &mut y1);
        h.to_sparse(1 << 20).unwrap().apply(&x, &mut y2);
        let diff: f64 = y1.iter().zip(&y2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-13);
    }

    #[test]
    fn rejects_bad_terms() {
        let mut h = Hamiltonian::new(3, Spin::HALF).unwrap();
        assert!(h.add_term(3, DMatrix::identity(4, 4)).is_err());
        assert!(h.add_term(1, DMatrix::identity(3, 3)).is_err());
        assert!(h.add_term(0, DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn one_lowering_matches_sector_restriction() {
        for spin in [Spin::HALF, Spin::ONE] {
            let s = spin_matrices(spin);
            let d = spin.dim();
            let sites = 5;
            let mut h = Hamiltonian::new(sites, spin).unwrap();
            for x in 1..sites {
                let xy = s.sx.kronecker(&s.sx) + s.sy.kronecker(&s.sy);
                h.add_term(x, xy * C64::from(-0.4) + s.sz.kronecker(&s.sz) * C64::from(0.3)).unwrap();
            }
            h.add_term(1, s.sz.clone() * C64::from(0.7)).unwrap();
            h.add_term(3, s.sz.clone() * C64::from(-1.1)).unwrap();
            let direct = h.one_lowering_matrix(1e-12).unwrap();
            let basis = SectorBasis::with_lowering(sites, spin, 1).unwrap();
            let sector = h.sector_matrix(&basis, 1 << 10, 1e-12).unwrap().to_dense();
            // Position of the lowered site of each basis state.
            let site_of: Vec<usize> = basis
                .states()
                .iter()
                .map(|&i| basis.digits(i).iter().position(|&k| k == 1).unwrap())
                .collect();
            for (r, &x) in site_of.iter().enumerate() {
                for (c, &y) in site_of.iter().enumerate() {
                    assert!((sector[(r, c)] - direct[(x, y)]).norm() < 1e-14, "d={d}");
                }
            }
            h.add_term(2, s.sx.clone()).unwrap();
            assert!(h.one_lowering_matrix(1e-12).is_err());
        }
        // Long chains never form full-space indices.
        let s = spin_matrices(Spin::HALF);
        let mut h = Hamiltonian::new(90, Spin::HALF).unwrap();
        h.add_term(45, s.sz.kronecker(&s.sz)).unwrap();
        assert_eq!(h.one_lowering_matrix(1e-12).unwrap().nrows(), 90);
        assert!(h.dim_within(usize::MAX).is_err());
    }
}
