//! Eigensolvers: dense Hermitian diagonalization, Lanczos with locking for
//! the lowest part of large spectra, sector-resolved spectra, gaps and
//! magnetization profiles.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AssemblyConfig, HamiltonianOperator, ModelSpec, SECTOR_TOL};
use crate::operator::{LinearOperator, OperatorMatrix, Storage};
use crate::sector::{digits_of, SectorBasis};
use crate::spin::{Spin, C64};

/// Every returned eigenpair satisfies `|Hv - lv| < RESIDUAL_BOUND * max(1, |l|)`.
pub const RESIDUAL_BOUND: f64 = 1e-9;

/// Default width of the ground cluster when measuring gaps.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Dense,
    Lanczos,
    Sectors,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub method: Method,
    /// Residual norm of each returned pair (empty when vectors were skipped).
    pub residuals: Vec<f64>,
    /// Matrix-vector products performed.
    pub matvecs: usize,
    /// Lanczos cycles, including the final confirmation cycle.
    pub cycles: usize,
    /// Thick restarts summed over all cycles.
    pub restarts: usize,
    /// `max |<v_i, v_j> - delta_ij|` over returned vectors.
    pub orthogonality_defect: f64,
}

impl Diagnostics {
    fn new(method: Method) -> Self {
        Diagnostics {
            method,
            residuals: Vec::new(),
            matvecs: 0,
            cycles: 0,
            restarts: 0,
            orthogonality_defect: 0.0,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: Option<DMatrix<C64>>,
    /// Number of unit lowerings from all-up (`n = jb - M`) of each eigenvalue.
    pub sector_labels: Option<Vec<usize>>,
    pub diagnostics: Diagnostics,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vector(&self, i: usize) -> Option<DVector<C64>> {
        self.eigenvectors
            .as_ref()
            .filter(|v| i < v.ncols())
            .map(|v| v.column(i).into_owned())
    }

    /// Keeps the `k` lowest pairs.
    pub fn truncate(&mut self, k: usize) {
        if k >= self.eigenvalues.len() {
            return;
        }
        self.eigenvalues.truncate(k);
        if let Some(v) = self.eigenvectors.take() {
            self.eigenvectors = Some(v.columns(0, k).into_owned());
        }
        if let Some(l) = self.sector_labels.as_mut() {
            l.truncate(k);
        }
        self.diagnostics.residuals.truncate(k);
    }
}

fn residual_limit(lambda: f64) -> f64 {
    RESIDUAL_BOUND * lambda.abs().max(1.0)
}

fn sorted_order(vals: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    idx
}

/// All eigenpairs (or only eigenvalues) of an assembled Hermitian matrix.
///
/// Fails with [`Error::DenseCapExceeded`] above `cap`. Real symmetric input
/// takes a real-arithmetic path.
pub fn dense_spectrum(h: &OperatorMatrix, cap: usize, vectors: bool) -> Result<SpectrumResult> {
    dense_lowest(h, cap, vectors, usize::MAX)
}

/// As [`dense_spectrum`], keeping (and checking) only the `keep` lowest
/// eigenvectors; all eigenvalues are returned.
pub fn dense_lowest(h: &OperatorMatrix, cap: usize, vectors: bool, keep: usize) -> Result<SpectrumResult> {
    let n = h.dim();
    if n > cap {
        return Err(Error::DenseCapExceeded { dim: n, cap });
    }
    let owned;
    let m = match &h.storage {
        Storage::Dense(m) => m,
        Storage::Sparse(_) => {
            owned = h.to_dense();
            &owned
        }
    };
    let keep = keep.min(n);
    let mut diag = Diagnostics::new(Method::Dense);
    let is_real = m.iter().all(|z| z.im == 0.0);
    let (eigenvalues, eigenvectors) = if is_real {
        let r = m.map(|z| z.re);
        if vectors {
            let e = SymmetricEigen::new(r.clone());
            let (vals, v) = sorted_pairs(e.eigenvalues.as_slice(), &e.eigenvectors, keep);
            check_pairs(&r, &v, &vals, &mut diag)?;
            (vals, Some(v.map(C64::from)))
        } else {
            (sorted_values(r.symmetric_eigenvalues().as_slice()), None)
        }
    } else if vectors {
        let e = SymmetricEigen::new(m.clone());
        let (vals, v) = sorted_pairs(e.eigenvalues.as_slice(), &e.eigenvectors, keep);
        check_pairs(m, &v, &vals, &mut diag)?;
        (vals, Some(v))
    } else {
        (sorted_values(m.clone().symmetric_eigenvalues().as_slice()), None)
    };
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        sector_labels: None,
        diagnostics: diag,
    })
}

fn sorted_values(vals: &[f64]) -> Vec<f64> {
    sorted_order(vals).iter().map(|&i| vals[i]).collect()
}

fn sorted_pairs<T: nalgebra::ComplexField + Copy>(
    vals: &[f64],
    vecs: &DMatrix<T>,
    keep: usize,
) -> (Vec<f64>, DMatrix<T>) {
    let order = sorted_order(vals);
    let n = vecs.nrows();
    let mut out = DMatrix::<T>::zeros(n, keep);
    for (c, &i) in order.iter().take(keep).enumerate() {
        out.set_column(c, &vecs.column(i));
    }
    (order.iter().map(|&i| vals[i]).collect(), out)
}

fn check_pairs<T>(m: &DMatrix<T>, v: &DMatrix<T>, vals: &[f64], diag: &mut Diagnostics) -> Result<()>
where
    T: nalgebra::ComplexField<RealField = f64> + Copy,
{
    let hv = m * v;
    for (c, &lam) in vals.iter().enumerate().take(v.ncols()) {
        let r = (hv.column(c) - v.column(c) * T::from_real(lam)).norm();
        if r > residual_limit(lam) {
            return Err(Error::NoConvergence(format!(
                "dense eigenpair {c} has residual {r:.3e}"
            )));
        }
        diag.residuals.push(r);
    }
    let g = v.adjoint() * v;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for k in 0..g.ncols() {
            let target = if i == k { T::one() } else { T::zero() };
            worst = worst.max((g[(i, k)] - target).modulus());
        }
    }
    diag.orthogonality_defect = worst;
    Ok(())
}

fn orthogonality_defect(v: &DMatrix<C64>) -> f64 {
    let g = v.adjoint() * v;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for k in 0..g.ncols() {
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, k)] - C64::from(target)).norm());
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosConfig {
    /// Relative residual at which a Ritz pair is accepted.
    pub tol: f64,
    /// Largest Krylov basis before a thick restart.
    pub max_basis: usize,
    /// Thick restarts allowed in one cycle.
    pub max_restarts: usize,
    /// Cycles allowed in total (one per locked batch plus confirmation).
    pub max_cycles: usize,
    /// Steps taken before convergence is first tested in a cycle.
    pub min_steps: usize,
    /// Steps between convergence tests.
    pub check_every: usize,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tol: 1e-11,
            max_basis: 80,
            max_restarts: 200,
            max_cycles: 400,
            min_steps: 24,
            check_every: 6,
            seed: 0x5eed_1234,
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(a: &mut [C64], s: f64) {
    for z in a.iter_mut() {
        *z *= s;
    }
}

/// Classical Gram-Schmidt against `set`, repeated once when the first pass
/// removed most of the norm. Returns the accumulated coefficients.
fn project_out(w: &mut [C64], set: &[Vec<C64>]) -> Vec<C64> {
    let mut total = vec![C64::new(0.0, 0.0); set.len()];
    if set.is_empty() {
        return total;
    }
    let before = norm(w);
    for pass in 0..2 {
        let c: Vec<C64> = set.iter().map(|v| dot(v, w)).collect();
        for (v, ci) in set.iter().zip(&c) {
            axpy(-ci, v, w);
        }
        for (t, ci) in total.iter_mut().zip(&c) {
            *t += ci;
        }
        if pass == 0 && norm(w) > 0.7 * before {
            break;
        }
    }
    total
}

fn combine(basis: &[Vec<C64>], coeffs: &[C64], n: usize) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); n];
    for (v, &c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut y);
    }
    y
}

/// Eigenpairs of the projected matrix, ascending.
fn ritz(t: &DMatrix<C64>) -> (Vec<f64>, Vec<Vec<C64>>) {
    let e = SymmetricEigen::new(t.clone());
    let vals: Vec<f64> = e.eigenvalues.iter().copied().collect();
    let order = sorted_order(&vals);
    (
        order.iter().map(|&i| vals[i]).collect(),
        order
            .iter()
            .map(|&i| e.eigenvectors.column(i).iter().copied().collect())
            .collect(),
    )
}

/// Converged pairs of one cycle, each verified by an explicit residual.
struct Cycle {
    pairs: Vec<(f64, Vec<C64>, f64)>,
    restarts: usize,
}

struct Lanczos<'a> {
    op: &'a dyn LinearOperator,
    cfg: LanczosConfig,
    n: usize,
    locked: Vec<Vec<C64>>,
    locked_vals: Vec<f64>,
    locked_res: Vec<f64>,
    diag: Diagnostics,
    rng: ChaCha8Rng,
}

impl<'a> Lanczos<'a> {
    fn random_start(&mut self) -> Option<Vec<C64>> {
        for _ in 0..8 {
            let mut v: Vec<C64> = (0..self.n)
                .map(|_| C64::new(self.rng.gen::<f64>() - 0.5, self.rng.gen::<f64>() - 0.5))
                .collect();
            project_out(&mut v, &self.locked);
            let nv = norm(&v);
            if nv > 1e-8 {
                scale(&mut v, 1.0 / nv);
                return Some(v);
            }
        }
        None
    }

    fn verified(&mut self, basis: &[Vec<C64>], s: &[C64]) -> Option<(f64, Vec<C64>, f64)> {
        let n = self.n;
        let mut y = combine(basis, s, n);
        project_out(&mut y, &self.locked);
        let ny = norm(&y);
        if ny < 0.5 {
            return None;
        }
        scale(&mut y, 1.0 / ny);
        let mut hy = vec![C64::new(0.0, 0.0); n];
        self.op.apply(&y, &mut hy);
        self.diag.matvecs += 1;
        let lam = dot(&y, &hy).re;
        axpy(C64::from(-lam), &y, &mut hy);
        let res = norm(&hy);
        (res < 0.1 * residual_limit(lam)).then_some((lam, y, res))
    }

    /// Thick-restart Lanczos in the complement of the locked set until the
    /// lowest `want` Ritz pairs converge or the complement is exhausted.
    ///
    /// With full reorthogonalization the projected matrix is accumulated
    /// column by column from the Gram-Schmidt coefficients, so restarts only
    /// need to keep Ritz vectors and their Ritz values.
    fn cycle(&mut self, start: Vec<C64>, want: usize) -> Result<Cycle> {
        let n = self.n;
        let room = n - self.locked.len();
        let max_basis = self.cfg.max_basis.max(want + 10).min(room);
        let keep = (want + 8).min(max_basis / 2).max(1);
        let mut basis: Vec<Vec<C64>> = vec![start];
        let mut t = DMatrix::<C64>::zeros(0, 0);
        let mut restarts = 0usize;
        let mut since_check = 0usize;
        let mut steps = 0usize;
        let mut w = vec![C64::new(0.0, 0.0); n];
        loop {
            // Expand the last basis vector.
            let i = basis.len() - 1;
            self.op.apply(&basis[i], &mut w);
            self.diag.matvecs += 1;
            steps += 1;
            since_check += 1;
            project_out(&mut w, &self.locked);
            let c = project_out(&mut w, &basis);
            t = t.resize(i + 1, i + 1, C64::new(0.0, 0.0));
            for (r, &cr) in c.iter().enumerate() {
                t[(r, i)] = cr;
                t[(i, r)] = cr.conj();
            }
            t[(i, i)] = C64::from(c[i].re);
            let beta = norm(&w);
            let scale_t = t.iter().fold(1.0f64, |a, z| a.max(z.norm()));
            let exhausted = beta < 1e-12 * scale_t || basis.len() >= room;
            let full = basis.len() >= max_basis;
            let test = exhausted || full || (steps >= self.cfg.min_steps && since_check >= self.cfg.check_every);
            if test {
                since_check = 0;
                let (vals, vecs) = ritz(&t);
                let m = basis.len();
                let limit = |p: usize| self.cfg.tol * vals[p].abs().max(1.0);
                let converged: Vec<bool> = (0..m)
                    .map(|p| exhausted || beta * vecs[p][m - 1].norm() < limit(p))
                    .collect();
                if exhausted || converged.iter().take(want).all(|&c| c) {
                    let mut pairs = Vec::new();
                    for p in 0..m {
                        if converged[p] {
                            if let Some(pair) = self.verified(&basis, &vecs[p]) {
                                pairs.push(pair);
                            }
                        }
                    }
                    if !pairs.is_empty() || exhausted {
                        return Ok(Cycle { pairs, restarts });
                    }
                }
                if full {
                    restarts += 1;
                    if restarts > self.cfg.max_restarts {
                        return Err(Error::NoConvergence(format!(
                            "{} thick restarts without convergence, {} pairs locked",
                            self.cfg.max_restarts,
                            self.locked.len()
                        )));
                    }
                    let mut kept: Vec<Vec<C64>> = (0..keep).map(|p| combine(&basis, &vecs[p], n)).collect();
                    let mut next = std::mem::replace(&mut w, vec![C64::new(0.0, 0.0); n]);
                    scale(&mut next, 1.0 / beta);
                    kept.push(next);
                    basis = kept;
                    t = DMatrix::<C64>::zeros(keep, keep);
                    for p in 0..keep {
                        t[(p, p)] = C64::from(vals[p]);
                    }
                    continue;
                }
            }
            scale(&mut w, 1.0 / beta);
            basis.push(std::mem::replace(&mut w, vec![C64::new(0.0, 0.0); n]));
        }
    }

    fn lock(&mut self, pairs: Vec<(f64, Vec<C64>, f64)>) {
        for (lam, mut v, res) in pairs {
            project_out(&mut v, &self.locked);
            let nv = norm(&v);
            if nv < 0.5 {
                continue;
            }
            scale(&mut v, 1.0 / nv);
            self.locked.push(v);
            self.locked_vals.push(lam);
            self.locked_res.push(res);
        }
    }

    fn kth_locked(&self, k: usize) -> Option<f64> {
        if self.locked_vals.len() < k {
            return None;
        }
        let mut v = self.locked_vals.clone();
        v.sort_by(f64::total_cmp);
        Some(v[k - 1])
    }
}

/// The `k` lowest eigenpairs of a Hermitian operator.
///
/// Thick-restart Lanczos with full reorthogonalization. Converged Ritz
/// pairs are locked and every new cycle starts from a seeded random vector
/// orthogonal to the locked set, which recovers degenerate multiplets one
/// vector at a time. The run ends once `k` pairs are locked and a further
/// cycle finds nothing below the `k`-th.
pub fn lowest_k(op: &dyn LinearOperator, k: usize, cfg: &LanczosConfig) -> Result<SpectrumResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in [1, {n}]"
        )));
    }
    let mut lz = Lanczos {
        op,
        cfg: *cfg,
        n,
        locked: Vec::new(),
        locked_vals: Vec::new(),
        locked_res: Vec::new(),
        diag: Diagnostics::new(Method::Lanczos),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    while lz.locked.len() < n {
        if lz.diag.cycles >= cfg.max_cycles {
            return Err(Error::NoConvergence(format!(
                "{} cycles used, {} of {k} pairs locked",
                lz.diag.cycles,
                lz.locked.len()
            )));
        }
        let threshold = lz.kth_locked(k);
        let Some(start) = lz.random_start() else { break };
        let want = k.saturating_sub(lz.locked.len()).max(1);
        let cycle = lz.cycle(start, want)?;
        lz.diag.cycles += 1;
        lz.diag.restarts += cycle.restarts;
        let lowest = cycle.pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        if cycle.pairs.is_empty() {
            break;
        }
        lz.lock(cycle.pairs);
        if let Some(t) = threshold {
            if lowest >= t - 1e-9 * t.abs().max(1.0) {
                break;
            }
        }
    }
    if lz.locked.len() < k {
        return Err(Error::NoConvergence(format!(
            "only {} of {k} pairs locked",
            lz.locked.len()
        )));
    }
    let order = sorted_order(&lz.locked_vals);
    let chosen: Vec<usize> = order.into_iter().take(k).collect();
    let mut vecs = DMatrix::<C64>::zeros(n, k);
    for (c, &i) in chosen.iter().enumerate() {
        vecs.set_column(c, &DVector::from_column_slice(&lz.locked[i]));
    }
    let mut diag = lz.diag;
    diag.residuals = chosen.iter().map(|&i| lz.locked_res[i]).collect();
    diag.orthogonality_defect = orthogonality_defect(&vecs);
    Ok(SpectrumResult {
        eigenvalues: chosen.iter().map(|&i| lz.locked_vals[i]).collect(),
        eigenvectors: Some(vecs),
        sector_labels: None,
        diagnostics: diag,
    })
}

/// Solver settings shared by the high-level entry points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub assembly: AssemblyConfig,
    pub lanczos: LanczosConfig,
    /// Above this dimension a request for a few eigenvalues is handed to
    /// Lanczos even when dense storage would fit.
    pub dense_partial_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            assembly: AssemblyConfig::default(),
            lanczos: LanczosConfig::default(),
            dense_partial_max: 1024,
        }
    }
}

impl SolverConfig {
    /// Whether `k` of `n` eigenvalues (`None`: all) are computed densely.
    pub fn use_dense(&self, n: usize, k: Option<usize>) -> bool {
        n <= self.assembly.dense_cap()
            && k.is_none_or(|k| n <= self.dense_partial_max || 4 * k >= n)
    }
}

/// The `k` lowest eigenpairs of a model: dense within the dense cap,
/// Lanczos (compressed rows or matrix-free) above.
pub fn lowest_spectrum(spec: &ModelSpec, k: usize, cfg: &SolverConfig) -> Result<SpectrumResult> {
    lowest(spec, k, cfg, true)
}

/// As [`lowest_spectrum`], but the dense path skips eigenvectors.
pub fn lowest_eigenvalues(spec: &ModelSpec, k: usize, cfg: &SolverConfig) -> Result<SpectrumResult> {
    lowest(spec, k, cfg, false)
}

fn lowest(spec: &ModelSpec, k: usize, cfg: &SolverConfig, vectors: bool) -> Result<SpectrumResult> {
    let h = spec.hamiltonian()?;
    let n = h.dim_within(cfg.assembly.max_dim)?;
    if cfg.use_dense(n, Some(k)) {
        let m = h.to_dense(cfg.assembly.max_dim)?;
        let mut s = dense_lowest(&m, cfg.assembly.dense_cap(), vectors, k)?;
        s.truncate(k);
        Ok(s)
    } else {
        let op = if n > cfg.assembly.matrix_free_above {
            HamiltonianOperator::MatrixFree(h)
        } else {
            HamiltonianOperator::Assembled(h.to_sparse(cfg.assembly.max_dim)?)
        };
        lowest_k(&op, k.min(n), &cfg.lanczos)
    }
}

/// Gap between the ground cluster (values within `cluster_tol` of the
/// minimum) and the next eigenvalue.
pub fn spectral_gap(spectrum: &SpectrumResult, cluster_tol: f64) -> Result<f64> {
    let e = &spectrum.eigenvalues;
    let e0 = *e
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty spectrum".into()))?;
    e.iter()
        .find(|&&v| v - e0 > cluster_tol)
        .map(|&v| v - e0)
        .ok_or(Error::ClusterFillsK { k: e.len() })
}

/// Spectral gap of a model, doubling `k` until the ground cluster no
/// longer fills the computed window.
pub fn model_gap(spec: &ModelSpec, cluster_tol: f64, cfg: &SolverConfig) -> Result<f64> {
    let dim = spec.full_dim().unwrap_or(u64::MAX);
    let mut k = 4usize;
    loop {
        let kk = (k as u64).min(dim) as usize;
        let s = lowest_eigenvalues(spec, kk, cfg)?;
        match spectral_gap(&s, cluster_tol) {
            Err(Error::ClusterFillsK { .. }) if (kk as u64) < dim => k *= 2,
            other => return other,
        }
    }
}

/// Spectrum restricted to one total-S3 sector.
pub fn sector_spectrum(
    spec: &ModelSpec,
    basis: &SectorBasis,
    k: Option<usize>,
    cfg: &SolverConfig,
) -> Result<SpectrumResult> {
    sector_spectrum_impl(spec, basis, k, cfg, true)
}

fn sector_spectrum_impl(
    spec: &ModelSpec,
    basis: &SectorBasis,
    k: Option<usize>,
    cfg: &SolverConfig,
    vectors: bool,
) -> Result<SpectrumResult> {
    let n = basis.len();
    let dense = cfg.use_dense(n, k);
    // A zero dense bound yields compressed rows.
    let cap = if dense { cfg.assembly.dense_cap() } else { 0 };
    let m = spec.hamiltonian()?.sector_matrix(basis, cap, SECTOR_TOL)?;
    let mut s = if dense {
        let mut s = dense_lowest(&m, cfg.assembly.dense_cap(), vectors, k.unwrap_or(n))?;
        if let Some(k) = k {
            s.truncate(k);
        }
        s
    } else {
        let k = k.ok_or(Error::DenseCapExceeded {
            dim: n,
            cap: cfg.assembly.dense_cap(),
        })?;
        lowest_k(&m, k.min(n), &cfg.lanczos)?
    };
    s.sector_labels = Some(vec![basis.lowering(); s.len()]);
    Ok(s)
}

/// Merged spectrum of every total-S3 sector, labeled by the number of
/// lowerings `n`. `per_sector` limits each sector to its lowest values.
///
/// Eigenvectors live in different sector bases and are not returned.
pub fn sector_resolved_spectrum(
    spec: &ModelSpec,
    per_sector: Option<usize>,
    cfg: &SolverConfig,
) -> Result<SpectrumResult> {
    if !spec.is_axial() {
        return Err(Error::Unsupported(
            "sector-resolved spectra need B1 = B2 = 0".into(),
        ));
    }
    let mut pairs: Vec<(f64, usize, f64)> = Vec::new();
    let mut diag = Diagnostics::new(Method::Sectors);
    for basis in SectorBasis::all(spec.sites, spec.spin())? {
        let s = sector_spectrum_impl(spec, &basis, per_sector, cfg, false)?;
        diag.matvecs += s.diagnostics.matvecs;
        diag.cycles += s.diagnostics.cycles;
        for (i, &v) in s.eigenvalues.iter().enumerate() {
            let r = s.diagnostics.residuals.get(i).copied().unwrap_or(0.0);
            pairs.push((v, basis.lowering(), r));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    diag.residuals = pairs.iter().map(|p| p.2).collect();
    Ok(SpectrumResult {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        eigenvectors: None,
        sector_labels: Some(pairs.iter().map(|p| p.1).collect()),
        diagnostics: diag,
    })
}

/// `<S3_x>` for `x = 1..sites` of a normalized full-space state.
pub fn expectation_profile(state: &[C64], sites: usize, spin: Spin) -> Vec<f64> {
    let mut prof = vec![0.0; sites];
    for (i, a) in state.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (x, d) in digits_of(i as u64, sites, spin).into_iter().enumerate() {
            prof[x] += p * spin.m_of_index(d as usize);
        }
    }
    prof
}

/// `<S3_x>` of a state given by amplitudes over a sector basis.
pub fn sector_expectation_profile(amps: &[C64], basis: &SectorBasis) -> Vec<f64> {
    let spin = basis.spin();
    let mut prof = vec![0.0; basis.sites()];
    for (a, &idx) in amps.iter().zip(basis.states()) {
        let p = a.norm_sqr();
        for (x, d) in basis.digits(idx).into_iter().enumerate() {
            prof[x] += p * spin.m_of_index(d as usize);
        }
    }
    prof
}

/// `<v, H v> / <v, v>`.
pub fn rayleigh_quotient(op: &dyn LinearOperator, v: &[C64]) -> f64 {
    let mut hv = vec![C64::new(0.0, 0.0); v.len()];
    op.apply(v, &mut hv);
    dot(v, &hv).re / dot(v, v).re
}

/// `|H v - e v| / |v|`.
pub fn residual_norm(op: &dyn LinearOperator, v: &[C64], e: f64) -> f64 {
    let mut hv = vec![C64::new(0.0, 0.0); v.len()];
    op.apply(v, &mut hv);
    axpy(C64::from(-e), v, &mut hv);
    norm(&hv) / norm(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundaryCondition;
    use crate::operator::BasisTag;

    fn tag(n: usize) -> BasisTag {
        BasisTag::Full {
            sites: 1,
            local_dim: n,
        }
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(
            [3.0, -1.0, 2.0].iter().map(|&x| C64::from(x)).collect(),
        ));
        let s = dense_spectrum(&OperatorMatrix::dense(d, tag(3)), 10, true).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 2.0, 3.0]);
        assert!(dense_spectrum(&OperatorMatrix::dense(DMatrix::zeros(3, 3), tag(3)), 2, false).is_err());
    }

    #[test]
    fn complex_hermitian_path() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::from(1.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::from(1.0)],
        );
        let s = dense_spectrum(&OperatorMatrix::dense(m, tag(2)), 10, true).unwrap();
        assert!((s.eigenvalues[0]).abs() < 1e-14 && (s.eigenvalues[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn identity_cluster_fills_window() {
        let s = dense_spectrum(&OperatorMatrix::dense(DMatrix::identity(4, 4), tag(4)), 10, false).unwrap();
        assert_eq!(spectral_gap(&s, 1e-8), Err(Error::ClusterFillsK { k: 4 }));
    }

    #[test]
    fn lanczos_matches_dense_with_degeneracy() {
        let spec = ModelSpec::chain(8, Spin::HALF, 2.25, BoundaryCondition::PlusMinus)
            .unwrap()
            .with_field([0.0, 0.0, 0.2], 4)
            .unwrap();
        let m = crate::model::build_hamiltonian(&spec, &AssemblyConfig::default()).unwrap();
        let dense = dense_spectrum(&m, 4096, false).unwrap();
        let lz = lowest_k(&m, 12, &LanczosConfig::default()).unwrap();
        for (a, b) in lz.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(lz.diagnostics.orthogonality_defect < 1e-10);
    }

    #[test]
    fn lanczos_full_space() {
        let spec = ModelSpec::chain(3, Spin::HALF, 1.7, BoundaryCondition::PlusPlus)
            .unwrap()
            .with_field([0.3, -0.2, 0.1], 2)
            .unwrap();
        let m = crate::model::build_hamiltonian(&spec, &AssemblyConfig::default()).unwrap();
        let dense = dense_spectrum(&m, 4096, false).unwrap();
        let lz = lowest_k(&m, 8, &LanczosConfig::default()).unwrap();
        for (a, b) in lz.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn all_up_profile() {
        let mut v = vec![C64::new(0.0, 0.0); 27];
        v[0] = C64::from(1.0);
        assert_eq!(expectation_profile(&v, 3, Spin::ONE), vec![1.0; 3]);
    }
}
