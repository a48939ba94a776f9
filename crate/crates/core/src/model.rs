//! Finite-chain XXZ Hamiltonians with boundary fields and a single-site field.
//!
//! Bond term, with the sign of the boundary part picked by the kind:
//!
//! ```text
//! h = -(1/delta)(S1 S1 + S2 S2) - S3 S3 + j^2  [-/+ jA (S3 (x) 1 - 1 (x) S3)]
//! ```
//!
//! Kink bonds carry `-jA`, antikink bonds `+jA`. Droplet chains are bare
//! bonds plus `-jA (S3 - j)` at both ends; antidroplet chains use
//! `+jA (S3 + j)`. Constants are kept so that every frustration-free
//! Hamiltonian has ground energy exactly zero.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::operator::{BasisTag, LinearOperator, OperatorMatrix};
use crate::sector::{full_dim_u64, SectorBasis};
use crate::spin::{spin_matrices, LocalOperator, Spin, SpinParams, C64};

/// Tolerance used when checking that an operator preserves total S3.
pub const SECTOR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Bare,
    /// Droplet: both ends pinned up.
    PlusPlus,
    /// Antidroplet: both ends pinned down.
    MinusMinus,
    /// Kink.
    PlusMinus,
    /// Antikink.
    MinusPlus,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Bare => "bare",
            BoundaryCondition::PlusPlus => "droplet",
            BoundaryCondition::MinusMinus => "antidroplet",
            BoundaryCondition::PlusMinus => "kink",
            BoundaryCondition::MinusPlus => "antikink",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "bare" => BoundaryCondition::Bare,
            "droplet" | "++" | "plusplus" => BoundaryCondition::PlusPlus,
            "antidroplet" | "--" | "minusminus" => BoundaryCondition::MinusMinus,
            "kink" | "+-" | "plusminus" => BoundaryCondition::PlusMinus,
            "antikink" | "-+" | "minusplus" => BoundaryCondition::MinusPlus,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown boundary condition '{other}'"
                )))
            }
        })
    }

    fn bond_kind(self) -> BondKind {
        match self {
            BoundaryCondition::PlusMinus => BondKind::Kink,
            BoundaryCondition::MinusPlus => BondKind::Antikink,
            _ => BondKind::Bare,
        }
    }
}

/// Field vector `B` acting on the single site `site` (1-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Field {
    pub b: [f64; 3],
    pub site: usize,
}

impl Field {
    pub fn new(b: [f64; 3], site: usize) -> Self {
        Field { b, site }
    }

    pub fn norm(&self) -> f64 {
        norm3(self.b)
    }

    /// `B1^2 + B2^2`.
    pub fn transverse_sq(&self) -> f64 {
        self.b[0] * self.b[0] + self.b[1] * self.b[1]
    }

    pub fn is_axial(&self) -> bool {
        self.transverse_sq() == 0.0
    }
}

pub fn norm3(b: [f64; 3]) -> f64 {
    (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt()
}

/// Complete description of one finite-chain Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub sites: usize,
    pub params: SpinParams,
    pub bc: BoundaryCondition,
    pub field: Option<Field>,
    /// Sub-interval `[a, c]` carrying the bonds; identity elsewhere.
    pub interval: Option<(usize, usize)>,
}

impl ModelSpec {
    pub fn new(sites: usize, params: SpinParams, bc: BoundaryCondition) -> Result<Self> {
        if sites < 2 {
            return Err(Error::ChainTooShort { sites, min: 2 });
        }
        Ok(ModelSpec {
            sites,
            params,
            bc,
            field: None,
            interval: None,
        })
    }

    /// Shorthand for a spin, anisotropy and boundary condition.
    pub fn chain(sites: usize, spin: Spin, delta: f64, bc: BoundaryCondition) -> Result<Self> {
        ModelSpec::new(sites, SpinParams::new(spin, delta)?, bc)
    }

    pub fn with_field(mut self, b: [f64; 3], site: usize) -> Result<Self> {
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("field components must be finite".into()));
        }
        self.field = Some(Field::new(b, site));
        self.check_field()?;
        Ok(self)
    }

    pub fn with_interval(mut self, a: usize, c: usize) -> Result<Self> {
        if a < 1 || c > self.sites || c <= a {
            return Err(Error::InvalidArgument(format!(
                "interval [{a}, {c}] is not a sub-interval of [1, {}] with at least one bond",
                self.sites
            )));
        }
        self.interval = Some((a, c));
        self.check_field()?;
        Ok(self)
    }

    pub fn spin(&self) -> Spin {
        self.params.spin
    }

    pub fn j(&self) -> f64 {
        self.params.j()
    }

    pub fn span(&self) -> (usize, usize) {
        self.interval.unwrap_or((1, self.sites))
    }

    /// Field vector, zero when absent.
    pub fn b(&self) -> [f64; 3] {
        self.field.map(|f| f.b).unwrap_or([0.0; 3])
    }

    /// Field site, or the chain center when no field is set.
    pub fn y(&self) -> usize {
        self.field.map(|f| f.site).unwrap_or(self.sites.div_ceil(2))
    }

    fn check_field(&self) -> Result<()> {
        if let Some(f) = self.field {
            let (a, c) = self.span();
            if f.site < a || f.site > c {
                return Err(Error::SiteOutOfRange {
                    site: f.site,
                    lo: a,
                    hi: c,
                });
            }
        }
        Ok(())
    }

    pub fn full_dim(&self) -> Option<u64> {
        full_dim_u64(self.sites, self.spin())
    }

    /// Builds the term list without assembling anything.
    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        self.check_field()?;
        let p = &self.params;
        let spin = p.spin;
        let j = p.j();
        let ja = p.boundary_strength();
        let (a, c) = self.span();
        let mut h = Hamiltonian::new(self.sites, spin)?;
        let bond = bond_term(self.bc.bond_kind(), p);
        for x in a..c {
            h.add_term(x, bond.clone())?;
        }
        let s = spin_matrices(spin);
        let ident = DMatrix::<C64>::identity(spin.dim(), spin.dim());
        let edge = match self.bc {
            BoundaryCondition::PlusPlus => Some((&s.sz - &ident * C64::from(j)) * C64::from(-ja)),
            BoundaryCondition::MinusMinus => Some((&s.sz + &ident * C64::from(j)) * C64::from(ja)),
            _ => None,
        };
        if let Some(edge) = edge {
            h.add_term(a, edge.clone())?;
            h.add_term(c, edge)?;
        }
        if let Some(f) = self.field {
            if f.b != [0.0; 3] {
                h.add_term(f.site, s.dot(f.b))?;
            }
        }
        Ok(h)
    }

    pub fn is_axial(&self) -> bool {
        self.field.is_none_or(|f| f.is_axial())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BondKind {
    Bare,
    Kink,
    Antikink,
}

/// Two-site interaction of the given kind.
pub fn bond_term(kind: BondKind, p: &SpinParams) -> LocalOperator {
    let s = spin_matrices(p.spin);
    let d = p.spin.dim();
    let j = p.j();
    let id = DMatrix::<C64>::identity(d, d);
    let inv = C64::from(-1.0 / p.delta);
    let mut h = (s.sx.kronecker(&s.sx) + s.sy.kronecker(&s.sy)) * inv - s.sz.kronecker(&s.sz)
        + DMatrix::<C64>::identity(d * d, d * d) * C64::from(j * j);
    let sign = match kind {
        BondKind::Bare => 0.0,
        BondKind::Kink => -1.0,
        BondKind::Antikink => 1.0,
    };
    if sign != 0.0 {
        let diff = s.sz.kronecker(&id) - id.kronecker(&s.sz);
        h += diff * C64::from(sign * p.boundary_strength());
    }
    h
}

/// Two-site bond term wrapped with basis metadata.
pub fn bond_matrix(kind: BondKind, p: &SpinParams) -> OperatorMatrix {
    OperatorMatrix::dense(
        bond_term(kind, p),
        BasisTag::Full {
            sites: 2,
            local_dim: p.spin.dim(),
        },
    )
}

/// Storage thresholds and memory budget for assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssemblyConfig {
    /// Largest dimension assembled densely.
    pub dense_max_dim: usize,
    /// Above this dimension the Hamiltonian is applied without assembly.
    pub matrix_free_above: usize,
    /// Hard cap on the full-space dimension.
    pub max_dim: usize,
    /// Permit dense assembly and diagonalization up to `max_dense_dim`.
    pub allow_large_dense: bool,
    pub max_dense_dim: usize,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            dense_max_dim: 4096,
            matrix_free_above: 16384,
            max_dim: 1 << 22,
            allow_large_dense: false,
            max_dense_dim: 8192,
        }
    }
}

impl AssemblyConfig {
    /// Dimension ceiling for dense work under this configuration.
    pub fn dense_cap(&self) -> usize {
        if self.allow_large_dense {
            self.max_dense_dim.max(self.dense_max_dim)
        } else {
            self.dense_max_dim
        }
    }
}

/// Assembles the full-space matrix: dense up to `dense_max_dim`, compressed
/// rows above.
pub fn build_hamiltonian(spec: &ModelSpec, cfg: &AssemblyConfig) -> Result<OperatorMatrix> {
    let h = spec.hamiltonian()?;
    let n = h.dim_within(cfg.max_dim)?;
    if n <= cfg.dense_cap() {
        h.to_dense(cfg.max_dim)
    } else {
        h.to_sparse(cfg.max_dim)
    }
}

/// Assembles the restriction of `spec` to one total-S3 sector.
pub fn build_sector_hamiltonian(
    spec: &ModelSpec,
    basis: &SectorBasis,
    cfg: &AssemblyConfig,
) -> Result<OperatorMatrix> {
    spec.hamiltonian()?
        .sector_matrix(basis, cfg.dense_cap(), SECTOR_TOL)
}

/// A Hamiltonian ready for matrix-vector products.
#[derive(Clone, Debug)]
pub enum HamiltonianOperator {
    Assembled(OperatorMatrix),
    MatrixFree(Hamiltonian),
}

impl HamiltonianOperator {
    /// Picks the storage by dimension: dense, compressed rows, or matrix-free.
    pub fn for_spec(spec: &ModelSpec, cfg: &AssemblyConfig) -> Result<Self> {
        let h = spec.hamiltonian()?;
        let n = h.dim_within(cfg.max_dim)?;
        Ok(if n > cfg.matrix_free_above {
            HamiltonianOperator::MatrixFree(h)
        } else if n <= cfg.dense_max_dim {
            HamiltonianOperator::Assembled(h.to_dense(cfg.max_dim)?)
        } else {
            HamiltonianOperator::Assembled(h.to_sparse(cfg.max_dim)?)
        })
    }

    pub fn is_matrix_free(&self) -> bool {
        matches!(self, HamiltonianOperator::MatrixFree(_))
    }
}

impl LinearOperator for HamiltonianOperator {
    fn dim(&self) -> usize {
        match self {
            HamiltonianOperator::Assembled(m) => m.dim(),
            HamiltonianOperator::MatrixFree(h) => h.dim(),
        }
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match self {
            HamiltonianOperator::Assembled(m) => m.apply(x, y),
            HamiltonianOperator::MatrixFree(h) => h.apply(x, y),
        }
    }
}

/// Interior field used on each half when a droplet chain is split at `y`:
/// `(B1/2, B2/2, B3/2 - jA)`.
pub fn split_field(b: [f64; 3], p: &SpinParams) -> [f64; 3] {
    [b[0] / 2.0, b[1] / 2.0, b[2] / 2.0 - p.boundary_strength()]
}

/// Largest entry of
/// `H++(B) - 2 j^2 A - H+-_[1,y](F) - H-+_[y,b](F)` with `F` from [`split_field`].
pub fn decomposition_residual(spec: &ModelSpec) -> Result<f64> {
    if spec.bc != BoundaryCondition::PlusPlus || spec.interval.is_some() {
        return Err(Error::InvalidArgument(
            "decomposition needs a full droplet chain".into(),
        ));
    }
    let b = spec.sites;
    let y = spec.y();
    if b < 3 || y <= 1 || y >= b {
        return Err(Error::SiteOutOfRange {
            site: y,
            lo: 2,
            hi: b.saturating_sub(1),
        });
    }
    let p = spec.params;
    let budget = AssemblyConfig::default().max_dim;
    let lhs = spec.hamiltonian()?.to_dense(budget)?.to_dense();
    let f = split_field(spec.b(), &p);
    let kink = ModelSpec::new(b, p, BoundaryCondition::PlusMinus)?
        .with_interval(1, y)?
        .with_field(f, y)?;
    let anti = ModelSpec::new(b, p, BoundaryCondition::MinusPlus)?
        .with_interval(y, b)?
        .with_field(f, y)?;
    let rhs = kink.hamiltonian()?.to_dense(budget)?.to_dense()
        + anti.hamiltonian()?.to_dense(budget)?.to_dense();
    let shift = 2.0 * p.j() * p.j() * p.a;
    let n = lhs.nrows();
    let diff = lhs - rhs - DMatrix::<C64>::identity(n, n) * C64::from(shift);
    Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Full-space permutation of the global flip `m -> -m` on every site.
pub fn global_flip_index(idx: u64, sites: usize, spin: Spin) -> u64 {
    let d = spin.dim() as u64;
    let top = spin.two_j() as u64;
    let mut rest = idx;
    let mut out = 0u64;
    let mut place = 1u64;
    for _ in 0..sites {
        let digit = rest % d;
        rest /= d;
        out += (top - digit) * place;
        place *= d;
    }
    out
}

/// Largest entry of `F H++(B1,B2,B3) F - H--(B1,-B2,-B3)`, where `F` is the
/// global flip.
pub fn spin_flip_residual(spec: &ModelSpec) -> Result<f64> {
    if spec.bc != BoundaryCondition::PlusPlus {
        return Err(Error::InvalidArgument(
            "spin-flip check starts from a droplet chain".into(),
        ));
    }
    let budget = AssemblyConfig::default().max_dim;
    let h = spec.hamiltonian()?.to_dense(budget)?.to_dense();
    let mut mirrored = *spec;
    mirrored.bc = BoundaryCondition::MinusMinus;
    if let Some(f) = spec.field {
        mirrored.field = Some(Field::new([f.b[0], -f.b[1], -f.b[2]], f.site));
    }
    let g = mirrored.hamiltonian()?.to_dense(budget)?.to_dense();
    let n = h.nrows();
    let perm: Vec<usize> = (0..n)
        .map(|i| global_flip_index(i as u64, spec.sites, spec.spin()) as usize)
        .collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            worst = worst.max((h[(perm[i], perm[k])] - g[(i, k)]).norm());
        }
    }
    Ok(worst)
}

/// Total `2 S3` of a full-space index.
pub fn total_two_m(idx: u64, sites: usize, spin: Spin) -> i32 {
    let d = spin.dim() as u64;
    let mut rest = idx;
    let mut lowered = 0i64;
    for _ in 0..sites {
        lowered += (rest % d) as i64;
        rest /= d;
    }
    (spin.two_j() as i64 * sites as i64 - 2 * lowered) as i32
}

/// Largest entry of `[H, S3_total]`, computed row by row without assembly.
pub fn s3_commutator_defect(h: &Hamiltonian, max_dim: usize) -> Result<f64> {
    let n = h.dim_within(max_dim)?;
    let (sites, spin) = (h.sites(), h.spin());
    let mut worst = 0.0f64;
    let mut row = Vec::new();
    for i in 0..n as u64 {
        row.clear();
        h.for_each_in_row(i, |k, v| row.push((k as usize, v)));
        crate::operator::merge_row(&mut row);
        let mi = total_two_m(i, sites, spin);
        for &(k, v) in &row {
            let mk = total_two_m(k as u64, sites, spin);
            worst = worst.max(v.norm() * (mk - mi).abs() as f64 / 2.0);
        }
    }
    Ok(worst)
}
