//! Closed-form states and energies: product kink states, sector kink
//! states, the field-selected ground states of kink and droplet chains,
//! ground-energy laws and the one-magnon branch.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{norm3, BoundaryCondition, ModelSpec};
use crate::sector::SectorBasis;
use crate::operator::{BasisTag, OperatorMatrix};
use crate::solver::{dense_spectrum, SpectrumResult};
use crate::spin::{spin_matrices, weight, Spin, SpinParams, C64};

/// Tensor product of single-site vectors, site 1 first.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub factors: Vec<DVector<C64>>,
    pub normalized: bool,
}

impl ProductState {
    pub fn new(factors: Vec<DVector<C64>>) -> Self {
        let normalized = factors.iter().all(|f| (f.norm() - 1.0).abs() < 1e-12);
        ProductState {
            factors,
            normalized,
        }
    }

    pub fn sites(&self) -> usize {
        self.factors.len()
    }

    /// Full-space amplitudes in the chain's index convention.
    pub fn to_vector(&self) -> Vec<C64> {
        let mut v = vec![C64::new(1.0, 0.0)];
        for f in &self.factors {
            let d = f.len();
            let mut next = vec![C64::new(0.0, 0.0); v.len() * d];
            for (i, a) in v.iter().enumerate() {
                for (k, c) in f.iter().enumerate() {
                    next[i * d + k] = a * c;
                }
            }
            v = next;
        }
        v
    }

    pub fn norm(&self) -> f64 {
        self.factors.iter().map(|f| f.norm()).product()
    }

    /// `<S3_x>` for every site.
    pub fn profile(&self, spin: Spin) -> Vec<f64> {
        self.factors
            .iter()
            .map(|f| {
                let w: f64 = f.iter().map(|c| c.norm_sqr()).sum();
                f.iter()
                    .enumerate()
                    .map(|(k, c)| c.norm_sqr() * spin.m_of_index(k))
                    .sum::<f64>()
                    / w
            })
            .collect()
    }

    /// `<self, other>` computed factor by factor.
    pub fn inner(&self, other: &ProductState) -> C64 {
        self.factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| a.dotc(b))
            .product()
    }
}

/// Normalized single-site kink factor: components
/// `(z q^-x)^(j-m) w_m / (1 + |z|^2 q^-2x)^j` in descending-m order.
pub fn chi_site(p: &SpinParams, z: C64, x: i64) -> DVector<C64> {
    let spin = p.spin;
    let two_j = spin.two_j() as i32;
    let j = p.j();
    let u = z * p.q.powi(-(x as i32));
    let r = u.norm();
    let d = spin.dim();
    if r == 0.0 {
        let mut v = DVector::zeros(d);
        v[0] = C64::new(1.0, 0.0);
        return v;
    }
    let phase = u / r;
    DVector::from_fn(d, |k, _| {
        let w = weight(spin, two_j - 2 * k as i32).expect("index on the ladder");
        // Factor out the dominant power so large |u| neither overflows nor
        // loses the low components.
        let mag = if r <= 1.0 {
            r.powi(k as i32) / (1.0 + r * r).powf(j)
        } else {
            r.powi(k as i32 - two_j) / (1.0 + 1.0 / (r * r)).powf(j)
        };
        phase.powi(k as i32) * (w * mag)
    })
}

/// Antikink factor: the kink factor with its components reversed.
pub fn chi_tilde_site(p: &SpinParams, z: C64, x: i64) -> DVector<C64> {
    let v = chi_site(p, z, x);
    let d = v.len();
    DVector::from_fn(d, |k, _| v[d - 1 - k])
}

pub fn kink_product_state(p: &SpinParams, sites: usize, z: C64) -> ProductState {
    ProductState::new((1..=sites).map(|x| chi_site(p, z, x as i64)).collect())
}

pub fn antikink_product_state(p: &SpinParams, sites: usize, z: C64) -> ProductState {
    ProductState::new((1..=sites).map(|x| chi_tilde_site(p, z, x as i64)).collect())
}

/// Kink state of fixed total S3, as amplitudes over the sector basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorState {
    pub basis: SectorBasis,
    /// Normalized amplitudes.
    pub amplitudes: Vec<C64>,
    /// Natural log of the norm of the unnormalized amplitudes
    /// `prod_x q^(-x (j - m_x)) w_(m_x)`.
    pub log_norm: f64,
}

impl SectorState {
    pub fn to_full_vector(&self, full_dim: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); full_dim];
        for (a, &i) in self.amplitudes.iter().zip(self.basis.states()) {
            v[i as usize] = *a;
        }
        v
    }
}

/// Sector kink state with total magnetization `total_two_m / 2`.
pub fn sector_kink_state(p: &SpinParams, sites: usize, total_two_m: i32) -> Result<SectorState> {
    let basis = SectorBasis::new(sites, p.spin, total_two_m)?;
    let spin = p.spin;
    let lnq = p.q.ln();
    let logs: Vec<f64> = basis
        .states()
        .iter()
        .map(|&s| {
            basis
                .digits(s)
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    let x = (i + 1) as f64;
                    let w = weight(spin, spin.two_m_of_index(d as usize)).expect("ladder");
                    -x * d as f64 * lnq + w.ln()
                })
                .sum()
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let n = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(SectorState {
        amplitudes: raw.iter().map(|a| C64::from(a / n)).collect(),
        log_norm: top + n.ln(),
        basis,
    })
}

/// Which of the two field-selected product states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Energy `-j|B|`.
    Ground,
    /// Energy `+j|B|`.
    Excited,
}

/// Kink parameters of the two product eigenstates of a kink chain with
/// transverse field at `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinkParameters {
    pub ground: C64,
    pub excited: C64,
}

fn require_transverse(b: [f64; 3]) -> Result<()> {
    if b[0] * b[0] + b[1] * b[1] == 0.0 {
        return Err(Error::Unsupported(
            "B1 = B2 = 0 has no product ground state".into(),
        ));
    }
    Ok(())
}

/// `(|B| + B3)`, evaluated without cancellation when `B3 < 0`.
fn norm_plus_b3(b: [f64; 3]) -> f64 {
    let n = norm3(b);
    if b[2] >= 0.0 {
        n + b[2]
    } else {
        (b[0] * b[0] + b[1] * b[1]) / (n - b[2])
    }
}

/// Ground `z = -(|B| + B3) / (B1 - i B2) q^y` and excited
/// `z = (|B| - B3) / (B1 - i B2) q^y`.
pub fn select_ground_z(b: [f64; 3], y: usize, q: f64) -> Result<KinkParameters> {
    require_transverse(b)?;
    let den = C64::new(b[0], -b[1]);
    let qy = q.powi(y as i32);
    Ok(KinkParameters {
        ground: -C64::from(norm_plus_b3(b)) / den * qy,
        excited: C64::from(norm_plus_b3([b[0], b[1], -b[2]])) / den * qy,
    })
}

/// Antikink parameters: ground `z~ = -(|B| - B3) / (B1 + i B2) q^y`,
/// excited `z~ = (|B| + B3) / (B1 + i B2) q^y`.
pub fn select_ground_z_tilde(b: [f64; 3], y: usize, q: f64) -> Result<KinkParameters> {
    require_transverse(b)?;
    let den = C64::new(b[0], b[1]);
    let qy = q.powi(y as i32);
    Ok(KinkParameters {
        ground: -C64::from(norm_plus_b3([b[0], b[1], -b[2]])) / den * qy,
        excited: C64::from(norm_plus_b3(b)) / den * qy,
    })
}

/// `|(B.S -/+ j|B|) chi_y(z)|` for the ground (`-`) or excited (`+`) branch.
pub fn verify_field_eigenfactor(p: &SpinParams, b: [f64; 3], y: usize, z: C64, branch: Branch) -> f64 {
    let s = spin_matrices(p.spin);
    let chi = chi_site(p, z, y as i64);
    let target = match branch {
        Branch::Ground => -p.j() * norm3(b),
        Branch::Excited => p.j() * norm3(b),
    };
    (s.dot(b) * &chi - &chi * C64::from(target)).norm()
}

/// Product state together with its claimed energy.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticState {
    pub state: ProductState,
    pub energy: f64,
}

fn transverse_field(spec: &ModelSpec) -> Result<([f64; 3], usize)> {
    let f = spec
        .field
        .ok_or_else(|| Error::Unsupported("no field set".into()))?;
    require_transverse(f.b)?;
    if spec.interval.is_some() {
        return Err(Error::Unsupported(
            "analytic states are built on the full chain".into(),
        ));
    }
    Ok((f.b, f.site))
}

/// Product eigenstate of a kink chain with transverse field.
pub fn kink_state(spec: &ModelSpec, branch: Branch) -> Result<AnalyticState> {
    if spec.bc != BoundaryCondition::PlusMinus {
        return Err(Error::Unsupported("kink state needs kink boundary".into()));
    }
    let (b, y) = transverse_field(spec)?;
    let z = select_ground_z(b, y, spec.params.q)?;
    let (z, sign) = match branch {
        Branch::Ground => (z.ground, -1.0),
        Branch::Excited => (z.excited, 1.0),
    };
    Ok(AnalyticState {
        state: kink_product_state(&spec.params, spec.sites, z),
        energy: sign * spec.j() * norm3(b),
    })
}

/// Product eigenstate of an antikink chain with transverse field.
pub fn antikink_state(spec: &ModelSpec, branch: Branch) -> Result<AnalyticState> {
    if spec.bc != BoundaryCondition::MinusPlus {
        return Err(Error::Unsupported(
            "antikink state needs antikink boundary".into(),
        ));
    }
    let (b, y) = transverse_field(spec)?;
    let z = select_ground_z_tilde(b, y, spec.params.q)?;
    let (z, sign) = match branch {
        Branch::Ground => (z.ground, -1.0),
        Branch::Excited => (z.excited, 1.0),
    };
    Ok(AnalyticState {
        state: antikink_product_state(&spec.params, spec.sites, z),
        energy: sign * spec.j() * norm3(b),
    })
}

/// Droplet field `(B1, B2, B3 - 2jA)`.
pub fn droplet_shifted_field(b: [f64; 3], p: &SpinParams) -> [f64; 3] {
    [b[0], b[1], b[2] - 2.0 * p.boundary_strength()]
}

/// Glued kink-antikink eigenstate of a droplet chain with transverse field:
/// kink factors on `[1, y]`, antikink factors on `[y+1, b]`.
pub fn droplet_state(spec: &ModelSpec, branch: Branch) -> Result<AnalyticState> {
    if spec.bc != BoundaryCondition::PlusPlus {
        return Err(Error::Unsupported(
            "droplet state needs droplet boundary".into(),
        ));
    }
    if spec.sites < 3 {
        return Err(Error::ChainTooShort {
            sites: spec.sites,
            min: 3,
        });
    }
    let (b, y) = transverse_field(spec)?;
    let p = &spec.params;
    let shifted = droplet_shifted_field(b, p);
    let z = select_ground_z(shifted, y, p.q)?;
    let zt = select_ground_z_tilde(shifted, y, p.q)?;
    let (z, zt, sign) = match branch {
        Branch::Ground => (z.ground, zt.ground, -1.0),
        Branch::Excited => (z.excited, zt.excited, 1.0),
    };
    let factors = (1..=spec.sites)
        .map(|x| {
            if x <= y {
                chi_site(p, z, x as i64)
            } else {
                chi_tilde_site(p, zt, x as i64)
            }
        })
        .collect();
    let j = p.j();
    Ok(AnalyticState {
        state: ProductState::new(factors),
        energy: sign * j * norm3(shifted) + 2.0 * j * j * p.a,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyRegime {
    KinkTransverse,
    KinkAxial,
    AntikinkTransverse,
    AntikinkAxial,
    DropletTransverse,
    DropletAxialBelow,
    DropletAxialCritical,
    DropletAxialAbove,
}

/// Ground-state energy from the closed-form laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundEnergy {
    pub value: f64,
    pub regime: EnergyRegime,
    /// The value is the bottom of a continuum in the infinite chain, not an
    /// isolated eigenvalue.
    pub continuum: bool,
}

/// Axial droplet critical field `2jA` (equal to `A` for spin 1/2).
pub fn droplet_critical_field(p: &SpinParams) -> f64 {
    2.0 * p.boundary_strength()
}

/// Closed-form ground energy of kink, antikink and droplet chains.
///
/// Axial droplet fields compare the all-up energy `jB` with the all-down
/// energy `4j^2 A - jB`; they meet at `B_c = 2jA` with energy `2j^2 A`.
pub fn ground_energy(spec: &ModelSpec) -> Result<GroundEnergy> {
    let b = spec.b();
    let j = spec.j();
    let p = &spec.params;
    let transverse = b[0] * b[0] + b[1] * b[1] > 0.0;
    let (value, regime, continuum) = match (spec.bc, transverse) {
        (BoundaryCondition::PlusMinus, true) => (-j * norm3(b), EnergyRegime::KinkTransverse, false),
        (BoundaryCondition::MinusPlus, true) => {
            (-j * norm3(b), EnergyRegime::AntikinkTransverse, false)
        }
        (BoundaryCondition::PlusMinus, false) => {
            (-j * b[2].abs(), EnergyRegime::KinkAxial, b[2] != 0.0)
        }
        (BoundaryCondition::MinusPlus, false) => {
            (-j * b[2].abs(), EnergyRegime::AntikinkAxial, b[2] != 0.0)
        }
        (BoundaryCondition::PlusPlus, true) => (
            -j * norm3(droplet_shifted_field(b, p)) + 2.0 * j * j * p.a,
            EnergyRegime::DropletTransverse,
            false,
        ),
        (BoundaryCondition::PlusPlus, false) => {
            let bc = droplet_critical_field(p);
            let bz = b[2];
            let tol = 1e-12 * bc.max(1.0);
            if (bz - bc).abs() <= tol {
                (2.0 * j * j * p.a, EnergyRegime::DropletAxialCritical, false)
            } else if bz < bc {
                (j * bz, EnergyRegime::DropletAxialBelow, false)
            } else {
                (4.0 * j * j * p.a - j * bz, EnergyRegime::DropletAxialAbove, true)
            }
        }
        (bc, _) => {
            return Err(Error::Unsupported(format!(
                "no ground-energy law for {} chains",
                bc.name()
            )))
        }
    };
    Ok(GroundEnergy {
        value,
        regime,
        continuum,
    })
}

/// Distance `|log_q(sqrt(1 + B3^2) + B3)|` by which an axial component
/// moves the kink (for `B1^2 + B2^2 = 1`).
pub fn kink_shift_distance(b3: f64, q: f64) -> f64 {
    (b3.hypot(1.0) + b3).ln().abs() / q.ln().abs()
}

/// Position `x0 = log_q |z|` where a kink factor has `|z q^-x| = 1`.
pub fn kink_center(z: C64, q: f64) -> f64 {
    z.norm().ln() / q.ln()
}

/// Spin-1/2 kink center read off a single-site magnetization, from
/// `<S3_x> = tanh((x - x0) ln q) / 2`.
pub fn kink_center_from_magnetization(x: f64, s3: f64, q: f64) -> f64 {
    x - (2.0 * s3).atanh() / q.ln()
}

/// `E-(B) = 1 - sqrt(B^2 + delta^-2) + |B|/2`, the one-magnon level of the
/// spin-1/2 droplet chain with axial field.
pub fn excitation_energy_minus(b: f64, delta: f64) -> f64 {
    1.0 - (b * b + 1.0 / (delta * delta)).sqrt() + 0.5 * b.abs()
}

/// Decay ratio `r- = D(1-E~) - sqrt(D^2 (1-E~)^2 - 1)` of the one-magnon
/// bound state, with `E~ = 1 - sqrt(B^2 + delta^-2)`.
pub fn r_minus(b: f64, delta: f64) -> f64 {
    let s = delta * (b * b + 1.0 / (delta * delta)).sqrt();
    s - (s * s - 1.0).max(0.0).sqrt()
}

/// `1 - cos(pi/b) / delta`, the spin-1/2 kink gap at zero field.
pub fn kink_gap_law(sites: usize, delta: f64) -> f64 {
    1.0 - (std::f64::consts::PI / sites as f64).cos() / delta
}

/// Spectrum of the one-lowering sector (dimension `b`) of a spin-1/2 chain
/// with axial field, with eigenvectors as coefficient profiles `a_x`.
pub fn one_magnon_spectrum(spec: &ModelSpec) -> Result<SpectrumResult> {
    if spec.spin() != Spin::HALF {
        return Err(Error::Unsupported("one-magnon branch is spin 1/2".into()));
    }
    if !spec.is_axial() {
        return Err(Error::Unsupported(
            "one-magnon sector needs B1 = B2 = 0".into(),
        ));
    }
    let m = spec.hamiltonian()?.one_lowering_matrix(1e-12)?;
    let two_j = spec.spin().two_j();
    let tag = BasisTag::Sector {
        sites: spec.sites,
        two_j,
        total_two_m: (spec.sites as u32 * two_j) as i32 - 2,
    };
    let m = OperatorMatrix::dense(m, tag);
    let mut s = dense_spectrum(&m, usize::MAX, true)?;
    s.sector_labels = Some(vec![1; s.len()]);
    Ok(s)
}

fn one_flip_level(spec: &ModelSpec, level: usize) -> Result<(f64, Vec<f64>)> {
    let s = one_magnon_spectrum(spec)?;
    let v = s.vector(level).ok_or_else(|| {
        Error::InvalidArgument(format!("one-flip sector has only {} levels", s.len()))
    })?;
    // Fix the global phase so the largest coefficient is real and positive.
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let phase = big.conj() / big.norm();
    Ok((s.eigenvalues[level], v.iter().map(|c| (c * phase).re).collect()))
}

/// Lowest one-magnon eigenvalue and its coefficient profile `a_x`.
pub fn one_magnon_branch(spec: &ModelSpec) -> Result<(f64, Vec<f64>)> {
    one_flip_level(spec, 0)
}

/// First excited level of the one-flip sector and its profile `a_x`; for
/// the field-free kink chain the lowest level is the kink itself.
pub fn first_excited_one_flip(spec: &ModelSpec) -> Result<(f64, Vec<f64>)> {
    one_flip_level(spec, 1)
}

/// `psi_e(z) = sum_x a_x S-_x psi(z)` as a full-space vector.
pub fn psi_e_vector(p: &SpinParams, sites: usize, z: C64, a: &[f64]) -> Vec<C64> {
    let s = spin_matrices(p.spin);
    let base = kink_product_state(p, sites, z);
    let mut out = vec![C64::new(0.0, 0.0); p.spin.dim().pow(sites as u32)];
    for (x, &ax) in a.iter().enumerate() {
        if ax == 0.0 {
            continue;
        }
        let mut st = base.clone();
        st.factors[x] = &s.sminus * &st.factors[x];
        for (o, v) in out.iter_mut().zip(st.to_vector()) {
            *o += v * ax;
        }
    }
    out
}

/// Energy claimed for `psi_e(z)`: `1 - 1/delta - |B|/2`.
pub fn psi_e_claimed_energy(spec: &ModelSpec) -> f64 {
    1.0 - 1.0 / spec.params.delta - 0.5 * norm3(spec.b())
}

/// `psi_e(z)` for a spin-1/2 kink chain with transverse field, together
/// with its relative residual `|(H - E) v| / |v|` at the claimed energy `E`.
pub fn psi_e_state(spec: &ModelSpec) -> Result<(Vec<C64>, f64)> {
    if spec.bc != BoundaryCondition::PlusMinus {
        return Err(Error::Unsupported("psi_e is built on kink chains".into()));
    }
    let (b, y) = transverse_field(spec)?;
    let bare = ModelSpec::new(spec.sites, spec.params, BoundaryCondition::PlusMinus)?;
    let (_, a) = first_excited_one_flip(&bare)?;
    let z = select_ground_z(b, y, spec.params.q)?.ground;
    let v = psi_e_vector(&spec.params, spec.sites, z, &a);
    let h = spec.hamiltonian()?;
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let r = crate::solver::residual_norm(&h, &v, psi_e_claimed_energy(spec)) / n;
    Ok((v, r))
}
