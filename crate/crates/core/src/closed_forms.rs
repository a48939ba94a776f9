//! Small-chain spin-1/2 spectra in closed form, with dense cross-checks.

use crate::analytic::kink_gap_law;
use crate::error::{Error, Result};
use crate::model::{norm3, BoundaryCondition, ModelSpec};
use crate::solver::dense_spectrum;
use crate::spin::{params_from_delta, Spin};

fn sorted4(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(f64::total_cmp);
    v
}

/// Spectrum of the two-site spin-1/2 kink chain with field `b` on site 1.
pub fn two_site_kink_spectrum(b: [f64; 3], delta: f64) -> Result<[f64; 4]> {
    let a = params_from_delta(delta)?.a;
    let n = norm3(b);
    let s = (1.0 + n * n - 2.0 * b[2] * a).sqrt();
    Ok(sorted4([-0.5 * n, 0.5 * n, 0.5 * (1.0 - s), 0.5 * (1.0 + s)]))
}

/// Gap of the two-site kink chain: `1/2 - sqrt(1 + |B|^2 - 2 B3 A)/2 + |B|/2`.
pub fn g2_kink(b: [f64; 3], delta: f64) -> Result<f64> {
    let a = params_from_delta(delta)?.a;
    let n = norm3(b);
    Ok(0.5 - 0.5 * (1.0 + n * n - 2.0 * b[2] * a).sqrt() + 0.5 * n)
}

/// Spectrum of the two-site spin-1/2 droplet chain with field `b` on site 1.
pub fn two_site_droplet_spectrum(b: [f64; 3], delta: f64) -> Result<[f64; 4]> {
    let a = params_from_delta(delta)?.a;
    let n = norm3(b);
    let shifted = norm3([b[0], b[1], b[2] - a]);
    let s = (1.0 + n * n - a * a).sqrt();
    Ok(sorted4([
        0.5 * (a - shifted),
        0.5 * (a + shifted),
        0.5 * (1.0 + a - s),
        0.5 * (1.0 + a + s),
    ]))
}

/// Gap of the two-site droplet chain,
/// `(1 - sqrt(1 + |B|^2 - A^2) + |(B1, B2, B3 - A)|) / 2`.
pub fn g2_droplet(b: [f64; 3], delta: f64) -> Result<f64> {
    let a = params_from_delta(delta)?.a;
    let n = norm3(b);
    Ok(0.5 * (1.0 - (1.0 + n * n - a * a).sqrt() + norm3([b[0], b[1], b[2] - a])))
}

/// The eight eigenvalues `e1..e8` of the three-site spin-1/2 droplet chain
/// with axial field `B` on the middle site, in that order.
pub fn three_site_spectrum(b: f64, delta: f64) -> Result<[f64; 8]> {
    let a = params_from_delta(delta)?.a;
    let c = 1.0 / (2.0 * delta * delta);
    let lo = (a - 1.0 + 2.0 * b) / 4.0;
    let hi = (1.0 + a + 2.0 * b) / 4.0;
    let r_lo = (lo * lo + c).sqrt();
    let r_hi = (hi * hi + c).sqrt();
    Ok([
        b / 2.0,
        a - b / 2.0,
        (1.0 + a + b) / 2.0,
        (1.0 + a - b) / 2.0,
        (3.0 + a) / 4.0 - r_lo,
        (3.0 + a) / 4.0 + r_lo,
        (3.0 + 3.0 * a) / 4.0 - r_hi,
        (3.0 + 3.0 * a) / 4.0 + r_hi,
    ])
}

/// Gap `e5 - e1` of the three-site droplet chain for `B <= A`.
pub fn g3_droplet(b: f64, delta: f64) -> Result<f64> {
    let a = params_from_delta(delta)?.a;
    if b > a {
        return Err(Error::InvalidArgument(format!(
            "three-site droplet gap needs B <= A = {a}"
        )));
    }
    let e = three_site_spectrum(b, delta)?;
    Ok(e[4] - e[0])
}

fn dense_eigenvalues(spec: &ModelSpec) -> Result<Vec<f64>> {
    let h = spec.hamiltonian()?.to_dense(1 << 12)?;
    Ok(dense_spectrum(&h, 1 << 12, false)?.eigenvalues)
}

fn compare(name: &'static str, closed: &[f64], numeric: &[f64], tol: f64) -> Result<f64> {
    let mut c = closed.to_vec();
    c.sort_by(f64::total_cmp);
    let diff = c
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if c.len() != numeric.len() || diff > tol {
        let i = c
            .iter()
            .zip(numeric)
            .position(|(a, b)| (a - b).abs() == diff)
            .unwrap_or(0);
        return Err(Error::ClosedFormMismatch {
            name,
            closed: c.get(i).copied().unwrap_or(f64::NAN),
            numeric: numeric.get(i).copied().unwrap_or(f64::NAN),
            diff,
        });
    }
    Ok(diff)
}

fn half_chain(sites: usize, delta: f64, bc: BoundaryCondition, b: [f64; 3], y: usize) -> Result<ModelSpec> {
    ModelSpec::chain(sites, Spin::HALF, delta, bc)?.with_field(b, y)
}

/// Largest deviation of the two-site kink closed forms from dense
/// diagonalization; fails with `ClosedFormMismatch` above `tol`.
pub fn check_two_site_kink(b: [f64; 3], delta: f64, tol: f64) -> Result<f64> {
    let ev = dense_eigenvalues(&half_chain(2, delta, BoundaryCondition::PlusMinus, b, 1)?)?;
    let d = compare("two-site kink spectrum", &two_site_kink_spectrum(b, delta)?, &ev, tol)?;
    let g = compare("g2 kink", &[g2_kink(b, delta)?], &[ev[1] - ev[0]], tol)?;
    Ok(d.max(g))
}

pub fn check_two_site_droplet(b: [f64; 3], delta: f64, tol: f64) -> Result<f64> {
    let ev = dense_eigenvalues(&half_chain(2, delta, BoundaryCondition::PlusPlus, b, 1)?)?;
    let d = compare("two-site droplet spectrum", &two_site_droplet_spectrum(b, delta)?, &ev, tol)?;
    let g = compare("g2 droplet", &[g2_droplet(b, delta)?], &[ev[1] - ev[0]], tol)?;
    Ok(d.max(g))
}

pub fn check_three_site(b: f64, delta: f64, tol: f64) -> Result<f64> {
    let ev = dense_eigenvalues(&half_chain(3, delta, BoundaryCondition::PlusPlus, [0.0, 0.0, b], 2)?)?;
    let d = compare("three-site droplet spectrum", &three_site_spectrum(b, delta)?, &ev, tol)?;
    let a = params_from_delta(delta)?.a;
    if b <= a {
        let g = compare("g3 droplet", &[g3_droplet(b, delta)?], &[ev[1] - ev[0]], tol)?;
        return Ok(d.max(g));
    }
    Ok(d)
}

/// Deviation of the zero-field spin-1/2 kink gap from `1 - cos(pi/b)/delta`.
pub fn check_kink_gap_law(sites: usize, delta: f64, tol: f64) -> Result<f64> {
    let spec = ModelSpec::chain(sites, Spin::HALF, delta, BoundaryCondition::PlusMinus)?;
    let ev = dense_eigenvalues(&spec)?;
    // The zero-field kink ground space is the (b+1)-fold sector family.
    let gap = ev[sites + 1] - ev[0];
    compare("kink gap law", &[kink_gap_law(sites, delta)], &[gap], tol)
}
