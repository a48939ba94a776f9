//! Cross-module identity suites: each check compares two independent
//! computations and reports the residual against a fixed tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{
    antikink_product_state, antikink_state, droplet_state, kink_product_state, kink_state,
    sector_kink_state, select_ground_z, select_ground_z_tilde, verify_field_eigenfactor, Branch,
};
use crate::closed_forms::{check_kink_gap_law, check_three_site, check_two_site_droplet, check_two_site_kink};
use crate::error::{Error, Result};
use crate::model::{decomposition_residual, norm3, spin_flip_residual, BoundaryCondition, ModelSpec};
use crate::solver::residual_norm;
use crate::spin::{ladder_identity_residuals, Spin, SpinParams, C64};

const SEED: u64 = 0x7665_7269_6679;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    AppendixA,
    Decomp,
    Eigenstates,
    AppendixB,
    Superposition,
    SpinFlip,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::AppendixA,
        Suite::Decomp,
        Suite::Eigenstates,
        Suite::AppendixB,
        Suite::Superposition,
        Suite::SpinFlip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::AppendixA => "appendixA",
            Suite::Decomp => "decomp",
            Suite::Eigenstates => "eigenstates",
            Suite::AppendixB => "appendixB",
            Suite::Superposition => "superposition",
            Suite::SpinFlip => "spinflip",
        }
    }

    /// Parses a suite name; `all` expands to every suite.
    pub fn parse(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .map(|&x| vec![x])
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    fn failed(suite: Suite, name: impl Into<String>, err: &Error) -> Self {
        Check {
            suite,
            name: format!("{}: {err}", name.into()),
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// One line per check: suite, name, residual, tolerance, PASS/FAIL.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<14} {:<52} {:>10.3e} {:>9.1e} {}\n",
                c.suite.name(),
                c.name,
                c.residual,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            self.failures()
        ));
        out
    }
}

/// Runs the selected suites; `quick` uses fewer random instances and
/// shorter chains.
pub fn run(suites: &[Suite], quick: bool) -> Report {
    let mut report = Report::default();
    for &s in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ s as u64);
        let checks = match s {
            Suite::AppendixA => appendix_a(),
            Suite::Decomp => decomp(&mut rng, quick),
            Suite::Eigenstates => eigenstates(&mut rng, quick),
            Suite::AppendixB => appendix_b(&mut rng, quick),
            Suite::Superposition => superposition(&mut rng, quick),
            Suite::SpinFlip => spin_flip(&mut rng, quick),
        };
        report.checks.extend(checks);
    }
    report
}

fn collect(suite: Suite, name: String, r: Result<f64>, tol: f64) -> Check {
    match r {
        Ok(v) => Check::new(suite, name, v, tol),
        Err(e) => Check::failed(suite, name, &e),
    }
}

fn random_transverse(rng: &mut ChaCha8Rng, scale: f64) -> [f64; 3] {
    loop {
        let b: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if b[0] * b[0] + b[1] * b[1] > 0.01 {
            let s = rng.gen_range(0.1..scale) / norm3(b);
            return b.map(|c| c * s);
        }
    }
}

fn random_spin(rng: &mut ChaCha8Rng, max_two_j: u32) -> Spin {
    Spin::from_twice(rng.gen_range(1..=max_two_j)).expect("positive two_j")
}

fn appendix_a() -> Vec<Check> {
    let mut out = Vec::new();
    for two_j in 1..=5 {
        let spin = Spin::from_twice(two_j).expect("positive two_j");
        let r = ladder_identity_residuals(spin);
        for (i, v) in r.iter().enumerate() {
            out.push(Check::new(
                Suite::AppendixA,
                format!("ladder identity {} at 2j={two_j}", i + 1),
                *v,
                1e-12,
            ));
        }
    }
    out
}

fn decomp(rng: &mut ChaCha8Rng, quick: bool) -> Vec<Check> {
    let n = if quick { 5 } else { 20 };
    (0..n)
        .map(|_| {
            let spin = random_spin(rng, 2);
            let sites = rng.gen_range(3..=if spin == Spin::HALF { 8 } else { 5 });
            let delta = rng.gen_range(1.2..5.0);
            let y = rng.gen_range(2..sites);
            let b = random_transverse(rng, 2.0);
            let name = format!("droplet split 2j={} b={sites} y={y}", spin.two_j());
            let r = ModelSpec::chain(sites, spin, delta, BoundaryCondition::PlusPlus)
                .and_then(|s| s.with_field(b, y))
                .and_then(|s| decomposition_residual(&s));
            collect(Suite::Decomp, name, r, 1e-12)
        })
        .collect()
}

fn state_residual(spec: &ModelSpec, v: &[C64], e: f64) -> Result<f64> {
    let h = spec.hamiltonian()?;
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok(residual_norm(&h, v, e) / n)
}

fn eigenstates(rng: &mut ChaCha8Rng, quick: bool) -> Vec<Check> {
    let n = if quick { 6 } else { 25 };
    let mut out = Vec::new();
    for _ in 0..n {
        let spin = random_spin(rng, 3);
        let max_sites = match spin.two_j() {
            1 => 8,
            2 => 5,
            _ => 4,
        };
        let sites = rng.gen_range(3..=max_sites);
        let delta = rng.gen_range(1.5..4.0);
        let y = rng.gen_range(1..=sites);
        let b = random_transverse(rng, 2.5);
        let p = match SpinParams::new(spin, delta) {
            Ok(p) => p,
            Err(e) => {
                out.push(Check::failed(Suite::Eigenstates, "parameters", &e));
                continue;
            }
        };
        for branch in [Branch::Ground, Branch::Excited] {
            out.push(collect(
                Suite::Eigenstates,
                format!("field factor {branch:?} 2j={} y={y}", spin.two_j()),
                select_ground_z(b, y, p.q).map(|z| {
                    let z = if branch == Branch::Ground { z.ground } else { z.excited };
                    verify_field_eigenfactor(&p, b, y, z, branch) / (1.0 + norm3(b))
                }),
                1e-12,
            ));
        }
        for (bc, label) in [
            (BoundaryCondition::PlusMinus, "kink"),
            (BoundaryCondition::MinusPlus, "antikink"),
            (BoundaryCondition::PlusPlus, "droplet"),
        ] {
            for branch in [Branch::Ground, Branch::Excited] {
                let r = ModelSpec::new(sites, p, bc)
                    .and_then(|s| s.with_field(b, y))
                    .and_then(|s| {
                        let st = match bc {
                            BoundaryCondition::PlusMinus => kink_state(&s, branch)?,
                            BoundaryCondition::MinusPlus => antikink_state(&s, branch)?,
                            _ => droplet_state(&s, branch)?,
                        };
                        state_residual(&s, &st.state.to_vector(), st.energy)
                    });
                out.push(collect(
                    Suite::Eigenstates,
                    format!("{label} {branch:?} 2j={} b={sites} y={y}", spin.two_j()),
                    r,
                    1e-10,
                ));
            }
        }
    }
    out
}

fn appendix_b(rng: &mut ChaCha8Rng, quick: bool) -> Vec<Check> {
    let n = if quick { 5 } else { 20 };
    let mut out = Vec::new();
    for _ in 0..n {
        let delta = rng.gen_range(1.1..5.0);
        let b = random_transverse(rng, 2.0);
        out.push(collect(
            Suite::AppendixB,
            format!("two-site kink delta={delta:.3}"),
            check_two_site_kink(b, delta, 1e-10),
            1e-10,
        ));
        out.push(collect(
            Suite::AppendixB,
            format!("two-site droplet delta={delta:.3}"),
            check_two_site_droplet(b, delta, 1e-10),
            1e-10,
        ));
        let bz = rng.gen_range(-1.5..1.5);
        out.push(collect(
            Suite::AppendixB,
            format!("three-site droplet delta={delta:.3} B={bz:.3}"),
            check_three_site(bz, delta, 1e-10),
            1e-10,
        ));
    }
    let sites: &[usize] = if quick { &[6, 8] } else { &[6, 7, 8, 9, 10] };
    for &b in sites {
        out.push(collect(
            Suite::AppendixB,
            format!("zero-field kink gap b={b}"),
            check_kink_gap_law(b, 2.25, 1e-8),
            1e-8,
        ));
    }
    out
}

/// Largest componentwise difference of `a` and `b` after removing the
/// global phase of `a` relative to `b`.
fn phase_aligned_diff(a: &[C64], b: &[C64]) -> f64 {
    let ov: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * ph - y).norm())
        .fold(0.0, f64::max)
}

/// `psi(z)` rebuilt as `sum_n z^n psi_(jb - n)` from the sector states.
fn superposed(p: &SpinParams, sites: usize, z: C64) -> Result<Vec<C64>> {
    let spin = p.spin;
    let dim = spin.dim().pow(sites as u32);
    let top = (spin.two_j() as usize * sites) as i32;
    let ln_z = z.ln();
    let mut parts = Vec::new();
    for n in 0..=spin.two_j() as usize * sites {
        let s = sector_kink_state(p, sites, top - 2 * n as i32)?;
        let log = ln_z * n as f64 + s.log_norm;
        parts.push((log, s));
    }
    let peak = parts.iter().map(|(l, _)| l.re).fold(f64::NEG_INFINITY, f64::max);
    let mut v = vec![C64::new(0.0, 0.0); dim];
    for (log, s) in &parts {
        let c = (log - peak).exp();
        for (a, &i) in s.amplitudes.iter().zip(s.basis.states()) {
            v[i as usize] += c * a;
        }
    }
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok(v.into_iter().map(|c| c / n).collect())
}

fn superposition(rng: &mut ChaCha8Rng, quick: bool) -> Vec<Check> {
    let n = if quick { 5 } else { 20 };
    let mut out = Vec::new();
    for _ in 0..n {
        let spin = random_spin(rng, 3);
        let sites = rng.gen_range(2..=if spin == Spin::HALF { 7 } else { 4 });
        let delta = rng.gen_range(1.2..4.0);
        let p = match SpinParams::new(spin, delta) {
            Ok(p) => p,
            Err(e) => {
                out.push(Check::failed(Suite::Superposition, "parameters", &e));
                continue;
            }
        };
        let z = C64::from_polar(rng.gen_range(0.01..3.0) * p.q.powi(sites as i32 / 2), rng.gen_range(-3.0..3.0));
        let direct = kink_product_state(&p, sites, z).to_vector();
        out.push(collect(
            Suite::Superposition,
            format!("sector sum 2j={} b={sites}", spin.two_j()),
            superposed(&p, sites, z).map(|v| phase_aligned_diff(&v, &direct)),
            1e-12,
        ));
        // Flipping the kink built for (B1, -B2, -B3) gives the antikink at z~(B).
        let b = random_transverse(rng, 2.0);
        let y = rng.gen_range(1..=sites);
        let r = (|| -> Result<f64> {
            let zk = select_ground_z([b[0], -b[1], -b[2]], y, p.q)?.ground;
            let zt = select_ground_z_tilde(b, y, p.q)?.ground;
            let flipped: Vec<C64> = {
                let k = kink_product_state(&p, sites, zk);
                let rev = crate::analytic::ProductState::new(
                    k.factors
                        .iter()
                        .map(|f| nalgebra::DVector::from_fn(f.len(), |i, _| f[f.len() - 1 - i]))
                        .collect(),
                );
                rev.to_vector()
            };
            Ok(phase_aligned_diff(&flipped, &antikink_product_state(&p, sites, zt).to_vector()))
        })();
        out.push(collect(
            Suite::Superposition,
            format!("antikink by flip 2j={} b={sites}", spin.two_j()),
            r,
            1e-12,
        ));
    }
    out
}

fn spin_flip(rng: &mut ChaCha8Rng, quick: bool) -> Vec<Check> {
    let n = if quick { 4 } else { 12 };
    (0..n)
        .map(|_| {
            let spin = random_spin(rng, 2);
            let sites = rng.gen_range(2..=if spin == Spin::HALF { 7 } else { 4 });
            let delta = rng.gen_range(1.2..4.0);
            let b = random_transverse(rng, 2.0);
            let y = rng.gen_range(1..=sites);
            let r = ModelSpec::chain(sites, spin, delta, BoundaryCondition::PlusPlus)
                .and_then(|s| s.with_field(b, y))
                .and_then(|s| spin_flip_residual(&s));
            collect(
                Suite::SpinFlip,
                format!("droplet to antidroplet 2j={} b={sites}", spin.two_j()),
                r,
                1e-12,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let r = run(&Suite::ALL, true);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()).unwrap(), vec![s]);
        }
        assert_eq!(Suite::parse("all").unwrap().len(), 6);
        assert!(Suite::parse("nope").is_err());
    }
}
