//! Spin-j operator matrices, ladder weights and the anisotropy parameters.
//!
//! Local basis vectors are ordered by descending magnetic quantum number:
//! index `k` carries `m = j - k`, so index 0 is spin-up.
//! Half-integers are carried as doubled integers (`two_j`, `two_m`)
//! to keep sector bookkeeping exact.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense single-site (or few-site) operator.
pub type LocalOperator = DMatrix<C64>;

/// Largest `2j` for which binomials are formed by exact integer products.
const DIRECT_BINOMIAL_MAX: u32 = 60;

/// A positive half-integer spin, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { two_j: 1 };
    pub const ONE: Spin = Spin { two_j: 2 };

    pub fn from_twice(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Spin { two_j })
    }

    /// Parses `j` given as a float, e.g. `0.5`, `1`, `1.5`.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(j));
        }
        Spin::from_twice(twice.round() as u32)
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn value(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Local Hilbert-space dimension `2j + 1`.
    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Doubled magnetic number of local basis index `k`.
    pub fn two_m_of_index(self, k: usize) -> i32 {
        self.two_j as i32 - 2 * k as i32
    }

    pub fn m_of_index(self, k: usize) -> f64 {
        self.two_m_of_index(k) as f64 / 2.0
    }

    pub fn index_of_two_m(self, two_m: i32) -> Result<usize> {
        self.check_two_m(two_m)?;
        Ok(((self.two_j as i32 - two_m) / 2) as usize)
    }

    fn check_two_m(self, two_m: i32) -> Result<()> {
        let tj = self.two_j as i32;
        if two_m.abs() > tj || (tj - two_m) % 2 != 0 {
            return Err(Error::MagneticNumberOutOfRange {
                two_j: self.two_j,
                two_m,
            });
        }
        Ok(())
    }
}

/// Cartesian spin matrices plus the ladder operators, in the descending-m basis.
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub sx: LocalOperator,
    pub sy: LocalOperator,
    pub sz: LocalOperator,
    pub splus: LocalOperator,
    pub sminus: LocalOperator,
}

impl SpinMatrices {
    pub fn new(spin: Spin) -> Self {
        let d = spin.dim();
        let mut splus = DMatrix::<C64>::zeros(d, d);
        let mut sz = DMatrix::<C64>::zeros(d, d);
        for k in 0..d {
            let two_m = spin.two_m_of_index(k);
            sz[(k, k)] = C64::new(two_m as f64 / 2.0, 0.0);
            // S+ |m> = rho_m |m+1>, and |m+1> sits at index k-1.
            if k > 0 {
                splus[(k - 1, k)] = C64::new(rho_unchecked(spin, two_m), 0.0);
            }
        }
        let sminus = splus.adjoint();
        let half = C64::new(0.5, 0.0);
        let sx = (&splus + &sminus) * half;
        let sy = (&splus - &sminus) * C64::new(0.0, -0.5);
        SpinMatrices {
            sx,
            sy,
            sz,
            splus,
            sminus,
        }
    }

    /// `B1 S1 + B2 S2 + B3 S3`.
    pub fn dot(&self, b: [f64; 3]) -> LocalOperator {
        &self.sx * C64::from(b[0]) + &self.sy * C64::from(b[1]) + &self.sz * C64::from(b[2])
    }
}

pub fn spin_matrices(spin: Spin) -> SpinMatrices {
    SpinMatrices::new(spin)
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    if n <= DIRECT_BINOMIAL_MAX {
        let mut acc: u64 = 1;
        for i in 0..k as u64 {
            acc = acc * (n as u64 - i) / (i + 1);
        }
        acc as f64
    } else {
        let ln: f64 = (0..k)
            .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
            .sum();
        ln.exp()
    }
}

/// `w_m = sqrt(C(2j, m + j))`.
pub fn weight(spin: Spin, two_m: i32) -> Result<f64> {
    spin.check_two_m(two_m)?;
    Ok(weight_unchecked(spin, two_m))
}

/// Weight with the ladder-end convention `w = 0` outside `[-j, j]`.
pub fn weight_or_zero(spin: Spin, two_m: i32) -> f64 {
    match spin.check_two_m(two_m) {
        Ok(()) => weight_unchecked(spin, two_m),
        Err(_) => 0.0,
    }
}

fn weight_unchecked(spin: Spin, two_m: i32) -> f64 {
    let k = ((two_m + spin.two_j as i32) / 2) as u32;
    binomial(spin.two_j, k).sqrt()
}

/// `rho_n = sqrt(j(j+1) - n - n^2)`, the matrix element of `S+` from `|n>`.
pub fn rho(spin: Spin, two_n: i32) -> Result<f64> {
    spin.check_two_m(two_n)?;
    Ok(rho_unchecked(spin, two_n))
}

fn rho_unchecked(spin: Spin, two_n: i32) -> f64 {
    let j = spin.value();
    let n = two_n as f64 / 2.0;
    (j * (j + 1.0) - n - n * n).max(0.0).sqrt()
}

/// Residuals of the three ladder-weight identities at every `n` on the ladder:
///
/// * `rho_n w_{n+1}/2 + rho_{n-1} w_{n-1}/2 = j w_n`
/// * `rho_{n-1} w_{n-1} = (j + n) w_n`
/// * `-rho_n w_{n+1}/2 + rho_{n-1} w_{n-1}/2 = n w_n`
///
/// Returns the largest absolute residual of each identity.
pub fn ladder_identity_residuals(spin: Spin) -> [f64; 3] {
    let j = spin.value();
    let mut worst = [0.0f64; 3];
    for k in 0..spin.dim() {
        let two_n = spin.two_m_of_index(k);
        let n = two_n as f64 / 2.0;
        let up = rho_unchecked(spin, two_n) * weight_or_zero(spin, two_n + 2);
        // rho_{n-1} is evaluated even at n = -j, where w_{n-1} = 0 kills it.
        let down = rho_unchecked(spin, two_n - 2) * weight_or_zero(spin, two_n - 2);
        let w = weight_unchecked(spin, two_n);
        let r = [
            (0.5 * up + 0.5 * down - j * w).abs(),
            (down - (j + n) * w).abs(),
            (-0.5 * up + 0.5 * down - n * w).abs(),
        ];
        for (acc, v) in worst.iter_mut().zip(r) {
            *acc = acc.max(v);
        }
    }
    worst
}

/// Deformation parameter `q` and boundary-field magnitude `A` of an anisotropy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deformation {
    pub q: f64,
    pub a: f64,
}

/// `q = delta - sqrt(delta^2 - 1)` (the root of `q + 1/q = 2 delta` in (0,1)),
/// `A = sqrt(1 - delta^-2)`.
pub fn params_from_delta(delta: f64) -> Result<Deformation> {
    if !delta.is_finite() || delta <= 1.0 {
        return Err(Error::InvalidAnisotropy(delta));
    }
    // delta - sqrt(delta^2 - 1) cancels badly for large delta.
    let q = 1.0 / (delta + (delta * delta - 1.0).sqrt());
    let a = (1.0 - 1.0 / (delta * delta)).sqrt();
    Ok(Deformation { q, a })
}

/// Spin value together with the anisotropy and its derived constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinParams {
    pub spin: Spin,
    pub delta: f64,
    pub q: f64,
    pub a: f64,
}

impl SpinParams {
    pub fn new(spin: Spin, delta: f64) -> Result<Self> {
        let Deformation { q, a } = params_from_delta(delta)?;
        Ok(SpinParams { spin, delta, q, a })
    }

    pub fn j(&self) -> f64 {
        self.spin.value()
    }

    /// Boundary-field strength `jA`.
    pub fn boundary_strength(&self) -> f64 {
        self.j() * self.a
    }
}
