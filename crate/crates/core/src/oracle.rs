//! Brute-force ground truth on small spaces.
//!
//! Subsets are bitmasks: bit `i` set means point `i` is present.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{JKernelMatrix, DEFAULT_TOL};
use crate::linalg::{self, CMatrix};
use crate::moments::{CumulantSeries, TestFunction, MAX_ORDER};
use crate::space::SplitSpace;

pub const MAX_POINTS: usize = 20;

/// Tolerance on `Σ p = 1` for atom lists.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ConfigurationDistribution {
    space: SplitSpace,
    probabilities: Vec<f64>,
}

impl ConfigurationDistribution {
    pub fn space(&self) -> &SplitSpace {
        &self.space
    }

    /// Indexed by subset mask.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, mask: u32) -> f64 {
        self.probabilities[mask as usize]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn min_probability(&self) -> f64 {
        self.probabilities.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_POINTS {
        return Err(Error::SpaceTooLarge { n, max: MAX_POINTS });
    }
    Ok(())
}

/// `p(S) = (−1)^{|S̄|} det(K − I_{S̄})` for every mask, by LU on copies.
fn probabilities_of_matrix(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let count = 1usize << n;
    if linalg::is_real(m) {
        let r = linalg::real_part(m);
        (0..count)
            .into_par_iter()
            .map(|mask| {
                let mut a = r.clone();
                let mut sign = 1.0;
                for i in (0..n).filter(|i| mask >> i & 1 == 0) {
                    a[(i, i)] -= 1.0;
                    sign = -sign;
                }
                sign * a.lu().determinant()
            })
            .collect()
    } else {
        (0..count)
            .into_par_iter()
            .map(|mask| {
                let mut a = m.clone();
                let mut sign = 1.0;
                for i in (0..n).filter(|i| mask >> i & 1 == 0) {
                    a[(i, i)] -= Complex64::new(1.0, 0.0);
                    sign = -sign;
                }
                sign * a.lu().determinant().re
            })
            .collect()
    }
}

/// Full law of the process with correlation kernel `K` (on `L²(μ)`).
pub fn subset_probabilities(kernel: &JKernelMatrix) -> Result<ConfigurationDistribution> {
    check_size(kernel.len())?;
    Ok(ConfigurationDistribution {
        space: kernel.space().clone(),
        probabilities: probabilities_of_matrix(kernel.effective().entries()),
    })
}

/// `det K[S]` on the stored pointwise values.
pub fn correlation(kernel: &JKernelMatrix, subset: &[usize]) -> Result<f64> {
    let k = kernel.entries();
    if let Some(&bad) = subset.iter().find(|&&i| i >= k.nrows()) {
        return Err(Error::DimensionMismatch(format!("point {bad} outside the space")));
    }
    if subset.is_empty() {
        return Ok(1.0);
    }
    let minor = CMatrix::from_fn(subset.len(), subset.len(), |a, b| k[(subset[a], subset[b])]);
    Ok(minor.lu().determinant().re)
}

/// Bits of the points on side 2.
pub fn side_two_mask(space: &SplitSpace) -> u32 {
    ((1u64 << space.len()) - (1u64 << space.n1())) as u32
}

/// `ξ ↦ (ξ ∩ X₁) ∪ (X₂ ∖ ξ)`.
pub fn particle_hole_map(mask: u32, space: &SplitSpace) -> u32 {
    mask ^ side_two_mask(space)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    pub max_deviation: f64,
    pub passes: bool,
}

/// `max_S |p_K(S) − p_{K̂}(φ(S))|` with `φ` the particle-hole map and `K̂`
/// used as a Hermitian correlation kernel.
pub fn duality_check(kernel: &JKernelMatrix, tol: f64) -> Result<DualityReport> {
    check_size(kernel.len())?;
    let report = kernel.validity_check(DEFAULT_TOL)?;
    if !report.is_valid {
        return Err(Error::InvalidKernel {
            min: report.min_eigenvalue,
            max: report.max_eigenvalue,
        });
    }
    let effective = kernel.effective();
    let direct = probabilities_of_matrix(effective.entries());
    let dual = probabilities_of_matrix(effective.hat_transform()?.entries());
    let space = kernel.space();
    let max_deviation = direct
        .iter()
        .enumerate()
        .map(|(mask, p)| (p - dual[particle_hole_map(mask as u32, space) as usize]).abs())
        .fold(0.0, f64::max);
    Ok(DualityReport {
        max_deviation,
        passes: max_deviation <= tol,
    })
}

/// Atoms `(value, probability)` of `S_f`, sorted by value. Equal values are
/// merged, summing probabilities in mask order.
pub fn exact_statistic_distribution(
    dist: &ConfigurationDistribution,
    f: &TestFunction,
) -> Result<Vec<(f64, f64)>> {
    let n = dist.space.len();
    if f.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "test function of length {} on a space of {n} points",
            f.len()
        )));
    }
    let mut pairs: Vec<(f64, f64)> = dist
        .probabilities
        .iter()
        .enumerate()
        .map(|(mask, &p)| (f.statistic((0..n).filter(|i| mask >> i & 1 == 1)), p))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (v, p) in pairs {
        match atoms.last_mut() {
            Some(last) if last.0 == v => last.1 += p,
            _ => atoms.push((v, p)),
        }
    }
    Ok(atoms)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Cumulants from moments by `C_n = m_n − Σ_{k<n} binom(n−1, k−1) C_k m_{n−k}`.
///
/// The recursion runs on moments about the mean; only `C₁` depends on the
/// shift.
pub fn exact_cumulants(atoms: &[(f64, f64)], nmax: usize) -> Result<CumulantSeries> {
    if nmax == 0 || nmax > MAX_ORDER {
        return Err(Error::OrderOutOfRange(nmax));
    }
    if atoms.is_empty() || atoms.iter().any(|(v, p)| !v.is_finite() || !p.is_finite()) {
        return Err(Error::MalformedDistribution("empty or non-finite atoms".into()));
    }
    let mass: f64 = atoms.iter().map(|a| a.1).sum();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::MalformedDistribution(format!("total mass {mass}")));
    }
    let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
    let moments: Vec<f64> = (0..=nmax)
        .map(|k| atoms.iter().map(|(v, p)| p * (v - mean).powi(k as i32)).sum())
        .collect();
    let mut cs = vec![0.0; nmax + 1];
    for n in 1..=nmax {
        let mut c = moments[n];
        for k in 1..n {
            c -= binomial(n - 1, k - 1) * cs[k] * moments[n - k];
        }
        cs[n] = c;
    }
    cs[1] = mean;
    Ok(CumulantSeries::new(cs[1..].to_vec()))
}
