//! J-Hermitian kernel matrices, the hat transform
//! `K̂ = [[K₁₁, K₁₂], [K₁₂†, P₂ − K₂₂]]`, and the spectral existence check
//! `0 ≤ K̂ ≤ 1`.
//!
//! `K̂` is `J (KP₁ + (1 − K)P₂) J`; the conjugation by `J` changes no
//! eigenvalue and no principal minor.
//!
//! Kernels are stored as the pointwise values `K(x, y)`. The measure of the
//! underlying [`SplitSpace`] is not folded into the entries; operations that
//! need the operator on `L²(μ)` go through [`JKernelMatrix::effective`], which
//! returns the unitarily equivalent counting-measure kernel
//! `diag(√μ) K diag(√μ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::space::{Side, SplitSpace};

/// Default absolute tolerance for Hermiticity residuals and spectral bounds.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct JKernelMatrix {
    space: SplitSpace,
    entries: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JHermitianCheck {
    pub passes: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HatKernel {
    space: SplitSpace,
    entries: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub hermiticity_residual: f64,
    pub is_valid: bool,
    pub tolerance: f64,
}

fn check_shape(space: &SplitSpace, m: &CMatrix) -> Result<()> {
    let n = space.len();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on a space of {n} points",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Shared by both directions of the hat transform:
/// `[[A, B], [C, D]] ↦ [[A, B], [−C, I − D]]`, an involution.
fn complement_side_two(space: &SplitSpace, m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    for row in space.n1()..space.len() {
        for col in 0..space.len() {
            out[(row, col)] = -m[(row, col)];
        }
        out[(row, row)] = Complex64::new(1.0, 0.0) - m[(row, row)];
    }
    out
}

impl JKernelMatrix {
    /// Wraps `entries` after checking shape and finiteness. J-Hermiticity is
    /// not enforced here; see [`Self::check_j_hermitian`].
    pub fn new(space: SplitSpace, entries: CMatrix) -> Result<Self> {
        check_shape(&space, &entries)?;
        if !linalg::all_finite(&entries) {
            return Err(Error::NonFinite("kernel entries"));
        }
        Ok(Self { space, entries })
    }

    /// Builds `[[K₁₁, K₁₂], [−K₁₂†, K₂₂]]`.
    pub fn assemble_from_blocks(
        k11: &CMatrix,
        k12: &CMatrix,
        k22: &CMatrix,
        space: SplitSpace,
    ) -> Result<Self> {
        let (n1, n2) = (space.n1(), space.n2());
        let dims_ok = k11.shape() == (n1, n1) && k12.shape() == (n1, n2) && k22.shape() == (n2, n2);
        if !dims_ok {
            return Err(Error::DimensionMismatch(format!(
                "blocks {:?}, {:?}, {:?} for split ({n1}, {n2})",
                k11.shape(),
                k12.shape(),
                k22.shape()
            )));
        }
        for (what, block) in [("K11", k11), ("K22", k22)] {
            let residual = linalg::hermitian_residual(block);
            if residual > DEFAULT_TOL {
                return Err(Error::NotHermitian { what, residual });
            }
        }
        let n = n1 + n2;
        let mut entries = CMatrix::zeros(n, n);
        entries.view_mut((0, 0), (n1, n1)).copy_from(k11);
        entries.view_mut((0, n1), (n1, n2)).copy_from(k12);
        entries.view_mut((n1, 0), (n2, n1)).copy_from(&(-k12.adjoint()));
        entries.view_mut((n1, n1), (n2, n2)).copy_from(k22);
        Self::new(space, entries)
    }

    pub fn space(&self) -> &SplitSpace {
        &self.space
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_parts(self) -> (SplitSpace, CMatrix) {
        (self.space, self.entries)
    }

    /// Real parts of `K(x, x)`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// Residual is the largest violation of `K₁₁ = K₁₁†`, `K₂₂ = K₂₂†`,
    /// `K₂₁ = −K₁₂†`.
    pub fn check_j_hermitian(&self, tol: f64) -> JHermitianCheck {
        let n = self.len();
        let mut residual = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                let sign = self.space.j_sign(i) * self.space.j_sign(j);
                let expected = self.entries[(j, i)].conj() * sign;
                residual = residual.max((self.entries[(i, j)] - expected).norm());
            }
        }
        JHermitianCheck {
            passes: residual <= tol,
            residual,
        }
    }

    fn require_j_hermitian(&self) -> Result<()> {
        let check = self.check_j_hermitian(DEFAULT_TOL);
        if check.passes {
            Ok(())
        } else {
            Err(Error::NotJHermitian {
                residual: check.residual,
            })
        }
    }

    pub fn hat_transform(&self) -> Result<HatKernel> {
        self.require_j_hermitian()?;
        Ok(HatKernel {
            space: self.space.clone(),
            entries: complement_side_two(&self.space, &self.entries),
        })
    }

    /// The counting-measure kernel `diag(√μ) K diag(√μ)`; it defines the same
    /// point process as `K` with respect to `μ`.
    pub fn effective(&self) -> JKernelMatrix {
        if self.space.is_counting() {
            return self.clone();
        }
        let root: Vec<f64> = self.space.weights().iter().map(|w| w.sqrt()).collect();
        let entries = CMatrix::from_fn(self.len(), self.len(), |i, j| {
            self.entries[(i, j)] * (root[i] * root[j])
        });
        JKernelMatrix {
            space: self.space.to_counting(),
            entries,
        }
    }

    /// Extreme eigenvalues of `K̂` (of the operator on `L²(μ)`).
    pub fn validity_check(&self, tol: f64) -> Result<ValidityReport> {
        let hat = self.effective().hat_transform()?;
        Ok(hat.validity(tol))
    }

    /// Conjugation by a permutation that maps each side onto itself.
    /// `perm[new] = old`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        for (new, &old) in perm.iter().enumerate() {
            if old >= n || seen[old] || self.space.side(old) != self.space.side(new) {
                return Err(Error::DimensionMismatch(
                    "permutation must preserve sides".into(),
                ));
            }
            seen[old] = true;
        }
        if perm.len() != n {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let weights = perm.iter().map(|&o| self.space.weights()[o]).collect();
        let space = SplitSpace::new(self.space.n1(), self.space.n2(), weights)?;
        let entries = CMatrix::from_fn(n, n, |i, j| self.entries[(perm[i], perm[j])]);
        Self::new(space, entries)
    }
}

impl HatKernel {
    pub fn new(space: SplitSpace, entries: CMatrix) -> Result<Self> {
        check_shape(&space, &entries)?;
        if !linalg::all_finite(&entries) {
            return Err(Error::NonFinite("hat kernel entries"));
        }
        let residual = linalg::hermitian_residual(&entries);
        if residual > DEFAULT_TOL {
            return Err(Error::NotHermitian {
                what: "hat kernel",
                residual,
            });
        }
        Ok(Self { space, entries })
    }

    pub fn space(&self) -> &SplitSpace {
        &self.space
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Inverse of [`JKernelMatrix::hat_transform`] (the same involution).
    pub fn unhat_transform(&self) -> JKernelMatrix {
        JKernelMatrix {
            space: self.space.clone(),
            entries: complement_side_two(&self.space, &self.entries),
        }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermitian_residual(&self.entries)
    }

    /// Spectral bounds of the Hermitized matrix `(K̂ + K̂†)/2`.
    pub fn validity(&self, tol: f64) -> ValidityReport {
        let residual = self.hermiticity_residual();
        let values = linalg::hermitian_eigenvalues(&linalg::hermitize(&self.entries));
        let min_eigenvalue = values[0];
        let max_eigenvalue = values[values.len() - 1];
        ValidityReport {
            min_eigenvalue,
            max_eigenvalue,
            hermiticity_residual: residual,
            is_valid: min_eigenvalue >= -tol
                && max_eigenvalue <= 1.0 + tol
                && residual <= tol,
            tolerance: tol,
        }
    }

    /// Points on a given side, used when the hat kernel is read as an
    /// ordinary Hermitian correlation kernel.
    pub fn side(&self, point: usize) -> Side {
        self.space.side(point)
    }
}
