//! Translation-invariant J-Hermitian kernels on the discrete torus
//! `Z_N ⊔ Z_N`.
//!
//! A kernel is described by three functions on the torus,
//!
//! ```text
//! K(x₁, y₁) = F(x − y)      K(x₁, y₂) = G(x − y)
//! K(x₂, y₁) = −conj G(y − x) K(x₂, y₂) = H(x − y)
//! ```
//!
//! and, in frequency space, by `(F̂, Ĥ, Ĝ)`. With lattice spacing `h` the
//! point measure is `h` and `F(jh) = (1/(Nh)) Σ_k F̂(k) e^{2πijk/N}`, so the
//! integral operator of each block acts on the `k`-th Fourier mode as
//! multiplication by the corresponding hat value. Consequently `K̂` is
//! unitarily equivalent to the direct sum over `k` of the 2×2 matrices
//!
//! ```text
//! M₁(k) = [[F̂(k), Ĝ(k)], [conj Ĝ(k), 1 − Ĥ(k)]]
//! ```
//!
//! and the DPP exists iff every `M₁(k)` and `M₂(k) = I − M₁(k)` is
//! non-negative definite. On the torus this equivalence is exact; the
//! continuum statement for `ℝ^d` is only approached as `N` grows.
//!
//! Fourier convention: forward `v̂(k) = Σ_j v(j) e^{−2πijk/N}`, inverse
//! `v(j) = (1/N) Σ_k v̂(k) e^{+2πijk/N}`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernel::JKernelMatrix;
use crate::linalg::CMatrix;
use crate::space::SplitSpace;

pub fn dft(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    if !buf.is_empty() {
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
    }
    buf
}

pub fn idft(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    if !buf.is_empty() {
        FftPlanner::new()
            .plan_fft_inverse(buf.len())
            .process(&mut buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
    }
    buf
}

pub fn dft_real(v: &[f64]) -> Vec<Complex64> {
    dft(&v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
}

/// Index `k` of an `N`-point grid as a signed integer in `(−N/2, N/2]`.
pub fn signed_index(k: usize, n: usize) -> i64 {
    if 2 * k <= n {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Frequency-domain description of a translation-invariant J-Hermitian kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTriple {
    fhat: Vec<f64>,
    hhat: Vec<f64>,
    ghat: Vec<Complex64>,
    dim: usize,
}

impl SpectralTriple {
    pub fn new(fhat: Vec<f64>, hhat: Vec<f64>, ghat: Vec<Complex64>) -> Result<Self> {
        Self::with_dim(fhat, hhat, ghat, 1)
    }

    pub fn with_dim(
        fhat: Vec<f64>,
        hhat: Vec<f64>,
        ghat: Vec<Complex64>,
        dim: usize,
    ) -> Result<Self> {
        let n = fhat.len();
        if n == 0 || hhat.len() != n || ghat.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "spectral triple lengths {}, {}, {}",
                n,
                hhat.len(),
                ghat.len()
            )));
        }
        if dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        let finite = fhat.iter().chain(&hhat).all(|x| x.is_finite())
            && ghat.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::NonFinite("spectral triple"));
        }
        Ok(Self {
            fhat,
            hhat,
            ghat,
            dim,
        })
    }

    /// Same values at every frequency.
    pub fn constant(n: usize, f: f64, h: f64, g: Complex64) -> Result<Self> {
        Self::new(vec![f; n], vec![h; n], vec![g; n])
    }

    pub fn len(&self) -> usize {
        self.fhat.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fhat(&self) -> &[f64] {
        &self.fhat
    }

    pub fn hhat(&self) -> &[f64] {
        &self.hhat
    }

    pub fn ghat(&self) -> &[Complex64] {
        &self.ghat
    }

    /// `M₁(k)`.
    pub fn m1(&self, k: usize) -> Matrix2<Complex64> {
        let g = self.ghat[k];
        Matrix2::new(
            Complex64::new(self.fhat[k], 0.0),
            g,
            g.conj(),
            Complex64::new(1.0 - self.hhat[k], 0.0),
        )
    }

    /// True when `F̂`, `Ĥ` and `Ĝ` are invariant under `k ↦ −k` and `Ĝ` is
    /// real; then `F`, `G`, `H` are real and even and `M₁(k)` is real.
    pub fn is_real_even(&self) -> bool {
        let n = self.len();
        (0..n).all(|k| {
            let m = (n - k) % n;
            self.ghat[k].im == 0.0
                && self.fhat[k] == self.fhat[m]
                && self.hhat[k] == self.hhat[m]
                && self.ghat[k] == self.ghat[m]
        })
    }
}

/// Outcome of the per-frequency admissibility conditions
/// `0 ≤ F̂ ≤ 1`, `0 ≤ Ĥ ≤ 1`, `|Ĝ|² ≤ F̂(1 − Ĥ)`, `|Ĝ|² ≤ Ĥ(1 − F̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyValidity {
    /// One entry per frequency, conditions in the order above.
    pub conditions: Vec<[bool; 4]>,
    /// Most negative slack over all conditions and frequencies.
    pub worst_margin: f64,
    pub worst_frequency: usize,
    pub valid: bool,
    pub tolerance: f64,
}

impl FrequencyValidity {
    pub fn failing_frequencies(&self) -> Vec<usize> {
        self.conditions
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.iter().all(|&ok| ok))
            .map(|(k, _)| k)
            .collect()
    }
}

fn slacks(f: f64, h: f64, g: Complex64) -> [f64; 4] {
    let g2 = g.norm_sqr();
    [
        f.min(1.0 - f),
        h.min(1.0 - h),
        f * (1.0 - h) - g2,
        h * (1.0 - f) - g2,
    ]
}

pub fn check_prop2(s: &SpectralTriple, tol: f64) -> FrequencyValidity {
    let mut conditions = Vec::with_capacity(s.len());
    let mut worst_margin = f64::INFINITY;
    let mut worst_frequency = 0;
    for k in 0..s.len() {
        let sl = slacks(s.fhat[k], s.hhat[k], s.ghat[k]);
        conditions.push(sl.map(|x| x >= -tol));
        let m = sl.iter().copied().fold(f64::INFINITY, f64::min);
        if m < worst_margin {
            worst_margin = m;
            worst_frequency = k;
        }
    }
    let valid = conditions.iter().all(|c| c.iter().all(|&ok| ok));
    FrequencyValidity {
        conditions,
        worst_margin,
        worst_frequency,
        valid,
        tolerance: tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyBlock {
    pub m1: Matrix2<Complex64>,
    pub m2: Matrix2<Complex64>,
}

pub fn block_diagonalize(s: &SpectralTriple) -> Vec<FrequencyBlock> {
    (0..s.len())
        .map(|k| {
            let m1 = s.m1(k);
            FrequencyBlock {
                m1,
                m2: Matrix2::identity() - m1,
            }
        })
        .collect()
}

/// A 2×2 Hermitian matrix is non-negative definite iff its diagonal and
/// determinant are non-negative.
pub fn is_nonneg_definite(m: &Matrix2<Complex64>, tol: f64) -> bool {
    let det = m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr();
    m[(0, 0)].re >= -tol && m[(1, 1)].re >= -tol && det >= -tol
}

/// Closed-form eigenpairs of a Hermitian 2×2 matrix, ascending. Diagonal input
/// yields the standard basis exactly.
pub fn eigen2(m: &Matrix2<Complex64>) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let (a, d, z) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if z == zero {
        return if a <= d {
            ([a, d], [[one, zero], [zero, one]])
        } else {
            ([d, a], [[zero, one], [one, zero]])
        };
    }
    let half = 0.5 * (a - d);
    let r = half.hypot(z.norm());
    let mean = 0.5 * (a + d);
    let normalize = |v: [Complex64; 2]| {
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    let re = |x: f64| Complex64::new(x, 0.0);
    let (lo, hi) = if half >= 0.0 {
        (
            normalize([z, re(-(r + half))]),
            normalize([re(r + half), z.conj()]),
        )
    } else {
        (
            normalize([re(-(r - half)), z.conj()]),
            normalize([z, re(r - half)]),
        )
    };
    ([mean - r, mean + r], [lo, hi])
}

/// Real-space kernel functions `F`, `G`, `H` on an `N`-point torus with
/// lattice spacing `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationKernel {
    f: Vec<Complex64>,
    g: Vec<Complex64>,
    h: Vec<Complex64>,
    spacing: f64,
}

impl TranslationKernel {
    pub fn new(
        f: Vec<Complex64>,
        g: Vec<Complex64>,
        h: Vec<Complex64>,
        spacing: f64,
    ) -> Result<Self> {
        let n = f.len();
        if n == 0 || g.len() != n || h.len() != n {
            return Err(Error::DimensionMismatch("kernel function lengths".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Config(format!("grid spacing {spacing}")));
        }
        for (what, v) in [("F", &f), ("H", &h)] {
            let scale = v.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let residual = (0..n)
                .map(|t| (v[t] - v[(n - t) % n].conj()).norm())
                .fold(0.0, f64::max);
            if residual > 1e-9 * scale {
                return Err(Error::NotHermitian { what, residual });
            }
        }
        Ok(Self { f, g, h, spacing })
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn f(&self) -> &[Complex64] {
        &self.f
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn h(&self) -> &[Complex64] {
        &self.h
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `Z_N ⊔ Z_N` with point measure `h`.
    pub fn natural_space(&self) -> SplitSpace {
        SplitSpace::lattice(self.len(), self.len(), self.spacing, 1)
            .expect("spacing validated on construction")
    }

    /// Dense `2N × 2N` matrix with circulant blocks.
    pub fn to_jkernel(&self, space: &SplitSpace) -> Result<JKernelMatrix> {
        let n = self.len();
        if space.n1() != n || space.n2() != n {
            return Err(Error::DimensionMismatch(format!(
                "torus of size {n} on split ({}, {})",
                space.n1(),
                space.n2()
            )));
        }
        let at = |v: &[Complex64], x: usize, y: usize| v[(x + n - y) % n];
        let entries = CMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => at(&self.f, i, j),
            (true, false) => at(&self.g, i, j - n),
            (false, true) => -at(&self.g, j, i - n).conj(),
            (false, false) => at(&self.h, i - n, j - n),
        });
        JKernelMatrix::new(space.clone(), entries)
    }

    /// `F(0) + H(0) − ∫|F|² − ∫|H|² − 2∫|G|²` with integrals as lattice sums.
    pub fn sigma_squared(&self) -> f64 {
        let sq = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        self.f[0].re + self.h[0].re
            - self.spacing * (sq(&self.f) + sq(&self.h) + 2.0 * sq(&self.g))
    }

    /// Signed lattice coordinate of index `j`.
    pub fn coordinate(&self, j: usize) -> f64 {
        signed_index(j, self.len()) as f64 * self.spacing
    }

    /// Largest `|x|` represented on the torus.
    pub fn half_extent(&self) -> f64 {
        (self.len() / 2) as f64 * self.spacing
    }
}

pub fn synthesize_kernel(s: &SpectralTriple) -> Result<TranslationKernel> {
    synthesize_kernel_with_spacing(s, 1.0)
}

/// Inverse transform of spectral data; admissibility is not required.
pub fn synthesize_kernel_with_spacing(s: &SpectralTriple, spacing: f64) -> Result<TranslationKernel> {
    if s.dim() != 1 {
        return Err(Error::Config(format!(
            "torus kernels are implemented for d = 1 (got d = {})",
            s.dim()
        )));
    }
    let lift = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    let scale = 1.0 / spacing;
    let inv = |v: &[Complex64]| {
        let mut out = idft(v);
        out.iter_mut().for_each(|z| *z *= scale);
        out
    };
    let mut f = inv(&lift(&s.fhat));
    let mut h = inv(&lift(&s.hhat));
    let g = inv(&s.ghat);
    if s.is_real_even() {
        f.iter_mut().chain(h.iter_mut()).for_each(|z| z.im = 0.0);
    }
    TranslationKernel::new(f, g, h, spacing)
}

/// `(1/(N h)) Σ_k [F̂ + Ĥ − F̂² − Ĥ² − 2|Ĝ|²]`.
pub fn sigma_squared_spectral(s: &SpectralTriple, spacing: f64) -> f64 {
    let sum: f64 = (0..s.len())
        .map(|k| {
            let (f, h) = (s.fhat[k], s.hhat[k]);
            f + h - f * f - h * h - 2.0 * s.ghat[k].norm_sqr()
        })
        .sum();
    sum / (s.len() as f64 * spacing)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDiagnostic {
    pub value: f64,
    pub cutoff: f64,
    /// The cutoff reaches past the torus; `value` is then 0.
    pub exceeds_grid: bool,
}

/// `∫_{|x| > L/κ} [|F|² + |H|² + 2|G|²] dx` as a lattice sum.
pub fn tail_diagnostic(kernel: &TranslationKernel, l: f64, kappa: f64) -> Result<TailDiagnostic> {
    if !(l > 0.0 && kappa > 0.0) {
        return Err(Error::Config(format!("tail diagnostic needs L > 0 and kappa > 0, got {l}, {kappa}")));
    }
    let cutoff = l / kappa;
    if cutoff >= kernel.half_extent() {
        return Ok(TailDiagnostic {
            value: 0.0,
            cutoff,
            exceeds_grid: true,
        });
    }
    let value = (0..kernel.len())
        .filter(|&j| kernel.coordinate(j).abs() > cutoff)
        .map(|j| kernel.f[j].norm_sqr() + kernel.h[j].norm_sqr() + 2.0 * kernel.g[j].norm_sqr())
        .sum::<f64>()
        * kernel.spacing;
    Ok(TailDiagnostic {
        value,
        cutoff,
        exceeds_grid: false,
    })
}

/// [`tail_diagnostic`] for a kernel family `L ↦ K_L` and rule `L ↦ κ_L`.
pub fn tail_diagnostic_family(
    family: impl Fn(f64) -> Result<TranslationKernel>,
    kappa: impl Fn(f64) -> f64,
    l: f64,
) -> Result<TailDiagnostic> {
    tail_diagnostic(&family(l)?, l, kappa(l))
}
