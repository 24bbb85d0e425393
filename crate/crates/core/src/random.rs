//! Random kernels and spectral triples for tests and experiments.

use nalgebra::{Matrix2, QR};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::kernel::{HatKernel, JKernelMatrix};
use crate::linalg::{self, CMatrix};
use crate::space::SplitSpace;
use crate::torus::SpectralTriple;

/// Haar-distributed unitary (real orthogonal when `real`).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize, real: bool) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
        Complex64::new(re, im)
    });
    let qr = QR::new(z);
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U diag(λ) U†`, Hermitized.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(rng: &mut R, eigenvalues: &[f64], real: bool) -> CMatrix {
    let n = eigenvalues.len();
    let u = random_unitary(rng, n, real);
    let mut m = CMatrix::zeros(n, n);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let col = u.column(k);
        m += (&col * col.adjoint()).scale(lambda);
    }
    let mut h = linalg::hermitize(&m);
    if real {
        h.iter_mut().for_each(|z| z.im = 0.0);
    }
    h
}

/// The J-Hermitian kernel whose `K̂` has the given spectrum.
pub fn kernel_with_hat_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    n1: usize,
    n2: usize,
    eigenvalues: &[f64],
    real: bool,
) -> JKernelMatrix {
    assert_eq!(eigenvalues.len(), n1 + n2);
    let hat = hermitian_with_spectrum(rng, eigenvalues, real);
    HatKernel::new(SplitSpace::counting(n1, n2), hat)
        .expect("Hermitized matrix")
        .unhat_transform()
}

/// Valid kernel: `K̂` eigenvalues uniform on `[0, 1]`.
pub fn random_valid_kernel<R: Rng + ?Sized>(rng: &mut R, n1: usize, n2: usize, real: bool) -> JKernelMatrix {
    let eig: Vec<f64> = (0..n1 + n2).map(|_| rng.random::<f64>()).collect();
    kernel_with_hat_spectrum(rng, n1, n2, &eig, real)
}

/// Invalid kernel: one `K̂` eigenvalue at `−0.2` or `1.2`, the rest uniform on
/// `[0.2, 0.8]`.
pub fn random_invalid_kernel<R: Rng + ?Sized>(rng: &mut R, n1: usize, n2: usize, real: bool) -> JKernelMatrix {
    let mut eig: Vec<f64> = (0..n1 + n2).map(|_| rng.random_range(0.2..0.8)).collect();
    eig[0] = if rng.random::<bool>() { -0.2 } else { 1.2 };
    kernel_with_hat_spectrum(rng, n1, n2, &eig, real)
}

/// Kernel whose `K̂` has eigenvalues drawn uniformly from `[−margin, 1 + margin]`
/// (valid or not), for testing the validity boundary.
pub fn random_boundary_kernel<R: Rng + ?Sized>(
    rng: &mut R,
    n1: usize,
    n2: usize,
    margin: f64,
) -> JKernelMatrix {
    let eig: Vec<f64> = (0..n1 + n2)
        .map(|_| rng.random_range(-margin..1.0 + margin))
        .collect();
    kernel_with_hat_spectrum(rng, n1, n2, &eig, false)
}

fn block_with_spectrum<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Matrix2<Complex64> {
    let theta = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let (c, s) = (theta.cos(), theta.sin());
    let u = Matrix2::new(
        Complex64::new(c, 0.0),
        -phase.conj() * s,
        phase * s,
        Complex64::new(c, 0.0),
    );
    let d = Matrix2::new(
        Complex64::new(lo, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(hi, 0.0),
    );
    u * d * u.adjoint()
}

fn triple_from_blocks(blocks: &[Matrix2<Complex64>]) -> SpectralTriple {
    SpectralTriple::new(
        blocks.iter().map(|m| m[(0, 0)].re).collect(),
        blocks.iter().map(|m| 1.0 - m[(1, 1)].re).collect(),
        blocks.iter().map(|m| m[(0, 1)]).collect(),
    )
    .expect("finite")
}

/// Triple whose blocks `M₁(k)` have eigenvalues uniform on `[lo, hi]`.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> SpectralTriple {
    let blocks: Vec<_> = (0..n)
        .map(|_| {
            let a = rng.random_range(lo..hi);
            let b = rng.random_range(lo..hi);
            block_with_spectrum(rng, a.min(b), a.max(b))
        })
        .collect();
    triple_from_blocks(&blocks)
}

/// Valid triple with at least one block eigenvalue pinned to `0` or `1`.
pub fn random_boundary_triple<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpectralTriple {
    let pinned = rng.random_range(0..n);
    let blocks: Vec<_> = (0..n)
        .map(|k| {
            let a: f64 = rng.random();
            let b: f64 = if k == pinned {
                if rng.random::<bool>() { 0.0 } else { 1.0 }
            } else {
                rng.random()
            };
            block_with_spectrum(rng, a.min(b), a.max(b))
        })
        .collect();
    triple_from_blocks(&blocks)
}
