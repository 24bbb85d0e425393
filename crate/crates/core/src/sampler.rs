//! Exact sampling of J-Hermitian DPPs through the Hermitian dual `K̂`.
//!
//! Both samplers share one sequential routine: for a kernel `K = U B U†`,
//! points are visited in index order, point `x` is kept with its conditional
//! intensity `p = u_x B u_x†`, and the core is conditioned by
//! `B ← B − (B u_x†)(u_x B) / (p − [x rejected])`.

use std::ops::Range;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{HatKernel, JKernelMatrix, DEFAULT_TOL};
use crate::linalg::{self, CMatrix};
use crate::moments::TestFunction;
use crate::space::SplitSpace;
use crate::torus::{eigen2, SpectralTriple};

/// Intensities in `[−NEG_CLAMP, ZERO_BAND]` count as 0, those in
/// `[1 − ZERO_BAND, 1 + NEG_CLAMP]` as 1; anything else is a breakdown.
pub const NEG_CLAMP: f64 = 1e-9;
pub const ZERO_BAND: f64 = 1e-12;

/// Symbol entries below this are treated as structurally zero.
const SYMBOL_CUTOFF: f64 = 1e-14;

/// Eigenpairs of `K̂`, eigenvalues ascending and clamped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `‖V Λ V† − M‖_max`.
    pub fn reconstruction_residual(&self, m: &CMatrix) -> f64 {
        let v = &self.eigenvectors;
        let scaled = CMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * self.eigenvalues[j]);
        (scaled * v.adjoint() - m).camax()
    }
}

pub fn eigendecompose_hat(hat: &HatKernel, tol: f64) -> Result<EigenSystem> {
    let (values, vectors) = linalg::hermitian_eigen(&linalg::hermitize(hat.entries()));
    let (min, max) = (values[0], values[values.len() - 1]);
    if min < -tol || max > 1.0 + tol {
        return Err(Error::InvalidKernel { min, max });
    }
    Ok(EigenSystem {
        eigenvalues: values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        eigenvectors: vectors,
    })
}

/// A subset of `0..len` stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    pub fn empty(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_members(len: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::empty(len);
        for i in members {
            c.insert(i);
        }
        c
    }

    fn from_flags(flags: &[bool]) -> Self {
        Self::from_members(flags.len(), flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }

    /// Bitmask for spaces of at most 32 points.
    pub fn mask(&self) -> Option<u32> {
        (self.len <= 32).then(|| self.words.first().copied().unwrap_or(0) as u32)
    }

    /// `Σ 2^i` over members, as `0x…` with no leading zeros.
    pub fn to_hex(&self) -> String {
        let mut digits = String::new();
        for w in self.words.iter().rev() {
            if digits.is_empty() {
                if *w != 0 {
                    digits = format!("{w:x}");
                }
            } else {
                digits.push_str(&format!("{w:016x}"));
            }
        }
        if digits.is_empty() {
            digits.push('0');
        }
        format!("0x{digits}")
    }

    /// Complements membership on side 2.
    pub fn particle_hole(mut self, space: &SplitSpace) -> Self {
        for i in space.n1()..space.len() {
            self.toggle(i);
        }
        self
    }

    pub fn statistic(&self, f: &TestFunction) -> f64 {
        f.statistic(self.members())
    }
}

fn classify(p: f64) -> Result<f64> {
    if (-NEG_CLAMP..=ZERO_BAND).contains(&p) {
        Ok(0.0)
    } else if (1.0 - ZERO_BAND..=1.0 + NEG_CLAMP).contains(&p) {
        Ok(1.0)
    } else if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(Error::Breakdown(format!("conditional intensity {p}")))
    }
}

/// Sequential sampler for `K = U B U†`. `rows` holds `u_x` in column `x`
/// (shape `m × n`); `support(x)` covers the non-zero entries of `u_x`.
/// Consumes one uniform per point.
fn sequential<T, R, S>(rows: &DMatrix<T>, mut core: DMatrix<T>, support: S, rng: &mut R) -> Result<Vec<bool>>
where
    T: ComplexField<RealField = f64> + Copy,
    R: Rng + ?Sized,
    S: Fn(usize) -> Range<usize>,
{
    let (m, n) = rows.shape();
    let mut flags = vec![false; n];
    let mut col = DVector::<T>::zeros(m);
    let mut row = DVector::<T>::zeros(m);
    let mut u_adj = DVector::<T>::zeros(m);
    for (x, flag) in flags.iter_mut().enumerate() {
        let draw: f64 = rng.random();
        let span = support(x);
        let w = span.len();
        if w == 0 {
            continue;
        }
        let u = rows.column(x);
        let u = u.rows(span.start, w);
        for j in 0..w {
            u_adj[j] = u[j].conjugate();
        }
        let u_adj = u_adj.rows(0, w);
        col.gemv(T::one(), &core.columns(span.start, w), &u_adj, T::zero());
        row.gemv_tr(T::one(), &core.rows(span.start, w), &u, T::zero());
        let p = u.dot(&col.rows(span.start, w)).real();
        let keep = draw < classify(p)?;
        *flag = keep;
        let denom = if keep { p } else { p - 1.0 };
        core.ger(T::from_real(-1.0 / denom), &col, &row, T::one());
    }
    Ok(flags)
}

/// Draws from the Hermitian DPP with kernel `V Λ V†`: keeps eigenvector `k`
/// with probability `λ_k` (one uniform per eigenvalue, in order), then samples
/// the projection onto the kept eigenvectors.
pub fn sample_hermitian_dpp<R: Rng + ?Sized>(eigen: &EigenSystem, rng: &mut R) -> Result<Configuration> {
    let keep: Vec<usize> = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .filter_map(|(k, &lambda)| (rng.random::<f64>() < lambda).then_some(k))
        .collect();
    let v = &eigen.eigenvectors;
    let n = v.nrows();
    let r = keep.len();
    let flags = if linalg::is_real(v) {
        let rows = DMatrix::<f64>::from_fn(r, n, |j, x| v[(x, keep[j])].re);
        sequential(&rows, DMatrix::identity(r, r), |_| 0..r, rng)?
    } else {
        let rows = CMatrix::from_fn(r, n, |j, x| v[(x, keep[j])]);
        sequential(&rows, CMatrix::identity(r, r), |_| 0..r, rng)?
    };
    Ok(Configuration::from_flags(&flags))
}

/// Anything that draws configurations from a private RNG stream.
pub trait ConfigurationSampler: Sync {
    fn space(&self) -> &SplitSpace;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Configuration>;
}

/// Dense sampler: eigendecomposes `K̂` once, then samples the dual and flips
/// side 2.
#[derive(Debug, Clone)]
pub struct JdppSampler {
    space: SplitSpace,
    eigen: EigenSystem,
}

impl JdppSampler {
    pub fn new(kernel: &JKernelMatrix) -> Result<Self> {
        let hat = kernel.effective().hat_transform()?;
        Ok(Self {
            space: kernel.space().clone(),
            eigen: eigendecompose_hat(&hat, DEFAULT_TOL)?,
        })
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }
}

impl ConfigurationSampler for JdppSampler {
    fn space(&self) -> &SplitSpace {
        &self.space
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Configuration> {
        Ok(sample_hermitian_dpp(&self.eigen, rng)?.particle_hole(&self.space))
    }
}

/// One draw from `DPP(K)`; builds the eigensystem on every call.
pub fn sample_jdpp(kernel: &JKernelMatrix, rng: &mut ChaCha8Rng) -> Result<Configuration> {
    JdppSampler::new(kernel)?.sample(rng)
}

struct Mode<T: nalgebra::Scalar> {
    phi: DVector<T>,
    values: [f64; 2],
    vectors: [[T; 2]; 2],
}

enum TorusModes {
    Real(Vec<Mode<f64>>),
    Complex(Vec<Mode<Complex64>>),
}

/// Sampler for torus kernels that never forms a dense eigensolve.
///
/// `K̂` splits into the 2×2 blocks `M₁(k)` on `span{(φ_k, 0), (0, φ_k)}` for a
/// Fourier basis `φ_k` (real cosine/sine pairs when the triple is real and
/// even). Eigenvectors of each block are thinned independently; the kept ones
/// give a projection `P` and the sampler runs directly on the J-Hermitian
/// kernel `[[P₁₁, P₁₂], [−P₂₁, I − P₂₂]]`, whose law is the flipped law of
/// `DPP(P)`. Modes whose symbol vanishes drop out, so the cost per draw is
/// `O(N m²)` with `m` the number of live basis columns.
pub struct TorusSampler {
    space: SplitSpace,
    modes: TorusModes,
}

impl TorusSampler {
    pub fn new(triple: &SpectralTriple, spacing: f64) -> Result<Self> {
        if triple.dim() != 1 {
            return Err(Error::Config("torus sampling supports d = 1 only".into()));
        }
        let n = triple.len();
        let validity = crate::torus::check_prop2(triple, DEFAULT_TOL);
        if !validity.valid {
            return Err(Error::InadmissibleSpectrum(Box::new(validity)));
        }
        let space = SplitSpace::lattice(n, n, spacing, 1)?;
        let modes = if triple.is_real_even() {
            TorusModes::Real(real_modes(triple))
        } else {
            TorusModes::Complex(complex_modes(triple))
        };
        Ok(Self { space, modes })
    }

    pub fn is_real(&self) -> bool {
        matches!(self.modes, TorusModes::Real(_))
    }
}

fn clamp_values(v: [f64; 2]) -> [f64; 2] {
    [v[0].clamp(0.0, 1.0), v[1].clamp(0.0, 1.0)]
}

fn real_modes(triple: &SpectralTriple) -> Vec<Mode<f64>> {
    let n = triple.len();
    let mut out = Vec::with_capacity(n);
    let mut push = |k: usize, phi: DVector<f64>| {
        let (values, vectors) = eigen2(&triple.m1(k));
        out.push(Mode {
            phi,
            values: clamp_values(values),
            vectors: vectors.map(|v| v.map(|z| z.re)),
        });
    };
    let angle = |k: usize, x: usize| std::f64::consts::TAU * ((k * x) % n) as f64 / n as f64;
    push(0, DVector::from_element(n, 1.0 / (n as f64).sqrt()));
    let norm = (2.0 / n as f64).sqrt();
    for k in 1..n.div_ceil(2) {
        push(k, DVector::from_fn(n, |x, _| norm * angle(k, x).cos()));
        push(k, DVector::from_fn(n, |x, _| norm * angle(k, x).sin()));
    }
    if n % 2 == 0 && n > 1 {
        let sign = |x: usize| if x % 2 == 0 { 1.0 } else { -1.0 };
        push(n / 2, DVector::from_fn(n, |x, _| sign(x) / (n as f64).sqrt()));
    }
    out
}

fn complex_modes(triple: &SpectralTriple) -> Vec<Mode<Complex64>> {
    let n = triple.len();
    (0..n)
        .map(|k| {
            let (values, vectors) = eigen2(&triple.m1(k));
            let scale = 1.0 / (n as f64).sqrt();
            Mode {
                phi: DVector::from_fn(n, |x, _| {
                    Complex64::from_polar(scale, std::f64::consts::TAU * ((k * x) % n) as f64 / n as f64)
                }),
                values: clamp_values(values),
                vectors,
            }
        })
        .collect()
}

fn sample_modes<T, R>(modes: &[Mode<T>], n: usize, rng: &mut R) -> Result<Vec<bool>>
where
    T: ComplexField<RealField = f64> + Copy,
    R: Rng + ?Sized,
{
    // Per mode: thin the two eigenvectors, then form unhat of the kept projection.
    let mut symbols: Vec<[[T; 2]; 2]> = Vec::with_capacity(modes.len());
    for mode in modes {
        let mut p = [[T::zero(); 2]; 2];
        for (lambda, v) in mode.values.iter().zip(&mode.vectors) {
            if rng.random::<f64>() < *lambda {
                for i in 0..2 {
                    for j in 0..2 {
                        p[i][j] += v[i] * v[j].conjugate();
                    }
                }
            }
        }
        symbols.push([[p[0][0], p[0][1]], [-p[1][0], T::one() - p[1][1]]]);
    }
    // Side-one columns first, so each point only touches its own block.
    let mut columns: Vec<(usize, usize)> = Vec::new();
    for side in 0..2 {
        for (k, q) in symbols.iter().enumerate() {
            if (0..2).any(|o| q[side][o].modulus() > SYMBOL_CUTOFF || q[o][side].modulus() > SYMBOL_CUTOFF) {
                columns.push((k, side));
            }
        }
    }
    let split = columns.iter().filter(|c| c.1 == 0).count();
    let rows = DMatrix::<T>::from_fn(columns.len(), 2 * n, |j, x| {
        let (k, side) = columns[j];
        if x / n == side {
            modes[k].phi[x % n]
        } else {
            T::zero()
        }
    });
    let core = DMatrix::<T>::from_fn(columns.len(), columns.len(), |a, b| {
        let ((ka, sa), (kb, sb)) = (columns[a], columns[b]);
        if ka == kb {
            symbols[ka][sa][sb]
        } else {
            T::zero()
        }
    });
    sequential(&rows, core, |x| if x < n { 0..split } else { split..columns.len() }, rng)
}

impl ConfigurationSampler for TorusSampler {
    fn space(&self) -> &SplitSpace {
        &self.space
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Configuration> {
        let n = self.space.n1();
        let flags = match &self.modes {
            TorusModes::Real(modes) => sample_modes(modes, n, rng)?,
            TorusModes::Complex(modes) => sample_modes(modes, n, rng)?,
        };
        Ok(Configuration::from_flags(&flags))
    }
}

/// Stream `replica` of the generator seeded by `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Per-replica outputs with breakdowns removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicas<T> {
    pub seed: u64,
    pub requested: usize,
    /// `(replica index, value)` in index order.
    pub values: Vec<(usize, T)>,
    pub breakdowns: Vec<usize>,
}

impl<T> Replicas<T> {
    pub fn breakdown_rate(&self) -> f64 {
        if self.requested == 0 {
            0.0
        } else {
            self.breakdowns.len() as f64 / self.requested as f64
        }
    }
}

/// Runs `replicas` independent draws in parallel and maps each through
/// `summary`; output order and values do not depend on the thread count.
pub fn run_replicas<S, T, F>(sampler: &S, seed: u64, replicas: usize, summary: F) -> Replicas<T>
where
    S: ConfigurationSampler + ?Sized,
    T: Send,
    F: Fn(&Configuration) -> T + Sync,
{
    let results: Vec<(usize, Result<T>)> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i as u64);
            (i, sampler.sample(&mut rng).map(|c| summary(&c)))
        })
        .collect();
    let mut values = Vec::with_capacity(replicas);
    let mut breakdowns = Vec::new();
    for (i, r) in results {
        match r {
            Ok(v) => values.push((i, v)),
            Err(e) => {
                log::warn!("replica {i} discarded: {e}");
                breakdowns.push(i);
            }
        }
    }
    Replicas {
        seed,
        requested: replicas,
        values,
        breakdowns,
    }
}

/// Configurations from `replicas` draws.
pub type SampleBatch = Replicas<Configuration>;

pub fn sample_batch<S: ConfigurationSampler + ?Sized>(sampler: &S, seed: u64, replicas: usize) -> SampleBatch {
    run_replicas(sampler, seed, replicas, Configuration::clone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn hat(v: [f64; 4]) -> HatKernel {
        HatKernel::new(SplitSpace::counting(1, 1), CMatrix::from_row_slice(2, 2, &v.map(|x| c(x, 0.0)))).unwrap()
    }

    #[test]
    fn eigendecompose_examples() {
        let e = eigendecompose_hat(&hat([0.0, 0.0, 0.0, 1.0]), DEFAULT_TOL).unwrap();
        assert_eq!(e.eigenvalues(), &[0.0, 1.0]);
        assert!((e.eigenvectors().map(|z| z.norm()) - nalgebra::DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);

        let e = eigendecompose_hat(&hat([0.5, 0.5, 0.5, 0.5]), DEFAULT_TOL).unwrap();
        assert!(e.eigenvalues()[0].abs() < 1e-15 && (e.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let v = e.eigenvectors();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(((v[(0, 0)] / v[(1, 0)]).re + 1.0).abs() < 1e-14);
        assert!(((v[(0, 1)] / v[(1, 1)]).re - 1.0).abs() < 1e-14);
        assert!((v[(0, 1)].norm() - s).abs() < 1e-14);

        assert!(matches!(
            eigendecompose_hat(&hat([0.5, 0.9, 0.9, 0.5]), DEFAULT_TOL),
            Err(Error::InvalidKernel { .. })
        ));
    }

    #[test]
    fn configuration_hex() {
        assert_eq!(Configuration::empty(3).to_hex(), "0x0");
        assert_eq!(Configuration::from_members(5, [0, 2, 4]).to_hex(), "0x15");
        assert_eq!(Configuration::from_members(70, [0, 65]).to_hex(), "0x20000000000000001");
        assert_eq!(Configuration::from_members(3, [1]).mask(), Some(2));
    }

    #[test]
    fn trivial_kernels() {
        let space = SplitSpace::counting(2, 2);
        let zero = JKernelMatrix::new(space.clone(), CMatrix::zeros(4, 4)).unwrap();
        let id = JKernelMatrix::new(space, CMatrix::identity(4, 4)).unwrap();
        let (zs, is) = (JdppSampler::new(&zero).unwrap(), JdppSampler::new(&id).unwrap());
        for i in 0..50 {
            let mut rng = replica_rng(9, i);
            assert_eq!(zs.sample(&mut rng).unwrap().count(), 0);
            assert_eq!(is.sample(&mut rng).unwrap().count(), 4);
        }
    }

    #[test]
    fn hermitian_rank_law() {
        let mut rng = replica_rng(4, 0);
        let proj = crate::random::hermitian_with_spectrum(&mut rng, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0], false);
        let e = eigendecompose_hat(&HatKernel::new(SplitSpace::counting(6, 0), proj).unwrap(), DEFAULT_TOL).unwrap();
        for _ in 0..200 {
            assert_eq!(sample_hermitian_dpp(&e, &mut rng).unwrap().count(), 3);
        }
        let all_zero = EigenSystem {
            eigenvalues: vec![0.0; 3],
            eigenvectors: CMatrix::identity(3, 3),
        };
        assert_eq!(sample_hermitian_dpp(&all_zero, &mut rng).unwrap().count(), 0);
    }

    #[test]
    fn classify_bands() {
        assert_eq!(classify(-5e-10).unwrap(), 0.0);
        assert_eq!(classify(1.0 + 5e-10).unwrap(), 1.0);
        assert_eq!(classify(0.25).unwrap(), 0.25);
        assert!(classify(-1e-6).is_err());
        assert!(classify(1.0 + 1e-6).is_err());
    }
}
