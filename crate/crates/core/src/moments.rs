//! Expectations, variances and cumulants of linear statistics
//! `S_f(ξ) = Σ_{x∈ξ} f(x)` from trace formulas.
//!
//! All traces are `Tr(K D₁ K D₂ ⋯ K D_m)` with `D_i = diag(f_i · μ)`,
//! evaluated by left-to-right dense products.

use std::collections::HashMap;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::JKernelMatrix;
use crate::linalg;
use crate::torus::{dft, dft_real, TranslationKernel};

/// Largest supported cumulant order; `12!` still fits the exact multinomials.
pub const MAX_ORDER: usize = 12;

const TRACE_IMAG_TOL: f64 = 1e-10;
const CUMULANT_IMAG_TOL: f64 = 1e-9;
const CROSS_CHECK_TOL: f64 = 1e-10;

/// Real function on the points of a split space.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("test function"));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    /// `side1(j)` on the first copy of `Z_N`, `side2(j)` on the second.
    pub fn on_torus(n: usize, side1: impl Fn(usize) -> f64, side2: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..n).map(side1).chain((0..n).map(side2)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v != 0.0).collect()
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| op(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `S_f` of a configuration given as a membership mask.
    pub fn statistic(&self, members: impl IntoIterator<Item = usize>) -> f64 {
        members.into_iter().map(|i| self.values[i]).sum()
    }
}

/// `C₁ … C_nmax`; `get(n)` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSeries {
    values: Vec<f64>,
}

impl CumulantSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn nmax(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, order: usize) -> f64 {
        self.values[order - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `C_n / C₂^{n/2}`.
    pub fn normalized(&self, order: usize) -> f64 {
        self.get(order) / self.get(2).powf(order as f64 / 2.0)
    }
}

/// Compositions of `n` (ordered tuples of positive parts summing to `n`) in
/// lexicographic order.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in 1..=rest {
            prefix.push(p);
            go(rest - p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, &mut Vec::new(), &mut out);
    }
    out
}

/// `(Σ parts)! / Π parts!`, exact for totals up to 20.
pub fn multinomial(parts: &[usize]) -> u64 {
    let mut total = 0u64;
    let mut acc = 1u64;
    for &p in parts {
        for i in 1..=p as u64 {
            total += 1;
            // acc * total / i stays integral: it is a product of binomials.
            acc = acc * total / i;
        }
    }
    acc
}

fn composition_coefficient(parts: &[usize]) -> f64 {
    let m = parts.len();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    sign / m as f64 * multinomial(parts) as f64
}

/// The kernel held in the cheapest exact scalar type.
enum Dense {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl Dense {
    fn of(kernel: &JKernelMatrix) -> Self {
        if linalg::is_real(kernel.entries()) {
            Dense::Real(linalg::real_part(kernel.entries()))
        } else {
            Dense::Complex(kernel.entries().clone())
        }
    }
}

fn scale_columns<T: ComplexField<RealField = f64> + Copy>(k: &DMatrix<T>, d: &[f64]) -> DMatrix<T> {
    let mut out = k.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.scale_mut(d[j]);
    }
    out
}

/// `Σ_ij P_ij Q_ji`.
fn trace_of_product<T: ComplexField<RealField = f64> + Copy>(p: &DMatrix<T>, q: &DMatrix<T>) -> T {
    let n = p.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc += p[(i, j)] * q[(j, i)];
        }
    }
    acc
}

fn chain_trace<T: ComplexField<RealField = f64> + Copy>(k: &DMatrix<T>, diags: &[Vec<f64>]) -> T {
    match diags {
        [] => T::zero(),
        [d] => (0..k.nrows()).fold(T::zero(), |acc, i| acc + k[(i, i)].scale(d[i])),
        [first, middle @ .., last] => {
            let mut prod = scale_columns(k, first);
            for d in middle {
                prod = &prod * scale_columns(k, d);
            }
            trace_of_product(&prod, &scale_columns(k, last))
        }
    }
}

fn to_complex<T: ComplexField<RealField = f64> + Copy>(z: T) -> Complex64 {
    Complex64::new(z.real(), z.imaginary())
}

fn weighted(kernel: &JKernelMatrix, f: &TestFunction, power: i32) -> Result<Vec<f64>> {
    if f.len() != kernel.len() {
        return Err(Error::DimensionMismatch(format!(
            "test function of length {} on a space of {} points",
            f.len(),
            kernel.len()
        )));
    }
    Ok(f.values
        .iter()
        .zip(kernel.space().weights())
        .map(|(v, w)| v.powi(power) * w)
        .collect())
}

/// `Tr(K D₁ ⋯ K D_m)`. For `m ≤ 2` and a J-Hermitian kernel the value is
/// real; longer chains are real only after symmetrization (as inside
/// [`cumulants`]).
pub fn trace_product(kernel: &JKernelMatrix, fs: &[&TestFunction]) -> Result<Complex64> {
    let diags = fs
        .iter()
        .map(|f| weighted(kernel, f, 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(match Dense::of(kernel) {
        Dense::Real(k) => Complex64::new(chain_trace(&k, &diags), 0.0),
        Dense::Complex(k) => chain_trace(&k, &diags),
    })
}

fn assert_real(z: Complex64, tol: f64) -> Result<f64> {
    if z.im.abs() > tol * z.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidual {
            real: z.re,
            imag: z.im,
        });
    }
    Ok(z.re)
}

/// `E S_f = ∫ f(x) K(x, x) dμ(x)`.
pub fn expectation(kernel: &JKernelMatrix, f: &TestFunction) -> Result<f64> {
    assert_real(trace_product(kernel, &[f])?, TRACE_IMAG_TOL)
}

/// `Var S_f = ∫ f² K(x,x) dμ − ∬ f(x) f(y) K(x,y) K(y,x) dμ dμ`.
pub fn variance(kernel: &JKernelMatrix, f: &TestFunction) -> Result<f64> {
    let f2 = f.map(|v| v * v);
    let diag = assert_real(trace_product(kernel, &[&f2])?, TRACE_IMAG_TOL)?;
    let pair = assert_real(trace_product(kernel, &[f, f])?, TRACE_IMAG_TOL)?;
    Ok(diag - pair)
}

/// Variance of `S_f` for a torus kernel computed in frequency space:
/// `h[F(0)Σf₁² + H(0)Σf₂²] − (h²/N) Σ_k [Ŵ_F|f̂₁|² + Ŵ_H|f̂₂|² − 2 Re(Ŵ_G conj(f̂₁) f̂₂)]`
/// with `Ŵ_F` the transform of `|F|²` (likewise `H`, `G`). `f` lists side 1
/// then side 2; the statistic `S_{(f,−f)}` corresponds to `f₂ = −f₁`.
pub fn variance_spectral(kernel: &TranslationKernel, f: &TestFunction) -> Result<f64> {
    let n = kernel.len();
    if f.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "test function of length {} on a torus of size {n}",
            f.len()
        )));
    }
    let h = kernel.spacing();
    let (f1, f2) = f.values.split_at(n);
    let sq_sum = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let diag = h * (kernel.f()[0].re * sq_sum(f1) + kernel.h()[0].re * sq_sum(f2));

    let power = |v: &[Complex64]| dft(&v.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect::<Vec<_>>());
    let (wf, wh, wg) = (power(kernel.f()), power(kernel.h()), power(kernel.g()));
    let (a, b) = (dft_real(f1), dft_real(f2));
    let pair: f64 = (0..n)
        .map(|k| {
            (wf[k] * a[k].norm_sqr() + wh[k] * b[k].norm_sqr()).re
                - 2.0 * (wg[k] * a[k].conj() * b[k]).re
        })
        .sum();
    Ok(diag - h * h / n as f64 * pair)
}

/// Cumulants `C₁ … C_nmax` of `S_f` from
/// `C_n = Σ_m Σ_{(n₁…n_m) ⊨ n} ((−1)^{m+1}/m) (n! / Π n_i!) Tr(K f^{n₁} ⋯ K f^{n_m})`.
///
/// Compositions are visited depth-first in lexicographic order; prefix
/// products are shared between compositions with a common prefix.
pub fn cumulants(kernel: &JKernelMatrix, f: &TestFunction, nmax: usize) -> Result<CumulantSeries> {
    if nmax == 0 || nmax > MAX_ORDER {
        return Err(Error::OrderOutOfRange(nmax));
    }
    let powers = (1..=nmax)
        .map(|p| weighted(kernel, f, p as i32))
        .collect::<Result<Vec<_>>>()?;
    let sums = match Dense::of(kernel) {
        Dense::Real(k) => composition_sums(&k, &powers, nmax),
        Dense::Complex(k) => composition_sums(&k, &powers, nmax),
    };
    let values = sums
        .into_iter()
        .map(|z| assert_real(z, CUMULANT_IMAG_TOL))
        .collect::<Result<Vec<_>>>()?;

    let direct = [expectation(kernel, f)?, variance(kernel, f)?];
    for (order, (&composition, &direct)) in values.iter().zip(&direct).enumerate() {
        if !linalg::rel_close(composition, direct, CROSS_CHECK_TOL) {
            return Err(Error::CrossCheck {
                order: order + 1,
                composition,
                direct,
            });
        }
    }
    Ok(CumulantSeries::new(values))
}

fn composition_sums<T: ComplexField<RealField = f64> + Copy>(
    k: &DMatrix<T>,
    powers: &[Vec<f64>],
    nmax: usize,
) -> Vec<Complex64> {
    // K D^p for every power p.
    let kd: Vec<DMatrix<T>> = powers.iter().map(|d| scale_columns(k, d)).collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); nmax];

    // Single-part compositions: Tr(K D^n).
    for (n, d) in powers.iter().enumerate() {
        let t = (0..k.nrows()).fold(T::zero(), |acc, i| acc + k[(i, i)].scale(d[i]));
        sums[n] += to_complex(t);
    }

    // Longer compositions: depth-first over prefixes (sum < nmax), appending
    // each admissible final part.
    struct Frame<T: nalgebra::Scalar> {
        parts: Vec<usize>,
        product: DMatrix<T>,
    }
    let mut stack: Vec<Frame<T>> = (1..nmax)
        .rev()
        .map(|p| Frame {
            parts: vec![p],
            product: kd[p - 1].clone(),
        })
        .collect();
    let mut terms: HashMap<usize, Vec<(Vec<usize>, Complex64)>> = HashMap::new();
    while let Some(frame) = stack.pop() {
        let used: usize = frame.parts.iter().sum();
        for last in 1..=(nmax - used) {
            let mut parts = frame.parts.clone();
            parts.push(last);
            let t = to_complex(trace_of_product(&frame.product, &kd[last - 1]));
            terms
                .entry(used + last)
                .or_default()
                .push((parts, t * composition_coefficient_parts(&frame.parts, last)));
        }
        for next in (1..(nmax - used)).rev() {
            let mut parts = frame.parts.clone();
            parts.push(next);
            stack.push(Frame {
                parts,
                product: &frame.product * &kd[next - 1],
            });
        }
    }
    for (n, mut list) in terms {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, t) in list {
            sums[n - 1] += t;
        }
    }
    sums
}

fn composition_coefficient_parts(prefix: &[usize], last: usize) -> f64 {
    let mut parts = prefix.to_vec();
    parts.push(last);
    composition_coefficient(&parts)
}

/// `[F(0) − H(0)] · L^d · Σ f · du^d`: the exact mean of the signed statistic
/// `Σ_{x∈ξ₁} f(x/L) − Σ_{y∈ξ₂} f(y/L)`, with `f_samples` taken at spacing
/// `du` in the unscaled coordinate.
pub fn thm3_mean(kernel: &TranslationKernel, f_samples: &[f64], l: f64, du: f64, dim: i32) -> f64 {
    let integral: f64 = f_samples.iter().sum::<f64>() * du.powi(dim);
    (kernel.f()[0].re - kernel.h()[0].re) * l.powi(dim) * integral
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMatrix};
    use crate::space::SplitSpace;
    use crate::torus::{synthesize_kernel, SpectralTriple};

    fn diag_kernel(a: f64, b: f64) -> JKernelMatrix {
        JKernelMatrix::new(
            SplitSpace::counting(1, 1),
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(a, 0.0), c(b, 0.0)])),
        )
        .unwrap()
    }

    fn half_kernel() -> JKernelMatrix {
        JKernelMatrix::new(
            SplitSpace::counting(1, 1),
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn compositions_lexicographic() {
        assert_eq!(
            compositions(3),
            vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]
        );
        for n in 1..=12 {
            assert_eq!(compositions(n).len(), 1 << (n - 1));
        }
    }

    #[test]
    fn multinomial_exact() {
        assert_eq!(multinomial(&[12]), 1);
        assert_eq!(multinomial(&[1; 12]), 479_001_600);
        assert_eq!(multinomial(&[2, 3, 7]), 7920);
        assert_eq!(multinomial(&[5, 7]), 792);
    }

    #[test]
    fn trace_examples() {
        let k = diag_kernel(0.3, 0.6);
        let one = TestFunction::constant(2, 1.0);
        assert!((trace_product(&k, &[&one]).unwrap() - c(0.9, 0.0)).norm() < 1e-15);
        let signed = TestFunction::new(vec![1.0, -1.0]).unwrap();
        assert!((trace_product(&k, &[&signed]).unwrap() - c(-0.3, 0.0)).norm() < 1e-15);
        // K² = [[0, 1/2], [−1/2, 0]].
        assert_eq!(trace_product(&half_kernel(), &[&one, &one]).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            trace_product(&k, &[&TestFunction::constant(3, 1.0)]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn trace_uses_weights() {
        let space = SplitSpace::new(1, 1, vec![2.0, 0.5]).unwrap();
        let k = JKernelMatrix::new(space, diag_kernel(0.3, 0.6).entries().clone()).unwrap();
        let one = TestFunction::constant(2, 1.0);
        assert!((expectation(&k, &one).unwrap() - (0.6 + 0.3)).abs() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let zero = diag_kernel(0.0, 0.0);
        assert_eq!(expectation(&zero, &TestFunction::new(vec![3.0, -2.0]).unwrap()).unwrap(), 0.0);
        let k = diag_kernel(0.2, 0.7);
        assert!((expectation(&k, &TestFunction::constant(2, 1.0)).unwrap() - 0.9).abs() < 1e-15);

        // Torus kernel from F̂ = Ĥ = Ĝ = 1/2, N = 4: F = H = δ/2, so E = 4·(1/2 + 1/2).
        let s = SpectralTriple::constant(4, 0.5, 0.5, c(0.5, 0.0)).unwrap();
        let t = synthesize_kernel(&s).unwrap();
        let k = t.to_jkernel(&t.natural_space()).unwrap();
        let diag_sum: f64 = k.diagonal().iter().sum();
        let e = expectation(&k, &TestFunction::constant(8, 1.0)).unwrap();
        assert!((e - diag_sum).abs() < 1e-14 && (e - 4.0).abs() < 1e-14);
    }

    #[test]
    fn variance_examples() {
        let zero = diag_kernel(0.0, 0.0);
        assert_eq!(variance(&zero, &TestFunction::constant(2, 1.0)).unwrap(), 0.0);
        let (p, q) = (0.3, 0.8);
        let v = variance(&diag_kernel(p, q), &TestFunction::constant(2, 1.0)).unwrap();
        assert!((v - (p * (1.0 - p) + q * (1.0 - q))).abs() < 1e-15);
    }

    #[test]
    fn cumulant_low_orders() {
        let k = half_kernel();
        let f = TestFunction::new(vec![0.7, -1.3]).unwrap();
        let cs = cumulants(&k, &f, 4).unwrap();
        assert!((cs.get(1) - expectation(&k, &f).unwrap()).abs() < 1e-15);
        assert!((cs.get(2) - variance(&k, &f).unwrap()).abs() < 1e-15);
        assert!(matches!(cumulants(&k, &f, 0), Err(Error::OrderOutOfRange(0))));
        assert!(matches!(cumulants(&k, &f, 13), Err(Error::OrderOutOfRange(13))));
    }

    #[test]
    fn cumulants_of_independent_bernoulli() {
        // diag(p, q): S is a sum of two independent Bernoulli variables.
        let (p, q) = (0.3, 0.6);
        let k = diag_kernel(p, q);
        let f = TestFunction::new(vec![1.0, 2.0]).unwrap();
        let cs = cumulants(&k, &f, 4).unwrap();
        let bern = |p: f64, c: f64| {
            [
                c * p,
                c * c * p * (1.0 - p),
                c.powi(3) * p * (1.0 - p) * (1.0 - 2.0 * p),
                c.powi(4) * p * (1.0 - p) * (1.0 - 6.0 * p * (1.0 - p)),
            ]
        };
        let (a, b) = (bern(p, 1.0), bern(q, 2.0));
        for n in 0..4 {
            assert!((cs.values()[n] - (a[n] + b[n])).abs() < 1e-13, "order {}", n + 1);
        }
    }

    #[test]
    fn composition_sums_match_naive_enumeration() {
        let s = SpectralTriple::new(
            vec![0.2, 0.5, 0.7, 0.4, 0.1],
            vec![0.3, 0.6, 0.2, 0.5, 0.4],
            (0..5).map(|k| Complex64::from_polar(0.1, k as f64)).collect(),
        )
        .unwrap();
        let t = synthesize_kernel(&s).unwrap();
        let k = t.to_jkernel(&t.natural_space()).unwrap();
        let f = TestFunction::new((0..10).map(|i| ((i * 7) % 5) as f64 * 0.3 - 0.4).collect()).unwrap();
        let cs = cumulants(&k, &f, 6).unwrap();
        for n in 1..=6 {
            let mut naive = c(0.0, 0.0);
            for parts in compositions(n) {
                let fs: Vec<TestFunction> = parts.iter().map(|&p| f.map(|v| v.powi(p as i32))).collect();
                let refs: Vec<&TestFunction> = fs.iter().collect();
                naive += trace_product(&k, &refs).unwrap() * composition_coefficient(&parts);
            }
            assert!((naive.re - cs.get(n)).abs() < 1e-12, "order {n}");
            assert!(naive.im.abs() < 1e-12);
        }
    }

    #[test]
    fn thm3_mean_examples() {
        let s = SpectralTriple::constant(4, 0.3, 0.3, c(0.1, 0.0)).unwrap();
        let t = synthesize_kernel(&s).unwrap();
        assert_eq!(thm3_mean(&t, &[1.0, 2.0, 3.0], 5.0, 0.1, 1), 0.0);

        let s = SpectralTriple::constant(4, 0.6, 0.2, c(0.0, 0.0)).unwrap();
        let t = synthesize_kernel(&s).unwrap();
        assert!(thm3_mean(&t, &[1.0, -1.0, 2.0, -2.0], 5.0, 0.1, 1).abs() < 1e-15);

        // F(0) = 1/2, H(0) = 1/4, L = 2, Σ f · du = 3.
        let s = SpectralTriple::constant(4, 0.5, 0.25, c(0.0, 0.0)).unwrap();
        let t = synthesize_kernel(&s).unwrap();
        assert!((thm3_mean(&t, &[1.0, 2.0, 3.0], 2.0, 0.5, 1) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn thm3_mean_matches_expectation() {
        let n = 16;
        let (h, l) = (0.5, 8.0);
        let s = SpectralTriple::constant(n, 0.5, 0.25, c(0.1, 0.0)).unwrap();
        let t = crate::torus::synthesize_kernel_with_spacing(&s, h).unwrap();
        let k = t.to_jkernel(&t.natural_space()).unwrap();
        let bump = |j: usize| (-(j as f64 * h / l - 0.5).powi(2) * 20.0).exp();
        let f = TestFunction::on_torus(n, bump, |j| -bump(j)).unwrap();
        let samples: Vec<f64> = (0..n).map(bump).collect();
        let exact = expectation(&k, &f).unwrap();
        let formula = thm3_mean(&t, &samples, l, h / l, 1);
        assert!((exact - formula).abs() <= 1e-12 * exact.abs());
    }

    #[test]
    fn variance_spectral_examples() {
        let s = SpectralTriple::constant(6, 0.4, 0.3, c(0.2, 0.1)).unwrap();
        let t = synthesize_kernel(&s).unwrap();
        assert_eq!(variance_spectral(&t, &TestFunction::constant(12, 0.0)).unwrap(), 0.0);

        // G = 0, F = H, f = (g, −g) with g symmetric.
        let n = 8;
        let fhat: Vec<f64> = (0..n).map(|k| [0.9, 0.6, 0.2, 0.1, 0.0, 0.1, 0.2, 0.6][k]).collect();
        let s = SpectralTriple::new(fhat.clone(), fhat, vec![c(0.0, 0.0); n]).unwrap();
        let t = synthesize_kernel(&s).unwrap();
        let g = |j: usize| [0.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0][j];
        let f = TestFunction::on_torus(n, g, |j| -g(j)).unwrap();
        let k = t.to_jkernel(&t.natural_space()).unwrap();
        let a = variance_spectral(&t, &f).unwrap();
        let b = variance(&k, &f).unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
        // Decoupled: twice the variance of one side.
        let one_side = TestFunction::on_torus(n, g, |_| 0.0).unwrap();
        assert!((b - 2.0 * variance(&k, &one_side).unwrap()).abs() < 1e-12);
    }
}
