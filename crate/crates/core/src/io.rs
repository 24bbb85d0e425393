//! JSON file formats.
//!
//! Kernel: `{"n1", "n2", "weights": [real], "entries": [[re, im], ...]}` with
//! entries in row-major order.
//!
//! Spectral triple: `{"N", "d", "Fhat": [real], "Hhat": [real], "Ghat": [[re, im], ...]}`.
//!
//! Test function: a bare JSON array of reals, one per point.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::JKernelMatrix;
use crate::linalg::CMatrix;
use crate::moments::TestFunction;
use crate::space::SplitSpace;
use crate::torus::SpectralTriple;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelFile {
    n1: usize,
    n2: usize,
    weights: Vec<f64>,
    entries: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(default = "default_dim")]
    d: usize,
    #[serde(rename = "Fhat")]
    fhat: Vec<f64>,
    #[serde(rename = "Hhat")]
    hhat: Vec<f64>,
    #[serde(rename = "Ghat")]
    ghat: Vec<[f64; 2]>,
}

fn default_dim() -> usize {
    1
}

pub fn kernel_to_json(kernel: &JKernelMatrix) -> Result<String> {
    let n = kernel.len();
    let m = kernel.entries();
    let file = KernelFile {
        n1: kernel.space().n1(),
        n2: kernel.space().n2(),
        weights: kernel.space().weights().to_vec(),
        entries: (0..n * n)
            .map(|k| {
                let z = m[(k / n, k % n)];
                [z.re, z.im]
            })
            .collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn kernel_from_json(text: &str) -> Result<JKernelMatrix> {
    let file: KernelFile = serde_json::from_str(text)?;
    let space = SplitSpace::new(file.n1, file.n2, file.weights)?;
    let n = space.len();
    if file.entries.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for {n} points",
            file.entries.len()
        )));
    }
    let entries = CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = file.entries[i * n + j];
        Complex64::new(re, im)
    });
    JKernelMatrix::new(space, entries)
}

pub fn save_kernel(kernel: &JKernelMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, kernel_to_json(kernel)?)?;
    Ok(())
}

pub fn load_kernel(path: impl AsRef<Path>) -> Result<JKernelMatrix> {
    kernel_from_json(&fs::read_to_string(path)?)
}

pub fn spectrum_to_json(triple: &SpectralTriple) -> Result<String> {
    let file = SpectrumFile {
        n: triple.len(),
        d: triple.dim(),
        fhat: triple.fhat().to_vec(),
        hhat: triple.hhat().to_vec(),
        ghat: triple.ghat().iter().map(|z| [z.re, z.im]).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn spectrum_from_json(text: &str) -> Result<SpectralTriple> {
    let file: SpectrumFile = serde_json::from_str(text)?;
    if file.fhat.len() != file.n {
        return Err(Error::DimensionMismatch(format!(
            "N = {} but Fhat has {} entries",
            file.n,
            file.fhat.len()
        )));
    }
    let ghat = file
        .ghat
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    SpectralTriple::with_dim(file.fhat, file.hhat, ghat, file.d)
}

pub fn save_spectrum(triple: &SpectralTriple, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, spectrum_to_json(triple)?)?;
    Ok(())
}

pub fn load_spectrum(path: impl AsRef<Path>) -> Result<SpectralTriple> {
    spectrum_from_json(&fs::read_to_string(path)?)
}

pub fn load_test_function(path: impl AsRef<Path>) -> Result<TestFunction> {
    let values: Vec<f64> = serde_json::from_str(&fs::read_to_string(path)?)?;
    TestFunction::new(values)
}
