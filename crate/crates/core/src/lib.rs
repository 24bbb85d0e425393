//! Determinantal point processes on a two-sided space `X = X₁ ⊔ X₂` with
//! J-Hermitian kernels.

pub mod error;
pub mod harness;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod moments;
pub mod oracle;
pub mod random;
pub mod sampler;
pub mod space;
pub mod torus;

pub use error::{Error, Result};
pub use kernel::{HatKernel, JKernelMatrix, ValidityReport};
pub use moments::{CumulantSeries, TestFunction};
pub use space::{Side, SplitSpace};
pub use torus::{SpectralTriple, TranslationKernel};
