//! Finite two-part index sets `X = X₁ ⊔ X₂` carrying a point measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    One,
    Two,
}

/// Lattice metadata for spaces that discretize a continuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub spacing: f64,
    pub dim: usize,
}

/// Points `0..n1` form side 1 and `n1..n1+n2` form side 2. Each point carries
/// a strictly positive weight (its measure); `1.0` everywhere is counting
/// measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpace {
    n1: usize,
    n2: usize,
    weights: Vec<f64>,
    grid: Option<Grid>,
}

impl SplitSpace {
    pub fn new(n1: usize, n2: usize, weights: Vec<f64>) -> Result<Self> {
        if n1 + n2 == 0 {
            return Err(Error::InvalidSpace("space has no points".into()));
        }
        if weights.len() != n1 + n2 {
            return Err(Error::InvalidSpace(format!(
                "{} weights for {} points",
                weights.len(),
                n1 + n2
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidSpace(format!("weight {w} at point {i}")));
        }
        Ok(Self {
            n1,
            n2,
            weights,
            grid: None,
        })
    }

    /// Counting measure.
    ///
    /// # Panics
    /// If `n1 + n2 == 0`.
    pub fn counting(n1: usize, n2: usize) -> Self {
        Self::uniform(n1, n2, 1.0).expect("counting measure on an empty space")
    }

    pub fn uniform(n1: usize, n2: usize, weight: f64) -> Result<Self> {
        Self::new(n1, n2, vec![weight; n1 + n2])
    }

    /// Uniform lattice with spacing `h` in dimension `dim`; each point weighs `h^dim`.
    pub fn lattice(n1: usize, n2: usize, spacing: f64, dim: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) || dim == 0 {
            return Err(Error::InvalidSpace(format!(
                "grid spacing {spacing}, dimension {dim}"
            )));
        }
        let mut space = Self::uniform(n1, n2, spacing.powi(dim as i32))?;
        space.grid = Some(Grid { spacing, dim });
        Ok(space)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn grid(&self) -> Option<Grid> {
        self.grid
    }

    pub fn side(&self, point: usize) -> Side {
        if point < self.n1 {
            Side::One
        } else {
            Side::Two
        }
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Same sides, counting measure.
    pub fn to_counting(&self) -> Self {
        Self::counting(self.n1, self.n2)
    }

    /// `J = P₁ − P₂` as a sign per point.
    pub fn j_sign(&self, point: usize) -> f64 {
        match self.side(point) {
            Side::One => 1.0,
            Side::Two => -1.0,
        }
    }
}
