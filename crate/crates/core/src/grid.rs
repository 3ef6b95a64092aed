//! Evaluation grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Geometric,
}

/// `points` values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        let g = Self {
            min,
            max,
            points,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(min, max, points, Spacing::Linear)
    }

    pub fn geometric(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(min, max, points, Spacing::Geometric)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs finite min < max (got {} .. {})",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points (got {})",
                self.points
            )));
        }
        if self.spacing == Spacing::Geometric && !(self.min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric grid needs min > 0 (got {})",
                self.min
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.max;
                }
                let s = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + s * (self.max - self.min),
                    Spacing::Geometric => self.min * (self.max / self.min).powf(s),
                }
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        let kind = match self.spacing {
            Spacing::Linear => "linear",
            Spacing::Geometric => "geometric",
        };
        format!("{kind} [{}, {}] x {}", self.min, self.max, self.points)
    }
}

/// `count` equispaced points strictly inside `(lo, hi)`:
/// `lo + i (hi - lo) / (count + 1)` for `i = 1..=count`.
pub fn interior_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count + 1) as f64;
    (1..=count).map(|i| lo + i as f64 * step).collect()
}

/// Applies `f` to every point, in parallel when the `parallel` feature is
/// on. Output order always matches input order.
pub fn map_points<T, F>(xs: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        xs.par_iter().map(|&x| f(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        xs.iter().map(|&x| f(x)).collect()
    }
}
