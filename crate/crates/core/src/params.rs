//! The `(c, n)` parameter pair selecting one member of the family, and its
//! domain `I_c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest support size accepted for `c < 0`.
pub const MAX_SUPPORT: u64 = 1 << 40;

/// Relative slack used when recognising `-n/c` as an integer.
const INTEGER_SLACK: f64 = 1e-9;

/// Number of atoms of the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    /// `k = 0..=l`.
    Finite(u64),
    Unbounded,
}

/// A validated `(c, n)` pair.
///
/// `c = -1`, `0` and `1` give the binomial, Poisson and negative binomial
/// distributions. For `c < 0` the rate is stored as `n = -c * l` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    c: f64,
    n: f64,
    support: Support,
}

impl FamilyParams {
    pub fn new(c: f64, n: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!("c must be finite, got {c}")));
        }
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NonPositiveN { n });
        }
        if c >= 0.0 {
            if n <= c {
                return Err(Error::NLeqC { c, n });
            }
            return Ok(Self {
                c,
                n,
                support: Support::Unbounded,
            });
        }
        let ratio = -n / c;
        let l = ratio.round();
        if l < 1.0 || (ratio - l).abs() > INTEGER_SLACK * l.max(1.0) || l > MAX_SUPPORT as f64 {
            return Err(Error::NonIntegerL { c, n, ratio });
        }
        Ok(Self::finite(c, l as u64))
    }

    /// `c < 0` member with support `0..=l`; `l = 0` is the point mass at 0
    /// reached by shifting `n -> n + c`.
    pub(crate) fn finite(c: f64, l: u64) -> Self {
        debug_assert!(c < 0.0);
        Self {
            c,
            n: -c * l as f64,
            support: Support::Finite(l),
        }
    }

    #[cfg(test)]
    pub(crate) fn unbounded_unchecked(c: f64, n: f64) -> Self {
        Self {
            c,
            n,
            support: Support::Unbounded,
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// `l = -n/c` when `c < 0`.
    pub fn support_size(&self) -> Option<u64> {
        match self.support {
            Support::Finite(l) => Some(l),
            Support::Unbounded => None,
        }
    }

    /// Closed domain `[0, -1/c]` or `[0, +inf)`.
    pub fn domain(&self) -> (f64, f64) {
        if self.c < 0.0 {
            (0.0, -1.0 / self.c)
        } else {
            (0.0, f64::INFINITY)
        }
    }

    /// Parameters `(n + j c, c)`. `None` when `c < 0` and `j > l`, where the
    /// shifted rate would be negative.
    pub fn shifted(&self, j: u64) -> Option<Self> {
        match self.support {
            Support::Finite(l) => (j <= l).then(|| Self::finite(self.c, l - j)),
            Support::Unbounded => Some(Self {
                c: self.c,
                n: self.n + j as f64 * self.c,
                support: Support::Unbounded,
            }),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x >= lo && x <= hi
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            let (lo, hi) = self.domain();
            Err(Error::DomainViolation { x, lo, hi })
        }
    }

    pub fn check_interior(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if x > lo && x < hi {
            Ok(())
        } else {
            Err(Error::DomainViolation { x, lo, hi })
        }
    }

    /// The point `-1/(2c)` about which a `c < 0` member is symmetric.
    pub fn midpoint(&self) -> Option<f64> {
        (self.c < 0.0).then(|| -0.5 / self.c)
    }
}

/// Validates a `(c, n)` pair; see [`FamilyParams::new`].
pub fn validate_params(c: f64, n: f64) -> Result<FamilyParams> {
    FamilyParams::new(c, n)
}
