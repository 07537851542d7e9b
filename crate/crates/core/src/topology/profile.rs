use crate::error::{Error, Result};

/// Threshold width `α` of the profile functions and the β normalization `c1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    pub alpha: f64,
    pub c1: f64,
}

impl ProfileParams {
    /// `c1 = 6/α³` makes β integrate to one over its support `(1-α, 1]`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(Error::Domain {
                value: alpha,
                lo: 0.0,
                hi: 0.5,
            });
        }
        Ok(ProfileParams {
            alpha,
            c1: 6.0 / (alpha * alpha * alpha),
        })
    }

    /// Level `1-α` above which a node belongs to the high phase.
    #[inline]
    pub fn threshold(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// Mass density: 0 up to `1-α`, then `(c1/2)(s-1+α)²`.
#[inline]
pub fn beta_profile(s: f64, p: &ProfileParams) -> f64 {
    let t = s - p.threshold();
    if t > 0.0 {
        0.5 * p.c1 * t * t
    } else {
        0.0
    }
}

#[inline]
pub fn beta_prime(s: f64, p: &ProfileParams) -> f64 {
    let t = s - p.threshold();
    if t > 0.0 {
        p.c1 * t
    } else {
        0.0
    }
}

/// Geodesic metric density: `½(s-1+α)²` below `1-α`, 0 from `1-α` on.
#[inline]
pub fn weight_profile(s: f64, p: &ProfileParams) -> f64 {
    let t = s - p.threshold();
    if t < 0.0 {
        0.5 * t * t
    } else {
        0.0
    }
}

#[inline]
pub fn weight_prime(s: f64, p: &ProfileParams) -> f64 {
    let t = s - p.threshold();
    if t < 0.0 {
        t
    } else {
        0.0
    }
}
