//! Minimal double-double arithmetic: an unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi) / 2`, good to roughly 106 bits.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: e }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn square(self) -> Self {
        self * self
    }

    fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    /// `exp(self) - 1` for `|self| <= 1`, via halving and squaring.
    fn expm1_small(self) -> Self {
        const HALVINGS: i32 = 9;
        let s = self.ldexp(-HALVINGS);
        // Taylor series: |s| < 2e-3, so 10 terms reach 1e-33
        let mut term = s;
        let mut sum = s;
        for k in 2..=10 {
            term = term * s / Dd::from_f64(k as f64);
            sum = sum + term;
        }
        // (1 + t)^2 - 1 = 2t + t^2
        for _ in 0..HALVINGS {
            sum = sum.ldexp(1) + sum.square();
        }
        sum
    }

    pub fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let m = (self.hi / LN2.hi).round();
        let r = self - LN2 * Dd::from_f64(m);
        (Dd::ONE + r.expm1_small()).ldexp(m as i32)
    }

    /// `ln(1 + self)` for `self > -1`: one Newton step from the `f64` value.
    pub fn ln_1p(self) -> Self {
        let y0 = Dd::from_f64(self.hi.ln_1p());
        y0 + ((Dd::ONE + self) * (-y0).exp() - Dd::ONE)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let s = two_sum(self.hi, b.hi);
        let t = two_sum(self.lo, b.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let p = two_prod(self.hi, b.hi);
        let lo = p.lo + (self.hi * b.lo + self.lo * b.hi);
        quick_two_sum(p.hi, lo)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        quick_two_sum(q1, q2) + Dd::from_f64(q3)
    }
}
