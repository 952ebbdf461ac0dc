//! Brute-force reference for small instances: linear-space sums in
//! double-double arithmetic (~32 significant digits), with no log-space tricks
//! and no code shared with the library.

#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    const LN2: Dd = Dd {
        hi: 0.693_147_180_559_945_3,
        lo: 2.319_046_813_846_299_6e-17,
    };

    pub fn new(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn ldexp(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn powi(self, k: u64) -> Dd {
        (0..k).fold(Dd::ONE, |acc, _| acc * self)
    }

    /// exp by range reduction `a = k ln2 + r`, Taylor series on `r / 2^10`, then squaring.
    pub fn exp(self) -> Dd {
        let k = (self.hi / Self::LN2.hi).round();
        let r = self - Self::LN2 * Dd::new(k);
        let r = r.ldexp(-10);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for j in 1..=24 {
            term = term * r / Dd::new(j as f64);
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
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
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::new(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    Unit,
    Binomial,
    Uniform,
}

fn choose(n: u64, i: u64) -> f64 {
    // exact as an integer for the small n used here
    let mut c: u128 = 1;
    for j in 0..i as u128 {
        c = c * (n as u128 - j) / (j + 1);
    }
    assert!(c < (1u128 << 53), "C({n},{i}) not exactly representable");
    c as f64
}

/// Prior weight `P[k = i]` in double-double.
pub fn prior_weight(kind: OracleKind, n: u64, p: f64, i: u64) -> Dd {
    let q = Dd::ONE - Dd::new(p);
    match kind {
        OracleKind::Uniform => Dd::ONE / Dd::new((n + 1) as f64),
        OracleKind::Unit => {
            if i == n {
                Dd::new(p)
            } else if i == 0 {
                q
            } else {
                Dd::ZERO
            }
        }
        OracleKind::Binomial => Dd::new(choose(n, i)) * Dd::new(p).powi(i) * q.powi(n - i),
    }
}

/// Unnormalized posterior weights `P[k=i] (lambda/2) e^{-lambda |x - i|}`.
pub fn joint_weights(kind: OracleKind, n: u64, p: f64, lambda: f64, x: f64) -> Vec<Dd> {
    let half_lambda = Dd::new(lambda) / Dd::new(2.0);
    (0..=n)
        .map(|i| {
            let dist = (Dd::new(x) - Dd::new(i as f64)).abs();
            let kernel = (-(Dd::new(lambda) * dist)).exp();
            prior_weight(kind, n, p, i) * half_lambda * kernel
        })
        .collect()
}

pub fn posterior(kind: OracleKind, n: u64, p: f64, lambda: f64, x: f64) -> Vec<f64> {
    let w = joint_weights(kind, n, p, lambda, x);
    let z = w.iter().fold(Dd::ZERO, |a, b| a + *b);
    w.iter().map(|v| (*v / z).to_f64()).collect()
}

/// `c_s E[(k - k*)^+ | x]`.
pub fn premium(kind: OracleKind, n: u64, p: f64, lambda: f64, k_star: u64, x: f64, c_s: f64) -> f64 {
    let w = joint_weights(kind, n, p, lambda, x);
    let z = w.iter().fold(Dd::ZERO, |a, b| a + *b);
    let num = w
        .iter()
        .enumerate()
        .filter(|(i, _)| *i as u64 > k_star)
        .fold(Dd::ZERO, |acc, (i, v)| acc + Dd::new((i as u64 - k_star) as f64) * *v);
    (Dd::new(c_s) * num / z).to_f64()
}

pub fn rel_err(got: f64, expect: f64) -> f64 {
    if got == expect {
        0.0
    } else {
        (got - expect).abs() / got.abs().max(expect.abs())
    }
}
