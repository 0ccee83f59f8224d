//! Simultaneous Diophantine approximation by exhaustive Dirichlet scan, and
//! the rationalization of real weight coordinates into integers.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, serde_bigint, serde_rat, Rational};

/// Largest `Q^d` the scan will walk.
pub const MAX_SCAN: u128 = 200_000_000;

/// Retries of [`rationalize_with_tolerance`] (each doubling `Q`).
pub const MAX_RETRIES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletResult {
    pub q: u64,
    #[serde(with = "serde_bigint::vec")]
    pub p: Vec<BigInt>,
    #[serde(rename = "Q")]
    pub big_q: u64,
    /// `|q·xᵢ − pᵢ|`, exactly.
    #[serde(with = "serde_rat::vec")]
    pub errors: Vec<Rational>,
}

impl DirichletResult {
    pub fn max_error(&self) -> Rational {
        self.errors.iter().cloned().max().unwrap_or_else(Rational::zero)
    }

    pub fn errors_f64(&self) -> Vec<f64> {
        self.errors.iter().map(rational::to_f64).collect()
    }
}

fn scan_limit(big_q: u64, d: usize) -> Result<u128> {
    let mut limit: u128 = 1;
    for _ in 0..d {
        limit = limit.saturating_mul(big_q as u128);
    }
    if limit > MAX_SCAN {
        return Err(Error::BoundExceeded { what: "Dirichlet scan length Q^d".into(), estimated: limit, cap: MAX_SCAN });
    }
    Ok(limit)
}

fn approximation(x: &[Rational], q: u64) -> (Vec<BigInt>, Vec<Rational>) {
    let qr = Rational::from_integer(BigInt::from(q));
    let scaled: Vec<Rational> = x.iter().map(|xi| xi * &qr).collect();
    let p: Vec<BigInt> = scaled.iter().map(rational::round).collect();
    let errors = scaled.iter().zip(&p).map(|(s, pi)| (s - Rational::from_integer(pi.clone())).abs()).collect();
    (p, errors)
}

/// Smallest `q` in `1 ≤ q < Q^d` with `|q·xᵢ − pᵢ| ≤ 1/Q` for all `i`.
pub fn dirichlet(x: &[Rational], big_q: u64) -> Result<DirichletResult> {
    if big_q < 2 {
        return Err(Error::domain(format!("Q must be at least 2, got {big_q}")));
    }
    if x.is_empty() {
        return Err(Error::domain("need at least one coordinate"));
    }
    let limit = scan_limit(big_q, x.len())?;
    let bound = Rational::new(BigInt::one(), BigInt::from(big_q));
    let frac: Vec<Rational> = x.iter().map(|xi| xi - xi.floor()).collect();
    for q in 1..limit {
        let q = q as u64;
        let qr = Rational::from_integer(BigInt::from(q));
        // fractional parts decide admissibility; avoid big products of the integer parts
        let ok = frac.iter().all(|f| {
            let s = f * &qr;
            let e = (&s - s.round()).abs();
            e <= bound
        });
        if ok {
            let (p, errors) = approximation(x, q);
            return Ok(DirichletResult { q, p, big_q, errors });
        }
    }
    Err(Error::invariant(format!("Dirichlet scan exhausted for Q = {big_q}")))
}

/// [`dirichlet`] on floats, each converted exactly to its dyadic value.
pub fn dirichlet_f64(x: &[f64], big_q: u64) -> Result<DirichletResult> {
    let exact = x
        .iter()
        .map(|&v| Rational::from_float(v).ok_or_else(|| Error::domain(format!("non-finite input {v}"))))
        .collect::<Result<Vec<_>>>()?;
    dirichlet(&exact, big_q)
}

/// Integer coordinates `p` and multiplier `scale` with
/// `|scale·bᵢ − pᵢ| < tolerance` and `pᵢ ≠ 0` whenever `bᵢ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rationalized {
    #[serde(with = "serde_bigint::vec")]
    pub p: Vec<BigInt>,
    pub scale: u64,
    #[serde(rename = "Q")]
    pub big_q: u64,
    #[serde(with = "serde_rat")]
    pub tolerance: Rational,
    #[serde(with = "serde_rat::vec")]
    pub errors: Vec<Rational>,
    /// How many times `Q` was doubled to satisfy the nonvanishing condition.
    pub retries: usize,
}

impl Rationalized {
    pub fn p_rational(&self) -> Vec<Rational> {
        self.p.iter().map(|x| Rational::from_integer(x.clone())).collect()
    }
}

/// Rationalizes with tolerance `1/(2Rr)`.
pub fn rationalize_character(b: &[Rational], big_r: &Rational, r: usize) -> Result<Rationalized> {
    if !big_r.is_positive() {
        return Err(Error::domain("R must be positive"));
    }
    if r == 0 {
        return Err(Error::domain("rank must be positive"));
    }
    let tol = (rational::int(2) * big_r * rational::int(r as i64)).recip();
    rationalize_with_tolerance(b, &tol)
}

/// Picks the smallest `Q` with `1/Q < tolerance`, runs the Dirichlet scan,
/// and doubles `Q` while some nonzero `bᵢ` rounds to zero.
pub fn rationalize_with_tolerance(b: &[Rational], tolerance: &Rational) -> Result<Rationalized> {
    if b.iter().all(Zero::is_zero) {
        return Err(Error::domain("cannot rationalize the zero character"));
    }
    if !tolerance.is_positive() {
        return Err(Error::domain("tolerance must be positive"));
    }
    let mut big_q = (tolerance.recip().floor().to_integer() + BigInt::one())
        .to_u64()
        .ok_or_else(|| Error::domain("tolerance too small"))?;
    for retries in 0..=MAX_RETRIES {
        let res = dirichlet(b, big_q)?;
        let nonvanishing = b.iter().zip(&res.p).all(|(bi, pi)| bi.is_zero() || !pi.is_zero());
        if nonvanishing {
            debug_assert!(res.errors.iter().all(|e| e < tolerance));
            return Ok(Rationalized {
                p: res.p,
                scale: res.q,
                big_q,
                tolerance: tolerance.clone(),
                errors: res.errors,
                retries,
            });
        }
        big_q = big_q.checked_mul(2).ok_or_else(|| Error::domain("Q overflowed while retrying"))?;
    }
    Err(Error::invariant(format!("nonvanishing rationalization not found after {MAX_RETRIES} retries")))
}
