//! Intersection-count bounds for each curve family, plus an empirical
//! sign-change zero counter used to audit them.
//!
//! A formula `B(x, d)` dominates the number of intersections of the curve
//! segment up to parameter `x` with any nonzero plane algebraic curve of
//! degree at most `d`. Formulas are nondecreasing in both arguments on
//! their domains; evaluation rounds upward.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bigfloat::{self, Bf, Round};
use crate::expr::QRat;
use crate::{Error, Result};

const UP: Round = Round::Ceil;

/// Family intersection-count bound with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BezoutFormula {
    /// 4 d (F+G) l q (d(F+G) + l + q + 2)^2 (floor(w log x / pi) + 1),
    /// where `w >= 1` scales the window count for frequency-scaled angular
    /// arguments (1 for the plain family).
    Spiral { f_exp: QRat, g_exp: QRat, ell: u32, q: u32, window_scale: QRat },
    /// 4 d l (d + l + 2)^2 (floor(w log x / pi) + 1), with `w` as above.
    SinlogGraph { ell: u32, window_scale: QRat },
    /// c (d + x log_+ x) d : the degree substituted for log T throughout.
    /// The constant c is not explicit in the source bound; it is a
    /// configuration parameter and is flagged in reports.
    Zeta { c: QRat },
    /// c d^2 log_+ d, from the gamma-graph bound at segment log T / delta
    /// with degree log T. The constant c is configurable, as for zeta.
    Gamma { c: QRat, delta: Bf },
    /// sum of c_ij (log_+ x)^i d^j over supplied monomials.
    CustomPolyLogD { monomials: Vec<(u32, u32, QRat)> },
}

impl BezoutFormula {
    /// Evaluate `B(x, d)`, rounded upward.
    pub fn eval(&self, x: &Bf, d: u32, prec: u32) -> Result<Bf> {
        if d == 0 {
            return Err(Error::Input("bezout bound requires degree d >= 1".into()));
        }
        let db = Bf::from_u64(d as u64);
        match self {
            BezoutFormula::Spiral { f_exp, g_exp, ell, q, window_scale } => {
                if !x.is_positive() {
                    return Err(Error::Input("bezout bound requires x > 0".into()));
                }
                let fg = f_exp.to_bf(prec, UP).add(&g_exp.to_bf(prec, UP));
                let lead = db
                    .mul_r(&fg, prec, UP)
                    .mul_r(&Bf::from_u64(*ell as u64 * *q as u64), prec, UP)
                    .mul_pow2(2);
                let inner = db
                    .mul_r(&fg, prec, UP)
                    .add(&Bf::from_u64(*ell as u64 + *q as u64 + 2));
                let windows = log_over_pi_windows(x, window_scale, prec)?;
                Ok(lead
                    .mul_r(&inner.mul_r(&inner, prec, UP), prec, UP)
                    .mul_r(&windows, prec, UP))
            }
            BezoutFormula::SinlogGraph { ell, window_scale } => {
                if !x.is_positive() {
                    return Err(Error::Input("bezout bound requires x > 0".into()));
                }
                let lead = db.mul_r(&Bf::from_u64(*ell as u64), prec, UP).mul_pow2(2);
                let inner = db.add(&Bf::from_u64(*ell as u64 + 2));
                let windows = log_over_pi_windows(x, window_scale, prec)?;
                Ok(lead
                    .mul_r(&inner.mul_r(&inner, prec, UP), prec, UP)
                    .mul_r(&windows, prec, UP))
            }
            BezoutFormula::Zeta { c } => {
                if c.0.numer().to_i64() == Some(0) || !c.0.numer().to_f64().is_some_and(|v| v > 0.0)
                {
                    return Err(Error::Input("zeta bezout constant c must be positive".into()));
                }
                let lx = bigfloat::log_plus(x, prec, UP);
                let inner = db.add(&x.mul_r(&lx, prec, UP));
                Ok(c.to_bf(prec, UP).mul_r(&inner, prec, UP).mul_r(&db, prec, UP))
            }
            BezoutFormula::Gamma { c, delta: _ } => {
                let ld = bigfloat::log_plus(&db, prec, UP);
                Ok(c.to_bf(prec, UP)
                    .mul_r(&db.mul_r(&db, prec, UP), prec, UP)
                    .mul_r(&ld, prec, UP))
            }
            BezoutFormula::CustomPolyLogD { monomials } => {
                let lx = bigfloat::log_plus(x, prec, UP);
                let mut acc = Bf::zero();
                for (i, j, coef) in monomials {
                    let term = coef
                        .to_bf(prec, UP)
                        .mul_r(&lx.pow_i64(*i as i64, prec, UP), prec, UP)
                        .mul_r(&db.pow_i64(*j as i64, prec, UP), prec, UP);
                    acc = acc.add_r(&term, prec, UP);
                }
                Ok(acc)
            }
        }
    }

    /// Published contribution of this factor to the final bound's
    /// `(log T, log log T)` exponent pair, given the growth kind of the
    /// height control (`phi_power = true` when phi grows like a power of T).
    pub fn shape(&self, phi_power: bool) -> (i64, i64) {
        match self {
            // d * d^2 * log(phi): three degree factors plus the window count
            BezoutFormula::Spiral { .. } => {
                if phi_power {
                    (4, 0)
                } else {
                    (3, 1)
                }
            }
            BezoutFormula::SinlogGraph { .. } => (4, 0),
            // d * phi * log(phi) with phi comparable to log T
            BezoutFormula::Zeta { .. } => (2, 1),
            BezoutFormula::Gamma { .. } => (0, 1),
            BezoutFormula::CustomPolyLogD { monomials } => {
                let mut total_deg = 0i64; // max (i + j): phi a power of T
                let mut d_deg = 0i64; // max j alone
                let mut has_log_factor = false;
                for (i, j, _) in monomials {
                    total_deg = total_deg.max(*i as i64 + *j as i64);
                    d_deg = d_deg.max(*j as i64);
                    if *i > 0 {
                        has_log_factor = true;
                    }
                }
                if phi_power {
                    (total_deg, 0)
                } else {
                    (d_deg, i64::from(has_log_factor))
                }
            }
        }
    }

    /// Whether the formula's leading constant is non-explicit in its source
    /// and therefore configuration-supplied.
    pub fn has_configured_constant(&self) -> bool {
        matches!(
            self,
            BezoutFormula::Zeta { .. } | BezoutFormula::Gamma { .. } | BezoutFormula::CustomPolyLogD { .. }
        )
    }
}

/// floor(w log x / pi) + 1, clamped below at 1; rounded upward.
fn log_over_pi_windows(x: &Bf, w: &QRat, prec: u32) -> Result<Bf> {
    let lx = bigfloat::ln(x, prec, UP);
    if !lx.is_positive() {
        return Ok(Bf::one());
    }
    let ratio = w
        .to_bf(prec, UP)
        .mul_r(&lx, prec, UP)
        .div_r(&bigfloat::pi(prec), prec, UP);
    let fl = ratio.floor_bigint();
    Ok(Bf::from_bigint(fl + 1).max_bf(&Bf::one()))
}

/// Certified lower bound on the number of zeros of `h` on `[lo, hi]` by
/// sign changes on a refining grid. Points where `|h|` falls below the
/// resolution threshold are treated as sign-unknown and never counted, so
/// the result is a lower bound.
pub fn empirical_zero_count<H: Fn(&Bf) -> Result<Bf>>(
    h: H,
    lo: &Bf,
    hi: &Bf,
    resolution: usize,
    prec: u32,
) -> Result<usize> {
    if hi <= lo {
        return Err(Error::Input("empty interval for zero counting".into()));
    }
    let n = resolution.max(8);
    let width = hi.sub(lo);
    let step = width.div_r(&Bf::from_u64(n as u64), prec, Round::Nearest);
    let threshold_exp = -((prec / 2) as i64);
    let mut count = 0usize;
    let mut prev_sign: i8 = 0;
    let mut errors = 0usize;
    for i in 0..=n {
        let x = lo.add(&step.mul(&Bf::from_u64(i as u64))).min_bf(hi);
        let sign = match h(&x) {
            Ok(v) => {
                if v.is_zero() || v.msb_exp() < v.abs().max_bf(&Bf::one()).msb_exp() + threshold_exp
                {
                    0
                } else if v.is_negative() {
                    -1
                } else {
                    1
                }
            }
            Err(_) => {
                errors += 1;
                0
            }
        };
        if sign != 0 {
            if prev_sign != 0 && sign != prev_sign {
                count += 1;
            }
            prev_sign = sign;
        }
    }
    if errors > n / 2 {
        return Err(Error::Domain(
            "zero counting failed: most evaluations errored".into(),
        ));
    }
    Ok(count)
}
