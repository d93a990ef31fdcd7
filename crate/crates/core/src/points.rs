//! Rational-point enumeration, detection and curve scanning.
//!
//! Enumeration yields every reduced fraction of bounded height in ascending
//! order (Farey-neighbor stepping plus reciprocals). Detection recovers the
//! unique rational of height at most `T` within a small radius of a computed
//! value via continued-fraction convergents; distinct rationals of height
//! `<= T` are at least `1/T^2` apart, so a radius below `1/(4T^2)` makes the
//! answer unambiguous. Scans produce candidate points only; certification is
//! reserved for symbolically known families or exact evaluation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigfloat::{Bf, Round};
use crate::expr::Expr;
use crate::{Error, Result};

/// Certification status of a located point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    /// Membership verified symbolically or by exact arithmetic.
    Certified,
    /// Numerically indistinguishable from a curve point at working precision.
    Candidate,
}

/// A rational plane point found on (or near) a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalPoint {
    pub x: crate::expr::QRat,
    pub y: crate::expr::QRat,
    pub height: u64,
    pub parameter: Option<Bf>,
    pub status: PointStatus,
}

impl RationalPoint {
    pub fn new(
        x: BigRational,
        y: BigRational,
        parameter: Option<Bf>,
        status: PointStatus,
    ) -> Option<RationalPoint> {
        let height = point_height(&x, &y)?;
        Some(RationalPoint {
            x: crate::expr::QRat(x),
            y: crate::expr::QRat(y),
            height,
            parameter,
            status,
        })
    }

    fn sort_key(&self) -> (BigRational, BigRational) {
        (self.x.0.clone(), self.y.0.clone())
    }
}

/// Height of a reduced rational: max(|numerator|, denominator).
pub fn rational_height(q: &BigRational) -> Option<u64> {
    let n = q.numer().abs().to_u64()?;
    let d = q.denom().to_u64()?;
    Some(n.max(d))
}

/// Height of a rational plane point.
pub fn point_height(x: &BigRational, y: &BigRational) -> Option<u64> {
    Some(rational_height(x)?.max(rational_height(y)?))
}

/// Every reduced `p/q` with `|p| <= t` and `1 <= q <= t`, ascending.
pub fn enumerate_rationals(t: u64) -> Result<Vec<BigRational>> {
    if t == 0 {
        return Err(Error::Input("height bound must be >= 1".into()));
    }
    // Farey sequence of order t on (0, 1): neighbor stepping.
    // (a/b, c/d) consecutive; next term k c - a / (k d - b), k = floor((t+b)/d).
    let mut unit: Vec<(u64, u64)> = Vec::new();
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, t);
    while c <= t {
        if a > 0 {
            unit.push((a, b));
        }
        let k = (t + b) / d;
        let (na, nb) = (c, d);
        c = k * c - a;
        d = k * d - b;
        a = na;
        b = nb;
        if a == 1 && b == 1 {
            break;
        }
    }
    // unit holds (0,1) exclusive .. (1,1) exclusive ascending fractions p/q in (0,1)
    let mut positives: Vec<BigRational> = Vec::with_capacity(2 * unit.len() + 2);
    for (p, q) in &unit {
        positives.push(BigRational::new(BigInt::from(*p), BigInt::from(*q)));
    }
    positives.push(BigRational::one());
    // reciprocals of (0,1) fractions, descending in the unit list -> ascending beyond 1
    for (p, q) in unit.iter().rev() {
        positives.push(BigRational::new(BigInt::from(*q), BigInt::from(*p)));
    }
    let mut out = Vec::with_capacity(2 * positives.len() + 1);
    for r in positives.iter().rev() {
        out.push(-r.clone());
    }
    out.push(BigRational::zero());
    out.extend(positives);
    Ok(out)
}

/// Indices of the slice of `sorted` lying within `[lo, hi]`.
pub fn rationals_in_window(sorted: &[BigRational], lo: &BigRational, hi: &BigRational) -> (usize, usize) {
    let start = sorted.partition_point(|r| r < lo);
    let end = sorted.partition_point(|r| r <= hi);
    (start, end)
}

/// The unique rational of height `<= t` within `eps` of `value`, if any.
/// Requires `eps < 1/(4 t^2)` so at most one such rational exists; the
/// search walks the continued-fraction convergents of `value`, and every
/// comparison is exact.
pub fn detect_rational(value: &Bf, eps: &Bf, t: u64) -> Result<Option<BigRational>> {
    if t == 0 {
        return Err(Error::Input("height bound must be >= 1".into()));
    }
    if !eps.is_positive() {
        return Err(Error::Input("error radius must be positive".into()));
    }
    // eps * 4 t^2 < 1
    let four_t2 = Bf::from_u64(t).mul(&Bf::from_u64(t)).mul_pow2(2);
    if eps.mul(&four_t2) >= Bf::one() {
        return Err(Error::Input(format!(
            "error radius {} too large for height bound {t}: uniqueness not guaranteed",
            eps.to_dec_string(6)
        )));
    }
    // All comparisons in integer arithmetic: with v = vn/vd (vd = 2^k) and
    // eps = em 2^ee, the test |v - p/q| <= eps is
    // |vn q - p vd| * 2^(-ee... ) <= em q vd, handled by shifting whichever
    // side has the negative power of two.
    let (vn, vd) = value.to_rational();
    let (en, ed) = eps.to_rational(); // eps = en/ed, ed = 2^j
    let t_big = BigInt::from(t);
    let check = |p: &BigInt, q: &BigInt| -> bool {
        if p.abs() > t_big || *q > t_big {
            return false;
        }
        // |vn q - p vd| * ed <= en * q * vd
        let lhs = (&vn * q - p * &vd).abs() * &ed;
        let rhs = &en * q * &vd;
        lhs <= rhs
    };
    // continued fraction of v
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut num = vn.clone();
    let mut den = vd.clone();
    let (mut p_cur, mut q_cur);
    {
        let a0 = num.div_floor(&den);
        p_cur = a0.clone();
        q_cur = BigInt::one();
        let rem = &num - &a0 * &den;
        num = den;
        den = rem;
    }
    if check(&p_cur, &q_cur) {
        return Ok(Some(BigRational::new(p_cur, q_cur)));
    }
    while !den.is_zero() && q_cur <= t_big {
        let a = num.div_floor(&den);
        let rem = &num - &a * &den;
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        num = den;
        den = rem;
        if q_cur > t_big {
            break;
        }
        if check(&p_cur, &q_cur) {
            return Ok(Some(BigRational::new(p_cur, q_cur)));
        }
    }
    Ok(None)
}

/// Default detection radius for height bound `t` at working precision
/// `prec`: the smaller of `1/(8 t^2)` and `2^(-prec/2)`.
pub fn detection_radius(t: u64, prec: u32) -> Bf {
    let cap = Bf::one().div_r(
        &Bf::from_u64(t).mul(&Bf::from_u64(t)).mul_pow2(3),
        64,
        Round::Floor,
    );
    let working = Bf::from_parts(BigInt::one(), -((prec / 2) as i64));
    cap.min_bf(&working)
}

/// Working precision sufficient for detection at height bound `t`.
pub fn scan_precision(t: u64, requested: u32) -> u32 {
    // need 2^(-prec/2) comfortably below 1/(8 t^2)
    let need = (2.0 * (8.0 * (t as f64) * (t as f64)).log2()).ceil() as u32 + 64;
    requested.max(need)
}

/// One candidate produced by a scan.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub x: BigRational,
    pub y: BigRational,
    pub parameter: Option<Bf>,
}

/// Scan outcome: candidates plus bookkeeping.
#[derive(Debug, Clone, Default)]
pub struct ScanOutcome {
    pub candidates: Vec<Candidate>,
    pub eval_errors: Vec<String>,
    /// True when the method cannot claim completeness (parametric scans).
    pub undercount_possible: bool,
}

/// Scan the graph `y = g(x)` for rational points of height `<= t` with
/// `x` in `[lo, hi]`. Every rational abscissa of admissible height in the
/// window is tested; candidate ordinates are detected at working precision.
pub fn scan_graph(
    g: &Expr,
    lo: &BigRational,
    hi: &BigRational,
    t: u64,
    prec: u32,
) -> Result<ScanOutcome> {
    let prec = scan_precision(t, prec);
    let eps = detection_radius(t, prec);
    // coarse pass: a cheap evaluation at the widest admissible radius
    // filters out almost every abscissa; hits are re-checked tightly
    let coarse_prec = 64;
    let coarse_eps = detection_radius(t, coarse_prec);
    let all = enumerate_rationals(t)?;
    let (s, e) = rationals_in_window(&all, lo, hi);
    let xs = &all[s..e];
    let results: Vec<(Option<Candidate>, Option<String>)> = xs
        .par_iter()
        .map(|x| {
            let xb_c = Bf::from_ratio(x.numer(), x.denom(), coarse_prec + 32, Round::Nearest);
            match g.eval(&xb_c, coarse_prec) {
                Ok(y) => match detect_rational(&y, &coarse_eps, t) {
                    Ok(Some(_)) => {
                        let xb = Bf::from_ratio(x.numer(), x.denom(), prec + 32, Round::Nearest);
                        match g.eval(&xb, prec) {
                            Ok(y_full) => match detect_rational(&y_full, &eps, t) {
                                Ok(Some(r)) => {
                                    if point_height(x, &r).is_some_and(|h| h <= t) {
                                        (
                                            Some(Candidate {
                                                x: x.clone(),
                                                y: r,
                                                parameter: Some(xb),
                                            }),
                                            None,
                                        )
                                    } else {
                                        (None, None)
                                    }
                                }
                                Ok(None) => (None, None),
                                Err(err) => (None, Some(format!("detect at x = {x}: {err}"))),
                            },
                            Err(err) => (None, Some(format!("eval at x = {x}: {err}"))),
                        }
                    }
                    Ok(None) => (None, None),
                    Err(err) => (None, Some(format!("detect at x = {x}: {err}"))),
                },
                Err(err) => (None, Some(format!("eval at x = {x}: {err}"))),
            }
        })
        .collect();
    let mut out = ScanOutcome::default();
    for (cand, err) in results {
        if let Some(c) = cand {
            out.candidates.push(c);
        }
        if let Some(e) = err {
            out.eval_errors.push(e);
        }
    }
    Ok(out)
}

/// Largest number of candidate levels examined per scan cell.
const CELL_BUDGET: usize = 64;

/// Scan a parametrized curve `(f(x), g(x))` for rational points of height
/// `<= t`, parameters in `[lo, hi]`. The interval is split into
/// `resolution` cells; on each cell the rationals crossed by `f` are
/// located by bisection and the second coordinate is then tested. The
/// result is a lower-bound scan: a resolution too coarse (or a cell
/// crossing more levels than the per-cell budget) may miss points.
pub fn scan_parametric(
    f: &Expr,
    g: &Expr,
    lo: &Bf,
    hi: &Bf,
    t: u64,
    resolution: usize,
    prec: u32,
) -> Result<ScanOutcome> {
    if hi <= lo {
        return Err(Error::Input("empty parameter window".into()));
    }
    let prec = scan_precision(t, prec);
    let eps = detection_radius(t, prec);
    let n = resolution.max(16);
    let all = enumerate_rationals(t)?;
    let width = hi.sub(lo);
    let step = width.div_r(&Bf::from_u64(n as u64), prec, Round::Nearest);
    let cells: Vec<usize> = (0..n).collect();
    let results: Vec<(Vec<Candidate>, Vec<String>)> = cells
        .par_iter()
        .map(|&i| {
            let a = lo.add(&step.mul(&Bf::from_u64(i as u64)));
            let b = if i + 1 == n {
                hi.clone()
            } else {
                lo.add(&step.mul(&Bf::from_u64(i as u64 + 1)))
            };
            scan_cell(f, g, &a, &b, &all, &eps, t, prec)
        })
        .collect();
    let mut out = ScanOutcome {
        undercount_possible: true,
        ..Default::default()
    };
    for (cands, errs) in results {
        out.candidates.extend(cands);
        out.eval_errors.extend(errs);
    }
    dedup_candidates(&mut out.candidates);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn scan_cell(
    f: &Expr,
    g: &Expr,
    a: &Bf,
    b: &Bf,
    all_rationals: &[BigRational],
    eps: &Bf,
    t: u64,
    prec: u32,
) -> (Vec<Candidate>, Vec<String>) {
    let mut cands = Vec::new();
    let mut errs = Vec::new();
    let fa = match f.eval(a, prec) {
        Ok(v) => v,
        Err(e) => {
            errs.push(format!("eval f at cell start: {e}"));
            return (cands, errs);
        }
    };
    let fb = match f.eval(b, prec) {
        Ok(v) => v,
        Err(e) => {
            errs.push(format!("eval f at cell end: {e}"));
            return (cands, errs);
        }
    };
    let (mut rlo, mut rhi) = (fa.min_bf(&fb), fa.max_bf(&fb));
    // conservative widening by the observed variation
    let pad = rhi.sub(&rlo).mul_pow2(-3);
    rlo = rlo.sub(&pad);
    rhi = rhi.add(&pad);
    let to_rat = |v: &Bf| {
        let (num, den) = v.to_rational();
        BigRational::new(num, den)
    };
    let (s, e) = rationals_in_window(all_rationals, &to_rat(&rlo), &to_rat(&rhi));
    // cap the per-cell work; the scan is a lower bound by construction
    let stride = ((e - s) / CELL_BUDGET).max(1);
    for r in all_rationals[s..e].iter().step_by(stride) {
        let rb = Bf::from_ratio(r.numer(), r.denom(), prec, Round::Nearest);
        let da = fa.sub(&rb);
        let db = fb.sub(&rb);
        if da.is_zero() || db.is_zero() || (da.is_negative() != db.is_negative()) {
            // bracket refinement for f(x) = r (secant with Illinois
            // weighting, bisection fallback), localized to ~prec/2 bits:
            // the second coordinate only needs the detection radius
            let mut x_lo = a.clone();
            let mut x_hi = b.clone();
            let mut d_lo = da.clone();
            let mut d_hi = db.clone();
            let mut last_side = 0i8;
            let mut ok = true;
            for _ in 0..(prec as usize / 2 + 32) {
                let denom = d_hi.sub(&d_lo);
                let mut mid = if denom.is_zero() {
                    x_lo.add(&x_hi).mul_pow2(-1)
                } else {
                    let step = d_hi
                        .mul(&x_hi.sub(&x_lo))
                        .div_r(&denom, prec, Round::Nearest);
                    x_hi.sub(&step)
                };
                if mid <= x_lo || mid >= x_hi {
                    mid = x_lo.add(&x_hi).mul_pow2(-1);
                }
                let mid = mid.round(prec + 16, Round::Nearest);
                match f.eval(&mid, prec) {
                    Ok(fm) => {
                        let dm = fm.sub(&rb);
                        if dm.is_zero() {
                            x_lo = mid.clone();
                            x_hi = mid;
                            break;
                        }
                        if dm.is_negative() == d_lo.is_negative() {
                            x_lo = mid;
                            d_lo = dm;
                            if last_side == -1 {
                                d_hi = d_hi.mul_pow2(-1);
                            }
                            last_side = -1;
                        } else {
                            x_hi = mid;
                            d_hi = dm;
                            if last_side == 1 {
                                d_lo = d_lo.mul_pow2(-1);
                            }
                            last_side = 1;
                        }
                    }
                    Err(e) => {
                        errs.push(format!("crossing refinement eval: {e}"));
                        ok = false;
                        break;
                    }
                }
                let scale = x_hi.msb_exp().max(x_lo.msb_exp()).max(0);
                if x_hi.sub(&x_lo).msb_exp() < scale.saturating_sub(prec as i64 / 2 + 24) {
                    break;
                }
            }
            if !ok {
                continue;
            }
            let xstar = x_lo.add(&x_hi).mul_pow2(-1).round(prec + 16, Round::Nearest);
            match g.eval(&xstar, prec) {
                Ok(y) => {
                    if let Ok(Some(ry)) = detect_rational(&y, eps, t) {
                        if point_height(r, &ry).is_some_and(|h| h <= t) {
                            cands.push(Candidate {
                                x: r.clone(),
                                y: ry,
                                parameter: Some(xstar),
                            });
                        }
                    }
                }
                Err(e) => errs.push(format!("eval g at crossing: {e}")),
            }
        }
    }
    (cands, errs)
}

/// Sort candidates and drop exact duplicates (by the rational pair).
pub fn dedup_candidates(cands: &mut Vec<Candidate>) {
    cands.sort_by(|p, q| (&p.x, &p.y).cmp(&(&q.x, &q.y)));
    cands.dedup_by(|p, q| p.x == q.x && p.y == q.y);
}

/// Merge candidates with a certified list into deduplicated points;
/// certified points win over coinciding candidates.
pub fn merge_points(
    certified: Vec<RationalPoint>,
    candidates: Vec<Candidate>,
) -> Vec<RationalPoint> {
    let mut out = certified;
    for c in candidates {
        let exists = out.iter().any(|p| p.x.0 == c.x && p.y.0 == c.y);
        if !exists {
            if let Some(p) = RationalPoint::new(c.x, c.y, c.parameter, PointStatus::Candidate) {
                out.push(p);
            }
        }
    }
    out.sort_by_key(|p| p.sort_key());
    out
}
