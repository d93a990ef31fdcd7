//! The constructive side of the determinant method: monomial matrices at
//! rational points, exact nullspace extraction, per-interval covering
//! polynomials, and full covering plans over the parameter range.
//!
//! Rank and nullspace computations run in exact integer arithmetic
//! (fraction-free elimination after clearing denominators), so there is no
//! rank tolerance anywhere: a covering polynomial either vanishes exactly at
//! a rational point or it does not.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigfloat::{self, Bf, Round};
use crate::bound::{self, DegreeData};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::points::{PointStatus, RationalPoint};
use crate::slow::{HeightControl, SlowCertificate};
use crate::{Error, Result};

/// Exponents `(a1, a2)` of the plane monomials of degree <= d, in the fixed
/// order used everywhere: a1 major ascending, a2 minor ascending.
pub fn monomial_exponents(d: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for a1 in 0..=d {
        for a2 in 0..=(d - a1) {
            v.push((a1, a2));
        }
    }
    v
}

/// A plane polynomial of degree <= d with integer coefficients, stored in
/// the fixed monomial order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanePoly {
    pub d: u32,
    /// Decimal strings, one per monomial of `monomial_exponents(d)`.
    pub coeffs: Vec<String>,
}

impl PlanePoly {
    pub fn from_bigints(d: u32, coeffs: Vec<BigInt>) -> PlanePoly {
        PlanePoly {
            d,
            coeffs: coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn coeff_bigints(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .map(|s| s.parse().expect("polynomial coefficient"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff_bigints().iter().all(|c| c.is_zero())
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let coeffs = self.coeff_bigints();
        let mut acc = BigRational::zero();
        for ((a1, a2), c) in monomial_exponents(self.d).into_iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let term = BigRational::from(c)
                * pow_rat(x, a1)
                * pow_rat(y, a2);
            acc += term;
        }
        acc
    }

    /// Floating evaluation.
    pub fn eval_bf(&self, x: &Bf, y: &Bf, prec: u32) -> Bf {
        let coeffs = self.coeff_bigints();
        let mut acc = Bf::zero();
        for ((a1, a2), c) in monomial_exponents(self.d).into_iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let term = Bf::from_bigint(c)
                .mul_r(&x.pow_i64(a1 as i64, prec, Round::Nearest), prec, Round::Nearest)
                .mul_r(&y.pow_i64(a2 as i64, prec, Round::Nearest), prec, Round::Nearest);
            acc = acc.add_r(&term, prec, Round::Nearest);
        }
        acc
    }
}

fn pow_rat(x: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Monomial-evaluation matrix: rows indexed by the monomials of degree <= d,
/// columns by the points; entry = x_j^(a1) y_j^(a2), exactly.
#[derive(Debug, Clone)]
pub struct MonomialMatrix {
    pub d: u32,
    pub points: Vec<(BigRational, BigRational)>,
    /// entries[row = monomial][col = point]
    pub entries: Vec<Vec<BigRational>>,
}

impl MonomialMatrix {
    pub fn build(points: &[(BigRational, BigRational)], d: u32) -> MonomialMatrix {
        let exps = monomial_exponents(d);
        let mut entries = vec![vec![BigRational::zero(); points.len()]; exps.len()];
        for (j, (x, y)) in points.iter().enumerate() {
            // powers up front
            let mut xp = vec![BigRational::one()];
            for _ in 0..d {
                xp.push(xp.last().unwrap() * x);
            }
            let mut yp = vec![BigRational::one()];
            for _ in 0..d {
                yp.push(yp.last().unwrap() * y);
            }
            for (i, (a1, a2)) in exps.iter().enumerate() {
                entries[i][j] = &xp[*a1 as usize] * &yp[*a2 as usize];
            }
        }
        MonomialMatrix { d, points: points.to_vec(), entries }
    }
}

/// Fraction-free (Bareiss) row echelon reduction of an integer matrix.
/// Returns the echelon matrix and the pivot column of each pivot row.
fn bareiss_echelon(mut m: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    if rows == 0 {
        return (m, Vec::new());
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        // first row with nonzero entry in column c
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = num / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    (m, pivots)
}

/// A nonzero polynomial of degree <= d vanishing at every input point, by
/// exact nullspace of the point-by-monomial matrix. The basis choice is
/// deterministic: the first non-pivot monomial column gets coefficient one,
/// later free columns zero; the result is content-normalized with the
/// lex-leading coefficient positive.
pub fn covering_polynomial(points: &[(BigRational, BigRational)], d: u32) -> Result<PlanePoly> {
    if points.is_empty() {
        return Err(Error::Input("no points to cover".into()));
    }
    let exps = monomial_exponents(d);
    let mu = exps.len();
    // rows = points, cols = monomials, denominators cleared per row
    let mono = MonomialMatrix::build(points, d);
    let mut int_rows: Vec<Vec<BigInt>> = Vec::with_capacity(points.len());
    for j in 0..points.len() {
        let mut lcm = BigInt::one();
        for i in 0..mu {
            lcm = lcm.lcm(mono.entries[i][j].denom());
        }
        let row: Vec<BigInt> = (0..mu)
            .map(|i| {
                let e = &mono.entries[i][j];
                e.numer() * (&lcm / e.denom())
            })
            .collect();
        int_rows.push(row);
    }
    let (ech, pivots) = bareiss_echelon(int_rows);
    let rank = pivots.len();
    if rank >= mu {
        return Err(Error::Invariant(format!(
            "monomial matrix has full rank {mu}: no degree-{d} curve through all points \
             (vanishing condition violated)"
        )));
    }
    // first non-pivot column
    let free = (0..mu).find(|c| !pivots.contains(c)).expect("rank < mu");
    let mut sol = vec![BigRational::zero(); mu];
    sol[free] = BigRational::one();
    // back-substitution on the echelon system
    for (ri, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = BigRational::zero();
        for c in (pc + 1)..mu {
            if !ech[ri][c].is_zero() && !sol[c].is_zero() {
                acc += BigRational::from(ech[ri][c].clone()) * &sol[c];
            }
        }
        sol[pc] = -acc / BigRational::from(ech[ri][pc].clone());
    }
    // clear denominators and normalize content
    let mut lcm = BigInt::one();
    for s in &sol {
        lcm = lcm.lcm(s.denom());
    }
    let mut ints: Vec<BigInt> = sol
        .iter()
        .map(|s| s.numer() * (&lcm / s.denom()))
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if !g.is_zero() && !g.is_one() {
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
    }
    if let Some(lead) = ints.iter().rposition(|c| !c.is_zero()) {
        if ints[lead].is_negative() {
            for c in ints.iter_mut() {
                *c = -&*c;
            }
        }
    } else {
        return Err(Error::Invariant("nullspace produced the zero polynomial".into()));
    }
    let poly = PlanePoly::from_bigints(d, ints);
    // sanity: exact vanishing
    for (x, y) in points {
        if !poly.eval_rational(x, y).is_zero() {
            return Err(Error::Invariant(
                "covering polynomial does not vanish at an input point".into(),
            ));
        }
    }
    Ok(poly)
}

/// The forced-vanishing inequality
/// `T^(2 d mu) C(d,A,B) L^rho log^(C rho) N / N^rho < 1`, with the left side
/// rounded up. True means the monomial determinant of any admissible point
/// configuration in `[N, N+L]` must vanish.
pub fn vanishing_condition(
    dd: &DegreeData,
    cert: &SlowCertificate,
    t: &Bf,
    n: &Bf,
    l: &Bf,
    prec: u32,
) -> Result<bool> {
    let lhs = vanishing_lhs(dd, cert, t, n, l, prec)?;
    Ok(lhs < Bf::one())
}

fn vanishing_lhs(
    dd: &DegreeData,
    cert: &SlowCertificate,
    t: &Bf,
    n: &Bf,
    l: &Bf,
    prec: u32,
) -> Result<Bf> {
    let up = Round::Ceil;
    let x0 = bound::start_point(cert, prec);
    if n < &x0 {
        return Err(Error::Input("N below the covering start".into()));
    }
    let c_const = bound::det_constant(dd, &cert.a_factor, &cert.b_exp, prec)?;
    let t_pow = t.pow_i64(2 * dd.d as i64 * dd.mu as i64, prec, up);
    let l_pow = l.pow_i64(dd.rho as i64, prec, up);
    let mut v = t_pow.mul_r(&c_const, prec, up).mul_r(&l_pow, prec, up);
    if !cert.c_log.is_zero() {
        let ln_n = bigfloat::ln(n, prec, up);
        let ex = cert.c_log.mul(&Bf::from_u64(dd.rho));
        v = v.mul_r(&bigfloat::pow(&ln_n, &ex, prec, up), prec, up);
    }
    let n_pow = n.pow_i64(dd.rho as i64, prec, Round::Floor);
    Ok(v.div_r(&n_pow, prec, up))
}

/// Report from randomized determinant-inequality trials.
#[derive(Debug, Clone, Serialize)]
pub struct DetCheckReport {
    pub trials: usize,
    pub violations: usize,
    /// max |Delta| / bound over the trials
    pub worst_ratio: f64,
    /// log2 of the largest |Delta| observed (or -inf when all vanish)
    pub worst_det_log2: f64,
    /// trials re-run at doubled precision because the comparison was too
    /// close to certify at the working precision
    pub escalated: usize,
}

/// Sample `mu` parameters in `[N, N+L]` per trial, evaluate the monomial
/// determinant of the parametrization at them, and check it against
/// `C(d,A,B) L^rho log^(C rho) N / N^rho`.
#[allow(clippy::too_many_arguments)]
pub fn determinant_bound_check(
    f: &Expr,
    g: &Expr,
    cert: &SlowCertificate,
    dd: &DegreeData,
    n: &Bf,
    l: &Bf,
    trials: usize,
    seed: u64,
    prec: u32,
) -> Result<DetCheckReport> {
    let x0 = bound::start_point(cert, prec);
    if n < &x0 {
        return Err(Error::Input("N below the covering start".into()));
    }
    // the determinant bound (no T factor here)
    let up = Round::Ceil;
    let c_const = bound::det_constant(dd, &cert.a_factor, &cert.b_exp, prec)?;
    let mut bound_v = c_const.mul_r(&l.pow_i64(dd.rho as i64, prec, up), prec, up);
    if !cert.c_log.is_zero() {
        let ln_n = bigfloat::ln(n, prec, up);
        let ex = cert.c_log.mul(&Bf::from_u64(dd.rho));
        bound_v = bound_v.mul_r(&bigfloat::pow(&ln_n, &ex, prec, up), prec, up);
    }
    bound_v = bound_v.div_r(&n.pow_i64(dd.rho as i64, prec, Round::Floor), prec, up);

    let mu = dd.mu as usize;
    let exps = monomial_exponents(dd.d);
    let outcomes: Vec<std::result::Result<(f64, f64, bool), String>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let mut cols: Vec<Vec<Bf>> = Vec::with_capacity(mu);
            for _ in 0..mu {
                let u_hi: u64 = rng.gen();
                let u_lo: u64 = rng.gen();
                let u = Bf::from_u64(u_hi)
                    .mul_pow2(-64)
                    .add(&Bf::from_u64(u_lo).mul_pow2(-128));
                let x = n.add(&l.mul(&u)).round(prec, Round::Nearest);
                let fv = f.eval(&x, prec).map_err(|e| e.to_string())?;
                let gv = g.eval(&x, prec).map_err(|e| e.to_string())?;
                // monomial column for this point
                let mut fp = vec![Bf::one()];
                let mut gp = vec![Bf::one()];
                for _ in 0..dd.d {
                    fp.push(fp.last().unwrap().mul_r(&fv, prec, Round::Nearest));
                    gp.push(gp.last().unwrap().mul_r(&gv, prec, Round::Nearest));
                }
                let col: Vec<Bf> = exps
                    .iter()
                    .map(|(a1, a2)| {
                        fp[*a1 as usize].mul_r(&gp[*a2 as usize], prec, Round::Nearest)
                    })
                    .collect();
                cols.push(col);
            }
            // square matrix: rows = monomials, cols = points
            let mut mat: Vec<Vec<Bf>> = (0..mu)
                .map(|i| (0..mu).map(|j| cols[j][i].clone()).collect())
                .collect();
            let mut det = bf_determinant(&mut mat, prec).abs();
            // a comparison within a few ulps of the bound cannot be
            // certified at the working precision: redo the trial doubled
            let mut escalated = false;
            if bound_v.is_positive() {
                let margin = bound_v.mul_pow2(-20);
                if det > bound_v.sub(&margin) && det < bound_v.add(&margin) {
                    escalated = true;
                    let wp = prec * 2;
                    let mut mat2: Vec<Vec<Bf>> = Vec::with_capacity(mu);
                    let mut cols2: Vec<Vec<Bf>> = Vec::with_capacity(mu);
                    let mut rng2 = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                    for _ in 0..mu {
                        let u_hi: u64 = rng2.gen();
                        let u_lo: u64 = rng2.gen();
                        let u = Bf::from_u64(u_hi)
                            .mul_pow2(-64)
                            .add(&Bf::from_u64(u_lo).mul_pow2(-128));
                        let x = n.add(&l.mul(&u)).round(wp, Round::Nearest);
                        let fv = f.eval(&x, wp).map_err(|e| e.to_string())?;
                        let gv = g.eval(&x, wp).map_err(|e| e.to_string())?;
                        let mut fp = vec![Bf::one()];
                        let mut gp = vec![Bf::one()];
                        for _ in 0..dd.d {
                            fp.push(fp.last().unwrap().mul_r(&fv, wp, Round::Nearest));
                            gp.push(gp.last().unwrap().mul_r(&gv, wp, Round::Nearest));
                        }
                        cols2.push(
                            exps.iter()
                                .map(|(a1, a2)| {
                                    fp[*a1 as usize].mul_r(&gp[*a2 as usize], wp, Round::Nearest)
                                })
                                .collect(),
                        );
                    }
                    mat2.extend(
                        (0..mu).map(|i| (0..mu).map(|j| cols2[j][i].clone()).collect::<Vec<_>>()),
                    );
                    det = bf_determinant(&mut mat2, wp).abs();
                }
            }
            let ratio = if bound_v.is_positive() {
                det.div_r(&bound_v, 64, Round::Nearest).to_f64()
            } else if det.is_zero() {
                0.0
            } else {
                f64::INFINITY
            };
            let det_log2 = if det.is_zero() {
                f64::NEG_INFINITY
            } else {
                det.msb_exp() as f64
            };
            Ok((ratio, det_log2, escalated))
        })
        .collect();
    let mut report = DetCheckReport {
        trials,
        violations: 0,
        worst_ratio: 0.0,
        worst_det_log2: f64::NEG_INFINITY,
        escalated: 0,
    };
    for o in outcomes {
        match o {
            Ok((r, dl, esc)) => {
                if r > 1.0 {
                    report.violations += 1;
                }
                if r > report.worst_ratio {
                    report.worst_ratio = r;
                }
                if dl > report.worst_det_log2 {
                    report.worst_det_log2 = dl;
                }
                if esc {
                    report.escalated += 1;
                }
            }
            Err(e) => return Err(Error::Domain(format!("trial evaluation failed: {e}"))),
        }
    }
    Ok(report)
}

/// Plain LU determinant with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn bf_determinant(m: &mut [Vec<Bf>], prec: u32) -> Bf {
    let n = m.len();
    let mut det = Bf::one();
    let mut sign = false;
    for c in 0..n {
        // pivot: largest magnitude
        let mut best = c;
        for r in (c + 1)..n {
            if m[r][c].abs() > m[best][c].abs() {
                best = r;
            }
        }
        if m[best][c].is_zero() {
            return Bf::zero();
        }
        if best != c {
            m.swap(best, c);
            sign = !sign;
        }
        let pivot = m[c][c].clone();
        det = det.mul_r(&pivot, prec, Round::Nearest);
        for r in (c + 1)..n {
            if m[r][c].is_zero() {
                continue;
            }
            let factor = m[r][c].div_r(&pivot, prec, Round::Nearest);
            for j in c..n {
                let t = factor.mul_r(&m[c][j], prec, Round::Nearest);
                m[r][j] = m[r][j].sub(&t).round(prec, Round::Nearest);
            }
        }
    }
    if sign {
        det.neg()
    } else {
        det
    }
}

/// One interval of a covering plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanInterval {
    pub left: Bf,
    pub right: Bf,
    pub points: Vec<RationalPoint>,
    /// Nonzero polynomial of degree <= d vanishing on the interval's
    /// certified points (`None` for empty intervals).
    pub polynomial: Option<PlanePoly>,
    /// All certified points evaluate to exactly zero on the polynomial.
    pub exact_vanish: bool,
    pub note: Option<String>,
}

/// Partition of the covering range with one polynomial per occupied
/// interval. Empty intervals are counted but not materialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringPlan {
    pub curve: String,
    pub t: Bf,
    pub d: u32,
    pub start: Bf,
    pub phi_t: Bf,
    pub interval_count: u64,
    pub interval_count_bound: String,
    /// When the certificate has no log factor the covering sequence is the
    /// exact geometric progression with this ratio.
    pub geometric_ratio: Option<Bf>,
    pub verified: bool,
    pub failed_interval: Option<u64>,
    /// Intervals holding at least one point, with their polynomials; the
    /// first element is the interval's index in the covering sequence.
    pub occupied: Vec<(u64, PlanInterval)>,
    pub empty_intervals: u64,
    /// Points that carry no parameter and so cannot be assigned.
    pub unassigned: Vec<RationalPoint>,
}

/// Build the covering plan for a certified curve: partition
/// `[start, phi(T)]` by the covering sequence, assign the supplied points by
/// parameter, and compute a vanishing polynomial per occupied interval.
#[allow(clippy::too_many_arguments)]
pub fn build_covering_plan(
    name: &str,
    cert: &SlowCertificate,
    phi: &HeightControl,
    points: &[RationalPoint],
    t: &Bf,
    prec: u32,
    max_steps: usize,
) -> Result<CoveringPlan> {
    let d = bound::degree_schedule(t, prec)?;
    let dd = bound::degree_data(d)?;
    let start = bound::effective_start(cert, prec);
    let phi_t = phi.eval(t, prec)?.max_bf(&start);
    let n_bound = bound::interval_count_bound(cert, &dd, t, &phi_t, prec)?;

    let mut with_param: Vec<&RationalPoint> =
        points.iter().filter(|p| p.parameter.is_some()).collect();
    let unassigned: Vec<RationalPoint> = points
        .iter()
        .filter(|p| p.parameter.is_none())
        .cloned()
        .collect();
    with_param.sort_by(|a, b| a.parameter.as_ref().unwrap().cmp(b.parameter.as_ref().unwrap()));
    with_param.retain(|p| p.parameter.as_ref().unwrap() >= &start);

    let (interval_count, geometric_ratio, occupied_raw) = if cert.c_log.is_zero() {
        geometric_assignment(cert, &dd, t, &start, &phi_t, &with_param, prec)?
    } else {
        stepped_assignment(cert, &dd, t, &start, &phi_t, &with_param, prec, max_steps)?
    };

    let mut occupied = occupied_raw;
    occupied.par_iter_mut().for_each(|(_, iv)| fit_interval(iv, d));

    let mut verified = true;
    let mut failed = None;
    for (i, iv) in &occupied {
        if iv.polynomial.is_none() || !iv.exact_vanish {
            verified = false;
            failed = Some(*i);
            break;
        }
    }
    if BigInt::from(interval_count) > n_bound {
        verified = false;
    }
    Ok(CoveringPlan {
        curve: name.to_string(),
        t: t.clone(),
        d,
        start,
        phi_t,
        interval_count,
        interval_count_bound: n_bound.to_string(),
        geometric_ratio,
        verified,
        failed_interval: failed,
        empty_intervals: interval_count - occupied.len() as u64,
        occupied,
        unassigned,
    })
}

type Assignment = (u64, Option<Bf>, Vec<(u64, PlanInterval)>);

/// Exact geometric covering (no log factor): x_n = start (1 + ratio)^n.
fn geometric_assignment(
    cert: &SlowCertificate,
    dd: &DegreeData,
    t: &Bf,
    start: &Bf,
    phi_t: &Bf,
    pts: &[&RationalPoint],
    prec: u32,
) -> Result<Assignment> {
    let cp = bound::length_constant(dd, &cert.a_factor, &cert.b_exp, prec)?;
    let t_pow = bigfloat::pow(t, &dd.nu.to_bf(prec, Round::Ceil).neg(), prec, Round::Floor);
    let ratio = cp.mul_r(&t_pow, prec, Round::Floor);
    if !ratio.is_positive() {
        return Err(Error::Precision("covering ratio underflowed".into()));
    }
    let growth = Bf::one().add(&ratio);
    let x_at = |n: u64| -> Bf {
        start.mul_r(&growth.pow_i64(n as i64, prec, Round::Nearest), prec, Round::Nearest)
    };
    // interval_count: smallest n with x_n >= phi_t
    let count = if phi_t <= start {
        0u64
    } else {
        let ln_q = bigfloat::ln(&phi_t.div_r(start, prec, Round::Ceil), prec, Round::Ceil);
        let ln_g = bigfloat::ln(&growth, prec, Round::Floor);
        let mut n = ln_q
            .div_r(&ln_g, 64, Round::Ceil)
            .ceil_bigint()
            .to_u64()
            .ok_or_else(|| Error::Input("covering count overflow".into()))?;
        while n > 0 && &x_at(n - 1) >= phi_t {
            n -= 1;
        }
        while &x_at(n) < phi_t {
            n += 1;
        }
        n
    };
    let ln_g = bigfloat::ln(&growth, prec, Round::Nearest);
    let mut occupied: Vec<(u64, PlanInterval)> = Vec::new();
    for p in pts {
        let param = p.parameter.as_ref().unwrap();
        if param > phi_t {
            continue;
        }
        let mut idx = if param <= start {
            0u64
        } else {
            bigfloat::ln(&param.div_r(start, prec, Round::Nearest), prec, Round::Nearest)
                .div_r(&ln_g, 64, Round::Nearest)
                .floor_bigint()
                .to_u64()
                .unwrap_or(0)
        };
        // settle boundary effects by direct evaluation
        while idx > 0 && param < &x_at(idx) {
            idx -= 1;
        }
        while idx + 1 < count.max(1) && param >= &x_at(idx + 1) {
            idx += 1;
        }
        match occupied.last_mut() {
            Some((i, iv)) if *i == idx => iv.points.push((*p).clone()),
            _ => occupied.push((
                idx,
                PlanInterval {
                    left: x_at(idx),
                    right: x_at(idx + 1),
                    points: vec![(*p).clone()],
                    polynomial: None,
                    exact_vanish: true,
                    note: None,
                },
            )),
        }
    }
    Ok((count, Some(ratio), occupied))
}

/// Stepped covering for certificates with a log factor.
#[allow(clippy::too_many_arguments)]
fn stepped_assignment(
    cert: &SlowCertificate,
    dd: &DegreeData,
    t: &Bf,
    start: &Bf,
    phi_t: &Bf,
    pts: &[&RationalPoint],
    prec: u32,
    max_steps: usize,
) -> Result<Assignment> {
    let cp = bound::length_constant(dd, &cert.a_factor, &cert.b_exp, prec)?;
    let t_pow = bigfloat::pow(t, &dd.nu.to_bf(prec, Round::Ceil).neg(), prec, Round::Floor);
    let gap_scale = cp.mul_r(&t_pow, prec, Round::Floor);
    let mut occupied: Vec<(u64, PlanInterval)> = Vec::new();
    let mut x = start.clone();
    let mut n = 0u64;
    let mut pi = 0usize;
    while &x < phi_t {
        if n as usize > max_steps {
            return Err(Error::Input(format!(
                "covering sequence exceeds the step budget of {max_steps}"
            )));
        }
        let ln_x = bigfloat::ln(&x, prec, Round::Ceil);
        let gap = gap_scale
            .mul_r(&x, prec, Round::Floor)
            .div_r(&bigfloat::pow(&ln_x, &cert.c_log, prec, Round::Ceil), prec, Round::Floor);
        if !gap.is_positive() {
            return Err(Error::Precision("covering step underflowed to zero".into()));
        }
        let next = x.add(&gap).round(prec, Round::Floor);
        let mut bucket: Vec<RationalPoint> = Vec::new();
        while pi < pts.len() {
            let param = pts[pi].parameter.as_ref().unwrap();
            if param < &next || (pi + 1 == pts.len() && param == &next && &next >= phi_t) {
                bucket.push(pts[pi].clone());
                pi += 1;
            } else {
                break;
            }
        }
        if !bucket.is_empty() {
            occupied.push((
                n,
                PlanInterval {
                    left: x.clone(),
                    right: next.clone(),
                    points: bucket,
                    polynomial: None,
                    exact_vanish: true,
                    note: None,
                },
            ));
        }
        x = next;
        n += 1;
    }
    Ok((n, None, occupied))
}

/// Fit one interval: a polynomial through all its points when possible,
/// falling back to the certified subset if stray candidates are in the way.
fn fit_interval(iv: &mut PlanInterval, d: u32) {
    let all: Vec<(BigRational, BigRational)> = iv
        .points
        .iter()
        .map(|p| (p.x.0.clone(), p.y.0.clone()))
        .collect();
    match covering_polynomial(&all, d) {
        Ok(poly) => {
            iv.exact_vanish = verify_vanish(&poly, &iv.points);
            iv.polynomial = Some(poly);
        }
        Err(_) => {
            let certified: Vec<(BigRational, BigRational)> = iv
                .points
                .iter()
                .filter(|p| p.status == PointStatus::Certified)
                .map(|p| (p.x.0.clone(), p.y.0.clone()))
                .collect();
            if certified.is_empty() {
                iv.note = Some("candidates admit no covering polynomial".into());
                iv.exact_vanish = false;
                return;
            }
            match covering_polynomial(&certified, d) {
                Ok(poly) => {
                    iv.note = Some(
                        "polynomial fits certified points only; candidates excluded".into(),
                    );
                    iv.exact_vanish = verify_vanish(&poly, &iv.points);
                    iv.polynomial = Some(poly);
                }
                Err(e) => {
                    iv.note = Some(format!("covering failed: {e}"));
                    iv.exact_vanish = false;
                }
            }
        }
    }
}

fn verify_vanish(poly: &PlanePoly, points: &[RationalPoint]) -> bool {
    points
        .iter()
        .filter(|p| p.status == PointStatus::Certified)
        .all(|p| poly.eval_rational(&p.x.0, &p.y.0).is_zero())
}

/// A compact-mode cover of a parameter interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompactCover {
    pub t: Bf,
    pub d: u32,
    pub lo: Bf,
    pub hi: Bf,
    pub piece_count: u64,
    /// Safety factor applied to the grid suprema.
    pub sup_safety: u32,
    pub verified: bool,
    /// Only the occupied pieces are materialized.
    pub occupied: Vec<PlanInterval>,
}

/// Cover a compact parameter interval by the same determinant argument,
/// with the derivative suprema measured from jets on a per-block grid
/// (times a safety factor of two) instead of certificate bounds.
#[allow(clippy::too_many_arguments)]
pub fn compact_cover(
    f: &Expr,
    g: &Expr,
    lo: &Bf,
    hi: &Bf,
    points: &[RationalPoint],
    t: &Bf,
    d: u32,
    prec: u32,
    blocks: usize,
    grid_per_block: usize,
) -> Result<CompactCover> {
    if hi <= lo {
        return Err(Error::Input("empty compact interval".into()));
    }
    let dd = bound::degree_data(d)?;

    let up = Round::Ceil;
    let t2dmu = t.pow_i64(2 * d as i64 * dd.mu as i64, prec, up);
    let blocks = blocks.max(1);
    let width = hi.sub(lo);
    let bstep = width.div_r(&Bf::from_u64(blocks as u64), prec, Round::Nearest);

    let mut with_param: Vec<&RationalPoint> =
        points.iter().filter(|p| p.parameter.is_some()).collect();
    with_param.sort_by(|a, b| a.parameter.as_ref().unwrap().cmp(b.parameter.as_ref().unwrap()));
    let mut idx = 0usize;
    while idx < with_param.len() && with_param[idx].parameter.as_ref().unwrap() < lo {
        idx += 1;
    }

    let mut occupied: Vec<PlanInterval> = Vec::new();
    let mut piece_count = 0u64;
    let mut verified = true;
    for bi in 0..blocks {
        let b_lo = lo.add(&bstep.mul(&Bf::from_u64(bi as u64)));
        let b_hi = if bi + 1 == blocks {
            hi.clone()
        } else {
            lo.add(&bstep.mul(&Bf::from_u64(bi as u64 + 1)))
        };
        // grid suprema of |(gamma^alpha)^(p)/p!| over the block, x2 safety
        let perm_bound = block_permanent_bound(f, g, &b_lo, &b_hi, &dd, grid_per_block, prec)?;
        // piece length: T^(2 d mu) * perm * L^rho < 1
        let budget = Bf::one().div_r(&t2dmu.mul_r(&perm_bound, prec, up), prec, Round::Floor);
        let exponent = Bf::from_ratio(
            &BigInt::one(),
            &BigInt::from(dd.rho),
            prec,
            Round::Floor,
        );
        let mut piece_len = bigfloat::pow(&budget, &exponent, prec, Round::Floor);
        // strict inequality margin
        piece_len = piece_len.mul_r(&Bf::from_ratio(&BigInt::from(63), &BigInt::from(64), 32, Round::Floor), prec, Round::Floor);
        if !piece_len.is_positive() {
            return Err(Error::Precision("compact piece length underflowed".into()));
        }
        let blen = b_hi.sub(&b_lo);
        let pieces = blen.div_r(&piece_len, 64, up).ceil_bigint();
        let pieces: u64 = pieces.to_u64().ok_or_else(|| {
            Error::Input("compact cover needs too many pieces; lower T or d".into())
        })?;
        let pieces = pieces.max(1);
        piece_count += pieces;
        // assign points in this block to pieces
        while idx < with_param.len() {
            let param = with_param[idx].parameter.as_ref().unwrap().clone();
            if param > b_hi || (bi + 1 < blocks && param == b_hi) {
                break;
            }
            // piece index within the block
            let off = param.sub(&b_lo).div_r(&piece_len, 64, Round::Floor).floor_bigint();
            let k = off.to_u64().unwrap_or(0).min(pieces - 1);
            let p_lo = b_lo.add(&piece_len.mul(&Bf::from_u64(k)));
            let p_hi = p_lo.add(&piece_len).min_bf(&b_hi);
            // merge into an existing occupied piece or open a new one
            let mut target: Option<usize> = None;
            if let Some(last) = occupied.last() {
                if last.left == p_lo {
                    target = Some(occupied.len() - 1);
                }
            }
            let slot = match target {
                Some(i) => i,
                None => {
                    occupied.push(PlanInterval {
                        left: p_lo,
                        right: p_hi,
                        points: Vec::new(),
                        polynomial: None,
                        exact_vanish: true,
                        note: None,
                    });
                    occupied.len() - 1
                }
            };
            occupied[slot].points.push(with_param[idx].clone());
            idx += 1;
        }
    }
    for iv in occupied.iter_mut() {
        fit_interval(iv, d);
        if iv.polynomial.is_none() || !iv.exact_vanish {
            verified = false;
        }
    }
    Ok(CompactCover {
        t: t.clone(),
        d,
        lo: lo.clone(),
        hi: hi.clone(),
        piece_count,
        sup_safety: 2,
        verified,
        occupied,
    })
}

/// Bound on the permanent-style sum of products of derivative suprema of
/// the monomial functions over a block: min of `mu! * prod_p colmax_p` and
/// `prod_i rowsum_i`, from grid-measured jet coefficients times two.
fn block_permanent_bound(
    f: &Expr,
    g: &Expr,
    lo: &Bf,
    hi: &Bf,
    dd: &DegreeData,
    grid: usize,
    prec: u32,
) -> Result<Bf> {
    let mu = dd.mu as usize;
    let order = mu - 1;
    let exps = monomial_exponents(dd.d);
    let grid = grid.max(2);
    let step = hi.sub(lo).div_r(&Bf::from_u64(grid as u64 - 1), prec, Round::Nearest);
    // sups[alpha][p]
    let mut sups = vec![vec![Bf::zero(); mu]; mu];
    for gi in 0..grid {
        let x = lo.add(&step.mul(&Bf::from_u64(gi as u64))).min_bf(hi);
        let fj = f.eval_jet(&x, order, prec)?;
        let gj = g.eval_jet(&x, order, prec)?;
        // powers of the jets
        let one = Jet::constant(x.clone(), Bf::one(), order, prec);
        let mut fp = vec![one.clone()];
        let mut gp = vec![one];
        for _ in 0..dd.d {
            fp.push(fp.last().unwrap().mul(&fj)?);
            gp.push(gp.last().unwrap().mul(&gj)?);
        }
        for (ai, (a1, a2)) in exps.iter().enumerate() {
            let m = fp[*a1 as usize].mul(&gp[*a2 as usize])?;
            for (p, slot) in sups[ai].iter_mut().enumerate() {
                let c = m.coeff(p).abs();
                if c > *slot {
                    *slot = c;
                }
            }
        }
    }
    let up = Round::Ceil;
    for row in sups.iter_mut() {
        for s in row.iter_mut() {
            *s = s.mul_pow2(1); // safety factor 2
        }
    }
    // mu! * prod over p of the column max
    let mut col_prod = Bf::from_bigint(bigfloat::factorial(dd.mu));
    for p in 0..mu {
        let mut cm = Bf::zero();
        for row in sups.iter() {
            if row[p] > cm {
                cm = row[p].clone();
            }
        }
        if cm.is_zero() {
            cm = Bf::from_parts(BigInt::one(), -(prec as i64));
        }
        col_prod = col_prod.mul_r(&cm, prec, up);
    }
    // prod over rows of the row sums
    let mut row_prod = Bf::one();
    for row in sups.iter() {
        let mut rs = Bf::zero();
        for s in row {
            rs = rs.add_r(s, prec, up);
        }
        if rs.is_zero() {
            rs = Bf::from_parts(BigInt::one(), -(prec as i64));
        }
        row_prod = row_prod.mul_r(&rs, prec, up);
    }
    Ok(col_prod.min_bf(&row_prod))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::QRat;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pt(x: BigRational, y: BigRational, param: Option<f64>) -> RationalPoint {
        RationalPoint::new(x, y, param.map(Bf::from_f64), PointStatus::Certified).unwrap()
    }

    #[test]
    fn monomial_order() {
        assert_eq!(
            monomial_exponents(2),
            vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]
        );
        assert_eq!(monomial_exponents(1).len(), 3);
        assert_eq!(monomial_exponents(3).len(), 10);
    }

    #[test]
    fn collinear_points_give_line() {
        // three collinear points, d=1: the line through them
        let pts = vec![
            (rat(0, 1), rat(1, 1)),
            (rat(1, 1), rat(3, 1)),
            (rat(2, 1), rat(5, 1)),
        ];
        let poly = covering_polynomial(&pts, 1).unwrap();
        // y = 2x + 1 -> -1 - y + 0... coefficients in order (0,0),(0,1),(1,0)
        let c = poly.coeff_bigints();
        // must vanish at all three and be a scalar multiple of (1, -1, 2)
        for (x, y) in &pts {
            assert!(poly.eval_rational(x, y).is_zero());
        }
        let expect = [BigInt::from(1), BigInt::from(-1), BigInt::from(2)];
        assert_eq!(c, expect);
    }

    #[test]
    fn parabola_points() {
        let pts = vec![
            (rat(1, 1), rat(1, 1)),
            (rat(2, 1), rat(4, 1)),
            (rat(3, 1), rat(9, 1)),
        ];
        let poly = covering_polynomial(&pts, 2).unwrap();
        assert!(!poly.is_zero());
        for (x, y) in &pts {
            assert!(poly.eval_rational(x, y).is_zero());
        }
    }

    #[test]
    fn circle_recovered_from_five_points() {
        // rational points on x^2 + y^2 = 1 via the Pythagorean parametrization
        let param = |t: BigRational| {
            let t2 = &t * &t;
            let den = &t2 + BigRational::one();
            (
                (BigRational::one() - &t2) / &den,
                (BigRational::from(BigInt::from(2)) * &t) / &den,
            )
        };
        let pts: Vec<_> = [rat(1, 2), rat(1, 3), rat(2, 5), rat(3, 7), rat(5, 4)]
            .into_iter()
            .map(param)
            .collect();
        let poly = covering_polynomial(&pts, 2).unwrap();
        // nullspace is one-dimensional: must be c (x^2 + y^2 - 1)
        // order: (0,0),(0,1),(0,2),(1,0),(1,1),(2,0)
        let c = poly.coeff_bigints();
        assert_eq!(c, vec![
            BigInt::from(-1),
            BigInt::zero(),
            BigInt::from(1),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::from(1)
        ]);
        // permutation invariance (up to the deterministic normalization)
        let mut perm = pts.clone();
        perm.swap(0, 3);
        perm.swap(1, 4);
        let poly2 = covering_polynomial(&perm, 2).unwrap();
        assert_eq!(poly.coeffs, poly2.coeffs);
    }

    #[test]
    fn full_rank_rejected() {
        // 6 generic points admit no degree-1 curve... use mu=3 points in
        // general position for d=1: 3 non-collinear points have rank 3
        let pts = vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 1), rat(0, 1)),
            (rat(0, 1), rat(1, 1)),
            (rat(1, 1), rat(1, 1)),
        ];
        assert!(covering_polynomial(&pts, 1).is_err());
    }

    #[test]
    fn fewer_than_mu_points_always_covered() {
        let pts = vec![(rat(7, 3), rat(-2, 5))];
        let poly = covering_polynomial(&pts, 1).unwrap();
        assert!(poly.eval_rational(&rat(7, 3), &rat(-2, 5)).is_zero());
        assert!(!poly.is_zero());
    }

    #[test]
    fn vanishing_condition_examples() {
        let dd = bound::degree_data(1).unwrap();
        let cert = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 1.0);
        // d=1,A=1,B=0,C=0,T=1,N=1,L=0.1: lhs = 54 * 1e-3 = 0.054 < 1
        let ok = vanishing_condition(&dd, &cert, &Bf::one(), &Bf::one(), &Bf::from_f64(0.1), 128)
            .unwrap();
        assert!(ok);
        let lhs = vanishing_lhs(&dd, &cert, &Bf::one(), &Bf::one(), &Bf::from_f64(0.1), 128)
            .unwrap();
        assert!((lhs.to_f64() - 0.054).abs() < 1e-12);
        // L at the choice-of-L margin: condition holds by construction
        let l = bound::interval_length(&dd, &cert, &Bf::from_f64(2.0), &Bf::one(), 128).unwrap();
        assert!(vanishing_condition(&dd, &cert, &Bf::from_f64(2.0), &Bf::one(), &l, 128).unwrap());
        // doubled L with the smallest N: fails (scales by 2^rho = 8 beyond 1)
        let l2 = l.mul_pow2(1);
        // ... at T=2 the margin is T^(2 d mu) = 2^6 = 64: 64 * 54 * L^3/1
        // with L = (1/(54*64))^(1/3): doubling gives lhs = 8 > 1
        assert!(!vanishing_condition(&dd, &cert, &Bf::from_f64(2.0), &Bf::one(), &l2, 128).unwrap());
    }

    #[test]
    fn determinant_check_small() {
        // spiral-like curve (sin(log x)/x, cos(log x)/x), d=1, N=10
        let f = Expr::var().log().sin().mul(Expr::var().recip());
        let g = Expr::var().log().cos().mul(Expr::var().recip());
        let cert = SlowCertificate::new(4.0, 2.0, 0.0, 1.0, 1.0);
        let dd = bound::degree_data(1).unwrap();
        let n = Bf::from_f64(10.0);
        let l = Bf::from_f64(0.05);
        let rep =
            determinant_bound_check(&f, &g, &cert, &dd, &n, &l, 20, 42, 192).unwrap();
        assert_eq!(rep.violations, 0, "worst ratio {}", rep.worst_ratio);
        assert!(rep.worst_ratio < 1.0);
        // shrinking L shrinks the determinants themselves (they scale like
        // the rho-th power of the interval length)
        let l_small = Bf::from_f64(0.005);
        let rep2 =
            determinant_bound_check(&f, &g, &cert, &dd, &n, &l_small, 20, 42, 192).unwrap();
        assert!(rep2.violations == 0 && rep2.worst_ratio < 1.0);
        assert!(rep2.worst_det_log2 < rep.worst_det_log2);
    }

    #[test]
    fn degenerate_interval_zero_determinant() {
        // L = 0: all points equal, determinant exactly 0
        let f = Expr::var().recip();
        let g = Expr::var().log().sin();
        let cert = SlowCertificate::new(2.0, 2.0, 0.0, 1.0, 1.0);
        let dd = bound::degree_data(1).unwrap();
        let rep = determinant_bound_check(
            &f,
            &g,
            &cert,
            &dd,
            &Bf::from_f64(10.0),
            &Bf::zero(),
            3,
            1,
            128,
        )
        .unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.worst_ratio, 0.0);
    }

    #[test]
    fn plan_on_slow_line() {
        // artificial slow curve (1/x, 1/(2x)) whose rational points are at
        // every rational parameter; supply integer-parameter points
        let cert = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 1.0);
        let phi = HeightControl::Power {
            scale: QRat::from_i64(1),
            inv_exp: QRat::from_i64(1),
        };
        let t = Bf::from_f64(12.0);
        let pts: Vec<RationalPoint> = (1..=6i64)
            .map(|k| pt(rat(1, k), rat(1, 2 * k), Some(k as f64)))
            .collect();
        let plan =
            build_covering_plan("slow-line", &cert, &phi, &pts, &t, 128, 200_000).unwrap();
        assert!(plan.verified, "failed at {:?}", plan.failed_interval);
        assert!(plan.interval_count <= plan.interval_count_bound.parse::<u64>().unwrap());
        assert!(!plan.occupied.is_empty());
        let assigned: usize = plan.occupied.iter().map(|(_, iv)| iv.points.len()).sum();
        assert_eq!(assigned, 6);
        // every certified point vanishes on its interval polynomial, and the
        // interval really contains its points' parameters
        for (_, iv) in &plan.occupied {
            let poly = iv.polynomial.as_ref().unwrap();
            for p in &iv.points {
                assert!(poly.eval_rational(&p.x.0, &p.y.0).is_zero());
                let param = p.parameter.as_ref().unwrap();
                assert!(param >= &iv.left && param < &iv.right);
            }
        }
    }

    #[test]
    fn compact_cover_sin_arch() {
        // one arch of sin(2x): the only rational points of height <= 10 with
        // rational coordinates on the graph in [0, pi] are at x = 0 (sin 0 = 0)
        let f = Expr::var();
        let g = Expr::rational(2, 1).mul(Expr::var()).sin();
        let pts = vec![pt(rat(0, 1), rat(0, 1), Some(0.0))];
        let cov = compact_cover(
            &f,
            &g,
            &Bf::zero(),
            &Bf::from_f64(1.5),
            &pts,
            &Bf::from_f64(10.0),
            2,
            160,
            4,
            3,
        )
        .unwrap();
        assert!(cov.verified);
        assert_eq!(cov.occupied.len(), 1);
        assert!(cov.piece_count >= 1);
        let poly = cov.occupied[0].polynomial.as_ref().unwrap();
        assert!(poly.eval_rational(&rat(0, 1), &rat(0, 1)).is_zero());
    }

    #[test]
    fn zero_length_interval_single_point() {
        let pts = vec![(rat(3, 2), rat(5, 7))];
        let poly = covering_polynomial(&pts, 1).unwrap();
        assert!(poly.eval_rational(&rat(3, 2), &rat(5, 7)).is_zero());
    }
}
