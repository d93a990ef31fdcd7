//! Derivative-decay certificates and their closure rules.
//!
//! A certificate asserts `|f^(p)(x)/p!| <= D (A p^B log^C x / x)^p` on
//! `[a, +inf)`. The closure rules propagate certificates through sums,
//! products, bounded compositions, powers of logarithms and power-damped
//! compositions. Height-control functions bound how far along the parameter
//! rational points of a given height can occur.


use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bigfloat::{self, Bf, Round};
use crate::expr::{Expr, QRat};
use crate::{Error, Result};

/// Working precision for certificate constants.
pub const CERT_PREC: u32 = 96;

/// Diophantine class of a coordinate's limit value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    Rational,
    /// Irrational but admitting an irrationality measure of the form
    /// `tau(T) = K log T` (true of every number that is not a degree-one
    /// U-number in Mahler's classification).
    NonU1Irrational,
    Unknown,
}

/// Limit value of the decaying coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitValue {
    Rational(QRat),
    /// Numeric stand-in for an irrational limit.
    Real(Bf),
}

impl LimitValue {
    pub fn to_bf(&self, prec: u32) -> Bf {
        match self {
            LimitValue::Rational(q) => q.to_bf(prec, Round::Nearest),
            LimitValue::Real(b) => b.clone(),
        }
    }
}

/// Decreasing bound on `|f - u|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayBound {
    /// b(x) = x^(-e)
    Power { e: QRat },
    /// b(x) = m * 2^(-lambda x)
    Geometric { m: Bf, lambda: Bf },
}

/// Strengthened-decay data attached to a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    /// Exponent in `|(f-u)^(p)/p!| <= x^(-e) phi_p(x)`.
    pub e: Bf,
    /// Which coordinate carries the decay (0 or 1).
    pub coord: u8,
    pub limit: LimitValue,
    pub class: LimitClass,
    pub bound: DecayBound,
}

/// The constants of a derivative-decay certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowCertificate {
    pub a_factor: Bf,
    pub b_exp: Bf,
    pub c_log: Bf,
    pub d_prefactor: Bf,
    /// Left endpoint of the validity interval.
    pub left: Bf,
    pub decay: Option<Decay>,
}

impl SlowCertificate {
    pub fn new(a: f64, b: f64, c: f64, d: f64, left: f64) -> SlowCertificate {
        SlowCertificate {
            a_factor: Bf::from_f64(a),
            b_exp: Bf::from_f64(b),
            c_log: Bf::from_f64(c),
            d_prefactor: Bf::from_f64(d),
            left: Bf::from_f64(left),
            decay: None,
        }
    }

    pub fn with_decay(mut self, decay: Decay) -> SlowCertificate {
        self.decay = Some(decay);
        self
    }

    pub fn is_slow_plus(&self) -> bool {
        self.decay.is_some()
    }
}

/// `D (A p^B log^C x / x)^p`, rounded upward. `p = 0` returns `D`.
pub fn phi_p(cert: &SlowCertificate, p: u64, x: &Bf, prec: u32) -> Result<Bf> {
    if x < &cert.left {
        return Err(Error::Domain(format!(
            "phi_p evaluated at x = {} below certificate left endpoint {}",
            x.to_dec_string(6),
            cert.left.to_dec_string(6)
        )));
    }
    if p == 0 {
        return Ok(cert.d_prefactor.clone());
    }
    let up = Round::Ceil;
    let pb = Bf::from_u64(p);
    let mut base = cert.a_factor.mul_r(
        &bigfloat::pow(&pb, &cert.b_exp, prec, up),
        prec,
        up,
    );
    if !cert.c_log.is_zero() {
        let lx = bigfloat::ln(x, prec, Round::Ceil);
        if !lx.is_positive() {
            return Err(Error::Domain(
                "phi_p with C > 0 requires x > 1".into(),
            ));
        }
        base = base.mul_r(&bigfloat::pow(&lx, &cert.c_log, prec, up), prec, up);
    }
    base = base.div_r(x, prec, up);
    let powed = if base.is_positive() {
        bigfloat::pow(&base, &pb, prec, up)
    } else {
        Bf::zero()
    };
    Ok(cert.d_prefactor.mul_r(&powed, prec, up))
}

/// One certificate violation found by sampling.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub coord: usize,
    pub p: u64,
    pub x: Bf,
    pub coefficient: Bf,
    pub bound: Bf,
}

/// Result of sampled certificate verification.
#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    pub passed: bool,
    pub samples: usize,
    pub checks: usize,
    /// max |coefficient| / bound over all checks with a positive bound
    pub worst_ratio: f64,
    pub first_violation: Option<Violation>,
    pub eval_errors: Vec<String>,
}

/// Check `|f^(p)(x)/p!| <= phi_p(x)` for each coordinate expression, every
/// `p <= p_max` and every sample point. When the certificate carries decay
/// data, the decaying coordinate is additionally checked against
/// `x^(-E) phi_p(x)` for `p >= 1` and `|f - u| <= b(x)` at `p = 0`.
pub fn verify_certificate(
    coords: &[&Expr],
    cert: &SlowCertificate,
    p_max: u64,
    xs: &[Bf],
    prec: u32,
) -> CertReport {
    let mut report = CertReport {
        passed: true,
        samples: 0,
        checks: 0,
        worst_ratio: 0.0,
        first_violation: None,
        eval_errors: Vec::new(),
    };
    for x in xs {
        if x < &cert.left {
            report
                .eval_errors
                .push(format!("sample {} below left endpoint, skipped", x.to_dec_string(6)));
            continue;
        }
        report.samples += 1;
        for (ci, f) in coords.iter().enumerate() {
            let jet = match f.eval_jet(x, p_max as usize, prec) {
                Ok(j) => j,
                Err(e) => {
                    report.eval_errors.push(format!(
                        "coordinate {ci} at x = {}: {e}",
                        x.to_dec_string(6)
                    ));
                    continue;
                }
            };
            let decay_here = cert
                .decay
                .as_ref()
                .filter(|dec| usize::from(dec.coord) == ci);
            for p in 0..=p_max {
                let mut bound = match phi_p(cert, p, x, prec) {
                    Ok(b) => b,
                    Err(e) => {
                        report.eval_errors.push(format!("phi_{p}: {e}"));
                        continue;
                    }
                };
                let observed = if p == 0 {
                    match decay_here {
                        Some(dec) => {
                            // |f(x) - u| <= b(x)
                            bound = decay_bound_value(&dec.bound, x, prec);
                            jet.value().sub(&dec.limit.to_bf(prec)).abs()
                        }
                        // the plain condition at p = 0 is |f| <= D
                        None => jet.value().abs(),
                    }
                } else {
                    if let Some(dec) = decay_here {
                        let damp = bigfloat::pow(x, &dec.e.neg(), prec, Round::Ceil);
                        bound = bound.mul_r(&damp, prec, Round::Ceil);
                    }
                    jet.coeff(p as usize).abs()
                };
                report.checks += 1;
                if bound.is_positive() {
                    let ratio = observed.div_r(&bound, 64, Round::Nearest).to_f64();
                    if ratio > report.worst_ratio {
                        report.worst_ratio = ratio;
                    }
                }
                // allow for the evaluation's own rounding slop
                let bound = bound.add(&bound.abs().mul_pow2(-((prec / 2) as i64)));
                if observed > bound {
                    report.passed = false;
                    if report.first_violation.is_none() {
                        report.first_violation = Some(Violation {
                            coord: ci,
                            p,
                            x: x.clone(),
                            coefficient: observed.clone(),
                            bound: bound.clone(),
                        });
                    }
                }
            }
        }
    }
    report
}

/// Evaluate a decay bound b(x), rounded upward.
pub fn decay_bound_value(b: &DecayBound, x: &Bf, prec: u32) -> Bf {
    match b {
        DecayBound::Power { e } => {
            let neg_e = e.to_bf(prec, Round::Nearest).neg();
            bigfloat::pow(x, &neg_e, prec, Round::Ceil)
        }
        DecayBound::Geometric { m, lambda } => {
            // m * 2^(-lambda x) = m * exp(-lambda x ln 2)
            let l2 = bigfloat::ln2(prec + 8);
            let ex = lambda.mul(x).mul(&l2).neg().round(prec, Round::Nearest);
            m.mul_r(&bigfloat::exp(&ex, prec, Round::Ceil), prec, Round::Ceil)
        }
    }
}

const UP: Round = Round::Ceil;

/// Certificate for `f + g`: termwise domination gives componentwise max with
/// added prefactors.
pub fn combine_sum(c1: &SlowCertificate, c2: &SlowCertificate) -> SlowCertificate {
    SlowCertificate {
        a_factor: c1.a_factor.max_bf(&c2.a_factor),
        b_exp: c1.b_exp.max_bf(&c2.b_exp),
        c_log: c1.c_log.max_bf(&c2.c_log),
        d_prefactor: c1.d_prefactor.add(&c2.d_prefactor),
        left: c1.left.max_bf(&c2.left),
        decay: None,
    }
}

/// Certificate for `f * g`; the factor 2 on A absorbs the (p+1) convolution
/// term count via (p+1) <= 2^p.
pub fn combine_product(c1: &SlowCertificate, c2: &SlowCertificate) -> SlowCertificate {
    SlowCertificate {
        a_factor: c1.a_factor.max_bf(&c2.a_factor).mul_pow2(1),
        b_exp: c1.b_exp.max_bf(&c2.b_exp),
        c_log: c1.c_log.max_bf(&c2.c_log),
        d_prefactor: c1.d_prefactor.mul_r(&c2.d_prefactor, CERT_PREC, UP),
        left: c1.left.max_bf(&c2.left),
        decay: None,
    }
}

/// Certificate for `f o s` where `|f^(p)| <= alpha^p` on the range of the
/// slow inner function `s`.
pub fn compose_bounded(alpha: &Bf, c: &SlowCertificate) -> SlowCertificate {
    SlowCertificate {
        a_factor: c.a_factor.mul_r(alpha, CERT_PREC, UP),
        b_exp: c.b_exp.add(&Bf::one()),
        c_log: c.c_log.clone(),
        d_prefactor: c.d_prefactor.clone(),
        left: c.left.clone(),
        decay: None,
    }
}

/// Certificate for `f o log^ell` where `|f^(p)| <= alpha^p`:
/// constants `(alpha 2^ell, ell+1, ell-1)` on `[e, +inf)`.
pub fn compose_logpow(alpha: &Bf, ell: u32) -> SlowCertificate {
    SlowCertificate {
        a_factor: alpha.mul_pow2(ell as i64),
        b_exp: Bf::from_u64(ell as u64 + 1),
        c_log: Bf::from_u64(ell as u64 - 1),
        d_prefactor: Bf::one(),
        left: bigfloat::euler_e(CERT_PREC).round(CERT_PREC, UP),
        decay: None,
    }
}

/// Reference bound `2^ell p^ell log^(ell-1) x / x^p` for the p-th Taylor
/// coefficient of `log^ell` (valid for x >= e, p >= 1).
pub fn logpow_coeff_bound(ell: u32, p: u64, x: &Bf, prec: u32) -> Result<Bf> {
    if p == 0 {
        return Err(Error::Input("logpow_coeff_bound requires p >= 1".into()));
    }
    let e = bigfloat::euler_e(prec);
    if x < &e.round(prec, Round::Floor) {
        return Err(Error::Domain("logpow_coeff_bound requires x >= e".into()));
    }
    let mut v = Bf::from_u64(p).pow_i64(ell as i64, prec, UP).mul_pow2(ell as i64);
    if ell > 1 {
        let lx = bigfloat::ln(x, prec, UP);
        v = v.mul_r(&lx.pow_i64(ell as i64 - 1, prec, UP), prec, UP);
    }
    Ok(v.div_r(&x.pow_i64(p as i64, prec, Round::Floor), prec, UP))
}

/// Certificate for `x -> x^(-F) (f o s)(x)` where `|f^(p)| <= alpha^p` and
/// `s` has certificate `c`: strengthened-decay constants
/// `(2 (F+1) alpha A, B+1, C)` with decay exponent `F`.
pub fn damp_power(f_damp: &Bf, alpha: &Bf, c: &SlowCertificate) -> SlowCertificate {
    let a = f_damp
        .add(&Bf::one())
        .mul_r(alpha, CERT_PREC, UP)
        .mul_r(&c.a_factor, CERT_PREC, UP)
        .mul_pow2(1);
    SlowCertificate {
        a_factor: a,
        b_exp: c.b_exp.add(&Bf::one()),
        c_log: c.c_log.clone(),
        d_prefactor: c.d_prefactor.clone(),
        left: c.left.clone(),
        decay: Some(Decay {
            e: f_damp.clone(),
            coord: 0,
            limit: LimitValue::Rational(QRat::from_i64(0)),
            class: LimitClass::Rational,
            bound: DecayBound::Power {
                e: QRat::from_i64(f_damp.ceil_bigint().to_i64().unwrap_or(1)),
            },
        }),
    }
}

/// Fieldwise max of two certificates (both coordinates of a parametrization
/// must satisfy the shared bound).
pub fn combine_coordinates(c1: &SlowCertificate, c2: &SlowCertificate) -> SlowCertificate {
    SlowCertificate {
        a_factor: c1.a_factor.max_bf(&c2.a_factor),
        b_exp: c1.b_exp.max_bf(&c2.b_exp),
        c_log: c1.c_log.max_bf(&c2.c_log),
        d_prefactor: c1.d_prefactor.max_bf(&c2.d_prefactor),
        left: c1.left.max_bf(&c2.left),
        decay: None,
    }
}

// ---------------------------------------------------------------------------
// Height control
// ---------------------------------------------------------------------------

/// A function `phi` with: every rational point of height <= T on the curve
/// has parameter in `[a, phi(T)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightControl {
    /// phi(T) = (scale * T)^inv_exp
    Power { scale: QRat, inv_exp: QRat },
    /// phi(T) = log(m * T^k) / (lambda log 2)
    LogOfT { m: Bf, lambda: Bf, k: QRat },
    /// phi(T) = expr(T), declared nondecreasing by the supplier.
    Custom { expr: Expr },
}

impl HeightControl {
    /// Evaluate phi(T), rounded upward.
    pub fn eval(&self, t: &Bf, prec: u32) -> Result<Bf> {
        match self {
            HeightControl::Power { scale, inv_exp } => {
                let base = scale.to_bf(prec, Round::Ceil).mul_r(t, prec, Round::Ceil);
                if !base.is_positive() {
                    return Err(Error::Domain("height control base must be positive".into()));
                }
                Ok(bigfloat::pow(&base, &inv_exp.to_bf(prec, Round::Ceil), prec, Round::Ceil))
            }
            HeightControl::LogOfT { m, lambda, k } => {
                let tk = bigfloat::pow(t, &k.to_bf(prec, Round::Ceil), prec, Round::Ceil);
                let arg = m.mul_r(&tk, prec, Round::Ceil);
                if arg <= Bf::one() {
                    return Ok(Bf::one());
                }
                let num = bigfloat::ln(&arg, prec, Round::Ceil);
                let den = lambda.mul_r(&bigfloat::ln2(prec), prec, Round::Floor);
                Ok(num.div_r(&den, prec, Round::Ceil))
            }
            HeightControl::Custom { expr } => expr.eval(t, prec),
        }
    }

    /// Whether phi grows like a power of T (as opposed to a power of log T);
    /// drives the exponent bookkeeping of bound reports.
    pub fn is_power_kind(&self) -> bool {
        match self {
            HeightControl::Power { .. } => true,
            HeightControl::LogOfT { .. } => false,
            HeightControl::Custom { .. } => true,
        }
    }
}

/// Build a height-control function per the decay data of a certificate.
///
/// For a rational limit `u = p/q` with decay bound `b`, the gap between `u`
/// and any other rational of height <= T is at least `1/(qT)`, so
/// `phi(T) = b^(-1)(1/(qT))`. For a non-U1 irrational limit with measure
/// `tau(T) = K log T`, `phi(T) = b^(-1)(T^(-K))`. An unknown irrational
/// class is rejected.
pub fn height_control_from_decay(decay: &Decay, k_irr: Option<&QRat>) -> Result<HeightControl> {
    match (&decay.limit, decay.class) {
        (LimitValue::Rational(q), LimitClass::Rational) => {
            let den = q.0.denom().clone();
            match &decay.bound {
                DecayBound::Power { e } => {
                    // (q T)^(1/E)
                    let inv = QRat(QRat::from_i64(1).0 / &e.0);
                    Ok(HeightControl::Power {
                        scale: QRat(num_rational::BigRational::from(den)),
                        inv_exp: inv,
                    })
                }
                DecayBound::Geometric { m, lambda } => {
                    // log2(m q T)/lambda
                    let mq = m.mul(&Bf::from_bigint(den));
                    Ok(HeightControl::LogOfT {
                        m: mq,
                        lambda: lambda.clone(),
                        k: QRat::from_i64(1),
                    })
                }
            }
        }
        (_, LimitClass::NonU1Irrational) => {
            let k = k_irr.ok_or_else(|| {
                Error::Input(
                    "an irrational limit requires the measure constant K (tau(T) = K log T)".into(),
                )
            })?;
            match &decay.bound {
                DecayBound::Power { e } => Ok(HeightControl::Power {
                    scale: QRat::from_i64(1),
                    inv_exp: QRat(&k.0 / &e.0),
                }),
                DecayBound::Geometric { m, lambda } => Ok(HeightControl::LogOfT {
                    m: m.clone(),
                    lambda: lambda.clone(),
                    k: k.clone(),
                }),
            }
        }
        (LimitValue::Rational(_), LimitClass::Unknown) | (LimitValue::Real(_), LimitClass::Unknown) => {
            Err(Error::Input(
                "cannot build a height control for a limit of unknown Diophantine class".into(),
            ))
        }
        (LimitValue::Real(_), LimitClass::Rational) => Err(Error::Input(
            "limit declared rational but supplied as a raw real".into(),
        )),
    }
}

/// Log-spaced sample grid on [lo, hi].
pub fn log_grid(lo: &Bf, hi: &Bf, n: usize, prec: u32) -> Vec<Bf> {
    assert!(n >= 2);
    let la = bigfloat::ln(lo, prec, Round::Nearest);
    let lb = bigfloat::ln(hi, prec, Round::Nearest);
    let step = lb.sub(&la).div_r(&Bf::from_u64(n as u64 - 1), prec, Round::Nearest);
    (0..n)
        .map(|i| {
            let l = la.add(&step.mul(&Bf::from_u64(i as u64)));
            bigfloat::exp(&l.round(prec, Round::Nearest), prec, Round::Nearest)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ff(v: f64) -> Bf {
        Bf::from_f64(v)
    }

    #[test]
    fn phi_p_values() {
        // (A=1,B=0,C=0,D=1, p=2, x=2) -> 1/4
        let c = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 1.0);
        let v = phi_p(&c, 2, &ff(2.0), 128).unwrap();
        assert_eq!(v.to_f64(), 0.25);
        // (A=2,B=1,C=0,D=1, p=1, x=4) -> 1/2
        let c = SlowCertificate::new(2.0, 1.0, 0.0, 1.0, 1.0);
        let v = phi_p(&c, 1, &ff(4.0), 128).unwrap();
        assert_eq!(v.to_f64(), 0.5);
        // (A=1,B=1,C=1,D=1, p=3, x=e^2) -> (3*2/e^2)^3
        let c = SlowCertificate::new(1.0, 1.0, 1.0, 1.0, 1.0);
        let e2 = bigfloat::euler_e(160).pow_i64(2, 160, Round::Nearest);
        let v = phi_p(&c, 3, &e2, 160).unwrap();
        let want = (6.0 / std::f64::consts::E.powi(2)).powi(3);
        assert!((v.to_f64() - want).abs() < 1e-12);
        // p = 0 returns D
        let c = SlowCertificate::new(1.0, 0.0, 0.0, 3.5, 1.0);
        assert_eq!(phi_p(&c, 0, &ff(2.0), 64).unwrap().to_f64(), 3.5);
    }

    #[test]
    fn phi_p_rejects_left_of_domain() {
        let c = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 2.0);
        assert!(phi_p(&c, 1, &ff(1.5), 64).is_err());
    }

    #[test]
    fn phi_p_decreasing_in_x() {
        let c = SlowCertificate::new(2.0, 1.0, 1.0, 1.0, 1.0);
        // beyond e^C = e the bound decreases in x for each p
        let xs = log_grid(&ff(3.0), &ff(1000.0), 12, 128);
        for p in 1..=6u64 {
            let mut prev: Option<Bf> = None;
            for x in &xs {
                let v = phi_p(&c, p, x, 128).unwrap();
                if let Some(pv) = prev {
                    assert!(v <= pv, "phi_{p} not decreasing at x={}", x.to_dec_string(6));
                }
                prev = Some(v);
            }
        }
    }

    #[test]
    fn verify_recip_x() {
        // f = 1/x with cert (1,0,0,1) on [2, inf): |(1/x)^(p)|/p! = x^-(p+1) <= x^-p
        let f = Expr::var().recip();
        let cert = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 2.0);
        let xs = log_grid(&ff(2.0), &ff(100.0), 8, 160);
        let rep = verify_certificate(&[&f], &cert, 8, &xs, 160);
        assert!(rep.passed, "violation: {:?}", rep.first_violation);
        assert!(rep.worst_ratio <= 1.0);
    }

    #[test]
    fn verify_detects_sin_violation() {
        // sin is not slow: |cos x| is not <= 1/x for large x
        let f = Expr::var().sin();
        let cert = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 2.0);
        let xs = vec![ff(5.0), ff(20.0), ff(50.0)];
        let rep = verify_certificate(&[&f], &cert, 3, &xs, 128);
        assert!(!rep.passed);
        let v = rep.first_violation.unwrap();
        assert!(v.p >= 1);
    }

    #[test]
    fn combine_rules_fieldwise() {
        let c = SlowCertificate::new(2.0, 1.0, 1.0, 1.0, 2.0);
        let s = combine_sum(&c, &c);
        assert_eq!(s.d_prefactor.to_f64(), 2.0);
        assert_eq!(s.a_factor.to_f64(), 2.0);
        let p = combine_product(&c, &c);
        assert_eq!(p.a_factor.to_f64(), 4.0);
        assert_eq!(p.d_prefactor.to_f64(), 1.0);
        // order-insensitive
        let c2 = SlowCertificate::new(3.0, 0.5, 2.0, 1.5, 3.0);
        let ab = combine_sum(&c, &c2);
        let ba = combine_sum(&c2, &c);
        assert_eq!(ab, ba);
        let ab = combine_product(&c, &c2);
        let ba = combine_product(&c2, &c);
        assert_eq!(ab, ba);
    }

    #[test]
    fn compose_rules() {
        // compose_logpow(1, 1) -> (2, 2, 0); (1, 3) -> (8, 4, 2)
        let c = compose_logpow(&Bf::one(), 1);
        assert_eq!(
            (c.a_factor.to_f64(), c.b_exp.to_f64(), c.c_log.to_f64()),
            (2.0, 2.0, 0.0)
        );
        let c = compose_logpow(&Bf::one(), 3);
        assert_eq!(
            (c.a_factor.to_f64(), c.b_exp.to_f64(), c.c_log.to_f64()),
            (8.0, 4.0, 2.0)
        );
        // compose_bounded adds one to B and scales A
        let base = SlowCertificate::new(2.0, 2.0, 0.0, 1.0, 3.0);
        let c = compose_bounded(&Bf::one(), &base);
        assert_eq!((c.a_factor.to_f64(), c.b_exp.to_f64()), (2.0, 3.0));
        let twice = compose_bounded(&Bf::one(), &compose_bounded(&Bf::one(), &base));
        assert_eq!(twice.b_exp.to_f64(), 4.0);
    }

    #[test]
    fn damp_power_spiral_coordinate() {
        // x^-1 sin(log x): F=1, alpha=1, inner (2,2,0) -> (8, 3, 0, E=1)
        let inner = compose_logpow(&Bf::one(), 1);
        let c = damp_power(&Bf::one(), &Bf::one(), &inner);
        assert_eq!(c.a_factor.to_f64(), 8.0);
        assert_eq!(c.b_exp.to_f64(), 3.0);
        assert_eq!(c.c_log.to_f64(), 0.0);
        assert_eq!(c.decay.as_ref().unwrap().e.to_f64(), 1.0);
    }

    #[test]
    fn logpow_bound_dominates_actual() {
        // |(log)^(p) x| / p! = 1/(p x^p) <= 2 p / x^p
        let x = ff(10.0);
        for p in 1..=10u64 {
            let actual = 1.0 / (p as f64 * 10f64.powi(p as i32));
            let bound = logpow_coeff_bound(1, p, &x, 128).unwrap().to_f64();
            assert!(actual <= bound);
        }
        // jet coefficients of log^2 at x = e^2 <= bound
        let e2 = bigfloat::euler_e(192).pow_i64(2, 192, Round::Nearest);
        let f = Expr::var().log().powi(2);
        let jet = f.eval_jet(&e2, 10, 192).unwrap();
        for p in 1..=10u64 {
            let bound = logpow_coeff_bound(2, p, &e2, 192).unwrap();
            assert!(
                jet.coeff(p as usize).abs() <= bound,
                "p={p}: {} > {}",
                jet.coeff(p as usize).abs().to_f64(),
                bound.to_f64()
            );
        }
    }

    #[test]
    fn height_control_power_and_log() {
        // rational limit 0 with b(x)=1/x: phi(T) = T
        let decay = Decay {
            e: Bf::one(),
            coord: 0,
            limit: LimitValue::Rational(QRat::from_i64(0)),
            class: LimitClass::Rational,
            bound: DecayBound::Power { e: QRat::from_i64(1) },
        };
        let hc = height_control_from_decay(&decay, None).unwrap();
        let v = hc.eval(&ff(100.0), 128).unwrap();
        assert!((v.to_f64() - 100.0).abs() < 1e-20);
        assert!(hc.is_power_kind());
        // geometric decay: m 2^(-lambda x), rational limit with denominator 2:
        // phi(T) = log2(2 m T)/lambda
        let decay = Decay {
            e: Bf::one(),
            coord: 0,
            limit: LimitValue::Rational(QRat::new(1, 2)),
            class: LimitClass::Rational,
            bound: DecayBound::Geometric { m: ff(1.612), lambda: ff(0.25) },
        };
        let hc = height_control_from_decay(&decay, None).unwrap();
        let v = hc.eval(&ff(1000.0), 128).unwrap();
        let want = (2.0 * 1.612 * 1000.0f64).log2() / 0.25;
        assert!((v.to_f64() - want).abs() < 1e-9, "{} vs {want}", v.to_f64());
        assert!(!hc.is_power_kind());
        // monotone nondecreasing
        let v2 = hc.eval(&ff(2000.0), 128).unwrap();
        assert!(v2 >= v);
    }

    #[test]
    fn height_control_unknown_class_rejected() {
        let decay = Decay {
            e: Bf::one(),
            coord: 0,
            limit: LimitValue::Real(ff(0.123456)),
            class: LimitClass::Unknown,
            bound: DecayBound::Power { e: QRat::from_i64(1) },
        };
        assert!(height_control_from_decay(&decay, None).is_err());
        // non-U1 without K also rejected
        let decay = Decay { class: LimitClass::NonU1Irrational, ..decay };
        assert!(height_control_from_decay(&decay, None).is_err());
        // with K it succeeds: phi(T) = T^(K/E)
        let hc = height_control_from_decay(&decay, Some(&QRat::from_i64(3))).unwrap();
        let v = hc.eval(&ff(10.0), 128).unwrap();
        assert!((v.to_f64() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn verified_sum_of_slow_functions() {
        // f = 1/x, g = 1/x^2 on [2, inf): sum satisfies the combined cert
        let f = Expr::var().recip();
        let g = Expr::var().powi(-2);
        let cf = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 2.0);
        let cg = SlowCertificate::new(2.0, 0.0, 0.0, 1.0, 2.0);
        let sum_expr = f.clone().add(g);
        let cert = combine_sum(&cf, &cg);
        let xs = log_grid(&ff(2.0), &ff(50.0), 6, 160);
        let rep = verify_certificate(&[&sum_expr], &cert, 8, &xs, 160);
        assert!(rep.passed, "violation: {:?}", rep.first_violation);
    }

    #[test]
    fn product_cert_explicit() {
        // product of f = g = 1/x on [2,inf): |(1/x^2)^(p)|/p! = (p+1)/x^(p+2) <= (2/x)^p
        let fg = Expr::var().powi(-2);
        let c1 = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 2.0);
        let cert = combine_product(&c1, &c1);
        assert_eq!(cert.a_factor.to_f64(), 2.0);
        let xs = log_grid(&ff(2.0), &ff(100.0), 6, 160);
        let rep = verify_certificate(&[&fg], &cert, 10, &xs, 160);
        assert!(rep.passed, "violation: {:?}", rep.first_violation);
    }

    #[test]
    fn serde_roundtrip() {
        let cert = SlowCertificate::new(4.0, 2.0, 0.0, 1.0, 1.0).with_decay(Decay {
            e: Bf::one(),
            coord: 0,
            limit: LimitValue::Rational(QRat::from_i64(0)),
            class: LimitClass::Rational,
            bound: DecayBound::Power { e: QRat::from_i64(1) },
        });
        let s = serde_json::to_string(&cert).unwrap();
        let back: SlowCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(cert, back);
    }
}
