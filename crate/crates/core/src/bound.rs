//! The explicit counting-bound pipeline.
//!
//! From a derivative-decay certificate this module computes the determinant
//! and interval-length constants, the covering sequence of the parameter
//! half-line, the bound on the number of covering intervals, the degree
//! schedule, and finally the fully assembled bound report with an explicit
//! leading constant. Upper-bound quantities round up, lengths round down.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bezout::BezoutFormula;
use crate::bigfloat::{self, factorial, Bf, Round};
use crate::expr::QRat;
use crate::slow::{HeightControl, SlowCertificate};
use crate::{Error, Result};

const UP: Round = Round::Ceil;
const DOWN: Round = Round::Floor;

/// Largest degree the pipeline will accept.
pub const MAX_DEGREE: u32 = 200;

/// Derived combinatorial data for a target degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeData {
    pub d: u32,
    /// Number of plane monomials of degree <= d: (d+1)(d+2)/2.
    pub mu: u64,
    /// mu (mu - 1) / 2.
    pub rho: u64,
    /// 4 d / (mu - 1), exactly.
    pub nu: QRat,
}

pub fn degree_data(d: u32) -> Result<DegreeData> {
    if d == 0 {
        return Err(Error::Input("degree must be >= 1".into()));
    }
    if d > MAX_DEGREE {
        return Err(Error::Input(format!("degree {d} exceeds supported maximum {MAX_DEGREE}")));
    }
    let d64 = d as u64;
    let mu = (d64 + 1) * (d64 + 2) / 2;
    let rho = mu * (mu - 1) / 2;
    let nu = QRat(num_rational::BigRational::new(
        BigInt::from(4 * d64),
        BigInt::from(mu - 1),
    ));
    Ok(DegreeData { d, mu, rho, nu })
}

/// The determinant constant `mu! A^rho mu^(d(mu-1)) mu^(B rho)`, rounded up.
pub fn det_constant(dd: &DegreeData, a: &Bf, b: &Bf, prec: u32) -> Result<Bf> {
    if a.is_negative() || b.is_negative() {
        return Err(Error::Input("certificate constants must be nonnegative".into()));
    }
    let mu_fact = Bf::from_bigint(factorial(dd.mu));
    let mu_b = Bf::from_bigint(BigInt::from(dd.mu));
    let a_rho = if a.is_zero() {
        Bf::zero()
    } else {
        a.pow_i64(dd.rho as i64, prec, UP)
    };
    let mu_pow = Bf::from_bigint(BigInt::from(dd.mu).pow((dd.d as u64 * (dd.mu - 1)) as u32));
    let exp_brho = b.mul(&Bf::from_u64(dd.rho));
    let mu_brho = bigfloat::pow(&mu_b, &exp_brho, prec, UP);
    Ok(mu_fact
        .mul_r(&a_rho, prec, UP)
        .mul_r(&mu_pow, prec, UP)
        .mul_r(&mu_brho, prec, UP))
}

/// The interval-length constant
/// `A^-1 mu^-B mu^(-2d/mu) (mu!)^(-2/(mu(mu-1)))`, rounded down. Satisfies
/// `length_constant = det_constant^(-1/rho)`.
pub fn length_constant(dd: &DegreeData, a: &Bf, b: &Bf, prec: u32) -> Result<Bf> {
    if !a.is_positive() {
        return Err(Error::Input("length constant requires A > 0".into()));
    }
    let mu_b = Bf::from_u64(dd.mu);
    let inv_a = Bf::one().div_r(a, prec, DOWN);
    let mu_negb = bigfloat::pow(&mu_b, &b.neg(), prec, DOWN);
    let e1 = Bf::from_ratio(
        &BigInt::from(-2i64 * dd.d as i64),
        &BigInt::from(dd.mu),
        prec,
        DOWN,
    );
    let mu_term = bigfloat::pow(&mu_b, &e1, prec, DOWN);
    let e2 = Bf::from_ratio(
        &BigInt::from(-2),
        &BigInt::from(dd.mu * (dd.mu - 1)),
        prec,
        DOWN,
    );
    let fact_term = bigfloat::pow(&Bf::from_bigint(factorial(dd.mu)), &e2, prec, DOWN);
    Ok(inv_a
        .mul_r(&mu_negb, prec, DOWN)
        .mul_r(&mu_term, prec, DOWN)
        .mul_r(&fact_term, prec, DOWN))
}

/// Start of the covering range: `e^C`, or `e^(C/E)` under strengthened
/// decay. Rounded up so the monotonicity requirement holds beyond it.
pub fn start_point(cert: &SlowCertificate, prec: u32) -> Bf {
    let exponent = match &cert.decay {
        Some(d) => cert.c_log.div_r(&d.e, prec, UP),
        None => cert.c_log.clone(),
    };
    if exponent.is_zero() {
        return Bf::one();
    }
    bigfloat::exp(&exponent, prec, UP)
}

/// Covering start honoring the certificate's own left endpoint.
pub fn effective_start(cert: &SlowCertificate, prec: u32) -> Bf {
    start_point(cert, prec).max_bf(&cert.left)
}

/// Interval length `C'(d,A,B) N / log^C N * T^(-nu)` at a left endpoint `N`,
/// rounded down.
pub fn interval_length(
    dd: &DegreeData,
    cert: &SlowCertificate,
    t: &Bf,
    n: &Bf,
    prec: u32,
) -> Result<Bf> {
    if t < &Bf::one() {
        return Err(Error::Input("height threshold T must be >= 1".into()));
    }
    let x0 = start_point(cert, prec);
    if n < &x0 {
        return Err(Error::Input(format!(
            "left endpoint {} below covering start {}",
            n.to_dec_string(6),
            x0.to_dec_string(6)
        )));
    }
    let cp = length_constant(dd, &cert.a_factor, &cert.b_exp, prec)?;
    let t_pow = bigfloat::pow(t, &dd.nu.to_bf(prec, UP).neg(), prec, DOWN);
    let mut v = cp.mul_r(n, prec, DOWN).mul_r(&t_pow, prec, DOWN);
    if !cert.c_log.is_zero() {
        let ln_n = bigfloat::ln(n, prec, UP);
        let denom = bigfloat::pow(&ln_n, &cert.c_log, prec, UP);
        v = v.div_r(&denom, prec, DOWN);
    }
    Ok(v)
}

/// The covering sequence `x_0 = start, x_{n+1} = x_n + L(x_n)`, yielded
/// until (and including) the first term `>= limit`.
pub fn covering_sequence(
    cert: &SlowCertificate,
    dd: &DegreeData,
    t: &Bf,
    limit: &Bf,
    prec: u32,
    max_steps: usize,
) -> Result<Vec<Bf>> {
    let x0 = effective_start(cert, prec);
    if limit < &x0 {
        return Err(Error::Input(format!(
            "covering limit {} below start {}",
            limit.to_dec_string(6),
            x0.to_dec_string(6)
        )));
    }
    let cp = length_constant(dd, &cert.a_factor, &cert.b_exp, prec)?;
    let t_pow = bigfloat::pow(t, &dd.nu.to_bf(prec, UP).neg(), prec, DOWN);
    let gap_scale = cp.mul_r(&t_pow, prec, DOWN);
    let c_zero = cert.c_log.is_zero();
    let mut xs = vec![x0.clone()];
    let mut x = x0;
    while &x < limit {
        if xs.len() > max_steps {
            return Err(Error::Input(format!(
                "covering sequence exceeds the step budget of {max_steps}"
            )));
        }
        let mut gap = gap_scale.mul_r(&x, prec, DOWN);
        if !c_zero {
            let ln_x = bigfloat::ln(&x, prec, UP);
            gap = gap.div_r(&bigfloat::pow(&ln_x, &cert.c_log, prec, UP), prec, DOWN);
        }
        if !gap.is_positive() {
            return Err(Error::Precision("covering step underflowed to zero".into()));
        }
        x = x.add(&gap).round(prec, DOWN);
        xs.push(x.clone());
    }
    Ok(xs)
}

/// Upper bound on the number of covering intervals needed to reach
/// `phi_t`: `ceil(T^nu log^(C+1) phi / (log 2 min(1, C')) + 1)`.
pub fn interval_count_bound(
    cert: &SlowCertificate,
    dd: &DegreeData,
    t: &Bf,
    phi_t: &Bf,
    prec: u32,
) -> Result<BigInt> {
    let x0 = effective_start(cert, prec);
    if phi_t < &x0 {
        return Err(Error::Input(format!(
            "phi(T) = {} below covering start {}",
            phi_t.to_dec_string(6),
            x0.to_dec_string(6)
        )));
    }
    let cp = length_constant(dd, &cert.a_factor, &cert.b_exp, prec)?;
    let t_pow = bigfloat::pow(t, &dd.nu.to_bf(prec, UP), prec, UP);
    let ln_phi = bigfloat::ln(phi_t, prec, UP);
    let log_term = if ln_phi.is_positive() {
        bigfloat::pow(&ln_phi, &cert.c_log.add(&Bf::one()), prec, UP)
    } else {
        Bf::zero()
    };
    let denom = bigfloat::ln2(prec)
        .round(prec, DOWN)
        .mul_r(&cp.min_bf(&Bf::one()), prec, DOWN);
    let v = t_pow
        .mul_r(&log_term, prec, UP)
        .div_r(&denom, prec, UP)
        .add(&Bf::one());
    Ok(v.ceil_bigint())
}

/// Degree schedule `max(1, floor(log_+ T))`; guarantees `T^nu <= e^16`.
pub fn degree_schedule(t: &Bf, prec: u32) -> Result<u32> {
    if t < &Bf::one() {
        return Err(Error::Input("height threshold T must be >= 1".into()));
    }
    let mut d = 1u32;
    while d < MAX_DEGREE {
        let next = bigfloat::exp(&Bf::from_u64(d as u64 + 1), prec, DOWN);
        if &next <= t {
            d += 1;
        } else {
            break;
        }
    }
    if d >= MAX_DEGREE {
        return Err(Error::Input("height threshold too large for the degree schedule".into()));
    }
    Ok(d)
}

/// References needed to assemble a bound report.
pub struct BoundInputs<'a> {
    pub name: &'a str,
    pub cert: &'a SlowCertificate,
    pub phi: &'a HeightControl,
    pub bezout: &'a BezoutFormula,
}

/// Exponent pair of the final bound, as `(log T, log log T)` powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapePair {
    pub log_t: i64,
    pub log_log_t: i64,
}

/// Fully explicit bound report: every intermediate constant plus the
/// assembled value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub curve: String,
    pub t: Bf,
    /// Height threshold after prefactor normalization (equal to `t` when the
    /// certificate prefactor is at most 1).
    pub t_effective: Bf,
    pub normalization: u64,
    pub d: u32,
    pub mu: u64,
    pub rho: u64,
    pub nu: QRat,
    pub slow_plus: bool,
    pub start: Bf,
    pub phi_t: Bf,
    pub interval_length_at_start: Bf,
    /// Decimal rendering of the interval-count bound.
    pub n_t: String,
    pub alpha: Bf,
    pub beta_t: Bf,
    pub beta_phi: Bf,
    pub bezout_value: Bf,
    pub total: Bf,
    pub shape: ShapePair,
    pub notes: Vec<String>,
}

/// Assembled leading constant
/// `2 e^16 / log 2 * max(1, A 2^B (1+1/log 2)^(2B) e^12 e^(4/e))`, all
/// factors rounded up.
pub fn assemble_alpha(cert: &SlowCertificate, prec: u32) -> Bf {
    let e16 = bigfloat::exp(&Bf::from_i64(16), prec, UP);
    let ln2 = bigfloat::ln2(prec).round(prec, DOWN);
    let lead = e16.mul_pow2(1).div_r(&ln2, prec, UP);
    let two_b = bigfloat::pow(&Bf::from_i64(2), &cert.b_exp, prec, UP);
    let one_over_ln2 = Bf::one().div_r(&ln2, prec, UP);
    let base = Bf::one().add(&one_over_ln2);
    let pow_2b = bigfloat::pow(&base, &cert.b_exp.mul_pow2(1), prec, UP);
    // e^(12 + 4/e)
    let e_low = bigfloat::euler_e(prec).round(prec, DOWN);
    let four_over_e = Bf::from_i64(4).div_r(&e_low, prec, UP);
    let e_fac = bigfloat::exp(&Bf::from_i64(12).add(&four_over_e), prec, UP);
    let inner = cert
        .a_factor
        .mul_r(&two_b, prec, UP)
        .mul_r(&pow_2b, prec, UP)
        .mul_r(&e_fac, prec, UP)
        .max_bf(&Bf::one());
    lead.mul_r(&inner, prec, UP)
}

/// The full bound pipeline for one curve at one height threshold.
pub fn global_bound(inp: &BoundInputs<'_>, t: &Bf, prec: u32) -> Result<BoundReport> {
    if t < &Bf::one() {
        return Err(Error::Input("height threshold T must be >= 1".into()));
    }
    let cert = inp.cert;
    let mut notes = Vec::new();
    // Normalize the prefactor: a curve with D > 1 is counted through its
    // scaled copy (coordinates divided by M = ceil(D)), whose points of
    // height M*T include all original points of height T.
    let m_norm: u64 = if cert.d_prefactor > Bf::one() {
        let m = cert.d_prefactor.ceil_bigint().to_u64().ok_or_else(|| {
            Error::Input("certificate prefactor too large to normalize".into())
        })?;
        notes.push(format!(
            "prefactor {} normalized by integer {m}; thresholds scaled accordingly",
            cert.d_prefactor.to_dec_string(6)
        ));
        m
    } else {
        1
    };
    let m_bf = Bf::from_u64(m_norm);
    let t_eff = t.mul(&m_bf);
    let phi_arg = t_eff.mul(&m_bf);
    let cert_norm = SlowCertificate {
        d_prefactor: Bf::one(),
        ..cert.clone()
    };

    let d = degree_schedule(&t_eff, prec)?;
    let dd = degree_data(d)?;
    let start = effective_start(&cert_norm, prec);
    let phi_raw = inp.phi.eval(&phi_arg, prec)?;
    let phi_t = phi_raw.max_bf(&start);
    let l_start = interval_length(&dd, &cert_norm, &t_eff, &start, prec)?;
    let n_t = interval_count_bound(&cert_norm, &dd, &t_eff, &phi_t, prec)?;

    let slow_plus = cert.is_slow_plus();
    let beta_t = cert.b_exp.add(&cert.c_log).mul_pow2(1);
    let beta_phi = if slow_plus {
        Bf::one()
    } else {
        cert.c_log.add(&Bf::one())
    };
    let alpha = assemble_alpha(&cert_norm, prec);
    let bezout_value = inp.bezout.eval(&phi_t, d, prec)?;
    if inp.bezout.has_configured_constant() {
        notes.push(
            "the intersection-bound constant is not explicit in its source; \
             the configured value is used"
                .into(),
        );
    }

    let log_t = bigfloat::log_plus(&t_eff, prec, UP);
    let log_phi = bigfloat::log_plus(&phi_t, prec, UP);
    let total = alpha
        .mul_r(&bigfloat::pow(&log_t, &beta_t, prec, UP), prec, UP)
        .mul_r(&bigfloat::pow(&log_phi, &beta_phi, prec, UP), prec, UP)
        .mul_r(&bezout_value, prec, UP);

    // Exponent bookkeeping: log T powers add across factors; repeated
    // log log T factors collapse, matching the published statements.
    let phi_power = inp.phi.is_power_kind();
    let beta_t_int = beta_t.ceil_bigint().to_i64().unwrap_or(i64::MAX);
    let beta_phi_int = beta_phi.ceil_bigint().to_i64().unwrap_or(i64::MAX);
    let bez_shape = inp.bezout.shape(phi_power);
    let shape = ShapePair {
        log_t: beta_t_int + if phi_power { beta_phi_int } else { 0 } + bez_shape.0,
        log_log_t: std::cmp::max(if phi_power { 0 } else { beta_phi_int }, bez_shape.1),
    };

    Ok(BoundReport {
        curve: inp.name.to_string(),
        t: t.clone(),
        t_effective: t_eff,
        normalization: m_norm,
        d,
        mu: dd.mu,
        rho: dd.rho,
        nu: dd.nu.clone(),
        slow_plus,
        start,
        phi_t,
        interval_length_at_start: l_start,
        n_t: n_t.to_string(),
        alpha,
        beta_t,
        beta_phi,
        bezout_value,
        total,
        shape,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slow;

    fn ff(v: f64) -> Bf {
        Bf::from_f64(v)
    }

    #[test]
    fn degree_data_examples() {
        let d1 = degree_data(1).unwrap();
        assert_eq!((d1.mu, d1.rho), (3, 3));
        assert_eq!(d1.nu.to_bf(64, Round::Nearest).to_f64(), 2.0);
        let d2 = degree_data(2).unwrap();
        assert_eq!((d2.mu, d2.rho), (6, 15));
        assert!((d2.nu.to_bf(64, Round::Nearest).to_f64() - 8.0 / 5.0).abs() < 1e-15);
        let d3 = degree_data(3).unwrap();
        assert_eq!((d3.mu, d3.rho), (10, 45));
        assert!((d3.nu.to_bf(64, Round::Nearest).to_f64() - 4.0 / 3.0).abs() < 1e-15);
        assert!(degree_data(0).is_err());
        // nu <= 8/d
        for d in 1..=10 {
            let dd = degree_data(d).unwrap();
            let nu = dd.nu.to_bf(64, Round::Nearest).to_f64();
            assert!(nu <= 8.0 / d as f64 + 1e-12);
        }
    }

    #[test]
    fn det_constant_examples() {
        // independent closed-form oracle in f64
        let dd = degree_data(1).unwrap();
        let v = det_constant(&dd, &ff(1.0), &ff(0.0), 128).unwrap();
        assert_eq!(v.to_f64(), 54.0); // 6 * 1 * 3^2 * 1
        let v = det_constant(&dd, &ff(2.0), &ff(0.0), 128).unwrap();
        assert_eq!(v.to_f64(), 432.0); // 6 * 8 * 9
        let v = det_constant(&dd, &ff(1.0), &ff(1.0), 128).unwrap();
        assert!((v.to_f64() - 1458.0).abs() < 1e-9); // 54 * 27
        // d=2, A=1, B=0: 6! * 6^10
        let dd = degree_data(2).unwrap();
        let v = det_constant(&dd, &ff(1.0), &ff(0.0), 128).unwrap();
        assert_eq!(v.to_f64(), 720.0 * 6f64.powi(10));
    }

    #[test]
    fn length_constant_examples() {
        let dd = degree_data(1).unwrap();
        let v = length_constant(&dd, &ff(1.0), &ff(0.0), 128).unwrap();
        assert!((v.to_f64() - 54f64.powf(-1.0 / 3.0)).abs() < 1e-5);
        assert!(length_constant(&dd, &Bf::zero(), &ff(0.0), 128).is_err());
    }

    #[test]
    fn length_det_inverse_identity() {
        // C'^rho * C = 1 to relative 1e-25 for d <= 5 (and up to 10)
        for d in 1..=10u32 {
            let dd = degree_data(d).unwrap();
            for (a, b) in [(1.0, 0.0), (2.0, 1.0), (4.5, 2.0)] {
                let c = det_constant(&dd, &ff(a), &ff(b), 256).unwrap();
                let cp = length_constant(&dd, &ff(a), &ff(b), 256).unwrap();
                let prod = cp.pow_i64(dd.rho as i64, 256, Round::Nearest).mul(&c);
                let err = prod.sub(&Bf::one()).abs().to_f64();
                assert!(err < 1e-25, "d={d} A={a} B={b}: err {err}");
            }
        }
    }

    #[test]
    fn start_point_examples() {
        let c = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 1.0);
        assert_eq!(start_point(&c, 128), Bf::one());
        let c = SlowCertificate::new(1.0, 0.0, 2.0, 1.0, 1.0);
        assert!((start_point(&c, 128).to_f64() - 7.389_056_098_930_65).abs() < 1e-12);
        // slow_+ with E=4: e^(2/4)
        let c = SlowCertificate::new(1.0, 0.0, 2.0, 1.0, 1.0).with_decay(crate::slow::Decay {
            e: ff(4.0),
            coord: 0,
            limit: crate::slow::LimitValue::Rational(QRat::from_i64(0)),
            class: crate::slow::LimitClass::Rational,
            bound: crate::slow::DecayBound::Power { e: QRat::from_i64(4) },
        });
        assert!((start_point(&c, 128).to_f64() - 0.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn interval_length_examples() {
        let dd = degree_data(1).unwrap();
        let cert = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 1.0);
        let want = 54f64.powf(-1.0 / 3.0);
        let v = interval_length(&dd, &cert, &ff(1.0), &ff(1.0), 128).unwrap();
        assert!((v.to_f64() - want).abs() < 1e-5);
        // doubling N doubles L when C=0
        let v2 = interval_length(&dd, &cert, &ff(1.0), &ff(2.0), 128).unwrap();
        assert!((v2.to_f64() - 2.0 * v.to_f64()).abs() < 1e-10);
        // T = 10: scaled by 10^-2
        let v10 = interval_length(&dd, &cert, &ff(10.0), &ff(1.0), 128).unwrap();
        assert!((v10.to_f64() - want * 0.01).abs() < 1e-7);
        // N below start rejected when C > 0
        let cert_c = SlowCertificate::new(1.0, 0.0, 2.0, 1.0, 1.0);
        assert!(interval_length(&dd, &cert_c, &ff(1.0), &ff(1.0), 128).is_err());
    }

    #[test]
    fn covering_sequence_geometric() {
        // C=0, d=1, A=1, B=0, T=1: x_{n+1} = x_n (1 + 54^(-1/3));
        // first term >= 2 at n = 3
        let dd = degree_data(1).unwrap();
        let cert = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 1.0);
        let xs = covering_sequence(&cert, &dd, &ff(1.0), &ff(2.0), 128, 1000).unwrap();
        assert_eq!(xs.len(), 4); // x0, x1, x2, x3 with x3 >= 2
        let ratio = 1.0 + 54f64.powf(-1.0 / 3.0);
        for (n, x) in xs.iter().enumerate() {
            assert!((x.to_f64() - ratio.powi(n as i32)).abs() < 1e-6);
        }
        assert!(xs[3].to_f64() >= 2.0 && xs[2].to_f64() < 2.0);
        // limit = x0 gives exactly [x0]
        let xs = covering_sequence(&cert, &dd, &ff(1.0), &ff(1.0), 128, 10).unwrap();
        assert_eq!(xs.len(), 1);
        // strictly increasing
        let xs = covering_sequence(&cert, &dd, &ff(2.0), &ff(3.0), 128, 100000).unwrap();
        for w in xs.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn interval_count_examples() {
        let dd = degree_data(1).unwrap();
        let cert = SlowCertificate::new(1.0, 0.0, 0.0, 1.0, 1.0);
        let e = bigfloat::euler_e(160).round(128, Round::Nearest);
        let n = interval_count_bound(&cert, &dd, &ff(1.0), &e, 128).unwrap();
        assert_eq!(n, BigInt::from(7));
        // monotone nondecreasing in phi
        let n2 = interval_count_bound(&cert, &dd, &ff(1.0), &ff(10.0), 128).unwrap();
        assert!(n2 >= n);
        // rejects phi below start
        assert!(interval_count_bound(&cert, &dd, &ff(1.0), &ff(0.5), 128).is_err());
    }

    #[test]
    fn covering_count_dominated_by_bound() {
        // randomized-ish grid of parameter tuples
        let cases = [
            (1u32, 1.0, 0.0, 0.0, 1.0, 5.0),
            (1, 2.0, 1.0, 0.0, 1.0, 8.0),
            (2, 1.0, 0.0, 0.0, 2.0, 20.0),
            (2, 3.0, 1.0, 1.0, 1.5, 10.0),
            (3, 1.0, 2.0, 0.0, 1.0, 4.0),
        ];
        for (d, a, b, c, t, lim) in cases {
            let dd = degree_data(d).unwrap();
            let cert = SlowCertificate::new(a, b, c, 1.0, 1.0);
            let start = effective_start(&cert, 128);
            let limit = start.mul(&ff(lim));
            let xs = covering_sequence(&cert, &dd, &ff(t), &limit, 128, 2_000_000).unwrap();
            let bound = interval_count_bound(&cert, &dd, &ff(t), &limit, 128).unwrap();
            let intervals = BigInt::from(xs.len() as u64 - 1);
            assert!(
                intervals <= bound,
                "d={d} A={a} B={b} C={c} T={t}: {intervals} > {bound}"
            );
        }
    }

    #[test]
    fn degree_schedule_examples() {
        assert_eq!(degree_schedule(&ff(1.0), 128).unwrap(), 1);
        let e3 = bigfloat::exp(&ff(3.0), 160, Round::Ceil);
        assert_eq!(degree_schedule(&e3, 128).unwrap(), 3);
        assert_eq!(degree_schedule(&ff(1e6), 128).unwrap(), 13);
        // T^nu <= e^16 on a log grid up to 1e12
        let e16 = bigfloat::exp(&ff(16.0), 128, Round::Floor);
        for t in slow::log_grid(&ff(1.0), &ff(1e12), 50, 128) {
            let d = degree_schedule(&t, 128).unwrap();
            let nu = degree_data(d).unwrap().nu;
            let t_nu = bigfloat::pow(&t.max_bf(&Bf::one()), &nu.to_bf(128, UP), 128, UP);
            assert!(t_nu <= e16, "T={} d={d}", t.to_dec_string(6));
        }
    }

    #[test]
    fn global_bound_spiral_shape() {
        // spiral with F=G=l=q=1: cert (4,2,0), decay E=1, phi(T)=T;
        // combined log exponent 9
        let cert = SlowCertificate::new(4.0, 2.0, 0.0, 1.0, 1.0).with_decay(crate::slow::Decay {
            e: Bf::one(),
            coord: 0,
            limit: crate::slow::LimitValue::Rational(QRat::from_i64(0)),
            class: crate::slow::LimitClass::Rational,
            bound: crate::slow::DecayBound::Power { e: QRat::from_i64(1) },
        });
        let phi = HeightControl::Power { scale: QRat::from_i64(1), inv_exp: QRat::from_i64(1) };
        let bez = BezoutFormula::Spiral {
            f_exp: QRat::from_i64(1),
            g_exp: QRat::from_i64(1),
            ell: 1,
            q: 1,
            window_scale: QRat::from_i64(1),
        };
        let inp = BoundInputs { name: "spiral", cert: &cert, phi: &phi, bezout: &bez };
        let rep = global_bound(&inp, &ff(100.0), 128).unwrap();
        assert_eq!(rep.shape, ShapePair { log_t: 9, log_log_t: 0 });
        assert!(rep.total.is_positive());
        assert!(rep.slow_plus);
        // monotone in T
        let rep2 = global_bound(&inp, &ff(1000.0), 128).unwrap();
        assert!(rep2.total >= rep.total);
        let rep3 = global_bound(&inp, &ff(1.0), 128).unwrap();
        assert!(rep3.total <= rep.total);
    }

    #[test]
    fn alpha_is_explicit_and_positive() {
        let cert = SlowCertificate::new(4.0, 2.0, 0.0, 1.0, 1.0);
        let a = assemble_alpha(&cert, 128);
        // alpha = 2 e^16/ln2 * A 2^B (1+1/ln2)^(2B) e^(12+4/e)
        let want = 2.0 * 16f64.exp() / std::f64::consts::LN_2
            * (4.0
                * 4.0
                * (1.0 + 1.0 / std::f64::consts::LN_2).powi(4)
                * (12.0 + 4.0 / std::f64::consts::E).exp());
        let got = a.to_f64();
        assert!((got - want).abs() / want < 1e-10, "{got} vs {want}");
    }
}
