//! Concrete curve constructors: damped log-frequency spirals, graphs of
//! trigonometric functions of log powers, the zeta and inverse-gamma graphs,
//! generic power-damped elementary curves, and the empirical test curves.
//!
//! Each constructor packages the coordinate expressions, the derivative
//! certificate from the closure rules, the height-control function, the
//! intersection-count formula for the family, the required transcendence
//! declarations, and (where one is known) an exact generator of rational
//! points on the curve.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bezout::BezoutFormula;
use crate::bigfloat::{self, Bf, Round};
use crate::bound::{self, BoundInputs, BoundReport};
use crate::covering::{self, CompactCover, CoveringPlan};
use crate::expr::{Expr, NamedConst, QRat};
use crate::points::{self, PointStatus, RationalPoint};
use crate::slow::{
    self, CertReport, Decay, DecayBound, HeightControl, LimitClass, LimitValue, SlowCertificate,
};
use crate::special;
use crate::{Error, Result};

/// How a curve's derivative decay is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMode {
    Slow,
    SlowPlus,
    /// No certificate; handled by measured derivative suprema on compact
    /// pieces.
    Compact,
}

/// How rational points on the curve are searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// gamma(x) = (1/x, g(x)); points are reported in graph coordinates.
    ReciprocalGraph,
    /// Plain graph y = g(x) over a two-sided window.
    PlainGraph,
    /// General parametrization (f(x), g(x)).
    Parametric,
}

/// Families with exactly known rational points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnownFamily {
    /// (k, 2^k) on the doubling graph, k any integer.
    Exp2Graph,
    /// (1/k, 2^-k) on the reciprocal slow form, k >= 1.
    Exp2Slow,
    /// (k, 0), (k+-1/2, +-1), (k+-1/6, +-1/2) on the sin(pi x) graph.
    SinPiGraph,
    /// (2^k, +-1) on the graph of cos((pi/log 2) log x), k any integer.
    CosLogPowersOfTwo,
    /// ((-1)^k 2^-k, 0) on the contracting spiral branch, parameter 2^k.
    SpiralPiLog2Contracting,
    /// ((-1)^k 2^k, 0) on the expanding spiral branch, parameter k log 2.
    SpiralPiLog2Expanding,
    /// (n!, 1/(n+1)) on the transformed inverse-gamma graph, n >= 2
    /// (images of the factorial points of the gamma graph).
    GammaFactorials,
}

/// Declared limit data for the two coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub u: (LimitValue, LimitClass),
    pub v: (LimitValue, LimitClass),
}

/// A parametrized plane curve with everything the pipeline needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpec {
    pub name: String,
    pub mode: CurveMode,
    pub scan: ScanKind,
    pub domain_lo: Option<Bf>,
    pub domain_hi: Option<Bf>,
    pub f: Expr,
    pub g: Expr,
    pub cert: Option<SlowCertificate>,
    pub phi: Option<HeightControl>,
    /// Decay data justifying the height control (checked by verification).
    pub phi_decay: Option<Decay>,
    pub bezout: Option<BezoutFormula>,
    /// User declaration; never verified algorithmically.
    pub transcendental: bool,
    /// Declaration that the coordinates have no common zero where required
    /// by the height-control construction.
    pub no_common_zero: bool,
    pub known_family: Option<KnownFamily>,
    pub limit_point: Option<LimitPoint>,
    /// Compact companion branch (for curves split into slow + compact parts).
    pub companion: Option<Box<CurveSpec>>,
    /// Reported numeric constants (normalizations, measured infima, ...).
    pub constants: BTreeMap<String, Bf>,
    pub notes: Vec<String>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2_rat(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from(BigInt::one() << k as u32)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as u32)
    }
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// The damped log-frequency spiral
/// `(x^-F sin(log^l x), x^-G cos(log^q x))` on `[N, +inf)` with
/// `N = e^((max(l,q)-1)/max(F,G))`.
pub fn make_spiral(f_exp: QRat, g_exp: QRat, ell: u32, q: u32) -> Result<CurveSpec> {
    if !f_exp.0.is_positive() || !g_exp.0.is_positive() {
        return Err(Error::Input("spiral damping exponents must be positive".into()));
    }
    if ell == 0 || q == 0 {
        return Err(Error::Input("log-power indices must be >= 1".into()));
    }
    let prec = slow::CERT_PREC;
    let m = ell.max(q) as u64;
    let fg_max = f_exp.0.clone().max(g_exp.0.clone());
    let fg_min = f_exp.0.clone().min(g_exp.0.clone());
    let max_bf = QRat(fg_max.clone()).to_bf(prec, Round::Ceil);
    // constants (2 alpha (max(F,G)+1) max(l,q), max(l,q)+1, max(l,q)-1),
    // decay exponent max(F,G), with alpha = 1
    let a = max_bf
        .add(&Bf::one())
        .mul(&Bf::from_u64(m))
        .mul_pow2(1)
        .round(prec, Round::Ceil);
    let c_log = Bf::from_u64(m - 1);
    // left endpoint: e^((m-1)/max(F,G))
    let left = if m == 1 {
        Bf::one()
    } else {
        let e_exp = Bf::from_u64(m - 1).div_r(&max_bf, prec, Round::Ceil);
        bigfloat::exp(&e_exp, prec, Round::Ceil)
    };
    let decay_coord = if f_exp.0 >= g_exp.0 { 0u8 } else { 1u8 };
    let cert = SlowCertificate {
        a_factor: a,
        b_exp: Bf::from_u64(m + 1),
        c_log,
        d_prefactor: Bf::one(),
        left: left.clone(),
        decay: Some(Decay {
            e: max_bf.clone(),
            coord: decay_coord,
            limit: LimitValue::Rational(QRat::from_i64(0)),
            class: LimitClass::Rational,
            bound: DecayBound::Power { e: QRat(fg_max.clone()) },
        }),
    };
    // phi(T) = T^(1/min(F,G))
    let phi = HeightControl::Power {
        scale: QRat::from_i64(1),
        inv_exp: QRat(BigRational::one() / fg_min),
    };
    let f = Expr::var()
        .pow_rat(QRat(-f_exp.0.clone()))
        .mul(Expr::var().log().powi(ell as i64).sin());
    let g = Expr::var()
        .pow_rat(QRat(-g_exp.0.clone()))
        .mul(Expr::var().log().powi(q as i64).cos());
    Ok(CurveSpec {
        name: format!("spiral-{ell}-{q}"),
        mode: CurveMode::SlowPlus,
        scan: ScanKind::Parametric,
        domain_lo: Some(left),
        domain_hi: None,
        f,
        g,
        cert: cert.clone().into(),
        phi: Some(phi),
        phi_decay: cert.decay.clone(),
        bezout: Some(BezoutFormula::Spiral {
            f_exp,
            g_exp,
            ell,
            q,
            window_scale: QRat::from_i64(1),
        }),
        transcendental: true,
        no_common_zero: true,
        known_family: None,
        limit_point: Some(LimitPoint {
            u: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
            v: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
        }),
        companion: None,
        constants: BTreeMap::new(),
        notes: vec![
            "transcendence and absence of common coordinate zeros are declarations".into(),
        ],
    })
}

/// Trigonometric choice for graph constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    Sin,
    Cos,
}

/// Graph of `a * trig(c * log^l x)`, presented as the slow parametrization
/// `x -> (1/x, g(x)/M)` with `M` the smallest integer bounding `|a|`.
/// `c` must be a constant expression.
pub fn make_sinlog_graph(a_coef: QRat, c: Expr, ell: u32, trig: Trig) -> Result<CurveSpec> {
    if a_coef.0.is_zero() {
        return Err(Error::Input("amplitude must be nonzero".into()));
    }
    if ell == 0 {
        return Err(Error::Input("log-power index must be >= 1".into()));
    }
    let prec = slow::CERT_PREC;
    let c_val = c.eval(&Bf::one(), prec)?;
    if c_val.is_zero() {
        return Err(Error::Input("frequency must be nonzero".into()));
    }
    // normalization: the smallest integer bounding |a|
    let m_norm: BigInt = {
        let q = a_coef.0.abs();
        let c = q.ceil();
        c.numer().clone().max(BigInt::one())
    };
    let a_scaled = QRat(&a_coef.0 / BigRational::from(m_norm.clone()));
    // certificate: trig(c log^l) composed bound with alpha = 1 over the
    // scaled log-power certificate, joined with the 1/x first coordinate
    let alpha_eff = c_val.abs().max_bf(&Bf::one());
    let inner = SlowCertificate {
        a_factor: c_val.abs().max_bf(&Bf::one()).mul_pow2(ell as i64),
        b_exp: Bf::from_u64(ell as u64),
        c_log: Bf::from_u64(ell as u64 - 1),
        d_prefactor: Bf::one(),
        left: bigfloat::euler_e(prec).round(prec, Round::Ceil),
        decay: None,
    };
    let _ = alpha_eff;
    let g_cert = slow::compose_bounded(&Bf::one(), &inner);
    let recip_cert = SlowCertificate {
        a_factor: Bf::one(),
        b_exp: Bf::zero(),
        c_log: Bf::zero(),
        d_prefactor: Bf::one(),
        left: g_cert.left.clone(),
        decay: None,
    };
    let mut cert = slow::combine_coordinates(&g_cert, &recip_cert);
    let decay = Decay {
        e: Bf::one(),
        coord: 0,
        limit: LimitValue::Rational(QRat::from_i64(0)),
        class: LimitClass::Rational,
        bound: DecayBound::Power { e: QRat::from_i64(1) },
    };
    cert.decay = Some(decay.clone());

    let angle = c.clone().mul(Expr::var().log().powi(ell as i64));
    let trig_expr = match trig {
        Trig::Sin => angle.sin(),
        Trig::Cos => angle.cos(),
    };
    let g = Expr::Const {
        value: crate::expr::ConstVal::Rational(a_scaled.clone()),
    }
    .mul(trig_expr);
    let f = Expr::var().recip();

    // window scale for the intersection bound: a rational upper bound on |c|
    let window_scale = QRat(BigRational::from(c_val.abs().ceil_bigint().max(BigInt::one())));
    // known family: cos((pi/log 2) log x) with |a| = 1 hits (2^k, +-1)
    let pi_over_log2 = Expr::named(NamedConst::Pi).mul(Expr::named(NamedConst::Log2).recip());
    let known = if trig == Trig::Cos && ell == 1 && a_coef.0.abs().is_one() && c == pi_over_log2 {
        Some(KnownFamily::CosLogPowersOfTwo)
    } else {
        None
    };
    let ts = match trig {
        Trig::Sin => "sin",
        Trig::Cos => "cos",
    };
    Ok(CurveSpec {
        name: format!("{ts}log-{ell}"),
        mode: CurveMode::SlowPlus,
        scan: ScanKind::ReciprocalGraph,
        domain_lo: Some(cert.left.clone()),
        domain_hi: None,
        f,
        g,
        cert: Some(cert.clone()),
        phi: Some(HeightControl::Power {
            scale: QRat::from_i64(1),
            inv_exp: QRat::from_i64(1),
        }),
        phi_decay: Some(decay),
        bezout: Some(BezoutFormula::SinlogGraph { ell, window_scale }),
        transcendental: true,
        no_common_zero: true,
        known_family: known,
        limit_point: Some(LimitPoint {
            u: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
            v: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
        }),
        companion: None,
        constants: BTreeMap::from([(
            "normalization".to_string(),
            Bf::from_bigint(m_norm),
        )]),
        notes: vec!["transcendence is a declaration".into()],
    })
}

/// A bounded outer function with derivative sup `alpha^p`, or the identity.
#[derive(Debug, Clone)]
pub struct OuterFn {
    /// Expression in the variable, applied to the inner slow function.
    pub expr: Expr,
    /// `|f^(p)| <= alpha^p` on the range of the inner function; >= 1.
    pub alpha: Bf,
    pub is_identity: bool,
}

impl OuterFn {
    pub fn identity() -> OuterFn {
        OuterFn { expr: Expr::var(), alpha: Bf::one(), is_identity: true }
    }

    pub fn sin() -> OuterFn {
        OuterFn { expr: Expr::var().sin(), alpha: Bf::one(), is_identity: false }
    }

    pub fn cos() -> OuterFn {
        OuterFn { expr: Expr::var().cos(), alpha: Bf::one(), is_identity: false }
    }

    pub fn atan() -> OuterFn {
        OuterFn { expr: Expr::var().atan(), alpha: Bf::one(), is_identity: false }
    }
}

/// An inner slow function with its certificate.
#[derive(Debug, Clone)]
pub struct InnerSlow {
    pub expr: Expr,
    pub cert: SlowCertificate,
}

/// Declared limit value of a coordinate.
#[derive(Debug, Clone)]
pub struct LimitSpec {
    /// Constant expression for the limit (exactly representable).
    pub expr: Expr,
    pub class: LimitClass,
}

impl LimitSpec {
    pub fn rational(n: i64, d: i64) -> LimitSpec {
        LimitSpec { expr: Expr::rational(n, d), class: LimitClass::Rational }
    }

    fn value(&self, prec: u32) -> Result<LimitValue> {
        if let Expr::Const { value } = &self.expr {
            if let Some(q) = value.as_rational() {
                if self.class != LimitClass::Rational {
                    return Err(Error::Input(
                        "rational limit constant declared with a non-rational class".into(),
                    ));
                }
                return Ok(LimitValue::Rational(QRat(q.clone())));
            }
        }
        if self.class == LimitClass::Rational {
            return Err(Error::Input(
                "limit declared rational but not supplied as a rational constant".into(),
            ));
        }
        Ok(LimitValue::Real(self.expr.eval(&Bf::one(), prec)?))
    }
}

/// Generic power-damped elementary curve
/// `x -> (u + x^-F f(s(x)), v + x^-G g(sigma(x)))`.
///
/// The height control requires one of: a rational limit whose damped
/// coordinate avoids it (declared), both limits rational with no common
/// zero of the damped parts (declared), or an irrational limit that is not
/// a degree-one U-number together with its measure constant `K`.
#[allow(clippy::too_many_arguments)]
pub fn make_elementary(
    name: &str,
    f: OuterFn,
    g: OuterFn,
    s: InnerSlow,
    sigma: InnerSlow,
    f_damp: QRat,
    g_damp: QRat,
    u: LimitSpec,
    v: LimitSpec,
    k_irr: Option<QRat>,
    avoids_limit: (bool, bool),
    no_common_zero: bool,
    transcendental: bool,
    bezout: BezoutFormula,
) -> Result<CurveSpec> {
    if !f_damp.0.is_positive() || !g_damp.0.is_positive() {
        return Err(Error::Input("damping exponents must be positive".into()));
    }
    let prec = slow::CERT_PREC;
    let u_val = u.value(prec)?;
    let v_val = v.value(prec)?;
    let fd = f_damp.to_bf(prec, Round::Ceil);
    let gd = g_damp.to_bf(prec, Round::Ceil);
    let cf = slow::damp_power(&fd, &f.alpha, &s.cert);
    let cg = slow::damp_power(&gd, &g.alpha, &sigma.cert);
    let mut cert = slow::combine_coordinates(&cf, &cg);
    let (e_coord, e_val, e_rat) = if f_damp.0 >= g_damp.0 {
        (0u8, fd.clone(), f_damp.clone())
    } else {
        (1u8, gd.clone(), g_damp.clone())
    };
    let decay_limit = if e_coord == 0 { u_val.clone() } else { v_val.clone() };
    let decay_class = if e_coord == 0 { u.class } else { v.class };
    cert.decay = Some(Decay {
        e: e_val,
        coord: e_coord,
        limit: decay_limit.clone(),
        class: decay_class,
        bound: DecayBound::Power { e: e_rat },
    });

    // height control per the declared Diophantine situation
    let phi = pick_height_control(
        (&u_val, u.class, &f_damp, avoids_limit.0),
        (&v_val, v.class, &g_damp, avoids_limit.1),
        no_common_zero,
        k_irr.as_ref(),
    )?;

    let build_coord = |outer: &OuterFn, inner: &InnerSlow, damp: &QRat, limit: &LimitSpec| {
        let core = if outer.is_identity {
            inner.expr.clone()
        } else {
            Expr::compose(outer.expr.clone(), inner.expr.clone())
        };
        limit
            .expr
            .clone()
            .add(Expr::var().pow_rat(QRat(-damp.0.clone())).mul(core))
    };
    let f_expr = build_coord(&f, &s, &f_damp, &u);
    let g_expr = build_coord(&g, &sigma, &g_damp, &v);
    let phi_decay = cert.decay.clone();

    Ok(CurveSpec {
        name: name.to_string(),
        mode: CurveMode::SlowPlus,
        scan: ScanKind::Parametric,
        domain_lo: Some(cert.left.clone()),
        domain_hi: None,
        f: f_expr,
        g: g_expr,
        cert: Some(cert),
        phi: Some(phi),
        phi_decay,
        bezout: Some(bezout),
        transcendental,
        no_common_zero,
        known_family: None,
        limit_point: Some(LimitPoint { u: (u_val, u.class), v: (v_val, v.class) }),
        companion: None,
        constants: BTreeMap::new(),
        notes: vec![
            "limit-avoidance, common-zero and transcendence conditions are declarations".into(),
        ],
    })
}

fn pick_height_control(
    u: (&LimitValue, LimitClass, &QRat, bool),
    v: (&LimitValue, LimitClass, &QRat, bool),
    no_common_zero: bool,
    k_irr: Option<&QRat>,
) -> Result<HeightControl> {
    let coord_power = |val: &LimitValue, damp: &QRat| -> Option<HeightControl> {
        if let LimitValue::Rational(q) = val {
            Some(HeightControl::Power {
                scale: QRat(BigRational::from(q.0.denom().clone())),
                inv_exp: QRat(BigRational::one() / &damp.0),
            })
        } else {
            None
        }
    };
    // (1)/(2): one rational limit whose coordinate avoids it
    if u.1 == LimitClass::Rational && u.3 {
        if let Some(h) = coord_power(u.0, u.2) {
            return Ok(h);
        }
    }
    if v.1 == LimitClass::Rational && v.3 {
        if let Some(h) = coord_power(v.0, v.2) {
            return Ok(h);
        }
    }
    // (3): both rational, no common zero: dominate the two power controls
    if u.1 == LimitClass::Rational && v.1 == LimitClass::Rational && no_common_zero {
        if let (LimitValue::Rational(qu), LimitValue::Rational(qv)) = (u.0, v.0) {
            let scale = qu.0.denom().clone().max(qv.0.denom().clone());
            let min_damp = u.2 .0.clone().min(v.2 .0.clone());
            return Ok(HeightControl::Power {
                scale: QRat(BigRational::from(scale)),
                inv_exp: QRat(BigRational::one() / min_damp),
            });
        }
    }
    // (4)/(5): an irrational limit that is not a degree-one U-number
    for (val, class, damp) in [(u.0, u.1, u.2), (v.0, v.1, v.2)] {
        if class == LimitClass::NonU1Irrational {
            let k = k_irr.ok_or_else(|| {
                Error::Input(
                    "an irrational limit requires the measure constant K (tau(T) = K log T)"
                        .into(),
                )
            })?;
            let _ = val;
            return Ok(HeightControl::Power {
                scale: QRat::from_i64(1),
                inv_exp: QRat(&k.0 / &damp.0),
            });
        }
    }
    Err(Error::Input(
        "no admissible limit configuration: need a rational limit with declared avoidance, \
         both limits rational with no common zero, or a non-U1 irrational limit with K"
            .into(),
    ))
}

/// The zeta graph on `[a, +inf)` (a > 1), presented as
/// `x -> (1/x, zeta(x)/M)` with `M = ceil(zeta(a))`.
pub fn make_zeta(a_left: QRat, c_bezout: QRat) -> Result<CurveSpec> {
    let prec = 160;
    let a_bf = a_left.to_bf(prec, Round::Floor);
    if a_bf <= Bf::one() {
        return Err(Error::Input("zeta graph requires a > 1".into()));
    }
    // lambda = 1/2 - 1/(2a), exactly
    let lambda_rat = QRat(
        BigRational::new(BigInt::one(), BigInt::from(2))
            - BigRational::one() / (BigRational::from(BigInt::from(2)) * &a_left.0),
    );
    let lambda = lambda_rat.to_bf(prec, Round::Floor);
    // s* = a/2 + 1/2
    let s_star = QRat(
        &a_left.0 / BigRational::from(BigInt::from(2))
            + BigRational::new(BigInt::one(), BigInt::from(2)),
    );
    let zeta_star = special::zeta(&s_star.to_bf(prec, Round::Nearest), prec)?;
    let m_a = zeta_star.sub(&Bf::one()).round(prec, Round::Ceil);
    let zeta_a = special::zeta(&a_bf, prec)?;
    let big_m = zeta_a.ceil_bigint().max(BigInt::one());
    // A = zeta(a/2 + 1/2) / (lambda e)
    let a_const = zeta_star
        .div_r(&lambda, prec, Round::Ceil)
        .div_r(&bigfloat::euler_e(prec).round(prec, Round::Floor), prec, Round::Ceil);
    let decay = Decay {
        e: Bf::one(),
        coord: 0,
        limit: LimitValue::Rational(QRat::from_i64(0)),
        class: LimitClass::Rational,
        bound: DecayBound::Power { e: QRat::from_i64(1) },
    };
    let cert = SlowCertificate {
        a_factor: a_const.clone(),
        b_exp: Bf::one(),
        c_log: Bf::zero(),
        d_prefactor: Bf::one(),
        left: a_bf.clone(),
        decay: Some(decay),
    };
    let m_inv = QRat(BigRational::new(BigInt::one(), big_m.clone()));
    let g = Expr::Const { value: crate::expr::ConstVal::Rational(m_inv.clone()) }
        .mul(Expr::var().zeta());
    // |zeta/M - 1/M| <= (m_a / M) 2^(-lambda x); the height control for the
    // rational limit 1/M is log(m_a T)/(lambda log 2) (the normalizer cancels)
    let phi = HeightControl::LogOfT {
        m: m_a.clone(),
        lambda: lambda.clone(),
        k: QRat::from_i64(1),
    };
    let phi_decay = Decay {
        e: Bf::zero(),
        coord: 1,
        limit: LimitValue::Rational(m_inv),
        class: LimitClass::Rational,
        bound: DecayBound::Geometric {
            m: m_a.div_r(&Bf::from_bigint(big_m.clone()), prec, Round::Ceil),
            lambda: lambda.clone(),
        },
    };
    Ok(CurveSpec {
        name: "zeta".into(),
        mode: CurveMode::SlowPlus,
        scan: ScanKind::ReciprocalGraph,
        domain_lo: Some(a_bf),
        domain_hi: None,
        f: Expr::var().recip(),
        g,
        cert: Some(cert),
        phi: Some(phi),
        phi_decay: Some(phi_decay),
        bezout: Some(BezoutFormula::Zeta { c: c_bezout }),
        transcendental: true,
        no_common_zero: true,
        known_family: None,
        limit_point: Some(LimitPoint {
            u: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
            v: (
                LimitValue::Rational(QRat(BigRational::new(BigInt::one(), big_m.clone()))),
                LimitClass::Rational,
            ),
        }),
        companion: None,
        constants: BTreeMap::from([
            ("lambda".to_string(), lambda),
            ("m_a".to_string(), m_a),
            ("normalization".to_string(), Bf::from_bigint(big_m)),
            ("cert_a".to_string(), a_const),
        ]),
        notes: vec![
            "intersection-bound constant is configuration-supplied".into(),
            "transcendence is a declaration".into(),
        ],
    })
}

/// The inverse-gamma graph: with `f` the inverse of gamma on the increasing
/// branch `[2, +inf) -> [1, +inf)`, the curve is `y -> (1/y, 1/f(y))` on
/// `[2, +inf)`, whose rational points are the images of the factorial
/// points of the gamma graph.
pub fn make_gamma(c_bezout: QRat) -> Result<CurveSpec> {
    let prec = 160;
    // delta: infimum over [2, inf) of log y / f(y). The ratio is increasing
    // (checked by the verification suite), so the infimum is at y = 2,
    // where f(2) = 3 exactly: delta = log(2)/3, rounded down.
    let delta = bigfloat::ln2(prec)
        .div_r(&Bf::from_i64(3), prec, Round::Floor)
        .round(prec, Round::Floor);
    // D: minimum of Gamma(x) e^-x over x >= 1 (reported; ternary search on
    // the single interior critical point).
    let d_min = gamma_exp_min(prec)?;
    // A = 4 / (delta e^2)
    let e2 = bigfloat::euler_e(prec).pow_i64(2, prec, Round::Floor);
    let a_const = Bf::from_i64(4).div_r(&delta.mul_r(&e2, prec, Round::Floor), prec, Round::Ceil);
    let decay = Decay {
        e: Bf::one(),
        coord: 0,
        limit: LimitValue::Rational(QRat::from_i64(0)),
        class: LimitClass::Rational,
        bound: DecayBound::Power { e: QRat::from_i64(1) },
    };
    let cert = SlowCertificate {
        a_factor: a_const.clone(),
        b_exp: Bf::from_i64(4),
        c_log: Bf::one(),
        d_prefactor: Bf::one(),
        left: Bf::from_i64(2),
        decay: Some(decay.clone()),
    };
    Ok(CurveSpec {
        name: "gamma".into(),
        mode: CurveMode::SlowPlus,
        scan: ScanKind::ReciprocalGraph,
        domain_lo: Some(Bf::from_i64(2)),
        domain_hi: None,
        f: Expr::var().recip(),
        g: Expr::var().gamma_inverse().recip(),
        cert: Some(cert),
        phi: Some(HeightControl::Power {
            scale: QRat::from_i64(1),
            inv_exp: QRat::from_i64(1),
        }),
        phi_decay: Some(decay),
        bezout: Some(BezoutFormula::Gamma { c: c_bezout, delta: delta.clone() }),
        transcendental: true,
        no_common_zero: true,
        known_family: Some(KnownFamily::GammaFactorials),
        limit_point: Some(LimitPoint {
            u: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
            v: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
        }),
        companion: None,
        constants: BTreeMap::from([
            ("delta".to_string(), delta),
            ("gamma_exp_min".to_string(), d_min),
            ("cert_a".to_string(), a_const),
        ]),
        notes: vec![
            "inverse branch: gamma restricted to [2, +inf), where it is >= 1 \
             and strictly increasing"
                .into(),
            "intersection-bound constant is configuration-supplied".into(),
        ],
    })
}

/// min over x >= 1 of Gamma(x) e^-x, by ternary search on the interior
/// critical point; rounded down.
fn gamma_exp_min(prec: u32) -> Result<Bf> {
    let h = |x: &Bf| -> Result<Bf> {
        let g = special::gamma(x, prec)?;
        let e = bigfloat::exp(&x.neg(), prec, Round::Nearest);
        Ok(g.mul_r(&e, prec, Round::Nearest))
    };
    let mut lo = Bf::one();
    let mut hi = Bf::from_i64(8);
    for _ in 0..(prec / 2).max(80) {
        let third = hi.sub(&lo).div_r(&Bf::from_i64(3), prec, Round::Nearest);
        let m1 = lo.add(&third);
        let m2 = hi.sub(&third);
        if h(&m1)? < h(&m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi.sub(&lo).msb_exp() < -((prec / 2) as i64) {
            break;
        }
    }
    let x_star = lo.add(&hi).mul_pow2(-1);
    Ok(h(&x_star)?.round(prec, Round::Floor))
}

/// Test-curve kinds of the empirical suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestCurveKind {
    /// The expanding/contracting spiral `(e^x cos(wx), e^x sin(wx))` with
    /// `w = pi/log 2`; split into a slow contracting branch and a compact
    /// expanding branch.
    UnboundedSpiralPiLog2,
    /// Graph of 2^x (empirical only).
    Exp2Graph,
    /// Slow form of the doubling graph: `x -> (1/x, 2^-x)` on [1, +inf).
    Exp2Slow,
    /// Graph of sin(pi x) (empirical only).
    SinPiGraph,
    /// Graph of sin(c x) in compact mode.
    SinCGraph { c: QRat },
}

pub fn make_test_curve(kind: TestCurveKind) -> Result<CurveSpec> {
    let prec = slow::CERT_PREC;
    match kind {
        TestCurveKind::UnboundedSpiralPiLog2 => {
            let omega = Expr::named(NamedConst::Pi).mul(Expr::named(NamedConst::Log2).recip());
            let omega_val = omega.eval(&Bf::one(), prec)?;
            // contracting branch, parameter t = e^-x >= 1:
            // (cos(w log t)/t, -sin(w log t)/t)
            let f = Expr::var()
                .recip()
                .mul(Expr::compose(Expr::var().cos(), omega.clone().mul(Expr::var().log())));
            let g = Expr::var()
                .recip()
                .mul(Expr::compose(Expr::var().sin(), omega.clone().mul(Expr::var().log())))
                .neg();
            let alpha = omega_val.abs().max_bf(&Bf::one());
            let decay = Decay {
                e: Bf::one(),
                coord: 0,
                limit: LimitValue::Rational(QRat::from_i64(0)),
                class: LimitClass::Rational,
                bound: DecayBound::Power { e: QRat::from_i64(1) },
            };
            let cert = SlowCertificate {
                a_factor: alpha.mul_pow2(2).round(prec, Round::Ceil),
                b_exp: Bf::from_i64(2),
                c_log: Bf::zero(),
                d_prefactor: Bf::one(),
                left: Bf::one(),
                decay: Some(decay.clone()),
            };
            // expanding branch: compact companion (e^x cos(wx), e^x sin(wx))
            let fe = Expr::var().exp().mul(Expr::compose(
                Expr::var().cos(),
                omega.clone().mul(Expr::var()),
            ));
            let ge = Expr::var().exp().mul(Expr::compose(
                Expr::var().sin(),
                omega.clone().mul(Expr::var()),
            ));
            let companion = CurveSpec {
                name: "spiral-unbounded-pilog2-expanding".into(),
                mode: CurveMode::Compact,
                scan: ScanKind::Parametric,
                domain_lo: Some(Bf::zero()),
                domain_hi: None,
                f: fe,
                g: ge,
                cert: None,
                phi: None,
                phi_decay: None,
                bezout: None,
                transcendental: true,
                no_common_zero: true,
                known_family: Some(KnownFamily::SpiralPiLog2Expanding),
                limit_point: None,
                companion: None,
                constants: BTreeMap::new(),
                notes: vec![
                    "compact branch: truncate the parameter near log of the height bound".into(),
                ],
            };
            Ok(CurveSpec {
                name: "spiral-unbounded-pilog2".into(),
                mode: CurveMode::SlowPlus,
                scan: ScanKind::Parametric,
                domain_lo: Some(Bf::one()),
                domain_hi: None,
                f,
                g,
                cert: Some(cert),
                phi: Some(HeightControl::Power {
                    scale: QRat::from_i64(1),
                    inv_exp: QRat::from_i64(1),
                }),
                phi_decay: Some(decay),
                bezout: Some(BezoutFormula::Spiral {
                    f_exp: QRat::from_i64(1),
                    g_exp: QRat::from_i64(1),
                    ell: 1,
                    q: 1,
                    window_scale: QRat::from_i64(5), // rational bound on pi/log 2
                }),
                transcendental: true,
                no_common_zero: true,
                known_family: Some(KnownFamily::SpiralPiLog2Contracting),
                limit_point: Some(LimitPoint {
                    u: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
                    v: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
                }),
                companion: Some(Box::new(companion)),
                constants: BTreeMap::new(),
                notes: vec!["split into contracting (slow) and expanding (compact) branches".into()],
            })
        }
        TestCurveKind::Exp2Graph => Ok(CurveSpec {
            name: "exp2".into(),
            mode: CurveMode::Compact,
            scan: ScanKind::PlainGraph,
            domain_lo: None,
            domain_hi: None,
            f: Expr::var(),
            g: Expr::var().mul(Expr::named(NamedConst::Log2)).exp(),
            cert: None,
            phi: None,
            phi_decay: None,
            bezout: None,
            transcendental: true,
            no_common_zero: true,
            known_family: Some(KnownFamily::Exp2Graph),
            limit_point: None,
            companion: None,
            constants: BTreeMap::new(),
            notes: vec!["empirical graph; the doubling map's points are the integer pairs".into()],
        }),
        TestCurveKind::Exp2Slow => {
            let decay = Decay {
                e: Bf::one(),
                coord: 0,
                limit: LimitValue::Rational(QRat::from_i64(0)),
                class: LimitClass::Rational,
                bound: DecayBound::Power { e: QRat::from_i64(1) },
            };
            let phi_decay = Decay {
                e: Bf::zero(),
                coord: 1,
                limit: LimitValue::Rational(QRat::from_i64(0)),
                class: LimitClass::Rational,
                bound: DecayBound::Geometric { m: Bf::one(), lambda: Bf::one() },
            };
            let cert = SlowCertificate {
                a_factor: Bf::one(),
                b_exp: Bf::zero(),
                c_log: Bf::zero(),
                d_prefactor: Bf::one(),
                left: Bf::one(),
                decay: Some(decay),
            };
            Ok(CurveSpec {
                name: "exp2-slow".into(),
                mode: CurveMode::SlowPlus,
                scan: ScanKind::ReciprocalGraph,
                domain_lo: Some(Bf::one()),
                domain_hi: None,
                f: Expr::var().recip(),
                g: Expr::var().mul(Expr::named(NamedConst::Log2)).neg().exp(),
                cert: Some(cert),
                phi: Some(HeightControl::LogOfT {
                    m: Bf::one(),
                    lambda: Bf::one(),
                    k: QRat::from_i64(1),
                }),
                phi_decay: Some(phi_decay),
                bezout: Some(BezoutFormula::CustomPolyLogD {
                    monomials: vec![
                        (0, 2, QRat::from_i64(1)),
                        (0, 1, QRat::from_i64(2)),
                        (0, 0, QRat::from_i64(2)),
                    ],
                }),
                transcendental: true,
                no_common_zero: true,
                known_family: Some(KnownFamily::Exp2Slow),
                limit_point: Some(LimitPoint {
                    u: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
                    v: (LimitValue::Rational(QRat::from_i64(0)), LimitClass::Rational),
                }),
                companion: None,
                constants: BTreeMap::new(),
                notes: vec![
                    "intersection bound: few-term exponential-polynomial zero count, \
                     constant supplied by configuration"
                        .into(),
                ],
            })
        }
        TestCurveKind::SinPiGraph => Ok(CurveSpec {
            name: "sinpi".into(),
            mode: CurveMode::Compact,
            scan: ScanKind::PlainGraph,
            domain_lo: None,
            domain_hi: None,
            f: Expr::var(),
            g: Expr::var().mul(Expr::named(NamedConst::Pi)).sin(),
            cert: None,
            phi: None,
            phi_decay: None,
            bezout: None,
            transcendental: true,
            no_common_zero: true,
            known_family: Some(KnownFamily::SinPiGraph),
            limit_point: None,
            companion: None,
            constants: BTreeMap::new(),
            notes: vec!["empirical graph of unbounded order".into()],
        }),
        TestCurveKind::SinCGraph { c } => Ok(CurveSpec {
            name: format!("sinc-{}", c.0),
            mode: CurveMode::Compact,
            scan: ScanKind::PlainGraph,
            domain_lo: None,
            domain_hi: None,
            f: Expr::var(),
            g: Expr::Const { value: crate::expr::ConstVal::Rational(c) }
                .mul(Expr::var())
                .sin(),
            cert: None,
            phi: None,
            phi_decay: None,
            bezout: None,
            transcendental: true,
            no_common_zero: true,
            known_family: None,
            limit_point: None,
            companion: None,
            constants: BTreeMap::new(),
            notes: vec!["compact mode: uniform derivative suprema".into()],
        }),
    }
}

// ---------------------------------------------------------------------------
// Known-point generators
// ---------------------------------------------------------------------------

/// Exact rational points of height at most `t` for a known family, with
/// curve parameters attached.
pub fn known_points(curve: &CurveSpec, t: u64, prec: u32) -> Vec<RationalPoint> {
    let Some(family) = curve.known_family else {
        return Vec::new();
    };
    let mut pts = Vec::new();
    let tb = BigInt::from(t);
    match family {
        KnownFamily::Exp2Graph => {
            // (k, 2^k): height max(|k|, 2^|k|) = 2^|k| for k != 0
            let mut k = 0i64;
            loop {
                let h = BigInt::one() << k.unsigned_abs() as u32;
                if h > tb && k != 0 {
                    break;
                }
                for kk in [k, -k] {
                    let p = RationalPoint::new(
                        rat(kk, 1),
                        pow2_rat(kk),
                        Some(Bf::from_i64(kk)),
                        PointStatus::Certified,
                    );
                    if let Some(p) = p {
                        if p.height <= t {
                            pts.push(p);
                        }
                    }
                    if k == 0 {
                        break;
                    }
                }
                k += 1;
            }
        }
        KnownFamily::Exp2Slow => {
            // graph coordinates (k, 2^-k) for k >= 1; height 2^k
            let mut k = 1i64;
            while (BigInt::one() << k as u32) <= tb {
                if let Some(p) = RationalPoint::new(
                    rat(k, 1),
                    pow2_rat(-k),
                    Some(Bf::from_i64(k)),
                    PointStatus::Certified,
                ) {
                    if p.height <= t {
                        pts.push(p);
                    }
                }
                k += 1;
            }
        }
        KnownFamily::SinPiGraph => {
            // (k, 0): height |k|
            let tk = t as i64;
            for k in -tk..=tk {
                if let Some(p) = RationalPoint::new(
                    rat(k, 1),
                    rat(0, 1),
                    Some(Bf::from_i64(k)),
                    PointStatus::Certified,
                ) {
                    if p.height <= t {
                        pts.push(p);
                    }
                }
            }
            // (k + 1/2, +-1): sin(pi(k + 1/2)) = (-1)^k; height |2k+1|
            let mut k = -tk;
            while k <= tk {
                let x = rat(2 * k + 1, 2);
                let y = rat(if k.rem_euclid(2) == 0 { 1 } else { -1 }, 1);
                if let Some(p) = RationalPoint::new(
                    x.clone(),
                    y,
                    Some(Bf::from_ratio(x.numer(), x.denom(), prec, Round::Nearest)),
                    PointStatus::Certified,
                ) {
                    if p.height <= t {
                        pts.push(p);
                    }
                }
                k += 1;
            }
            // (k +- 1/6, +-1/2): sin(pi/6) = 1/2; heights |6k +- 1|
            let mut k = -tk;
            while k <= tk {
                for (num, sign) in [(6 * k + 1, 1i64), (6 * k - 1, -1)] {
                    // sin(pi (6k+1)/6) = sin(pi k + pi/6) = (-1)^k / 2
                    let s = if k.rem_euclid(2) == 0 { sign } else { -sign };
                    let x = rat(num, 6);
                    let y = rat(s, 2);
                    if let Some(p) = RationalPoint::new(
                        x.clone(),
                        y,
                        Some(Bf::from_ratio(x.numer(), x.denom(), prec, Round::Nearest)),
                        PointStatus::Certified,
                    ) {
                        if p.height <= t {
                            pts.push(p);
                        }
                    }
                }
                k += 1;
            }
        }
        KnownFamily::CosLogPowersOfTwo => {
            // graph coordinates (2^k, a (-1)^k), |a| = 1; parameter 2^k
            let mut k = 0i64;
            loop {
                let h = BigInt::one() << k.unsigned_abs() as u32;
                if h > tb && k != 0 {
                    break;
                }
                for kk in [k, -k] {
                    let y = rat(if kk.rem_euclid(2) == 0 { 1 } else { -1 }, 1);
                    let x = pow2_rat(kk);
                    let param = Bf::from_ratio(x.numer(), x.denom(), prec, Round::Nearest);
                    if let Some(p) =
                        RationalPoint::new(x, y, Some(param), PointStatus::Certified)
                    {
                        if p.height <= t {
                            pts.push(p);
                        }
                    }
                    if k == 0 {
                        break;
                    }
                }
                k += 1;
            }
        }
        KnownFamily::SpiralPiLog2Contracting => {
            // parameter t = 2^k, k >= 0: ((-1)^k 2^-k, 0)
            let mut k = 0i64;
            while (BigInt::one() << k as u32) <= tb {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let x = if sign > 0 { pow2_rat(-k) } else { -pow2_rat(-k) };
                let param = pow2_rat(k);
                if let Some(p) = RationalPoint::new(
                    x,
                    rat(0, 1),
                    Some(Bf::from_ratio(param.numer(), param.denom(), prec, Round::Nearest)),
                    PointStatus::Certified,
                ) {
                    if p.height <= t {
                        pts.push(p);
                    }
                }
                k += 1;
            }
        }
        KnownFamily::SpiralPiLog2Expanding => {
            // parameter x = k log 2, k >= 1: ((-1)^k 2^k, 0)
            let ln2 = bigfloat::ln2(prec);
            let mut k = 1i64;
            while (BigInt::one() << k as u32) <= tb {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let x = if sign > 0 { pow2_rat(k) } else { -pow2_rat(k) };
                let param = Bf::from_i64(k).mul(&ln2).round(prec, Round::Nearest);
                if let Some(p) =
                    RationalPoint::new(x, rat(0, 1), Some(param), PointStatus::Certified)
                {
                    if p.height <= t {
                        pts.push(p);
                    }
                }
                k += 1;
            }
        }
        KnownFamily::GammaFactorials => {
            // graph coordinates (n!, 1/(n+1)), parameter n! (n >= 2): the
            // images of the factorial points of the gamma graph
            let mut n = 2u64;
            let mut fact = BigInt::from(2); // 2!
            while fact <= tb {
                let x = BigRational::from(fact.clone());
                let y = rat(1, (n + 1) as i64);
                let param = Bf::from_bigint(fact.clone());
                if let Some(p) = RationalPoint::new(x, y, Some(param), PointStatus::Certified) {
                    if p.height <= t {
                        pts.push(p);
                    }
                }
                n += 1;
                fact *= BigInt::from(n);
            }
        }
    }
    pts.sort_by(|a, b| (&a.x.0, &a.y.0).cmp(&(&b.x.0, &b.y.0)));
    pts
}

// ---------------------------------------------------------------------------
// Curve-level operations
// ---------------------------------------------------------------------------

/// Verify the curve's certificate by sampling (both coordinates, all orders
/// up to `p_max`, a log grid of `grid_n` points starting at the domain).
pub fn verify_curve(curve: &CurveSpec, p_max: u64, grid_n: usize, prec: u32) -> Result<CertReport> {
    let cert = curve
        .cert
        .as_ref()
        .ok_or_else(|| Error::Input(format!("curve `{}` carries no certificate", curve.name)))?;
    let lo = cert.left.max_bf(curve.domain_lo.as_ref().unwrap_or(&cert.left));
    let hi_default = lo.mul(&bigfloat::exp(&Bf::from_i64(6), 64, Round::Nearest));
    let hi = match &curve.domain_hi {
        Some(h) => h.min_bf(&hi_default),
        None => hi_default,
    };
    let grid = slow::log_grid(&lo, &hi, grid_n.max(2), prec);
    let mut report = slow::verify_certificate(&[&curve.f, &curve.g], cert, p_max, &grid, prec);
    // also check the height-control decay data at order zero
    if let Some(pd) = &curve.phi_decay {
        let coord = if pd.coord == 0 { &curve.f } else { &curve.g };
        for x in &grid {
            let val = match coord.eval(x, prec) {
                Ok(v) => v,
                Err(e) => {
                    report.eval_errors.push(format!("phi-decay eval: {e}"));
                    continue;
                }
            };
            let gap = val.sub(&pd.limit.to_bf(prec)).abs();
            let bound = slow::decay_bound_value(&pd.bound, x, prec);
            let bound = bound.add(&bound.abs().mul_pow2(-((prec / 2) as i64)));
            report.checks += 1;
            if gap > bound {
                report.passed = false;
                if report.first_violation.is_none() {
                    report.first_violation = Some(slow::Violation {
                        coord: pd.coord as usize,
                        p: 0,
                        x: x.clone(),
                        coefficient: gap,
                        bound,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Assemble the explicit counting bound for the curve at threshold `t`.
pub fn global_bound(curve: &CurveSpec, t: &Bf, prec: u32) -> Result<BoundReport> {
    let cert = curve.cert.as_ref().ok_or_else(|| {
        Error::Input(format!("curve `{}` carries no derivative certificate", curve.name))
    })?;
    let phi = curve.phi.as_ref().ok_or_else(|| {
        Error::Input(format!("curve `{}` carries no height-control function", curve.name))
    })?;
    let bez = curve.bezout.as_ref().ok_or_else(|| {
        Error::Input(format!("curve `{}` carries no intersection-count formula", curve.name))
    })?;
    if !curve.transcendental {
        return Err(Error::Input(format!(
            "curve `{}` is not declared transcendental; the counting bound does not apply",
            curve.name
        )));
    }
    let mut rep = bound::global_bound(
        &BoundInputs { name: &curve.name, cert, phi, bezout: bez },
        t,
        prec,
    )?;
    rep.notes.extend(curve.notes.iter().cloned());
    Ok(rep)
}

/// Scan metadata alongside the merged point list.
#[derive(Debug, Clone, Serialize)]
pub struct ScanMeta {
    pub window_lo: String,
    pub window_hi: String,
    pub certified: usize,
    pub candidates: usize,
    pub undercount_possible: bool,
    pub eval_errors: Vec<String>,
}

/// Default scan window for a curve at height bound `t`.
pub fn default_window(curve: &CurveSpec, t: u64, prec: u32) -> Result<(Bf, Bf)> {
    match curve.scan {
        ScanKind::PlainGraph => {
            // graphs with exponential growth only carry points near the
            // logarithm of the height bound; others use the full reach
            let t_bf = Bf::from_u64(t);
            if curve.name.starts_with("exp2") {
                let lim = bigfloat::ln(&t_bf, prec, Round::Ceil)
                    .div_r(&bigfloat::ln2(prec), prec, Round::Ceil)
                    .add(&Bf::one());
                Ok((lim.neg(), lim))
            } else {
                Ok((t_bf.neg(), t_bf))
            }
        }
        ScanKind::ReciprocalGraph | ScanKind::Parametric => {
            let lo = curve
                .domain_lo
                .clone()
                .ok_or_else(|| Error::Input("curve has no domain start".into()))?;
            let hi = match (&curve.phi, &curve.domain_hi) {
                (Some(phi), _) => phi.eval(&Bf::from_u64(t), prec)?.max_bf(&lo),
                (None, Some(h)) => h.clone(),
                (None, None) => {
                    // compact branches: coordinates of size e^x reach the
                    // height bound by x ~ log(sqrt(2) T)
                    let t_bf = Bf::from_u64(t).mul(&Bf::from_f64(1.5));
                    bigfloat::ln(&t_bf, prec, Round::Ceil).max_bf(&lo)
                }
            };
            Ok((lo, hi))
        }
    }
}

/// Scan the curve for rational points of height at most `t`, merging the
/// known-family points (certified) with detected candidates.
pub fn scan_curve(
    curve: &CurveSpec,
    t: u64,
    window: Option<(Bf, Bf)>,
    resolution: usize,
    prec: u32,
) -> Result<(Vec<RationalPoint>, ScanMeta)> {
    let (lo, hi) = match window {
        Some(w) => w,
        None => default_window(curve, t, prec)?,
    };
    let known = known_points(curve, t, prec);
    let outcome = match curve.scan {
        ScanKind::PlainGraph | ScanKind::ReciprocalGraph => {
            let to_rat = |v: &Bf| {
                let (n, d) = v.to_rational();
                BigRational::new(n, d)
            };
            points::scan_graph(&curve.g, &to_rat(&lo), &to_rat(&hi), t, prec)?
        }
        ScanKind::Parametric => {
            points::scan_parametric(&curve.f, &curve.g, &lo, &hi, t, resolution, prec)?
        }
    };
    // For reciprocal graphs the scan runs over the graph abscissa; points
    // are kept in graph coordinates for reporting, and mapped to curve
    // coordinates only when covering.
    let mut merged = points::merge_points(known, outcome.candidates.clone());
    merged.retain(|p| p.height <= t);
    let meta = ScanMeta {
        window_lo: lo.to_dec_string(20),
        window_hi: hi.to_dec_string(20),
        certified: merged.iter().filter(|p| p.status == PointStatus::Certified).count(),
        candidates: merged.iter().filter(|p| p.status == PointStatus::Candidate).count(),
        undercount_possible: outcome.undercount_possible,
        eval_errors: outcome.eval_errors,
    };
    Ok((merged, meta))
}

/// Map a point list to the curve's own coordinates (reciprocal graphs store
/// graph coordinates for reporting).
pub fn to_curve_coordinates(curve: &CurveSpec, pts: &[RationalPoint]) -> Vec<RationalPoint> {
    match curve.scan {
        ScanKind::ReciprocalGraph => pts
            .iter()
            .filter(|p| !p.x.0.is_zero())
            .filter_map(|p| {
                RationalPoint::new(
                    p.x.0.recip(),
                    p.y.0.clone(),
                    p.parameter.clone(),
                    p.status,
                )
            })
            .collect(),
        _ => pts.to_vec(),
    }
}

/// Covering plan for a certified curve at threshold `t`, using the known
/// family plus (optionally) scanned candidates as the point set.
pub fn covering_plan(
    curve: &CurveSpec,
    t: u64,
    points_in: Option<Vec<RationalPoint>>,
    prec: u32,
    max_steps: usize,
) -> Result<CoveringPlan> {
    let cert = curve.cert.as_ref().ok_or_else(|| {
        Error::Input(format!("curve `{}` carries no certificate", curve.name))
    })?;
    let phi = curve.phi.as_ref().ok_or_else(|| {
        Error::Input(format!("curve `{}` carries no height-control function", curve.name))
    })?;
    let pts = match points_in {
        Some(p) => p,
        None => known_points(curve, t, prec),
    };
    let curve_pts = to_curve_coordinates(curve, &pts);
    covering::build_covering_plan(
        &curve.name,
        cert,
        phi,
        &curve_pts,
        &Bf::from_u64(t),
        prec,
        max_steps,
    )
}

/// Compact cover of a companion/compact curve over `[lo, hi]`.
#[allow(clippy::too_many_arguments)]
pub fn compact_cover(
    curve: &CurveSpec,
    lo: &Bf,
    hi: &Bf,
    t: u64,
    d: u32,
    prec: u32,
    blocks: usize,
    grid_per_block: usize,
) -> Result<CompactCover> {
    let pts = known_points(curve, t, prec);
    let curve_pts = to_curve_coordinates(curve, &pts);
    covering::compact_cover(
        &curve.f,
        &curve.g,
        lo,
        hi,
        &curve_pts,
        &Bf::from_u64(t),
        d,
        prec,
        blocks,
        grid_per_block,
    )
}

/// Result of the randomized intersection-bound audit.
#[derive(Debug, Clone, Serialize)]
pub struct BezoutAudit {
    pub family: String,
    pub trials: usize,
    pub violations: usize,
    /// max over trials of (observed zero count) / (formula value)
    pub worst_fill: f64,
    pub max_count: usize,
}

/// Audit the curve family's intersection-count formula: random low-degree
/// polynomials over random parameter subintervals, empirical sign-change
/// zero counts compared against the formula. Supported for the oscillatory
/// families (the other formulas carry configuration-supplied constants).
pub fn bezout_audit(
    curve: &CurveSpec,
    trials: usize,
    seed: u64,
    prec: u32,
) -> Result<BezoutAudit> {
    use rand::{Rng, SeedableRng};
    let bez = curve.bezout.as_ref().ok_or_else(|| {
        Error::Input(format!("curve `{}` carries no intersection-count formula", curve.name))
    })?;
    let (family, graph_coords) = match bez {
        BezoutFormula::Spiral { .. } => ("spiral", false),
        BezoutFormula::SinlogGraph { .. } => ("sinlog", true),
        _ => {
            return Err(Error::Input(
                "the audit supports the spiral and sinlog families; other formulas have \
                 non-explicit constants"
                    .into(),
            ))
        }
    };
    let lo_domain = curve
        .domain_lo
        .clone()
        .unwrap_or_else(Bf::one)
        .max_bf(&Bf::one());
    let mut audit = BezoutAudit {
        family: family.to_string(),
        trials,
        violations: 0,
        worst_fill: 0.0,
        max_count: 0,
    };
    let exps_cache: Vec<Vec<(u32, u32)>> = (0..=3)
        .map(covering::monomial_exponents)
        .collect();
    for k in 0..trials {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let d = rng.gen_range(1..=2u32);
        let exps = &exps_cache[d as usize];
        // nonzero integer coefficient vector
        let coeffs: Vec<BigInt> = loop {
            let c: Vec<BigInt> = (0..exps.len())
                .map(|_| BigInt::from(rng.gen_range(-9i64..=9)))
                .collect();
            if c.iter().any(|v| !v.is_zero()) {
                break c;
            }
        };
        let poly = covering::PlanePoly::from_bigints(d, coeffs);
        // interval [x0, x0 e^v] with x0 in [a, 3a], v in [1/2, 6]
        let u: f64 = rng.gen_range(0.0..2.0);
        let v: f64 = rng.gen_range(0.5..6.0);
        let x0 = lo_domain.mul(&Bf::from_f64(1.0 + u)).round(prec, Round::Nearest);
        let x1 = x0
            .mul(&bigfloat::exp(&Bf::from_f64(v), prec, Round::Nearest))
            .round(prec, Round::Nearest);
        let h = |x: &Bf| -> Result<Bf> {
            let (fx, gx) = if graph_coords {
                (x.clone(), curve.g.eval(x, prec)?)
            } else {
                (curve.f.eval(x, prec)?, curve.g.eval(x, prec)?)
            };
            Ok(poly.eval_bf(&fx, &gx, prec))
        };
        // refining grid: certified lower bound on the zero count
        let c1 = crate::bezout::empirical_zero_count(h, &x0, &x1, 256, prec)?;
        let c2 = crate::bezout::empirical_zero_count(h, &x0, &x1, 512, prec)?;
        let count = c1.max(c2);
        let formula = bez.eval(&x1, d, prec)?;
        let fill = Bf::from_u64(count as u64)
            .div_r(&formula, 64, Round::Nearest)
            .to_f64();
        if fill > 1.0 {
            audit.violations += 1;
        }
        if fill > audit.worst_fill {
            audit.worst_fill = fill;
        }
        audit.max_count = audit.max_count.max(count);
    }
    Ok(audit)
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

/// The standard catalog instances (built once and cached).
pub fn catalog() -> Result<Vec<CurveSpec>> {
    static CACHE: std::sync::OnceLock<Vec<CurveSpec>> = std::sync::OnceLock::new();
    if let Some(v) = CACHE.get() {
        return Ok(v.clone());
    }
    let v = build_catalog()?;
    Ok(CACHE.get_or_init(|| v).clone())
}

fn build_catalog() -> Result<Vec<CurveSpec>> {
    let one = QRat::from_i64(1);
    let pi_over_log2 = Expr::named(NamedConst::Pi).mul(Expr::named(NamedConst::Log2).recip());
    let mut v = vec![
        make_spiral(one.clone(), one.clone(), 1, 1)?,
        make_spiral(one.clone(), one.clone(), 1, 2)?,
        make_spiral(one.clone(), one.clone(), 2, 2)?,
        make_spiral(one.clone(), one.clone(), 1, 3)?,
        make_sinlog_graph(one.clone(), Expr::integer(1), 1, Trig::Sin)?,
        make_sinlog_graph(one.clone(), Expr::integer(1), 2, Trig::Sin)?,
        make_sinlog_graph(one.clone(), Expr::integer(1), 3, Trig::Sin)?,
        make_sinlog_graph(one.clone(), pi_over_log2, 1, Trig::Cos)?,
        make_zeta(QRat::from_i64(2), one.clone())?,
        make_gamma(one.clone())?,
        make_test_curve(TestCurveKind::Exp2Slow)?,
        make_test_curve(TestCurveKind::Exp2Graph)?,
        make_test_curve(TestCurveKind::SinPiGraph)?,
        make_test_curve(TestCurveKind::SinCGraph { c: QRat::from_i64(2) })?,
        make_test_curve(TestCurveKind::UnboundedSpiralPiLog2)?,
    ];
    // distinguish the pi/log2 cosine curve by name
    for c in v.iter_mut() {
        if c.known_family == Some(KnownFamily::CosLogPowersOfTwo) {
            c.name = "coslog-pilog2".into();
        }
    }
    Ok(v)
}

pub fn by_name(name: &str) -> Result<CurveSpec> {
    catalog()?
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::Input(format!("unknown catalog curve `{name}`")))
}

pub fn catalog_names() -> Vec<String> {
    catalog().map(|v| v.into_iter().map(|c| c.name).collect()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn spiral_constants_match_stated_formulas() {
        let c = make_spiral(QRat::from_i64(1), QRat::from_i64(1), 1, 1).unwrap();
        let cert = c.cert.unwrap();
        assert_eq!(cert.a_factor.to_f64(), 4.0);
        assert_eq!(cert.b_exp.to_f64(), 2.0);
        assert_eq!(cert.c_log.to_f64(), 0.0);
        assert_eq!(cert.decay.as_ref().unwrap().e.to_f64(), 1.0);
        assert_eq!(c.domain_lo.unwrap().to_f64(), 1.0);
        // (F=1, G=2, l=1, q=3): A = 2*(2+1)*3 = 18, B=4, C=2, E=2, N=e
        let c = make_spiral(QRat::from_i64(1), QRat::from_i64(2), 1, 3).unwrap();
        let cert = c.cert.unwrap();
        assert_eq!(cert.a_factor.to_f64(), 18.0);
        assert_eq!(cert.b_exp.to_f64(), 4.0);
        assert_eq!(cert.c_log.to_f64(), 2.0);
        assert_eq!(cert.decay.as_ref().unwrap().e.to_f64(), 2.0);
        assert!((c.domain_lo.unwrap().to_f64() - std::f64::consts::E).abs() < 1e-12);
        // phi(T) = T^(1/min(F,G)) = T
        let phi = c.phi.unwrap();
        let v = phi.eval(&Bf::from_f64(100.0), 128).unwrap();
        assert!((v.to_f64() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn spiral_eval_point() {
        // gamma_{1,1}(e) = (sin 1 / e, cos 1 / e)
        let c = make_spiral(QRat::from_i64(1), QRat::from_i64(1), 1, 1).unwrap();
        let e = bigfloat::euler_e(160);
        let fv = c.f.eval(&e, 160).unwrap().to_f64();
        let gv = c.g.eval(&e, 160).unwrap().to_f64();
        assert!((fv - 1f64.sin() / std::f64::consts::E).abs() < 1e-12);
        assert!((gv - 1f64.cos() / std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn sinlog_cert_joint_with_reciprocal() {
        let c = make_sinlog_graph(QRat::from_i64(1), Expr::integer(1), 1, Trig::Sin).unwrap();
        let cert = c.cert.unwrap();
        // (2, 2, 0) joined with the first coordinate's (1, 0, 0)
        assert_eq!(cert.a_factor.to_f64(), 2.0);
        assert_eq!(cert.b_exp.to_f64(), 2.0);
        assert_eq!(cert.c_log.to_f64(), 0.0);
    }

    #[test]
    fn coslog_known_points() {
        let pi_over_log2 =
            Expr::named(NamedConst::Pi).mul(Expr::named(NamedConst::Log2).recip());
        let c = make_sinlog_graph(QRat::from_i64(1), pi_over_log2, 1, Trig::Cos).unwrap();
        assert_eq!(c.known_family, Some(KnownFamily::CosLogPowersOfTwo));
        let pts = known_points(&c, 1024, 128);
        // (2^k, +-1) for k = -10..10: 21 points
        assert_eq!(pts.len(), 21);
        for k in 0..=10i64 {
            let want_y = rat(if k % 2 == 0 { 1 } else { -1 }, 1);
            assert!(pts.iter().any(|p| p.x.0 == pow2_rat(k) && p.y.0 == want_y));
        }
        // every point's parameter is within the height-control reach
        let phi = c.phi.as_ref().unwrap();
        let bound = phi.eval(&Bf::from_u64(1024), 128).unwrap();
        for p in &pts {
            assert!(p.parameter.as_ref().unwrap() <= &bound);
        }
    }

    #[test]
    fn zeta_constants() {
        let c = make_zeta(QRat::from_i64(2), QRat::from_i64(1)).unwrap();
        let lambda = c.constants.get("lambda").unwrap().to_f64();
        assert!((lambda - 0.25).abs() < 1e-20);
        // m_a = zeta(3/2) - 1 ~ 1.612375
        let m_a = c.constants.get("m_a").unwrap().to_f64();
        assert!((m_a - 1.6123753486854883).abs() < 1e-10, "{m_a}");
        // M = ceil(zeta(2)) = 2
        assert_eq!(c.constants.get("normalization").unwrap().to_f64(), 2.0);
        // A = zeta(3/2)/(lambda e) = 4 zeta(3/2)/e ~ 3.844
        let a = c.constants.get("cert_a").unwrap().to_f64();
        assert!((a - 4.0 * 2.612_375_348_685_488 / std::f64::consts::E).abs() < 1e-9, "{a}");
        // phi(1000) = log(m_a 1000)/(lambda log 2)
        let phi = c.phi.as_ref().unwrap();
        let v = phi.eval(&Bf::from_u64(1000), 128).unwrap().to_f64();
        let want = (1.6123753486854883f64 * 1000.0).ln() / (0.25 * std::f64::consts::LN_2);
        assert!((v - want).abs() < 1e-9, "{v} vs {want}");
    }

    #[test]
    fn gamma_constants() {
        let c = make_gamma(QRat::from_i64(1)).unwrap();
        let delta = c.constants.get("delta").unwrap().to_f64();
        assert!((delta - std::f64::consts::LN_2 / 3.0).abs() < 1e-12, "{delta}");
        let dmin = c.constants.get("gamma_exp_min").unwrap().to_f64();
        // min of Gamma(x) e^-x over x >= 1 (interior critical point near 3.2)
        assert!(dmin > 0.09 && dmin < 0.11, "{dmin}");
        let cert = c.cert.as_ref().unwrap();
        assert_eq!(cert.b_exp.to_f64(), 4.0);
        assert_eq!(cert.c_log.to_f64(), 1.0);
        let want_a = 4.0 / (delta * std::f64::consts::E.powi(2));
        assert!((cert.a_factor.to_f64() - want_a).abs() < 1e-9);
    }

    #[test]
    fn gamma_ratio_monotone_from_two() {
        // log y / f(y) is increasing on [2, inf): grid check
        let grid = slow::log_grid(&Bf::from_i64(2), &Bf::from_f64(1e5), 24, 96);
        let mut prev = -1.0f64;
        for y in grid {
            let x = special::gamma_inv(&y, 96).unwrap();
            let r = bigfloat::ln(&y, 96, Round::Nearest).div_r(&x, 96, Round::Nearest).to_f64();
            assert!(r >= prev - 1e-12, "ratio dipped at y={}", y.to_dec_string(6));
            prev = r;
        }
    }

    #[test]
    fn gamma_known_points() {
        let c = make_gamma(QRat::from_i64(1)).unwrap();
        // T = 5040 covers n = 2..7 (heights n! up to 5040)
        let pts = known_points(&c, 5040, 128);
        assert_eq!(pts.len(), 6);
        // the n = 3 instance: (6, 1/4), image of the gamma-graph point (4, 6)
        assert!(pts.iter().any(|p| p.x.0 == rat(6, 1) && p.y.0 == rat(1, 4)));
        // exactness: g(n!) = 1/(n+1)
        let g = &c.g;
        let v = g.eval(&Bf::from_i64(6), 192).unwrap();
        let diff = v.sub(&Bf::from_ratio(&BigInt::one(), &BigInt::from(4), 192, Round::Nearest));
        assert!(diff.abs().to_f64() < 1e-40);
    }

    #[test]
    fn exp2_known_points() {
        let c = make_test_curve(TestCurveKind::Exp2Graph).unwrap();
        let pts = known_points(&c, 1024, 128);
        assert_eq!(pts.len(), 21); // k = -10..10
        for p in &pts {
            assert!(p.height <= 1024);
        }
        let cs = make_test_curve(TestCurveKind::Exp2Slow).unwrap();
        let pts = known_points(&cs, 1024, 128);
        assert_eq!(pts.len(), 10); // k = 1..10
        // slow-form points are exactly on the curve: g(k) = 2^-k
        let g = &cs.g;
        let v = g.eval(&Bf::from_i64(3), 192).unwrap();
        let diff = v.sub(&Bf::from_parts(BigInt::one(), -3)).abs();
        assert!(diff < Bf::from_parts(BigInt::one(), -150), "{}", diff.to_dec_string(4));
    }

    #[test]
    fn spiral_unbounded_points_split() {
        let c = make_test_curve(TestCurveKind::UnboundedSpiralPiLog2).unwrap();
        let contracting = known_points(&c, 1024, 128);
        assert_eq!(contracting.len(), 11); // k = 0..10
        let companion = c.companion.as_ref().unwrap();
        let expanding = known_points(companion, 1024, 128);
        assert_eq!(expanding.len(), 10); // k = 1..10
        // the contracting points satisfy the curve equations
        let p = &contracting[contracting.len() - 1];
        let param = p.parameter.as_ref().unwrap();
        let fv = c.f.eval(param, 192).unwrap();
        let xv = p.x.0.numer().to_f64().unwrap() / p.x.0.denom().to_f64().unwrap();
        assert!((fv.to_f64() - xv).abs() < 1e-12);
        let gv = c.g.eval(param, 192).unwrap();
        assert!(gv.abs().to_f64() < 1e-12);
    }

    #[test]
    fn sinpi_known_points() {
        let c = make_test_curve(TestCurveKind::SinPiGraph).unwrap();
        let pts = known_points(&c, 20, 128);
        // 41 integer points
        let zeros = pts.iter().filter(|p| p.y.0.is_zero()).count();
        assert_eq!(zeros, 41);
        // half-integer hits: |2k+1| <= 20 -> 20 of them
        let ones = pts.iter().filter(|p| p.y.0.abs() == rat(1, 1)).count();
        assert_eq!(ones, 20);
        // sixth points: |6k +- 1| <= 20: k=-3..3 gives numerators in range
        let halves = pts.iter().filter(|p| p.y.0.abs() == rat(1, 2)).count();
        assert!(halves >= 12);
        assert!(pts.len() >= 41 + 20);
        // spot exactness: the point (1/6, 1/2)
        assert!(pts.iter().any(|p| p.x.0 == rat(1, 6) && p.y.0 == rat(1, 2)));
    }

    #[test]
    fn elementary_curve_builds_and_rejects() {
        // u = log 2 (non-U1 irrational), first coordinate
        // log2 + arctan(log^2 x)/x^5; second: 0 + x^-1 sin(log x)
        let s = InnerSlow {
            expr: Expr::var().log().powi(2),
            cert: SlowCertificate {
                a_factor: Bf::from_i64(4),
                b_exp: Bf::from_i64(2),
                c_log: Bf::one(),
                d_prefactor: Bf::one(),
                left: bigfloat::euler_e(96).round(96, Round::Ceil),
                decay: None,
            },
        };
        let sigma = InnerSlow {
            expr: Expr::var().log(),
            cert: SlowCertificate {
                a_factor: Bf::from_i64(2),
                b_exp: Bf::one(),
                c_log: Bf::zero(),
                d_prefactor: Bf::one(),
                left: bigfloat::euler_e(96).round(96, Round::Ceil),
                decay: None,
            },
        };
        let u = LimitSpec { expr: Expr::named(NamedConst::Log2), class: LimitClass::NonU1Irrational };
        let v = LimitSpec::rational(0, 1);
        let bez = BezoutFormula::CustomPolyLogD {
            monomials: vec![(1, 3, QRat::from_i64(8))],
        };
        let c = make_elementary(
            "elementary-log2",
            OuterFn::atan(),
            OuterFn::sin(),
            s.clone(),
            sigma.clone(),
            QRat::from_i64(5),
            QRat::from_i64(1),
            u,
            v,
            Some(QRat::from_i64(2)),
            (false, false),
            true,
            true,
            bez.clone(),
        )
        .unwrap();
        assert_eq!(c.mode, CurveMode::SlowPlus);
        let cert = c.cert.as_ref().unwrap();
        // damped coordinates: A = max over coords of 2 (F+1) alpha A_inner
        // coord 0: 2 * 6 * 1 * 4 = 48; coord 1: 2 * 2 * 1 * 2 = 8
        assert_eq!(cert.a_factor.to_f64(), 48.0);
        assert_eq!(cert.decay.as_ref().unwrap().e.to_f64(), 5.0);
        // phi(T) = T^(K/E) = T^(2/5)
        let phi = c.phi.as_ref().unwrap();
        let val = phi.eval(&Bf::from_f64(32.0), 128).unwrap().to_f64();
        assert!((val - 32f64.powf(0.4)).abs() < 1e-9);
        // the first coordinate evaluates near log 2 for large x
        let fv = c.f.eval(&Bf::from_f64(50.0), 160).unwrap().to_f64();
        assert!((fv - std::f64::consts::LN_2).abs() < 1e-3);

        // unknown class rejected
        let u_bad = LimitSpec { expr: Expr::named(NamedConst::Log2), class: LimitClass::Unknown };
        let err = make_elementary(
            "bad",
            OuterFn::atan(),
            OuterFn::sin(),
            s,
            sigma,
            QRat::from_i64(5),
            QRat::from_i64(1),
            u_bad,
            LimitSpec { expr: Expr::named(NamedConst::Pi), class: LimitClass::Unknown },
            None,
            (false, false),
            false,
            true,
            bez,
        );
        assert!(err.is_err());
    }

    #[test]
    fn bound_reports_shapes() {
        // the headline exponent pairs of the four families
        let t = Bf::from_u64(1000);
        let spiral = make_spiral(QRat::from_i64(1), QRat::from_i64(1), 1, 1).unwrap();
        let rep = global_bound(&spiral, &t, 128).unwrap();
        assert_eq!((rep.shape.log_t, rep.shape.log_log_t), (9, 0));
        for (ell, q, want) in [(1u32, 2u32, 13i64), (2, 2, 13), (1, 3, 17)] {
            let c = make_spiral(QRat::from_i64(1), QRat::from_i64(1), ell, q).unwrap();
            let rep = global_bound(&c, &t, 128).unwrap();
            assert_eq!(rep.shape.log_t, want, "spiral {ell},{q}");
            assert_eq!(rep.shape.log_log_t, 0);
        }
        let zeta = make_zeta(QRat::from_i64(2), QRat::from_i64(1)).unwrap();
        let rep = global_bound(&zeta, &t, 128).unwrap();
        assert_eq!((rep.shape.log_t, rep.shape.log_log_t), (4, 1));
        let gamma = make_gamma(QRat::from_i64(1)).unwrap();
        let rep = global_bound(&gamma, &t, 128).unwrap();
        assert_eq!((rep.shape.log_t, rep.shape.log_log_t), (11, 1));
        // sinlog graphs: 5 + 4l
        for (ell, want) in [(1u32, 9i64), (2, 13), (3, 17)] {
            let c = make_sinlog_graph(QRat::from_i64(1), Expr::integer(1), ell, Trig::Sin).unwrap();
            let rep = global_bound(&c, &t, 128).unwrap();
            assert_eq!(rep.shape.log_t, want, "sinlog {ell}");
        }
    }

    #[test]
    fn missing_pieces_reported_distinctly() {
        let c = make_test_curve(TestCurveKind::SinPiGraph).unwrap();
        let err = global_bound(&c, &Bf::from_u64(10), 128).unwrap_err();
        assert!(err.to_string().contains("certificate"), "{err}");
        let mut c2 = make_spiral(QRat::from_i64(1), QRat::from_i64(1), 1, 1).unwrap();
        c2.phi = None;
        let err = global_bound(&c2, &Bf::from_u64(10), 128).unwrap_err();
        assert!(err.to_string().contains("height-control"), "{err}");
        let mut c3 = make_spiral(QRat::from_i64(1), QRat::from_i64(1), 1, 1).unwrap();
        c3.bezout = None;
        let err = global_bound(&c3, &Bf::from_u64(10), 128).unwrap_err();
        assert!(err.to_string().contains("intersection"), "{err}");
    }

    #[test]
    fn curve_spec_roundtrip() {
        for c in catalog().unwrap() {
            let s = serde_json::to_string(&c).unwrap();
            let back: CurveSpec = serde_json::from_str(&s).unwrap();
            let s2 = serde_json::to_string(&back).unwrap();
            assert_eq!(s, s2, "round-trip of {}", c.name);
        }
    }

    #[test]
    fn registry_lookup() {
        assert!(by_name("zeta").is_ok());
        assert!(by_name("spiral-1-1").is_ok());
        assert!(by_name("nope").is_err());
        let names = catalog_names();
        assert!(names.contains(&"gamma".to_string()));
        assert!(names.contains(&"coslog-pilog2".to_string()));
    }
}
