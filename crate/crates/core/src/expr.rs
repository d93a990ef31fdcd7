//! Expression trees for the functions the library evaluates.
//!
//! The grammar is deliberately small: rational and named constants, the
//! variable, field operations, integer and real powers, exp/log/sin/cos/atan,
//! explicit composition, zeta, and the inverse gamma branch. Trees serialize
//! to JSON with an `op` tag and round-trip exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bigfloat::{self, Bf, Round};
use crate::jet::Jet;
use crate::special;
use crate::Result;

/// Exact rational number serialized as `{num, den}` decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QRat(pub BigRational);

impl QRat {
    pub fn from_i64(n: i64) -> QRat {
        QRat(BigRational::from(BigInt::from(n)))
    }

    pub fn new(num: i64, den: i64) -> QRat {
        QRat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_bf(&self, prec: u32, rnd: Round) -> Bf {
        Bf::from_ratio(self.0.numer(), self.0.denom(), prec, rnd)
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct QRatRepr {
    num: String,
    den: String,
}

impl Serialize for QRat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QRatRepr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QRat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<QRat, D::Error> {
        let r = QRatRepr::deserialize(d)?;
        let num = BigInt::from_str(&r.num).map_err(serde::de::Error::custom)?;
        let den = BigInt::from_str(&r.den).map_err(serde::de::Error::custom)?;
        if den == BigInt::from(0) {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(QRat(BigRational::new(num, den)))
    }
}

/// Named transcendental constants available to curve specifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedConst {
    Pi,
    E,
    /// ln 2
    Log2,
}

impl NamedConst {
    pub fn to_bf(self, prec: u32, rnd: Round) -> Bf {
        match self {
            NamedConst::Pi => bigfloat::pi(prec + 8).round(prec, rnd),
            NamedConst::E => bigfloat::euler_e(prec + 8).round(prec, rnd),
            NamedConst::Log2 => bigfloat::ln2(prec + 8).round(prec, rnd),
        }
    }
}

/// A constant leaf: an exact rational or a named constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstVal {
    Named(NamedConst),
    Rational(QRat),
}

impl ConstVal {
    pub fn to_bf(&self, prec: u32, rnd: Round) -> Bf {
        match self {
            ConstVal::Named(n) => n.to_bf(prec, rnd),
            ConstVal::Rational(q) => q.to_bf(prec, rnd),
        }
    }

    /// The exact rational value, if this constant is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ConstVal::Rational(q) => Some(&q.0),
            ConstVal::Named(_) => None,
        }
    }
}

/// Function expression tree in one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const { value: ConstVal },
    Var,
    Add { lhs: Box<Expr>, rhs: Box<Expr> },
    Mul { lhs: Box<Expr>, rhs: Box<Expr> },
    Neg { arg: Box<Expr> },
    Recip { arg: Box<Expr> },
    PowInt { arg: Box<Expr>, n: i64 },
    PowReal { arg: Box<Expr>, exponent: QRat },
    Exp { arg: Box<Expr> },
    Log { arg: Box<Expr> },
    Sin { arg: Box<Expr> },
    Cos { arg: Box<Expr> },
    Atan { arg: Box<Expr> },
    Compose { outer: Box<Expr>, inner: Box<Expr> },
    Zeta { arg: Box<Expr> },
    GammaInverse { arg: Box<Expr> },
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::Const { value: ConstVal::Rational(QRat::new(num, den)) }
    }

    pub fn integer(n: i64) -> Expr {
        Expr::rational(n, 1)
    }

    pub fn named(c: NamedConst) -> Expr {
        Expr::Const { value: ConstVal::Named(c) }
    }

    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add { lhs: Box::new(self), rhs: Box::new(rhs) }
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul { lhs: Box::new(self), rhs: Box::new(rhs) }
    }

    pub fn neg(self) -> Expr {
        Expr::Neg { arg: Box::new(self) }
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        self.add(rhs.neg())
    }

    pub fn recip(self) -> Expr {
        Expr::Recip { arg: Box::new(self) }
    }

    pub fn powi(self, n: i64) -> Expr {
        Expr::PowInt { arg: Box::new(self), n }
    }

    pub fn pow_rat(self, q: QRat) -> Expr {
        Expr::PowReal { arg: Box::new(self), exponent: q }
    }

    pub fn exp(self) -> Expr {
        Expr::Exp { arg: Box::new(self) }
    }

    pub fn log(self) -> Expr {
        Expr::Log { arg: Box::new(self) }
    }

    pub fn sin(self) -> Expr {
        Expr::Sin { arg: Box::new(self) }
    }

    pub fn cos(self) -> Expr {
        Expr::Cos { arg: Box::new(self) }
    }

    pub fn atan(self) -> Expr {
        Expr::Atan { arg: Box::new(self) }
    }

    pub fn compose(outer: Expr, inner: Expr) -> Expr {
        Expr::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    pub fn zeta(self) -> Expr {
        Expr::Zeta { arg: Box::new(self) }
    }

    pub fn gamma_inverse(self) -> Expr {
        Expr::GammaInverse { arg: Box::new(self) }
    }

    /// Jet of the expression at `x`, to the given order and precision.
    pub fn eval_jet(&self, x: &Bf, order: usize, prec: u32) -> Result<Jet> {
        match self {
            Expr::Const { value } => Ok(Jet::constant(
                x.clone(),
                value.to_bf(prec, Round::Nearest),
                order,
                prec,
            )),
            Expr::Var => Ok(Jet::identity(x.clone(), order, prec)),
            Expr::Add { lhs, rhs } => lhs
                .eval_jet(x, order, prec)?
                .add(&rhs.eval_jet(x, order, prec)?),
            Expr::Mul { lhs, rhs } => lhs
                .eval_jet(x, order, prec)?
                .mul(&rhs.eval_jet(x, order, prec)?),
            Expr::Neg { arg } => Ok(arg.eval_jet(x, order, prec)?.neg()),
            Expr::Recip { arg } => arg.eval_jet(x, order, prec)?.recip(),
            Expr::PowInt { arg, n } => arg.eval_jet(x, order, prec)?.pow_i64(*n),
            Expr::PowReal { arg, exponent } => arg
                .eval_jet(x, order, prec)?
                .pow_real(&exponent.to_bf(prec + 8, Round::Nearest)),
            Expr::Exp { arg } => arg.eval_jet(x, order, prec)?.exp(),
            Expr::Log { arg } => arg.eval_jet(x, order, prec)?.ln(),
            Expr::Sin { arg } => arg.eval_jet(x, order, prec)?.sin(),
            Expr::Cos { arg } => arg.eval_jet(x, order, prec)?.cos(),
            Expr::Atan { arg } => arg.eval_jet(x, order, prec)?.atan(),
            Expr::Compose { outer, inner } => {
                let inner_jet = inner.eval_jet(x, order, prec)?;
                let outer_jet = outer.eval_jet(inner_jet.value(), order, prec)?;
                Jet::compose(&outer_jet, &inner_jet)
            }
            Expr::Zeta { arg } => {
                let inner_jet = arg.eval_jet(x, order, prec)?;
                let (zj, _tail) = special::zeta_jet(inner_jet.value(), order, prec)?;
                Jet::compose(&zj, &inner_jet)
            }
            Expr::GammaInverse { arg } => {
                let inner_jet = arg.eval_jet(x, order, prec)?;
                let gj = special::gamma_inv_jet(inner_jet.value(), order, prec)?;
                Jet::compose(&gj, &inner_jet)
            }
        }
    }

    /// Point evaluation (order-0 jet).
    pub fn eval(&self, x: &Bf, prec: u32) -> Result<Bf> {
        Ok(self.eval_jet(x, 0, prec)?.value().clone())
    }

    /// The coefficient `f^(p)(x)/p!` of the order-`p` jet at `x`.
    pub fn derivative_coefficient(&self, x: &Bf, p: usize, prec: u32) -> Result<Bf> {
        Ok(self.eval_jet(x, p, prec)?.coeff(p).clone())
    }
}
