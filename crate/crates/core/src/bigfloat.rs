//! Arbitrary-precision binary floating point with directed rounding.
//!
//! Values are exact dyadic rationals `mant * 2^exp`. Ring operations are
//! exact; `round`, division and the elementary functions take a target
//! precision and a rounding direction. Upper-bound constants are computed
//! with [`Round::Ceil`], lengths with [`Round::Floor`], so that every
//! computed bound stays a true bound at finite precision.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rounding direction for inexact operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Floor,
    /// Toward positive infinity.
    Ceil,
    /// Round to nearest, ties away from zero.
    Nearest,
}

impl Round {
    fn flip(self) -> Round {
        match self {
            Round::Floor => Round::Ceil,
            Round::Ceil => Round::Floor,
            Round::Nearest => Round::Nearest,
        }
    }
}

/// Guard bits used internally by the elementary functions.
const GUARD: u32 = 48;
/// Error slack (in bits) granted to the internal series evaluations.
const SLOP: i64 = 16;

/// An exact dyadic rational `mant * 2^exp`.
///
/// Arithmetic methods take explicit rounding arguments, so they are plain
/// methods rather than operator impls.
#[derive(Debug, Clone)]
pub struct Bf {
    mant: BigInt,
    exp: i64,
}

#[allow(clippy::should_implement_trait)]
impl Bf {
    pub fn zero() -> Bf {
        Bf { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Bf {
        Bf { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Bf {
        Bf { mant: BigInt::from(v), exp: 0 }.normalized()
    }

    pub fn from_u64(v: u64) -> Bf {
        Bf { mant: BigInt::from(v), exp: 0 }.normalized()
    }

    pub fn from_bigint(v: BigInt) -> Bf {
        Bf { mant: v, exp: 0 }.normalized()
    }

    pub fn from_parts(mant: BigInt, exp: i64) -> Bf {
        Bf { mant, exp }.normalized()
    }

    /// Exact conversion from an `f64` (must be finite).
    pub fn from_f64(v: f64) -> Bf {
        assert!(v.is_finite(), "non-finite f64");
        if v == 0.0 {
            return Bf::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Bf { mant: BigInt::from(sign * m as i64), exp: e }.normalized()
    }

    /// `num/den` rounded to `prec` bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, rnd: Round) -> Bf {
        Bf::from_bigint(num.clone()).div_r(&Bf::from_bigint(den.clone()), prec, rnd)
    }

    fn normalized(mut self) -> Bf {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.magnitude().bits()
    }

    /// Exponent of the most significant bit: `2^(k-1) <= |x| < 2^k` gives `k`.
    /// Zero returns `i64::MIN`.
    pub fn msb_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.bits() as i64
        }
    }

    pub fn neg(&self) -> Bf {
        Bf { mant: -self.mant.clone(), exp: self.exp }
    }

    pub fn abs(&self) -> Bf {
        Bf { mant: self.mant.abs(), exp: self.exp }
    }

    /// Multiply by `2^k` (exact).
    pub fn mul_pow2(&self, k: i64) -> Bf {
        if self.is_zero() {
            return Bf::zero();
        }
        Bf { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Round to `prec` significant bits.
    pub fn round(&self, prec: u32, rnd: Round) -> Bf {
        let nbits = self.bits();
        if nbits <= prec as u64 {
            return self.clone();
        }
        let drop = (nbits - prec as u64) as u32;
        let neg = self.mant.is_negative();
        let mag = self.mant.magnitude();
        let kept: BigUint = mag >> drop;
        let rem: BigUint = mag - (&kept << drop);
        let inexact = !rem.is_zero();
        let bump = match (rnd, neg) {
            (Round::Nearest, _) => {
                // ties away from zero
                let half = BigUint::one() << (drop - 1);
                rem >= half
            }
            (Round::Ceil, false) | (Round::Floor, true) => inexact,
            (Round::Ceil, true) | (Round::Floor, false) => false,
        };
        let mut kept = BigInt::from(kept);
        if bump {
            kept += 1;
        }
        if neg {
            kept = -kept;
        }
        Bf { mant: kept, exp: self.exp + drop as i64 }.normalized()
    }

    /// Exact addition.
    pub fn add(&self, other: &Bf) -> Bf {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u32;
        let b = &other.mant << (other.exp - e) as u32;
        Bf { mant: a + b, exp: e }.normalized()
    }

    pub fn sub(&self, other: &Bf) -> Bf {
        self.add(&other.neg())
    }

    /// Addition rounded to `prec`. Handles wildly different magnitudes
    /// without building huge mantissas.
    pub fn add_r(&self, other: &Bf, prec: u32, rnd: Round) -> Bf {
        if self.is_zero() || other.is_zero() {
            return self.add(other).round(prec, rnd);
        }
        let (hi, lo) = if self.msb_exp() >= other.msb_exp() {
            (self, other)
        } else {
            (other, self)
        };
        // If lo is far below hi's last kept bit, replace it by a sticky nudge.
        let gap = hi.msb_exp() - lo.msb_exp();
        if gap > prec as i64 + 8 {
            let sticky_exp = hi.msb_exp() - prec as i64 - 6;
            let nudge = Bf {
                mant: BigInt::from(if lo.is_negative() { -1 } else { 1 }),
                exp: sticky_exp,
            };
            return hi.add(&nudge).round(prec, rnd);
        }
        self.add(other).round(prec, rnd)
    }

    /// Exact multiplication.
    pub fn mul(&self, other: &Bf) -> Bf {
        Bf { mant: &self.mant * &other.mant, exp: self.exp + other.exp }.normalized()
    }

    pub fn mul_r(&self, other: &Bf, prec: u32, rnd: Round) -> Bf {
        self.mul(other).round(prec, rnd)
    }

    /// Division rounded to `prec` bits.
    pub fn div_r(&self, other: &Bf, prec: u32, rnd: Round) -> Bf {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Bf::zero();
        }
        let na = self.bits() as i64;
        let nb = other.bits() as i64;
        let shift = (prec as i64 + 2 + nb - na).max(0) as u32;
        let num = self.mant.magnitude() << shift;
        let (q, r) = num.div_rem(other.mant.magnitude());
        let mut q = BigInt::from(q);
        let mut e = self.exp - other.exp - shift as i64;
        if !r.is_zero() {
            // sticky bit: true magnitude lies strictly between q and q+1
            q = (q << 1) + 1;
            e -= 1;
        }
        if self.mant.is_negative() != other.mant.is_negative() {
            q = -q;
        }
        Bf { mant: q, exp: e }.normalized().round(prec, rnd)
    }

    /// Integer power. For `n < 0` computes the reciprocal power.
    pub fn pow_i64(&self, n: i64, prec: u32, rnd: Round) -> Bf {
        if n == 0 {
            return Bf::one();
        }
        if n < 0 {
            let inner = self.pow_i64(-n, prec + 4, rnd_for_recip(self, rnd));
            return Bf::one().div_r(&inner, prec, rnd);
        }
        // Work on the magnitude with a direction adjusted for the final sign.
        let negative_result = self.is_negative() && n % 2 == 1;
        let mag_rnd = if negative_result { rnd.flip() } else { rnd };
        let base = self.abs();
        let mut acc = Bf::one();
        let wp = prec + 8;
        let mut b = base;
        let mut k = n as u64;
        loop {
            if k & 1 == 1 {
                acc = acc.mul_r(&b, wp, mag_rnd);
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            b = b.mul_r(&b, wp, mag_rnd);
        }
        let acc = acc.round(prec, mag_rnd);
        if negative_result {
            acc.neg()
        } else {
            acc
        }
    }

    pub fn cmp_bf(&self, other: &Bf) -> Ordering {
        let d = self.sub(other);
        if d.is_zero() {
            Ordering::Equal
        } else if d.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn min_bf(&self, other: &Bf) -> Bf {
        if self.cmp_bf(other) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn max_bf(&self, other: &Bf) -> Bf {
        if self.cmp_bf(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Largest integer `<= self`.
    pub fn floor_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as u32;
        }
        let shift = (-self.exp) as u32;
        let q = &self.mant >> shift;
        // BigInt shr truncates toward negative infinity for negatives in
        // two's-complement semantics? num-bigint shifts magnitude; fix up.
        let back = &q << shift;
        if back > self.mant {
            q - 1
        } else {
            q
        }
    }

    /// Smallest integer `>= self`.
    pub fn ceil_bigint(&self) -> BigInt {
        let f = self.floor_bigint();
        if self.sub(&Bf::from_bigint(f.clone())).is_zero() {
            f
        } else {
            f + 1
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let nbits = self.bits();
        let drop = nbits as i64 - 53;
        if drop <= 0 {
            self.mant.to_f64().unwrap_or(f64::NAN) * 2f64.powi(self.exp as i32)
        } else {
            let m = (&self.mant >> drop as u32).to_f64().unwrap_or(f64::NAN);
            m * 2f64.powi((self.exp + drop) as i32)
        }
    }

    /// Deterministic decimal rendering with `digits` significant digits.
    pub fn to_dec_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.is_negative();
        // e10 ~ floor(log10 |x|)
        let log10 = (self.msb_exp() as f64 - 0.5) * std::f64::consts::LN_2 / std::f64::consts::LN_10;
        let mut e10 = log10.floor() as i64;
        loop {
            // D = round(|x| * 10^(digits-1-e10))
            let p = digits as i64 - 1 - e10;
            let d = self.abs().scale_pow10(p);
            let d_digits = d.to_string().len() as i64;
            if d_digits < digits as i64 {
                e10 -= 1;
                continue;
            }
            if d_digits > digits as i64 {
                e10 += d_digits - digits as i64;
                continue;
            }
            let s = d.to_string();
            let mut out = String::new();
            if neg {
                out.push('-');
            }
            out.push_str(&s[..1]);
            if s.len() > 1 {
                out.push('.');
                out.push_str(&s[1..]);
            }
            out.push('e');
            out.push_str(&e10.to_string());
            return out;
        }
    }

    /// round(|x| * 10^p) as a nonnegative integer.
    fn scale_pow10(&self, p: i64) -> BigUint {
        let five = BigUint::from(5u32);
        let mag = self.mant.magnitude().clone();
        // |x| * 10^p = mag * 5^p * 2^(exp+p)
        if p >= 0 {
            let num = mag * five.pow(p as u32);
            let e = self.exp + p;
            if e >= 0 {
                num << e as u32
            } else {
                round_shr(num, (-e) as u64)
            }
        } else {
            let den = five.pow((-p) as u32);
            let e = self.exp + p;
            if e >= 0 {
                let num = mag << e as u32;
                round_div(num, den)
            } else {
                let den = den << (-e) as u64;
                round_div(mag, den)
            }
        }
    }

    /// Exact value as `(numerator, denominator_pow2_exponent)`; the value is
    /// `numerator / 2^max(0,-exp) * 2^max(0,exp)`: convenience for exact
    /// rational conversions.
    pub fn to_rational(&self) -> (BigInt, BigInt) {
        if self.exp >= 0 {
            (&self.mant << self.exp as u32, BigInt::one())
        } else {
            (self.mant.clone(), BigInt::one() << (-self.exp) as u32)
        }
    }
}

fn round_shr(n: BigUint, k: u64) -> BigUint {
    if k == 0 {
        return n;
    }
    let half = BigUint::one() << (k - 1);
    (n + half) >> k
}

fn round_div(n: BigUint, d: BigUint) -> BigUint {
    let (q, r) = n.div_rem(&d);
    if &r << 1 >= d {
        q + 1u32
    } else {
        q
    }
}

fn rnd_for_recip(base: &Bf, rnd: Round) -> Round {
    // 1/x is decreasing in |x| for positive x.
    if base.is_negative() {
        rnd
    } else {
        rnd.flip()
    }
}

impl PartialEq for Bf {
    fn eq(&self, other: &Bf) -> bool {
        self.cmp_bf(other) == Ordering::Equal
    }
}
impl Eq for Bf {}

impl PartialOrd for Bf {
    fn partial_cmp(&self, other: &Bf) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Bf {
    fn cmp(&self, other: &Bf) -> Ordering {
        self.cmp_bf(other)
    }
}

impl fmt::Display for Bf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dec_string(20))
    }
}

/// Exact serialized form `mant * 2^exp`.
#[derive(Serialize, Deserialize)]
struct BfRepr {
    m: String,
    e: i64,
}

impl Serialize for Bf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BfRepr { m: self.mant.to_string(), e: self.exp }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Bf, D::Error> {
        let r = BfRepr::deserialize(d)?;
        let mant = BigInt::from_str(&r.m).map_err(serde::de::Error::custom)?;
        Ok(Bf::from_parts(mant, r.e))
    }
}

/// Parse a decimal string ("1024", "-2.5", "1e6", "3.25e-2") exactly when the
/// value is dyadic, otherwise rounded to `prec` bits (nearest).
pub fn parse_decimal(s: &str, prec: u32) -> Result<Bf> {
    let s = s.trim();
    let (body, exp10) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Input(format!("bad exponent in `{s}`")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (body, frac_len) = match body.find('.') {
        Some(i) => {
            let joined: String = body[..i].chars().chain(body[i + 1..].chars()).collect();
            (joined, (body.len() - i - 1) as i64)
        }
        None => (body.to_string(), 0),
    };
    let int: BigInt = body
        .parse()
        .map_err(|_| Error::Input(format!("bad number `{s}`")))?;
    let p10 = exp10 - frac_len;
    let five = BigInt::from(5);
    if p10 >= 0 {
        let m = int * five.pow(p10 as u32);
        Ok(Bf::from_parts(m, p10))
    } else {
        let den = five.pow((-p10) as u32);
        let num = Bf::from_bigint(int).mul_pow2(p10);
        Ok(num.div_r(&Bf::from_bigint(den), prec, Round::Nearest))
    }
}

// ---------------------------------------------------------------------------
// Elementary functions
// ---------------------------------------------------------------------------

/// Finish an internally computed value whose relative error is below
/// `2^-rel_bits`, honoring the requested direction.
fn finish_rel(val: Bf, rel_bits: i64, prec: u32, rnd: Round) -> Bf {
    match rnd {
        Round::Nearest => val.round(prec, rnd),
        _ => {
            let err = Bf {
                mant: BigInt::one(),
                exp: val.msb_exp() - rel_bits,
            };
            match rnd {
                Round::Ceil => val.add(&err).round(prec, Round::Ceil),
                Round::Floor => val.sub(&err).round(prec, Round::Floor),
                Round::Nearest => unreachable!(),
            }
        }
    }
}

/// Finish with an absolute error bound `2^abs_err_exp`.
fn finish_abs(val: Bf, abs_err_exp: i64, prec: u32, rnd: Round) -> Bf {
    match rnd {
        Round::Nearest => val.round(prec, rnd),
        Round::Ceil => val
            .add(&Bf { mant: BigInt::one(), exp: abs_err_exp })
            .round(prec, Round::Ceil),
        Round::Floor => val
            .sub(&Bf { mant: BigInt::one(), exp: abs_err_exp })
            .round(prec, Round::Floor),
    }
}

type ConstCache = Mutex<HashMap<u32, Bf>>;

fn cache() -> &'static [OnceLock<ConstCache>; 3] {
    static CACHES: [OnceLock<ConstCache>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    &CACHES
}

fn cached(idx: usize, wp: u32, compute: impl FnOnce(u32) -> Bf) -> Bf {
    let cell = &cache()[idx];
    let m = cell.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = m.lock().unwrap();
    if let Some(v) = map.get(&wp) {
        return v.clone();
    }
    let v = compute(wp);
    map.insert(wp, v.clone());
    v
}

/// arctan(1/m) by fixed-point series, absolute error < 2^-(wp+8).
fn atan_inv_u32(m: u32, wp: u32) -> Bf {
    let pad = wp + 24;
    let m2 = BigUint::from(m) * BigUint::from(m);
    let mut term = (BigUint::one() << pad) / BigUint::from(m);
    let mut sum = BigInt::from(term.clone());
    let mut k = 1u64;
    let mut sign_neg = true;
    loop {
        term /= &m2;
        if term.is_zero() {
            break;
        }
        let t = &term / BigUint::from(2 * k + 1);
        if t.is_zero() && term.bits() < 2 {
            break;
        }
        if sign_neg {
            sum -= BigInt::from(t);
        } else {
            sum += BigInt::from(t);
        }
        sign_neg = !sign_neg;
        k += 1;
    }
    Bf { mant: sum, exp: -(pad as i64) }.normalized()
}

/// pi to relative error well under 2^-(wp+4).
pub fn pi(wp: u32) -> Bf {
    cached(0, wp, |wp| {
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        let a = atan_inv_u32(5, wp + 8).mul_pow2(4);
        let b = atan_inv_u32(239, wp + 8).mul_pow2(2);
        a.sub(&b).round(wp + 4, Round::Nearest)
    })
}

/// ln 2 by 2*atanh(1/3); relative error well under 2^-(wp+4).
pub fn ln2(wp: u32) -> Bf {
    cached(1, wp, |wp| {
        let pad = wp + 24;
        let nine = BigUint::from(9u32);
        let mut pow = (BigUint::one() << pad) / BigUint::from(3u32);
        let mut sum = pow.clone();
        let mut k = 1u64;
        loop {
            pow /= &nine;
            if pow.is_zero() {
                break;
            }
            let t = &pow / BigUint::from(2 * k + 1);
            sum += &t;
            if t.is_zero() && pow.bits() < 2 {
                break;
            }
            k += 1;
        }
        Bf { mant: BigInt::from(sum << 1), exp: -(pad as i64) }
            .normalized()
            .round(wp + 4, Round::Nearest)
    })
}

/// Euler's number.
pub fn euler_e(wp: u32) -> Bf {
    cached(2, wp, |wp| exp(&Bf::one(), wp + 4, Round::Nearest))
}

/// exp(x) with directed rounding.
pub fn exp(x: &Bf, prec: u32, rnd: Round) -> Bf {
    if x.is_zero() {
        return Bf::one();
    }
    assert!(
        x.msb_exp() < 40,
        "exp argument out of supported range (|x| >= 2^40)"
    );
    let wp = prec + GUARD;
    // x = n ln2 + r, |r| <= ln2/2 * (1+eps)
    let l2 = ln2(wp + 24);
    let n_f = x.div_r(&l2, 64, Round::Nearest);
    let n_int = n_f.add(&Bf::from_ratio(
        &BigInt::from(if n_f.is_negative() { -1 } else { 1 }),
        &BigInt::from(2),
        8,
        Round::Nearest,
    ))
    .floor_bigint();
    let n: i64 = n_int.to_i64().expect("exp reduction overflow");
    let r = x.sub(&Bf::from_i64(n).mul(&l2));
    // r = r' * 2^j then square back
    let j = 8u32;
    let rp = r.mul_pow2(-(j as i64)).round(wp + 16, Round::Nearest);
    // series
    let mut term = Bf::one();
    let mut sum = Bf::one();
    let mut k = 1u64;
    loop {
        term = term
            .mul_r(&rp, wp + 16, Round::Nearest)
            .div_r(&Bf::from_u64(k), wp + 16, Round::Nearest);
        if term.is_zero() || term.msb_exp() < -((wp + 16) as i64) {
            break;
        }
        sum = sum.add_r(&term, wp + 16, Round::Nearest);
        k += 1;
    }
    let mut v = sum;
    for _ in 0..j {
        v = v.mul_r(&v, wp + 8, Round::Nearest);
    }
    let v = v.mul_pow2(n);
    finish_rel(v, wp as i64 - SLOP, prec, rnd)
}

/// Natural logarithm with directed rounding; requires `x > 0`.
pub fn ln(x: &Bf, prec: u32, rnd: Round) -> Bf {
    assert!(x.is_positive(), "ln of non-positive value");
    let wp = prec + GUARD;
    let half = Bf::from_parts(BigInt::one(), -1);
    let two = Bf::from_i64(2);
    if x > &half && x < &two {
        let v = ln_atanh(x, wp);
        if v.is_zero() {
            return Bf::zero();
        }
        return finish_rel(v, wp as i64 - SLOP, prec, rnd);
    }
    // x = m * 2^k with m in [1, 2)
    let k = x.msb_exp() - 1;
    let m = x.mul_pow2(-k);
    let lm = ln_atanh(&m, wp + 16);
    let extra = 64 - k.unsigned_abs().leading_zeros().min(63);
    let l2 = ln2(wp + 16 + extra);
    let v = Bf::from_i64(k).mul(&l2).add_r(&lm, wp + 8, Round::Nearest);
    finish_rel(v, wp as i64 - SLOP, prec, rnd)
}

/// ln on (1/2, 2) via 2 atanh((x-1)/(x+1)); relative error <= 2^-(wp-8).
fn ln_atanh(x: &Bf, wp: u32) -> Bf {
    let one = Bf::one();
    let t = x.sub(&one).div_r(&x.add(&one), wp + 16, Round::Nearest);
    if t.is_zero() {
        return Bf::zero();
    }
    let t2 = t.mul_r(&t, wp + 16, Round::Nearest);
    let mut term = t.clone();
    let mut sum = t.clone();
    let mut k = 1u64;
    let cut = t.msb_exp() - (wp as i64 + 12);
    loop {
        term = term.mul_r(&t2, wp + 16, Round::Nearest);
        let add = term.div_r(&Bf::from_u64(2 * k + 1), wp + 16, Round::Nearest);
        if add.is_zero() || add.msb_exp() < cut {
            break;
        }
        sum = sum.add_r(&add, wp + 16, Round::Nearest);
        k += 1;
    }
    sum.mul_pow2(1)
}

/// max(1, ln x); the guarded logarithm used by the bound formulas.
pub fn log_plus(x: &Bf, prec: u32, rnd: Round) -> Bf {
    if x <= &Bf::one() {
        return Bf::one();
    }
    ln(x, prec, rnd).max_bf(&Bf::one())
}

/// Simultaneous sin and cos with directed rounding.
pub fn sin_cos(x: &Bf, prec: u32, rnd: Round) -> (Bf, Bf) {
    let wp = prec + GUARD;
    assert!(x.msb_exp() < 40, "trig argument out of supported range");
    let extra = if x.msb_exp() > 0 { x.msb_exp() as u32 + 8 } else { 8 };
    let pi_w = pi(wp + extra);
    let half_pi = pi_w.mul_pow2(-1);
    // q = round(x / (pi/2))
    let qf = x.div_r(&half_pi, 64, Round::Nearest);
    let q = qf
        .add(&Bf::from_ratio(
            &BigInt::from(if qf.is_negative() { -1 } else { 1 }),
            &BigInt::from(2),
            8,
            Round::Nearest,
        ))
        .floor_bigint();
    let t = x.sub(&Bf::from_bigint(q.clone()).mul(&half_pi))
        .round(wp + 16, Round::Nearest);
    let (s, c) = sin_cos_small(&t, wp);
    let qm: i64 = (&q % BigInt::from(4)).to_i64().unwrap();
    let qm = (qm + 4) % 4;
    let (sv, cv) = match qm {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    };
    (
        finish_abs(sv, -(wp as i64) + SLOP, prec, rnd),
        finish_abs(cv, -(wp as i64) + SLOP, prec, rnd),
    )
}

pub fn sin(x: &Bf, prec: u32, rnd: Round) -> Bf {
    sin_cos(x, prec, rnd).0
}

pub fn cos(x: &Bf, prec: u32, rnd: Round) -> Bf {
    sin_cos(x, prec, rnd).1
}

/// Taylor series for |t| <= pi/4 + eps.
fn sin_cos_small(t: &Bf, wp: u32) -> (Bf, Bf) {
    let t2 = t.mul_r(t, wp + 16, Round::Nearest);
    let mut s = t.clone();
    let mut c = Bf::one();
    let mut term_s = t.clone();
    let mut term_c = Bf::one();
    let mut k = 1u64;
    loop {
        // cos term: (-1)^k t^(2k)/(2k)!
        term_c = term_c
            .mul_r(&t2, wp + 16, Round::Nearest)
            .div_r(&Bf::from_u64((2 * k - 1) * (2 * k)), wp + 16, Round::Nearest);
        term_s = term_s
            .mul_r(&t2, wp + 16, Round::Nearest)
            .div_r(&Bf::from_u64((2 * k) * (2 * k + 1)), wp + 16, Round::Nearest);
        let neg = k % 2 == 1;
        let tc = if neg { term_c.neg() } else { term_c.clone() };
        let ts = if neg { term_s.neg() } else { term_s.clone() };
        c = c.add_r(&tc, wp + 16, Round::Nearest);
        s = s.add_r(&ts, wp + 16, Round::Nearest);
        if term_c.msb_exp() < -((wp + 12) as i64) && term_s.msb_exp() < -((wp + 12) as i64) {
            break;
        }
        k += 1;
    }
    (s, c)
}

/// Square root (x >= 0) with directed rounding.
pub fn sqrt(x: &Bf, prec: u32, rnd: Round) -> Bf {
    assert!(!x.is_negative(), "sqrt of negative value");
    if x.is_zero() {
        return Bf::zero();
    }
    let wp = prec as i64 + 8;
    // scale so the shifted mantissa has ~2*wp bits and even exponent
    let nbits = x.bits() as i64;
    let mut shift = (2 * wp - nbits).max(0);
    if (x.exp - shift) % 2 != 0 {
        shift += 1;
    }
    let m = x.mant.magnitude() << shift as u32;
    let s = m.sqrt();
    let exact = &s * &s == m;
    let mut mant = BigInt::from(s);
    let mut e = (x.exp - shift) / 2;
    if !exact {
        mant = (mant << 1) + 1;
        e -= 1;
    }
    Bf { mant, exp: e }.normalized().round(prec, rnd)
}

/// arctangent with directed rounding.
pub fn atan(x: &Bf, prec: u32, rnd: Round) -> Bf {
    if x.is_zero() {
        return Bf::zero();
    }
    let wp = prec + GUARD;
    let v = atan_inner(x, wp);
    finish_abs(v, -(wp as i64) + SLOP + 4, prec, rnd)
}

fn atan_inner(x: &Bf, wp: u32) -> Bf {
    if x.is_negative() {
        return atan_inner(&x.abs(), wp).neg();
    }
    let one = Bf::one();
    if x > &one {
        // atan x = pi/2 - atan(1/x)
        let inv = one.div_r(x, wp + 16, Round::Nearest);
        return pi(wp + 16)
            .mul_pow2(-1)
            .sub(&atan_inner(&inv, wp))
            .round(wp + 8, Round::Nearest);
    }
    // halve until small: atan x = 2 atan(x / (1 + sqrt(1+x^2)))
    let threshold = Bf::from_ratio(&BigInt::from(3), &BigInt::from(8), 16, Round::Nearest);
    if x > &threshold {
        let x2 = x.mul_r(x, wp + 16, Round::Nearest);
        let root = sqrt(&one.add(&x2), wp + 16, Round::Nearest);
        let y = x.div_r(&one.add(&root), wp + 16, Round::Nearest);
        return atan_inner(&y, wp).mul_pow2(1);
    }
    // series
    let t2 = x.mul_r(x, wp + 16, Round::Nearest);
    let mut pow = x.clone();
    let mut sum = x.clone();
    let mut k = 1u64;
    loop {
        pow = pow.mul_r(&t2, wp + 16, Round::Nearest);
        let term = pow.div_r(&Bf::from_u64(2 * k + 1), wp + 16, Round::Nearest);
        if term.is_zero() || term.msb_exp() < -((wp + 12) as i64) {
            break;
        }
        if k % 2 == 1 {
            sum = sum.sub(&term).round(wp + 16, Round::Nearest);
        } else {
            sum = sum.add_r(&term, wp + 16, Round::Nearest);
        }
        k += 1;
    }
    sum
}

/// x^y for positive x, via exp(y ln x), with directed rounding.
pub fn pow(x: &Bf, y: &Bf, prec: u32, rnd: Round) -> Bf {
    assert!(x.is_positive(), "pow base must be positive");
    if y.is_zero() {
        return Bf::one();
    }
    let wp = prec + GUARD;
    // choose inner direction so the composition is directed correctly
    let inner = match rnd {
        Round::Nearest => Round::Nearest,
        Round::Ceil => {
            if y.is_positive() {
                Round::Ceil
            } else {
                Round::Floor
            }
        }
        Round::Floor => {
            if y.is_positive() {
                Round::Floor
            } else {
                Round::Ceil
            }
        }
    };
    let lx = ln(x, wp, inner);
    let prod = match rnd {
        Round::Nearest => y.mul(&lx).round(wp, Round::Nearest),
        Round::Ceil => y.mul(&lx).round(wp, Round::Ceil),
        Round::Floor => y.mul(&lx).round(wp, Round::Floor),
    };
    exp(&prod, prec, rnd)
}

/// n! as a big integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}
