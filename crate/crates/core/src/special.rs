//! High-precision zeta and gamma evaluation with explicit error accounting.
//!
//! Zeta values and jets use Euler–Maclaurin summation; the returned tail
//! bound covers the truncated remainder, including the remainder's
//! derivatives up to the jet order. Gamma uses the Stirling series with a
//! recurrence shift to a large argument; the inverse function on the
//! increasing branch is found by bracketing plus Newton refinement, and its
//! jets come from series reversion.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bigfloat::{self, Bf, Round};
use crate::jet::Jet;
use crate::{Error, Result};

const R: Round = Round::Nearest;

/// Bernoulli numbers B_0, B_1, B_2, ... (exact), extended on demand.
pub fn bernoulli(n: usize) -> BigRational {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| {
        Mutex::new(vec![
            BigRational::one(),
            BigRational::new(BigInt::from(-1), BigInt::from(2)),
        ])
    });
    let mut cache = cell.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, b) in cache.iter().enumerate() {
            acc += BigRational::from(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let bm = -acc / BigRational::from(BigInt::from(m + 1));
        cache.push(bm);
    }
    cache[n].clone()
}

pub fn rational_to_bf(q: &BigRational, prec: u32, rnd: Round) -> Bf {
    Bf::from_ratio(q.numer(), q.denom(), prec, rnd)
}

/// Jet of n^(-s) at s0: coefficients n^(-s0) (-ln n)^p / p!.
fn pow_neg_s_jet(n_ln: &Bf, n_pow: &Bf, center: &Bf, order: usize, prec: u32) -> Jet {
    let mut coeffs = vec![Bf::zero(); order + 1];
    let mut term = n_pow.clone();
    coeffs[0] = term.clone();
    for (p, c) in coeffs.iter_mut().enumerate().skip(1) {
        term = term
            .mul_r(&n_ln.neg(), prec, R)
            .div_r(&Bf::from_u64(p as u64), prec, R);
        *c = term.clone();
    }
    Jet::new(center.clone(), coeffs, prec)
}

/// Euler–Maclaurin zeta jet at `s0 > 1` with explicit cutoffs. Returns the
/// jet and a bound on the absolute error of every coefficient.
pub fn zeta_jet_with_cutoff(
    s0: &Bf,
    order: usize,
    prec: u32,
    m_cutoff: u64,
    k_terms: usize,
) -> Result<(Jet, Bf)> {
    if s0 <= &Bf::one() {
        return Err(Error::Domain(format!(
            "zeta evaluated at s = {} <= 1",
            s0.to_dec_string(6)
        )));
    }
    let wp = prec + 32;
    let m = m_cutoff.max(16);
    let k = k_terms.max(order + 2);
    // remainder validity: (s0 + 2K) ln M >= 2 * order
    let sigma = s0.add(&Bf::from_u64(2 * k as u64));
    let ln_m = bigfloat::ln(&Bf::from_u64(m), wp, R);
    if sigma.mul(&ln_m) < Bf::from_u64(2 * order as u64) {
        return Err(Error::Precision("zeta cutoff too small for jet order".into()));
    }

    // sum_{n=1}^{M-1} n^{-s}
    let mut sum = Jet::constant(s0.clone(), Bf::one(), order, wp);
    for n in 2..m {
        let ln_n = bigfloat::ln(&Bf::from_u64(n), wp, R);
        let n_pow = bigfloat::exp(&s0.neg().mul(&ln_n).round(wp, R), wp, R);
        sum = sum.add(&pow_neg_s_jet(&ln_n, &n_pow, s0, order, wp))?;
    }
    // M^(1-s)/(s-1)
    let m_bf = Bf::from_u64(m);
    let m1s = {
        // jet of M^(1-s): M * M^(-s)
        let m_pow = bigfloat::exp(&s0.neg().mul(&ln_m).round(wp, R), wp, R);
        pow_neg_s_jet(&ln_m, &m_pow, s0, order, wp).scale(&m_bf)
    };
    let s_minus_1 = Jet::identity(s0.clone(), order, wp)
        .add_const(&Bf::one().neg());
    sum = sum.add(&m1s.div(&s_minus_1)?)?;
    // M^(-s)/2
    let m_pow = bigfloat::exp(&s0.neg().mul(&ln_m).round(wp, R), wp, R);
    let m_s = pow_neg_s_jet(&ln_m, &m_pow, s0, order, wp);
    sum = sum.add(&m_s.scale(&Bf::from_parts(BigInt::one(), -1)))?;
    // correction terms: B_{2j}/(2j)! * poch(s, 2j-1) * M^(1-s-2j)
    let mut poch = Jet::constant(s0.clone(), Bf::one(), order, wp);
    let mut next_factor = 0u64; // next (s + next_factor) to multiply in
    let mut fact = BigRational::one(); // (2j)!
    for j in 1..=k {
        // extend pochhammer to 2j-1 factors
        while next_factor < 2 * j as u64 - 1 {
            let lin = Jet::identity(s0.clone(), order, wp)
                .add_const(&Bf::from_u64(next_factor));
            poch = poch.mul(&lin)?;
            next_factor += 1;
        }
        fact *= BigRational::from(BigInt::from((2 * j - 1) * (2 * j)));
        let coef = bernoulli(2 * j) / &fact;
        // M^(1-s-2j) = M^(1-2j) * M^(-s)
        let m_shift = pow_neg_s_jet(&ln_m, &m_pow, s0, order, wp)
            .scale(&Bf::from_u64(m).pow_i64(1 - 2 * j as i64, wp, R));
        sum = sum.add(&m_shift.mul(&poch)?.scale(&rational_to_bf(&coef, wp, R)))?;
    }
    // tail bound: 2.5/(2pi)^(2K+1) * 2/(sigma' M^sigma') * sum_{i+j<=order} poch_i ln^j M / j!
    // with sigma' = s0 + 2K and poch extended to 2K+1 factors.
    while next_factor < 2 * k as u64 + 1 {
        let lin = Jet::identity(s0.clone(), order, wp).add_const(&Bf::from_u64(next_factor));
        poch = poch.mul(&lin)?;
        next_factor += 1;
    }
    let two_pi = bigfloat::pi(wp).mul_pow2(1);
    let lead = bigfloat::parse_decimal("2.5", wp)?
        .div_r(&two_pi.pow_i64(2 * k as i64 + 1, wp, Round::Floor), wp, Round::Ceil);
    let m_sig = bigfloat::pow(&m_bf, &sigma, wp, Round::Floor);
    let scale = Bf::from_i64(2).div_r(&sigma.mul(&m_sig), wp, Round::Ceil);
    let mut comb = Bf::zero();
    let mut lnm_pow_over_fact = Bf::one();
    for jj in 0..=order {
        if jj > 0 {
            lnm_pow_over_fact = lnm_pow_over_fact
                .mul_r(&ln_m, wp, Round::Ceil)
                .div_r(&Bf::from_u64(jj as u64), wp, Round::Ceil);
        }
        for ii in 0..=(order - jj) {
            comb = comb.add(&poch.coeff(ii).abs().mul(&lnm_pow_over_fact));
        }
    }
    let tail = lead.mul(&scale).mul(&comb).round(wp, Round::Ceil);

    // round down to requested precision
    let coeffs = sum.coeffs().iter().map(|c| c.round(prec, R)).collect();
    Ok((Jet::new(s0.clone(), coeffs, prec), tail))
}

/// Zeta jet with automatically chosen cutoffs for the requested precision.
pub fn zeta_jet(s0: &Bf, order: usize, prec: u32) -> Result<(Jet, Bf)> {
    let m = 64u64.max(prec as u64 / 4);
    let k = order + 4 + (prec as usize) / 12;
    zeta_jet_with_cutoff(s0, order, prec, m, k)
}

/// Zeta value at real s > 1.
pub fn zeta(s0: &Bf, prec: u32) -> Result<Bf> {
    Ok(zeta_jet(s0, 0, prec)?.0.value().clone())
}

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

/// Number of Stirling correction terms.
const STIRLING_N: usize = 32;

fn stirling_threshold(prec: u32) -> u64 {
    (prec as u64).max(48)
}

/// Jet of ln Gamma at `x0 > 0`.
pub fn ln_gamma_jet(x0: &Bf, order: usize, prec: u32) -> Result<Jet> {
    if !x0.is_positive() {
        return Err(Error::Domain("ln_gamma requires a positive argument".into()));
    }
    let wp = prec + 32;
    let thresh = stirling_threshold(prec);
    let shift = {
        let t = Bf::from_u64(thresh).sub(x0);
        if t.is_positive() {
            let c = t.ceil_bigint();
            u64::try_from(&c).unwrap_or(0)
        } else {
            0
        }
    };
    let x = Jet::identity(x0.clone(), order, wp);
    let z = x.add_const(&Bf::from_u64(shift));
    // S(z) = (z - 1/2) ln z - z + ln(2 pi)/2 + sum B_{2n}/(2n(2n-1)) z^(1-2n)
    let ln_z = z.ln()?;
    let half = Bf::from_parts(BigInt::one(), -1);
    let mut s = z.add_const(&half.neg()).mul(&ln_z)?.sub(&z)?;
    let ln_2pi = bigfloat::ln(&bigfloat::pi(wp).mul_pow2(1), wp, R);
    s = s.add_const(&ln_2pi.mul_pow2(-1));
    let z_inv = z.recip()?;
    let z_inv2 = z_inv.mul(&z_inv)?;
    let mut zpow = z_inv.clone(); // z^(1-2n) for n=1
    for n in 1..=STIRLING_N {
        let b = bernoulli(2 * n);
        let denom = BigRational::from(BigInt::from(2 * n * (2 * n - 1)));
        let c = rational_to_bf(&(b / denom), wp, R);
        s = s.add(&zpow.scale(&c))?;
        if n < STIRLING_N {
            zpow = zpow.mul(&z_inv2)?;
        }
    }
    // ln Gamma(x) = S(x + shift) - sum_{i=0}^{shift-1} ln(x + i)
    for i in 0..shift {
        s = s.sub(&x.add_const(&Bf::from_u64(i)).ln()?)?;
    }
    let coeffs = s.coeffs().iter().map(|c| c.round(prec, R)).collect();
    Ok(Jet::new(x0.clone(), coeffs, prec))
}

/// Jet of Gamma at `x0 > 0`.
pub fn gamma_jet(x0: &Bf, order: usize, prec: u32) -> Result<Jet> {
    ln_gamma_jet(x0, order, prec + 16)?.exp().map(|j| {
        let coeffs = j.coeffs().iter().map(|c| c.round(prec, R)).collect();
        Jet::new(x0.clone(), coeffs, prec)
    })
}

pub fn gamma(x0: &Bf, prec: u32) -> Result<Bf> {
    Ok(gamma_jet(x0, 0, prec)?.value().clone())
}

/// Inverse of Gamma on the increasing branch `[2, +inf)` (where
/// `Gamma(2) = 1` and Gamma is strictly increasing). Requires `y >= 1`.
pub fn gamma_inv(y: &Bf, prec: u32) -> Result<Bf> {
    if y < &Bf::one() {
        return Err(Error::Domain(
            "gamma_inv requires y >= 1 on the increasing branch".into(),
        ));
    }
    let wp = prec + 32;
    let two = Bf::from_i64(2);
    if y == &Bf::one() {
        return Ok(two);
    }
    // bracket
    let mut lo = two.clone();
    let mut hi = Bf::from_i64(3);
    while gamma(&hi, 48)? < *y {
        lo = hi.clone();
        hi = hi.mul_pow2(1);
    }
    // coarse bisection, then Newton
    for _ in 0..44 {
        let mid = lo.add(&hi).mul_pow2(-1).round(64, R);
        if gamma(&mid, 48)? < *y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi.sub(&lo).msb_exp() < lo.msb_exp() - 40 {
            break;
        }
    }
    // Newton: x <- x - (Gamma(x) - y)/Gamma'(x)
    let mut x = lo.add(&hi).mul_pow2(-1).round(wp, R);
    let steps = (wp as f64 / 55.0).log2().ceil().max(1.0) as usize + 2;
    for _ in 0..steps {
        let j = gamma_jet(&x, 1, wp)?;
        let fx = j.value().sub(y);
        let dx = fx.div_r(j.coeff(1), wp, R);
        x = x.sub(&dx).round(wp, R);
        if x < two {
            x = two.clone();
        }
    }
    Ok(x.round(prec, R))
}

/// Jet of the inverse Gamma branch at `y0 >= 1`.
pub fn gamma_inv_jet(y0: &Bf, order: usize, prec: u32) -> Result<Jet> {
    let wp = prec + 32;
    let x0 = gamma_inv(y0, wp)?;
    let f = gamma_jet(&x0, order.max(1), wp)?;
    let inv = f.revert()?;
    // Recentre at exactly y0 (the reverted jet is centered at Gamma(x0),
    // which differs from y0 by the inversion residual).
    let delta = y0.sub(inv.center());
    let shifted = taylor_shift(&inv, &delta, wp);
    let coeffs: Vec<Bf> = shifted
        .coeffs()
        .iter()
        .take(order + 1)
        .map(|c| c.round(prec, R))
        .collect();
    Ok(Jet::new(y0.clone(), coeffs, prec))
}

/// Evaluate the jet polynomial at center + delta, producing a jet at the
/// shifted center (plain Taylor shift of the truncated polynomial).
pub fn taylor_shift(j: &Jet, delta: &Bf, prec: u32) -> Jet {
    let n = j.order();
    let mut coeffs = j.coeffs().to_vec();
    // repeated synthetic division by (t - delta)
    for i in 0..n {
        for k in (i..n).rev() {
            let t = coeffs[k + 1].mul(delta).round(prec, R);
            coeffs[k] = coeffs[k].add_r(&t, prec, R);
        }
    }
    Jet::new(j.center().add(delta), coeffs, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Bf, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), BigRational::new(BigInt::from(1), BigInt::from(6)));
        assert_eq!(bernoulli(4), BigRational::new(BigInt::from(-1), BigInt::from(30)));
        assert_eq!(bernoulli(3), BigRational::zero());
        assert_eq!(bernoulli(12), BigRational::new(BigInt::from(-691), BigInt::from(2730)));
    }

    // independent oracle: direct Dirichlet sum with integral tail correction
    fn zeta_oracle(s: f64) -> f64 {
        let m = 200_000u64;
        let mut acc = 0.0;
        for n in 1..m {
            acc += (n as f64).powf(-s);
        }
        // tail: integral + half-term
        acc + (m as f64).powf(1.0 - s) / (s - 1.0) + 0.5 * (m as f64).powf(-s)
    }

    #[test]
    fn zeta_values_match_oracle() {
        for s in [1.5f64, 2.0, 3.0, 5.0] {
            let z = zeta(&Bf::from_f64(s), 192).unwrap();
            let want = zeta_oracle(s);
            assert!(close(&z, want, 1e-9), "zeta({s}): {} vs {want}", z.to_f64());
        }
        // reference digits
        let z2 = zeta(&Bf::from_f64(2.0), 256).unwrap();
        assert!(close(&z2, std::f64::consts::PI * std::f64::consts::PI / 6.0, 1e-14));
        let z15 = zeta(&Bf::from_f64(1.5), 256).unwrap();
        assert!(close(&z15, 2.612375348685488, 1e-12));
    }

    #[test]
    fn zeta_derivative_matches_sum() {
        // zeta'(3) = -sum ln n / n^3 ~ -0.19812624288564
        let (j, tail) = zeta_jet(&Bf::from_f64(3.0), 1, 192).unwrap();
        let mut want = 0.0;
        for n in 2..200_000u64 {
            want -= (n as f64).ln() / (n as f64).powi(3);
        }
        assert!(close(j.coeff(1), want, 1e-8), "{} vs {want}", j.coeff(1).to_f64());
        assert!(tail.to_f64() < 1e-30);
    }

    #[test]
    fn zeta_cutoff_stability() {
        // increasing the cutoff moves coefficients by less than the tail bound
        let s = Bf::from_f64(1.5);
        let (a, tail_a) = zeta_jet_with_cutoff(&s, 4, 160, 64, 20).unwrap();
        let (b, _) = zeta_jet_with_cutoff(&s, 4, 160, 128, 28).unwrap();
        for p in 0..=4 {
            let d = a.coeff(p).sub(b.coeff(p)).abs();
            assert!(
                d <= tail_a.add(&tail_a),
                "coeff {p} moved {} > tail {}",
                d.to_f64(),
                tail_a.to_f64()
            );
        }
    }

    #[test]
    fn zeta_domain_guard() {
        assert!(zeta(&Bf::from_f64(1.0), 64).is_err());
        assert!(zeta(&Bf::from_f64(0.5), 64).is_err());
    }

    #[test]
    fn gamma_integer_values() {
        for (x, want) in [(2.0, 1.0), (3.0, 2.0), (4.0, 6.0), (5.0, 24.0), (8.0, 5040.0)] {
            let g = gamma(&Bf::from_f64(x), 160).unwrap();
            assert!(close(&g, want, 1e-10), "gamma({x}) = {}", g.to_f64());
        }
        let g_half = gamma(&Bf::from_f64(0.5), 160).unwrap();
        assert!(close(&g_half, std::f64::consts::PI.sqrt(), 1e-12));
    }

    #[test]
    fn gamma_derivative() {
        // Gamma'(1) = -euler_gamma ~ -0.5772156649
        let j = gamma_jet(&Bf::from_f64(1.0), 1, 160).unwrap();
        assert!(close(j.coeff(1), -0.5772156649015329, 1e-10));
    }

    #[test]
    fn gamma_inv_roundtrip() {
        for y in [1.0f64, 1.5, 2.0, 6.0, 24.0, 720.0, 1e6] {
            let x = gamma_inv(&Bf::from_f64(y), 160).unwrap();
            let back = gamma(&x, 160).unwrap();
            assert!(
                close(&back, y, 1e-9 * y.max(1.0)),
                "gamma(gamma_inv({y})) = {}",
                back.to_f64()
            );
            assert!(x >= Bf::from_i64(2));
        }
        // exact landmark: Gamma(3) = 2
        let x = gamma_inv(&Bf::from_f64(2.0), 192).unwrap();
        assert!(close(&x, 3.0, 1e-40));
    }

    #[test]
    fn gamma_inv_domain_guard() {
        assert!(gamma_inv(&Bf::from_f64(0.5), 64).is_err());
    }

    #[test]
    fn gamma_inv_jet_matches_finite_difference() {
        let y0 = Bf::from_f64(10.0);
        let j = gamma_inv_jet(&y0, 3, 192).unwrap();
        let h = 1e-6;
        let xp = gamma_inv(&Bf::from_f64(10.0 + h), 192).unwrap().to_f64();
        let xm = gamma_inv(&Bf::from_f64(10.0 - h), 192).unwrap().to_f64();
        let d1 = (xp - xm) / (2.0 * h);
        assert!(
            (j.coeff(1).to_f64() - d1).abs() < 1e-7,
            "f'(10): {} vs {d1}",
            j.coeff(1).to_f64()
        );
        // center is exactly y0
        assert_eq!(j.center(), &y0);
    }

    #[test]
    fn taylor_shift_consistency() {
        // shift the jet of sin at 1 by 0.25 and compare with jet at 1.25
        let prec = 192;
        let j = Jet::identity(Bf::from_f64(1.0), 8, prec).sin().unwrap();
        let shifted = taylor_shift(&j, &Bf::from_f64(0.25), prec);
        let direct = Jet::identity(Bf::from_f64(1.25), 8, prec).sin().unwrap();
        // low-order coefficients agree to the truncation error of order 8
        for p in 0..=3 {
            let d = shifted.coeff(p).sub(direct.coeff(p)).abs();
            assert!(d.to_f64() < 1e-6, "coeff {p} differs by {}", d.to_f64());
        }
    }
}
