//! Truncated Taylor expansions (jets) with arbitrary-precision coefficients.
//!
//! A jet of order `P` at a center `x0` stores the coefficients
//! `c_p = f^(p)(x0)/p!` for `p = 0..=P`. Multiplication is the Cauchy
//! product; the elementary functions use the standard D-finite coefficient
//! recurrences; composition is Horner evaluation in the inner series.

use crate::bigfloat::{self, Bf, Round};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Jet {
    center: Bf,
    coeffs: Vec<Bf>,
    prec: u32,
}

const R: Round = Round::Nearest;

// coefficient recurrences index jets the way the formulas read
#[allow(clippy::needless_range_loop)]
impl Jet {
    pub fn new(center: Bf, coeffs: Vec<Bf>, prec: u32) -> Jet {
        assert!(!coeffs.is_empty());
        Jet { center, coeffs, prec }
    }

    /// Jet of the identity function `x` at `center`.
    pub fn identity(center: Bf, order: usize, prec: u32) -> Jet {
        let mut coeffs = vec![Bf::zero(); order + 1];
        coeffs[0] = center.clone();
        if order >= 1 {
            coeffs[1] = Bf::one();
        }
        Jet { center, coeffs, prec }
    }

    /// Jet of a constant function.
    pub fn constant(center: Bf, value: Bf, order: usize, prec: u32) -> Jet {
        let mut coeffs = vec![Bf::zero(); order + 1];
        coeffs[0] = value;
        Jet { center, coeffs, prec }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn center(&self) -> &Bf {
        &self.center
    }

    pub fn coeff(&self, p: usize) -> &Bf {
        &self.coeffs[p]
    }

    pub fn coeffs(&self) -> &[Bf] {
        &self.coeffs
    }

    pub fn value(&self) -> &Bf {
        &self.coeffs[0]
    }

    fn same_shape(&self, other: &Jet) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Input(format!(
                "jet order mismatch: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        if self.center != other.center {
            return Err(Error::Input("jet center mismatch".into()));
        }
        Ok(())
    }

    pub fn neg(&self) -> Jet {
        Jet {
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add_r(b, self.prec, R))
            .collect();
        Ok(Jet { center: self.center.clone(), coeffs, prec: self.prec })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Bf) -> Jet {
        Jet {
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|c| c.mul_r(k, self.prec, R)).collect(),
            prec: self.prec,
        }
    }

    pub fn add_const(&self, k: &Bf) -> Jet {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = coeffs[0].add_r(k, self.prec, R);
        Jet { center: self.center.clone(), coeffs, prec: self.prec }
    }

    /// Cauchy product.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let n = self.order();
        let mut coeffs = vec![Bf::zero(); n + 1];
        for (p, c) in coeffs.iter_mut().enumerate() {
            let mut acc = Bf::zero();
            for i in 0..=p {
                acc = acc.add(&self.coeffs[i].mul(&other.coeffs[p - i]));
            }
            *c = acc.round(self.prec, R);
        }
        Ok(Jet { center: self.center.clone(), coeffs, prec: self.prec })
    }

    /// Reciprocal series; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Jet> {
        if self.coeffs[0].is_zero() {
            return Err(Error::Domain("reciprocal of jet with zero constant term".into()));
        }
        let n = self.order();
        let prec = self.prec;
        let mut r = vec![Bf::zero(); n + 1];
        r[0] = Bf::one().div_r(&self.coeffs[0], prec, R);
        for p in 1..=n {
            let mut acc = Bf::zero();
            for j in 1..=p {
                acc = acc.add(&self.coeffs[j].mul(&r[p - j]));
            }
            r[p] = acc.neg().div_r(&self.coeffs[0], prec, R).round(prec, R);
        }
        Ok(Jet { center: self.center.clone(), coeffs: r, prec })
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.mul(&other.recip()?)
    }

    /// Integer power by repeated squaring (negative exponents via recip).
    pub fn pow_i64(&self, k: i64) -> Result<Jet> {
        if k < 0 {
            return self.recip()?.pow_i64(-k);
        }
        let mut acc = Jet::constant(self.center.clone(), Bf::one(), self.order(), self.prec);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Real power `u^F`; the constant term must be positive.
    pub fn pow_real(&self, f_exp: &Bf) -> Result<Jet> {
        if !self.coeffs[0].is_positive() {
            return Err(Error::Domain("real power of jet with non-positive constant term".into()));
        }
        let n = self.order();
        let prec = self.prec;
        let mut w = vec![Bf::zero(); n + 1];
        w[0] = bigfloat::pow(&self.coeffs[0], f_exp, prec, R);
        // k u0 w_k = sum_{m=1..k} (F m - (k-m)) u_m w_{k-m}
        for k in 1..=n {
            let mut acc = Bf::zero();
            for m in 1..=k {
                let fac = f_exp
                    .mul(&Bf::from_u64(m as u64))
                    .sub(&Bf::from_u64((k - m) as u64));
                acc = acc.add(&fac.mul(&self.coeffs[m]).mul(&w[k - m]));
            }
            w[k] = acc
                .div_r(&Bf::from_u64(k as u64), prec, R)
                .div_r(&self.coeffs[0], prec, R);
        }
        Ok(Jet { center: self.center.clone(), coeffs: w, prec })
    }

    /// exp(u).
    pub fn exp(&self) -> Result<Jet> {
        let n = self.order();
        let prec = self.prec;
        let mut e = vec![Bf::zero(); n + 1];
        e[0] = bigfloat::exp(&self.coeffs[0], prec, R);
        // k e_k = sum_{j=1..k} j u_j e_{k-j}
        for k in 1..=n {
            let mut acc = Bf::zero();
            for j in 1..=k {
                acc = acc.add(&Bf::from_u64(j as u64).mul(&self.coeffs[j]).mul(&e[k - j]));
            }
            e[k] = acc.div_r(&Bf::from_u64(k as u64), prec, R);
        }
        Ok(Jet { center: self.center.clone(), coeffs: e, prec })
    }

    /// ln(u); the constant term must be positive.
    pub fn ln(&self) -> Result<Jet> {
        if !self.coeffs[0].is_positive() {
            return Err(Error::Domain("log of jet with non-positive constant term".into()));
        }
        let n = self.order();
        let prec = self.prec;
        let mut w = vec![Bf::zero(); n + 1];
        w[0] = bigfloat::ln(&self.coeffs[0], prec, R);
        // k u0 w_k = k u_k - sum_{j=1..k-1} j w_j u_{k-j}
        for k in 1..=n {
            let mut acc = Bf::from_u64(k as u64).mul(&self.coeffs[k]);
            for j in 1..k {
                acc = acc.sub(&Bf::from_u64(j as u64).mul(&w[j]).mul(&self.coeffs[k - j]));
            }
            w[k] = acc
                .div_r(&Bf::from_u64(k as u64), prec, R)
                .div_r(&self.coeffs[0], prec, R);
        }
        Ok(Jet { center: self.center.clone(), coeffs: w, prec })
    }

    /// Simultaneous sin(u), cos(u).
    pub fn sin_cos(&self) -> Result<(Jet, Jet)> {
        let n = self.order();
        let prec = self.prec;
        let (s0, c0) = bigfloat::sin_cos(&self.coeffs[0], prec, R);
        let mut s = vec![Bf::zero(); n + 1];
        let mut c = vec![Bf::zero(); n + 1];
        s[0] = s0;
        c[0] = c0;
        // k s_k = sum_{j=1..k} j u_j c_{k-j};  k c_k = -sum_{j=1..k} j u_j s_{k-j}
        for k in 1..=n {
            let mut accs = Bf::zero();
            let mut accc = Bf::zero();
            for j in 1..=k {
                let ju = Bf::from_u64(j as u64).mul(&self.coeffs[j]);
                accs = accs.add(&ju.mul(&c[k - j]));
                accc = accc.add(&ju.mul(&s[k - j]));
            }
            s[k] = accs.div_r(&Bf::from_u64(k as u64), prec, R);
            c[k] = accc.neg().div_r(&Bf::from_u64(k as u64), prec, R);
        }
        Ok((
            Jet { center: self.center.clone(), coeffs: s, prec },
            Jet { center: self.center.clone(), coeffs: c, prec },
        ))
    }

    pub fn sin(&self) -> Result<Jet> {
        Ok(self.sin_cos()?.0)
    }

    pub fn cos(&self) -> Result<Jet> {
        Ok(self.sin_cos()?.1)
    }

    /// arctan(u).
    pub fn atan(&self) -> Result<Jet> {
        let n = self.order();
        let prec = self.prec;
        // v = 1 + u^2; a' v = u'
        let v = self.mul(self)?.add_const(&Bf::one());
        let mut a = vec![Bf::zero(); n + 1];
        a[0] = bigfloat::atan(&self.coeffs[0], prec, R);
        for k in 1..=n {
            let mut acc = Bf::from_u64(k as u64).mul(&self.coeffs[k]);
            for m in 1..k {
                acc = acc.sub(&Bf::from_u64(m as u64).mul(&a[m]).mul(&v.coeffs[k - m]));
            }
            a[k] = acc
                .div_r(&Bf::from_u64(k as u64), prec, R)
                .div_r(&v.coeffs[0], prec, R);
        }
        Ok(Jet { center: self.center.clone(), coeffs: a, prec })
    }

    /// Composition `outer(inner)`. The outer jet must be centered at the
    /// inner jet's constant term.
    pub fn compose(outer: &Jet, inner: &Jet) -> Result<Jet> {
        if outer.center != inner.coeffs[0] {
            return Err(Error::Input(
                "composition center mismatch: outer jet is not centered at inner value".into(),
            ));
        }
        if outer.order() != inner.order() {
            return Err(Error::Input("jet order mismatch in composition".into()));
        }
        let n = inner.order();
        let prec = inner.prec;
        // delta = inner - inner(0): zero constant term
        let mut delta = inner.clone();
        delta.coeffs[0] = Bf::zero();
        // Horner
        let mut acc = Jet::constant(inner.center.clone(), outer.coeffs[n].clone(), n, prec);
        for p in (0..n).rev() {
            acc = acc.mul(&delta)?;
            acc.coeffs[0] = acc.coeffs[0].add_r(&outer.coeffs[p], prec, R);
        }
        Ok(Jet { center: inner.center.clone(), coeffs: acc.coeffs, prec })
    }

    /// Series reversion: given this jet of an invertible `F` at `x0` (with
    /// `F'(x0) != 0`), returns the jet of the inverse function at
    /// `y0 = F(x0)`.
    pub fn revert(&self) -> Result<Jet> {
        if self.order() < 1 || self.coeffs[1].is_zero() {
            return Err(Error::Domain("reversion requires a nonzero linear term".into()));
        }
        let n = self.order();
        let prec = self.prec;
        let y0 = self.coeffs[0].clone();
        // fhat(t) = F(x0+t) - y0
        let mut fhat = self.coeffs.clone();
        fhat[0] = Bf::zero();
        let fhat_jet = Jet { center: self.center.clone(), coeffs: fhat, prec };
        // g_1 = 1/f_1; for k >= 2: g_k = -(1/f_1^k) [t^k] sum_{j=1..k-1} g_j fhat^j
        let mut g = vec![Bf::zero(); n + 1];
        g[1] = Bf::one().div_r(&fhat_jet.coeffs[1], prec, R);
        let mut fpow = fhat_jet.clone();
        let mut pow_coeffs: Vec<Vec<Bf>> = Vec::with_capacity(n + 1);
        pow_coeffs.push(vec![Bf::zero(); n + 1]); // fhat^0 unused
        pow_coeffs.push(fpow.coeffs.clone());
        for _ in 2..=n {
            fpow = fpow.mul(&fhat_jet)?;
            pow_coeffs.push(fpow.coeffs.clone());
        }
        for k in 2..=n {
            let mut acc = Bf::zero();
            for (j, pc) in pow_coeffs.iter().enumerate().take(k).skip(1) {
                acc = acc.add(&g[j].mul(&pc[k]));
            }
            let f1k = fhat_jet.coeffs[1].pow_i64(k as i64, prec, R);
            g[k] = acc.neg().div_r(&f1k, prec, R);
        }
        // inverse value at y0 is x0
        let mut coeffs = g;
        coeffs[0] = self.center.clone();
        Ok(Jet { center: y0, coeffs, prec })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::parse_decimal;

    fn ff(v: f64) -> Bf {
        Bf::from_f64(v)
    }

    fn assert_close(a: &Bf, b: f64, tol: f64, what: &str) {
        assert!(
            (a.to_f64() - b).abs() <= tol,
            "{what}: got {} want {b}",
            a.to_f64()
        );
    }

    #[test]
    fn square_of_identity() {
        // jet of x at 2, order 3: (2,1,0,0); square -> (4,4,1,0)
        let x = Jet::identity(ff(2.0), 3, 128);
        let sq = x.mul(&x).unwrap();
        let want = [4.0, 4.0, 1.0, 0.0];
        for (p, w) in want.iter().enumerate() {
            assert_eq!(sq.coeff(p).to_f64(), *w);
        }
    }

    #[test]
    fn recip_geometric() {
        // recip of (2,1,0,0) -> (1/2, -1/4, 1/8, -1/16)
        let x = Jet::identity(ff(2.0), 3, 128);
        let r = x.recip().unwrap();
        let want = [0.5, -0.25, 0.125, -0.0625];
        for (p, w) in want.iter().enumerate() {
            assert_eq!(r.coeff(p).to_f64(), *w);
        }
    }

    #[test]
    fn recip_zero_rejected() {
        let x = Jet::identity(Bf::zero(), 2, 128);
        assert!(x.recip().is_err());
    }

    #[test]
    fn log_at_e() {
        // Taylor of log at e: (1, 1/e, -1/(2e^2))
        let e = bigfloat::euler_e(160);
        let x = Jet::identity(e.clone(), 2, 160);
        let l = x.ln().unwrap();
        let ef = std::f64::consts::E;
        assert_close(l.coeff(0), 1.0, 1e-15, "c0");
        assert_close(l.coeff(1), 1.0 / ef, 1e-15, "c1");
        assert_close(l.coeff(2), -1.0 / (2.0 * ef * ef), 1e-15, "c2");
    }

    #[test]
    fn sin_series_at_zero() {
        let x = Jet::identity(Bf::zero(), 5, 128);
        let s = x.sin().unwrap();
        let want = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0];
        for (p, w) in want.iter().enumerate() {
            assert_close(s.coeff(p), *w, 1e-15, &format!("c{p}"));
        }
    }

    #[test]
    fn sin_log_jet() {
        // sin(log x) at e: c0 = sin 1, c1 = cos(1)/e, c2 = -(cos 1 + sin 1)/(2 e^2)
        let e = bigfloat::euler_e(192);
        let x = Jet::identity(e.clone(), 2, 192);
        let s = x.ln().unwrap().sin().unwrap();
        let ef = std::f64::consts::E;
        assert_close(s.coeff(0), 1f64.sin(), 1e-15, "c0");
        assert_close(s.coeff(1), 1f64.cos() / ef, 1e-15, "c1");
        assert_close(
            s.coeff(2),
            -(1f64.cos() + 1f64.sin()) / (2.0 * ef * ef),
            1e-15,
            "c2",
        );
    }

    #[test]
    fn compose_identity_law() {
        let x = Jet::identity(ff(3.0), 4, 128);
        let f = x.ln().unwrap().sin().unwrap();
        let id_outer = Jet::identity(f.value().clone(), 4, 128);
        let composed = Jet::compose(&id_outer, &f).unwrap();
        for p in 0..=4 {
            assert!(
                composed.coeff(p).sub(f.coeff(p)).abs().to_f64() < 1e-30,
                "coeff {p}"
            );
        }
    }

    #[test]
    fn compose_center_mismatch_rejected() {
        let inner = Jet::identity(ff(3.0), 3, 128);
        let outer = Jet::identity(ff(1.0), 3, 128); // wrong center
        assert!(Jet::compose(&outer, &inner).is_err());
    }

    #[test]
    fn compose_matches_direct_chain() {
        // sin o ln evaluated by explicit composition vs chained jet ops
        let prec = 256;
        let h = Jet::identity(ff(2.0), 5, prec);
        let g_of_h = h.ln().unwrap();
        let f_at = Jet::identity(g_of_h.value().clone(), 5, prec).sin().unwrap();
        let left = Jet::compose(&f_at, &g_of_h).unwrap();
        let direct = h.ln().unwrap().sin().unwrap();
        for p in 0..=5 {
            let d = left.coeff(p).sub(direct.coeff(p)).abs();
            assert!(d.to_f64() < 1e-25, "coeff {p} differs by {}", d.to_f64());
        }
    }

    #[test]
    fn pow_real_matches_exp_log() {
        let prec = 192;
        let x = Jet::identity(ff(4.0), 4, prec);
        let f = parse_decimal("-1.5", prec).unwrap();
        let a = x.pow_real(&f).unwrap();
        let b = x.ln().unwrap().scale(&f).exp().unwrap();
        for p in 0..=4 {
            let d = a.coeff(p).sub(b.coeff(p)).abs();
            assert!(d.to_f64() < 1e-40, "coeff {p}");
        }
        // and against the closed form at order 1: d/dx x^(-3/2) = -1.5 x^(-5/2)
        assert_close(a.coeff(1), -1.5 * 4f64.powf(-2.5), 1e-15, "derivative");
    }

    #[test]
    fn atan_jet_derivative() {
        // d/dx atan(x) = 1/(1+x^2)
        let x = Jet::identity(ff(2.0), 3, 128);
        let a = x.atan().unwrap();
        assert_close(a.coeff(0), 2f64.atan(), 1e-15, "value");
        assert_close(a.coeff(1), 1.0 / 5.0, 1e-15, "first derivative");
    }

    #[test]
    fn reversion_roundtrip() {
        // invert y = exp(x) at x=1; inverse is ln at y=e
        let prec = 192;
        let x = Jet::identity(ff(1.0), 5, prec);
        let f = x.exp().unwrap();
        let inv = f.revert().unwrap();
        let direct = Jet::identity(f.value().clone(), 5, prec).ln().unwrap();
        for p in 0..=5 {
            let d = inv.coeff(p).sub(direct.coeff(p)).abs();
            assert!(d.to_f64() < 1e-35, "coeff {p} differs by {}", d.to_f64());
        }
    }

    #[test]
    fn product_matches_finite_differences() {
        // coefficients of sin(x) * log(x) at x = 3, independently estimated
        // by exact-dyadic central differences, p <= 4 at 256 bits
        let prec = 256;
        let x0 = ff(3.0);
        let jet = {
            let x = Jet::identity(x0.clone(), 4, prec);
            x.sin().unwrap().mul(&x.ln().unwrap()).unwrap()
        };
        let h = Bf::from_parts(num_bigint::BigInt::from(1), -40);
        let f = |x: &Bf| -> Bf {
            bigfloat::sin(x, prec, Round::Nearest).mul_r(
                &bigfloat::ln(x, prec, Round::Nearest),
                prec,
                Round::Nearest,
            )
        };
        let fp = f(&x0.add(&h));
        let fm = f(&x0.sub(&h));
        let f0 = f(&x0);
        let d1 = fp.sub(&fm).div_r(&h.mul_pow2(1), prec, Round::Nearest);
        let d2 = fp
            .sub(&f0.mul_pow2(1))
            .add(&fm)
            .div_r(&h.mul(&h), prec, Round::Nearest)
            .mul_pow2(-1);
        assert!(jet.coeff(1).sub(&d1).abs().to_f64() < 1e-20);
        assert!(jet.coeff(2).sub(&d2).abs().to_f64() < 1e-20);
    }

    #[test]
    fn values_are_thread_safe() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Bf>();
        assert_send_sync::<Jet>();
        assert_send_sync::<crate::expr::Expr>();
    }

    #[test]
    fn distributivity() {
        let prec = 256;
        let a = Jet::identity(ff(1.5), 6, prec).sin().unwrap();
        let b = Jet::identity(ff(1.5), 6, prec).ln().unwrap();
        let c = Jet::identity(ff(1.5), 6, prec).exp().unwrap();
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        for p in 0..=6 {
            let d = left.coeff(p).sub(right.coeff(p)).abs();
            assert!(d.to_f64() < 1e-60, "coeff {p}");
        }
    }
}
