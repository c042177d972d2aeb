//! Certified real enclosures with rational endpoints.
//!
//! Transcendental functions (`ln`, `exp`, `sqrt`) are evaluated in fixed-point
//! integer arithmetic with directed rounding, so every returned interval is
//! guaranteed to contain the true value. Arithmetic on point intervals stays
//! exact; outward rounding to a working precision is only applied to
//! non-degenerate intervals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::scalar::{rational_to_f64, Rational};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(
                f,
                "[{:.17e}, {:.17e}]",
                rational_to_f64(&self.lo),
                rational_to_f64(&self.hi)
            )
        }
    }
}

impl Interval {
    pub fn point(q: Rational) -> Interval {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn integer(n: i64) -> Interval {
        Interval::point(Rational::from_integer(n.into()))
    }

    pub fn new(lo: Rational, hi: Rational) -> Interval {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_point(&self) -> Option<&Rational> {
        self.is_point().then_some(&self.lo)
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Sign of every element, if the interval does not straddle zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Interval) -> Interval {
        assert!(!o.contains_zero(), "division by an interval containing zero");
        let inv = Interval::new(o.hi.recip(), o.lo.recip());
        self.mul(&inv)
    }

    pub fn scale(&self, q: &Rational) -> Interval {
        self.mul(&Interval::point(q.clone()))
    }

    /// `self^k`; for intervals straddling zero the even-power minimum is 0.
    pub fn powi(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::integer(1);
        }
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 || self.lo.is_positive() || self.lo.is_zero() {
            Interval::new(a.clone().min(b.clone()), a.max(b))
        } else if !self.hi.is_positive() {
            Interval::new(b, a)
        } else {
            Interval::new(Rational::zero(), a.max(b))
        }
    }

    /// Widens the endpoints outward to `prec` significant bits.
    /// Point intervals are left untouched.
    pub fn round_outward(&self, prec: u32) -> Interval {
        if self.is_point() {
            return self.clone();
        }
        Interval::new(round_down(&self.lo, prec), round_up(&self.hi, prec))
    }

    /// Hull of two intervals.
    pub fn hull(&self, o: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().min(o.lo.clone()),
            self.hi.clone().max(o.hi.clone()),
        )
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().max(o.lo.clone()),
            self.hi.clone().max(o.hi.clone()),
        )
    }
}

/// Binary exponent `e` with `2^(e-1) <= |q| < 2^(e+1)` (approximately `log2|q|`).
fn magnitude(q: &Rational) -> i64 {
    q.numer().bits() as i64 - q.denom().bits() as i64
}

fn scale_pow2(q: &Rational, s: i64) -> Rational {
    if s >= 0 {
        q * Rational::from_integer(BigInt::one() << s as usize)
    } else {
        q / Rational::from_integer(BigInt::one() << (-s) as usize)
    }
}

/// Largest multiple of `2^(magnitude - prec)` not exceeding `q`.
pub fn round_down(q: &Rational, prec: u32) -> Rational {
    if q.is_zero() {
        return q.clone();
    }
    let s = prec as i64 - magnitude(q);
    let scaled = scale_pow2(q, s).floor();
    scale_pow2(&scaled, -s)
}

pub fn round_up(q: &Rational, prec: u32) -> Rational {
    -round_down(&-q.clone(), prec)
}

fn pow2(w: u32) -> BigInt {
    BigInt::one() << w as usize
}

fn fixed_to_rational(v: &BigInt, w: u32) -> Rational {
    Rational::new(v.clone(), pow2(w))
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Enclosure of `atanh(u/v) * 2^w` for `0 <= u/v <= 1/2`, as fixed-point
/// integers `(lo, hi)`.
fn atanh_fixed(u: &BigInt, v: &BigInt, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!u.is_negative() && (u * 2) <= *v);
    if u.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let u2 = u * u;
    let v2 = v * v;
    // p_j <= z^(2j+1) 2^w < p_j + 2
    let mut p = floor_div(&(u << w as usize), v);
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut j: u64 = 0;
    while !p.is_zero() {
        sum += floor_div(&p, &BigInt::from(2 * j + 1));
        terms += 1;
        p = floor_div(&(&p * &u2), &v2);
        j += 1;
    }
    // each term underestimates by < 3 ulps; the neglected tail is < 3 ulps
    let hi = &sum + BigInt::from(3 * terms + 3);
    (sum, hi)
}

/// `ln 2 * 2^w` enclosure.
fn ln2_fixed(w: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_fixed(&BigInt::one(), &BigInt::from(3), w);
    (lo * 2, hi * 2)
}

/// `ln b * 2^w` enclosure for an integer `b >= 1`.
fn ln_uint_fixed(b: &BigUint, w: u32) -> (BigInt, BigInt) {
    assert!(!b.is_zero(), "ln of zero");
    if b.is_one() {
        return (BigInt::zero(), BigInt::zero());
    }
    let bits = b.bits() as u32;
    let keep = w + 64;
    if bits > keep {
        // b in [t 2^s, (t+1) 2^s]
        let s = bits - keep;
        let t: BigUint = b >> s as usize;
        let (l2lo, l2hi) = ln2_fixed(w);
        let (tlo, _) = ln_uint_fixed(&t, w);
        let (_, thi) = ln_uint_fixed(&(&t + 1u32), w);
        let s = BigInt::from(s);
        return (tlo + &s * l2lo, thi + s * l2hi);
    }
    let l = bits - 1;
    let base = BigInt::one() << l as usize;
    let bi = BigInt::from_biguint(Sign::Plus, b.clone());
    let (l2lo, l2hi) = ln2_fixed(w);
    if bi == base {
        let l = BigInt::from(l);
        return (&l * l2lo, l * l2hi);
    }
    let u = &bi - &base;
    let v = &bi + &base;
    let (alo, ahi) = atanh_fixed(&u, &v, w);
    let l = BigInt::from(l);
    (&l * l2lo + alo * 2, l * l2hi + ahi * 2)
}

/// Certified enclosure of `ln q` for rational `q > 0`, with absolute error
/// below roughly `2^-prec`. `ln 1` is the exact point `0`.
pub fn ln(q: &Rational, prec: u32) -> Interval {
    assert!(q.is_positive(), "ln of a non-positive number");
    if q.is_one() {
        return Interval::point(Rational::zero());
    }
    let w = prec + 8;
    let (nlo, nhi) = ln_uint_fixed(q.numer().magnitude(), w);
    let (dlo, dhi) = ln_uint_fixed(q.denom().magnitude(), w);
    Interval::new(
        fixed_to_rational(&(nlo - dhi), w),
        fixed_to_rational(&(nhi - dlo), w),
    )
}

/// Enclosure of `ln` over an interval of positive numbers.
pub fn ln_interval(x: &Interval, prec: u32) -> Interval {
    if let Some(p) = x.as_point() {
        return ln(p, prec);
    }
    let a = ln(x.lo(), prec);
    let b = ln(x.hi(), prec);
    Interval::new(a.lo, b.hi)
}

/// `e^r * 2^w` enclosure for rational `0 <= r <= 1`.
fn exp_small_fixed(r: &Rational, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!r.is_negative() && r <= &Rational::one());
    let (u, v) = (r.numer().clone(), r.denom().clone());
    let mut lo_t = pow2(w);
    let mut hi_t = pow2(w);
    let mut lo = lo_t.clone();
    let mut hi = hi_t.clone();
    let mut j: u64 = 1;
    while hi_t > BigInt::one() {
        let jb = BigInt::from(j);
        lo_t = floor_div(&(&lo_t * &u), &(&v * &jb));
        hi_t = ceil_div(&(&hi_t * &u), &(&v * &jb));
        lo += &lo_t;
        hi += &hi_t;
        j += 1;
    }
    // the last upper term is <= 1 ulp and the neglected tail is below 2 ulps
    hi += 2;
    (lo, hi)
}

/// Certified enclosure of `e^x` for a rational `x`; `e^0` is exact.
pub fn exp(x: &Rational, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::integer(1);
    }
    let w = prec + 16;
    let ln2 = ln(&Rational::from_integer(2.into()), w);
    // x = k ln2 + r with r roughly in [0, ln2)
    let mid = (ln2.lo() + ln2.hi()) / Rational::from_integer(2.into());
    let k = (x / &mid).floor().to_integer();
    let kr = Rational::from_integer(k.clone());
    let r = Interval::point(x.clone()).sub(&ln2.scale(&kr));
    let one = Rational::one();
    let eval = |t: &Rational| -> Interval {
        // enclosure of e^t for |t| <= 1
        if t.is_negative() {
            let (lo, hi) = exp_small_fixed(&-t.clone(), w);
            Interval::new(
                Rational::new(pow2(w), hi),
                Rational::new(pow2(w), lo),
            )
        } else {
            let (lo, hi) = exp_small_fixed(t, w);
            Interval::new(fixed_to_rational(&lo, w), fixed_to_rational(&hi, w))
        }
    };
    let clamp = |t: &Rational| -> Rational {
        if t > &one {
            one.clone()
        } else if t < &-one.clone() {
            -one.clone()
        } else {
            t.clone()
        }
    };
    debug_assert!(r.lo().abs() <= one && r.hi().abs() <= one);
    let lo = eval(&clamp(r.lo())).lo;
    let hi = eval(&clamp(r.hi())).hi;
    let two_k = if k.is_negative() {
        Rational::new(BigInt::one(), BigInt::one() << (-k).to_usize().unwrap())
    } else {
        Rational::from_integer(BigInt::one() << k.to_usize().unwrap())
    };
    Interval::new(lo * &two_k, hi * two_k).round_outward(prec + 4)
}

pub fn exp_interval(x: &Interval, prec: u32) -> Interval {
    if let Some(p) = x.as_point() {
        return exp(p, prec);
    }
    Interval::new(exp(x.lo(), prec).lo, exp(x.hi(), prec).hi)
}

/// Square root of a nonnegative rational; exact when it is a rational square.
pub fn sqrt(q: &Rational, prec: u32) -> Interval {
    assert!(!q.is_negative(), "sqrt of a negative number");
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        return Interval::point(Rational::new(
            BigInt::from_biguint(Sign::Plus, rn),
            BigInt::from_biguint(Sign::Plus, rd),
        ));
    }
    // sqrt(n/d) = sqrt(n d) / d
    let w = prec + 8 + (d.bits() as u32);
    let s = (n * d << (2 * w) as usize).sqrt();
    let den = BigInt::from_biguint(Sign::Plus, d << w as usize);
    let s = BigInt::from_biguint(Sign::Plus, s);
    Interval::new(
        Rational::new(s.clone(), den.clone()),
        Rational::new(s + 1, den),
    )
}

/// `base^exponent` for a positive base. Integer point exponents are exact.
pub fn pow(base: &Interval, exponent: &Interval, prec: u32) -> Interval {
    if let Some(e) = exponent.as_point() {
        if e.is_integer() && !e.is_negative() {
            if let Some(k) = e.to_integer().to_u32() {
                return base.powi(k).round_outward(prec);
            }
        }
    }
    assert!(base.is_positive(), "real power of a non-positive base");
    let l = ln_interval(base, prec + 16);
    exp_interval(&l.mul(exponent).round_outward(prec + 16), prec)
}

/// Euler's number.
pub fn e_const(prec: u32) -> Interval {
    exp(&Rational::one(), prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{rat, ratio};

    fn f(i: &Interval) -> (f64, f64) {
        (rational_to_f64(i.lo()), rational_to_f64(i.hi()))
    }

    #[test]
    fn ln_encloses_known_values() {
        for (q, v) in [(rat(2), std::f64::consts::LN_2), (rat(10), std::f64::consts::LN_10), (ratio(1, 3), -(3f64).ln())] {
            let i = ln(&q, 80);
            let (lo, hi) = f(&i);
            assert!(lo <= v + 1e-15 && v - 1e-15 <= hi, "{q}: [{lo}, {hi}] vs {v}");
            assert!(i.width() < Rational::new(1.into(), BigInt::one() << 70usize));
        }
        assert!(ln(&rat(1), 64).is_point());
    }

    #[test]
    fn ln_of_huge_integer_is_tight() {
        let b = BigUint::from(3u32).pow(5000);
        let i = ln(&Rational::from_integer(BigInt::from_biguint(Sign::Plus, b)), 64);
        let v = 5000.0 * (3f64).ln();
        let (lo, hi) = f(&i);
        assert!(lo <= v * (1.0 + 1e-14) && v * (1.0 - 1e-14) <= hi);
        assert!(hi - lo < 1e-12);
    }

    #[test]
    fn exp_encloses_e() {
        let i = e_const(100);
        let (lo, hi) = f(&i);
        let e = std::f64::consts::E;
        assert!(lo <= e + 1e-15 && e - 1e-15 <= hi);
        assert!(i.width() < Rational::new(1.into(), BigInt::one() << 90usize));
        let j = exp(&rat(-5), 60);
        let (lo, hi) = f(&j);
        assert!(lo <= (-5f64).exp() * (1.0 + 1e-14) && (-5f64).exp() * (1.0 - 1e-14) <= hi);
    }

    #[test]
    fn exp_inverts_ln() {
        let x = ratio(7, 3);
        let l = ln(&x, 90);
        let back = exp_interval(&l, 80);
        assert!(back.contains(&x));
    }

    #[test]
    fn sqrt_exact_and_enclosing() {
        assert_eq!(sqrt(&ratio(9, 4), 50), Interval::point(ratio(3, 2)));
        let s = sqrt(&rat(2), 60);
        assert!(s.lo() * s.lo() <= rat(2) && s.hi() * s.hi() >= rat(2));
    }

    #[test]
    fn integer_powers_stay_exact() {
        let b = Interval::point(ratio(3, 2));
        assert_eq!(pow(&b, &Interval::integer(3), 50), Interval::point(ratio(27, 8)));
        let r = pow(&Interval::point(rat(2)), &Interval::point(ratio(1, 2)), 60);
        assert!(r.lo() * r.lo() <= rat(2) && r.hi() * r.hi() >= rat(2));
        assert!(r.width() < ratio(1, 1_000_000_000_000));
    }

    #[test]
    fn rounding_is_outward() {
        let q = ratio(1, 3);
        assert!(round_down(&q, 10) <= q && q <= round_up(&q, 10));
        let n = ratio(-1, 3);
        assert!(round_down(&n, 10) <= n && n <= round_up(&n, 10));
    }
}
