//! Closed-form degree and multiplicity bounds, evaluated exactly.
//!
//! Small quantities are plain big integers; the astronomical ones are kept
//! as [`BoundExpr`] power products and compared exactly.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::bound_expr::DEFAULT_DIGIT_CAP;
use crate::algebra::interval::{self, Interval};
use crate::algebra::{BoundExpr, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    pub m: u64,
    pub n: u64,
    pub delta: u64,
    pub d: u64,
}

impl BoundParams {
    pub fn new(m: u64, n: u64, delta: u64, d: u64) -> Result<BoundParams> {
        if n == 0 || delta == 0 || d == 0 {
            return Err(Error::Invalid("bound parameters need n, delta, d >= 1".into()));
        }
        Ok(BoundParams { m, n, delta, d })
    }

    fn mn(&self) -> u64 {
        self.m + self.n
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn pw(b: u64, e: &BigUint) -> BoundExpr {
    BoundExpr::power(&big(b), e)
}

/// `C(n + k, k) * (d + k*delta) - k`, saturating at zero.
pub fn deg_after_mo(n: u64, delta: u64, d: &BigUint, k: &BigUint) -> BigUint {
    let mut binom = BigUint::one();
    for i in 1..=n {
        binom = binom * (k + big(i)) / big(i);
    }
    let v = binom * (d + k * big(delta));
    if &v >= k {
        v - k
    } else {
        BigUint::zero()
    }
}

pub fn deg_after_mo_u64(n: u64, delta: u64, d: u64, k: u64) -> BigUint {
    deg_after_mo(n, delta, &big(d), &big(k))
}

/// Sums inside symbolic (upper-bound) evaluation are expanded only below this
/// many digits; larger ones are bounded by twice the maximum.
const SYMBOLIC_SUM_DIGITS: u64 = 2_000;

/// Upper bound `(k+1)^n (d + k*delta)` for symbolic `d`, `k`.
pub fn deg_after_mo_upper(n: u64, delta: u64, d: &BoundExpr, k: &BoundExpr) -> BoundExpr {
    let (k1, _) = k.add_upper(&BoundExpr::one(), SYMBOLIC_SUM_DIGITS);
    let (s, _) = d.add_upper(&k.mul(&BoundExpr::from_u64(delta)), SYMBOLIC_SUM_DIGITS);
    k1.pow_u64(n).mul(&s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IlDegree {
    #[serde(serialize_with = "ser_display")]
    pub value: BigUint,
    /// Set when the formula was not an integer and `value` is its ceiling.
    pub rounded: bool,
}

/// `(m+1)(delta-1)/2 * [2 delta (n+m+2) - 2m - 2]^(2m+2) + delta (n+2) - 1`.
pub fn il_degree(m: u64, n: u64, delta: u64) -> IlDegree {
    // delta = 0 (constant or empty chain) has no brackets; saturate to 0.
    let bracket = big((2 * delta * (n + m + 2)).saturating_sub(2 * m + 2));
    let num = big((m + 1) * delta.saturating_sub(1)) * num_traits::pow(bracket, (2 * m + 2) as usize);
    let (half, rem) = num.div_rem(&big(2));
    let rounded = !rem.is_zero();
    let value = (half + BigUint::from(rounded as u8) + big(delta * (n + 2))).max(BigUint::one()) - BigUint::one();
    IlDegree { value, rounded }
}

/// `(delta + d)^(8(m+n)^2) (m+n)^(8(m+n)^3)`.
pub fn mult0_rough(p: &BoundParams) -> BoundExpr {
    let mn = p.mn();
    pw(p.delta + p.d, &big(8 * mn * mn)).mul(&pw(mn, &big(8 * mn * mn * mn)))
}

/// Rough bound with a symbolic degree.
pub fn mult0_rough_expr(m: u64, n: u64, delta: u64, d: &BoundExpr) -> BoundExpr {
    let mn = m + n;
    let (s, _) = d.add_upper(&BoundExpr::from_u64(delta), SYMBOLIC_SUM_DIGITS);
    s.pow(&big(8 * mn * mn)).mul(&pw(mn, &big(8 * mn * mn * mn)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MultMode {
    Rough,
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct GkMultReport {
    pub q_lo: String,
    pub q_hi: String,
    pub q_exact: bool,
    /// Smallest integer at least the upper end of the `Q` enclosure.
    pub q_ceil: String,
    #[serde(serialize_with = "ser_bound")]
    pub first: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub second: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub bound: BoundExpr,
    pub precision: u32,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ser_bound<S: serde::Serializer>(b: &BoundExpr, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&b.to_string())
}

/// Enclosure of `Q = e n (e (n+m) / sqrt n)^(ln n + 1) (n / e^2)^n`, evaluated
/// as `exp(ln n + 2 - 2n) n^(n+1) ((n+m)/sqrt n)^(ln n + 1)`.
pub fn gk_q(m: u64, n: u64, prec: u32) -> Interval {
    let nq = Rational::from_integer(BigInt::from(n));
    let ln_n = interval::ln(&nq, prec + 16);
    let shift = Rational::from_integer(BigInt::from(2) - BigInt::from(2 * n));
    let e_part = interval::exp_interval(&ln_n.add(&Interval::point(shift)), prec + 16);
    let npow = Interval::point(Rational::from_integer(BigInt::from(num_traits::pow(big(n), (n + 1) as usize))));
    let base = Interval::point(Rational::from_integer(BigInt::from(n + m))).div(&interval::sqrt(&nq, prec + 16));
    let ratio_part = interval::pow(&base, &ln_n.add(&Interval::integer(1)), prec + 16);
    e_part.mul(&npow).mul(&ratio_part).round_outward(prec)
}

fn gk_numbers(p: &BoundParams, q: &Rational) -> (Rational, Rational) {
    let (m, n, delta, d) = (p.m, p.n, p.delta, p.d);
    let e = (2 * (m + n)) as usize;
    let bracket = big(2 * delta * (n + m + 2)) - big(2 * m + 2);
    let x = big((m + 1) * (delta - 1)) * num_traits::pow(bracket, (2 * m + 2) as usize) + big(2 * delta * (n + 2))
        - big(2);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let xr = Rational::from_integer(BigInt::from(x));
    let first = &half * q * num_traits::pow(xr, e);
    let nr = Rational::from_integer(BigInt::from(n));
    let inner = Rational::from_integer(BigInt::from(2))
        * num_traits::pow(q + &nr, n as usize)
        * (Rational::from_integer(BigInt::from(d)) + q * Rational::from_integer(BigInt::from(delta - 1)));
    let second = &half * q * num_traits::pow(inner, e);
    (first, second)
}

fn ceil_bound(q: &Rational) -> BoundExpr {
    BoundExpr::from_biguint(&q.ceil().to_integer().to_biguint().unwrap_or_default())
}

/// Certified upper bound on the larger of the two exact multiplicity
/// numbers, with `Q` enclosed at `prec` bits and rounded up.
pub fn mult0_exact(p: &BoundParams, prec: u32) -> GkMultReport {
    let q = gk_q(p.m, p.n, prec);
    let (first, second, q_exact) = match q.as_point() {
        Some(qv) => {
            // keep the perfect-power structure when Q is exact
            let (m, n, delta) = (p.m, p.n, p.delta);
            let e = big(2 * (m + n));
            let bracket = big(2 * delta * (n + m + 2)) - big(2 * m + 2);
            let x = big((m + 1) * (delta - 1)) * num_traits::pow(bracket, (2 * m + 2) as usize)
                + big(2 * delta * (n + 2))
                - big(2);
            let half_q = qv / Rational::from_integer(BigInt::from(2));
            let first = BoundExpr::power(&x, &e).scale(&half_q);
            let (_, s) = gk_numbers(p, qv);
            (first, BoundExpr::from_rational(&s), true)
        }
        None => {
            let (f, s) = gk_numbers(p, q.hi());
            (ceil_bound(&f), ceil_bound(&s), false)
        }
    };
    let bound = first.maximum(&second);
    GkMultReport {
        q_lo: q.lo().to_string(),
        q_hi: q.hi().to_string(),
        q_exact,
        q_ceil: q.hi().ceil().to_integer().to_string(),
        first,
        second,
        bound,
        precision: prec,
    }
}

pub fn mult0_bound(p: &BoundParams, mode: MultMode, prec: u32) -> BoundExpr {
    match mode {
        MultMode::Rough => mult0_rough(p),
        MultMode::Exact => mult0_exact(p, prec).bound,
    }
}

/// Compares the exact multiplicity bound with the rough one. Fails when the
/// `Q` enclosure at `prec` bits straddles the comparison.
pub fn compare_exact_to_rough(p: &BoundParams, prec: u32) -> Result<Ordering> {
    let q = gk_q(p.m, p.n, prec);
    let rough = mult0_rough(p);
    let at = |qv: &Rational| {
        let (f, s) = gk_numbers(p, qv);
        BoundExpr::from_rational(&f).maximum(&BoundExpr::from_rational(&s)).cmp(&rough)
    };
    let lo = at(q.lo());
    let hi = at(q.hi());
    if lo == hi {
        Ok(lo)
    } else {
        Err(Error::PrecisionInsufficient { bits: prec })
    }
}

/// `(max{d, delta} (m+n))^(16 (m+n)^(20n+3))`.
pub fn main_bound(p: &BoundParams) -> BoundExpr {
    let mn = p.mn();
    let exp = big(16) * num_traits::pow(big(mn), (20 * p.n + 3) as usize);
    pw(p.d.max(p.delta) * mn, &exp)
}

/// Main bound evaluated at degree `2(d + delta - 1)`.
pub fn loja_exponent_bound(p: &BoundParams) -> BoundExpr {
    let q = BoundParams {
        d: 2 * (p.d + p.delta - 1),
        ..*p
    };
    let mn = p.mn();
    let exp = big(16) * num_traits::pow(big(mn), (20 * p.n + 3) as usize);
    pw(q.d * mn, &exp)
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InductionReport {
    pub params: BoundParams,
    /// False when the quantities are certified upper bounds, not exact values.
    pub exact: bool,
    #[serde(serialize_with = "ser_bound")]
    pub c: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub k: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub b: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub d_il: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub d_m_k: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub d_m_b: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub d_ni: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub d_h: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub d_e: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub a: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub d_prime: BoundExpr,
    pub verdicts: Vec<Verdict>,
}

struct Quantities {
    c: BoundExpr,
    k: BoundExpr,
    d_il: BoundExpr,
    d_m_k: BoundExpr,
    d_m_b: BoundExpr,
    d_ni: BoundExpr,
    d_h: BoundExpr,
    d_e: BoundExpr,
    a: BoundExpr,
    d_prime: BoundExpr,
}

/// Exact integer evaluation. `k = B` is the largest integer strictly below
/// the rough bound `C`.
fn quantities_exact(p: &BoundParams, c_int: &BigUint) -> Quantities {
    let (m, n, delta) = (p.m, p.n, p.delta);
    let mn = (m + n) as usize;
    let k = c_int - BigUint::one();
    let d = big(p.d);
    let d_il = il_degree(m, n, delta).value;
    let d_m_k = deg_after_mo(n, delta, &d, &k);
    let d_m_b = d_m_k.clone();
    let d_ni = d_il.clone().max(d_m_k.clone());
    let d_h = (&k + BigUint::one()) * &d_m_k;
    let d_e = num_traits::pow(d_ni.clone(), 2 * mn) + &d_h;
    let a = num_traits::pow(d_ni.clone().max(d_m_b.clone()), mn);
    let d_prime = (&a * &d_e + &k) * (&k + BigUint::one()) + big(m + n);
    let e = |v: &BigUint| BoundExpr::from_biguint(v);
    Quantities {
        c: mult0_rough(p),
        k: e(&k),
        d_il: e(&d_il),
        d_m_k: e(&d_m_k),
        d_m_b: e(&d_m_b),
        d_ni: e(&d_ni),
        d_h: e(&d_h),
        d_e: e(&d_e),
        a: e(&a),
        d_prime: e(&d_prime),
    }
}

/// Certified upper bounds with a symbolic degree `d`: uses `k <= C`,
/// `C(n+k, n) <= (k+1)^n` and drops the `-k` of `d_M`.
fn quantities_upper(m: u64, n: u64, delta: u64, d: &BoundExpr) -> Quantities {
    let mn = m + n;
    let cap = SYMBOLIC_SUM_DIGITS;
    let c = mult0_rough_expr(m, n, delta, d);
    let k = c.clone();
    let d_il = BoundExpr::from_biguint(&il_degree(m, n, delta).value);
    let d_m_k = deg_after_mo_upper(n, delta, d, &k);
    let d_m_b = d_m_k.clone();
    let d_ni = d_il.maximum(&d_m_k);
    let (k1, _) = k.add_upper(&BoundExpr::one(), cap);
    let d_h = k1.mul(&d_m_k);
    let (d_e, _) = d_ni.pow_u64(2 * mn).add_upper(&d_h, cap);
    let a = d_ni.maximum(&d_m_b).pow_u64(mn);
    let (inner, _) = a.mul(&d_e).add_upper(&k, cap);
    let (d_prime, _) = inner.mul(&k1).add_upper(&BoundExpr::from_u64(mn), cap);
    Quantities {
        c,
        k,
        d_il,
        d_m_k,
        d_m_b,
        d_ni,
        d_h,
        d_e,
        a,
        d_prime,
    }
}

fn verdicts(p: &BoundParams, q: &Quantities) -> Vec<Verdict> {
    let mn = p.mn();
    let c = &q.c;
    let cpow = |e: u64| c.pow_u64(e);
    let one = BoundExpr::one();
    let (k1, _) = q.k.add_upper(&one, DEFAULT_DIGIT_CAP);
    let mut out = Vec::new();
    let mut push = |name: &str, holds: bool| {
        out.push(Verdict {
            name: name.to_string(),
            holds,
        })
    };
    push("B <= C", q.k <= *c);
    push("k + 1 <= C", k1 <= *c);
    push(
        "d_M(n,delta,d,B) < C^(n+1) (d+delta)",
        q.d_m_b < cpow(p.n + 1).mul(&BoundExpr::from_u64(p.d + p.delta)),
    );
    let il_rhs = BoundExpr::power(&big(p.delta), &big(2 * mn)).mul(&pw(mn, &big(6 * mn)));
    push("d_IL < delta^(2(m+n)) (m+n)^(6(m+n))", q.d_il < il_rhs);
    push("d_NI < C^(m+n)", q.d_ni < cpow(mn));
    push("A < C^((m+n)^2)", q.a < cpow(mn * mn));
    push("d_H < C^(m+n)", q.d_h < cpow(mn));
    push("d_E < C^(2(m+n)^2)", q.d_e < cpow(2 * mn * mn));
    let chain_mid = {
        let (s, _) = cpow(3 * mn * mn).add_upper(c, DEFAULT_DIGIT_CAP);
        let (t, exact) = s.mul(c).add_upper(&BoundExpr::from_u64(mn), DEFAULT_DIGIT_CAP);
        (t, exact)
    };
    push("d' < (C^(3(m+n)^2) + C) C + m + n", q.d_prime < chain_mid.0);
    push(
        "(C^(3(m+n)^2) + C) C + m + n < C^(4(m+n)^2)",
        chain_mid.1 && chain_mid.0 < cpow(4 * mn * mn),
    );
    push("d' < C^(4(m+n)^2)", q.d_prime < cpow(4 * mn * mn));
    let fin = final_degree_rhs(p);
    push(
        "C^(4(m+n)^2) <= max(d,delta)^(32(m+n)^4) (m+n)^(40(m+n)^5)",
        cpow(4 * mn * mn) <= fin,
    );
    push("d' <= max(d,delta)^(32(m+n)^4) (m+n)^(40(m+n)^5)", q.d_prime <= fin);
    out
}

/// `max{d, delta}^(32(m+n)^4) (m+n)^(40(m+n)^5)`.
pub fn final_degree_rhs(p: &BoundParams) -> BoundExpr {
    let mn = p.mn();
    pw(p.d.max(p.delta), &big(32 * mn.pow(4))).mul(&pw(mn, &big(40 * mn.pow(5))))
}

/// One induction step `d -> d'` with every intermediate degree and the
/// verdict of each inequality used to bound `d'`.
pub fn induction_degree(p: &BoundParams) -> InductionReport {
    let c = mult0_rough(p);
    let mn = p.mn();
    let exact_feasible = c.digit_estimate().saturating_mul(4 * mn * mn) <= DEFAULT_DIGIT_CAP;
    let (q, exact) = match (exact_feasible, c.expand_ceil(DEFAULT_DIGIT_CAP)) {
        (true, Some(ci)) => (quantities_exact(p, &ci), true),
        _ => (quantities_upper(p.m, p.n, p.delta, &BoundExpr::from_u64(p.d)), false),
    };
    let verdicts = verdicts(p, &q);
    InductionReport {
        params: *p,
        exact,
        b: q.k.clone(),
        c: q.c,
        k: q.k,
        d_il: q.d_il,
        d_m_k: q.d_m_k,
        d_m_b: q.d_m_b,
        d_ni: q.d_ni,
        d_h: q.d_h,
        d_e: q.d_e,
        a: q.a,
        d_prime: q.d_prime,
        verdicts,
    }
}

pub fn verify_main_proof_chain(p: &BoundParams) -> Vec<Verdict> {
    induction_degree(p).verdicts
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    pub e: u64,
    #[serde(serialize_with = "ser_bounds")]
    pub degrees: Vec<BoundExpr>,
    #[serde(serialize_with = "ser_bound")]
    pub final_bound: BoundExpr,
    #[serde(serialize_with = "ser_bound")]
    pub main_bound: BoundExpr,
    pub within_main_bound: bool,
}

fn ser_bounds<S: serde::Serializer>(v: &[BoundExpr], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

/// Applies the induction step `e` times (exactly for the first step, as
/// certified upper bounds afterwards) and closes with the rough bound.
pub fn induction_ladder(p: &BoundParams, e: u64) -> Result<LadderReport> {
    if e > p.n {
        return Err(Error::Invalid(format!("ladder length {e} exceeds n = {}", p.n)));
    }
    let mut degrees = vec![BoundExpr::from_u64(p.d)];
    if e >= 1 {
        degrees.push(induction_degree(p).d_prime);
    }
    for _ in 1..e {
        let d = degrees.last().unwrap();
        let next = quantities_upper(p.m, p.n, p.delta, d).d_prime;
        degrees.push(next);
    }
    let final_bound = mult0_rough_expr(p.m, p.n, p.delta, degrees.last().unwrap());
    let main = main_bound(p);
    Ok(LadderReport {
        e,
        within_main_bound: final_bound <= main,
        degrees,
        final_bound,
        main_bound: main,
    })
}

/// Decimal digits of a bound, as a certified `log10` enclosure.
pub fn log10_enclosure(b: &BoundExpr) -> Option<(f64, f64)> {
    b.log10_f64()
}

/// Nonnegative integer from a bound, if it fits in `u64`.
pub fn as_u64(b: &BoundExpr) -> Option<u64> {
    b.expand_ceil(40)?.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(m: u64, n: u64, delta: u64, d: u64) -> BoundParams {
        BoundParams::new(m, n, delta, d).unwrap()
    }

    #[test]
    fn d_m_values() {
        assert_eq!(deg_after_mo_u64(1, 2, 3, 2), big(19));
        assert_eq!(deg_after_mo_u64(2, 1, 2, 1), big(8));
        assert_eq!(deg_after_mo_u64(3, 5, 7, 0), big(7));
    }

    #[test]
    fn il_degree_values() {
        assert_eq!(il_degree(1, 1, 2).value, big(20741));
        assert_eq!(il_degree(0, 1, 2).value, big(55));
        for m in 1..=3 {
            for n in 1..=3 {
                assert_eq!(il_degree(m, n, 1), IlDegree { value: big(n + 1), rounded: false });
            }
        }
    }

    #[test]
    fn rough_values() {
        assert_eq!(mult0_rough(&bp(1, 1, 2, 2)).to_string(), "2^128");
        assert_eq!(mult0_rough(&bp(0, 1, 1, 1)), BoundExpr::from_u64(256));
    }

    #[test]
    fn exact_gk_value() {
        let r = mult0_exact(&bp(1, 1, 2, 2), 128);
        assert!(r.q_exact);
        assert_eq!(r.q_lo, "2");
        assert_eq!(r.bound.to_string(), "41482^4");
        assert_eq!(r.second, BoundExpr::from_u64(24u64.pow(4)));
    }

    #[test]
    fn q_for_n1_is_m_plus_one() {
        for m in 0..5 {
            let q = gk_q(m, 1, 64);
            assert_eq!(q.as_point(), Some(&Rational::from_integer(BigInt::from(m + 1))));
        }
    }

    #[test]
    fn q_for_n2_is_enclosed() {
        let q = gk_q(1, 2, 128);
        let (lo, hi) = (crate::algebra::rational_to_f64(q.lo()), crate::algebra::rational_to_f64(q.hi()));
        let n: f64 = 2.0;
        let e = std::f64::consts::E;
        let f = e * n * (e * 3.0 / n.sqrt()).powf(n.ln() + 1.0) * (n / (e * e)).powi(2);
        assert!(lo <= f * (1.0 + 1e-12) && f * (1.0 - 1e-12) <= hi);
        assert!(hi - lo < 1e-20);
        assert!(compare_exact_to_rough(&bp(1, 2, 2, 2), 128).is_ok());
    }

    #[test]
    fn main_and_loja_values() {
        assert_eq!(main_bound(&bp(1, 1, 2, 2)).to_string(), "2^268435456");
        assert_eq!(main_bound(&bp(1, 1, 1, 1)).to_string(), "2^134217728");
        assert_eq!(loja_exponent_bound(&bp(1, 1, 2, 2)).to_string(), "12^134217728");
        assert_eq!(loja_exponent_bound(&bp(1, 1, 1, 1)), pw(4, &big(134_217_728)));
        assert_eq!(loja_exponent_bound(&bp(0, 1, 1, 1)), BoundExpr::from_u64(65536));
    }

    #[test]
    fn induction_first_step_by_substitution() {
        let r = induction_degree(&bp(1, 1, 2, 2));
        assert!(r.exact);
        let k = num_traits::pow(big(2), 128) - BigUint::one();
        let dm = big(2) * &k * &k + big(3) * &k + big(2);
        assert_eq!(r.d_m_k, BoundExpr::from_biguint(&dm));
        assert_eq!(r.d_ni, BoundExpr::from_biguint(&dm));
        let a = &dm * &dm;
        let d_h = (&k + 1u32) * &dm;
        let d_e = num_traits::pow(dm.clone(), 4) + &d_h;
        let d_prime = (&a * &d_e + &k) * (&k + 1u32) + 2u32;
        assert_eq!(r.d_prime, BoundExpr::from_biguint(&d_prime));
        let last = r.verdicts.last().unwrap();
        assert!(last.holds, "{}", last.name);
    }

    #[test]
    fn small_induction_values() {
        let k = big(256);
        assert_eq!(deg_after_mo(1, 1, &big(1), &k), big(65793));
        let k2 = num_traits::pow(big(2), 128);
        assert_eq!(
            deg_after_mo(1, 2, &big(2), &k2),
            big(2) * &k2 * &k2 + big(3) * &k2 + big(2)
        );
    }

    #[test]
    fn ladder_stays_below_main_bound() {
        let r = induction_ladder(&bp(1, 1, 2, 2), 1).unwrap();
        assert!(r.within_main_bound);
        let r0 = induction_ladder(&bp(1, 1, 2, 2), 0).unwrap();
        assert_eq!(r0.final_bound, mult0_rough(&bp(1, 1, 2, 2)));
    }
}
