//! Exact power products `c * prod(b_i ^ e_i)` for bounds too large to expand.
//!
//! Ordering is decided exactly: both sides are rewritten over a common
//! pairwise-coprime basis (where the representation is unique), and the sign
//! of `sum E_j ln c_j` is then certified with interval logarithms whose
//! precision is doubled until the enclosure excludes zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{self, Interval};
use super::scalar::{rational_to_f64, Rational};

/// Default cap (in decimal digits) for eager expansion.
pub const DEFAULT_DIGIT_CAP: u64 = 1_000_000;

/// Bases below this bound are stored fully factored into primes.
const FACTOR_LIMIT: u64 = 1 << 32;

/// Comparisons expand both sides exactly when each has at most this many bits.
const EXACT_CMP_BITS: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct BoundExpr {
    coeff: Rational,
    factors: BTreeMap<BigUint, BigUint>,
}

impl BoundExpr {
    pub fn zero() -> BoundExpr {
        BoundExpr {
            coeff: Rational::zero(),
            factors: BTreeMap::new(),
        }
    }

    pub fn one() -> BoundExpr {
        BoundExpr::from_u64(1)
    }

    pub fn from_u64(n: u64) -> BoundExpr {
        BoundExpr::from_biguint(&BigUint::from(n))
    }

    pub fn from_biguint(n: &BigUint) -> BoundExpr {
        BoundExpr::power(n, &BigUint::one())
    }

    /// Nonnegative rational value.
    pub fn from_rational(q: &Rational) -> BoundExpr {
        assert!(!q.is_negative(), "bound expressions are nonnegative");
        if q.is_zero() {
            return BoundExpr::zero();
        }
        let mut b = BoundExpr::from_biguint(q.numer().magnitude());
        b.coeff = Rational::new(BigInt::one(), q.denom().clone());
        b
    }

    /// `base^exp` without expansion.
    pub fn power(base: &BigUint, exp: &BigUint) -> BoundExpr {
        let mut b = BoundExpr::one_raw();
        if exp.is_zero() {
            return b;
        }
        if base.is_zero() {
            return BoundExpr::zero();
        }
        b.push_factor(base, exp);
        b
    }

    fn one_raw() -> BoundExpr {
        BoundExpr {
            coeff: Rational::one(),
            factors: BTreeMap::new(),
        }
    }

    fn push_factor(&mut self, base: &BigUint, exp: &BigUint) {
        if base.is_one() || exp.is_zero() {
            return;
        }
        if let Some(small) = base.to_u64().filter(|&b| b < FACTOR_LIMIT) {
            for (p, k) in factor_u64(small) {
                *self
                    .factors
                    .entry(BigUint::from(p))
                    .or_insert_with(BigUint::zero) += exp * BigUint::from(k);
            }
        } else {
            *self.factors.entry(base.clone()).or_insert_with(BigUint::zero) += exp;
        }
    }

    pub fn coefficient(&self) -> &Rational {
        &self.coeff
    }

    /// `(base, exponent)` factors in ascending base order.
    pub fn factors(&self) -> impl Iterator<Item = (&BigUint, &BigUint)> {
        self.factors.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn mul(&self, o: &BoundExpr) -> BoundExpr {
        if self.is_zero() || o.is_zero() {
            return BoundExpr::zero();
        }
        let mut r = self.clone();
        r.coeff = &r.coeff * &o.coeff;
        for (b, e) in &o.factors {
            *r.factors.entry(b.clone()).or_insert_with(BigUint::zero) += e;
        }
        r
    }

    pub fn pow(&self, k: &BigUint) -> BoundExpr {
        if k.is_zero() {
            return BoundExpr::one();
        }
        if self.is_zero() {
            return BoundExpr::zero();
        }
        let mut r = BoundExpr::one_raw();
        if let Some(ku) = k.to_u32() {
            r.coeff = num_traits::pow(self.coeff.clone(), ku as usize);
        } else {
            // the coefficient is folded into factors so that huge powers stay symbolic
            r.push_factor(self.coeff.numer().magnitude(), k);
            assert!(
                self.coeff.denom().is_one(),
                "huge powers of fractional coefficients are not supported"
            );
        }
        for (b, e) in &self.factors {
            *r.factors.entry(b.clone()).or_insert_with(BigUint::zero) += e * k;
        }
        r
    }

    pub fn pow_u64(&self, k: u64) -> BoundExpr {
        self.pow(&BigUint::from(k))
    }

    pub fn scale(&self, q: &Rational) -> BoundExpr {
        self.mul(&BoundExpr::from_rational(q))
    }

    pub fn maximum(&self, o: &BoundExpr) -> BoundExpr {
        if self.cmp_exact(o) == Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    /// Exact sum when both operands expand below `digit_cap` decimal digits;
    /// otherwise the certified upper bound `2 max(a, b)`. The flag is `true`
    /// when the result is exact.
    pub fn add_upper(&self, o: &BoundExpr, digit_cap: u64) -> (BoundExpr, bool) {
        if self.is_zero() {
            return (o.clone(), true);
        }
        if o.is_zero() {
            return (self.clone(), true);
        }
        if let (Some(a), Some(b)) = (self.expand(digit_cap), o.expand(digit_cap)) {
            return (BoundExpr::from_rational(&(a + b)), true);
        }
        (self.maximum(o).mul(&BoundExpr::from_u64(2)), false)
    }

    /// Upper estimate of the number of decimal digits of the value.
    pub fn digit_estimate(&self) -> u64 {
        let mut bits: f64 = self.coeff.numer().bits() as f64;
        for (b, e) in &self.factors {
            bits += b.bits() as f64 * e.to_f64().unwrap_or(f64::INFINITY);
        }
        (bits * std::f64::consts::LOG10_2).ceil().min(u64::MAX as f64) as u64 + 1
    }

    /// Full value when it has at most `digit_cap` digits.
    pub fn expand(&self, digit_cap: u64) -> Option<Rational> {
        if self.digit_estimate() > digit_cap {
            return None;
        }
        let mut v = BigUint::one();
        for (b, e) in &self.factors {
            v *= num_traits::pow(b.clone(), e.to_usize()?);
        }
        Some(&self.coeff * Rational::from_integer(BigInt::from_biguint(Sign::Plus, v)))
    }

    /// Expanded integer value (rounded up if the coefficient is fractional).
    pub fn expand_ceil(&self, digit_cap: u64) -> Option<BigUint> {
        let v = self.expand(digit_cap)?;
        Some(v.ceil().to_integer().to_biguint().unwrap_or_default())
    }

    /// Certified enclosure of the natural logarithm; `None` for zero.
    pub fn ln_enclosure(&self, prec: u32) -> Option<Interval> {
        if self.is_zero() {
            return None;
        }
        let mut acc = interval::ln(&self.coeff, prec + 8);
        for (b, e) in &self.factors {
            let l = interval::ln(&Rational::from_integer(BigInt::from_biguint(Sign::Plus, b.clone())), prec + 8 + e.bits() as u32);
            acc = acc.add(&l.scale(&Rational::from_integer(BigInt::from_biguint(Sign::Plus, e.clone()))));
        }
        Some(acc)
    }

    /// Certified enclosure of `log10` of the value.
    pub fn log10_enclosure(&self, prec: u32) -> Option<Interval> {
        let l = self.ln_enclosure(prec + 8)?;
        let ln10 = interval::ln(&Rational::from_integer(10.into()), prec + 8 + self.digit_estimate().max(1).ilog2());
        Some(l.div(&ln10).round_outward(prec))
    }

    /// `log10` enclosure as outward-rounded doubles.
    pub fn log10_f64(&self) -> Option<(f64, f64)> {
        let i = self.log10_enclosure(64)?;
        let lo = rational_to_f64(i.lo());
        let hi = rational_to_f64(i.hi());
        Some((next_down(lo), next_up(hi)))
    }

    /// Exact total order on nonnegative values.
    pub fn cmp_exact(&self, o: &BoundExpr) -> Ordering {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        // self / o = prod(c_j ^ E_j) over a coprime basis
        let mut signed: Vec<(BigUint, BigInt)> = Vec::new();
        let push = |v: &mut Vec<(BigUint, BigInt)>, b: &BigUint, e: BigInt| {
            if !b.is_one() {
                v.push((b.clone(), e));
            }
        };
        push(&mut signed, self.coeff.numer().magnitude(), BigInt::one());
        push(&mut signed, self.coeff.denom().magnitude(), -BigInt::one());
        push(&mut signed, o.coeff.numer().magnitude(), -BigInt::one());
        push(&mut signed, o.coeff.denom().magnitude(), BigInt::one());
        for (b, e) in &self.factors {
            push(&mut signed, b, BigInt::from_biguint(Sign::Plus, e.clone()));
        }
        for (b, e) in &o.factors {
            push(&mut signed, b, -BigInt::from_biguint(Sign::Plus, e.clone()));
        }
        let basis = coprime_basis(signed.iter().map(|(b, _)| b.clone()).collect());
        let mut exps: Vec<BigInt> = vec![BigInt::zero(); basis.len()];
        for (b, e) in &signed {
            let mut rest = b.clone();
            for (j, c) in basis.iter().enumerate() {
                let mut k = 0u64;
                while (&rest % c).is_zero() {
                    rest /= c;
                    k += 1;
                }
                if k > 0 {
                    exps[j] += e * BigInt::from(k);
                }
            }
            debug_assert!(rest.is_one());
        }
        let pairs: Vec<(BigUint, BigInt)> = basis
            .into_iter()
            .zip(exps)
            .filter(|(_, e)| !e.is_zero())
            .collect();
        if pairs.is_empty() {
            return Ordering::Equal;
        }
        if pairs.iter().all(|(_, e)| e.is_positive()) {
            return Ordering::Greater;
        }
        if pairs.iter().all(|(_, e)| e.is_negative()) {
            return Ordering::Less;
        }
        let side_bits = |positive: bool| -> f64 {
            pairs
                .iter()
                .filter(|(_, e)| e.is_positive() == positive)
                .map(|(b, e)| b.bits() as f64 * e.abs().to_f64().unwrap_or(f64::INFINITY))
                .sum()
        };
        if side_bits(true) <= EXACT_CMP_BITS as f64 && side_bits(false) <= EXACT_CMP_BITS as f64 {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for (b, e) in &pairs {
                let k = e.abs().to_usize().unwrap();
                if e.is_positive() {
                    num *= num_traits::pow(b.clone(), k);
                } else {
                    den *= num_traits::pow(b.clone(), k);
                }
            }
            return num.cmp(&den);
        }
        let max_exp_bits = pairs.iter().map(|(_, e)| e.bits()).max().unwrap_or(0) as u32;
        let mut prec = 64u32;
        loop {
            let mut acc = Interval::integer(0);
            for (b, e) in &pairs {
                let l = interval::ln(
                    &Rational::from_integer(BigInt::from_biguint(Sign::Plus, b.clone())),
                    prec + max_exp_bits + 8,
                );
                acc = acc.add(&l.scale(&Rational::from_integer(e.clone())));
            }
            match acc.sign() {
                Some(Ordering::Equal) | None => {}
                Some(s) => return s,
            }
            // multiplicatively independent bases: the log sum is nonzero
            prec *= 2;
            assert!(prec < (1 << 24), "log comparison failed to separate");
        }
    }

    /// Canonical power-product string, e.g. `2^1792 * 3^5` or `12^134217728`.
    pub fn to_power_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        if !self.coeff.is_one() || self.factors.is_empty() {
            parts.push(self.coeff.to_string());
        }
        // merge the small-prime part into a single perfect power when possible
        let small: Vec<(&BigUint, &BigUint)> = self
            .factors
            .iter()
            .filter(|(b, _)| b.to_u64().is_some_and(|b| b < FACTOR_LIMIT))
            .collect();
        let big: Vec<(&BigUint, &BigUint)> = self
            .factors
            .iter()
            .filter(|(b, _)| !b.to_u64().is_some_and(|b| b < FACTOR_LIMIT))
            .collect();
        if small.len() > 1 {
            let g = small
                .iter()
                .fold(BigUint::zero(), |g, (_, e)| g.gcd(e));
            let mut root = BigUint::one();
            let mut fits = true;
            for (b, e) in &small {
                let k = (*e / &g).to_u32().unwrap_or(u32::MAX);
                if k > 64 {
                    fits = false;
                    break;
                }
                root *= num_traits::pow((*b).clone(), k as usize);
                if root.bits() > 63 {
                    fits = false;
                    break;
                }
            }
            if fits {
                parts.push(fmt_factor(&root, &g));
            } else {
                parts.extend(small.iter().map(|(b, e)| fmt_factor(b, e)));
            }
        } else {
            parts.extend(small.iter().map(|(b, e)| fmt_factor(b, e)));
        }
        parts.extend(big.iter().map(|(b, e)| fmt_factor(b, e)));
        parts.join(" * ")
    }
}

fn fmt_factor(b: &BigUint, e: &BigUint) -> String {
    if e.is_one() {
        b.to_string()
    } else {
        format!("{b}^{e}")
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_power_string())
    }
}

impl PartialEq for BoundExpr {
    fn eq(&self, o: &Self) -> bool {
        self.cmp_exact(o) == Ordering::Equal
    }
}

impl Eq for BoundExpr {}

impl PartialOrd for BoundExpr {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for BoundExpr {
    fn cmp(&self, o: &Self) -> Ordering {
        self.cmp_exact(o)
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    let y = x + x.abs() * 4.0 * f64::EPSILON;
    if y == x {
        x + f64::MIN_POSITIVE
    } else {
        y
    }
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Trial-division factorization of a small integer.
fn factor_u64(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Refines a list of integers `> 1` into a pairwise-coprime basis such that
/// every input is a product of powers of basis elements.
pub fn coprime_basis(nums: Vec<BigUint>) -> Vec<BigUint> {
    let mut basis: Vec<BigUint> = Vec::new();
    let mut work: Vec<BigUint> = nums.into_iter().filter(|n| n > &BigUint::one()).collect();
    'outer: while let Some(x) = work.pop() {
        if x.is_one() {
            continue;
        }
        for i in 0..basis.len() {
            let g = basis[i].gcd(&x);
            if g.is_one() {
                continue;
            }
            if g == basis[i] && g == x {
                continue 'outer;
            }
            let b = basis.swap_remove(i);
            let bg = &b / &g;
            let xg = &x / &g;
            work.push(g);
            work.push(bg);
            work.push(xg);
            continue 'outer;
        }
        basis.push(x);
    }
    basis.sort();
    basis.dedup();
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::ratio;

    fn pw(b: u64, e: u64) -> BoundExpr {
        BoundExpr::power(&BigUint::from(b), &BigUint::from(e))
    }

    #[test]
    fn same_base_exponent_comparison() {
        assert_eq!(pw(2, 1792).cmp(&pw(2, 1412)), Ordering::Greater);
    }

    #[test]
    fn rewritten_bases_are_equal() {
        assert_eq!(pw(4, 32).mul(&pw(2, 64)).cmp(&pw(2, 128)), Ordering::Equal);
        assert_eq!(pw(4, 32).mul(&pw(2, 64)).to_string(), "2^128");
    }

    #[test]
    fn small_values_compare_by_expansion() {
        assert_eq!(pw(3, 5).cmp(&pw(2, 8)), Ordering::Less);
    }

    #[test]
    fn huge_values_compare_by_logs() {
        // 3^(10^9) vs 2^(1584962501): log2 3 * 1e9 = 1584962500.7...
        let a = pw(3, 1_000_000_000);
        assert_eq!(a.cmp(&pw(2, 1_584_962_501)), Ordering::Less);
        assert_eq!(a.cmp(&pw(2, 1_584_962_500)), Ordering::Greater);
    }

    #[test]
    fn display_merges_perfect_powers() {
        assert_eq!(pw(12, 134_217_728).to_string(), "12^134217728");
        assert_eq!(pw(2, 1792).mul(&pw(3, 5)).to_string(), "2^1792 * 3^5");
        assert_eq!(pw(41482, 4).to_string(), "41482^4");
        assert_eq!(BoundExpr::from_rational(&ratio(3, 2)).to_string(), "1/2 * 3");
    }

    #[test]
    fn coprime_basis_splits_shared_factors() {
        let b = coprime_basis(vec![BigUint::from(12u32), BigUint::from(18u32), BigUint::from(35u32)]);
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                assert!(b[i].gcd(&b[j]).is_one());
            }
        }
    }

    #[test]
    fn big_bases_are_compared_exactly() {
        let big = BigUint::from(10u32).pow(40) + 7u32;
        let a = BoundExpr::power(&(&big * &big), &BigUint::from(3u32));
        let b = BoundExpr::power(&big, &BigUint::from(6u32));
        assert_eq!(a.cmp(&b), Ordering::Equal);
        let c = BoundExpr::power(&(&big + 1u32), &BigUint::from(6u32));
        assert_eq!(a.cmp(&c), Ordering::Less);
    }

    #[test]
    fn log10_of_main_bound_size() {
        let (lo, hi) = pw(2, 268_435_456).log10_f64().unwrap();
        let v = 268_435_456.0 * std::f64::consts::LOG10_2;
        assert!(lo <= v && v <= hi && hi - lo < 1e-6);
    }

    #[test]
    fn add_upper_is_exact_when_small() {
        let (s, exact) = pw(2, 10).add_upper(&pw(3, 2), DEFAULT_DIGIT_CAP);
        assert!(exact);
        assert_eq!(s, BoundExpr::from_u64(1033));
        let (u, exact) = pw(2, 10_000_000).add_upper(&pw(3, 2), 1000);
        assert!(!exact);
        assert_eq!(u, pw(2, 10_000_001));
    }
}
