//! Rational Newton–Puiseux expansion of plane curve germs.
//!
//! Each step picks an edge of the Newton polygon with slope `p/q` and a root
//! `xi` of its characteristic polynomial, then substitutes
//! `x = xi^v X^q`, `y = X^p (xi^u + Y)` with `u q - v p = 1`. Coefficients
//! stay in the base field, so every branch comes out as a parametrization
//! `x = a t^e`, `y = S(t)` with `e` its ramification index.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{rational_to_f64, Rational};
use crate::numeric::univariate_roots;

/// Coefficient field for the expansion.
pub trait PuiseuxField:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// True for floating-point fields.
    const APPROXIMATE: bool;
    fn zero_k() -> Self;
    fn one_k() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn inv(&self) -> Self;
    fn magnitude(&self) -> f64;
    /// Exact zero test, or a relative tolerance test against `scale`.
    fn negligible(&self, scale: f64) -> bool;
    /// Nonzero roots with multiplicities of `sum c_k T^k`, or `None` if the
    /// polynomial does not split over the field.
    fn nonzero_roots(coeffs: &[Self]) -> Option<Vec<(Self, usize)>>;
    fn to_c64(&self) -> Complex64;

    fn ipow(&self, k: u64) -> Self {
        let mut r = Self::one_k();
        for _ in 0..k {
            r = r * self.clone();
        }
        r
    }
}

impl PuiseuxField for Rational {
    const APPROXIMATE: bool = false;
    fn zero_k() -> Self {
        Zero::zero()
    }
    fn one_k() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn nonzero_roots(coeffs: &[Self]) -> Option<Vec<(Self, usize)>> {
        rational_roots(coeffs)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

/// Relative tolerance for treating a floating coefficient as zero.
pub const COMPLEX_TOL: f64 = 1e-9;
/// Roots closer than this (relative) are merged into one multiple root.
pub const CLUSTER_TOL: f64 = 1e-5;

impl PuiseuxField for Complex64 {
    const APPROXIMATE: bool = true;
    fn zero_k() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_k() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn inv(&self) -> Self {
        1.0 / self
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= COMPLEX_TOL * scale.max(f64::MIN_POSITIVE)
    }
    fn nonzero_roots(coeffs: &[Self]) -> Option<Vec<(Self, usize)>> {
        let roots = univariate_roots(coeffs);
        let mut groups: Vec<(Complex64, usize)> = Vec::new();
        for z in roots {
            match groups.iter_mut().find(|(c, _)| (z - *c).norm() <= CLUSTER_TOL * (1.0 + c.norm())) {
                Some(g) => {
                    g.0 = (g.0 * g.1 as f64 + z) / (g.1 + 1) as f64;
                    g.1 += 1;
                }
                None => groups.push((z, 1)),
            }
        }
        Some(groups)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// Divisors of `n` when it is small enough to factor by trial division.
fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

fn eval_int(c: &[BigInt], num: &BigInt, den: &BigInt) -> BigInt {
    // den^deg * P(num/den)
    let deg = c.len() - 1;
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    let mut terms = Vec::with_capacity(c.len());
    for _ in 0..=deg {
        terms.push(dpow.clone());
        dpow *= den;
    }
    let mut npow = BigInt::one();
    for (k, ck) in c.iter().enumerate() {
        acc += ck * &npow * &terms[deg - k];
        npow *= num;
    }
    acc
}

/// All nonzero rational roots with multiplicity, if they account for the
/// full degree.
pub fn rational_roots(coeffs: &[Rational]) -> Option<Vec<(Rational, usize)>> {
    let mut c: Vec<Rational> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    while c.first().is_some_and(|x| x.is_zero()) {
        c.remove(0);
    }
    let deg = c.len().checked_sub(1)?;
    if deg == 0 {
        return Some(Vec::new());
    }
    let l = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mut ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut out = Vec::new();
    let mut remaining = deg;
    if deg == 1 {
        return Some(vec![(-c[0].clone() / c[1].clone(), 1)]);
    }
    let ps = divisors(&ints[0])?;
    let qs = divisors(&ints[deg])?;
    let mut cands: Vec<Rational> = Vec::new();
    for &p in &ps {
        for &q in &qs {
            if p.gcd(&q) != 1 {
                continue;
            }
            for s in [1i64, -1] {
                cands.push(Rational::new(BigInt::from(p) * s, BigInt::from(q)));
            }
        }
    }
    for r in cands {
        let mut mult = 0;
        while remaining > 0 && eval_int(&ints, r.numer(), r.denom()).is_zero() {
            // synthetic division of the integer polynomial by (den*T - num)
            let (num, den) = (r.numer().clone(), r.denom().clone());
            let d = ints.len() - 1;
            let mut q = vec![BigInt::zero(); d];
            let mut carry = BigInt::zero();
            for k in (0..d).rev() {
                let cur = &ints[k + 1] + &carry;
                q[k] = &cur / &den;
                carry = &q[k] * &num;
            }
            ints = q;
            mult += 1;
            remaining -= 1;
        }
        if mult > 0 {
            out.push((r, mult));
        }
        if remaining == 0 {
            break;
        }
    }
    (remaining == 0).then_some(out)
}

/// Sparse bivariate polynomial: `(x power, y power) -> coefficient`.
pub type Biv<K> = BTreeMap<(u32, u32), K>;

fn scale_of<K: PuiseuxField>(f: &Biv<K>) -> f64 {
    f.values().map(|c| c.magnitude()).fold(0.0, f64::max)
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r = r * Rational::from_integer((n - i).into()) / Rational::from_integer((i + 1).into());
    }
    r
}

/// `X^-l f(xi^v X^q, X^p (xi^u + Y))`.
fn substitute<K: PuiseuxField>(f: &Biv<K>, xi: &K, p: u32, q: u32, u: u64, v: u64, l: u32) -> Biv<K> {
    let xu = xi.ipow(u);
    let xv = xi.ipow(v);
    let mut out: Biv<K> = BTreeMap::new();
    for (&(i, j), c) in f {
        let base = c.clone() * xv.ipow(i as u64);
        let xe = q * i + p * j - l;
        for k in 0..=j {
            let t = base.clone() * K::from_rational(&binomial(j, k)) * xu.ipow((j - k) as u64);
            let e = out.entry((xe, k)).or_insert_with(K::zero_k);
            *e = e.clone() + t;
        }
    }
    let scale = scale_of(&out).max(scale_of(f));
    out.retain(|_, c| !c.negligible(scale));
    out
}

/// A branch parametrization `x = a t^e`, `y = S(t) + w t^omega Y(t)`.
#[derive(Clone, Debug)]
pub struct RawBranch<K> {
    pub a: K,
    pub e: u32,
    /// Dense coefficients of `S`.
    pub s: Vec<K>,
    pub w: K,
    pub omega: u32,
    /// Coefficients of `S` are exact through `t^prec`; `None` when `S` is
    /// the whole branch.
    pub prec: Option<u32>,
    /// Remaining equation in `(t, Y)` with a simple root, for extension.
    stage: Option<Biv<K>>,
    truncated: bool,
}

impl<K: PuiseuxField> RawBranch<K> {
    fn initial() -> Self {
        RawBranch {
            a: K::one_k(),
            e: 1,
            s: Vec::new(),
            w: K::one_k(),
            omega: 0,
            prec: Some(0),
            stage: None,
            truncated: false,
        }
    }

    /// The branch `x = t`, `y = 0` used when there is no second coordinate.
    pub fn line() -> Self {
        RawBranch { prec: None, ..Self::initial() }
    }

    /// The axis `x = 0`, parametrized by `y = t`.
    pub fn vertical() -> Self {
        RawBranch {
            a: K::zero_k(),
            s: vec![K::zero_k(), K::one_k()],
            prec: None,
            ..Self::initial()
        }
    }

    fn add_s(&mut self, k: usize, c: K) {
        if self.s.len() <= k {
            self.s.resize(k + 1, K::zero_k());
        }
        self.s[k] = self.s[k].clone() + c;
    }

    fn step(&self, xi: &K, p: u32, q: u32, u: u64, v: u64) -> Self {
        let xv = xi.ipow(v);
        let mut s = Vec::new();
        for (k, c) in self.s.iter().enumerate() {
            let nk = q as usize * k;
            if s.len() <= nk {
                s.resize(nk + 1, K::zero_k());
            }
            s[nk] = c.clone() * xv.ipow(k as u64);
        }
        let w = self.w.clone() * xv.ipow(self.omega as u64);
        let omega = q * self.omega + p;
        let mut out = RawBranch {
            a: self.a.clone() * xv.ipow(self.e as u64),
            e: q * self.e,
            s,
            w: w.clone(),
            omega,
            prec: Some(omega),
            stage: None,
            truncated: self.truncated,
        };
        out.add_s(omega as usize, w * xi.ipow(u));
        out
    }

    /// Extends `S` until its coefficients are exact through `t^target`.
    pub fn extend(&mut self, target: u32) {
        loop {
            let Some(prec) = self.prec else { return };
            if prec >= target {
                return;
            }
            let Some(f) = self.stage.take() else { return };
            let need = target - self.omega;
            let has_free = f.keys().any(|&(_, j)| j == 0);
            if !has_free && !self.truncated {
                self.prec = None;
                return;
            }
            let g: Biv<K> = f.into_iter().filter(|&((i, j), _)| i + j <= need + 1).collect();
            let Some((&(istar, _), cfree)) = g.iter().filter(|(&(_, j), _)| j == 0).min_by_key(|(&(i, _), _)| i) else {
                self.prec = Some(self.omega + need);
                return;
            };
            let c01 = g.get(&(0, 1)).cloned().expect("regular stage has a linear term");
            let xi = -(cfree.clone() * c01.inv());
            self.truncated = true;
            let next = substitute(&g, &xi, istar, 1, 1, 0, istar);
            let stepped = self.step(&xi, istar, 1, 1, 0);
            *self = RawBranch { stage: Some(next), truncated: true, ..stepped };
        }
    }
}

/// Branches through the origin of a squarefree `f` not divisible by `x`.
/// `None` when a characteristic polynomial does not split over `K`.
pub fn branches<K: PuiseuxField>(f: &Biv<K>) -> Option<Vec<RawBranch<K>>> {
    let mut out = Vec::new();
    expand(f.clone(), RawBranch::initial(), &mut out, 0)?;
    Some(out)
}

const MAX_DEPTH: usize = 64;

fn expand<K: PuiseuxField>(mut f: Biv<K>, param: RawBranch<K>, out: &mut Vec<RawBranch<K>>, depth: usize) -> Option<()> {
    if depth > MAX_DEPTH || f.is_empty() {
        return None;
    }
    let j0 = f.keys().map(|&(_, j)| j).min().unwrap();
    if j0 > 0 {
        out.push(RawBranch { prec: None, stage: None, ..param.clone() });
        f = f.into_iter().map(|((i, j), c)| ((i, j - j0), c)).collect();
    }
    if f.contains_key(&(0, 0)) {
        return Some(());
    }
    let Some(h) = f.keys().filter(|&&(i, _)| i == 0).map(|&(_, j)| j).min() else {
        return None;
    };
    let mut cur = (0u32, h);
    while cur.1 > 0 {
        let nxt = *f
            .keys()
            .filter(|&&(_, j)| j < cur.1)
            .min_by(|&&(i1, j1), &&(i2, j2)| {
                let a = (i1 as i64 - cur.0 as i64) * (cur.1 - j2) as i64;
                let b = (i2 as i64 - cur.0 as i64) * (cur.1 - j1) as i64;
                a.cmp(&b).then(j1.cmp(&j2))
            })
            .unwrap();
        let (di, dj) = (nxt.0 - cur.0, cur.1 - nxt.1);
        let g = di.gcd(&dj);
        let (p, q) = (di / g, dj / g);
        let l = q * cur.0 + p * cur.1;
        let mut phi = vec![K::zero_k(); (dj / q) as usize + 1];
        for (&(i, j), c) in &f {
            if q * i + p * j == l {
                phi[((j - nxt.1) / q) as usize] = c.clone();
            }
        }
        let u = (1..=p as u64).find(|u| (u * q as u64 - 1) % p as u64 == 0).unwrap();
        let v = (u * q as u64 - 1) / p as u64;
        for (xi, r) in K::nonzero_roots(&phi)? {
            let f1 = substitute(&f, &xi, p, q, u, v, l);
            let next = param.step(&xi, p, q, u, v);
            if r == 1 {
                out.push(RawBranch { stage: Some(f1), ..next });
            } else {
                expand(f1, next, out, depth + 1)?;
            }
        }
        cur = nxt;
    }
    Some(())
}

/// Coefficients of `g(a t^e, S(t))` through `t^tau`, with `g` as
/// `(x power, y power) -> coefficient`.
pub fn compose<K: PuiseuxField>(g: &Biv<K>, br: &RawBranch<K>, tau: u32) -> Vec<K> {
    let n = tau as usize + 1;
    let mut s: Vec<K> = br.s.iter().take(n).cloned().collect();
    s.resize(n, K::zero_k());
    let mul = |a: &[K], b: &[K]| {
        let mut r = vec![K::zero_k(); n];
        for (i, x) in a.iter().enumerate() {
            if x.negligible(0.0) && !K::APPROXIMATE {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n - i) {
                r[i + j] = r[i + j].clone() + x.clone() * y.clone();
            }
        }
        r
    };
    let maxj = g.keys().map(|&(_, j)| j).max().unwrap_or(0);
    let mut ypow = vec![{
        let mut one = vec![K::zero_k(); n];
        one[0] = K::one_k();
        one
    }];
    for _ in 0..maxj {
        let last = ypow.last().unwrap().clone();
        ypow.push(mul(&last, &s));
    }
    let mut out = vec![K::zero_k(); n];
    for (&(i, j), c) in g {
        let shift = (br.e as u64 * i as u64) as usize;
        if i > 0 && br.a.negligible(1.0) && !K::APPROXIMATE {
            continue;
        }
        if i > 0 && K::APPROXIMATE && br.a.magnitude() == 0.0 {
            continue;
        }
        if shift >= n {
            continue;
        }
        let coef = c.clone() * br.a.ipow(i as u64);
        for (k, y) in ypow[j as usize].iter().enumerate().take(n - shift) {
            out[k + shift] = out[k + shift].clone() + coef.clone() * y.clone();
        }
    }
    out
}

/// Magnitude scale of `g` along the branch, for floating zero tests.
pub fn compose_scale<K: PuiseuxField>(g: &Biv<K>, br: &RawBranch<K>) -> f64 {
    let smax: f64 = br.s.iter().map(|c| c.magnitude()).sum::<f64>().max(1.0);
    let a = br.a.magnitude().max(1.0);
    g.iter()
        .map(|(&(i, j), c)| c.magnitude() * a.powi(i as i32) * smax.powi(j as i32))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    fn biv(terms: &[((u32, u32), i64)]) -> Biv<Rational> {
        terms.iter().map(|&(k, c)| (k, rat(c))).collect()
    }

    #[test]
    fn rational_root_multiplicities() {
        // (T - 1)^2 (2T + 3)
        let r = rational_roots(&[rat(3), rat(-4), rat(-1), rat(2)]).unwrap();
        assert!(r.contains(&(rat(1), 2)));
        assert!(r.contains(&(ratio(-3, 2), 1)));
        assert!(rational_roots(&[rat(-2), rat(0), rat(1)]).is_none());
    }

    #[test]
    fn node_and_parabola() {
        // y (y - x^2)
        let f = biv(&[((0, 2), 1), ((2, 1), -1)]);
        let bs = branches(&f).unwrap();
        assert_eq!(bs.len(), 2);
        assert!(bs.iter().all(|b| b.e == 1));
    }

    #[test]
    fn cusp_is_one_ramified_branch() {
        // y^2 - x^3
        let f = biv(&[((0, 2), 1), ((3, 0), -1)]);
        let mut bs = branches(&f).unwrap();
        assert_eq!(bs.len(), 1);
        let b = &mut bs[0];
        assert_eq!(b.e, 2);
        b.extend(10);
        // x = t^2, y = t^3
        assert_eq!(b.a, rat(1));
        assert_eq!(b.s.get(3), Some(&rat(1)));
        assert!(b.s.iter().enumerate().all(|(k, c)| k == 3 || c.is_zero()));
    }

    #[test]
    fn regular_branch_extends() {
        // y - x - x^2 y = 0: y = x + x^3 + x^5 + ...
        let f = biv(&[((0, 1), 1), ((1, 0), -1), ((2, 1), -1)]);
        let mut bs = branches(&f).unwrap();
        assert_eq!(bs.len(), 1);
        let b = &mut bs[0];
        b.extend(7);
        assert!(b.prec.unwrap() >= 7);
        for k in 0..=7usize {
            let want = if k % 2 == 1 { rat(1) } else { rat(0) };
            assert_eq!(b.s.get(k).cloned().unwrap_or_default(), want, "t^{k}");
        }
    }

    #[test]
    fn irrational_slopes_need_complex() {
        // y^2 - 2 x^2
        let f = biv(&[((0, 2), 1), ((2, 0), -2)]);
        assert!(branches(&f).is_none());
        let fc: Biv<Complex64> = f.iter().map(|(k, c)| (*k, c.to_c64())).collect();
        let bs = branches(&fc).unwrap();
        assert_eq!(bs.len(), 2);
    }
}
