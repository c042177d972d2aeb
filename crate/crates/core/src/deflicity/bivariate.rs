//! Exact bivariate arithmetic in `Q[x][y]`: gcd by primitive remainder
//! sequences and squarefree decomposition.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{Poly, Rational};

/// Dense univariate polynomial in `x`; index is the power.
pub type UPoly = Vec<Rational>;

fn u_trim(mut a: UPoly) -> UPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn u_deg(a: &UPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

fn u_add(a: &UPoly, b: &UPoly) -> UPoly {
    let mut r = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        r[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        r[i] += c;
    }
    u_trim(r)
}

fn u_neg(a: &UPoly) -> UPoly {
    a.iter().map(|c| -c.clone()).collect()
}

fn u_mul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    u_trim(r)
}

fn u_divrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    let db = u_deg(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut r = a.clone();
    let mut q = vec![Rational::zero(); a.len().saturating_sub(db).max(1)];
    while let Some(dr) = u_deg(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        for (j, bj) in b.iter().enumerate() {
            let t = &c * bj;
            r[dr - db + j] -= t;
        }
        q[dr - db] = c;
        r = u_trim(r);
    }
    (u_trim(q), r)
}

fn u_monic(a: UPoly) -> UPoly {
    match a.last() {
        Some(l) => {
            let l = l.clone();
            a.into_iter().map(|c| c / &l).collect()
        }
        None => a,
    }
}

fn u_gcd(a: &UPoly, b: &UPoly) -> UPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = u_divrem(&a, &b);
        a = b;
        b = r;
    }
    u_monic(a)
}

/// Polynomial in `y` with coefficients in `Q[x]`; index is the power of `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BPoly(pub Vec<UPoly>);

impl BPoly {
    fn trim(mut self) -> BPoly {
        while self.0.last().is_some_and(|c| c.is_empty()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// From a polynomial in two variables with indices `xi`, `yi`.
    pub fn from_poly(p: &Poly, xi: usize, yi: usize) -> BPoly {
        let mut v: Vec<UPoly> = Vec::new();
        for (m, c) in p.terms() {
            let (i, j) = (m.0[xi] as usize, m.0[yi] as usize);
            if v.len() <= j {
                v.resize(j + 1, Vec::new());
            }
            if v[j].len() <= i {
                v[j].resize(i + 1, Rational::zero());
            }
            v[j][i] += c;
        }
        BPoly(v.into_iter().map(u_trim).collect()).trim()
    }

    /// Sparse `(x power, y power) -> coefficient` map.
    pub fn to_terms(&self) -> BTreeMap<(u32, u32), Rational> {
        let mut out = BTreeMap::new();
        for (j, c) in self.0.iter().enumerate() {
            for (i, a) in c.iter().enumerate() {
                if !a.is_zero() {
                    out.insert((i as u32, j as u32), a.clone());
                }
            }
        }
        out
    }

    fn lc(&self) -> &UPoly {
        self.0.last().expect("nonzero polynomial")
    }

    fn add(&self, o: &BPoly) -> BPoly {
        let n = self.0.len().max(o.0.len());
        let e = Vec::new();
        BPoly((0..n).map(|j| u_add(self.0.get(j).unwrap_or(&e), o.0.get(j).unwrap_or(&e))).collect()).trim()
    }

    fn sub(&self, o: &BPoly) -> BPoly {
        self.add(&BPoly(o.0.iter().map(u_neg).collect()))
    }

    fn scale(&self, c: &UPoly) -> BPoly {
        BPoly(self.0.iter().map(|a| u_mul(a, c)).collect()).trim()
    }

    fn shift_y(&self, k: usize) -> BPoly {
        let mut v = vec![Vec::new(); k];
        v.extend(self.0.iter().cloned());
        BPoly(v).trim()
    }

    pub fn deriv_y(&self) -> BPoly {
        BPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.iter().map(|a| a * Rational::from_integer((j as i64).into())).collect())
                .collect(),
        )
        .trim()
    }

    /// Gcd of all coefficients, monic.
    pub fn content(&self) -> UPoly {
        self.0.iter().fold(Vec::new(), |g, c| if g.is_empty() { u_monic(c.clone()) } else { u_gcd(&g, c) })
    }

    pub fn primitive_part(&self) -> BPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        let p = BPoly(self.0.iter().map(|a| u_divrem(a, &c).0).collect()).trim();
        let lead = p.lc().last().unwrap().clone();
        BPoly(p.0.iter().map(|a| a.iter().map(|x| x / &lead).collect()).collect())
    }

    /// `lc(b)^k * self mod b` in `y`.
    fn pseudo_rem(&self, b: &BPoly) -> BPoly {
        let db = b.deg_y().unwrap();
        let lb = b.lc().clone();
        let mut r = self.clone();
        while let Some(dr) = r.deg_y() {
            if dr < db {
                break;
            }
            let lr = r.lc().clone();
            r = r.scale(&lb).sub(&b.scale(&lr).shift_y(dr - db));
        }
        r
    }

    /// Exact quotient `self / b`; panics if `b` does not divide `self`.
    pub fn exact_div(&self, b: &BPoly) -> BPoly {
        let db = b.deg_y().expect("division by zero");
        let lb = b.lc().clone();
        let mut r = self.clone();
        let mut q: Vec<UPoly> = vec![Vec::new(); self.0.len().saturating_sub(db).max(1)];
        while let Some(dr) = r.deg_y() {
            if dr < db {
                break;
            }
            let (c, rem) = u_divrem(r.lc(), &lb);
            assert!(rem.is_empty(), "inexact bivariate division");
            r = r.sub(&b.scale(&c).shift_y(dr - db));
            q[dr - db] = c;
        }
        assert!(r.is_zero(), "inexact bivariate division");
        BPoly(q).trim()
    }

    /// Gcd in `Q[x][y]`, normalized to a primitive polynomial times a monic content.
    pub fn gcd(&self, o: &BPoly) -> BPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let c = u_gcd(&self.content(), &o.content());
        let (mut a, mut b) = (self.primitive_part(), o.primitive_part());
        if a.deg_y() < b.deg_y() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        if a.deg_y() == Some(0) {
            return BPoly(vec![c]);
        }
        a.scale(&c)
    }

    /// Largest `a` with `x^a` dividing every coefficient.
    pub fn x_valuation(&self) -> usize {
        self.0
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| c.iter().position(|a| !a.is_zero()).unwrap())
            .min()
            .unwrap_or(0)
    }
}

/// Squarefree decomposition (Yun) of a polynomial that is primitive in `y`:
/// returns `(factor, multiplicity)` with factors of positive `y`-degree.
pub fn squarefree(a: &BPoly) -> Vec<(BPoly, usize)> {
    let mut out = Vec::new();
    if a.deg_y().unwrap_or(0) == 0 {
        return out;
    }
    let a = a.primitive_part();
    let da = a.deriv_y();
    let c = a.gcd(&da).primitive_part();
    let mut w = a.exact_div(&c);
    let mut y = da.exact_div(&c);
    let mut z = y.sub(&w.deriv_y());
    let mut i = 1;
    while w.deg_y().unwrap_or(0) > 0 {
        let g = w.gcd(&z).primitive_part();
        if g.deg_y().unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        w = w.exact_div(&g);
        y = z.exact_div(&g);
        z = y.sub(&w.deriv_y());
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, Arena};

    fn bp(s: &str) -> BPoly {
        BPoly::from_poly(&parse_poly(s, &Arena::new(2, 0)).unwrap(), 0, 1)
    }

    #[test]
    fn gcd_of_products() {
        let g = bp("(x2 - x1^2)*(x2 + 1)").gcd(&bp("(x2 - x1^2)*(x2 - x1)"));
        assert_eq!(g.primitive_part(), bp("x2 - x1^2").primitive_part());
    }

    #[test]
    fn squarefree_parts() {
        let f = bp("x2^2*(x2 - x1^2)^3*(x2 + x1)");
        let mut sf = squarefree(&f);
        sf.sort_by_key(|(_, m)| *m);
        assert_eq!(sf.len(), 3);
        assert_eq!(sf[0].1, 1);
        assert_eq!(sf[0].0.primitive_part(), bp("x2 + x1").primitive_part());
        assert_eq!(sf[1], (bp("x2").primitive_part(), 2));
        assert_eq!(sf[2].1, 3);
    }

    #[test]
    fn content_and_valuation() {
        let f = bp("x1^2*x2 + x1^3");
        assert_eq!(f.x_valuation(), 2);
        assert_eq!(f.primitive_part(), bp("x2 + x1"));
    }
}
