//! Sparse multivariate polynomials in graded-lexicographic canonical form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use super::scalar::{Coeff, Rational};

/// Variable layout shared by all polynomials of one problem.
///
/// Indices are `x1..xn`, then `eps` (when present, acting as `x_{n+1}`),
/// then `f1..fm`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Arena {
    n: usize,
    m: usize,
    eps: bool,
}

impl Arena {
    pub fn new(n: usize, m: usize) -> Arc<Arena> {
        Arc::new(Arena { n, m, eps: false })
    }

    /// Arena for a one-parameter family: `eps` is an extra x-type variable.
    pub fn with_eps(n: usize, m: usize) -> Arc<Arena> {
        Arc::new(Arena { n, m, eps: true })
    }

    /// Number of named `x` variables (not counting `eps`).
    pub fn n_named_x(&self) -> usize {
        self.n
    }

    /// Number of independent (x-type) coordinates, including `eps`.
    pub fn n_x(&self) -> usize {
        self.n + usize::from(self.eps)
    }

    pub fn n_f(&self) -> usize {
        self.m
    }

    pub fn has_eps(&self) -> bool {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.n_x() + self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of `eps`, if present.
    pub fn eps_index(&self) -> Option<usize> {
        self.eps.then_some(self.n)
    }

    /// Index of the `j`-th chain variable (0-based).
    pub fn f_index(&self, j: usize) -> usize {
        self.n_x() + j
    }

    pub fn name(&self, i: usize) -> String {
        if i < self.n {
            format!("x{}", i + 1)
        } else if self.eps && i == self.n {
            "eps".to_string()
        } else {
            format!("f{}", i - self.n_x() + 1)
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        if name == "eps" {
            return self.eps_index();
        }
        let (head, tail) = name.split_at(1.min(name.len()));
        if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) || tail.starts_with('0') {
            return None;
        }
        let k: usize = tail.parse().ok()?;
        match head {
            "x" if k >= 1 && k <= self.n => Some(k - 1),
            "f" if k >= 1 && k <= self.m => Some(self.n_x() + k - 1),
            _ => None,
        }
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("arena mismatch between operands")]
    ArenaMismatch,
    #[error("point has {got} coordinates, arena has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Sparse polynomial with exact coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by graded-lex monomial order, so equal
/// polynomials have identical representations and `==` is structural.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly<C: Coeff = Rational> {
    arena: Arc<Arena>,
    terms: BTreeMap<Monomial, C>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    Pow(u32),
}

impl<C: Coeff> Poly<C> {
    pub fn zero(arena: &Arc<Arena>) -> Self {
        Poly {
            arena: arena.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arena: &Arc<Arena>, c: C) -> Self {
        let mut p = Poly::zero(arena);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(arena.len()), c);
        }
        p
    }

    pub fn one(arena: &Arc<Arena>) -> Self {
        Poly::constant(arena, C::one())
    }

    pub fn var(arena: &Arc<Arena>, i: usize) -> Self {
        let mut p = Poly::zero(arena);
        p.terms.insert(Monomial::var(arena.len(), i), C::one());
        p
    }

    pub fn monomial(arena: &Arc<Arena>, m: Monomial, c: C) -> Self {
        assert_eq!(m.0.len(), arena.len());
        let mut p = Poly::zero(arena);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(arena: &Arc<Arena>, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Poly::zero(arena);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    pub fn nvars(&self) -> usize {
        self.arena.len()
    }

    pub fn same_arena(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.arena, &o.arena) || self.arena == o.arena
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    /// Lowest total degree among the terms; `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one(self.nvars()))
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(&self.arena);
        }
        Poly {
            arena: self.arena.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, PolyError> {
        if !self.same_arena(o) {
            return Err(PolyError::ArenaMismatch);
        }
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, PolyError> {
        if !self.same_arena(o) {
            return Err(PolyError::ArenaMismatch);
        }
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c.clone());
        }
        Ok(r)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, PolyError> {
        if !self.same_arena(o) {
            return Err(PolyError::ArenaMismatch);
        }
        let mut r = Poly::zero(&self.arena);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Poly::one(&self.arena);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// The ring operation selected by `op`; `b` is ignored for `Pow`.
    pub fn arith(&self, b: &Self, op: PolyOp) -> Result<Self, PolyError> {
        match op {
            PolyOp::Add => self.checked_add(b),
            PolyOp::Sub => self.checked_sub(b),
            PolyOp::Mul => self.checked_mul(b),
            PolyOp::Pow(e) => Ok(self.pow(e)),
        }
    }

    /// Partial derivative with respect to variable index `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut r = Poly::zero(&self.arena);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            r.add_term(m2, c.clone() * C::from_rational(Rational::from_integer(e.into())));
        }
        r
    }

    pub fn eval(&self, point: &[C]) -> Result<C, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        let pows = power_table(point, |i| self.degree_in(i));
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * pows[i][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Keeps only terms of total degree `<= n`.
    pub fn truncate(&self, n: u32) -> Self {
        Poly {
            arena: self.arena.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `x_i -> vals[i]` for every variable, producing a
    /// polynomial in a (possibly different) target arena.
    pub fn compose(&self, vals: &[Poly<C>]) -> Poly<C> {
        assert_eq!(vals.len(), self.nvars());
        let target = vals
            .first()
            .map(|p| p.arena.clone())
            .unwrap_or_else(|| self.arena.clone());
        let mut cache: Vec<Vec<Poly<C>>> = vals.iter().map(|v| vec![Poly::one(&v.arena), v.clone()]).collect();
        let mut r = Poly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap() * &vals[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][e as usize];
            }
            r = &r + &t;
        }
        r
    }

    /// Re-expresses the polynomial in another arena through a variable map
    /// (`map[i]` is the target index of source variable `i`).
    pub fn remap(&self, target: &Arc<Arena>, map: &[usize]) -> Poly<C> {
        let mut r = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            r.add_term(Monomial(e), c.clone());
        }
        r
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut r = Poly::zero(&self.arena);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }
}

fn power_table<C: Coeff>(point: &[C], maxdeg: impl Fn(usize) -> u32) -> Vec<Vec<C>> {
    point
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let d = maxdeg(i) as usize;
            let mut row = Vec::with_capacity(d + 1);
            row.push(C::one());
            for k in 1..=d {
                let next = row[k - 1].clone() * v.clone();
                row.push(next);
            }
            row
        })
        .collect()
}

impl<'a, C: Coeff> Add for &'a Poly<C> {
    type Output = Poly<C>;
    /// Panics on arena mismatch; use [`Poly::checked_add`] for a `Result`.
    fn add(self, o: Self) -> Poly<C> {
        self.checked_add(o).expect("arena mismatch")
    }
}

impl<'a, C: Coeff> Sub for &'a Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: Self) -> Poly<C> {
        self.checked_sub(o).expect("arena mismatch")
    }
}

impl<'a, C: Coeff> Mul for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: Self) -> Poly<C> {
        self.checked_mul(o).expect("arena mismatch")
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative_print();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = self.arena.name(i);
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}
