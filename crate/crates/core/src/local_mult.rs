//! Local multiplicity oracles on leaves of a chain.
//!
//! For `n >= 2` the multiplicity of an isolated common zero is the dimension
//! of the Macaulay dual space of the ideal generated by the jets. One-
//! dimensional restrictions are handled by directional derivatives
//! `D_t = sum_i t_i V_i`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{linalg, Arena, Monomial, Poly, Rational};
use crate::chain::{multi_indices, Chain, LeafPoint};
use crate::error::{Error, Result};

/// Default cap on the truncation order.
pub const DEFAULT_MAX_ORDER: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultResult {
    /// Finite multiplicity, certified by stabilization at truncation `order`.
    Finite { mult: u64, order: u32 },
    /// No stabilization (or no nonzero coefficient) through `order`.
    NotIsolated { order: u32 },
}

impl MultResult {
    pub fn value(&self) -> Option<u64> {
        match self {
            MultResult::Finite { mult, .. } => Some(*mult),
            MultResult::NotIsolated { .. } => None,
        }
    }
}

/// A line `q + s t` through a base point, with the linear form `l` that
/// vanishes on it (for `n = 2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub vector: Vec<Rational>,
}

impl Direction {
    pub fn new(vector: Vec<Rational>) -> Result<Direction> {
        if vector.iter().all(|v| v.is_zero()) {
            return Err(Error::Invalid("direction vector must be nonzero".into()));
        }
        Ok(Direction { vector })
    }

    pub fn from_ints(v: &[i64]) -> Direction {
        Direction::new(v.iter().map(|&a| Rational::from_integer(a.into())).collect()).unwrap()
    }

    /// Degree-one polynomial vanishing on the line through `base`
    /// (`n = 2`: `t2 (x1 - b1) - t1 (x2 - b2)`; `n = 1`: `x1 - b1`).
    pub fn linear_form(&self, arena: &Arc<Arena>, base: &[Rational]) -> Result<Poly> {
        let x = |i: usize| Poly::var(arena, i);
        let shift = |i: usize| &x(i) - &Poly::constant(arena, base[i].clone());
        match self.vector.len() {
            1 => Ok(shift(0)),
            2 => Ok(&shift(0).scale(&self.vector[1]) - &shift(1).scale(&self.vector[0])),
            k => Err(Error::Unsupported(format!("linear form of a line in dimension {k}"))),
        }
    }
}

fn check_direction(c: &Chain, t: &Direction) -> Result<()> {
    if t.vector.len() != c.n() {
        return Err(Error::Invalid(format!(
            "direction has {} components, chain has n = {}",
            t.vector.len(),
            c.n()
        )));
    }
    Ok(())
}

/// `D_t(p) = sum_i t_i V_i(p)`.
pub fn directional_derive(c: &Chain, p: &Poly, t: &Direction) -> Result<Poly> {
    check_direction(c, t)?;
    let mut r = Poly::zero(c.arena());
    for (i, ti) in t.vector.iter().enumerate() {
        if !ti.is_zero() {
            r = &r + &c.derive(p, i + 1)?.scale(ti);
        }
    }
    Ok(r)
}

/// `D_t^j(phi)` for `j = 1..=k`.
pub fn mo_restrict(c: &Chain, phi: &Poly, t: &Direction, k: u32) -> Result<Vec<Poly>> {
    check_direction(c, t)?;
    let mut out = Vec::with_capacity(k as usize);
    let mut cur = phi.clone();
    for _ in 0..k {
        cur = directional_derive(c, &cur, t)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Smallest `j >= 1` with `D_t^j(phi)(q) != 0`, or `None` through `kmax`.
pub fn mo_vanish_order(c: &Chain, q: &LeafPoint, phi: &Poly, t: &Direction, kmax: u32) -> Result<Option<u32>> {
    check_direction(c, t)?;
    if !phi.eval(&q.coords)?.is_zero() {
        return Err(Error::Precondition("function does not vanish at the base point".into()));
    }
    let mut cur = phi.clone();
    for j in 1..=kmax {
        cur = directional_derive(c, &cur, t)?;
        if !cur.eval(&q.coords)?.is_zero() {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

fn require_integrable(c: &Chain, q: &LeafPoint) -> Result<()> {
    let depth = c.default_il_depth();
    if !c.il_test(q, depth)? {
        return Err(Error::NotIntegrable { depth });
    }
    Ok(())
}

/// Order of vanishing of `psi` restricted to the leaf through `q` (`n = 1`).
pub fn mult_univariate(c: &Chain, q: &LeafPoint, psi: &Poly, max_order: u32) -> Result<MultResult> {
    if c.n() != 1 {
        return Err(Error::Unsupported("univariate multiplicity needs n = 1".into()));
    }
    require_integrable(c, q)?;
    let mut cur = psi.clone();
    for j in 0..=max_order {
        if j > 0 {
            cur = c.derive(&cur, 1)?;
        }
        if !cur.eval(&q.coords)?.is_zero() {
            return Ok(MultResult::Finite { mult: j as u64, order: j });
        }
        if cur.is_zero() {
            break;
        }
    }
    Ok(MultResult::NotIsolated { order: max_order })
}

/// Multiplicity of `q` as a common zero of `system` (`n` functions) on the
/// leaf through `q`, as the stabilized dimension of the Macaulay dual space.
pub fn mult_isolated(c: &Chain, q: &LeafPoint, system: &[Poly], max_order: u32) -> Result<MultResult> {
    if system.len() != c.n() {
        return Err(Error::Invalid(format!(
            "system has {} functions, chain has n = {}",
            system.len(),
            c.n()
        )));
    }
    require_integrable(c, q)?;
    for (i, p) in system.iter().enumerate() {
        if !p.eval(&q.coords)?.is_zero() {
            return Err(Error::Precondition(format!("function {} does not vanish at the point", i + 1)));
        }
    }
    let mut jet_order = 4.min(max_order.max(1));
    let mut jets = jets_at(c, q, system, jet_order)?;
    let mut prev: Option<usize> = None;
    for t in 0..=max_order {
        if t > jet_order {
            jet_order = (jet_order * 2).min(max_order);
            jets = jets_at(c, q, system, jet_order)?;
        }
        let dim = dual_dimension(&jets, c.n(), t);
        if prev == Some(dim) {
            return Ok(MultResult::Finite {
                mult: dim as u64,
                order: t,
            });
        }
        prev = Some(dim);
    }
    Ok(MultResult::NotIsolated { order: max_order })
}

fn jets_at(c: &Chain, q: &LeafPoint, system: &[Poly], order: u32) -> Result<Vec<Poly>> {
    system.iter().map(|p| Ok(c.jet(q, p, order)?.series)).collect()
}

/// `dim D_t`: monomials of degree `<= t` minus the rank of the truncated
/// Macaulay matrix with rows `x^b * g` (`g` in `gens`, all `b` of degree `<= t`).
pub fn dual_dimension(gens: &[Poly], n: usize, t: u32) -> usize {
    let cols = multi_indices(n, t);
    let index: HashMap<&Vec<u32>, usize> = cols.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut ech = linalg::Echelon::new();
    for g in gens {
        let g = g.truncate(t);
        let Some(ord) = g.order() else { continue };
        if ord > t {
            continue;
        }
        for b in multi_indices(n, t - ord) {
            let mut row = linalg::SparseRow::new();
            for (m, coef) in g.terms() {
                let e: Vec<u32> = m.0.iter().zip(&b).map(|(x, y)| x + y).collect();
                if e.iter().sum::<u32>() <= t {
                    row.insert(index[&e], coef.clone());
                }
            }
            if !row.is_empty() {
                ech.insert(row);
            }
            if ech.rank() == cols.len() {
                return 0;
            }
        }
    }
    cols.len() - ech.rank()
}

/// Multiplicity of the origin for polynomial systems in local coordinates,
/// without a chain.
pub fn mult_polynomial_system(system: &[Poly], max_order: u32) -> MultResult {
    let n = system.first().map_or(0, |p| p.nvars());
    let mut prev = None;
    for t in 0..=max_order {
        let dim = dual_dimension(system, n, t);
        if prev == Some(dim) {
            return MultResult::Finite { mult: dim as u64, order: t };
        }
        prev = Some(dim);
    }
    MultResult::NotIsolated { order: max_order }
}

/// Shift of a polynomial to local coordinates centred at `base` (x-part only).
pub fn localize(p: &Poly, base: &[Rational]) -> Poly {
    let arena = p.arena().clone();
    let vals: Vec<Poly> = (0..p.nvars())
        .map(|i| {
            let v = Poly::var(&arena, i);
            match base.get(i) {
                Some(b) if !b.is_zero() => &v + &Poly::constant(&arena, b.clone()),
                _ => v,
            }
        })
        .collect();
    p.compose(&vals)
}

/// Monomial `x^a` helper for tests and examples.
pub fn monomial(arena: &Arc<Arena>, a: &[u32]) -> Poly {
    Poly::monomial(arena, Monomial(a.to_vec()), Rational::one())
}
