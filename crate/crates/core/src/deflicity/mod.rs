//! Deflicity of a Noetherian set `X = {psi = 0}` at a point with respect to
//! a function `rho`: the number of isolated points of `X ∩ {rho = y}`
//! (counted with multiplicity) that tend to the point as `y -> rho(p)`.
//!
//! Two independent routes are provided. The symbolic route decomposes the
//! germ of a plane curve into Puiseux branches and sums
//! `multiplicity * ord(rho - rho(p))` over branches where `rho` is not
//! constant. The numeric route solves the perturbed square system by
//! homotopy continuation and counts the roots that cluster at the point.

pub mod bivariate;
pub mod puiseux;

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{rat, rational_to_f64, Arena, Poly, Rational};
use crate::chain::{Chain, LeafPoint};
use crate::local_mult::{localize, mult_polynomial_system, mult_univariate, MultResult};
use crate::numeric::{solve_total_degree, CPoly};
use crate::{Error, Result};

use bivariate::{squarefree, BPoly};
use puiseux::{branches, compose, compose_scale, Biv, PuiseuxField, RawBranch};

/// Highest jet order tried when the input is not polynomial.
pub const MAX_SYMBOLIC_ORDER: u32 = 64;

#[derive(Clone, Debug)]
enum BranchData {
    Exact(RawBranch<Rational>),
    Approx(RawBranch<Complex64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchClass {
    Good,
    Bad,
    Undetermined,
}

/// Order of a function along a branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchOrder {
    /// Order in the uniformizer `t`; the order in the principal coordinate
    /// is `ord_t / ramification`.
    Finite { ord_t: u64, ramification: u32 },
    /// No nonzero term found; `None` means the composition is identically
    /// zero, `Some(N)` that it vanishes through order `N`.
    Vanishes { through: Option<u32> },
}

impl BranchOrder {
    pub fn ord(&self) -> Option<Rational> {
        match self {
            BranchOrder::Finite { ord_t, ramification } => {
                Some(Rational::new((*ord_t).into(), (*ramification).into()))
            }
            BranchOrder::Vanishes { .. } => None,
        }
    }
}

/// One irreducible branch of a plane curve germ, parametrized as
/// `x1 = a t^e`, `x2 = S(t)` in local coordinates.
#[derive(Clone, Debug)]
pub struct Branch {
    /// Multiplicity of the component in the defining equation.
    pub multiplicity: usize,
    /// The branch is the axis `x1 = 0`, parametrized by `x2 = t`.
    pub vertical: bool,
    pub class: BranchClass,
    /// Order of `rho - rho(p)` once classified.
    pub order: Option<BranchOrder>,
    data: BranchData,
}

impl Branch {
    fn new_exact(raw: RawBranch<Rational>, multiplicity: usize, vertical: bool) -> Branch {
        Branch { multiplicity, vertical, class: BranchClass::Undetermined, order: None, data: BranchData::Exact(raw) }
    }

    fn new_approx(raw: RawBranch<Complex64>, multiplicity: usize) -> Branch {
        Branch {
            multiplicity,
            vertical: false,
            class: BranchClass::Undetermined,
            order: None,
            data: BranchData::Approx(raw),
        }
    }

    /// Ramification index (least common denominator of the exponents).
    pub fn ramification(&self) -> u32 {
        match &self.data {
            BranchData::Exact(r) => r.e,
            BranchData::Approx(r) => r.e,
        }
    }

    /// Coefficients come from floating-point root finding.
    pub fn is_approximate(&self) -> bool {
        matches!(self.data, BranchData::Approx(_))
    }

    fn expanded(&self, through: u32) -> Branch {
        let mut b = self.clone();
        match &mut b.data {
            BranchData::Exact(r) => r.extend(through),
            BranchData::Approx(r) => r.extend(through),
        }
        b
    }

    /// Exponents of the nonzero terms of `x2` as a series in `x1^(1/e)`,
    /// through `t^through`.
    pub fn exponents(&self, through: u32) -> Vec<Rational> {
        let b = self.expanded(through);
        let e = self.ramification();
        let nonzero: Vec<usize> = match &b.data {
            BranchData::Exact(r) => nonzero_indices(r, through),
            BranchData::Approx(r) => nonzero_indices(r, through),
        };
        nonzero.into_iter().map(|k| Rational::new((k as i64).into(), (e as i64).into())).collect()
    }

    /// Human-readable parametrization through `t^through`.
    pub fn describe(&self, through: u32) -> String {
        let b = self.expanded(through);
        match &b.data {
            BranchData::Exact(r) => describe_raw(r, through, |c| c.to_string()),
            BranchData::Approx(r) => describe_raw(r, through, |c| format!("({:.6}{:+.6}i)", c.re, c.im)),
        }
    }

    /// Serializable summary.
    pub fn view(&self) -> BranchView {
        BranchView {
            multiplicity: self.multiplicity,
            ramification: self.ramification(),
            class: self.class,
            ord: self.order.as_ref().and_then(|o| o.ord()).map(|q| q.to_string()),
            vanishes_through: match &self.order {
                Some(BranchOrder::Vanishes { through }) => Some(through.map_or("identically".into(), |n| n.to_string())),
                _ => None,
            },
            parametrization: self.describe(6 * self.ramification()),
            approximate: self.is_approximate(),
        }
    }
}

/// JSON-friendly branch summary.
#[derive(Clone, Debug, Serialize)]
pub struct BranchView {
    pub multiplicity: usize,
    pub ramification: u32,
    pub class: BranchClass,
    pub ord: Option<String>,
    pub vanishes_through: Option<String>,
    pub parametrization: String,
    pub approximate: bool,
}

fn nonzero_indices<K: PuiseuxField>(r: &RawBranch<K>, through: u32) -> Vec<usize> {
    let scale = r.s.iter().map(|c| c.magnitude()).fold(1.0, f64::max);
    r.s.iter()
        .enumerate()
        .take(through as usize + 1)
        .filter(|(_, c)| !c.negligible(scale))
        .map(|(k, _)| k)
        .collect()
}

fn describe_raw<K: PuiseuxField>(r: &RawBranch<K>, through: u32, fmt: impl Fn(&K) -> String) -> String {
    let term = |c: &K, k: u32| match k {
        0 => fmt(c),
        1 => format!("{}*t", fmt(c)),
        _ => format!("{}*t^{}", fmt(c), k),
    };
    let x1 = if r.a.magnitude() == 0.0 { "0".to_string() } else { term(&r.a, r.e) };
    let terms: Vec<String> = nonzero_indices(r, through).into_iter().map(|k| term(&r.s[k], k as u32)).collect();
    let mut x2 = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    if r.prec.is_some_and(|p| p <= through) || (r.prec.is_some() && !terms.is_empty()) {
        x2.push_str(" + ...");
    }
    format!("x1 = {x1}, x2 = {x2}")
}

/// A function in local coordinates, known exactly or through a jet order.
#[derive(Clone, Debug)]
pub struct LocalFunction {
    /// Polynomial in the local coordinates (`x1` index 0, `x2` index 1).
    pub series: Poly,
    /// Terms of total degree above this order are unknown; `None` if exact.
    pub known_through: Option<u32>,
}

impl LocalFunction {
    pub fn exact(series: Poly) -> LocalFunction {
        LocalFunction { series, known_through: None }
    }

    pub fn truncated(series: Poly, order: u32) -> LocalFunction {
        LocalFunction { series: series.truncate(order), known_through: Some(order) }
    }
}

fn to_biv<K: PuiseuxField>(p: &Poly) -> Biv<K> {
    let mut out = BTreeMap::new();
    for (m, c) in p.terms() {
        let i = m.0.first().copied().unwrap_or(0);
        let j = m.0.get(1).copied().unwrap_or(0);
        out.insert((i, j), K::from_rational(c));
    }
    out
}

fn order_generic<K: PuiseuxField>(raw: &RawBranch<K>, g: &LocalFunction, max_t: u32) -> BranchOrder {
    let gb: Biv<K> = to_biv(&g.series);
    let e = raw.e;
    if gb.is_empty() {
        return BranchOrder::Vanishes { through: g.known_through };
    }
    let mut br = raw.clone();
    let mut tau = (8 * e).max(8).min(max_t.max(1));
    loop {
        br.extend(tau);
        // Lower bound on the t-order of the unknown tail of g.
        let x_ord = if br.a.magnitude() == 0.0 { u64::MAX } else { br.e as u64 };
        let scale_s = br.s.iter().map(|c| c.magnitude()).fold(1.0, f64::max);
        let y_ord = match br.s.iter().position(|c| !c.negligible(scale_s)) {
            Some(k) if br.prec.map_or(true, |p| k as u32 <= p) => k as u64,
            _ => br.prec.map_or(u64::MAX, |p| p as u64 + 1),
        };
        let g_horizon = match g.known_through {
            None => u64::MAX,
            Some(n) => x_ord.min(y_ord).saturating_mul(n as u64 + 1),
        };
        let s_horizon = br.prec.map_or(u64::MAX, |p| p as u64 + 1);
        let horizon = g_horizon.min(s_horizon).min(tau as u64 + 1);
        let coeffs = compose(&gb, &br, (horizon - 1) as u32);
        let scale = compose_scale(&gb, &br);
        if let Some(k) = coeffs.iter().position(|c| !c.negligible(scale)) {
            return BranchOrder::Finite { ord_t: k as u64, ramification: if br.e == 0 { 1 } else { br.e } };
        }
        let full = g.known_through.is_none() && br.prec.is_none();
        if full {
            // Polynomial composed with a polynomial parametrization.
            let bound = g.series.degree() as u64 * (br.e as u64).max(br.s.len() as u64);
            if (tau as u64) >= bound {
                return BranchOrder::Vanishes { through: None };
            }
        }
        if horizon <= tau as u64 && !full && g_horizon <= tau as u64 {
            // The unknown part of g starts here; cannot see further.
            return BranchOrder::Vanishes { through: g.known_through };
        }
        if tau >= max_t {
            return BranchOrder::Vanishes { through: Some(max_t / e.max(1)) };
        }
        tau = (tau * 2).min(max_t);
    }
}

/// Order of `g` along the branch, looking at most `max_order` deep in the
/// principal coordinate.
pub fn branch_order(b: &Branch, g: &LocalFunction, max_order: u32) -> BranchOrder {
    let max_t = max_order.saturating_mul(b.ramification().max(1));
    match &b.data {
        BranchData::Exact(r) => order_generic(r, g, max_t),
        BranchData::Approx(r) => order_generic(r, g, max_t),
    }
}

/// Rational order of `g` along the branch (in units of the principal
/// coordinate); errors when it vanishes through the truncation order.
pub fn ord_along_branch(b: &Branch, g: &LocalFunction, max_order: u32) -> Result<Rational> {
    match branch_order(b, g, max_order) {
        BranchOrder::Finite { ord_t, ramification } => Ok(Rational::new(ord_t.into(), ramification.into())),
        BranchOrder::Vanishes { through } => Err(Error::VanishesThrough { order: through.unwrap_or(max_order) }),
    }
}

/// Log-log slope of `|g|` against the principal coordinate along the
/// branch, sampled at `|x| = 1e-3 .. 1e-5` (or at `t` itself for the
/// vertical axis). Independent of the series composition above.
pub fn ord_slope_estimate(b: &Branch, g: &Poly) -> Option<f64> {
    let ord_t = match branch_order(b, &LocalFunction::exact(g.clone()), MAX_SYMBOLIC_ORDER) {
        BranchOrder::Finite { ord_t, .. } => ord_t as u32,
        BranchOrder::Vanishes { .. } => return None,
    };
    let e = b.ramification().max(1);
    let through = 3 * ord_t + 4 * e + 8;
    let eb = b.expanded(through);
    let samples: Vec<(f64, f64)> = match &eb.data {
        BranchData::Exact(r) => {
            let a = rational_to_f64(&r.a).abs();
            [6i64, 9]
                .iter()
                .map(|&k| {
                    // t = 10^-k exactly; evaluate g exactly on the truncated branch
                    let t = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(k as u32));
                    let x = &r.a * pow_rat(&t, r.e);
                    let y = r.s.iter().enumerate().fold(Rational::zero(), |acc, (i, c)| acc + c * pow_rat(&t, i as u32));
                    let v = g.eval(&[x, y]).ok()?;
                    let lx = if a == 0.0 { -(k as f64) * std::f64::consts::LN_10 } else { a.ln() - (k as f64) * r.e as f64 * std::f64::consts::LN_10 };
                    Some((lx, ln_abs_rational(&v)?))
                })
                .collect::<Option<Vec<_>>>()?
        }
        BranchData::Approx(r) => {
            let cg = CPoly::compile(g, 2.min(g.nvars()), &[]);
            [2.0f64, 3.0]
                .iter()
                .map(|&k| {
                    let t = 10f64.powf(-k);
                    let x = r.a * t.powi(r.e as i32);
                    let y: Complex64 = r.s.iter().enumerate().map(|(i, c)| c * t.powi(i as i32)).sum();
                    let pt: Vec<Complex64> = if g.nvars() >= 2 { vec![x, y] } else { vec![x] };
                    let v = cg.eval(&pt).norm();
                    let lx = if r.a.norm() == 0.0 { t.ln() } else { x.norm().ln() };
                    (v > 0.0).then(|| (lx, v.ln()))
                })
                .collect::<Option<Vec<_>>>()?
        }
    };
    let (x0, y0) = samples[0];
    let (x1, y1) = samples[1];
    Some((y1 - y0) / (x1 - x0))
}

fn pow_rat(t: &Rational, k: u32) -> Rational {
    (0..k).fold(rat(1), |acc, _| acc * t)
}

fn ln_abs_rational(v: &Rational) -> Option<f64> {
    if v.is_zero() {
        return None;
    }
    let n = v.numer().magnitude();
    let d = v.denom().magnitude();
    let ln_big = |x: &num_bigint::BigUint| {
        let bits = x.bits();
        let shift = bits.saturating_sub(60);
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    };
    Some(ln_big(n) - ln_big(d))
}

/// Branch decomposition of a plane curve germ at the origin.
#[derive(Clone, Debug)]
pub struct PlaneCurve {
    pub branches: Vec<Branch>,
    /// Some branch needed floating-point roots.
    pub approximate: bool,
    /// The equation vanishes identically (the germ is two-dimensional).
    pub full_dimensional: bool,
}

/// Decomposes `{f = 0}` at the origin; `f` lives in a two-variable arena.
pub fn decompose_plane(f: &Poly) -> PlaneCurve {
    if f.is_zero() {
        return PlaneCurve { branches: Vec::new(), approximate: false, full_dimensional: true };
    }
    let bp = BPoly::from_poly(f, 0, 1);
    let mut out = Vec::new();
    let mut approximate = false;
    let vert = bp.x_valuation();
    if vert > 0 {
        out.push(Branch::new_exact(RawBranch::vertical(), vert, true));
    }
    for (factor, mult) in squarefree(&bp) {
        let terms = factor.to_terms();
        if terms.contains_key(&(0, 0)) {
            continue;
        }
        match branches::<Rational>(&terms) {
            Some(bs) => out.extend(bs.into_iter().map(|b| Branch::new_exact(b, mult, false))),
            None => {
                let ct: Biv<Complex64> = terms.iter().map(|(k, c)| (*k, c.to_c64())).collect();
                if let Some(bs) = branches::<Complex64>(&ct) {
                    approximate = true;
                    out.extend(bs.into_iter().map(|b| Branch::new_approx(b, mult)));
                }
            }
        }
    }
    PlaneCurve { branches: out, approximate, full_dimensional: false }
}

/// Input of a deflicity computation on a chain.
#[derive(Clone, Debug)]
pub struct DeflicityProblem {
    pub chain: Chain,
    pub point: LeafPoint,
    /// `n - 1` equations cutting out `X`.
    pub equations: Vec<Poly>,
    pub rho: Poly,
    /// Starting truncation order for non-polynomial inputs.
    pub order: u32,
}

impl DeflicityProblem {
    pub fn new(chain: Chain, point: LeafPoint, equations: Vec<Poly>, rho: Poly, order: u32) -> Result<Self> {
        let n = chain.n();
        if equations.len() + 1 != n {
            return Err(Error::Invalid(format!("expected {} equations for n = {n}, got {}", n - 1, equations.len())));
        }
        if point.coords.len() != n + chain.m() {
            return Err(Error::Invalid(format!("point needs {} coordinates", n + chain.m())));
        }
        for p in equations.iter().chain(std::iter::once(&rho)) {
            if p.arena() != chain.arena() && **p.arena() != **chain.arena() {
                return Err(Error::Invalid("polynomial does not belong to the chain".into()));
            }
        }
        for (i, p) in equations.iter().enumerate() {
            if !p.eval(&point.coords)?.is_zero() {
                return Err(Error::Precondition(format!("equation {} does not vanish at the point", i + 1)));
            }
        }
        Ok(DeflicityProblem { chain, point, equations, rho, order: order.max(1) })
    }

    fn rho_shifted(&self) -> Result<Poly> {
        let r0 = self.rho.eval(&self.point.coords)?;
        Ok(&self.rho - &Poly::constant(self.chain.arena(), r0))
    }

    fn exact_input(&self) -> bool {
        self.chain.m() == 0
    }

    /// Jets (or exact localizations) of the equations and of `rho - rho(p)`.
    fn local_data(&self, order: u32) -> Result<(Vec<Poly>, LocalFunction, bool)> {
        let rho = self.rho_shifted()?;
        if self.exact_input() {
            let base = self.point.x(self.chain.n()).to_vec();
            let loc = |p: &Poly| localize(p, &base);
            return Ok((self.equations.iter().map(loc).collect(), LocalFunction::exact(loc(&rho)), false));
        }
        let mut off = false;
        let mut eqs = Vec::new();
        for p in &self.equations {
            let j = self.chain.jet(&self.point, p, order)?;
            off |= j.off_locus;
            eqs.push(j.series);
        }
        let j = self.chain.jet(&self.point, &rho, order)?;
        off |= j.off_locus;
        Ok((eqs, LocalFunction::truncated(j.series, order), off))
    }

    fn check_integrable(&self) -> Result<()> {
        let depth = self.chain.default_il_depth();
        if !self.chain.il_test(&self.point, depth)? {
            return Err(Error::NotIntegrable { depth });
        }
        Ok(())
    }

    fn orders(&self) -> Vec<u32> {
        if self.exact_input() {
            return vec![self.order];
        }
        let mut v = vec![self.order];
        while *v.last().unwrap() * 2 <= MAX_SYMBOLIC_ORDER.max(self.order * 2) && v.len() < 8 {
            let next = v.last().unwrap() * 2;
            v.push(next);
            if next >= MAX_SYMBOLIC_ORDER {
                break;
            }
        }
        v
    }
}

/// Branch decomposition of `X` at the point.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub branches: Vec<Branch>,
    pub approximate: bool,
    pub full_dimensional: bool,
    /// Jet order the decomposition was read from (`None` for exact input).
    pub order: Option<u32>,
}

fn signature(bs: &[Branch]) -> Vec<(usize, u32, bool, Option<BranchOrder>)> {
    let mut v: Vec<_> = bs
        .iter()
        .map(|b| (b.multiplicity, b.ramification(), b.vertical, b.order.clone()))
        .collect();
    v.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
    v
}

fn decompose_at(prob: &DeflicityProblem, order: u32) -> Result<(Decomposition, LocalFunction)> {
    let (eqs, rho, _) = prob.local_data(order)?;
    let curve = decompose_plane(&eqs[0]);
    Ok((
        Decomposition {
            branches: curve.branches,
            approximate: curve.approximate,
            full_dimensional: curve.full_dimensional,
            order: (!prob.exact_input()).then_some(order),
        },
        rho,
    ))
}

/// Newton–Puiseux decomposition of `X` at the point (`n = 2`); for `n = 1`
/// the germ is the point itself and the list is empty. Non-polynomial
/// inputs are read from jets at doubling orders until two consecutive
/// decompositions agree.
pub fn branch_decompose(prob: &DeflicityProblem) -> Result<Decomposition> {
    prob.check_integrable()?;
    match prob.chain.n() {
        1 => Ok(Decomposition { branches: Vec::new(), approximate: false, full_dimensional: false, order: None }),
        2 => {
            let mut prev: Option<Vec<(usize, u32, bool, Option<BranchOrder>)>> = None;
            let orders = prob.orders();
            for &n in &orders {
                let (d, _) = decompose_at(prob, n)?;
                let sig = signature(&d.branches);
                if prob.exact_input() || prev.as_ref() == Some(&sig) {
                    return Ok(d);
                }
                prev = Some(sig);
            }
            Err(Error::Inconclusive {
                order: *orders.last().unwrap(),
                reason: "Newton polygon not stabilized under order doubling".into(),
            })
        }
        n => Err(Error::Unsupported(format!("symbolic branch decomposition needs n <= 2, got {n}"))),
    }
}

/// Classifies branches by the order of `rho` (already shifted so that it
/// vanishes at the point) along them.
pub fn classify_branches(branches: &[Branch], rho: &LocalFunction, max_order: u32) -> Vec<Branch> {
    branches
        .iter()
        .map(|b| {
            let ord = branch_order(b, rho, max_order);
            let mut b = b.clone();
            b.class = match ord {
                BranchOrder::Finite { .. } => BranchClass::Good,
                BranchOrder::Vanishes { through: None } => BranchClass::Bad,
                BranchOrder::Vanishes { through: Some(_) } => {
                    if rho.known_through.is_none() {
                        BranchClass::Bad
                    } else {
                        BranchClass::Undetermined
                    }
                }
            };
            b.order = Some(ord);
            b
        })
        .collect()
}

/// Result of a symbolic deflicity computation.
#[derive(Clone, Debug)]
pub struct DeflicityReport {
    pub value: u64,
    pub branches: Vec<Branch>,
    pub approximate: bool,
    /// Jet order used (`None` for polynomial input).
    pub order: Option<u32>,
    /// Number of branches on which `rho` vanishes through the order searched.
    pub vanishing_markers: usize,
}

fn sum_good(bs: &[Branch]) -> u64 {
    bs.iter()
        .filter_map(|b| match (&b.class, &b.order) {
            (BranchClass::Good, Some(BranchOrder::Finite { ord_t, .. })) => Some(b.multiplicity as u64 * ord_t),
            _ => None,
        })
        .sum()
}

/// Deflicity by branch decomposition: the sum over good branches of
/// `multiplicity * ord(rho - rho(p))`; for `n = 1`, the multiplicity of
/// `rho - rho(p)` on the line.
pub fn deflicity_symbolic(prob: &DeflicityProblem) -> Result<DeflicityReport> {
    prob.check_integrable()?;
    match prob.chain.n() {
        1 => {
            let rho = prob.rho_shifted()?;
            let max = prob.order.max(MAX_SYMBOLIC_ORDER);
            match mult_univariate(&prob.chain, &prob.point, &rho, max)? {
                MultResult::Finite { mult, .. } => Ok(DeflicityReport {
                    value: mult,
                    branches: Vec::new(),
                    approximate: false,
                    order: None,
                    vanishing_markers: 0,
                }),
                MultResult::NotIsolated { order } => Ok(DeflicityReport {
                    value: 0,
                    branches: Vec::new(),
                    approximate: false,
                    order: Some(order),
                    vanishing_markers: 1,
                }),
            }
        }
        2 => {
            let orders = prob.orders();
            let mut prev: Option<(u64, Vec<(usize, u32, bool, Option<BranchOrder>)>)> = None;
            for &n in &orders {
                let (d, rho) = decompose_at(prob, n)?;
                if d.full_dimensional {
                    return Ok(DeflicityReport {
                        value: 0,
                        branches: Vec::new(),
                        approximate: false,
                        order: d.order,
                        vanishing_markers: 0,
                    });
                }
                let max_order = if prob.exact_input() { prob.order.max(MAX_SYMBOLIC_ORDER) } else { n };
                let classified = classify_branches(&d.branches, &rho, max_order);
                let value = sum_good(&classified);
                let markers = classified
                    .iter()
                    .filter(|b| matches!(b.order, Some(BranchOrder::Vanishes { through: Some(_) })))
                    .count();
                let undetermined = classified.iter().any(|b| b.class == BranchClass::Undetermined);
                let sig = (value, signature(&classified));
                let report = DeflicityReport {
                    value,
                    branches: classified,
                    approximate: d.approximate,
                    order: d.order,
                    vanishing_markers: markers,
                };
                if prob.exact_input() || (prev.as_ref() == Some(&sig) && !undetermined) {
                    return Ok(report);
                }
                prev = Some(sig);
            }
            Err(Error::Inconclusive {
                order: *orders.last().unwrap(),
                reason: "branch data not stabilized under order doubling".into(),
            })
        }
        n => Err(Error::Unsupported(format!("symbolic deflicity needs n <= 2, got {n}; use the numeric route"))),
    }
}

/// How a family deflicity was obtained symbolically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMethod {
    /// The family reduced to a plane curve in `(x, eps)`.
    Branches,
    /// The limit system has an isolated zero; conservation of number.
    LimitMultiplicity,
    /// Every variable was solved for explicitly.
    Graph,
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub value: u64,
    pub method: FamilyMethod,
    pub branches: Vec<Branch>,
    pub approximate: bool,
}

/// `c * x_k + h` with `h` free of `x_k` and `c` a nonzero constant.
fn linear_in(p: &Poly, k: usize) -> Option<(Rational, Poly)> {
    if p.degree_in(k) != 1 {
        return None;
    }
    let d = p.partial(k);
    if !d.is_constant() {
        return None;
    }
    let c = d.constant_term();
    let h = p - &(&Poly::var(p.arena(), k) * &d);
    Some((c, h))
}

/// Symbolic deflicity of a square family `P(x, eps)` at `(x0, 0)` with
/// respect to `eps`. Equations linear in a variable are solved first; what
/// remains is either a plane curve in `(x_k, eps)` or a system whose limit
/// at `eps = 0` has an isolated zero.
pub fn deflicity_family_symbolic(family: &[Poly], x0: &[Rational]) -> Result<FamilyReport> {
    let arena = family.first().ok_or_else(|| Error::Invalid("empty family".into()))?.arena().clone();
    let eps = arena.eps_index().ok_or_else(|| Error::Invalid("family needs the eps variable".into()))?;
    let n = arena.n_named_x();
    if family.len() != n || x0.len() != n || arena.n_f() != 0 {
        return Err(Error::Invalid(format!("family must have {n} polynomial equations in x1..x{n}, eps")));
    }
    let mut eqs: Vec<Poly> = family.iter().map(|p| localize(p, x0)).collect();
    for (i, p) in eqs.iter().enumerate() {
        if !p.constant_term().is_zero() {
            return Err(Error::Precondition(format!("equation {} does not vanish at the point for eps = 0", i + 1)));
        }
    }
    let mut active: Vec<usize> = (0..n).collect();
    'elim: loop {
        for ei in 0..eqs.len() {
            for (ai, &k) in active.iter().enumerate() {
                if let Some((c, h)) = linear_in(&eqs[ei], k) {
                    let sol = h.scale(&(-c.recip()));
                    let vals: Vec<Poly> =
                        (0..arena.len()).map(|v| if v == k { sol.clone() } else { Poly::var(&arena, v) }).collect();
                    eqs.remove(ei);
                    eqs = eqs.iter().map(|p| p.compose(&vals)).collect();
                    active.remove(ai);
                    continue 'elim;
                }
            }
        }
        break;
    }
    if eqs.is_empty() {
        return Ok(FamilyReport { value: 1, method: FamilyMethod::Graph, branches: Vec::new(), approximate: false });
    }
    if eqs.len() == 1 {
        let plane = Arena::new(2, 0);
        let mut map = vec![0usize; arena.len()];
        map[active[0]] = 0;
        map[eps] = 1;
        let f = eqs[0].remap(&plane, &map);
        let curve = decompose_plane(&f);
        if curve.full_dimensional {
            return Ok(FamilyReport { value: 0, method: FamilyMethod::Branches, branches: Vec::new(), approximate: false });
        }
        let rho = LocalFunction::exact(Poly::var(&plane, 1));
        let classified = classify_branches(&curve.branches, &rho, MAX_SYMBOLIC_ORDER);
        return Ok(FamilyReport {
            value: sum_good(&classified),
            method: FamilyMethod::Branches,
            branches: classified,
            approximate: curve.approximate,
        });
    }
    let limit_arena = Arena::new(active.len(), 0);
    let mut map = vec![0usize; arena.len()];
    for (i, &k) in active.iter().enumerate() {
        map[k] = i;
    }
    let zero_eps: Vec<Poly> = (0..arena.len())
        .map(|v| if v == eps { Poly::zero(&arena) } else { Poly::var(&arena, v) })
        .collect();
    let limit: Vec<Poly> = eqs.iter().map(|p| p.compose(&zero_eps).remap(&limit_arena, &map)).collect();
    match mult_polynomial_system(&limit, MAX_SYMBOLIC_ORDER) {
        MultResult::Finite { mult, .. } => Ok(FamilyReport {
            value: mult,
            method: FamilyMethod::LimitMultiplicity,
            branches: Vec::new(),
            approximate: false,
        }),
        MultResult::NotIsolated { .. } => Err(Error::Unsupported(
            "symbolic family deflicity needs a plane curve or an isolated limit; use the numeric route".into(),
        )),
    }
}

/// Settings for the numeric deflicity count.
#[derive(Clone, Debug, Serialize)]
pub struct NumericOptions {
    pub eps_samples: Vec<f64>,
    pub radii: Vec<f64>,
    pub seed: u64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { eps_samples: vec![1e-3, 1e-4], radii: vec![0.5, 0.25], seed: 0x5eed }
    }
}

/// Root count per `(eps, radius)` sample.
#[derive(Clone, Debug, Serialize)]
pub struct NumericReport {
    pub value: u64,
    pub samples: Vec<(f64, f64, u64)>,
    /// Inputs were polynomialized by jets.
    pub approximate: bool,
    pub jet_order: Option<u32>,
}

/// Clusters endpoints: points within `10 * tol * (1 + |x|)` are one cluster.
fn cluster_sizes(points: &[Vec<Complex64>], tol: f64) -> Vec<usize> {
    let mut reps: Vec<(Vec<Complex64>, usize)> = Vec::new();
    for p in points {
        let near = |q: &Vec<Complex64>| {
            let scale = 1.0 + q.iter().map(|z| z.norm()).fold(0.0, f64::max);
            p.iter().zip(q).all(|(a, b)| (a - b).norm() <= 10.0 * tol * scale)
        };
        match reps.iter_mut().find(|(q, _)| near(q)) {
            Some(r) => r.1 += 1,
            None => reps.push((p.clone(), 1)),
        }
    }
    reps.into_iter().map(|(_, k)| k).collect()
}

/// Numeric deflicity of a polynomial family `P(x, eps)` at `x0`: counts
/// roots of `P(., eps_j)` within each radius of `x0`; all counts must agree.
pub fn deflicity_numeric(family: &[Poly], x0: &[Rational], opts: &NumericOptions) -> Result<NumericReport> {
    let arena = family.first().ok_or_else(|| Error::Invalid("empty family".into()))?.arena().clone();
    let eps = arena.eps_index().ok_or_else(|| Error::Invalid("family needs the eps variable".into()))?;
    let n = arena.n_named_x();
    if family.len() != n || x0.len() != n || arena.n_f() != 0 {
        return Err(Error::Invalid(format!("family must have {n} polynomial equations in x1..x{n}, eps")));
    }
    if opts.eps_samples.is_empty() || opts.radii.is_empty() {
        return Err(Error::Invalid("need at least one eps sample and one radius".into()));
    }
    let local: Vec<Poly> = family.iter().map(|p| localize(p, x0)).collect();
    let mut samples = Vec::new();
    for &e in &opts.eps_samples {
        let system: Vec<CPoly> = local.iter().map(|p| CPoly::compile(p, n, &[(eps, e)])).collect();
        let ends = solve_total_degree(&system, opts.seed);
        if ends.is_empty() {
            return Err(Error::SolverFailure("no homotopy paths".into()));
        }
        let finite: Vec<Vec<Complex64>> = ends.into_iter().filter(|p| p.converged).map(|p| p.x).collect();
        for &r in &opts.radii {
            let inside: Vec<Vec<Complex64>> =
                finite.iter().filter(|x| x.iter().all(|z| z.norm() < r)).cloned().collect();
            let count: usize = cluster_sizes(&inside, 1e-8).iter().sum();
            samples.push((e, r, count as u64));
        }
    }
    let value = samples[0].2;
    if samples.iter().any(|s| s.2 != value) {
        return Err(Error::UnstableCount(format!("counts differ across samples: {samples:?}")));
    }
    Ok(NumericReport { value, samples, approximate: false, jet_order: None })
}

/// Numeric cross-check of a chain deflicity problem: the family
/// `(psi, rho - rho(p) - eps)` in local coordinates. Non-polynomial inputs
/// are replaced by jets at doubling orders until two counts agree.
pub fn deflicity_numeric_problem(prob: &DeflicityProblem, opts: &NumericOptions) -> Result<NumericReport> {
    prob.check_integrable()?;
    let n = prob.chain.n();
    let fam_arena = Arena::with_eps(n, 0);
    let map: Vec<usize> = (0..n).collect();
    let eps_poly = Poly::var(&fam_arena, n);
    let build = |eqs: &[Poly], rho: &Poly| -> Vec<Poly> {
        let mut fam: Vec<Poly> = eqs.iter().map(|p| p.remap(&fam_arena, &map)).collect();
        fam.push(&rho.remap(&fam_arena, &map) - &eps_poly);
        fam
    };
    let origin = vec![Rational::zero(); n];
    if prob.exact_input() {
        let (eqs, rho, _) = prob.local_data(prob.order)?;
        return deflicity_numeric(&build(&eqs, &rho.series), &origin, opts);
    }
    let mut prev: Option<u64> = None;
    let mut last_err = None;
    for &order in &prob.orders() {
        let (eqs, rho, _) = prob.local_data(order)?;
        match deflicity_numeric(&build(&eqs, &rho.series), &origin, opts) {
            Ok(mut r) => {
                if prev == Some(r.value) {
                    r.approximate = true;
                    r.jet_order = Some(order);
                    return Ok(r);
                }
                prev = Some(r.value);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::UnstableCount("jet truncation did not stabilize the count".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn plane(s: &str) -> Poly {
        parse_poly(s, &Arena::new(2, 0)).unwrap()
    }

    fn problem(psi: &str, rho: &str) -> DeflicityProblem {
        let c = Chain::trivial(2);
        let psi = c.parse_poly(psi).unwrap();
        let rho = c.parse_poly(rho).unwrap();
        DeflicityProblem::new(c, LeafPoint::from_ints(&[0, 0]), vec![psi], rho, 8).unwrap()
    }

    #[test]
    fn node_parabola_branches() {
        let d = branch_decompose(&problem("x2*(x2 - x1^2)", "x1")).unwrap();
        assert_eq!(d.branches.len(), 2);
        assert!(d.branches.iter().all(|b| b.multiplicity == 1 && b.ramification() == 1));
    }

    #[test]
    fn double_line() {
        let d = branch_decompose(&problem("x2^2", "x1")).unwrap();
        assert_eq!(d.branches.len(), 1);
        assert_eq!(d.branches[0].multiplicity, 2);
    }

    #[test]
    fn cusp_ramification() {
        let d = branch_decompose(&problem("x2^2 - x1^3", "x1")).unwrap();
        assert_eq!(d.branches.len(), 1);
        assert_eq!(d.branches[0].ramification(), 2);
        assert_eq!(d.branches[0].exponents(12), vec![Rational::new(3.into(), 2.into())]);
        let g = LocalFunction::exact(plane("x2^2 - x1^3"));
        assert!(matches!(branch_order(&d.branches[0], &g, 16), BranchOrder::Vanishes { through: None }));
        assert_eq!(ord_along_branch(&d.branches[0], &LocalFunction::exact(plane("x2")), 16).unwrap(), Rational::new(3.into(), 2.into()));
    }

    #[test]
    fn symbolic_values() {
        assert_eq!(deflicity_symbolic(&problem("x2*(x2 - x1^2)", "x1")).unwrap().value, 2);
        assert_eq!(deflicity_symbolic(&problem("x2^2", "x2")).unwrap().value, 0);
        assert_eq!(deflicity_symbolic(&problem("x2*(x2 - x1^2)", "x2")).unwrap().value, 2);
        assert_eq!(deflicity_symbolic(&problem("x2*(x2 - x1^2)", "3")).unwrap().value, 0);
        assert_eq!(deflicity_symbolic(&problem("x2^2 - 2*x1^2", "x1")).unwrap().value, 2);
    }

    #[test]
    fn vertical_axis_counts() {
        // x1 * (x2 - x1): axis x1 = 0 and the diagonal; rho = x2 has order 1 on both
        assert_eq!(deflicity_symbolic(&problem("x1*(x2 - x1)", "x2")).unwrap().value, 2);
    }

    #[test]
    fn families() {
        let a1 = Arena::with_eps(1, 0);
        let a2 = Arena::with_eps(2, 0);
        let f = |s: &str, a: &std::sync::Arc<Arena>| parse_poly(s, a).unwrap();
        let z1 = vec![Rational::zero()];
        let z2 = vec![Rational::zero(); 2];
        assert_eq!(deflicity_family_symbolic(&[f("x1^2 - eps", &a1)], &z1).unwrap().value, 2);
        let r = deflicity_family_symbolic(&[f("x1^2 - eps", &a2), f("x2^2 - eps", &a2)], &z2).unwrap();
        assert_eq!((r.value, r.method), (4, FamilyMethod::LimitMultiplicity));
        let r = deflicity_family_symbolic(&[f("eps*x1", &a2), f("x2", &a2)], &z2).unwrap();
        assert_eq!((r.value, r.method), (1, FamilyMethod::Branches));
        let opts = NumericOptions::default();
        assert_eq!(deflicity_numeric(&[f("x1^2 - eps", &a1)], &z1, &opts).unwrap().value, 2);
        assert_eq!(deflicity_numeric(&[f("x1^2 - eps", &a2), f("x2^2 - eps", &a2)], &z2, &opts).unwrap().value, 4);
        assert_eq!(deflicity_numeric(&[f("eps*x1", &a2), f("x2", &a2)], &z2, &opts).unwrap().value, 1);
    }

    #[test]
    fn numeric_matches_symbolic_on_plane_cases() {
        for (psi, rho, want) in [("x2*(x2 - x1^2)", "x1", 2), ("x2^2", "x2", 0), ("x2*(x2 - x1^2)", "x2", 2)] {
            let r = deflicity_numeric_problem(&problem(psi, rho), &NumericOptions::default()).unwrap();
            assert_eq!(r.value, want, "{psi} / {rho}");
        }
    }

    #[test]
    fn slope_estimates() {
        let d = branch_decompose(&problem("x2^2 - x1^3", "x1")).unwrap();
        let s = ord_slope_estimate(&d.branches[0], &plane("x2")).unwrap();
        assert!((s - 1.5).abs() < 0.05, "{s}");
        let d = branch_decompose(&problem("x2 - x1^2", "x1")).unwrap();
        let s = ord_slope_estimate(&d.branches[0], &plane("x2 + x1^3")).unwrap();
        assert!((s - 2.0).abs() < 0.05, "{s}");
        assert_eq!(ord_along_branch(&d.branches[0], &LocalFunction::exact(plane("1")), 8).unwrap(), rat(0));
    }

    #[test]
    fn noetherian_curve_stabilizes() {
        // psi = x2 - (f1 - 1) on the exp chain in two variables: x2 = e^x1 - 1
        let c = Chain::parse(2, 1, &[vec!["f1"], vec!["0"]]).unwrap();
        let psi = c.parse_poly("x2 - f1 + 1").unwrap();
        let rho = c.parse_poly("x2").unwrap();
        let p = LeafPoint::from_ints(&[0, 0, 1]);
        let prob = DeflicityProblem::new(c, p, vec![psi], rho, 4).unwrap();
        let r = deflicity_symbolic(&prob).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.branches.len(), 1);
    }
}
