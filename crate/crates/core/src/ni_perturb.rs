//! Non-isolated intersection locus at a working order, and the perturbation
//! constructions `H`, `E`, `E'`, `P'` with behavioural checks.
//!
//! The working order `k_hat` stands in for the astronomically large order
//! of the degree estimates; every construction records it.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{rat, ratio, Arena, Monomial, Poly, Rational};
use crate::bounds::{deg_after_mo_u64, il_degree};
use crate::chain::{multi_indices, Chain, LeafPoint};
use crate::deflicity::{branch_order, deflicity_symbolic, BranchClass, BranchOrder, DeflicityProblem, LocalFunction};
use crate::local_mult::{directional_derive, localize, mo_vanish_order, mult_isolated, Direction, MultResult};
use crate::numeric::{univariate_roots, CPoly};
use crate::{Error, Result};

/// Default working order.
pub const DEFAULT_K_HAT: u32 = 4;
/// Default working exponents in `E' = E^A l^B`.
pub const DEFAULT_A_HAT: u32 = 2;
pub const DEFAULT_B_HAT: u32 = 2;
/// Coefficients of random perturbations are drawn from `-Q_BOX..=Q_BOX`.
pub const Q_BOX: i64 = 3;

/// Equations `P` (n - 1 of them) and a function `R` on a chain.
#[derive(Clone, Debug)]
pub struct NiSystem {
    pub chain: Chain,
    pub equations: Vec<Poly>,
    pub rho: Poly,
    pub k_hat: u32,
}

impl NiSystem {
    pub fn new(chain: Chain, equations: Vec<Poly>, rho: Poly, k_hat: u32) -> Result<NiSystem> {
        if k_hat == 0 {
            return Err(Error::Invalid("working order must be at least 1".into()));
        }
        if equations.len() + 1 != chain.n() {
            return Err(Error::Invalid(format!(
                "expected {} equations for n = {}, got {}",
                chain.n() - 1,
                chain.n(),
                equations.len()
            )));
        }
        for p in equations.iter().chain(std::iter::once(&rho)) {
            if **p.arena() != **chain.arena() {
                return Err(Error::Invalid("polynomial does not belong to the chain".into()));
            }
        }
        Ok(NiSystem { chain, equations, rho, k_hat })
    }

    /// `max(deg P_i, deg R)`.
    pub fn degree(&self) -> u32 {
        self.equations.iter().chain(std::iter::once(&self.rho)).map(|p| p.degree()).max().unwrap_or(0)
    }

    fn with_equations(&self, equations: Vec<Poly>) -> NiSystem {
        NiSystem { equations, ..self.clone() }
    }
}

fn ledger(what: &str, degree: u32, bound: &BigUint) -> Result<()> {
    if BigUint::from(degree) > *bound {
        return Err(Error::DegreeLedger { what: what.into(), degree: degree as u64, bound: bound.to_string() });
    }
    Ok(())
}

/// `W = V2(P1) V1 - V1(P1) V2`, tangent to `{P1 = 0}` inside a leaf.
fn tangent_derive(c: &Chain, p1: &Poly, g: &Poly) -> Result<Poly> {
    let a = c.derive(p1, 2)?;
    let b = c.derive(p1, 1)?;
    Ok(&(&a * &c.derive(g, 1)?) - &(&b * &c.derive(g, 2)?))
}

/// Polynomials vanishing on the non-isolated locus at working order:
/// the integrability generators, then for `n = 1` the derivatives
/// `V^j R`, and for `n = 2` the equation `P1` with `W^j R` for the
/// tangent field `W` of `{P1 = 0}`, for `j = 1..=k_hat`. Zero
/// polynomials are dropped. Every degree is checked against the ledger.
pub fn ni_generators(sys: &NiSystem) -> Result<Vec<Poly>> {
    let c = &sys.chain;
    let (n, m, delta) = (c.n() as u64, c.m() as u64, c.delta() as u64);
    let d = sys.degree() as u64;
    let mut out = Vec::new();
    let il_bound = il_degree(m, n, delta).value;
    for g in c.il_generators(c.default_il_depth()) {
        ledger("integrability generator", g.degree(), &il_bound)?;
        out.push(g);
    }
    match c.n() {
        1 => {
            let mut cur = sys.rho.clone();
            for j in 1..=sys.k_hat {
                cur = c.derive(&cur, 1)?;
                ledger(&format!("V^{j} R"), cur.degree(), &deg_after_mo_u64(n, delta, d, j as u64))?;
                if !cur.is_zero() {
                    out.push(cur.clone());
                }
            }
        }
        2 => {
            let p1 = &sys.equations[0];
            if !p1.is_zero() {
                out.push(p1.clone());
            }
            let mut cur = sys.rho.clone();
            for j in 1..=sys.k_hat {
                cur = tangent_derive(c, p1, &cur)?;
                ledger(&format!("W^{j} R"), cur.degree(), &deg_after_mo_u64(n, delta, d, j as u64))?;
                if !cur.is_zero() {
                    out.push(cur.clone());
                }
            }
        }
        n => return Err(Error::Unsupported(format!("non-isolated generators need n <= 2, got {n}"))),
    }
    Ok(out)
}

/// Whether `q` lies on a bad component of `{P = 0}` in its leaf, at working
/// order: the multiplicity of `(P, R - R(q))` at `q` exceeds `k_hat` or does
/// not stabilize. Points off `{P = 0}` are not members.
pub fn ni_member_numeric(sys: &NiSystem, q: &LeafPoint) -> Result<bool> {
    for p in &sys.equations {
        if !p.eval(&q.coords)?.is_zero() {
            return Ok(false);
        }
    }
    let r0 = sys.rho.eval(&q.coords)?;
    let mut system = sys.equations.clone();
    system.push(&sys.rho - &Poly::constant(sys.chain.arena(), r0));
    Ok(match mult_isolated(&sys.chain, q, &system, sys.k_hat + 1)? {
        MultResult::Finite { mult, .. } => mult > sys.k_hat as u64,
        MultResult::NotIsolated { .. } => true,
    })
}

/// `(D_t^lambda Phi)^(lambda + 1)` with the degree checked against
/// `(lambda + 1) * deg_after_mo(n, delta, deg Phi, lambda)`.
pub fn build_h(c: &Chain, phi: &Poly, t: &Direction, lambda: u32) -> Result<Poly> {
    let mut cur = phi.clone();
    for _ in 0..lambda {
        cur = directional_derive(c, &cur, t)?;
    }
    let h = cur.pow(lambda + 1);
    let bound = deg_after_mo_u64(c.n() as u64, c.delta() as u64, phi.degree() as u64, lambda as u64)
        * BigUint::from(lambda + 1);
    ledger("H", h.degree(), &bound)?;
    Ok(h)
}

/// `build_h` with `lambda` the vanishing order of `Phi` along `t` at `q`.
pub fn build_h_at(c: &Chain, q: &LeafPoint, phi: &Poly, t: &Direction, kmax: u32) -> Result<(u32, Poly)> {
    let lambda = mo_vanish_order(c, q, phi, t, kmax)?.ok_or(Error::DirectionNotGeneric { kmax })?;
    Ok((lambda, build_h(c, phi, t, lambda)?))
}

/// One component for the `E` construction: its `H`, its separating `Q`,
/// and sample points on it.
#[derive(Clone, Debug)]
pub struct Component {
    pub h: Poly,
    pub q: Poly,
    pub samples: Vec<LeafPoint>,
}

/// `E = sum_i H_i prod_{j != i} Q_j`. Each `Q_i` must vanish at the samples
/// of component `i` and at none of the samples of other components; then
/// every summand but the `i`-th vanishes there, which is asserted.
pub fn build_e(components: &[Component]) -> Result<Poly> {
    let first = components.first().ok_or_else(|| Error::Invalid("no components".into()))?;
    let arena = first.h.arena().clone();
    for (i, ci) in components.iter().enumerate() {
        for s in &ci.samples {
            for (j, cj) in components.iter().enumerate() {
                let v = cj.q.eval(&s.coords)?;
                if i == j && !v.is_zero() {
                    return Err(Error::Separation(format!("Q{} does not vanish on its component", i + 1)));
                }
                if i != j && v.is_zero() {
                    return Err(Error::Separation(format!("Q{} vanishes on component {}", j + 1, i + 1)));
                }
            }
        }
    }
    let mut e = Poly::zero(&arena);
    let mut summands = Vec::new();
    for (i, ci) in components.iter().enumerate() {
        let mut term = ci.h.clone();
        for (j, cj) in components.iter().enumerate() {
            if j != i {
                term = &term * &cj.q;
            }
        }
        e = &e + &term;
        summands.push(term);
    }
    for (i, ci) in components.iter().enumerate() {
        for s in &ci.samples {
            for (j, t) in summands.iter().enumerate() {
                if j != i && !t.eval(&s.coords)?.is_zero() {
                    return Err(Error::Separation(format!("summand {} survives on component {}", j + 1, i + 1)));
                }
            }
        }
    }
    let bound = components
        .iter()
        .enumerate()
        .map(|(i, ci)| {
            ci.h.degree()
                + components.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, cj)| cj.q.degree()).sum::<u32>()
        })
        .max()
        .unwrap_or(0);
    ledger("E", e.degree(), &BigUint::from(bound))?;
    Ok(e)
}

/// `E' = E^a * l^b`.
pub fn build_e_prime(e: &Poly, l: &Poly, a: u32, b: u32) -> Poly {
    &e.pow(a) * &l.pow(b)
}

/// The linear form `sum (x_i - p_i)` vanishing at `p`.
pub fn default_linear_form(c: &Chain, p: &LeafPoint) -> Poly {
    let arena = c.arena();
    let mut l = Poly::zero(arena);
    for i in 0..c.n() {
        l = &l + &Poly::var(arena, i);
        l = &l - &Poly::constant(arena, p.coords[i].clone());
    }
    l
}

/// `count` random polynomials of total degree `<= degree` in every arena
/// variable, with integer coefficients from the fixed box; deterministic
/// in `seed`.
pub fn random_polys(arena: &std::sync::Arc<Arena>, degree: u32, count: usize, seed: u64) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let terms = multi_indices(arena.len(), degree)
                .into_iter()
                .map(|a| (Monomial(a), rat(rng.gen_range(-Q_BOX..=Q_BOX))))
                .collect::<Vec<_>>();
            Poly::from_terms(arena, terms)
        })
        .collect()
}

/// `P'_j = P_j + Q_j (E')^(k_hat + 1)`, degree-checked against
/// `max(deg P_j, deg Q_j + (k_hat + 1) deg E')`.
pub fn perturb(p: &[Poly], q: &[Poly], e_prime: &Poly, k_hat: u32) -> Result<Vec<Poly>> {
    if p.len() != q.len() {
        return Err(Error::Invalid(format!("{} equations but {} perturbation polynomials", p.len(), q.len())));
    }
    let ek = e_prime.pow(k_hat + 1);
    p.iter()
        .zip(q)
        .enumerate()
        .map(|(j, (pj, qj))| {
            let r = pj + &(qj * &ek);
            let bound = pj.degree().max(qj.degree() + (k_hat + 1) * e_prime.degree());
            ledger(&format!("P'{}", j + 1), r.degree(), &BigUint::from(bound))?;
            Ok(r)
        })
        .collect()
}

/// Order comparison on one good branch of the original system.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthCheck {
    pub branch: usize,
    pub multiplicity: usize,
    pub ord_e_prime: Option<String>,
    pub ord_rho: Option<String>,
    pub ord_m: Option<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbReport {
    pub k_hat: u32,
    pub original: u64,
    pub perturbed: u64,
    pub growth: Vec<GrowthCheck>,
    pub growth_ok: bool,
    pub preserved: bool,
    /// Growth condition held and deflicity did not drop.
    pub passed: bool,
    pub ni_points: usize,
    pub ni_deltas: usize,
    pub seed: Option<u64>,
}

fn ord_of(b: &crate::deflicity::Branch, g: &Poly, base: &[Rational], max_order: u32) -> Option<Rational> {
    let plane = Arena::new(2, 0);
    let map: Vec<usize> = (0..g.nvars()).collect();
    let local = localize(g, base).remap(&plane, &map);
    match branch_order(b, &LocalFunction::exact(local), max_order) {
        BranchOrder::Finite { ord_t, ramification } => Some(Rational::new(ord_t.into(), ramification.into())),
        BranchOrder::Vanishes { .. } => None,
    }
}

/// Compares deflicity before and after perturbing `P` to `P'`, and checks
/// the growth condition `ord E' > max(ord M, ord (R - R(p)))` on every good
/// branch of the original system (`M` optional). Polynomial (`m = 0`)
/// chains with `n = 2`.
pub fn verify_preservation(
    sys: &NiSystem,
    p_prime: &[Poly],
    e_prime: &Poly,
    m_poly: Option<&Poly>,
    p: &LeafPoint,
    seed: Option<u64>,
) -> Result<PerturbReport> {
    if sys.chain.n() != 2 || sys.chain.m() != 0 {
        return Err(Error::Unsupported("preservation check needs a polynomial system with n = 2".into()));
    }
    let order = 16;
    let before = deflicity_symbolic(&DeflicityProblem::new(
        sys.chain.clone(),
        p.clone(),
        sys.equations.clone(),
        sys.rho.clone(),
        order,
    )?)?;
    let after = deflicity_symbolic(&DeflicityProblem::new(
        sys.chain.clone(),
        p.clone(),
        p_prime.to_vec(),
        sys.rho.clone(),
        order,
    )?)?;
    let base = p.x(2).to_vec();
    let r0 = sys.rho.eval(&p.coords)?;
    let rho = &sys.rho - &Poly::constant(sys.chain.arena(), r0);
    let max_order = crate::deflicity::MAX_SYMBOLIC_ORDER;
    let mut growth = Vec::new();
    for (i, b) in before.branches.iter().enumerate() {
        if b.class != BranchClass::Good {
            continue;
        }
        let oe = ord_of(b, e_prime, &base, max_order);
        let or = ord_of(b, &rho, &base, max_order);
        let om = m_poly.map(|mp| ord_of(b, mp, &base, max_order));
        let rhs = [or.clone(), om.clone().flatten()].into_iter().flatten().max();
        // E' vanishing identically on the branch counts as infinite order.
        let holds = match (&oe, &rhs) {
            (None, _) => true,
            (Some(e), Some(r)) => e > r,
            (Some(_), None) => true,
        };
        growth.push(GrowthCheck {
            branch: i,
            multiplicity: b.multiplicity,
            ord_e_prime: oe.map(|q| q.to_string()),
            ord_rho: or.map(|q| q.to_string()),
            ord_m: om.map(|o| o.map_or("inf".into(), |q| q.to_string())),
            holds,
        });
    }
    let growth_ok = growth.iter().all(|g| g.holds);
    let preserved = after.value >= before.value;
    let (ni_points, ni_deltas) = ni_deltas(sys, p_prime, p)?;
    Ok(PerturbReport {
        k_hat: sys.k_hat,
        original: before.value,
        perturbed: after.value,
        growth,
        growth_ok,
        preserved,
        passed: growth_ok && preserved,
        ni_points,
        ni_deltas,
        seed,
    })
}

/// Membership changes on a 5x5 grid of half-width 1/2 around `p`, plus `p`.
fn ni_deltas(sys: &NiSystem, p_prime: &[Poly], p: &LeafPoint) -> Result<(usize, usize)> {
    let other = sys.with_equations(p_prime.to_vec());
    let mut pts = vec![p.clone()];
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            let mut c = p.coords.clone();
            c[0] = &c[0] + ratio(a, 4);
            c[1] = &c[1] + ratio(b, 4);
            pts.push(LeafPoint::new(c));
        }
    }
    let mut deltas = 0;
    for q in &pts {
        if ni_member_numeric(sys, q)? != ni_member_numeric(&other, q)? {
            deltas += 1;
        }
    }
    Ok((pts.len(), deltas))
}

#[derive(Clone, Debug, Serialize)]
pub struct SardReport {
    pub trials: usize,
    pub failures: usize,
    pub failure_fraction: f64,
    pub points_checked: usize,
    pub seed: u64,
    pub k_hat: u32,
}

fn vanish_all(gens: &[CPoly], x: &[Complex64]) -> bool {
    gens.iter().all(|g| g.eval(x).norm() <= 1e-8)
}

/// Sample points of `{P'_1 = 0}` near `p` (x-offsets `±1/10, ±1/20, ±1/40`);
/// when `P'_1` vanishes on a whole vertical line, points along it as well.
fn curve_samples(p1: &Poly, p: &[f64]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    let maxj = p1.degree_in(1);
    for off in [0.1, -0.1, 0.05, -0.05, 0.025, -0.025] {
        let x1 = p[0] + off;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); maxj as usize + 1];
        for (m, c) in p1.terms() {
            coeffs[m.0[1] as usize] += crate::algebra::rational_to_f64(c) * x1.powi(m.0[0] as i32);
        }
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale <= 1e-12 {
            for k in -2..=2 {
                out.push(vec![Complex64::new(x1, 0.0), Complex64::new(p[1] + 0.1 * k as f64, 0.0)]);
            }
            continue;
        }
        for r in univariate_roots(&coeffs) {
            if (r - p[1]).norm() < 0.5 {
                out.push(vec![Complex64::new(x1, 0.0), r]);
            }
        }
    }
    out
}

fn sard_trial(sys: &NiSystem, p_prime: &[Poly], p: &LeafPoint) -> Result<(bool, usize)> {
    let n = sys.chain.n();
    let gens_before: Vec<CPoly> = ni_generators(sys)?.iter().map(|g| CPoly::compile(g, n, &[])).collect();
    let after = sys.with_equations(p_prime.to_vec());
    let gens_after: Vec<CPoly> = ni_generators(&after)?.iter().map(|g| CPoly::compile(g, n, &[])).collect();
    let pf: Vec<f64> = p.coords.iter().map(crate::algebra::rational_to_f64).collect();
    let mut checked = 0;
    for q in curve_samples(&p_prime[0], &pf) {
        if vanish_all(&gens_before, &q) {
            continue;
        }
        checked += 1;
        if vanish_all(&gens_after, &q) {
            return Ok((true, checked));
        }
    }
    Ok((false, checked))
}

/// For `trials` seeded random tuples `Q`, perturbs `P' = P + Q E^(k_hat+1)`
/// and checks that sampled points of `{P' = 0}` near `p` outside the
/// non-isolated locus of `P` stay outside that of `P'` (by the generator
/// test). Polynomial chains with `n = 2`.
pub fn sard_sample(sys: &NiSystem, e: &Poly, p: &LeafPoint, trials: usize, seed: u64) -> Result<SardReport> {
    if sys.chain.n() != 2 || sys.chain.m() != 0 {
        return Err(Error::Unsupported("sard sampling needs a polynomial system with n = 2".into()));
    }
    if trials == 0 {
        return Err(Error::Invalid("need at least one trial".into()));
    }
    let deg = (sys.chain.n() + sys.chain.m()) as u32;
    let mut failures = 0;
    let mut points = 0;
    for t in 0..trials {
        let q = random_polys(sys.chain.arena(), deg, sys.equations.len(), seed.wrapping_add(t as u64));
        let p_prime = perturb(&sys.equations, &q, e, sys.k_hat)?;
        let (failed, checked) = sard_trial(sys, &p_prime, p)?;
        points += checked;
        failures += failed as usize;
    }
    Ok(SardReport {
        trials,
        failures,
        failure_fraction: failures as f64 / trials as f64,
        points_checked: points,
        seed,
        k_hat: sys.k_hat,
    })
}

/// The excluded case of the genericity argument: a fixed `Q` with
/// `Q E^(k_hat+1) = -P`, so that `P'` vanishes identically. Returns the
/// single-trial report, which should record a failure.
pub fn sard_negative_control(sys: &NiSystem, q: &[Poly], e: &Poly, p: &LeafPoint) -> Result<SardReport> {
    let p_prime = perturb(&sys.equations, q, e, sys.k_hat)?;
    let (failed, checked) = sard_trial(sys, &p_prime, p)?;
    Ok(SardReport {
        trials: 1,
        failures: failed as usize,
        failure_fraction: failed as u8 as f64,
        points_checked: checked,
        seed: 0,
        k_hat: sys.k_hat,
    })
}

/// `x`-coordinates of a rational point as a leaf point of a polynomial chain.
pub fn point(coords: &[i64]) -> LeafPoint {
    LeafPoint::from_ints(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(c: Chain, eqs: &[&str], rho: &str, k: u32) -> NiSystem {
        let eqs = eqs.iter().map(|s| c.parse_poly(s).unwrap()).collect();
        let rho = c.parse_poly(rho).unwrap();
        NiSystem::new(c, eqs, rho, k).unwrap()
    }

    #[test]
    fn generators_n1() {
        let s = sys(Chain::exp(), &[], "f1", 3);
        let g = ni_generators(&s).unwrap();
        let f1 = s.chain.parse_poly("f1").unwrap();
        assert_eq!(g, vec![f1.clone(), f1.clone(), f1]);
        let s = sys(Chain::trivial(1), &[], "x1", 4);
        let g = ni_generators(&s).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g[0].is_constant());
    }

    #[test]
    fn generators_n2_cut_out_bad_axis() {
        let s = sys(Chain::trivial(2), &["x1*x2"], "x1", 2);
        let gens = ni_generators(&s).unwrap();
        for c in [-2i64, 0, 3] {
            let q = point(&[0, c]);
            assert!(gens.iter().all(|g| g.eval(&q.coords).unwrap().is_zero()));
        }
        let q = point(&[1, 0]);
        assert!(!gens.iter().all(|g| g.eval(&q.coords).unwrap().is_zero()));
    }

    #[test]
    fn membership() {
        let s = sys(Chain::trivial(2), &["x1*x2"], "x1", 4);
        assert!(ni_member_numeric(&s, &point(&[0, 1])).unwrap());
        assert!(!ni_member_numeric(&s, &point(&[1, 0])).unwrap());
        let s = sys(Chain::trivial(2), &["x2"], "x1", 4);
        assert!(!ni_member_numeric(&s, &point(&[0, 0])).unwrap());
    }

    #[test]
    fn h_examples() {
        let c = Chain::trivial(2);
        let t = Direction::from_ints(&[0, 1]);
        for (phi, lam, want) in [("x2^2", 2, "8"), ("x2", 1, "1"), ("x2^2 - x1^3", 2, "8")] {
            let h = build_h(&c, &c.parse_poly(phi).unwrap(), &t, lam).unwrap();
            assert_eq!(h, c.parse_poly(want).unwrap());
        }
        let (lam, h) = build_h_at(&c, &point(&[1, 0]), &c.parse_poly("x2^2").unwrap(), &t, 4).unwrap();
        assert_eq!((lam, h), (2, c.parse_poly("8").unwrap()));
        let err = build_h_at(&c, &point(&[0, 0]), &c.parse_poly("x1").unwrap(), &t, 4).unwrap_err();
        assert_eq!(err, Error::DirectionNotGeneric { kmax: 4 });
    }

    #[test]
    fn e_examples() {
        let c = Chain::trivial(2);
        let p = |s: &str| c.parse_poly(s).unwrap();
        let single = build_e(&[Component { h: p("x1 + 2"), q: p("x2"), samples: vec![] }]).unwrap();
        assert_eq!(single, p("x1 + 2"));
        let comps = [
            Component { h: p("1"), q: p("x1"), samples: vec![point(&[0, 1]), point(&[0, 2])] },
            Component { h: p("1"), q: p("x2"), samples: vec![point(&[1, 0])] },
        ];
        assert_eq!(build_e(&comps).unwrap(), p("x1 + x2"));
        let bad = [
            Component { h: p("1"), q: p("x1"), samples: vec![point(&[0, 0])] },
            Component { h: p("1"), q: p("x2"), samples: vec![point(&[1, 0])] },
        ];
        assert!(matches!(build_e(&bad), Err(Error::Separation(_))));
    }

    #[test]
    fn perturb_examples() {
        let c = Chain::trivial(2);
        let p = |s: &str| c.parse_poly(s).unwrap();
        assert_eq!(perturb(&[p("x2")], &[p("1")], &p("x1"), 1).unwrap(), vec![p("x2 + x1^2")]);
        assert_eq!(perturb(&[p("x2")], &[p("x1 + 5")], &p("0"), 3).unwrap(), vec![p("x2")]);
        let r = perturb(&[p("x1*x2")], &[p("x1^2 + x2")], &p("x1^3"), 1).unwrap();
        assert!(r[0].degree() <= 8);
    }

    #[test]
    fn preservation() {
        let s = sys(Chain::trivial(2), &["x2*(x2 - x1^2)"], "x1", 1);
        let c = &s.chain;
        let e = c.parse_poly("x1^4").unwrap();
        let q = random_polys(c.arena(), 2, 1, 11);
        let pp = perturb(&s.equations, &q, &e, s.k_hat).unwrap();
        let r = verify_preservation(&s, &pp, &e, None, &point(&[0, 0]), Some(11)).unwrap();
        assert_eq!((r.original, r.perturbed), (2, 2));
        assert!(r.passed);
        // negative control: E' of order 0 along the branches
        let e = c.parse_poly("1").unwrap();
        let pp = perturb(&s.equations, &[c.parse_poly("x1").unwrap()], &e, s.k_hat).unwrap();
        let r = verify_preservation(&s, &pp, &e, None, &point(&[0, 0]), None).unwrap();
        assert!(!r.growth_ok);
        let zero = c.parse_poly("0").unwrap();
        let r = verify_preservation(&s, &s.equations, &zero, None, &point(&[0, 0]), None).unwrap();
        assert_eq!(r.original, r.perturbed);
    }

    #[test]
    fn sard() {
        let s = sys(Chain::trivial(2), &["x2"], "x1", 2);
        let e = s.chain.parse_poly("x1").unwrap();
        let r = sard_sample(&s, &e, &point(&[0, 0]), 20, 1).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.points_checked > 0);
        let zero = s.chain.parse_poly("0").unwrap();
        assert_eq!(sard_sample(&s, &zero, &point(&[0, 0]), 3, 1).unwrap().failures, 0);
        // P = x2 x1^3, Q = -x2, E = x1, k_hat = 2: P' = 0
        let s = sys(Chain::trivial(2), &["x2*x1^3"], "x1", 2);
        let q = vec![s.chain.parse_poly("-x2").unwrap()];
        let r = sard_negative_control(&s, &q, &e, &point(&[0, 0])).unwrap();
        assert_eq!(r.failures, 1);
    }
}
