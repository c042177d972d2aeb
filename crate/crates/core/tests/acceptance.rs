//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! runtime. Exits nonzero when any criterion fails.
//!
//! Tolerances: all integer and bound comparisons are exact (tolerance 0);
//! runtimes are wall-clock limits in the build profile under test.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noethkit::algebra::{parse_poly, rat, Arena, BoundExpr, Monomial, Poly, Rational};
use noethkit::bounds::{self, BoundParams, MultMode};
use noethkit::chain::{multi_indices, Chain, LeafPoint};
use noethkit::deflicity::{
    deflicity_family_symbolic, deflicity_numeric, deflicity_numeric_problem, deflicity_symbolic, DeflicityProblem,
    NumericOptions,
};
use noethkit::local_mult::{mult_isolated, mult_polynomial_system, mult_univariate, Direction, MultResult};
use noethkit::ni_perturb::{
    self, build_e, build_h_at, perturb, random_polys, sard_negative_control, sard_sample, verify_preservation,
    Component, NiSystem,
};
use noethkit::numeric::domination_spot_check;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn bp(m: u64, n: u64, delta: u64, d: u64) -> BoundParams {
    BoundParams::new(m, n, delta, d).unwrap()
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

// ---------------------------------------------------------------- 1

/// `(m+1)(delta-1)/2 * (2 delta (n+m+2) - 2m - 2)^(2m+2) + delta (n+2) - 1`,
/// recomputed with signed integers as an independent oracle.
fn il_oracle(m: i64, n: i64, delta: i64) -> i128 {
    let bracket = (2 * delta * (n + m + 2) - 2 * m - 2) as i128;
    let num = ((m + 1) * (delta - 1)) as i128 * bracket.pow((2 * m + 2) as u32);
    assert_eq!(num % 2, 0);
    num / 2 + (delta * (n + 2) - 1) as i128
}

fn criterion_1() -> Check {
    ensure(bounds::deg_after_mo_u64(1, 2, 3, 2) == big(19), "d_M(1,2,3,2) != 19")?;
    // oracle: C(n+k, k) (d + k delta) - k = 3 * 7 - 2
    ensure(3 * (3 + 2 * 2) - 2 == 19, "oracle for d_M")?;
    let il = bounds::il_degree(1, 1, 2);
    ensure(il.value == big(20741) && il_oracle(1, 1, 2) == 20741, format!("d_IL(1,1,2) = {}", il.value))?;
    for m in 1..=3u64 {
        for n in 1..=3u64 {
            let v = bounds::il_degree(m, n, 1).value;
            ensure(v == big(n + 1), format!("d_IL({m},{n},1) = {v}, want {}", n + 1))?;
        }
    }
    let p = bp(1, 1, 2, 2);
    let rough = bounds::mult0_bound(&p, MultMode::Rough, 64);
    ensure(rough == BoundExpr::power(&big(2), &big(128)), format!("rough = {rough}"))?;
    ensure(rough.to_string() == "2^128", format!("rough prints as {rough}"))?;
    let exact = bounds::mult0_exact(&p, 64);
    ensure(exact.q_exact && exact.q_lo == "2" && exact.q_hi == "2", format!("Q = [{}, {}]", exact.q_lo, exact.q_hi))?;
    // oracle: X = 2 * 12^4 + 2*2*3 - 2 = 41482; first = Q/2 * X^4 with Q = 2
    let x = 2 * 12u64.pow(4) + 12 - 2;
    ensure(x == 41482, "oracle X")?;
    let want = BoundExpr::from_biguint(&num_traits::pow(big(x), 4));
    ensure(exact.first == want, format!("first exact number = {}", exact.first))?;
    ensure(exact.bound == want, format!("exact bound = {} (second = {})", exact.bound, exact.second))?;
    let main = bounds::main_bound(&p);
    ensure(main.to_string() == "2^268435456", format!("main bound prints as {main}"))?;
    ensure(main == BoundExpr::power(&big(2), &big(268435456)), "main bound value")?;
    Ok("d_M, d_IL, rough, exact (41482^4, Q=2), main bound all exact".into())
}

// ---------------------------------------------------------------- 2

fn grid() -> Vec<BoundParams> {
    let mut v = Vec::new();
    for m in 1..=2 {
        for n in 1..=2 {
            for d in 1..=3 {
                for delta in 1..=3 {
                    v.push(bp(m, n, delta, d));
                }
            }
        }
    }
    v
}

fn criterion_2() -> Check {
    let mut failing = Vec::new();
    let mut total = 0;
    for p in grid() {
        for v in bounds::verify_main_proof_chain(&p) {
            total += 1;
            if !v.holds {
                failing.push(format!("({},{},{},{}) {}", p.m, p.n, p.d, p.delta, v.name));
            }
        }
    }
    if failing.is_empty() {
        Ok(format!("{total} inequalities hold on the 36-point grid"))
    } else {
        let mut names: Vec<String> = failing.iter().map(|f| f.split_once(' ').unwrap().1.to_string()).collect();
        names.sort();
        names.dedup();
        Err(format!(
            "{} of {total} inequality checks fail; distinct failing inequalities: {}",
            failing.len(),
            names.join(" | ")
        ))
    }
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Check {
    for p in grid() {
        let r = bounds::induction_ladder(&p, p.n).map_err(|e| e.to_string())?;
        ensure(
            r.within_main_bound && r.final_bound <= bounds::main_bound(&p),
            format!("ladder exceeds main bound at ({},{},{},{})", p.m, p.n, p.d, p.delta),
        )?;
    }
    Ok("ladder with e = n within the main bound on all 36 tuples".into())
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Check {
    let c = Chain::trivial(2);
    let origin = LeafPoint::from_ints(&[0, 0]);
    for a in 1..=4 {
        for b in 1..=4 {
            let sys = [c.parse_poly(&format!("x1^{a}")).unwrap(), c.parse_poly(&format!("x2^{b}")).unwrap()];
            let r = mult_isolated(&c, &origin, &sys, 64).map_err(|e| e.to_string())?;
            ensure(r.value() == Some((a * b) as u64), format!("mult(x1^{a}, x2^{b}) = {r:?}"))?;
        }
    }
    let sys = [c.parse_poly("x1^2 - x2^3").unwrap(), c.parse_poly("x2^2").unwrap()];
    let r = mult_isolated(&c, &origin, &sys, 64).map_err(|e| e.to_string())?;
    ensure(r.value() == Some(4), format!("mult(x1^2 - x2^3, x2^2) = {r:?}"))?;
    let e = Chain::exp();
    let psi = e.parse_poly("f1 - 1 - x1 - x1^2/2").unwrap();
    let q = LeafPoint::from_ints(&[0, 1]);
    let r = mult_univariate(&e, &q, &psi, 64).map_err(|e| e.to_string())?;
    ensure(r.value() == Some(3), format!("exp-chain mult = {r:?}"))?;
    let r = mult_isolated(&e, &q, &[psi], 64).map_err(|e| e.to_string())?;
    ensure(r.value() == Some(3), format!("exp-chain mult_isolated = {r:?}"))?;
    Ok("monomial products, cusp pair 4, exp jet remainder 3".into())
}

// ---------------------------------------------------------------- 5

fn family(eqs: &[&str]) -> Vec<Poly> {
    let a = Arena::with_eps(eqs.len(), 0);
    eqs.iter().map(|s| parse_poly(s, &a).unwrap()).collect()
}

fn zeros(n: usize) -> Vec<Rational> {
    vec![rat(0); n]
}

fn criterion_5() -> Check {
    let opts = NumericOptions::default();
    ensure(opts.eps_samples.len() >= 2, "need two eps samples")?;
    let mut lines = Vec::new();
    for (eqs, want) in [(vec!["x1^2 - eps"], 2u64), (vec!["x1^2 - eps", "x2^2 - eps"], 4), (vec!["eps*x1", "x2"], 1)] {
        let f = family(&eqs);
        let s = deflicity_family_symbolic(&f, &zeros(eqs.len())).map_err(|e| e.to_string())?;
        let n = deflicity_numeric(&f, &zeros(eqs.len()), &opts).map_err(|e| e.to_string())?;
        ensure(s.value == want && n.value == want, format!("{eqs:?}: symbolic {} numeric {}", s.value, n.value))?;
        lines.push(format!("{want}"));
    }
    let c = Chain::trivial(2);
    for (psi, rho, want) in [("x2*(x2 - x1^2)", "x1", 2u64), ("x2^2", "x2", 0)] {
        let prob = DeflicityProblem::new(
            c.clone(),
            LeafPoint::from_ints(&[0, 0]),
            vec![c.parse_poly(psi).unwrap()],
            c.parse_poly(rho).unwrap(),
            8,
        )
        .map_err(|e| e.to_string())?;
        let s = deflicity_symbolic(&prob).map_err(|e| e.to_string())?;
        let n = deflicity_numeric_problem(&prob, &opts).map_err(|e| e.to_string())?;
        ensure(s.value == want && n.value == want, format!("{psi}, rho={rho}: symbolic {} numeric {}", s.value, n.value))?;
        lines.push(format!("{want}"));
    }
    Ok(format!("values [{}], symbolic = numeric, stable over eps 1e-3 and 1e-4", lines.join(", ")))
}

// ---------------------------------------------------------------- 6

/// Families whose limit at `eps = 0` has an isolated zero at the origin.
const CONSERVATION_FAMILIES: &[&[&str]] = &[
    &["x1^2 - eps"],
    &["x1^3 - eps*x1 - eps"],
    &["x1^2 - eps", "x2^2 - eps"],
    &["x1^2 - x2^3 - eps", "x2^2 - eps"],
    &["x1^2 + x2^2 - eps", "x1*x2"],
    &["x1^2 - eps", "x2 - eps", "x3^2 - x1"],
];

fn limit_multiplicity(eqs: &[&str]) -> MultResult {
    let c = Chain::trivial(eqs.len());
    let sys: Vec<Poly> = eqs.iter().map(|s| c.parse_poly(&s.replace("eps", "0")).unwrap()).collect();
    let origin = LeafPoint::new(zeros(eqs.len()));
    let r = mult_isolated(&c, &origin, &sys, 64).unwrap();
    // cross-check against the plain polynomial route
    assert_eq!(r, mult_polynomial_system(&sys, 64));
    r
}

fn criterion_6() -> Check {
    let mut vals = Vec::new();
    for eqs in CONSERVATION_FAMILIES {
        let lim = limit_multiplicity(eqs).value().ok_or(format!("{eqs:?}: limit not isolated"))?;
        let f = family(eqs);
        let n = deflicity_numeric(&f, &zeros(eqs.len()), &NumericOptions::default()).map_err(|e| e.to_string())?;
        ensure(n.value == lim, format!("{eqs:?}: numeric {} vs limit multiplicity {lim}", n.value))?;
        vals.push(lim.to_string());
    }
    Ok(format!("6 families, counts [{}] equal limit multiplicities", vals.join(", ")))
}

// ---------------------------------------------------------------- 7

fn random_poly(arena: &std::sync::Arc<Arena>, rng: &mut ChaCha8Rng, max_deg: u32) -> Poly {
    let mut p = Poly::zero(arena);
    for _ in 0..rng.gen_range(1..=5) {
        let deg = rng.gen_range(0..=max_deg);
        let idx = multi_indices(arena.len(), deg);
        let a = idx[rng.gen_range(0..idx.len())].clone();
        p.add_term(Monomial(a), rat(rng.gen_range(-5..=5)));
    }
    p
}

fn corpus_chains() -> Vec<(&'static str, Chain)> {
    vec![
        ("trivial2", Chain::trivial(2)),
        ("exp", Chain::exp()),
        ("trig", Chain::trig()),
        ("bracket", Chain::parse(2, 1, &[vec!["f1"], vec!["x1"]]).unwrap()),
        ("exp_sum", Chain::parse(2, 1, &[vec!["f1"], vec!["f1"]]).unwrap()),
        ("product", Chain::parse(2, 1, &[vec!["x2"], vec!["x1"]]).unwrap()),
    ]
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checks = 0;
    for (name, c) in corpus_chains() {
        for _ in 0..100 {
            let p = random_poly(c.arena(), &mut rng, 4);
            let q = random_poly(c.arena(), &mut rng, 4);
            for i in 1..=c.n() {
                let lhs = c.derive(&(&p * &q), i).unwrap();
                let rhs = &(&c.derive(&p, i).unwrap() * &q) + &(&p * &c.derive(&q, i).unwrap());
                ensure(lhs == rhs, format!("{name}: Leibniz fails for V{i} on {p} and {q}"))?;
                let dp = c.derive(&p, i).unwrap();
                ensure(
                    dp.is_zero() || dp.degree() + 1 <= p.degree() + c.delta().max(1),
                    format!("{name}: deg V{i}({p}) = {} exceeds bound", dp.degree()),
                )?;
                checks += 2;
            }
        }
    }
    let t = Chain::trig();
    let cons = t.derive(&t.parse_poly("f1^2 + f2^2").unwrap(), 1).unwrap();
    ensure(cons.is_zero(), format!("V(f1^2 + f2^2) = {cons}"))?;
    Ok(format!("{checks} Leibniz/degree checks over 6 chains; trig conservation exact"))
}

// ---------------------------------------------------------------- 8

fn permutations(w: &[usize]) -> Vec<Vec<usize>> {
    if w.len() <= 1 {
        return vec![w.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..w.len() {
        let mut rest = w.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn words(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..max_len {
        out = out.iter().flat_map(|w| (1..=n).map(move |i| [w.clone(), vec![i]].concat())).collect();
        all.extend(out.clone());
    }
    all
}

fn criterion_8() -> Check {
    let c = Chain::parse(2, 1, &[vec!["f1"], vec!["x1"]]).unwrap();
    let gens = c.il_generators(1);
    ensure(gens == vec![c.parse_poly("1 - x1").unwrap()], format!("il_generators = {gens:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for (name, c) in corpus_chains() {
        if name == "bracket" {
            // no integral manifolds: the bracket locus {x1 = 1} is not invariant
            continue;
        }
        let mut points = 0;
        while points < 5 {
            let coords: Vec<i64> = (0..c.n() + c.m()).map(|_| rng.gen_range(-3..=3)).collect();
            let q = LeafPoint::from_ints(&coords);
            if !c.il_test(&q, c.default_il_depth()).unwrap() {
                continue;
            }
            points += 1;
            let p = random_poly(c.arena(), &mut rng, 3);
            for w in words(c.n(), 3) {
                let v0 = c.iterated_derive(&p, &w).unwrap().eval(&q.coords).unwrap();
                for perm in permutations(&w) {
                    let v = c.iterated_derive(&p, &perm).unwrap().eval(&q.coords).unwrap();
                    ensure(v == v0, format!("{name}: word {w:?} vs {perm:?} at {coords:?}"))?;
                    checked += 1;
                }
            }
            let jet = c.jet(&q, &p, 3).unwrap();
            ensure(!jet.off_locus, format!("{name}: jet flagged off locus"))?;
        }
    }
    Ok(format!("generators {{1 - x1}}; {checked} permuted-word evaluations agree at 5 points per chain"))
}

// ---------------------------------------------------------------- 9

fn ni_sys(psi: &str, rho: &str, k_hat: u32) -> NiSystem {
    let c = Chain::trivial(2);
    let p = c.parse_poly(psi).unwrap();
    let r = c.parse_poly(rho).unwrap();
    NiSystem::new(c, vec![p], r, k_hat).unwrap()
}

fn criterion_9() -> Check {
    let origin = LeafPoint::from_ints(&[0, 0]);
    let mut notes = Vec::new();
    for (psi, rho, e, k_hat, seed) in
        [("x2*(x2 - x1^2)", "x1", "x1^4", 1, 11u64), ("x2^2 - x1^3", "x1", "x1^3", 1, 12), ("x2 - x1^2", "x2", "x1^3", 2, 13)]
    {
        let s = ni_sys(psi, rho, k_hat);
        let e = s.chain.parse_poly(e).unwrap();
        let q = random_polys(s.chain.arena(), 2, 1, seed);
        let pp = perturb(&s.equations, &q, &e, k_hat).map_err(|e| e.to_string())?;
        let r = verify_preservation(&s, &pp, &e, None, &origin, Some(seed)).map_err(|e| e.to_string())?;
        ensure(r.growth_ok, format!("{psi}: growth condition not met"))?;
        ensure(r.passed, format!("{psi}: deflicity {} -> {}", r.original, r.perturbed))?;
        notes.push(format!("{}->{}", r.original, r.perturbed));
    }
    for (psi, rho, e) in [("x2", "x1", "x1"), ("x2 - x1^2", "x1", "x1"), ("x2 - x1^3", "x1", "x1^2")] {
        let s = ni_sys(psi, rho, 2);
        let e = s.chain.parse_poly(e).unwrap();
        let r = sard_sample(&s, &e, &origin, 20, 0x5eed).map_err(|e| e.to_string())?;
        ensure(r.failure_fraction == 0.0 && r.points_checked > 0, format!("{psi}: sard {r:?}"))?;
    }
    // ledger: every construction checks its degree and errors on violation
    let c = Chain::trivial(2);
    let t = Direction::from_ints(&[0, 1]);
    let (_, h1) = build_h_at(&c, &LeafPoint::from_ints(&[1, 0]), &c.parse_poly("x2^2").unwrap(), &t, 4)
        .map_err(|e| e.to_string())?;
    let (_, h2) = build_h_at(&c, &origin, &c.parse_poly("x2^2 - x1^3").unwrap(), &t, 4).map_err(|e| e.to_string())?;
    let e = build_e(&[
        Component { h: h1, q: c.parse_poly("x1").unwrap(), samples: vec![LeafPoint::from_ints(&[0, 2])] },
        Component { h: h2, q: c.parse_poly("x2").unwrap(), samples: vec![LeafPoint::from_ints(&[3, 0])] },
    ])
    .map_err(|e| e.to_string())?;
    for s in [ni_sys("x1*x2", "x1", 4), ni_sys("x2^2 - x1^3", "x1 + x2", 4)] {
        ni_perturb::ni_generators(&s).map_err(|e| e.to_string())?;
    }
    // negative controls, reported only
    let s = ni_sys("x2*(x2 - x1^2)", "x1", 1);
    let one = s.chain.parse_poly("1").unwrap();
    let pp = perturb(&s.equations, &[s.chain.parse_poly("x1").unwrap()], &one, 1).map_err(|e| e.to_string())?;
    let weak = verify_preservation(&s, &pp, &one, None, &origin, None).map_err(|e| e.to_string())?;
    let s = ni_sys("x2*x1^3", "x1", 2);
    let x1 = s.chain.parse_poly("x1").unwrap();
    let adv = sard_negative_control(&s, &[s.chain.parse_poly("-x2").unwrap()], &x1, &origin).map_err(|e| e.to_string())?;
    Ok(format!(
        "preservation [{}]; sard 0/20 on 3 cases; ledger clean (E = {e}); controls: weak growth_ok={}, adversarial failures={}",
        notes.join(", "),
        weak.growth_ok,
        adv.failures
    ))
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Check {
    let b = bounds::loja_exponent_bound(&bp(1, 1, 2, 2));
    ensure(b.to_string() == "12^134217728", format!("loja bound prints as {b}"))?;
    // oracle: (2(d + delta - 1)(m+n))^(16 (m+n)^(20n+3)) = 12^(16 * 2^23)
    ensure(b == BoundExpr::power(&big(12), &big(1 << 27)), "loja bound value")?;
    let a = Arena::new(2, 0);
    let f = parse_poly("x1^2", &a).unwrap();
    let g = parse_poly("x1", &a).unwrap();
    let s = domination_spot_check(&f, &g, 2, 3, 1000, (0.0, 0.5), 10);
    ensure(s.points == 1000 && s.violations == 0, format!("spot check {s:?}"))?;
    Ok(format!("12^134217728; |f| > |g|^3 at all 1000 points (min ratio {:.3})", s.min_ratio))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("formula golden values", criterion_1, Duration::from_secs(1)),
        ("proof-chain verification", criterion_2, Duration::from_secs(60)),
        ("induction ladder", criterion_3, Duration::from_secs(60)),
        ("multiplicity oracle", criterion_4, Duration::from_secs(10)),
        ("deflicity suite", criterion_5, Duration::from_secs(30)),
        ("conservation of number", criterion_6, Duration::from_secs(30)),
        ("derivation calculus", criterion_7, Duration::from_secs(10)),
        ("integrability", criterion_8, Duration::from_secs(10)),
        ("perturbation machinery", criterion_9, Duration::from_secs(60)),
        ("inequality exponent", criterion_10, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let (ok, msg) = match out {
            Ok(m) if dt <= *limit => (true, m),
            Ok(m) => (false, format!("{m}; too slow ({dt:.2?} > {limit:?})")),
            Err(m) => (false, m),
        };
        failed += !ok as usize;
        println!(
            "acceptance criterion {:>2} [{}] {}: {} ({:.2?})",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            name,
            msg,
            dt
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
