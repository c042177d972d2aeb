//! `noethkit` command line: argument parsing, dispatch and JSON reports.
//!
//! Every command prints one JSON object `{command, inputs, result}` on
//! success, or `{command, inputs, error}` on failure. Exit codes: 0 success,
//! 2 parse or usage error, 3 point not integrable, 4 inconclusive oracle,
//! 5 degree ledger violation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use noethkit::algebra::{parse_poly, Arena, BoundExpr, Poly, Rational};
use noethkit::bounds::{self, BoundParams};
use noethkit::chain::{Chain, LeafPoint};
use noethkit::chainfile::{parse_chain_file, parse_point_csv, resolve_point, ChainFile, LoadedChain};
use noethkit::deflicity::{
    deflicity_family_symbolic, deflicity_numeric, deflicity_numeric_problem, deflicity_symbolic, DeflicityProblem,
    NumericOptions,
};
use noethkit::local_mult::{mult_isolated, MultResult};
use noethkit::ni_perturb::{self, NiSystem};
use noethkit::numeric::domination_spot_check;
use noethkit::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed;
/// Bounds are expanded to decimals only below this many digits.
pub const EXPAND_DIGITS: u64 = 2_000;

#[derive(Debug, Parser)]
#[command(name = "noethkit", version, about = "Multiplicity and deformation-count toolkit for Noetherian functions")]
pub struct Cli {
    /// Compact single-line JSON instead of pretty-printed output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for grid commands.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree and multiplicity bounds for one parameter tuple.
    Bounds(BoundsArgs),
    /// Check every inequality of the degree induction over a parameter grid.
    VerifyBoundsGrid(GridArgs),
    /// Apply a word of chain derivations to a polynomial.
    Derive(DeriveArgs),
    /// Taylor jet of a Noetherian function at a point.
    Jet(JetArgs),
    /// Integrability generators and point test.
    Il(IlArgs),
    /// Multiplicity of an isolated common zero.
    Mult(MultArgs),
    /// Deflicity of a curve germ or of a one-parameter family.
    Deflicity(DeflicityArgs),
    /// Non-isolated intersection generators and membership.
    Ni(NiArgs),
    /// Perturb equations and check that deflicity is preserved.
    PerturbVerify(PerturbArgs),
    /// Genericity sampling of random perturbations.
    Sard(SardArgs),
    /// Exponent bound for the inequality |f| >= c |g|^e, with a spot check.
    Loja(LojaArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ParamArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub delta: u64,
    #[arg(long)]
    pub d: u64,
}

impl ParamArgs {
    fn params(&self) -> Result<BoundParams> {
        BoundParams::new(self.m, self.n, self.delta, self.d)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Bits for the enclosure of the transcendental constant.
    #[arg(long, default_value_t = 64)]
    pub precision: u32,
    /// Add decimal expansions of bounds with fewer than 2000 digits.
    #[arg(long)]
    pub expand: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    /// `m` and `n` range over `1..=max-mn`.
    #[arg(long, default_value_t = 2)]
    pub max_mn: u64,
    /// `d` and `delta` range over `1..=max-d`.
    #[arg(long, default_value_t = 3)]
    pub max_d: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ChainArg {
    /// Chain file (JSON); omitted means the polynomial chain with `--dim` variables.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Number of x variables when no chain file is given.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct DeriveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    #[arg(long)]
    pub poly: String,
    /// Comma-separated 1-based axes; the rightmost is applied first.
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args, Serialize)]
pub struct JetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    #[arg(long)]
    pub poly: String,
    /// Coordinates `x1..xn, f1..fm` as CSV, or a point name from the chain file.
    #[arg(long)]
    pub point: String,
    #[arg(long, default_value_t = 4)]
    pub order: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct IlArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    /// Bracket depth; defaults to 2(m+1).
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub point: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct MultArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    /// n polynomials separated by `;`.
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub point: String,
    /// Largest truncation order tried.
    #[arg(long, default_value_t = 64)]
    pub order: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct DeflicityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    /// n - 1 equations separated by `;`.
    #[arg(long, default_value = "")]
    pub system: String,
    #[arg(long)]
    pub rho: Option<String>,
    /// A square family in x1..xn and eps, separated by `;` (replaces --system and --rho).
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub point: String,
    /// Starting jet order for non-polynomial chains.
    #[arg(long, default_value_t = 8)]
    pub order: u32,
    /// Also count roots numerically.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct NiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    #[arg(long, default_value = "")]
    pub system: String,
    #[arg(long)]
    pub rho: String,
    /// Working order.
    #[arg(long, default_value_t = ni_perturb::DEFAULT_K_HAT)]
    pub k_hat: u32,
    #[arg(long)]
    pub point: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct PerturbArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub point: String,
    /// The factor E' of the perturbation.
    #[arg(long)]
    pub e_prime: String,
    /// Perturbation tuple separated by `;`; random (seeded) when omitted.
    #[arg(long)]
    pub q: Option<String>,
    /// Optional M for the growth condition.
    #[arg(long)]
    pub m_poly: Option<String>,
    #[arg(long, default_value_t = ni_perturb::DEFAULT_K_HAT)]
    pub k_hat: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SardArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArg,
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub point: String,
    #[arg(long)]
    pub e: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = ni_perturb::DEFAULT_K_HAT)]
    pub k_hat: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct LojaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Spot check: f and g in x1, x2 with `{f = 0}` inside `{g = 0}`.
    #[arg(long, requires = "g")]
    pub f: Option<String>,
    #[arg(long, requires = "f")]
    pub g: Option<String>,
    /// Desk-scale exponent for the spot check.
    #[arg(long, default_value_t = 3)]
    pub exponent: u32,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn bound_json(b: &BoundExpr, expand: bool) -> Value {
    let mut v = json!({ "power": b.to_string() });
    if let Some((lo, hi)) = bounds::log10_enclosure(b) {
        v["log10"] = json!([lo, hi]);
    }
    if expand {
        if let Some(x) = b.expand_ceil(EXPAND_DIGITS) {
            v["decimal"] = json!(x.to_string());
        }
    }
    v
}

fn load_chain(a: &ChainArg) -> Result<LoadedChain> {
    match (&a.chain, a.dim) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
            let loaded = parse_chain_file(&text)?;
            if let Some(d) = a.dim {
                if d != loaded.chain.n() {
                    return Err(Error::Invalid(format!("--dim {d} disagrees with chain n = {}", loaded.chain.n())));
                }
            }
            Ok(loaded)
        }
        (None, Some(n)) => ChainFile::trivial(n).load(),
        (None, None) => Err(Error::Invalid("need --chain <file> or --dim <n>".into())),
    }
}

fn split_polys(text: &str, c: &Chain) -> Result<Vec<Poly>> {
    text.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| c.parse_poly(s)).collect()
}

fn point_json(p: &LeafPoint) -> Value {
    json!(p.coords.iter().map(Rational::to_string).collect::<Vec<_>>())
}

fn require_integrable(c: &Chain, p: &LeafPoint) -> Result<()> {
    let depth = c.default_il_depth();
    if !c.il_test(p, depth)? {
        return Err(Error::NotIntegrable { depth });
    }
    Ok(())
}

/// Result value plus a non-error exit code (markers give 4).
type Reported = (Value, i32);

fn cmd_bounds(a: &BoundsArgs) -> Result<Reported> {
    let p = a.params.params()?;
    let il = bounds::il_degree(p.m, p.n, p.delta);
    let exact = bounds::mult0_exact(&p, a.precision);
    let ind = bounds::induction_degree(&p);
    Ok((
        json!({
            "d_il": { "value": il.value.to_string(), "rounded": il.rounded },
            "mult_rough": bound_json(&bounds::mult0_rough(&p), a.expand),
            "mult_exact": {
                "q_enclosure": [exact.q_lo, exact.q_hi],
                "q_exact": exact.q_exact,
                "q_ceil": exact.q_ceil,
                "first": bound_json(&exact.first, a.expand),
                "second": bound_json(&exact.second, a.expand),
                "bound": bound_json(&exact.bound, a.expand),
            },
            "rough_k": bound_json(&ind.k, a.expand),
            "main_bound": bound_json(&bounds::main_bound(&p), a.expand),
            "loja_exponent": bound_json(&bounds::loja_exponent_bound(&p), a.expand),
            "induction": serde_json::to_value(&ind).expect("serializable"),
        }),
        0,
    ))
}

fn grid_cell(m: u64, n: u64, d: u64, delta: u64) -> Result<Value> {
    let p = BoundParams::new(m, n, delta, d)?;
    let verdicts = bounds::verify_main_proof_chain(&p);
    let all = verdicts.iter().all(|v| v.holds);
    let ladder = bounds::induction_ladder(&p, n)?;
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.holds).map(|v| v.name.as_str()).collect();
    Ok(json!({
        "m": m, "n": n, "d": d, "delta": delta,
        "all_true": all,
        "failed": failed,
        "verdicts": verdicts,
        "ladder_within_main_bound": ladder.within_main_bound,
    }))
}

fn cmd_grid(a: &GridArgs, jobs: usize) -> Result<Reported> {
    if a.max_mn == 0 || a.max_d == 0 || a.max_mn > 4 || a.max_d > 8 {
        return Err(Error::Invalid("grid limits must satisfy 1 <= max-mn <= 4, 1 <= max-d <= 8".into()));
    }
    let mut tuples = Vec::new();
    for m in 1..=a.max_mn {
        for n in 1..=a.max_mn {
            for d in 1..=a.max_d {
                for delta in 1..=a.max_d {
                    tuples.push((m, n, d, delta));
                }
            }
        }
    }
    let jobs = jobs.clamp(1, 64);
    let mut cells: Vec<Option<Result<Value>>> = (0..tuples.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunk = tuples.len().div_ceil(jobs);
        for (ts, out) in tuples.chunks(chunk).zip(cells.chunks_mut(chunk)) {
            s.spawn(move || {
                for (t, o) in ts.iter().zip(out.iter_mut()) {
                    *o = Some(grid_cell(t.0, t.1, t.2, t.3));
                }
            });
        }
    });
    let cells: Vec<Value> = cells.into_iter().map(|c| c.expect("every cell computed")).collect::<Result<_>>()?;
    let all = cells.iter().all(|c| c["all_true"] == json!(true));
    let ladder = cells.iter().all(|c| c["ladder_within_main_bound"] == json!(true));
    Ok((json!({ "all_true": all, "ladder_all_within_main_bound": ladder, "cells": cells }), 0))
}

fn cmd_derive(a: &DeriveArgs) -> Result<Reported> {
    let l = load_chain(&a.chain)?;
    let p = l.chain.parse_poly(&a.poly)?;
    let word = a
        .word
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Invalid(format!("bad axis `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    let r = l.chain.iterated_derive(&p, &word)?;
    Ok((json!({ "poly": r.to_string(), "degree": r.degree() }), 0))
}

fn cmd_jet(a: &JetArgs) -> Result<Reported> {
    let l = load_chain(&a.chain)?;
    let q = resolve_point(&a.point, &l)?;
    let p = l.chain.parse_poly(&a.poly)?;
    require_integrable(&l.chain, &q)?;
    let j = l.chain.jet(&q, &p, a.order)?;
    Ok((
        json!({
            "series": j.series.to_string(),
            "order": j.order,
            "order_of_vanishing": j.order_of_vanishing(),
            "point": point_json(&q),
        }),
        0,
    ))
}

fn cmd_il(a: &IlArgs) -> Result<Reported> {
    let l = load_chain(&a.chain)?;
    let c = &l.chain;
    let depth = a.depth.unwrap_or_else(|| c.default_il_depth());
    let gens: Vec<String> = c.il_generators(depth).iter().map(|g| g.to_string()).collect();
    let bound = bounds::il_degree(c.m() as u64, c.n() as u64, c.delta() as u64);
    let mut v = json!({
        "depth": depth,
        "generators": gens,
        "degree_bound": bound.value.to_string(),
    });
    let mut code = 0;
    if let Some(ps) = &a.point {
        let q = resolve_point(ps, &l)?;
        let ok = c.il_test(&q, depth)?;
        v["point"] = point_json(&q);
        v["integrable"] = json!(ok);
        if !ok {
            code = Error::NotIntegrable { depth }.exit_code();
        }
    }
    Ok((v, code))
}

fn mult_code(r: &MultResult) -> i32 {
    match r {
        MultResult::Finite { .. } => 0,
        MultResult::NotIsolated { order } => Error::Inconclusive { order: *order, reason: String::new() }.exit_code(),
    }
}

fn cmd_mult(a: &MultArgs) -> Result<Reported> {
    let l = load_chain(&a.chain)?;
    let q = resolve_point(&a.point, &l)?;
    let sys = split_polys(&a.system, &l.chain)?;
    let r = mult_isolated(&l.chain, &q, &sys, a.order)?;
    Ok((serde_json::to_value(r).expect("serializable"), mult_code(&r)))
}

fn numeric_opts(seed: u64) -> NumericOptions {
    NumericOptions { seed, ..NumericOptions::default() }
}

fn cmd_deflicity(a: &DeflicityArgs) -> Result<Reported> {
    if let Some(fam) = &a.family {
        if a.chain.chain.is_some() || a.rho.is_some() {
            return Err(Error::Invalid("--family excludes --chain and --rho".into()));
        }
        let parts: Vec<&str> = fam.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
        let arena = Arena::with_eps(parts.len(), 0);
        let family = parts.iter().map(|s| parse_poly(s, &arena)).collect::<std::result::Result<Vec<_>, _>>()?;
        let x0 = parse_point_csv(&a.point)?;
        if x0.len() != family.len() {
            return Err(Error::Invalid(format!("point needs {} coordinates", family.len())));
        }
        let sym = deflicity_family_symbolic(&family, &x0);
        let mut v = json!({ "mode": "family", "point": x0.iter().map(Rational::to_string).collect::<Vec<_>>() });
        match &sym {
            Ok(r) => {
                v["value"] = json!(r.value);
                v["method"] = json!(r.method);
                v["approximate"] = json!(r.approximate);
                v["branches"] = json!(r.branches.iter().map(|b| b.view()).collect::<Vec<_>>());
            }
            Err(Error::Unsupported(msg)) if a.numeric => v["symbolic_unsupported"] = json!(msg),
            Err(e) => return Err(e.clone()),
        }
        if a.numeric {
            let num = deflicity_numeric(&family, &x0, &numeric_opts(a.seed))?;
            if let Ok(r) = &sym {
                v["agree"] = json!(r.value == num.value);
            } else {
                v["value"] = json!(num.value);
            }
            v["numeric"] = serde_json::to_value(&num).expect("serializable");
        }
        return Ok((v, 0));
    }
    let l = load_chain(&a.chain)?;
    let q = resolve_point(&a.point, &l)?;
    let rho = l.chain.parse_poly(a.rho.as_deref().ok_or_else(|| Error::Invalid("need --rho or --family".into()))?)?;
    let eqs = split_polys(&a.system, &l.chain)?;
    let prob = DeflicityProblem::new(l.chain.clone(), q.clone(), eqs, rho, a.order)?;
    let r = deflicity_symbolic(&prob)?;
    let mut v = json!({
        "mode": "curve",
        "value": r.value,
        "approximate": r.approximate,
        "jet_order": r.order,
        "vanishing_markers": r.vanishing_markers,
        "branches": r.branches.iter().map(|b| b.view()).collect::<Vec<_>>(),
        "point": point_json(&q),
    });
    if a.numeric {
        let num = deflicity_numeric_problem(&prob, &numeric_opts(a.seed))?;
        v["agree"] = json!(num.value == r.value);
        v["numeric"] = serde_json::to_value(&num).expect("serializable");
    }
    Ok((v, 0))
}

fn ni_system(chain: &ChainArg, system: &str, rho: &str, k_hat: u32) -> Result<(LoadedChain, NiSystem)> {
    let l = load_chain(chain)?;
    let eqs = split_polys(system, &l.chain)?;
    let rho = l.chain.parse_poly(rho)?;
    let sys = NiSystem::new(l.chain.clone(), eqs, rho, k_hat)?;
    Ok((l, sys))
}

fn cmd_ni(a: &NiArgs) -> Result<Reported> {
    let (l, sys) = ni_system(&a.chain, &a.system, &a.rho, a.k_hat)?;
    let gens = ni_perturb::ni_generators(&sys)?;
    let mut v = json!({
        "k_hat": sys.k_hat,
        "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    });
    if let Some(ps) = &a.point {
        let q = resolve_point(ps, &l)?;
        require_integrable(&l.chain, &q)?;
        let zero = Rational::from_integer(Default::default());
        let mut vanish = true;
        for g in &gens {
            vanish &= g.eval(&q.coords)? == zero;
        }
        v["point"] = point_json(&q);
        v["member"] = json!(ni_perturb::ni_member_numeric(&sys, &q)?);
        v["generators_vanish"] = json!(vanish);
    }
    Ok((v, 0))
}

fn cmd_perturb(a: &PerturbArgs) -> Result<Reported> {
    let (l, sys) = ni_system(&a.chain, &a.system, &a.rho, a.k_hat)?;
    let q0 = resolve_point(&a.point, &l)?;
    let c = &l.chain;
    let e_prime = c.parse_poly(&a.e_prime)?;
    let (q, seed) = match &a.q {
        Some(text) => (split_polys(text, c)?, None),
        None => {
            let deg = (c.n() + c.m()) as u32;
            (ni_perturb::random_polys(c.arena(), deg, sys.equations.len(), a.seed), Some(a.seed))
        }
    };
    let m_poly = a.m_poly.as_deref().map(|s| c.parse_poly(s)).transpose()?;
    let p_prime = ni_perturb::perturb(&sys.equations, &q, &e_prime, sys.k_hat)?;
    let report = ni_perturb::verify_preservation(&sys, &p_prime, &e_prime, m_poly.as_ref(), &q0, seed)?;
    Ok((
        json!({
            "q": q.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "perturbed": p_prime.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "report": report,
        }),
        0,
    ))
}

fn cmd_sard(a: &SardArgs) -> Result<Reported> {
    let (l, sys) = ni_system(&a.chain, &a.system, &a.rho, a.k_hat)?;
    let q0 = resolve_point(&a.point, &l)?;
    let e = l.chain.parse_poly(&a.e)?;
    let r = ni_perturb::sard_sample(&sys, &e, &q0, a.trials, a.seed)?;
    Ok((serde_json::to_value(r).expect("serializable"), 0))
}

fn cmd_loja(a: &LojaArgs) -> Result<Reported> {
    let p = a.params.params()?;
    let mut v = json!({ "exponent_bound": bound_json(&bounds::loja_exponent_bound(&p), false) });
    if let (Some(f), Some(g)) = (&a.f, &a.g) {
        let arena = Arena::new(2, 0);
        let (f, g) = (parse_poly(f, &arena)?, parse_poly(g, &arena)?);
        let s = domination_spot_check(&f, &g, 2, a.exponent, a.samples, (0.0, 0.5), a.seed);
        v["spot_check"] = json!({
            "box": [0.0, 0.5],
            "exponent": a.exponent,
            "points": s.points,
            "violations": s.violations,
            "min_ratio": if s.min_ratio.is_finite() { json!(s.min_ratio) } else { json!("inf") },
        });
    }
    Ok((v, 0))
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Poly(_) => "poly",
        Error::AxisOutOfRange { .. } => "axis_out_of_range",
        Error::Invalid(_) => "invalid",
        Error::Precondition(_) => "precondition",
        Error::NotIntegrable { .. } => "not_integrable",
        Error::Inconclusive { .. } => "inconclusive",
        Error::UnstableCount(_) => "unstable_count",
        Error::SolverFailure(_) => "solver_failure",
        Error::VanishesThrough { .. } => "vanishes_through",
        Error::PrecisionInsufficient { .. } => "precision_insufficient",
        Error::DirectionNotGeneric { .. } => "direction_not_generic",
        Error::Separation(_) => "separation",
        Error::Unsupported(_) => "unsupported",
        Error::DegreeLedger { .. } => "degree_ledger",
    }
}

fn inputs_of(cmd: &Command) -> (&'static str, Value) {
    let v = |x: &dyn erased::Ser| x.to_value();
    match cmd {
        Command::Bounds(a) => ("bounds", v(a)),
        Command::VerifyBoundsGrid(a) => ("verify-bounds-grid", v(a)),
        Command::Derive(a) => ("derive", v(a)),
        Command::Jet(a) => ("jet", v(a)),
        Command::Il(a) => ("il", v(a)),
        Command::Mult(a) => ("mult", v(a)),
        Command::Deflicity(a) => ("deflicity", v(a)),
        Command::Ni(a) => ("ni", v(a)),
        Command::PerturbVerify(a) => ("perturb-verify", v(a)),
        Command::Sard(a) => ("sard", v(a)),
        Command::Loja(a) => ("loja", v(a)),
    }
}

mod erased {
    pub trait Ser {
        fn to_value(&self) -> serde_json::Value;
    }
    impl<T: serde::Serialize> Ser for T {
        fn to_value(&self) -> serde_json::Value {
            serde_json::to_value(self).expect("arguments serialize")
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Reported> {
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::VerifyBoundsGrid(a) => cmd_grid(a, cli.jobs),
        Command::Derive(a) => cmd_derive(a),
        Command::Jet(a) => cmd_jet(a),
        Command::Il(a) => cmd_il(a),
        Command::Mult(a) => cmd_mult(a),
        Command::Deflicity(a) => cmd_deflicity(a),
        Command::Ni(a) => cmd_ni(a),
        Command::PerturbVerify(a) => cmd_perturb(a),
        Command::Sard(a) => cmd_sard(a),
        Command::Loja(a) => cmd_loja(a),
    }
}

fn render(v: &Value, compact: bool) -> String {
    let mut s = if compact {
        serde_json::to_string(v).expect("json")
    } else {
        serde_json::to_string_pretty(v).expect("json")
    };
    s.push('\n');
    s
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    let (name, inputs) = inputs_of(&cli.command);
    let mut out = BTreeMap::new();
    out.insert("command", json!(name));
    out.insert("inputs", inputs);
    match dispatch(cli) {
        Ok((result, code)) => {
            out.insert("result", result);
            Outcome { code, stdout: render(&json!(out), cli.json), stderr: String::new() }
        }
        Err(e) => {
            out.insert("error", json!({ "kind": error_kind(&e), "message": e.to_string() }));
            Outcome { code: e.exit_code(), stdout: render(&json!(out), cli.json), stderr: format!("error: {e}\n") }
        }
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}
