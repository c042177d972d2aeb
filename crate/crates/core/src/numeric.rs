//! Floating-point root finding used as an independent cross-check of the
//! exact algorithms: Aberth iteration for univariate polynomials and
//! total-degree homotopy continuation for square systems.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rational_to_f64, Poly};

/// A polynomial compiled to complex coefficients for fast evaluation.
#[derive(Clone, Debug)]
pub struct CPoly {
    terms: Vec<(Complex64, Vec<u32>)>,
    nvars: usize,
}

impl CPoly {
    pub fn new(nvars: usize, terms: Vec<(Complex64, Vec<u32>)>) -> CPoly {
        CPoly { terms, nvars }
    }

    /// Compiles the first `nvars` variables of `p`; every other variable is
    /// replaced by the matching entry of `fixed` (indexed by full position).
    pub fn compile(p: &Poly, nvars: usize, fixed: &[(usize, f64)]) -> CPoly {
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            let mut coef = Complex64::new(rational_to_f64(c), 0.0);
            for &(i, v) in fixed {
                coef *= v.powi(m.0[i] as i32);
            }
            terms.push((coef, m.0[..nvars].to_vec()));
        }
        CPoly { terms, nvars }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&k, xi)| acc * xi.powu(k)))
            .sum()
    }

    pub fn gradient(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.nvars];
        for (c, e) in &self.terms {
            for i in 0..self.nvars {
                if e[i] == 0 {
                    continue;
                }
                let mut t = *c * e[i] as f64;
                for (j, (&k, xj)) in e.iter().zip(x).enumerate() {
                    let k = if j == i { k - 1 } else { k };
                    t *= xj.powu(k);
                }
                g[i] += t;
            }
        }
        g
    }
}

/// All roots of `sum c_k z^k` (index is the power), by Aberth iteration.
pub fn univariate_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    let mut zero_roots = 0;
    while c.len() > 1 && c[0].norm() == 0.0 {
        c.remove(0);
        zero_roots += 1;
    }
    let d = c.len().saturating_sub(1);
    let mut out = vec![Complex64::new(0.0, 0.0); zero_roots];
    if d == 0 {
        return out;
    }
    let lead = c[d];
    let c: Vec<Complex64> = c.iter().map(|z| z / lead).collect();
    let radius = 1.0 + c[..d].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64))
        .collect();
    let horner = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..d {
            let (p, dp) = horner(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[k] -= w;
            moved = moved.max(w.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    out.extend(z);
    out
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when numerically singular.
pub fn solve_linear(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let t = a[col][k];
                a[r][k] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let s: Complex64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Outcome of one homotopy path.
#[derive(Clone, Debug)]
pub struct PathEnd {
    pub x: Vec<Complex64>,
    pub converged: bool,
    /// Set when the Jacobian at the endpoint is numerically singular.
    pub singular: bool,
}

fn norm_inf(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Homotopy<'a> {
    target: &'a [CPoly],
    degrees: Vec<u32>,
    gamma: Complex64,
}

impl Homotopy<'_> {
    fn start(&self, i: usize, x: &[Complex64]) -> Complex64 {
        x[i].powu(self.degrees[i]) - 1.0
    }

    fn h(&self, x: &[Complex64], s: f64) -> Vec<Complex64> {
        (0..x.len())
            .map(|i| (1.0 - s) * self.gamma * self.start(i, x) + s * self.target[i].eval(x))
            .collect()
    }

    fn jac(&self, x: &[Complex64], s: f64) -> Vec<Vec<Complex64>> {
        (0..x.len())
            .map(|i| {
                let mut row: Vec<Complex64> = self.target[i].gradient(x).into_iter().map(|g| s * g).collect();
                let d = self.degrees[i];
                row[i] += (1.0 - s) * self.gamma * d as f64 * x[i].powu(d - 1);
                row
            })
            .collect()
    }

    fn dh_ds(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..x.len()).map(|i| self.target[i].eval(x) - self.gamma * self.start(i, x)).collect()
    }

    fn correct(&self, x: &mut Vec<Complex64>, s: f64, iters: usize) -> bool {
        for _ in 0..iters {
            let rhs: Vec<Complex64> = self.h(x, s).into_iter().map(|v| -v).collect();
            let Some(dx) = solve_linear(self.jac(x, s), rhs) else { return false };
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
            if norm_inf(&dx) <= 1e-11 * (1.0 + norm_inf(x)) {
                return true;
            }
        }
        false
    }

    fn track(&self, mut x: Vec<Complex64>) -> PathEnd {
        const DIVERGED: f64 = 1e8;
        let mut s = 0.0;
        let mut h: f64 = 0.01;
        let mut streak = 0;
        let mut steps = 0;
        while s < 1.0 && steps < 200_000 {
            steps += 1;
            let step = h.min(1.0 - s);
            let rhs: Vec<Complex64> = self.dh_ds(&x).into_iter().map(|v| -v).collect();
            let Some(dx) = solve_linear(self.jac(&x, s), rhs) else {
                h *= 0.5;
                if h < 1e-14 {
                    break;
                }
                continue;
            };
            let mut y: Vec<Complex64> = x.iter().zip(&dx).map(|(a, b)| a + b * step).collect();
            let ok = self.correct(&mut y, s + step, 4)
                && norm_inf(&y.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>()) < 0.25 * (1.0 + norm_inf(&x));
            if ok {
                x = y;
                s += step;
                streak += 1;
                if streak >= 3 {
                    h = (h * 2.0).min(0.05);
                    streak = 0;
                }
                if norm_inf(&x) > DIVERGED {
                    return PathEnd { x, converged: false, singular: false };
                }
            } else {
                streak = 0;
                h *= 0.5;
                if h < 1e-14 {
                    break;
                }
            }
        }
        if s < 1.0 {
            // Stalled near an ill-conditioned endpoint. Polish at the target
            // only if that stays local; a path heading to infinity must not
            // be snapped onto some other root.
            let mut y = x.clone();
            let local = s > 0.999
                && norm_inf(&x) < 1e4
                && self.correct(&mut y, 1.0, 30)
                && norm_inf(&y.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>()) <= 1e-3 * (1.0 + norm_inf(&x));
            if !local {
                return PathEnd { x, converged: false, singular: false };
            }
            x = y;
        }
        self.correct(&mut x, 1.0, 8);
        let singular = solve_linear(self.jac(&x, 1.0), vec![Complex64::new(1.0, 0.0); x.len()]).is_none();
        let converged = norm_inf(&x) < DIVERGED && norm_inf(&self.h(&x, 1.0)) < 1e-8;
        PathEnd { x, converged, singular }
    }
}

/// Solves a square polynomial system by a total-degree homotopy with a
/// random complex `gamma` drawn from a seeded generator.
pub fn solve_total_degree(system: &[CPoly], seed: u64) -> Vec<PathEnd> {
    let n = system.len();
    let degrees: Vec<u32> = system.iter().map(|p| p.degree().max(1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let hom = Homotopy { target: system, degrees: degrees.clone(), gamma: Complex64::from_polar(1.0, theta) };
    let total: usize = degrees.iter().map(|&d| d as usize).product();
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut x = Vec::with_capacity(n);
        for &d in &degrees {
            let k = idx % d as usize;
            idx /= d as usize;
            x.push(Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64));
        }
        out.push(hom.track(x));
    }
    out
}

/// Outcome of sampling `|f| > |g|^e` on a box.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpotCheck {
    pub points: usize,
    pub violations: usize,
    /// Smallest observed `|f| / |g|^e` (infinite when `g` vanished everywhere).
    pub min_ratio: f64,
}

/// Samples `points` seeded uniform points of the open box `(lo, hi)^n` in the
/// first `n` variables (all others set to zero) and counts points where
/// `|f| > |g|^exponent` fails.
pub fn domination_spot_check(
    f: &Poly,
    g: &Poly,
    n: usize,
    exponent: u32,
    points: usize,
    (lo, hi): (f64, f64),
    seed: u64,
) -> SpotCheck {
    let nv = f.nvars();
    let (cf, cg) = (CPoly::compile(f, nv, &[]), CPoly::compile(g, nv, &[]));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..points {
        let mut x = vec![Complex64::new(0.0, 0.0); nv];
        for xi in x.iter_mut().take(n) {
            // open interval: resample the (measure zero) endpoint
            let mut v = lo;
            while v <= lo {
                v = rng.gen_range(lo..hi);
            }
            *xi = Complex64::new(v, 0.0);
        }
        let fv = cf.eval(&x).norm();
        let gv = cg.eval(&x).norm().powi(exponent as i32);
        if fv <= gv {
            violations += 1;
        }
        if gv > 0.0 {
            min_ratio = min_ratio.min(fv / gv);
        }
    }
    SpotCheck { points, violations, min_ratio }
}
