//! Noetherian chains and their derivations.
//!
//! A chain of dimensions `(n, m)` is given by polynomials `g_ij` and defines
//! the commuting-on-leaves vector fields
//! `V_i = d/dx_i + sum_j g_ij d/df_j`. Axis indices are 1-based throughout.
//!
//! A derivation word `(w1, ..., wk)` denotes the operator product
//! `V_w1 ∘ ... ∘ V_wk`: the rightmost letter is applied first.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{parse_poly, Arena, Monomial, Poly, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Chain {
    n: usize,
    m: usize,
    g: Vec<Vec<Poly>>,
    delta: u32,
    arena: Arc<Arena>,
}

impl Chain {
    /// Builds a chain from the `n x m` coefficient matrix.
    pub fn new(n: usize, m: usize, g: Vec<Vec<Poly>>) -> Result<Chain> {
        if n == 0 {
            return Err(Error::Invalid("a chain needs n >= 1".into()));
        }
        if g.len() != n || g.iter().any(|row| row.len() != m) {
            return Err(Error::Invalid(format!("coefficient matrix must be {n}x{m}")));
        }
        let arena = Arena::new(n, m);
        for row in &g {
            for p in row {
                if **p.arena() != *arena {
                    return Err(Error::Invalid("coefficient outside the x1..xn, f1..fm arena".into()));
                }
            }
        }
        let delta = g.iter().flatten().map(|p| p.degree()).max().unwrap_or(0);
        Ok(Chain { n, m, g, delta, arena })
    }

    /// Parses the coefficient matrix from polynomial strings.
    pub fn parse<S: AsRef<str>>(n: usize, m: usize, rows: &[Vec<S>]) -> Result<Chain> {
        let arena = Arena::new(n, m);
        let g = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_poly(s.as_ref(), &arena)).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Chain::new(n, m, g)
    }

    /// The chain with no `f` variables: Noetherian functions are polynomials.
    pub fn trivial(n: usize) -> Chain {
        Chain::new(n, 0, vec![Vec::new(); n]).expect("valid trivial chain")
    }

    /// `f1' = f1` (the exponential).
    pub fn exp() -> Chain {
        Chain::parse(1, 1, &[vec!["f1"]]).unwrap()
    }

    /// `f1' = f2, f2' = -f1` (sine and cosine).
    pub fn trig() -> Chain {
        Chain::parse(1, 2, &[vec!["f2", "-f1"]]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Chain degree: the largest total degree among the `g_ij`.
    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    /// `g_ij` with 1-based indices.
    pub fn g(&self, i: usize, j: usize) -> &Poly {
        &self.g[i - 1][j - 1]
    }

    pub fn parse_poly(&self, text: &str) -> Result<Poly> {
        Ok(parse_poly(text, &self.arena)?)
    }

    fn check_axis(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::AxisOutOfRange { axis: i, n: self.n });
        }
        Ok(())
    }

    fn check_arena(&self, p: &Poly) -> Result<()> {
        if **p.arena() != *self.arena {
            return Err(Error::Poly(crate::algebra::PolyError::ArenaMismatch));
        }
        Ok(())
    }

    /// `V_i(p)`.
    pub fn derive(&self, p: &Poly, i: usize) -> Result<Poly> {
        self.check_axis(i)?;
        self.check_arena(p)?;
        Ok(self.derive_unchecked(p, i - 1))
    }

    fn derive_unchecked(&self, p: &Poly, i0: usize) -> Poly {
        let mut r = p.partial(i0);
        for j in 0..self.m {
            let df = p.partial(self.arena.f_index(j));
            if !df.is_zero() && !self.g[i0][j].is_zero() {
                r = &r + &(&df * &self.g[i0][j]);
            }
        }
        r
    }

    /// Applies the operator product named by `word` (rightmost first).
    pub fn iterated_derive(&self, p: &Poly, word: &[usize]) -> Result<Poly> {
        if word.is_empty() {
            return Err(Error::Invalid("derivation word must be nonempty".into()));
        }
        for &i in word {
            self.check_axis(i)?;
        }
        self.check_arena(p)?;
        let mut r = p.clone();
        for &i in word.iter().rev() {
            if r.is_zero() {
                break;
            }
            r = self.derive_unchecked(&r, i - 1);
        }
        Ok(r)
    }

    /// Applies a field `W = sum_k c_k d/df_k` to `p`.
    fn apply_vertical(&self, c: &[Poly], p: &Poly) -> Poly {
        let mut r = Poly::zero(&self.arena);
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let d = p.partial(self.arena.f_index(k));
            if !d.is_zero() {
                r = &r + &(ck * &d);
            }
        }
        r
    }

    /// Coefficients of iterated commutators of the `V_i` up to `depth`.
    ///
    /// Depth 1 gives `[V_i, V_j](f_k) = V_i(g_jk) - V_j(g_ik)` for `i < j`;
    /// depth `r + 1` brackets each depth-`r` field `W` with every `V_l`,
    /// whose coefficients are `V_l(W(f_k)) - W(g_lk)`. All returned
    /// polynomials vanish on the integrability locus. Zero polynomials and
    /// scalar multiples of earlier generators are dropped.
    pub fn il_generators(&self, depth: usize) -> Vec<Poly> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        if self.n < 2 || self.m == 0 || depth == 0 {
            return out;
        }
        let mut layer: Vec<Vec<Poly>> = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let c: Vec<Poly> = (0..self.m)
                    .map(|k| &self.derive_unchecked(&self.g[j][k], i) - &self.derive_unchecked(&self.g[i][k], j))
                    .collect();
                layer.push(c);
            }
        }
        for level in 1..=depth {
            let mut live = Vec::new();
            for c in layer {
                if c.iter().all(|p| p.is_zero()) {
                    continue;
                }
                for p in &c {
                    push_generator(&mut out, &mut seen, p);
                }
                live.push(c);
            }
            if level == depth || live.is_empty() {
                break;
            }
            let mut next = Vec::new();
            for c in &live {
                for l in 0..self.n {
                    let nc: Vec<Poly> = (0..self.m)
                        .map(|k| &self.derive_unchecked(&c[k], l) - &self.apply_vertical(c, &self.g[l][k]))
                        .collect();
                    next.push(nc);
                }
            }
            layer = next;
        }
        out
    }

    /// Default bracket depth for integrability tests.
    pub fn default_il_depth(&self) -> usize {
        2 * (self.m + 1)
    }

    /// True when every bracket generator up to `depth` vanishes at `q`.
    /// This is a necessary condition for `q` to lie on an integral manifold.
    pub fn il_test(&self, q: &LeafPoint, depth: usize) -> Result<bool> {
        self.check_point(q)?;
        for g in self.il_generators(depth) {
            if !g.eval(&q.coords)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_point(&self, q: &LeafPoint) -> Result<()> {
        if q.coords.len() != self.n + self.m {
            return Err(Error::Invalid(format!(
                "point has {} coordinates, chain needs {}",
                q.coords.len(),
                self.n + self.m
            )));
        }
        Ok(())
    }

    /// Taylor jet of `p` restricted to the leaf through `q`, in local
    /// coordinates `x - q_x`, truncated at total order `order`.
    ///
    /// Each coefficient uses the ascending derivation word of its
    /// multi-index. When `q` fails the default integrability test the jet is
    /// still computed and flagged.
    pub fn jet(&self, q: &LeafPoint, p: &Poly, order: u32) -> Result<Jet> {
        self.check_point(q)?;
        self.check_arena(p)?;
        let on_locus = self.il_test(q, self.default_il_depth())?;
        let local = Arena::new(self.n, 0);
        let mut table = DerivativeTable::new(self, p.clone());
        let mut series = Poly::zero(&local);
        for alpha in multi_indices(self.n, order) {
            let v = table.get(&alpha).eval(&q.coords)?;
            if v.is_zero() {
                continue;
            }
            let fact: Rational = alpha.iter().map(|&a| factorial(a)).product();
            series.add_term(Monomial(alpha.clone()), v / fact);
        }
        Ok(Jet {
            base: q.clone(),
            order,
            series,
            off_locus: !on_locus,
        })
    }
}

fn push_generator(out: &mut Vec<Poly>, seen: &mut BTreeSet<String>, p: &Poly) {
    if p.is_zero() {
        return;
    }
    let lead = p.terms().next_back().map(|(_, c)| c.clone()).unwrap();
    let key = p.scale(&lead.recip()).to_string();
    if seen.insert(key) {
        out.push(p.clone());
    }
}

fn factorial(k: u32) -> Rational {
    (1..=k).fold(Rational::one(), |acc, i| acc * Rational::from_integer(i.into()))
}

/// Ascending derivation word of a multi-index (1-based axes).
pub fn canonical_word(alpha: &[u32]) -> Vec<usize> {
    alpha
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| std::iter::repeat(i + 1).take(a as usize))
        .collect()
}

/// All multi-indices in `n` variables of total degree `<= order`, by degree.
pub fn multi_indices(n: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; n]];
    let mut frontier = vec![vec![0u32; n]];
    for _ in 0..order {
        let mut next = BTreeSet::new();
        for a in &frontier {
            for i in 0..n {
                let mut b = a.clone();
                b[i] += 1;
                next.insert(b);
            }
        }
        frontier = next.into_iter().collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

/// Memoized `V^alpha p` along canonical words.
pub(crate) struct DerivativeTable<'c> {
    chain: &'c Chain,
    memo: HashMap<Vec<u32>, Poly>,
}

impl<'c> DerivativeTable<'c> {
    pub(crate) fn new(chain: &'c Chain, p: Poly) -> Self {
        let mut memo = HashMap::new();
        memo.insert(vec![0; chain.n], p);
        DerivativeTable { chain, memo }
    }

    /// The canonical word of `alpha` applies `V_n` first and `V_1` last, so
    /// `V^alpha = V_i V^(alpha - e_i)` with `i` the smallest active axis.
    pub(crate) fn get(&mut self, alpha: &[u32]) -> &Poly {
        if !self.memo.contains_key(alpha) {
            let i = alpha.iter().position(|&a| a > 0).unwrap();
            let mut prev = alpha.to_vec();
            prev[i] -= 1;
            let base = self.get(&prev).clone();
            let d = self.chain.derive_unchecked(&base, i);
            self.memo.insert(alpha.to_vec(), d);
        }
        &self.memo[alpha]
    }
}

/// A point of `C^(n+m)`; coordinates ordered `x1..xn, f1..fm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafPoint {
    pub coords: Vec<Rational>,
}

impl LeafPoint {
    pub fn new(coords: Vec<Rational>) -> LeafPoint {
        LeafPoint { coords }
    }

    pub fn from_ints(v: &[i64]) -> LeafPoint {
        LeafPoint::new(v.iter().map(|&a| Rational::from_integer(a.into())).collect())
    }

    /// The `x` part.
    pub fn x(&self, n: usize) -> &[Rational] {
        &self.coords[..n]
    }
}

/// Truncated Taylor series of a Noetherian function at a leaf point.
#[derive(Clone, Debug)]
pub struct Jet {
    pub base: LeafPoint,
    pub order: u32,
    /// Polynomial in local coordinates (arena with `n` x-variables, no f).
    pub series: Poly,
    /// Set when the base point failed the integrability test.
    pub off_locus: bool,
}

impl Jet {
    pub fn coeff(&self, alpha: &[u32]) -> Rational {
        self.series.coeff(&Monomial(alpha.to_vec()))
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn order_of_vanishing(&self) -> Option<u32> {
        self.series.order()
    }
}
