//! JSON chain files and comma-separated points.
//!
//! ```json
//! { "n": 1, "m": 1, "g": [["f1"]], "delta_expected": 1,
//!   "points": { "origin": ["0", "1"] } }
//! ```
//!
//! Point coordinates are ordered `x1..xn, f1..fm`; each is an integer or a
//! fraction `p/q`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Rational;
use crate::chain::{Chain, LeafPoint};
use crate::{Error, Result};

/// Upper limit on `n` and `m` in a chain file.
pub const MAX_DIM: usize = 64;
/// Longest accepted coordinate literal.
const MAX_COORD_LEN: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub n: usize,
    pub m: usize,
    pub g: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_expected: Option<u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub points: BTreeMap<String, Vec<String>>,
}

/// A parsed chain file.
#[derive(Clone, Debug)]
pub struct LoadedChain {
    pub chain: Chain,
    pub points: BTreeMap<String, LeafPoint>,
}

impl ChainFile {
    pub fn from_json(text: &str) -> Result<ChainFile> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("chain file: {e}")))
    }

    /// The chain file for `Chain::trivial(n)`.
    pub fn trivial(n: usize) -> ChainFile {
        ChainFile { n, m: 0, g: vec![Vec::new(); n], delta_expected: None, points: BTreeMap::new() }
    }

    pub fn load(&self) -> Result<LoadedChain> {
        if self.n == 0 || self.n > MAX_DIM || self.m > MAX_DIM {
            return Err(Error::Invalid(format!("chain dimensions out of range: n = {}, m = {}", self.n, self.m)));
        }
        let chain = Chain::parse(self.n, self.m, &self.g)?;
        if let Some(d) = self.delta_expected {
            if d != chain.delta() {
                return Err(Error::Invalid(format!("chain degree is {}, file expects {d}", chain.delta())));
            }
        }
        let points = self
            .points
            .iter()
            .map(|(k, v)| Ok((k.clone(), point_from_strs(v, &chain)?)))
            .collect::<Result<_>>()?;
        Ok(LoadedChain { chain, points })
    }
}

/// Parses and loads a chain file in one step.
pub fn parse_chain_file(text: &str) -> Result<LoadedChain> {
    ChainFile::from_json(text)?.load()
}

fn parse_coord(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() || s.len() > MAX_COORD_LEN {
        return Err(Error::Invalid(format!("bad coordinate `{s}`")));
    }
    let q: Rational = s.parse().map_err(|_| Error::Invalid(format!("bad coordinate `{s}`")))?;
    Ok(q)
}

/// Coordinates from a comma-separated list such as `0, 1/2, -3`.
pub fn parse_point_csv(text: &str) -> Result<Vec<Rational>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Invalid("empty point".into()));
    }
    text.split(',').map(parse_coord).collect()
}

fn point_from_strs(v: &[String], chain: &Chain) -> Result<LeafPoint> {
    let coords = v.iter().map(|s| parse_coord(s)).collect::<Result<Vec<_>>>()?;
    check_len(coords, chain)
}

fn check_len(coords: Vec<Rational>, chain: &Chain) -> Result<LeafPoint> {
    let want = chain.n() + chain.m();
    if coords.len() != want {
        return Err(Error::Invalid(format!("point has {} coordinates, expected {want}", coords.len())));
    }
    Ok(LeafPoint::new(coords))
}

/// A point given either as CSV or as the name of a point in the chain file.
pub fn resolve_point(spec: &str, loaded: &LoadedChain) -> Result<LeafPoint> {
    if let Some(p) = loaded.points.get(spec.trim()) {
        return Ok(p.clone());
    }
    check_len(parse_point_csv(spec)?, &loaded.chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    #[test]
    fn exp_file() {
        let l = parse_chain_file(r#"{"n":1,"m":1,"g":[["f1"]],"delta_expected":1,"points":{"o":["0","1"]}}"#).unwrap();
        assert_eq!(l.chain.delta(), 1);
        assert_eq!(resolve_point("o", &l).unwrap(), LeafPoint::from_ints(&[0, 1]));
        assert_eq!(resolve_point(" 1/2 , -3", &l).unwrap().coords, vec![ratio(1, 2), ratio(-3, 1)]);
        assert!(resolve_point("1", &l).is_err());
    }

    #[test]
    fn trivial_file() {
        let l = parse_chain_file(r#"{"n":2,"m":0,"g":[[],[]]}"#).unwrap();
        assert_eq!((l.chain.n(), l.chain.m()), (2, 0));
        let back = ChainFile::from_json(&serde_json::to_string(&ChainFile::trivial(2)).unwrap()).unwrap();
        assert_eq!(back, ChainFile::trivial(2));
    }

    #[test]
    fn rejects() {
        for bad in [
            r#"{"n":1,"m":1,"g":[["f1"]],"delta_expected":2}"#,
            r#"{"n":1,"m":1,"g":[["f2"]]}"#,
            r#"{"n":1,"m":1,"g":[]}"#,
            r#"{"n":0,"m":0,"g":[]}"#,
            r#"{"n":1,"m":0,"g":[[]],"extra":1}"#,
            r#"{"n":1,"m":1,"g":[["f1"]],"points":{"p":["a","1"]}}"#,
            "not json",
        ] {
            assert!(parse_chain_file(bad).is_err(), "{bad}");
        }
        assert!(parse_point_csv("").is_err());
        assert!(parse_point_csv("1,,2").is_err());
        assert!(parse_point_csv("1/0").is_err());
    }
}
