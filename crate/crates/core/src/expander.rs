//! Bipartite boundary expansion: exhaustive checking, the doubling
//! construction from a bounded-degree graph, and seeded sampling.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encodings::{FphpInstance, Graph};

/// Largest pigeon count `check_boundary_expansion` will enumerate.
pub const EXHAUSTIVE_BOUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpanderError {
    #[error("{0} pigeons exceed the exhaustive bound {1}")]
    TooLarge(usize, usize),
    #[error("{n_holes} holes cannot give degree {k}")]
    TooFewHoles { n_holes: usize, k: usize },
    #[error("vertex {vertex} has degree {degree} > k = {k}")]
    DegreeTooLarge { vertex: u32, degree: usize, k: usize },
    #[error("no expander found in {0} samples")]
    NotFound(usize),
    #[error("bad fraction {0:?}")]
    BadFraction(String),
}

/// A non-negative fraction `num / den`, `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub const fn new(num: u64, den: u64) -> Fraction {
        assert!(den > 0);
        Fraction { num, den }
    }

    /// `floor(self * n)`.
    pub fn floor_times(self, n: usize) -> usize {
        (self.num * n as u64 / self.den) as usize
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = ExpanderError;
    fn from_str(s: &str) -> Result<Fraction, ExpanderError> {
        let bad = || ExpanderError::BadFraction(s.to_string());
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let num = n.trim().parse().map_err(|_| bad())?;
        let den: u64 = d.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ok(Fraction { num, den })
    }
}

impl TryFrom<String> for Fraction {
    type Error = ExpanderError;
    fn try_from(s: String) -> Result<Fraction, ExpanderError> {
        s.parse()
    }
}

impl From<Fraction> for String {
    fn from(f: Fraction) -> String {
        f.to_string()
    }
}

pub const DEFAULT_ALPHA: Fraction = Fraction::new(1, 2);
pub const DEFAULT_DELTA: Fraction = Fraction::new(3, 2);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub alpha: Fraction,
    pub delta: Fraction,
    pub holds: bool,
    /// Worst violating pigeon set, first in enumeration order among ties;
    /// empty iff `holds`.
    pub witness: Vec<usize>,
    pub witness_boundary: usize,
    pub subsets_checked: u64,
}

/// Holes with exactly one neighbour in `s`.
pub fn boundary(b: &FphpInstance, s: &[usize]) -> BTreeSet<u32> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut count = vec![0u32; b.n_holes()];
    for &i in s {
        if seen.insert(i) {
            for &h in b.neighbours(i) {
                count[h as usize] += 1;
            }
        }
    }
    (0..b.n_holes() as u32).filter(|&h| count[h as usize] == 1).collect()
}

struct Search<'a> {
    b: &'a FphpInstance,
    max_size: usize,
    /// `den_d * |∂S| - num_d * |S| + den_d >= 0` is the expansion condition.
    delta: Fraction,
    count: Vec<u32>,
    boundary: i64,
    chosen: Vec<usize>,
    worst: Option<(i64, Vec<usize>, usize)>,
    checked: u64,
}

impl Search<'_> {
    fn slack(&self) -> i64 {
        let d = self.delta;
        d.den as i64 * self.boundary - d.num as i64 * self.chosen.len() as i64 + d.den as i64
    }

    fn toggle(&mut self, i: usize, add: bool) {
        for &h in self.b.neighbours(i) {
            let c = &mut self.count[h as usize];
            let before = (*c == 1) as i64;
            if add {
                *c += 1;
            } else {
                *c -= 1;
            }
            self.boundary += (*c == 1) as i64 - before;
        }
    }

    fn go(&mut self, from: usize) {
        for i in from..self.b.n_pigeons() {
            self.toggle(i, true);
            self.chosen.push(i);
            self.checked += 1;
            let s = self.slack();
            if s < 0 && self.worst.as_ref().is_none_or(|(w, _, _)| s < *w) {
                self.worst = Some((s, self.chosen.clone(), self.boundary as usize));
            }
            if self.chosen.len() < self.max_size {
                self.go(i + 1);
            }
            self.chosen.pop();
            self.toggle(i, false);
        }
    }
}

/// Checks `|∂S| >= delta |S| - 1` for every nonempty `S` with
/// `|S| <= alpha * n_pigeons` by depth-first enumeration.
pub fn check_boundary_expansion(b: &FphpInstance, alpha: Fraction, delta: Fraction) -> Result<ExpansionReport, ExpanderError> {
    check_boundary_expansion_bounded(b, alpha, delta, EXHAUSTIVE_BOUND)
}

pub fn check_boundary_expansion_bounded(
    b: &FphpInstance,
    alpha: Fraction,
    delta: Fraction,
    bound: usize,
) -> Result<ExpansionReport, ExpanderError> {
    if b.n_pigeons() > bound {
        return Err(ExpanderError::TooLarge(b.n_pigeons(), bound));
    }
    let mut s = Search {
        b,
        max_size: alpha.floor_times(b.n_pigeons()),
        delta,
        count: vec![0; b.n_holes()],
        boundary: 0,
        chosen: Vec::new(),
        worst: None,
        checked: 0,
    };
    if s.max_size > 0 {
        s.go(0);
    }
    let (holds, witness, witness_boundary) = match s.worst {
        None => (true, Vec::new(), 0),
        Some((_, w, bd)) => (false, w, bd),
    };
    Ok(ExpansionReport { alpha, delta, holds, witness, witness_boundary, subsets_checked: s.checked })
}

/// Bipartite double cover of `h` (pigeon `u` sees hole `v` for each edge
/// `{u, v}`) with hole `u_hat` removed; deficient pigeons get fresh private
/// holes until they have degree `k`. Surviving holes keep their relative
/// order, padding holes come after them.
pub fn double_and_delete(h: &Graph, u_hat: u32, k: usize) -> Result<FphpInstance, ExpanderError> {
    for v in 0..h.n_vertices() as u32 {
        if h.degree(v) > k {
            return Err(ExpanderError::DegreeTooLarge { vertex: v, degree: h.degree(v), k });
        }
    }
    let n = h.n_vertices();
    let hole_of = |v: u32| if v < u_hat { v } else { v - 1 };
    let mut next_pad = (n - 1) as u32;
    let mut rows = Vec::with_capacity(n);
    for u in 0..n as u32 {
        let mut row: Vec<u32> = h.neighbours(u).iter().filter(|&&v| v != u_hat).map(|&v| hole_of(v)).collect();
        while row.len() < k {
            row.push(next_pad);
            next_pad += 1;
        }
        rows.push(row);
    }
    Ok(FphpInstance::new(next_pad as usize, k, rows).expect("double cover is simple and padded to degree k"))
}

/// Each pigeon gets a uniform `k`-subset of holes, listed ascending.
pub fn sample_left_regular(n_pigeons: usize, n_holes: usize, k: usize, seed: u64) -> Result<FphpInstance, ExpanderError> {
    if n_holes < k {
        return Err(ExpanderError::TooFewHoles { n_holes, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n_pigeons)
        .map(|_| {
            let mut row: Vec<u32> = rand::seq::index::sample(&mut rng, n_holes, k).into_iter().map(|h| h as u32).collect();
            row.sort_unstable();
            row
        })
        .collect();
    Ok(FphpInstance::new(n_holes, k, rows).expect("sampled rows are distinct k-subsets"))
}

/// Rejection sampling: seeds `seed, seed + 1, ...` until an instance passes
/// the exhaustive check. Returns the instance and the seed that produced it.
pub fn sample_expander(
    n_pigeons: usize,
    n_holes: usize,
    k: usize,
    alpha: Fraction,
    delta: Fraction,
    seed: u64,
    max_tries: usize,
) -> Result<(FphpInstance, u64), ExpanderError> {
    for t in 0..max_tries as u64 {
        let s = seed.wrapping_add(t);
        let b = sample_left_regular(n_pigeons, n_holes, k, s)?;
        if check_boundary_expansion(&b, alpha, delta)?.holds {
            return Ok((b, s));
        }
    }
    Err(ExpanderError::NotFound(max_tries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_basics() {
        let b = FphpInstance::new(4, 3, vec![vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(boundary(&b, &[0]), [0, 1, 2].into());
        assert!(boundary(&b, &[0, 1]).is_empty());
        assert!(boundary(&b, &[]).is_empty());
        assert_eq!(boundary(&b, &[0, 2]), [0, 3].into());
    }

    #[test]
    fn identical_pair_fails() {
        let b = FphpInstance::new(3, 3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        let r = check_boundary_expansion(&b, Fraction::new(1, 1), Fraction::new(2, 1)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, vec![0, 1]);
        assert_eq!(r.witness_boundary, 0);
    }

    #[test]
    fn disjoint_rows_expand() {
        let b = FphpInstance::new(9, 3, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap();
        let r = check_boundary_expansion(&b, Fraction::new(1, 1), Fraction::new(3, 1)).unwrap();
        assert!(r.holds && r.witness.is_empty());
        assert_eq!(r.subsets_checked, 7);
    }

    #[test]
    fn too_large() {
        let b = sample_left_regular(21, 5, 3, 0).unwrap();
        assert_eq!(check_boundary_expansion(&b, DEFAULT_ALPHA, DEFAULT_DELTA).unwrap_err(), ExpanderError::TooLarge(21, 20));
    }

    #[test]
    fn triangle_double() {
        let b = double_and_delete(&Graph::complete(3), 0, 3).unwrap();
        assert_eq!(b.n_pigeons(), 3);
        assert_eq!(b.all_neighbours(), &[vec![0, 1, 2], vec![1, 3, 4], vec![0, 5, 6]]);
        assert_eq!(b.n_holes(), 2 + 5);
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_left_regular(8, 7, 3, 42).unwrap(), sample_left_regular(8, 7, 3, 42).unwrap());
        assert!(sample_left_regular(3, 2, 3, 0).is_err());
    }

    #[test]
    fn fraction_parse() {
        assert_eq!("3/2".parse::<Fraction>().unwrap(), Fraction::new(3, 2));
        assert_eq!("2".parse::<Fraction>().unwrap(), Fraction::new(2, 1));
        assert!("1/0".parse::<Fraction>().is_err());
    }
}
