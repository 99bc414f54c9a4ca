use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// `sum_i a_i x_i >= bound` over 0/1 variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CpLine {
    /// Sorted by variable, no zero coefficients.
    coeffs: Vec<(u32, BigInt)>,
    bound: BigInt,
}

impl CpLine {
    /// Merges repeated variables and drops zeros.
    pub fn new(coeffs: impl IntoIterator<Item = (u32, BigInt)>, bound: BigInt) -> CpLine {
        let mut v: Vec<(u32, BigInt)> = coeffs.into_iter().collect();
        v.sort_by_key(|(x, _)| *x);
        let mut out: Vec<(u32, BigInt)> = Vec::with_capacity(v.len());
        for (x, a) in v {
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 += a,
                _ => out.push((x, a)),
            }
        }
        out.retain(|(_, a)| !a.is_zero());
        CpLine { coeffs: out, bound }
    }

    pub fn from_i64(coeffs: &[(u32, i64)], bound: i64) -> CpLine {
        CpLine::new(coeffs.iter().map(|&(x, a)| (x, BigInt::from(a))), BigInt::from(bound))
    }

    /// `0 >= 1`.
    pub fn falsum() -> CpLine {
        CpLine { coeffs: Vec::new(), bound: BigInt::one() }
    }

    /// `0 >= 0`.
    pub fn trivial() -> CpLine {
        CpLine { coeffs: Vec::new(), bound: BigInt::zero() }
    }

    /// `x >= 0`.
    pub fn var_lower(x: u32) -> CpLine {
        CpLine { coeffs: vec![(x, BigInt::one())], bound: BigInt::zero() }
    }

    /// `-x >= -1`.
    pub fn var_upper(x: u32) -> CpLine {
        CpLine { coeffs: vec![(x, -BigInt::one())], bound: -BigInt::one() }
    }

    pub fn coeffs(&self) -> &[(u32, BigInt)] {
        &self.coeffs
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn coeff(&self, x: u32) -> BigInt {
        self.coeffs.binary_search_by_key(&x, |(v, _)| *v).map(|i| self.coeffs[i].1.clone()).unwrap_or_default()
    }

    /// No variables and a positive bound.
    pub fn is_falsum(&self) -> bool {
        self.coeffs.is_empty() && self.bound.is_positive()
    }

    /// No variables and a non-positive bound.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty() && !self.bound.is_positive()
    }

    pub fn add(&self, other: &CpLine) -> CpLine {
        let (a, b) = (&self.coeffs, &other.coeffs);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &a[i].1 + &b[j].1;
                    if !s.is_zero() {
                        out.push((a[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        CpLine { coeffs: out, bound: &self.bound + &other.bound }
    }

    pub fn scale(&self, c: &BigInt) -> CpLine {
        if c.is_zero() {
            return CpLine::trivial();
        }
        CpLine { coeffs: self.coeffs.iter().map(|(x, a)| (*x, a * c)).collect(), bound: &self.bound * c }
    }

    /// Division by `c > 0` dividing every coefficient, rounding the bound up.
    pub fn divide(&self, c: &BigInt) -> Option<CpLine> {
        if !c.is_positive() || self.coeffs.iter().any(|(_, a)| !a.is_multiple_of(c)) {
            return None;
        }
        Some(CpLine { coeffs: self.coeffs.iter().map(|(x, a)| (*x, a / c)).collect(), bound: self.bound.div_ceil(c) })
    }

    pub fn rename(&self, f: impl Fn(u32) -> u32) -> CpLine {
        CpLine::new(self.coeffs.iter().map(|(x, a)| (f(*x), a.clone())), self.bound.clone())
    }

    /// Substitutes constants for the assigned variables.
    pub fn restrict(&self, rho: &HashMap<u32, bool>) -> CpLine {
        let mut bound = self.bound.clone();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (x, a) in &self.coeffs {
            match rho.get(x) {
                Some(true) => bound -= a,
                Some(false) => {}
                None => coeffs.push((*x, a.clone())),
            }
        }
        CpLine { coeffs, bound }
    }

    /// Whether a 0/1 point satisfies the inequality.
    pub fn satisfied_by(&self, value: impl Fn(u32) -> bool) -> bool {
        let lhs: BigInt = self.coeffs.iter().filter(|(x, _)| value(*x)).map(|(_, a)| a).sum();
        lhs >= self.bound
    }

    pub fn max_var(&self) -> Option<u32> {
        self.coeffs.last().map(|(x, _)| *x)
    }

    /// Sum of absolute coefficient values and |bound|, a size measure.
    pub fn magnitude(&self) -> BigInt {
        self.coeffs.iter().map(|(_, a)| a.abs()).sum::<BigInt>() + self.bound.abs()
    }
}

/// An integer that serialises as a JSON number when it fits in `i64` and
/// as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Num(i64),
            Str(String),
        }
        match Either::deserialize(d)? {
            Either::Num(v) => Ok(JsonInt(BigInt::from(v))),
            Either::Str(s) => s.parse::<BigInt>().map(JsonInt).map_err(serde::de::Error::custom),
        }
    }
}

/// Map key that also accepts the quoted form, which is what a key looks like
/// after serde has buffered it (inside internally tagged enums).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
struct VarKey(u32);

impl<'de> Deserialize<'de> for VarKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Num(u32),
            Str(String),
        }
        match Either::deserialize(d)? {
            Either::Num(v) => Ok(VarKey(v)),
            Either::Str(s) => s.parse().map(VarKey).map_err(serde::de::Error::custom),
        }
    }
}

/// JSON shape `{"coeffs": {"<var>": <int>}, "bound": <int>}`.
#[derive(Serialize, Deserialize)]
struct RawLine {
    coeffs: std::collections::BTreeMap<VarKey, JsonInt>,
    bound: JsonInt,
}

impl Serialize for CpLine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawLine {
            coeffs: self.coeffs.iter().map(|(x, a)| (VarKey(*x), JsonInt(a.clone()))).collect(),
            bound: JsonInt(self.bound.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CpLine {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RawLine::deserialize(d)?;
        Ok(CpLine::new(r.coeffs.into_iter().map(|(x, a)| (x.0, a.0)), r.bound.0))
    }
}

impl std::fmt::Display for CpLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 >= {}", self.bound);
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(x, a)| format!("{a}*x_{x}")).collect();
        write!(f, "{} >= {}", parts.join(" + "), self.bound)
    }
}
