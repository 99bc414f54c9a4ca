//! Exact arithmetic in GF(p) and GF(p^m).
//!
//! Elements are packed into a single `u64` as `sum c_i p^i`, so the packed
//! value of an element doubles as its index and its lexicographic rank.
//! Small extension fields multiply through log/antilog tables; prime fields
//! use double-width products.

use std::fmt;
use std::sync::Arc;

use super::AlgebraError;

/// Largest admissible characteristic (exclusive).
pub const PRIME_BOUND: u64 = 1 << 61;
/// Largest admissible order of an extension field (exclusive).
pub const EXTENSION_ORDER_BOUND: u64 = 1 << 32;
/// Extension fields up to this order get log/antilog tables.
const TABLE_ORDER_BOUND: u64 = 1 << 20;

/// An element of some [`FieldSpec`], packed as `sum c_i p^i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Packed index of the element.
    pub fn packed(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    exp: Vec<u64>,
    log: Vec<u64>,
}

struct Inner {
    p: u64,
    m: usize,
    /// Monic modulus, least-significant coefficient first, length `m + 1`.
    modulus: Vec<u64>,
    order: u64,
    tables: Option<Tables>,
    root: Option<(FieldElement, u32)>,
}

/// A finite field GF(p^m), optionally carrying a primitive k-th root of unity.
///
/// Cloning is cheap; clones compare equal and share storage.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus && self.0.root == other.0.root)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.m)?;
        if let Some((w, k)) = self.0.root {
            write!(f, "[w={} k={}]", w.0, k)?;
        }
        Ok(())
    }
}

fn is_prime(p: u64) -> bool {
    primal_check::miller_rabin(p)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Dense polynomials over GF(p), least-significant coefficient first.
mod dense {
    use super::{mul_mod, pow_mod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    /// Remainder of `a` modulo a monic `b`.
    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        while r.len() > db {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - db;
            if lead != 0 {
                for (i, &bi) in b.iter().enumerate() {
                    let t = mul_mod(lead, bi, p);
                    r[shift + i] = (r[shift + i] + p - t) % p;
                }
            }
            r.pop();
        }
        trim(r)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(ai, bj, p)) % p;
            }
        }
        trim(out)
    }

    pub fn mul_mod_poly(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), modulus, p)
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-`p` digits of `index`.
    pub fn monic_from_index(mut index: u64, deg: usize, p: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            out.push(index % p);
            index /= p;
        }
        out.push(1);
        out
    }

    pub fn inverse_unit(a: u64, p: u64) -> u64 {
        pow_mod(a, p - 2, p)
    }
}

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u64) -> Result<FieldSpec, AlgebraError> {
        FieldSpec::extension(p, 1)
    }

    /// GF(p^m) with the first monic irreducible modulus in ascending order.
    pub fn extension(p: u64, m: usize) -> Result<FieldSpec, AlgebraError> {
        if p >= PRIME_BOUND {
            return Err(AlgebraError::PrimeTooLarge(p));
        }
        if p < 2 || !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if m == 0 {
            return Err(AlgebraError::InvalidExtensionDegree(m));
        }
        let modulus = if m == 1 { vec![0, 1] } else { first_irreducible(p, m)? };
        Ok(FieldSpec::from_parts(p, m, modulus, None))
    }

    /// GF(p^m) over an explicit monic modulus, which is verified irreducible.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<FieldSpec, AlgebraError> {
        if p >= PRIME_BOUND {
            return Err(AlgebraError::PrimeTooLarge(p));
        }
        if p < 2 || !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let modulus = dense::trim(modulus.into_iter().map(|c| c % p).collect());
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(AlgebraError::ReducibleModulus);
        }
        let m = modulus.len() - 1;
        if m > 1 {
            order_of(p, m)?;
            if !is_irreducible(&modulus, p) {
                return Err(AlgebraError::ReducibleModulus);
            }
        }
        Ok(FieldSpec::from_parts(p, m, modulus, None))
    }

    fn from_parts(p: u64, m: usize, modulus: Vec<u64>, root: Option<(FieldElement, u32)>) -> FieldSpec {
        let order = order_of(p, m).expect("order checked by caller");
        let mut inner = Inner { p, m, modulus, order, tables: None, root };
        if m > 1 && order <= TABLE_ORDER_BOUND {
            inner.tables = Some(build_tables(&inner));
        }
        FieldSpec(Arc::new(inner))
    }

    /// The same field, tagged with a primitive k-th root of unity.
    pub fn with_root(&self, w: FieldElement, k: u32) -> Result<FieldSpec, AlgebraError> {
        if k < 2 {
            return Err(AlgebraError::InvalidRootOrder(k));
        }
        if (k as u64).is_multiple_of(self.0.p) {
            return Err(AlgebraError::CharDividesK { p: self.0.p, k });
        }
        if !self.is_primitive_root(w, k) {
            return Err(AlgebraError::NotPrimitiveRoot);
        }
        let inner = Inner {
            p: self.0.p,
            m: self.0.m,
            modulus: self.0.modulus.clone(),
            order: self.0.order,
            tables: self.0.tables.as_ref().map(|t| Tables { exp: t.exp.clone(), log: t.log.clone() }),
            root: Some((w, k)),
        };
        Ok(FieldSpec(Arc::new(inner)))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn extension_degree(&self) -> usize {
        self.0.m
    }

    /// Monic modulus, least-significant coefficient first.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// Number of elements, p^m.
    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// The stored primitive k-th root `w` and its order `k`.
    pub fn kth_root(&self) -> Option<(FieldElement, u32)> {
        self.0.root
    }

    /// True when both values describe the same field, ignoring any root tag.
    pub fn same_field(&self, other: &FieldSpec) -> bool {
        self.0.p == other.0.p && self.0.modulus == other.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Embeds an integer via the prime subfield.
    pub fn from_i64(&self, v: i64) -> FieldElement {
        let p = self.0.p as i128;
        FieldElement((((v as i128) % p + p) % p) as u64)
    }

    /// The residue of an element lying in the prime subfield.
    pub fn as_prime_residue(&self, a: FieldElement) -> Option<u64> {
        (a.0 < self.0.p).then_some(a.0)
    }

    /// Coefficient vector of length `m`, least-significant first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let p = self.0.p;
        if self.0.m == 1 {
            return vec![a.0];
        }
        let mut v = a.0;
        (0..self.0.m)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement, AlgebraError> {
        let p = self.0.p;
        if coeffs.len() > self.0.m || coeffs.iter().any(|&c| c >= p) {
            return Err(AlgebraError::InvalidElement);
        }
        if self.0.m == 1 {
            return Ok(FieldElement(coeffs.first().copied().unwrap_or(0)));
        }
        let mut v = 0u64;
        for &c in coeffs.iter().rev() {
            v = v * p + c;
        }
        Ok(FieldElement(v))
    }

    /// All elements in packed order; only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.order).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.0.p;
        if self.0.m == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + y) % p)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.0.p;
        if a.0 == 0 {
            return a;
        }
        if self.0.m == 1 {
            return FieldElement(p - a.0);
        }
        if p == 2 {
            return a;
        }
        self.digitwise(a, FieldElement::ZERO, |x, _| (p - x) % p)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    fn digitwise(&self, a: FieldElement, b: FieldElement, op: impl Fn(u64, u64) -> u64) -> FieldElement {
        let p = self.0.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.0.m {
            out += op(x % p, y % p) * scale;
            x /= p;
            y /= p;
            scale = scale.wrapping_mul(p);
        }
        FieldElement(out)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if self.0.m == 1 {
            return FieldElement(mul_mod(a.0, b.0, self.0.p));
        }
        if let Some(t) = &self.0.tables {
            let n = self.0.order - 1;
            let mut e = t.log[a.0 as usize] + t.log[b.0 as usize];
            if e >= n {
                e -= n;
            }
            return FieldElement(t.exp[e as usize]);
        }
        let prod = dense::mul_mod_poly(&self.coeffs(a), &self.coeffs(b), &self.0.modulus, self.0.p);
        let mut padded = prod;
        padded.resize(self.0.m, 0);
        self.from_coeffs(&padded).expect("reduced product has m digits")
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut r = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        if self.0.m == 1 {
            return Some(FieldElement(dense::inverse_unit(a.0, self.0.p)));
        }
        if let Some(t) = &self.0.tables {
            let n = self.0.order - 1;
            let l = t.log[a.0 as usize];
            return Some(FieldElement(t.exp[((n - l) % n) as usize]));
        }
        Some(self.pow(a, self.0.order - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// Multiplicative order of a nonzero element divides `q - 1`; this checks
    /// `w^k = 1` and `w^j != 1` for every `1 <= j < k`.
    pub fn is_primitive_root(&self, w: FieldElement, k: u32) -> bool {
        if w.0 >= self.0.order || w.is_zero() {
            return false;
        }
        let mut acc = FieldElement::ONE;
        for _ in 1..k {
            acc = self.mul(acc, w);
            if acc == FieldElement::ONE {
                return false;
            }
        }
        self.mul(acc, w) == FieldElement::ONE
    }

    pub fn is_valid(&self, a: FieldElement) -> bool {
        a.0 < self.0.order
    }
}

fn order_of(p: u64, m: usize) -> Result<u64, AlgebraError> {
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q.checked_mul(p).ok_or(AlgebraError::PrimeTooLarge(p))?;
    }
    if m > 1 && q >= EXTENSION_ORDER_BOUND {
        return Err(AlgebraError::PrimeTooLarge(p));
    }
    Ok(q)
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    for d in 1..=m / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let g = dense::monic_from_index(idx, d, p);
            if dense::rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u64, m: usize) -> Result<Vec<u64>, AlgebraError> {
    let count = order_of(p, m)?;
    (0..count).map(|idx| dense::monic_from_index(idx, m, p)).find(|f| is_irreducible(f, p)).ok_or(AlgebraError::ReducibleModulus)
}

fn build_tables(inner: &Inner) -> Tables {
    let q = inner.order;
    let n = q - 1;
    let probe =
        FieldSpec(Arc::new(Inner { p: inner.p, m: inner.m, modulus: inner.modulus.clone(), order: q, tables: None, root: None }));
    let factors = prime_factors(n);
    let generator = (2..q)
        .map(FieldElement)
        .find(|&g| factors.iter().all(|&r| probe.pow(g, n / r) != FieldElement::ONE))
        .unwrap_or(FieldElement(1));
    let mut exp = vec![0u64; n as usize];
    let mut log = vec![0u64; q as usize];
    let mut acc = FieldElement::ONE;
    for e in 0..n {
        exp[e as usize] = acc.0;
        log[acc.0 as usize] = e;
        acc = probe.mul(acc, generator);
    }
    Tables { exp, log }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The smallest field of characteristic `p` holding a primitive k-th root of
/// unity, together with the least such root in packed order.
pub fn field_with_kth_root(p: u64, k: u32) -> Result<FieldSpec, AlgebraError> {
    if p >= PRIME_BOUND {
        return Err(AlgebraError::PrimeTooLarge(p));
    }
    if p < 2 || !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    if k < 2 {
        return Err(AlgebraError::InvalidRootOrder(k));
    }
    if (k as u64).is_multiple_of(p) {
        return Err(AlgebraError::CharDividesK { p, k });
    }
    let kk = k as u64;
    let mut m = 1usize;
    let mut pm = p % kk;
    while pm != 1 % kk {
        pm = mul_mod(pm, p, kk);
        m += 1;
    }
    let base = FieldSpec::extension(p, m)?;
    let q = base.order();
    let cofactor = (q - 1) / kk;
    let k_factors = prime_factors(kk);
    let seed = (1..q)
        .map(|x| base.pow(FieldElement(x), cofactor))
        .find(|&y| k_factors.iter().all(|&r| base.pow(y, kk / r) != FieldElement::ONE))
        .expect("the multiplicative group is cyclic of order divisible by k");
    let w = (1..kk).filter(|&j| gcd(j, kk) == 1).map(|j| base.pow(seed, j)).min().expect("j = 1 is coprime to k");
    base.with_root(w, k)
}
