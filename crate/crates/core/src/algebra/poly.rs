//! Sparse multivariate polynomials with per-system exponent caps.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::field::{FieldElement, FieldSpec};
use super::AlgebraError;

/// How exponents are rewritten after multiplication.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Cap {
    /// `x^2 = x`: every exponent collapses to 1.
    Boolean,
    /// `y^k = 1`: exponents are taken mod k.
    Roots(u32),
}

impl Cap {
    fn reduce_exp(self, e: u32) -> u32 {
        match self {
            Cap::Boolean => e.min(1),
            Cap::Roots(k) => e % k,
        }
    }
}

/// A power product, stored as `(variable, exponent)` pairs sorted by variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    vars: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial { vars: Vec::new() }
    }

    pub fn var(v: u32) -> Monomial {
        Monomial { vars: vec![(v, 1)] }
    }

    /// Builds a monomial from arbitrary pairs, merging repeats and dropping
    /// zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Monomial {
        let mut v: Vec<(u32, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(v.len());
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        Monomial { vars: out }
    }

    /// Product of distinct variables.
    pub fn from_vars(vars: impl IntoIterator<Item = u32>) -> Monomial {
        Monomial::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.vars
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn exponent(&self, v: u32) -> u32 {
        self.vars.binary_search_by_key(&v, |&(x, _)| x).map(|i| self.vars[i].1).unwrap_or(0)
    }

    pub fn contains(&self, v: u32) -> bool {
        self.exponent(v) > 0
    }

    pub fn variables(&self) -> impl Iterator<Item = u32> + '_ {
        self.vars.iter().map(|&(v, _)| v)
    }

    /// Product without cap reduction.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.vars, &other.vars);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { vars: out }
    }

    pub fn mul_var(&self, v: u32) -> Monomial {
        self.mul(&Monomial::var(v))
    }

    pub fn reduce(&self, cap: Cap) -> Monomial {
        Monomial { vars: self.vars.iter().map(|&(v, e)| (v, cap.reduce_exp(e))).filter(|&(_, e)| e > 0).collect() }
    }

    pub fn is_reduced(&self, cap: Cap) -> bool {
        self.vars.iter().all(|&(_, e)| cap.reduce_exp(e) == e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.vars.iter().any(|&(v, f)| self.exponent(v) < f) {
            return None;
        }
        Some(Monomial {
            vars: self
                .vars
                .iter()
                .filter_map(|&(v, e)| {
                    let f = other.exponent(v);
                    (e > f).then_some((v, e - f))
                })
                .collect(),
        })
    }

    /// Renames variables through `f`; the result is renormalised.
    pub fn rename(&self, f: impl Fn(u32) -> u32) -> Monomial {
        Monomial::from_pairs(self.vars.iter().map(|&(v, e)| (f(v), e)))
    }
}

/// Graded lexicographic order; at equal degree the smallest variable id is
/// most significant.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        for (a, b) in self.vars.iter().zip(&other.vars) {
            if a.0 != b.0 {
                return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
            }
            if a.1 != b.1 {
                return a.1.cmp(&b.1);
            }
        }
        self.vars.len().cmp(&other.vars.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial over a [`FieldSpec`] with a fixed [`Cap`].
///
/// Terms are kept in descending monomial order with nonzero coefficients.
/// Storage is not forced to be cap-reduced, so generators such as `y^k - 1`
/// can be kept verbatim; every product is reduced.
#[derive(Clone, Debug)]
pub struct Polynomial {
    field: FieldSpec,
    cap: Cap,
    terms: Vec<(Monomial, FieldElement)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.cap == other.cap && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(field: &FieldSpec, cap: Cap) -> Polynomial {
        Polynomial { field: field.clone(), cap, terms: Vec::new() }
    }

    pub fn constant(field: &FieldSpec, cap: Cap, c: FieldElement) -> Polynomial {
        Polynomial::from_terms(field, cap, [(Monomial::one(), c)])
    }

    pub fn one(field: &FieldSpec, cap: Cap) -> Polynomial {
        Polynomial::constant(field, cap, FieldElement::ONE)
    }

    pub fn var(field: &FieldSpec, cap: Cap, v: u32) -> Polynomial {
        Polynomial::from_terms(field, cap, [(Monomial::var(v), FieldElement::ONE)])
    }

    pub fn monomial(field: &FieldSpec, cap: Cap, m: Monomial, c: FieldElement) -> Polynomial {
        Polynomial::from_terms(field, cap, [(m, c)])
    }

    /// Collects terms, merging equal monomials; no cap reduction.
    pub fn from_terms(field: &FieldSpec, cap: Cap, terms: impl IntoIterator<Item = (Monomial, FieldElement)>) -> Polynomial {
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            let e = acc.entry(m).or_insert(FieldElement::ZERO);
            *e = field.add(*e, c);
        }
        Polynomial::from_map(field, cap, acc)
    }

    fn from_map(field: &FieldSpec, cap: Cap, acc: HashMap<Monomial, FieldElement>) -> Polynomial {
        let mut terms: Vec<(Monomial, FieldElement)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { field: field.clone(), cap, terms }
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> &[(Monomial, FieldElement)] {
        &self.terms
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, with the zero polynomial at −1.
    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(m, _)| m.degree() as i64).max().unwrap_or(-1)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<&(Monomial, FieldElement)> {
        self.terms.first()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.iter().find(|(t, _)| t == m).map(|&(_, c)| c).unwrap_or(FieldElement::ZERO)
    }

    pub fn constant_term(&self) -> FieldElement {
        self.terms.last().filter(|(m, _)| m.is_one()).map(|&(_, c)| c).unwrap_or(FieldElement::ZERO)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == FieldElement::ONE
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        self.terms.iter().flat_map(|(m, _)| m.variables()).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_reduced(self.cap))
    }

    /// Rewrites every exponent under the cap.
    pub fn reduced(&self) -> Polynomial {
        if self.is_reduced() {
            return self.clone();
        }
        Polynomial::from_terms(&self.field, self.cap, self.terms.iter().map(|(m, c)| (m.reduce(self.cap), *c)))
    }

    /// Reinterprets the same terms under another cap, reducing.
    pub fn with_cap(&self, cap: Cap) -> Polynomial {
        Polynomial::from_terms(&self.field, cap, self.terms.iter().map(|(m, c)| (m.reduce(cap), *c)))
    }

    fn check(&self, other: &Polynomial) -> Result<(), AlgebraError> {
        if !self.field.same_field(&other.field) {
            return Err(AlgebraError::FieldMismatch);
        }
        if self.cap != other.cap {
            return Err(AlgebraError::CapMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Polynomial) -> Polynomial {
        let f = &self.field;
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add(a[i].1, b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial { field: self.field.clone(), cap: self.cap, terms: out }
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(self.field.neg(FieldElement::ONE))
    }

    pub fn scale(&self, c: FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.field, self.cap);
        }
        Polynomial {
            field: self.field.clone(),
            cap: self.cap,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), self.field.mul(*a, c))).collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: FieldElement, other: &Polynomial, beta: FieldElement) -> Result<Polynomial, AlgebraError> {
        self.check(other)?;
        Ok(self.scale(alpha).add_unchecked(&other.scale(beta)))
    }

    pub fn mul_reduce(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check(other)?;
        let f = &self.field;
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb).reduce(self.cap);
                let e = acc.entry(m).or_insert(FieldElement::ZERO);
                *e = f.add(*e, f.mul(*ca, *cb));
            }
        }
        Ok(Polynomial::from_map(f, self.cap, acc))
    }

    /// `reduce(m * self)` for a monomial multiplier.
    pub fn mul_monomial_reduce(&self, m: &Monomial) -> Polynomial {
        Polynomial::from_terms(&self.field, self.cap, self.terms.iter().map(|(t, c)| (t.mul(m).reduce(self.cap), *c)))
    }

    pub fn mul_var_reduce(&self, v: u32) -> Polynomial {
        self.mul_monomial_reduce(&Monomial::var(v))
    }

    /// Simultaneous substitution; unmapped variables stay put. The result is
    /// reduced under `target`.
    pub fn substitute(&self, s: &HashMap<u32, Polynomial>, target: Cap) -> Result<Polynomial, AlgebraError> {
        for img in s.values() {
            if !img.field.same_field(&self.field) {
                return Err(AlgebraError::FieldMismatch);
            }
        }
        let f = &self.field;
        let mut powers: HashMap<(u32, u32), Polynomial> = HashMap::new();
        let mut total = Polynomial::zero(f, target);
        for (m, c) in &self.terms {
            let mut prod = Polynomial::constant(f, target, *c);
            for &(v, e) in m.pairs() {
                let pw = match powers.get(&(v, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let base = match s.get(&v) {
                            Some(img) => img.with_cap(target),
                            None => Polynomial::var(f, target, v),
                        };
                        let mut r = Polynomial::one(f, target);
                        for _ in 0..e {
                            r = r.mul_reduce(&base)?;
                        }
                        powers.insert((v, e), r.clone());
                        r
                    }
                };
                prod = prod.mul_reduce(&pw)?;
                if prod.is_zero() {
                    break;
                }
            }
            total = total.add_unchecked(&prod);
        }
        Ok(total)
    }

    /// Exact evaluation at a point given by a lookup.
    pub fn evaluate_with(&self, a: impl Fn(u32) -> Option<FieldElement>) -> Result<FieldElement, AlgebraError> {
        let f = &self.field;
        let mut sum = FieldElement::ZERO;
        for (m, c) in &self.terms {
            let mut t = *c;
            for &(v, e) in m.pairs() {
                let x = a(v).ok_or(AlgebraError::UnboundVariable(v))?;
                t = f.mul(t, f.pow(x, e as u64));
            }
            sum = f.add(sum, t);
        }
        Ok(sum)
    }

    pub fn evaluate(&self, a: &HashMap<u32, FieldElement>) -> Result<FieldElement, AlgebraError> {
        self.evaluate_with(|v| a.get(&v).copied())
    }

    /// Renames variables through `f`.
    pub fn rename(&self, f: impl Fn(u32) -> u32) -> Polynomial {
        Polynomial::from_terms(&self.field, self.cap, self.terms.iter().map(|(m, c)| (m.rename(&f), *c)))
    }

    /// Replaces the field handle by an equal one (e.g. to attach a root tag).
    pub fn rebind(&self, field: &FieldSpec) -> Result<Polynomial, AlgebraError> {
        if !self.field.same_field(field) {
            return Err(AlgebraError::FieldMismatch);
        }
        Ok(Polynomial { field: field.clone(), cap: self.cap, terms: self.terms.clone() })
    }
}

pub fn poly_add(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, AlgebraError> {
    a.add(b)
}

pub fn poly_mul_reduce(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, AlgebraError> {
    a.mul_reduce(b)
}

pub fn poly_substitute(p: &Polynomial, s: &HashMap<u32, Polynomial>, target: Cap) -> Result<Polynomial, AlgebraError> {
    p.substitute(s, target)
}

pub fn poly_evaluate(p: &Polynomial, a: &HashMap<u32, FieldElement>) -> Result<FieldElement, AlgebraError> {
    p.evaluate(a)
}
