use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{pc_check, PcError, PcJust, PcProof};
use crate::algebra::text::format_polynomial;
use crate::algebra::{Cap, FieldElement, FieldSpec, Monomial, Polynomial};
use crate::encodings::{
    encode_colouring01_over, encode_colouring_roots, encode_fphp, roots_substitution, AxiomTag, Graph, PolySystem,
};
use crate::nullsatz::NssCertificate;
use crate::reduction::{pc_substitution_map, ReductionOutput};

/// `coeff * mult * axiom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub axiom: usize,
    pub mult: Monomial,
    pub coeff: FieldElement,
}

/// The product and sum-to-one axioms of a Boolean system, indexed for
/// decomposing polynomials that lie in the ideal they generate locally.
pub struct LocalIdeal<'a> {
    sys: &'a PolySystem,
    /// Axiom `x * y` by sorted variable pair.
    pairs: HashMap<(u32, u32), usize>,
    /// Axiom `sum vars - 1` and its variables.
    groups: Vec<(usize, Vec<u32>)>,
    group_of: HashMap<u32, usize>,
}

impl<'a> LocalIdeal<'a> {
    pub fn new(sys: &'a PolySystem) -> LocalIdeal<'a> {
        let f = &sys.field;
        let minus_one = f.neg(FieldElement::ONE);
        let mut pairs = HashMap::new();
        let mut groups = Vec::new();
        let mut group_of = HashMap::new();
        for (i, a) in sys.axioms.iter().enumerate() {
            if a.tag == AxiomTag::Boolean {
                continue;
            }
            let t = a.poly.terms();
            if let [(m, c)] = t {
                if *c == FieldElement::ONE && m.pairs().len() == 2 && m.degree() == 2 {
                    pairs.entry((m.pairs()[0].0, m.pairs()[1].0)).or_insert(i);
                }
                continue;
            }
            if let Some(((m, c), rest)) = t.split_last() {
                if m.is_one() && *c == minus_one && rest.iter().all(|(m, c)| m.degree() == 1 && *c == FieldElement::ONE) {
                    let vars: Vec<u32> = rest.iter().map(|(m, _)| m.pairs()[0].0).collect();
                    if vars.iter().all(|v| !group_of.contains_key(v)) {
                        for &v in &vars {
                            group_of.insert(v, groups.len());
                        }
                        groups.push((i, vars));
                    }
                }
            }
        }
        LocalIdeal { sys, pairs, groups, group_of }
    }

    /// Groups containing a variable of `p`, ascending.
    pub fn groups_touching(&self, p: &Polynomial) -> Vec<usize> {
        let s: BTreeSet<usize> = p.variables().iter().filter_map(|v| self.group_of.get(v).copied()).collect();
        s.into_iter().collect()
    }

    fn find_pair(&self, m: &Monomial) -> Option<(usize, Monomial)> {
        let vars: Vec<u32> = m.variables().collect();
        for (a, &x) in vars.iter().enumerate() {
            for &y in &vars[a + 1..] {
                if let Some(&ax) = self.pairs.get(&(x, y)) {
                    let rest = Monomial::from_vars(vars.iter().copied().filter(|&v| v != x && v != y));
                    return Some((ax, rest));
                }
            }
        }
        None
    }

    fn eliminate_pairs(&self, r: &mut BTreeMap<Monomial, FieldElement>, parts: &mut Vec<Part>) {
        let keys: Vec<Monomial> = r.keys().cloned().collect();
        for m in keys {
            if let Some((axiom, mult)) = self.find_pair(&m) {
                let coeff = r.remove(&m).expect("present");
                parts.push(Part { axiom, mult, coeff });
            }
        }
    }

    /// Writes `target` as a combination of product axioms and of sum axioms
    /// of the groups in `pad`. Every monomial avoiding a padded group is
    /// multiplied out by that group's sum; monomials holding an axiom pair
    /// are charged to that pair. Fails if anything survives.
    pub fn decompose(&self, target: &Polynomial, pad: &[usize]) -> Result<Vec<Part>, PcError> {
        let f = &self.sys.field;
        let mut r: BTreeMap<Monomial, FieldElement> = target.reduced().terms().iter().cloned().collect();
        let mut parts = Vec::new();
        self.eliminate_pairs(&mut r, &mut parts);
        for &g in pad {
            let (axiom, vars) = &self.groups[g];
            let keys: Vec<Monomial> = r.keys().filter(|m| vars.iter().all(|v| !m.contains(*v))).cloned().collect();
            for m in keys {
                let c = r.remove(&m).expect("present");
                parts.push(Part { axiom: *axiom, mult: m.clone(), coeff: f.neg(c) });
                for &v in vars {
                    let e = r.entry(m.mul_var(v)).or_insert(FieldElement::ZERO);
                    *e = f.add(*e, c);
                }
            }
            r.retain(|_, c| !c.is_zero());
        }
        self.eliminate_pairs(&mut r, &mut parts);
        r.retain(|_, c| !c.is_zero());
        if !r.is_empty() {
            let rest = Polynomial::from_terms(f, Cap::Boolean, r);
            return Err(PcError::NotInIdeal(format_polynomial(&rest)));
        }
        let sum = self.evaluate(&parts);
        assert_eq!(sum, target.reduced(), "decomposition does not reproduce its target");
        Ok(parts)
    }

    /// Like [`LocalIdeal::decompose`] for a target vanishing on every point
    /// that satisfies the groups, without raising degree: the last variable
    /// of each group is rewritten as one minus the others until no monomial
    /// holds one, and the remainder must vanish by product axioms alone.
    pub fn decompose_normal(&self, target: &Polynomial) -> Result<Vec<Part>, PcError> {
        let f = &self.sys.field;
        let last: HashMap<u32, usize> =
            self.groups.iter().enumerate().filter_map(|(g, (_, vars))| vars.last().map(|&v| (v, g))).collect();
        let mut r: BTreeMap<Monomial, FieldElement> = target.reduced().terms().iter().cloned().collect();
        let mut parts = Vec::new();
        loop {
            self.eliminate_pairs(&mut r, &mut parts);
            r.retain(|_, c| !c.is_zero());
            let Some((m, g, v)) = r.keys().find_map(|m| m.variables().find_map(|v| last.get(&v).map(|&g| (m.clone(), g, v))))
            else {
                break;
            };
            let c = r.remove(&m).expect("present");
            let rest = m.div(&Monomial::var(v)).expect("contains v");
            let (axiom, vars) = &self.groups[g];
            // c * rest * (sum vars - 1) accounts for c * m.
            parts.push(Part { axiom: *axiom, mult: rest.clone(), coeff: c });
            for &o in vars.iter().filter(|&&o| o != v) {
                let e = r.entry(rest.mul_var(o).reduce(Cap::Boolean)).or_insert(FieldElement::ZERO);
                *e = f.sub(*e, c);
            }
            let e = r.entry(rest).or_insert(FieldElement::ZERO);
            *e = f.add(*e, c);
        }
        if !r.is_empty() {
            let rest = Polynomial::from_terms(f, Cap::Boolean, r);
            return Err(PcError::NotInIdeal(format_polynomial(&rest)));
        }
        assert_eq!(self.evaluate(&parts), target.reduced(), "decomposition does not reproduce its target");
        Ok(parts)
    }

    fn evaluate(&self, parts: &[Part]) -> Polynomial {
        let f = &self.sys.field;
        let mut acc = Polynomial::zero(f, self.sys.cap);
        for p in parts {
            let term = self.sys.axioms[p.axiom].poly.mul_monomial_reduce(&p.mult).scale(p.coeff);
            acc = acc.add(&term).expect("same ring");
        }
        acc
    }
}

/// Writes combinations of axiom multiples into a proof, sharing the
/// multiplication chains.
struct Emitter {
    chains: HashMap<(usize, Monomial), usize>,
}

impl Emitter {
    fn new() -> Emitter {
        Emitter { chains: HashMap::new() }
    }

    fn chain(&mut self, proof: &mut PcProof, sys: &PolySystem, axiom: usize, m: &Monomial) -> usize {
        if let Some(&t) = self.chains.get(&(axiom, m.clone())) {
            return t;
        }
        let t = match m.pairs().split_last() {
            None => proof.axiom(sys, axiom),
            Some((&(v, e), rest)) => {
                let mut prefix: Vec<(u32, u32)> = rest.to_vec();
                if e > 1 {
                    prefix.push((v, e - 1));
                }
                let base = self.chain(proof, sys, axiom, &Monomial::from_pairs(prefix));
                proof.mul(base, v)
            }
        };
        self.chains.insert((axiom, m.clone()), t);
        t
    }

    /// A line equal to the combination; a zero line when `parts` is empty.
    fn emit(&mut self, proof: &mut PcProof, sys: &PolySystem, parts: &[Part]) -> usize {
        let mut acc: Option<usize> = None;
        for p in parts {
            let l = self.chain(proof, sys, p.axiom, &p.mult);
            acc = Some(match acc {
                None => proof.lin_comb(l, l, p.coeff, FieldElement::ZERO),
                Some(a) => proof.lin_comb(a, l, FieldElement::ONE, p.coeff),
            });
        }
        match acc {
            Some(a) => a,
            None => self.zero(proof, sys),
        }
    }

    fn zero(&mut self, proof: &mut PcProof, sys: &PolySystem) -> usize {
        let base = if proof.is_empty() { self.chain(proof, sys, 0, &Monomial::one()) } else { proof.len() - 1 };
        proof.zero_from(base)
    }

    /// `p * line`, one monomial of `p` at a time.
    fn times(&mut self, proof: &mut PcProof, sys: &PolySystem, line: usize, p: &Polynomial) -> usize {
        let mut acc: Option<usize> = None;
        for (m, c) in p.terms() {
            let l = proof.mul_monomial(line, m);
            acc = Some(match acc {
                None => proof.lin_comb(l, l, *c, FieldElement::ZERO),
                Some(a) => proof.lin_comb(a, l, FieldElement::ONE, *c),
            });
        }
        match acc {
            Some(a) => a,
            None => self.zero(proof, sys),
        }
    }
}

/// A checked derivation of one substituted axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    /// Axiom index in the source system.
    pub source: usize,
    pub tag: AxiomTag,
    pub target: Polynomial,
    pub proof: PcProof,
    /// The image is the zero polynomial.
    pub vanishing: bool,
}

fn derive_one(
    li: &LocalIdeal,
    sys: &PolySystem,
    source: usize,
    tag: AxiomTag,
    target: Polynomial,
) -> Result<Derivation, PcError> {
    let parts = li.decompose(&target, &li.groups_touching(&target))?;
    let mut proof = PcProof::new(&sys.field, sys.cap);
    Emitter::new().emit(&mut proof, sys, &parts);
    assert_eq!(proof.last(), Some(&target), "derivation ends elsewhere");
    let vanishing = target.is_zero();
    Ok(Derivation { source, tag, target, proof, vanishing })
}

/// `sum_{l<k} w^{(a+1)l} w^{(b+1)(k-1-l)}`: the coefficient of
/// `x_{u,a} x_{v,b}` in the substituted, padded edge polynomial. Zero
/// whenever `a != b`.
pub fn edge_block_coefficient(f: &FieldSpec, k: usize, a: usize, b: usize) -> Result<FieldElement, PcError> {
    let (w, kk) = f.kth_root().ok_or(PcError::MissingRoot(k as u32))?;
    if kk as usize != k {
        return Err(PcError::MissingRoot(k as u32));
    }
    let ra = f.pow(w, (a as u64 + 1) % k as u64);
    let rb = f.pow(w, (b as u64 + 1) % k as u64);
    let mut s = FieldElement::ZERO;
    for l in 0..k as u64 {
        s = f.add(s, f.mul(f.pow(ra, l), f.pow(rb, k as u64 - 1 - l)));
    }
    Ok(s)
}

fn root_systems(g: &Graph, k: usize, f: &FieldSpec) -> Result<(PolySystem, PolySystem, HashMap<u32, Polynomial>), PcError> {
    let roots = encode_colouring_roots(g, k, f).map_err(|_| PcError::MissingRoot(k as u32))?;
    let subst = roots_substitution(g, k, f).map_err(|_| PcError::MissingRoot(k as u32))?;
    Ok((encode_colouring01_over(g, k, f), roots, subst))
}

/// For every axiom of the roots encoding, a derivation of its image under
/// `y_v -> sum_c w^{c+1} x_{v,c}` from the 0/1 encoding over the same field.
pub fn derive_substituted_axioms_prop21(g: &Graph, k: usize, f: &FieldSpec) -> Result<Vec<Derivation>, PcError> {
    let (sys01, roots, subst) = root_systems(g, k, f)?;
    let li = LocalIdeal::new(&sys01);
    roots
        .axioms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let target = a.poly.substitute(&subst, Cap::Boolean).map_err(|e| PcError::Reduction(e.to_string()))?;
            derive_one(&li, &sys01, i, a.tag, target)
        })
        .collect()
}

/// Turns a roots-encoding certificate into a refutation of the 0/1
/// encoding: derive each substituted axiom, multiply it by its substituted
/// multiplier, sum, and cancel the rest with vertex and uniqueness axioms.
pub fn roots_certificate_to_pc(g: &Graph, k: usize, f: &FieldSpec, cert: &NssCertificate) -> Result<PcProof, PcError> {
    let (sys01, roots, subst) = root_systems(g, k, f)?;
    let li = LocalIdeal::new(&sys01);
    let mut proof = PcProof::new(f, Cap::Boolean);
    let mut em = Emitter::new();
    let sub = |p: &Polynomial| p.substitute(&subst, Cap::Boolean).map_err(|e| PcError::Reduction(e.to_string()));
    let mut acc: Option<usize> = None;
    let mut total = Polynomial::zero(f, Cap::Boolean);
    for (a, gm) in roots.axioms.iter().zip(&cert.multipliers) {
        if gm.is_zero() {
            continue;
        }
        let target = sub(&a.poly)?;
        let parts = li.decompose(&target, &li.groups_touching(&target))?;
        let line = em.emit(&mut proof, &sys01, &parts);
        let mult = sub(gm)?;
        let l = em.times(&mut proof, &sys01, line, &mult);
        total = total.add(proof.poly(l)).expect("same ring");
        acc = Some(match acc {
            None => l,
            Some(x) => proof.lin_comb(x, l, FieldElement::ONE, FieldElement::ONE),
        });
    }
    let Some(acc) = acc else {
        return Err(PcError::NotInIdeal("empty certificate".into()));
    };
    let rest = total.sub(&Polynomial::one(f, Cap::Boolean)).expect("same ring");
    let parts = li.decompose_normal(&rest)?;
    let r = em.emit(&mut proof, &sys01, &parts);
    let minus_one = f.neg(FieldElement::ONE);
    proof.lin_comb(acc, r, FieldElement::ONE, minus_one);
    Ok(proof.pruned())
}

/// For every non-Boolean axiom of the 0/1 colouring encoding of `G(B)`,
/// a derivation of its image under the reduction's substitution from the
/// FPHP axioms.
pub fn derive_substituted_axioms_lemma34(out: &ReductionOutput, f: &FieldSpec) -> Result<Vec<Derivation>, PcError> {
    let col = encode_colouring01_over(&out.graph, out.k, f);
    let fphp = encode_fphp(&out.instance, f);
    let images = pc_substitution_map(out, f).map_err(|e| PcError::Reduction(e.to_string()))?;
    let li = LocalIdeal::new(&fphp);
    col.axioms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.tag != AxiomTag::Boolean)
        .map(|(i, a)| {
            let target = a.poly.reduced().substitute(&images, Cap::Boolean).map_err(|e| PcError::Reduction(e.to_string()))?;
            derive_one(&li, &fphp, i, a.tag, target)
        })
        .collect()
}

/// Translates a PC proof from the 0/1 colouring encoding of `G(B)` into a
/// proof from the FPHP axioms whose lines are the images of the original
/// lines. Axiom lines become their derivations, linear combinations carry
/// over, and `x * p` becomes the substituted `x` times the image of `p`
/// plus a correction from uniqueness axioms.
pub fn compose_lemma34(col_proof: &PcProof, out: &ReductionOutput, f: &FieldSpec) -> Result<PcProof, PcError> {
    let col = encode_colouring01_over(&out.graph, out.k, f);
    let report = pc_check(col_proof, &col);
    if !report.valid {
        return Err(PcError::InvalidInput(report.failure.map(|x| x.0).unwrap_or(0)));
    }
    let fphp = encode_fphp(&out.instance, f);
    let images = pc_substitution_map(out, f).map_err(|e| PcError::Reduction(e.to_string()))?;
    let li = LocalIdeal::new(&fphp);
    let sub = |p: &Polynomial| p.substitute(&images, Cap::Boolean).map_err(|e| PcError::Reduction(e.to_string()));
    let mut proof = PcProof::new(f, Cap::Boolean);
    let mut em = Emitter::new();
    let mut map: Vec<usize> = Vec::with_capacity(col_proof.len());
    let mut axiom_line: HashMap<usize, usize> = HashMap::new();
    for line in &col_proof.lines {
        let t = match &line.just {
            PcJust::BooleanAxiom(_) => em.zero(&mut proof, &fphp),
            PcJust::InitialAxiom(i) => match axiom_line.get(i) {
                Some(&t) => t,
                None => {
                    let target = sub(&line.poly)?;
                    let parts = li.decompose(&target, &li.groups_touching(&target))?;
                    let t = em.emit(&mut proof, &fphp, &parts);
                    axiom_line.insert(*i, t);
                    t
                }
            },
            PcJust::LinComb(i, j, a, b) => proof.lin_comb(map[*i], map[*j], *a, *b),
            PcJust::Mul(i, x) => {
                let sx = images.get(x).cloned().unwrap_or_else(|| Polynomial::zero(f, Cap::Boolean));
                let y = em.times(&mut proof, &fphp, map[*i], &sx);
                let target = sub(&line.poly)?;
                let diff = target.sub(proof.poly(y)).expect("same ring");
                if diff.is_zero() {
                    y
                } else {
                    let parts = li.decompose(&diff, &[])?;
                    let dl = em.emit(&mut proof, &fphp, &parts);
                    proof.lin_comb(y, dl, FieldElement::ONE, FieldElement::ONE)
                }
            }
        };
        debug_assert_eq!(proof.poly(t), &sub(&line.poly)?);
        map.push(t);
    }
    if let Some(&last) = map.last() {
        if last + 1 != proof.len() {
            proof.lin_comb(last, last, FieldElement::ONE, FieldElement::ZERO);
        }
    }
    Ok(proof.pruned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field_with_kth_root;

    #[test]
    fn geometric_blocks_vanish() {
        for k in [3usize, 4] {
            let f = field_with_kth_root(if k == 3 { 2 } else { 5 }, k as u32).unwrap();
            for a in 0..k {
                for b in 0..k {
                    let c = edge_block_coefficient(&f, k, a, b).unwrap();
                    assert_eq!(c.is_zero(), a != b, "k={k} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn single_vertex_and_edge_k3() {
        let f = field_with_kth_root(2, 3).unwrap();
        let g = Graph::complete(2);
        let sys01 = encode_colouring01_over(&g, 3, &f);
        let ds = derive_substituted_axioms_prop21(&g, 3, &f).unwrap();
        assert_eq!(ds.len(), 3);
        for d in &ds {
            let r = pc_check(&d.proof, &sys01);
            assert!(r.valid, "{:?}", r.failure);
            assert!(r.degree <= 6);
            assert_eq!(d.proof.last(), Some(&d.target));
        }
    }
}
