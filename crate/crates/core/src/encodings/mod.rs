//! Input systems: 0/1 and roots-of-unity colouring polynomials, colouring
//! inequalities, FPHP polynomials and inequalities, and the linear bridge
//! from the roots encoding to the 0/1 encoding.
//!
//! Colours are `0..k` internally. Variable ids are vertex-major and
//! colour-minor: `x_{v,c}` is `v * k + c`, and `p_{i,c}` (pigeon `i` using its
//! `c`-th edge) is `i * k + c`.

mod graph;

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use graph::{FphpInstance, Graph, GraphError};

use crate::algebra::{Cap, FieldElement, FieldSpec, Monomial, Polynomial};
use crate::cutplanes::CpLine;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("field has no primitive {0}-th root of unity")]
    MissingRoot(u32),
    #[error("k must be at least 1")]
    InvalidK,
}

/// Origin of an axiom.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomTag {
    Vertex,
    Uniqueness,
    Edge,
    Boolean,
    Pigeon,
    Collision,
    /// A fixed value `x = b` added to a system, or a premise standing for an
    /// earlier derived line.
    Assumption,
}

impl AxiomTag {
    pub fn name(self) -> &'static str {
        match self {
            AxiomTag::Vertex => "vertex",
            AxiomTag::Uniqueness => "uniqueness",
            AxiomTag::Edge => "edge",
            AxiomTag::Boolean => "boolean",
            AxiomTag::Pigeon => "pigeon",
            AxiomTag::Collision => "collision",
            AxiomTag::Assumption => "assumption",
        }
    }

    pub fn from_name(s: &str) -> Option<AxiomTag> {
        Some(match s {
            "vertex" => AxiomTag::Vertex,
            "uniqueness" => AxiomTag::Uniqueness,
            "edge" => AxiomTag::Edge,
            "boolean" => AxiomTag::Boolean,
            "pigeon" => AxiomTag::Pigeon,
            "collision" => AxiomTag::Collision,
            "assumption" => AxiomTag::Assumption,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub poly: Polynomial,
    pub tag: AxiomTag,
}

/// A tagged list of polynomial axioms over one field and cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    pub field: FieldSpec,
    pub cap: Cap,
    pub axioms: Vec<Axiom>,
    /// Symbolic name of every variable id `0..n_vars`.
    pub var_names: Vec<String>,
}

impl PolySystem {
    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn polys(&self) -> impl Iterator<Item = &Polynomial> {
        self.axioms.iter().map(|a| &a.poly)
    }

    pub fn max_axiom_degree(&self) -> i64 {
        self.polys().map(Polynomial::degree).max().unwrap_or(0).max(0)
    }

    /// Largest degree among non-Boolean axioms: the smallest degree at which
    /// a search is meaningful, since Boolean axioms vanish under the cap.
    pub fn degree_floor(&self) -> i64 {
        self.axioms.iter().filter(|a| a.tag != AxiomTag::Boolean).map(|a| a.poly.degree()).max().unwrap_or(0).max(0)
    }

    /// The same system without Boolean axioms.
    pub fn without_boolean(&self) -> PolySystem {
        PolySystem { axioms: self.axioms.iter().filter(|a| a.tag != AxiomTag::Boolean).cloned().collect(), ..self.clone() }
    }

    pub fn push(&mut self, poly: Polynomial, tag: AxiomTag) {
        self.axioms.push(Axiom { poly, tag });
    }
}

/// A tagged list of inequalities over 0/1 variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpSystem {
    pub inequalities: Vec<(CpLine, AxiomTag)>,
    pub n_vars: usize,
}

impl CpSystem {
    pub fn lines(&self) -> impl Iterator<Item = &CpLine> {
        self.inequalities.iter().map(|(l, _)| l)
    }
}

pub fn colour_var(v: usize, c: usize, k: usize) -> u32 {
    (v * k + c) as u32
}

fn colouring_names(n: usize, k: usize) -> Vec<String> {
    (0..n).flat_map(|v| (0..k).map(move |c| format!("x_{{{},{}}}", v, c + 1))).collect()
}

fn sum_minus_one(f: &FieldSpec, vars: impl IntoIterator<Item = u32>) -> Polynomial {
    let minus_one = f.neg(f.one());
    Polynomial::from_terms(
        f,
        Cap::Boolean,
        vars.into_iter().map(|v| (Monomial::var(v), FieldElement::ONE)).chain([(Monomial::one(), minus_one)]),
    )
}

fn product(f: &FieldSpec, vars: impl IntoIterator<Item = u32>) -> Polynomial {
    Polynomial::monomial(f, Cap::Boolean, Monomial::from_vars(vars), FieldElement::ONE)
}

/// `x^2 - x`, stored unreduced.
pub fn boolean_axiom(f: &FieldSpec, v: u32) -> Polynomial {
    Polynomial::from_terms(
        f,
        Cap::Boolean,
        [(Monomial::from_pairs([(v, 2)]), FieldElement::ONE), (Monomial::var(v), f.neg(f.one()))],
    )
}

fn push_boolean(sys: &mut PolySystem) {
    for v in 0..sys.n_vars() as u32 {
        let b = boolean_axiom(&sys.field, v);
        sys.push(b, AxiomTag::Boolean);
    }
}

/// The 0/1 colouring encoding over GF(2).
pub fn encode_colouring01(g: &Graph, k: usize) -> PolySystem {
    encode_colouring01_over(g, k, &FieldSpec::prime(2).expect("2 is prime"))
}

/// The 0/1 colouring encoding over a chosen field: a vertex axiom
/// `sum_c x_{v,c} - 1`, uniqueness `x_{v,c} x_{v,c'}` for `c < c'`, edge
/// `x_{u,c} x_{v,c}`, then one Boolean axiom per variable.
pub fn encode_colouring01_over(g: &Graph, k: usize, f: &FieldSpec) -> PolySystem {
    let n = g.n_vertices();
    let mut sys = PolySystem { field: f.clone(), cap: Cap::Boolean, axioms: Vec::new(), var_names: colouring_names(n, k) };
    for v in 0..n {
        sys.push(sum_minus_one(f, (0..k).map(|c| colour_var(v, c, k))), AxiomTag::Vertex);
        for c in 0..k {
            for c2 in c + 1..k {
                sys.push(product(f, [colour_var(v, c, k), colour_var(v, c2, k)]), AxiomTag::Uniqueness);
            }
        }
    }
    for &(u, v) in g.edges() {
        for c in 0..k {
            sys.push(product(f, [colour_var(u as usize, c, k), colour_var(v as usize, c, k)]), AxiomTag::Edge);
        }
    }
    push_boolean(&mut sys);
    sys
}

fn root_of(f: &FieldSpec, k: usize) -> Result<FieldElement, EncodingError> {
    match f.kth_root() {
        Some((w, kk)) if kk as usize == k => Ok(w),
        _ => Err(EncodingError::MissingRoot(k as u32)),
    }
}

/// The roots-of-unity encoding: `y_v^k - 1` per vertex (kept unreduced) and
/// `sum_{j<k} y_u^j y_v^{k-1-j}` per edge.
pub fn encode_colouring_roots(g: &Graph, k: usize, f: &FieldSpec) -> Result<PolySystem, EncodingError> {
    root_of(f, k)?;
    let cap = Cap::Roots(k as u32);
    let n = g.n_vertices();
    let mut sys = PolySystem { field: f.clone(), cap, axioms: Vec::new(), var_names: (0..n).map(|v| format!("y_{v}")).collect() };
    let minus_one = f.neg(f.one());
    for v in 0..n as u32 {
        let p = Polynomial::from_terms(
            f,
            cap,
            [(Monomial::from_pairs([(v, k as u32)]), FieldElement::ONE), (Monomial::one(), minus_one)],
        );
        sys.push(p, AxiomTag::Vertex);
    }
    for &(u, v) in g.edges() {
        let k = k as u32;
        let p =
            Polynomial::from_terms(f, cap, (0..k).map(|j| (Monomial::from_pairs([(u, j), (v, k - 1 - j)]), FieldElement::ONE)));
        sys.push(p, AxiomTag::Edge);
    }
    Ok(sys)
}

/// `sum_i vars_i >= 1`.
fn at_least_one(vars: impl IntoIterator<Item = u32>) -> CpLine {
    CpLine::new(vars.into_iter().map(|v| (v, BigInt::from(1))), BigInt::from(1))
}

/// `a + b <= 1`, stored as `-a - b >= -1`.
fn at_most_one_pair(a: u32, b: u32) -> CpLine {
    CpLine::new([(a, BigInt::from(-1)), (b, BigInt::from(-1))], BigInt::from(-1))
}

/// The colouring inequalities, in the same order as the 0/1 polynomials.
pub fn encode_colouring_cp(g: &Graph, k: usize) -> CpSystem {
    let n = g.n_vertices();
    let mut out = Vec::new();
    for v in 0..n {
        out.push((at_least_one((0..k).map(|c| colour_var(v, c, k))), AxiomTag::Vertex));
        for c in 0..k {
            for c2 in c + 1..k {
                out.push((at_most_one_pair(colour_var(v, c, k), colour_var(v, c2, k)), AxiomTag::Uniqueness));
            }
        }
    }
    for &(u, v) in g.edges() {
        for c in 0..k {
            out.push((at_most_one_pair(colour_var(u as usize, c, k), colour_var(v as usize, c, k)), AxiomTag::Edge));
        }
    }
    CpSystem { inequalities: out, n_vars: n * k }
}

/// Id of `p_{i,c}`.
pub fn pigeon_var(b: &FphpInstance, i: usize, c: usize) -> u32 {
    (i * b.k() + c) as u32
}

/// Pairs of pigeon edges meeting in a hole: `(i, c, i2, c2)` with `i < i2`,
/// ascending by hole then by pigeons.
pub fn collisions(b: &FphpInstance) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for j in 0..b.n_holes() {
        let at: Vec<(usize, usize)> = b.pigeons_at(j as u32);
        for (x, &(i, c)) in at.iter().enumerate() {
            for &(i2, c2) in &at[x + 1..] {
                out.push((i, c, i2, c2));
            }
        }
    }
    out
}

/// The FPHP polynomials: pigeon axioms, uniqueness, collisions, Boolean.
pub fn encode_fphp(b: &FphpInstance, f: &FieldSpec) -> PolySystem {
    let k = b.k();
    let mut sys = PolySystem {
        field: f.clone(),
        cap: Cap::Boolean,
        axioms: Vec::new(),
        var_names: (0..b.n_pigeons()).flat_map(|i| b.neighbours(i).iter().map(move |j| format!("p_{{{},{}}}", i, j))).collect(),
    };
    for i in 0..b.n_pigeons() {
        sys.push(sum_minus_one(f, (0..k).map(|c| pigeon_var(b, i, c))), AxiomTag::Pigeon);
        for c in 0..k {
            for c2 in c + 1..k {
                sys.push(product(f, [pigeon_var(b, i, c), pigeon_var(b, i, c2)]), AxiomTag::Uniqueness);
            }
        }
    }
    for (i, c, i2, c2) in collisions(b) {
        sys.push(product(f, [pigeon_var(b, i, c), pigeon_var(b, i2, c2)]), AxiomTag::Collision);
    }
    push_boolean(&mut sys);
    sys
}

/// The FPHP inequalities used by the counting refutation: one
/// `sum_c p_{i,c} >= 1` per pigeon and `p + p' <= 1` per collision.
pub fn encode_fphp_cp(b: &FphpInstance) -> CpSystem {
    let k = b.k();
    let mut out = Vec::new();
    for i in 0..b.n_pigeons() {
        out.push((at_least_one((0..k).map(|c| pigeon_var(b, i, c))), AxiomTag::Pigeon));
    }
    for (i, c, i2, c2) in collisions(b) {
        out.push((at_most_one_pair(pigeon_var(b, i, c), pigeon_var(b, i2, c2)), AxiomTag::Collision));
    }
    CpSystem { inequalities: out, n_vars: b.n_pigeons() * k }
}

/// `y_v -> sum_c x_{v,c} w^{c+1}` over Boolean-capped variables; colour `c`
/// (0-based) is the root `w^{c+1}`, so the last colour is `w^k = 1`.
pub fn roots_substitution(g: &Graph, k: usize, f: &FieldSpec) -> Result<HashMap<u32, Polynomial>, EncodingError> {
    let w = root_of(f, k)?;
    Ok((0..g.n_vertices())
        .map(|v| {
            let img = Polynomial::from_terms(
                f,
                Cap::Boolean,
                (0..k).map(|c| (Monomial::var(colour_var(v, c, k)), f.pow(w, (c as u64 + 1) % k as u64))),
            );
            (v as u32, img)
        })
        .collect())
}

/// The root `w^{c+1}` naming colour `c`.
pub fn colour_root(f: &FieldSpec, k: usize, c: usize) -> Result<FieldElement, EncodingError> {
    let w = root_of(f, k)?;
    Ok(f.pow(w, (c as u64 + 1) % k as u64))
}
