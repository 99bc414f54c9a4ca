//! Degree growth on reduction instances: minimal Nullstellensatz and
//! polynomial calculus degrees next to explicit cutting planes length.
//!
//! Row `n` uses `n + 1` pigeons, `n` holes and left degree `k`, so every
//! instance is unsatisfiable by counting. Searches that hit their budget
//! report the degree at which they stopped; rows are never dropped.

use serde::{Deserialize, Serialize};

use crate::cutplanes::{cp_check, cp_refute_reduction};
use crate::encodings::{encode_colouring01, encode_colouring_cp, FphpInstance, Graph};
use crate::expander::{check_boundary_expansion, sample_expander, sample_left_regular, ExpanderError, Fraction};
use crate::nullsatz::{nss_feasible_at_degree, NssError, NssOptions, NssOutcome};
use crate::pcsearch::{pc_refutable_at_degree, PcError, PcOptions, PcOutcome};
use crate::reduction::build_reduction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub alpha: Fraction,
    pub delta: Fraction,
    /// Samples tried per row before falling back to an unverified instance.
    pub max_tries: usize,
    pub d_max: i64,
    pub nss_max_unknowns: usize,
    pub pc_max_lines: usize,
}

/// Outcome of an ascending minimal-degree search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DegreeResult {
    Found {
        degree: i64,
    },
    /// No refutation below `degree`; the budget ran out at `degree`.
    Budget {
        degree: i64,
    },
    /// No refutation at any degree up to `d_max`.
    Exceeded {
        d_max: i64,
    },
}

impl DegreeResult {
    /// Exact degree, if found.
    pub fn exact(self) -> Option<i64> {
        match self {
            DegreeResult::Found { degree } => Some(degree),
            _ => None,
        }
    }

    /// Smallest degree not ruled out.
    pub fn lower_bound(self) -> i64 {
        match self {
            DegreeResult::Found { degree } | DegreeResult::Budget { degree } => degree,
            DegreeResult::Exceeded { d_max } => d_max + 1,
        }
    }

    pub fn status(self) -> &'static str {
        match self {
            DegreeResult::Found { .. } => "found",
            DegreeResult::Budget { .. } => "budget",
            DegreeResult::Exceeded { .. } => "exceeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub pigeons: usize,
    pub holes: usize,
    /// Seed of the instance actually used.
    pub instance_seed: u64,
    /// Whether the instance passed the exhaustive expansion check.
    pub expander: bool,
    pub vertices: usize,
    pub edges: usize,
    pub nss: DegreeResult,
    pub pc: DegreeResult,
    pub cp_length: usize,
    pub cp_valid: bool,
    /// Why the row is incomplete, if it is.
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub config: ExperimentConfig,
    /// `nss_min_degree` of `K_{k+1}`, the baseline every row is compared to.
    pub baseline_nss: DegreeResult,
    pub rows: Vec<ExperimentRow>,
}

fn nss_degree(sys: &crate::encodings::PolySystem, d_max: i64, max_unknowns: usize) -> DegreeResult {
    let opts = NssOptions { max_unknowns, ..NssOptions::default() };
    for d in sys.degree_floor()..=d_max {
        match nss_feasible_at_degree(sys, d, opts) {
            Ok(NssOutcome::Certificate(_)) => return DegreeResult::Found { degree: d },
            Ok(NssOutcome::Infeasible) => {}
            Err(NssError::BudgetExceeded(_)) => return DegreeResult::Budget { degree: d },
            Err(e) => panic!("encoded systems are well formed: {e}"),
        }
    }
    DegreeResult::Exceeded { d_max }
}

fn pc_degree(sys: &crate::encodings::PolySystem, d_max: i64, max_lines: usize) -> DegreeResult {
    for d in sys.degree_floor()..=d_max {
        match pc_refutable_at_degree(sys, d, PcOptions { max_lines }) {
            Ok(PcOutcome::Refuted(_)) => return DegreeResult::Found { degree: d },
            Ok(PcOutcome::NotRefutable { .. }) => {}
            Err(PcError::BudgetExceeded(_)) => return DegreeResult::Budget { degree: d },
            Err(e) => panic!("encoded systems are well formed: {e}"),
        }
    }
    DegreeResult::Exceeded { d_max }
}

/// A verified expander with `n + 1` pigeons and `n` holes if sampling finds
/// one, otherwise the first sample.
pub fn experiment_instance(cfg: &ExperimentConfig, n: usize) -> Result<(FphpInstance, u64, bool), ExpanderError> {
    match sample_expander(n + 1, n, cfg.k, cfg.alpha, cfg.delta, cfg.seed, cfg.max_tries) {
        Ok((b, s)) => Ok((b, s, true)),
        Err(ExpanderError::NotFound(_)) => {
            let b = sample_left_regular(n + 1, n, cfg.k, cfg.seed)?;
            let holds = check_boundary_expansion(&b, cfg.alpha, cfg.delta)?.holds;
            Ok((b, cfg.seed, holds))
        }
        Err(e) => Err(e),
    }
}

pub fn experiment_row(cfg: &ExperimentConfig, n: usize) -> ExperimentRow {
    let mut row = ExperimentRow {
        n,
        pigeons: n + 1,
        holes: n,
        instance_seed: cfg.seed,
        expander: false,
        vertices: 0,
        edges: 0,
        nss: DegreeResult::Exceeded { d_max: -1 },
        pc: DegreeResult::Exceeded { d_max: -1 },
        cp_length: 0,
        cp_valid: false,
        note: String::new(),
    };
    let (b, seed, expander) = match experiment_instance(cfg, n) {
        Ok(x) => x,
        Err(e) => {
            row.note = format!("no instance: {e}");
            return row;
        }
    };
    row.instance_seed = seed;
    row.expander = expander;
    if !expander {
        row.note = "no verified expander; used the first sample".into();
    }
    let out = match build_reduction(&b) {
        Ok(o) => o,
        Err(e) => {
            row.note = format!("reduction failed: {e}");
            return row;
        }
    };
    row.vertices = out.graph.n_vertices();
    row.edges = out.graph.n_edges();
    let sys = encode_colouring01(&out.graph, cfg.k);
    row.nss = nss_degree(&sys, cfg.d_max, cfg.nss_max_unknowns);
    row.pc = pc_degree(&sys, cfg.d_max, cfg.pc_max_lines);
    match cp_refute_reduction(&out) {
        Ok(r) => {
            row.cp_valid = cp_check(&r.proof, &encode_colouring_cp(&out.graph, cfg.k)).refutation;
            row.cp_length = r.proof.len();
        }
        Err(e) => row.note = format!("cp failed: {e}"),
    }
    row
}

pub fn experiment_degree_growth(cfg: &ExperimentConfig) -> ExperimentTable {
    let baseline = encode_colouring01(&Graph::complete(cfg.k + 1), cfg.k);
    ExperimentTable {
        config: cfg.clone(),
        baseline_nss: nss_degree(&baseline, cfg.d_max, cfg.nss_max_unknowns),
        rows: cfg.n_list.iter().map(|&n| experiment_row(cfg, n)).collect(),
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    n: usize,
    pigeons: usize,
    holes: usize,
    instance_seed: u64,
    expander: bool,
    vertices: usize,
    edges: usize,
    nss_min_degree: Option<i64>,
    nss_status: &'a str,
    nss_lower_bound: i64,
    pc_min_degree: Option<i64>,
    pc_status: &'a str,
    pc_lower_bound: i64,
    cp_length: usize,
    cp_valid: bool,
    note: &'a str,
}

/// One header line and one line per row; byte-identical for equal tables.
pub fn experiment_csv(table: &ExperimentTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &table.rows {
        w.serialize(CsvRow {
            n: r.n,
            pigeons: r.pigeons,
            holes: r.holes,
            instance_seed: r.instance_seed,
            expander: r.expander,
            vertices: r.vertices,
            edges: r.edges,
            nss_min_degree: r.nss.exact(),
            nss_status: r.nss.status(),
            nss_lower_bound: r.nss.lower_bound(),
            pc_min_degree: r.pc.exact(),
            pc_status: r.pc.status(),
            pc_lower_bound: r.pc.lower_bound(),
            cp_length: r.cp_length,
            cp_valid: r.cp_valid,
            note: &r.note,
        })
        .expect("plain rows serialise");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is UTF-8")
}
