//! Cutting planes: proof objects and checker, restriction, the weakening
//! lift, branching composition, and explicit refutations of pigeonhole and
//! reduction instances.

mod line;
mod proof;
mod refute;
mod transform;

pub use line::{CpLine, JsonInt};
pub use proof::{
    cp_check, cp_proof_from_jsonl, cp_proof_to_jsonl, prune_unused, strip_trivial, CpCheckFailure, CpCheckReport, CpJust,
    CpProof, CpStep,
};
pub use refute::*;
pub use transform::*;
