//! `polycol`: generation, encoding, search, proving and checking.
//!
//! Exit status: 0 success or feasible, 1 a semantic negative (infeasible,
//! invalid proof, expansion fails), 2 usage, input or budget error.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use polycol::algebra::{field_with_kth_root, FieldSpec};
use polycol::cutplanes::{cp_check, cp_proof_from_jsonl, cp_proof_to_jsonl, cp_refute_php, cp_refute_reduction, CpError};
use polycol::encodings::{
    encode_colouring01_over, encode_colouring_cp, encode_colouring_roots, encode_fphp, encode_fphp_cp, PolySystem,
};
use polycol::expander::{check_boundary_expansion, sample_expander, sample_left_regular, Fraction};
use polycol::experiment::{experiment_csv, experiment_degree_growth, ExperimentConfig};
use polycol::io;
use polycol::nullsatz::{nss_feasible_at_degree, NssError, NssOptions, NssOutcome};
use polycol::oracle::{
    brute_colour, brute_fphp, poly_system_satisfiable_01, poly_system_satisfiable_roots, Budget, OracleError, OracleVerdict,
    Witness,
};
use polycol::pcsearch::{
    pc_check, pc_proof_from_jsonl, pc_proof_to_jsonl, pc_refutable_at_degree, PcError, PcOptions, PcOutcome,
};
use polycol::reduction::build_reduction;

#[derive(Parser)]
#[command(name = "polycol", version, about = "Colouring encodings, FPHP reductions and proof-system tools")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Field as `p` or `p,m`.
    #[arg(long, global = true)]
    field: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget: oracle nodes, Nullstellensatz unknowns, PC lines.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Primary output file, written atomically; standard output if absent.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Write a run manifest (JSON) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an FPHP instance.
    GenFphp {
        #[arg(long)]
        pigeons: usize,
        #[arg(long)]
        holes: usize,
        #[arg(short)]
        k: usize,
        /// Resample until the instance is an (alpha, delta) boundary expander.
        #[arg(long)]
        expander: bool,
        #[arg(long, default_value = "1/2")]
        alpha: Fraction,
        #[arg(long, default_value = "3/2")]
        delta: Fraction,
        #[arg(long, default_value_t = 1000)]
        max_tries: usize,
    },
    /// Reduce an FPHP instance to a colouring instance (DIMACS plus a JSON
    /// sidecar describing gadgets and chain).
    GenColouring {
        /// FPHP text; standard input if absent.
        input: Option<PathBuf>,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Encode a DIMACS graph or FPHP instance.
    Encode {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short, default_value_t = 3)]
        k: usize,
        input: Option<PathBuf>,
    },
    /// Ascending Nullstellensatz degree search; writes the certificate.
    NssSearch {
        input: Option<PathBuf>,
        #[arg(long)]
        degree_max: i64,
    },
    /// Ascending polynomial calculus degree search; writes the proof.
    PcSearch {
        input: Option<PathBuf>,
        #[arg(long)]
        degree_max: i64,
    },
    /// Check a PC proof (JSONL) against a polynomial system.
    PcCheck {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Cutting planes refutation of an FPHP instance's reduction graph, or
    /// of the FPHP inequalities themselves with `--php`.
    CpProve {
        input: Option<PathBuf>,
        #[arg(long)]
        php: bool,
        /// Also write the refuted CP system here.
        #[arg(long)]
        system_out: Option<PathBuf>,
    },
    /// Check a cutting planes proof (JSONL) against an inequality system.
    CpCheck {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Brute-force satisfiability.
    Oracle {
        #[command(subcommand)]
        what: OracleCmd,
    },
    /// Test whether an FPHP instance is an (alpha, delta) boundary expander.
    ExpanderCheck {
        input: Option<PathBuf>,
        #[arg(long, default_value = "1/2")]
        alpha: Fraction,
        #[arg(long, default_value = "3/2")]
        delta: Fraction,
    },
    /// Minimal degrees and CP length on reductions of `n + 1` pigeons into
    /// `n` holes; CSV to the primary output.
    ExperimentDegreeGrowth {
        #[arg(short, default_value_t = 3)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        degree_max: i64,
        #[arg(long, default_value_t = 200)]
        max_tries: usize,
        /// Plot-ready JSON table.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// k-colourability of a DIMACS graph.
    Colour {
        input: Option<PathBuf>,
        #[arg(short)]
        k: usize,
    },
    /// Whether an FPHP instance has a valid mapping.
    Fphp {
        input: Option<PathBuf>,
    },
    /// Common zeros of a polynomial system over 0/1 points, or root points
    /// for a roots-capped system.
    Poly {
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "01")]
    ZeroOne,
    Roots,
    Cp,
    Opb,
    Fphp,
    FphpCp,
}

/// Failure with a diagnostic and exit status.
struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Fail {
        Fail(2, e.to_string())
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    inputs: BTreeMap<String, String>,
    seed: u64,
    field: Option<String>,
    degree_max: Option<i64>,
    timings_ms: BTreeMap<String, u128>,
    result: Value,
    exit_status: u8,
}

struct Ctx {
    global: Global,
    inputs: BTreeMap<String, String>,
    degree_max: Option<i64>,
    timings: BTreeMap<String, u128>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Ctx {
    fn read(&mut self, path: Option<&Path>) -> Result<String, Fail> {
        let (name, text) = match path {
            Some(p) => {
                (p.display().to_string(), std::fs::read_to_string(p).map_err(|e| Fail(2, format!("{}: {e}", p.display())))?)
            }
            None => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                ("-".to_string(), s)
            }
        };
        self.inputs.insert(name, sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn field(&self, default: FieldSpec) -> Result<FieldSpec, Fail> {
        match &self.global.field {
            None => Ok(default),
            Some(s) => parse_field(s),
        }
    }

    fn budget(&self) -> Budget {
        self.global.budget.map(Budget::nodes).unwrap_or_default()
    }

    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.insert(label.to_string(), t.elapsed().as_millis());
        out
    }
}

fn parse_field(s: &str) -> Result<FieldSpec, Fail> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |x: &str| x.trim().parse::<u64>().map_err(|_| Fail(2, format!("bad --field {s:?}")));
    Ok(match parts.as_slice() {
        [p] => FieldSpec::prime(num(p)?)?,
        [p, m] => FieldSpec::extension(num(p)?, num(m)? as usize)?,
        _ => return Err(Fail(2, format!("bad --field {s:?}"))),
    })
}

/// `f` with a primitive `k`-th root attached; the default field is the
/// smallest extension of GF(2) that has one.
fn roots_field(ctx: &Ctx, k: usize) -> Result<FieldSpec, Fail> {
    let Some(s) = &ctx.global.field else {
        return Ok(field_with_kth_root(2, k as u32)?);
    };
    let f = parse_field(s)?;
    let w = f
        .elements()
        .find(|&w| f.is_primitive_root(w, k as u32))
        .ok_or_else(|| Fail(2, format!("field {s} has no primitive {k}-th root of unity")))?;
    Ok(f.with_root(w, k as u32)?)
}

/// Writes to a temporary file beside `path` and renames it into place.
fn write_atomic(path: &Path, data: &[u8]) -> Result<(), Fail> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(data)?;
    tmp.persist(path).map_err(|e| Fail(2, e.to_string()))?;
    Ok(())
}

fn emit(ctx: &Ctx, text: &str) -> Result<(), Fail> {
    match &ctx.global.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn verdict_json(v: &OracleVerdict) -> Value {
    let witness = match &v.witness {
        None => Value::Null,
        Some(Witness::Colouring(c)) => json!({ "colouring": c }),
        Some(Witness::Matching(m)) => json!({ "matching": m }),
        Some(Witness::Assignment(a)) => json!({ "assignment": a.iter().map(|x| x.packed()).collect::<Vec<_>>() }),
    };
    json!({ "satisfiable": v.satisfiable, "witness": witness, "nodes_explored": v.nodes_explored })
}

fn oracle_result(ctx: &Ctx, r: Result<OracleVerdict, OracleError>) -> Result<(u8, Value), Fail> {
    match r {
        Ok(v) => {
            let j = verdict_json(&v);
            emit(ctx, &format!("{j}\n"))?;
            Ok((if v.satisfiable { 0 } else { 1 }, j))
        }
        Err(e) => Err(Fail(2, e.to_string())),
    }
}

fn run(cmd: Command, ctx: &mut Ctx) -> Result<(u8, Value), Fail> {
    match cmd {
        Command::GenFphp { pigeons, holes, k, expander, alpha, delta, max_tries } => {
            let seed = ctx.global.seed;
            let (b, used) = if expander {
                sample_expander(pigeons, holes, k, alpha, delta, seed, max_tries)?
            } else {
                (sample_left_regular(pigeons, holes, k, seed)?, seed)
            };
            emit(ctx, &io::format_fphp(&b))?;
            Ok((0, json!({ "pigeons": pigeons, "holes": holes, "k": k, "instance_seed": used })))
        }
        Command::GenColouring { input, sidecar } => {
            let b = io::parse_fphp(&ctx.read(input.as_deref())?)?;
            let out = ctx.time("reduce", || build_reduction(&b))?;
            emit(ctx, &io::format_dimacs(&out.graph))?;
            // Edge labelling: pigeon i's c-th edge goes to hole `edge_holes[i][c]`.
            let edge_holes: Vec<Vec<u32>> = (0..b.n_pigeons()).map(|i| (0..out.k).map(|c| out.hole(i, c)).collect()).collect();
            let side = json!({
                "k": out.k,
                "vertices": out.graph.n_vertices(),
                "edges": out.graph.n_edges(),
                "pigeon_vertices": out.pigeon_vertices,
                "edge_holes": edge_holes,
                "chain": out.chain,
                "chain_assignment": out.chain_assignment,
                "gadgets": out.gadgets,
            });
            let side_path = sidecar.or_else(|| ctx.global.out.as_ref().map(|o| o.with_extension("json")));
            if let Some(p) = side_path {
                write_atomic(&p, serde_json::to_string_pretty(&side)?.as_bytes())?;
            }
            Ok((0, json!({ "vertices": out.graph.n_vertices(), "edges": out.graph.n_edges() })))
        }
        Command::Encode { kind, k, input } => {
            let text = ctx.read(input.as_deref())?;
            let out = match kind {
                Kind::ZeroOne | Kind::Roots | Kind::Cp | Kind::Opb => {
                    let g = io::parse_dimacs(&text)?;
                    match kind {
                        Kind::ZeroOne => {
                            io::format_poly_system(&encode_colouring01_over(&g, k, &ctx.field(FieldSpec::prime(2)?)?))
                        }
                        Kind::Roots => io::format_poly_system(&encode_colouring_roots(&g, k, &roots_field(ctx, k)?)?),
                        Kind::Cp => io::format_cp_system(&encode_colouring_cp(&g, k)),
                        _ => io::format_opb(&encode_colouring_cp(&g, k)),
                    }
                }
                Kind::Fphp => io::format_poly_system(&encode_fphp(&io::parse_fphp(&text)?, &ctx.field(FieldSpec::prime(2)?)?)),
                Kind::FphpCp => io::format_cp_system(&encode_fphp_cp(&io::parse_fphp(&text)?)),
            };
            emit(ctx, &out)?;
            Ok((0, Value::Null))
        }
        Command::NssSearch { input, degree_max } => {
            ctx.degree_max = Some(degree_max);
            let sys = io::parse_poly_system(&ctx.read(input.as_deref())?)?;
            let mut opts = NssOptions::default();
            if let Some(b) = ctx.global.budget {
                opts.max_unknowns = b as usize;
            }
            for d in sys.degree_floor().max(0)..=degree_max {
                match ctx.time(&format!("degree_{d}"), || nss_feasible_at_degree(&sys, d, opts)) {
                    Ok(NssOutcome::Certificate(c)) => {
                        emit(ctx, &io::format_certificate(&c, &sys))?;
                        eprintln!("feasible at degree {d}");
                        return Ok((0, json!({ "status": "found", "degree": d, "size": c.size() })));
                    }
                    Ok(NssOutcome::Infeasible) => {}
                    Err(NssError::BudgetExceeded(n)) => {
                        return Err(Fail(2, format!("budget of {n} unknowns exceeded at degree {d}")));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            eprintln!("infeasible at degree ≤ {degree_max}");
            Ok((1, json!({ "status": "infeasible", "degree_max": degree_max })))
        }
        Command::PcSearch { input, degree_max } => {
            ctx.degree_max = Some(degree_max);
            let sys = io::parse_poly_system(&ctx.read(input.as_deref())?)?;
            let opts = ctx.global.budget.map(|b| PcOptions { max_lines: b as usize }).unwrap_or_default();
            for d in sys.degree_floor().max(0)..=degree_max {
                match ctx.time(&format!("degree_{d}"), || pc_refutable_at_degree(&sys, d, opts)) {
                    Ok(PcOutcome::Refuted(p)) => {
                        emit(ctx, &pc_proof_to_jsonl(&p))?;
                        eprintln!("refutable at degree {d}");
                        return Ok((0, json!({ "status": "found", "degree": d, "lines": p.len() })));
                    }
                    Ok(PcOutcome::NotRefutable { .. }) => {}
                    Err(PcError::BudgetExceeded(n)) => {
                        return Err(Fail(2, format!("budget of {n} lines exceeded at degree {d}")));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            eprintln!("no refutation at degree ≤ {degree_max}");
            Ok((1, json!({ "status": "infeasible", "degree_max": degree_max })))
        }
        Command::PcCheck { system, proof } => {
            let sys = io::parse_poly_system(&ctx.read(Some(&system))?)?;
            let proof = pc_proof_from_jsonl(&ctx.read(Some(&proof))?, &sys).map_err(|e| Fail(1, e))?;
            let r = pc_check(&proof, &sys);
            let j = json!({ "valid": r.valid, "refutation": r.refutation, "degree": r.degree, "lines": proof.len(),
                "failure": r.failure.as_ref().map(|(l, f)| json!({ "line": l, "reason": f.to_string() })) });
            emit(ctx, &format!("{j}\n"))?;
            if let Some((l, f)) = &r.failure {
                eprintln!("line {l}: {f}");
            }
            Ok((if r.valid && r.refutation { 0 } else { 1 }, j))
        }
        Command::CpProve { input, php, system_out } => {
            let b = io::parse_fphp(&ctx.read(input.as_deref())?)?;
            let (proof, sys, extra) = if php {
                let p = ctx.time("prove", || cp_refute_php(&b));
                (p, encode_fphp_cp(&b), Value::Null)
            } else {
                let out = build_reduction(&b)?;
                match ctx.time("prove", || cp_refute_reduction(&out)) {
                    Ok(r) => {
                        let extra = json!({ "raw_length": r.raw_length, "identity_branch_length": r.identity_branch_length });
                        (Ok(r.proof), encode_colouring_cp(&out.graph, out.k), extra)
                    }
                    Err(e) => (Err(e), encode_colouring_cp(&out.graph, out.k), Value::Null),
                }
            };
            let proof = match proof {
                Ok(p) => p,
                Err(CpError::MatchingExists) => {
                    eprintln!("instance is satisfiable: it has a complete left matching");
                    return Ok((1, json!({ "status": "satisfiable" })));
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(p) = system_out {
                write_atomic(&p, io::format_cp_system(&sys).as_bytes())?;
            }
            emit(ctx, &cp_proof_to_jsonl(&proof))?;
            Ok((0, json!({ "status": "refuted", "lines": proof.len(), "details": extra })))
        }
        Command::CpCheck { system, proof } => {
            let sys = io::parse_cp_system(&ctx.read(Some(&system))?)?;
            let proof = cp_proof_from_jsonl(&ctx.read(Some(&proof))?).map_err(|e| Fail(1, e))?;
            let r = cp_check(&proof, &sys);
            let j = json!({ "valid": r.valid, "refutation": r.refutation, "lines": r.length,
                "failure": r.failure.as_ref().map(|(l, f)| json!({ "line": l, "reason": f.to_string() })) });
            emit(ctx, &format!("{j}\n"))?;
            if let Some((l, f)) = &r.failure {
                eprintln!("line {l}: {f}");
            }
            Ok((if r.refutation { 0 } else { 1 }, j))
        }
        Command::Oracle { what } => {
            let budget = ctx.budget();
            match what {
                OracleCmd::Colour { input, k } => {
                    let g = io::parse_dimacs(&ctx.read(input.as_deref())?)?;
                    oracle_result(ctx, brute_colour(&g, k, budget))
                }
                OracleCmd::Fphp { input } => {
                    let b = io::parse_fphp(&ctx.read(input.as_deref())?)?;
                    oracle_result(ctx, brute_fphp(&b, budget))
                }
                OracleCmd::Poly { input } => {
                    let sys: PolySystem = io::parse_poly_system(&ctx.read(input.as_deref())?)?;
                    let r = match sys.cap {
                        polycol::algebra::Cap::Boolean => poly_system_satisfiable_01(&sys, budget),
                        polycol::algebra::Cap::Roots(_) => poly_system_satisfiable_roots(&sys, budget),
                    };
                    oracle_result(ctx, r)
                }
            }
        }
        Command::ExpanderCheck { input, alpha, delta } => {
            let b = io::parse_fphp(&ctx.read(input.as_deref())?)?;
            let r = check_boundary_expansion(&b, alpha, delta)?;
            let j = serde_json::to_value(&r)?;
            emit(ctx, &format!("{j}\n"))?;
            Ok((if r.holds { 0 } else { 1 }, j))
        }
        Command::ExperimentDegreeGrowth { k, n, degree_max, max_tries, json } => {
            ctx.degree_max = Some(degree_max);
            let defaults = ExperimentConfig {
                k,
                n_list: n,
                seed: ctx.global.seed,
                alpha: polycol::expander::DEFAULT_ALPHA,
                delta: polycol::expander::DEFAULT_DELTA,
                max_tries,
                d_max: degree_max,
                nss_max_unknowns: NssOptions::default().max_unknowns,
                pc_max_lines: PcOptions::default().max_lines,
            };
            let cfg = match ctx.global.budget {
                Some(b) => ExperimentConfig { nss_max_unknowns: b as usize, pc_max_lines: b as usize, ..defaults },
                None => defaults,
            };
            let table = ctx.time("experiment", || experiment_degree_growth(&cfg));
            if let Some(p) = json {
                write_atomic(&p, serde_json::to_string_pretty(&table)?.as_bytes())?;
            }
            emit(ctx, &experiment_csv(&table))?;
            Ok((0, serde_json::to_value(&table.rows)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut ctx = Ctx { global: cli.global, inputs: BTreeMap::new(), degree_max: None, timings: BTreeMap::new() };
    let (status, result) = match run(cli.cmd, &mut ctx) {
        Ok(r) => r,
        Err(Fail(code, msg)) => {
            eprintln!("polycol: {msg}");
            (code, json!({ "error": msg }))
        }
    };
    if let Some(p) = ctx.global.manifest.clone() {
        let m = RunManifest {
            command: std::env::args().collect(),
            inputs: ctx.inputs,
            seed: ctx.global.seed,
            field: ctx.global.field.clone(),
            degree_max: ctx.degree_max,
            timings_ms: ctx.timings,
            result,
            exit_status: status,
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serialises");
        if let Err(Fail(_, msg)) = write_atomic(&p, text.as_bytes()) {
            eprintln!("polycol: manifest: {msg}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(status)
}
