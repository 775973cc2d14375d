//! The `herm-genus` command line.
//!
//! Every verb builds one JSON document. `--format json` prints it as is and
//! `--format text` renders the same document as indented tables, so both
//! views always agree.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::arith::{is_prime, is_squarefree, prime_divisors, rat};
use crate::classgroup::{count_reduced_forms, ClassGroup};
use crate::det_oracle::{mod_pn_det_oracle, oracle_verdict};
use crate::error::{Error, Result};
use crate::field::QuadField;
use crate::genus::{special_genera, GenusGroup, DEFAULT_PRIME_BOUND};
use crate::ideal::{different, prime_decomposition, ramified_primes, PrimeKind};
use crate::io::{lattice_json, parse_lattice, serialize_lattice};
use crate::lattice::{build_h_lattice, diagonal_space, HermLattice};
use crate::local::{det_group, is_modular_at, jordan_decomposition, JordanBlock, LocalData};
use crate::neighbour::{check_neighbour_preconditions, neighbour, verify_neighbour};
use crate::samples::random_lattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    #[value(alias = "json-like", alias = "machine")]
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "herm-genus", version, about = "Special genera of hermitian lattices over imaginary quadratic fields")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ring of integers, discriminant and ramification of Q(sqrt(d)).
    FieldInfo {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Class group and the subgroup generated by ramified primes.
    ClassGroup {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Local data, Jordan splittings and determinant groups of a lattice.
    Analyze { file: PathBuf },
    /// Representatives of the special genera in the genus of a lattice.
    SpecialGenera {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
    },
    /// A neighbour of a lattice at a prime above p.
    Neighbour {
        file: PathBuf,
        #[arg(long)]
        p: u64,
        /// Which prime above p (0 or 1 for split p).
        #[arg(long, default_value_t = 0)]
        prime_index: usize,
        #[arg(long)]
        avoid: Option<PathBuf>,
    },
    /// Run the built-in consistency suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Depth N of the mod P^N determinant oracle (3 to 5).
        #[arg(long, default_value_t = 3)]
        oracle_depth: u32,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    match execute(&cli.command) {
        Ok((doc, code)) => {
            let stdout = match cli.format {
                Format::Json => serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n",
                Format::Text => render_text(&doc),
            };
            Outcome { stdout, stderr: String::new(), code }
        }
        Err(e) => failure(&e),
    }
}

/// Outcome reported for a failed command; the exit code follows the error kind.
pub fn failure(e: &Error) -> Outcome {
    Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() }
}

fn read_lattice(path: &Path) -> Result<HermLattice> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    parse_lattice(&text).map_err(|e| match e {
        Error::Input(m) => Error::input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn execute(cmd: &Command) -> Result<(Value, i32)> {
    match cmd {
        Command::FieldInfo { d } => Ok((field_info(QuadField::new(*d)?), 0)),
        Command::ClassGroup { d } => Ok((class_group(QuadField::new(*d)?), 0)),
        Command::Analyze { file } => Ok((analyze(&read_lattice(file)?)?, 0)),
        Command::SpecialGenera { file, prime_bound } => {
            if *prime_bound < 2 {
                return Err(Error::input("--prime-bound must be at least 2"));
            }
            Ok((special_genera_report(&read_lattice(file)?, *prime_bound)?, 0))
        }
        Command::Neighbour { file, p, prime_index, avoid } => {
            if !is_prime(*p) {
                return Err(Error::input(format!("--p {p} is not prime")));
            }
            let l = read_lattice(file)?;
            let avoid = avoid.as_deref().map(read_lattice).transpose()?;
            Ok((neighbour_report(&l, *p, *prime_index, avoid.as_ref())?, 0))
        }
        Command::Selftest { seed, oracle_depth } => {
            if !(3..=5).contains(oracle_depth) {
                return Err(Error::input("--oracle-depth must lie between 3 and 5"));
            }
            let doc = selftest(*seed, *oracle_depth);
            let failed = doc["suites"].as_array().unwrap().iter().any(|s| s["status"] != "PASS");
            Ok((doc, if failed { 3 } else { 0 }))
        }
    }
}

pub fn field_info(field: QuadField) -> Value {
    let (t, n) = field.omega_relation();
    let omega = if t == 0 { "sqrt(d)".to_string() } else { "(1 + sqrt(d))/2".to_string() };
    let ramified: Vec<Value> = ramified_primes(field)
        .iter()
        .map(|q| {
            let ld = LocalData::new(field, q.p).expect("prime");
            json!({"p": q.p, "prime": q.ideal.to_string(), "e": ld.e})
        })
        .collect();
    json!({
        "d": field.d(),
        "discriminant": field.disc(),
        "omega": omega,
        "omega_relation": format!("w^2 = {t}*w + {n}"),
        "ramified_primes": ramified,
        "different": different(field).to_string(),
        "torsion_units": field.torsion_units().len(),
    })
}

pub fn class_group(field: QuadField) -> Value {
    let cg = ClassGroup::new(field);
    let c0 = cg.c0_subgroup();
    json!({
        "d": field.d(),
        "order": cg.order(),
        "invariant_factors": cg.invariant_factors(),
        "generators": cg.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "c0_order": c0.order(),
        "c0_index": c0.index(),
        "coset_representatives": c0.coset_reps().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
    })
}

fn block_summary(b: &JordanBlock) -> String {
    if b.is_h_type {
        let copies = b.rank / 2;
        if copies == 1 {
            format!("H({})", b.scale_val)
        } else {
            format!("H({})^{copies}", b.scale_val)
        }
    } else {
        format!("{}-modular rank {} norm {}", b.scale_val, b.rank, b.norm_val)
    }
}

/// Rational primes where `L` can fail to be unimodular, plus ramified primes.
pub fn relevant_primes(l: &HermLattice) -> Vec<u64> {
    let mut out = BTreeSet::new();
    out.extend(prime_divisors(&l.field().disc().into()));
    for ideal in [l.scale(), l.volume()] {
        let n = ideal.norm();
        out.extend(prime_divisors(n.numer()));
        out.extend(prime_divisors(n.denom()));
    }
    out.into_iter().collect()
}

pub fn analyze(l: &HermLattice) -> Result<Value> {
    let field = l.field();
    let mut rows = Vec::new();
    for p in relevant_primes(l) {
        let ld = LocalData::new(field, p)?;
        let jd = jordan_decomposition(l, p)?;
        let blocks: Vec<Value> = jd
            .blocks
            .iter()
            .map(|b| json!({"scale": b.scale_val, "rank": b.rank, "norm": b.norm_val, "h_type": b.is_h_type}))
            .collect();
        let summary: Vec<String> = jd.blocks.iter().map(block_summary).collect();
        rows.push(json!({
            "p": p,
            "kind": ld.kind.as_str(),
            "e": ld.e,
            "modular": is_modular_at(l, p)?,
            "jordan": summary.join(" + "),
            "det_group": det_group(l, p)?.to_string(),
            "blocks": blocks,
        }));
    }
    let group = GenusGroup::new(l)?;
    let profile = group.profile();
    Ok(json!({
        "d": field.d(),
        "rank": l.rank(),
        "scale": l.scale().to_string(),
        "norm": l.norm_ideal().to_string(),
        "volume": l.volume().to_string(),
        "primes": rows,
        "det_profile": {
            "primes": profile.rational_primes(),
            "component_order": profile.component_order(),
        },
        "r_subgroup": group.r_group().iter().map(|&b| profile.format_bits(b)).collect::<Vec<_>>(),
        "sign_quotient_order": group.sign_quotient_order(),
        "c0_index": group.c0().index(),
        "genus_group_order": group.order(),
    }))
}

pub fn special_genera_report(l: &HermLattice, bound: u64) -> Result<Value> {
    let sg = special_genera(l, bound)?;
    let g = &sg.group;
    let generators: Vec<Value> = sg
        .steps
        .iter()
        .map(|s| {
            json!({
                "p": s.prime.p,
                "prime": s.prime.label(),
                "ideal": s.prime.ideal.to_string(),
                "order": s.order,
                "element": g.label(s.element),
                "element_order": g.element_order(s.element),
            })
        })
        .collect();
    let reps: Vec<Value> = sg
        .representatives
        .iter()
        .map(|r| {
            json!({
                "label": g.label(r.label),
                "exponents": r.exponents,
                "index": r.index.to_string(),
                "lattice": lattice_json(&r.lattice),
            })
        })
        .collect();
    Ok(json!({
        "group": {
            "order": g.order(),
            "invariant_factors": g.invariant_factors(),
            "c0_index": g.c0().index(),
            "sign_quotient_order": g.sign_quotient_order(),
            "det_profile": g.profile().rational_primes(),
            "generators": generators,
        },
        "representatives": reps,
    }))
}

pub fn neighbour_report(l: &HermLattice, p: u64, prime_index: usize, avoid: Option<&HermLattice>) -> Result<Value> {
    let primes = prime_decomposition(l.field(), p);
    let prime = primes
        .get(prime_index)
        .ok_or_else(|| Error::input(format!("there are only {} primes above {p}", primes.len())))?;
    if let Some(a) = avoid {
        if a.space() != l.space() {
            return Err(Error::input("--avoid lattice lives in a different space"));
        }
    }
    let n = neighbour(l, prime, avoid)?;
    Ok(json!({
        "prime": prime.label(),
        "ideal": prime.ideal.to_string(),
        "index": crate::lattice::index_ideal(l, &n)?.to_string(),
        "lattice": lattice_json(&n),
    }))
}

fn suite(name: &str, cases: usize, outcome: Result<()>) -> Value {
    match outcome {
        Ok(()) => json!({"name": name, "cases": cases, "status": "PASS"}),
        Err(e) => json!({"name": name, "cases": cases, "status": "FAIL", "detail": e.to_string()}),
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::verification(msg()))
    }
}

/// Runs the consistency suites; the result lists one entry per suite.
pub fn selftest(seed: u64, oracle_depth: u32) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: Vec<QuadField> = [-1, -2, -3, -5, -7, -17].iter().map(|&d| QuadField::new(d).unwrap()).collect();
    let mut suites = Vec::new();

    let ds: Vec<i64> = (-100..0).filter(|&d| is_squarefree(d)).collect();
    let outcome = ds.iter().try_for_each(|&d| {
        let f = QuadField::new(d)?;
        let (ours, forms) = (ClassGroup::new(f).order(), count_reduced_forms(f.disc()));
        check(ours == forms, || format!("d = {d}: class number {ours}, forms {forms}"))
    });
    suites.push(suite("class_number_vs_forms", ds.len(), outcome));

    let lattices: Vec<HermLattice> =
        (0..40).map(|i| random_lattice(&mut rng, fields[i % fields.len()], 1 + i % 3)).collect();
    let outcome = lattices.iter().try_for_each(|l| {
        let dinv = different(l.field()).inv();
        let (s, n) = (l.scale(), l.norm_ideal());
        check(dinv.mul(&n).contains(&s) && dinv.mul(&s).contains(&dinv.mul(&n)), || format!("{l:?}"))
    });
    suites.push(suite("scale_norm_chain", lattices.len(), outcome));

    let outcome = lattices.iter().try_for_each(|l| {
        let back = parse_lattice(&serialize_lattice(l))?;
        check(&back == l, || format!("{l:?} does not round-trip"))
    });
    suites.push(suite("serialization_round_trip", lattices.len(), outcome));

    let mut oracle_cases = 0;
    let outcome = (|| -> Result<()> {
        for (d, p) in [(-3, 3), (-5, 5), (-7, 7)] {
            let f = QuadField::new(d)?;
            let prime = prime_decomposition(f, p).remove(0);
            let candidates = vec![
                build_h_lattice(f, &prime, 0, 1)?,
                build_h_lattice(f, &prime, 1, 1)?,
                HermLattice::free(diagonal_space(f, &[rat(1, 1), rat(1, 1)])?),
                HermLattice::free(diagonal_space(f, &[rat(1, 1), rat(p as i64, 1)])?),
            ];
            for l in candidates {
                match mod_pn_det_oracle(&l, p, oracle_depth) {
                    Ok(classes) => {
                        oracle_cases += 1;
                        let (ours, brute) = (det_group(&l, p)?, oracle_verdict(&classes));
                        check(ours == brute, || format!("d = {d}, p = {p}: {ours} vs oracle {brute}"))?;
                    }
                    Err(Error::Precondition(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(())
    })();
    suites.push(suite("det_group_vs_oracle", oracle_cases, outcome));

    let mut pairs = 0;
    let outcome = (|| -> Result<()> {
        for l in lattices.iter().filter(|l| l.rank() >= 2) {
            for p in [3u64, 5, 7] {
                for prime in prime_decomposition(l.field(), p) {
                    if check_neighbour_preconditions(l, &prime).is_err() {
                        continue;
                    }
                    let n = neighbour(l, &prime, None)?;
                    verify_neighbour(l, &n, &prime)?;
                    pairs += 1;
                }
            }
        }
        Ok(())
    })();
    suites.push(suite("neighbour_contract", pairs, outcome));

    let outcome = lattices.iter().take(12).try_for_each(|l| GenusGroup::new(l)?.check_axioms());
    suites.push(suite("genus_group_axioms", 12, outcome));

    let outcome = (|| -> Result<()> {
        for f in &fields {
            for q in ramified_primes(*f) {
                if q.kind != PrimeKind::Ramified {
                    continue;
                }
                let ld = LocalData::new(*f, q.p)?;
                for u in f.torsion_units() {
                    let delta = u.div(&u.conj())?;
                    check(crate::local::is_e1_element(&delta, &ld)?, || format!("{delta} at {}", q.p))?;
                }
            }
        }
        Ok(())
    })();
    suites.push(suite("unit_quotients_in_e1", fields.len(), outcome));

    json!({"seed": seed, "oracle_depth": oracle_depth, "suites": suites})
}

/// Indented text view of a report document.
pub fn render_text(doc: &Value) -> String {
    let mut out = String::new();
    render_value(doc, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("-".into()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn flat_object(v: &Value) -> Option<&Map<String, Value>> {
    v.as_object().filter(|m| m.values().all(|x| scalar(x).is_some()))
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(x, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(a) if !a.is_empty() && a.iter().all(|x| flat_object(x).is_some()) => {
            let mut keys: Vec<&String> = Vec::new();
            for x in a {
                for k in flat_object(x).unwrap().keys() {
                    if !keys.contains(&k) {
                        keys.push(k);
                    }
                }
            }
            let rows: Vec<Vec<String>> = a
                .iter()
                .map(|x| keys.iter().map(|k| x.get(k.as_str()).and_then(scalar).unwrap_or_default()).collect())
                .collect();
            let widths: Vec<usize> = keys
                .iter()
                .enumerate()
                .map(|(i, k)| rows.iter().map(|r| r[i].chars().count()).chain([k.chars().count()]).max().unwrap())
                .collect();
            let line = |cells: Vec<String>| {
                let body: Vec<String> =
                    cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
                format!("{pad}{}\n", body.join("  ").trim_end())
            };
            out.push_str(&line(keys.iter().map(|k| k.to_string()).collect()));
            for r in rows {
                out.push_str(&line(r));
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        render_value(x, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap())),
    }
}
