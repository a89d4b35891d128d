//! Text formats and the command driver behind the `wmaxsol` binary.
//!
//! All formats are line oriented: `#` starts a comment, blank lines are
//! skipped, tokens are whitespace separated. Structured output is flat
//! `key = value` lines plus certificate blocks echoing witness tables, so
//! two runs with the same inputs and seed are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AbelianGroup, AlgebraError};
use crate::classify::{
    classify_homogeneous, classify_maximal, detect_tractable, Certificate, ClassificationReport,
    ClassifyError, MaximalOptions, SolverTag,
};
use crate::model::{
    measure, Assignment, Constraint, ConstraintLanguage, Domain, Instance, ModelError, Operation,
    Relation,
};
use crate::reduce::{
    eqn_to_maxsol, gen_independent_set_gadget, gen_maxpcut_eqn, split_inequality, EqnInstance,
    Equation, Graph, ReduceError, Term,
};
use crate::solve::{
    brute_force_with, csp_search, performance_ratio, solve_affine, solve_genmax, solve_injective,
    SolveError, SolveResult, SolveStatus,
};

pub const DEFAULT_DOMAIN_CAP: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}:{line}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

fn syntax(origin: &str, line: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        origin: origin.to_string(),
        line,
        message: message.into(),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Numbered non-empty lines with comments stripped. Line numbers are
/// 1-based positions in the original file.
fn logical_lines(src: &str) -> Vec<(usize, String)> {
    src.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let body = body.trim();
            if body.is_empty() {
                None
            } else {
                Some((i + 1, body.to_string()))
            }
        })
        .collect()
}

fn parse_element(token: &str, origin: &str, line: usize) -> Result<u64, CliError> {
    token
        .parse::<u64>()
        .map_err(|_| syntax(origin, line, format!("expected a natural number, got `{token}`")))
}

/// Parses `(e,e,...,e)` into elements.
fn parse_tuple(body: &str, origin: &str, line: usize) -> Result<Vec<u64>, CliError> {
    let inner = body
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| syntax(origin, line, format!("expected a tuple `(..)`, got `{body}`")))?;
    inner
        .split(',')
        .map(|t| parse_element(t.trim(), origin, line))
        .collect()
}

/// Parses a language file: a `domain` line followed by `relation <name>
/// <arity>` blocks of tuples, each terminated by `end`.
pub fn parse_language_str(
    src: &str,
    origin: &str,
    domain_cap: usize,
) -> Result<ConstraintLanguage, CliError> {
    let lines = logical_lines(src);
    let mut it = lines.iter().peekable();

    let (dline, dbody) = it
        .next()
        .ok_or_else(|| syntax(origin, 0, "empty file; expected a `domain` line"))?;
    let mut dtokens = dbody.split_whitespace();
    if dtokens.next() != Some("domain") {
        return Err(syntax(origin, *dline, "expected `domain <e> <e> ...` first"));
    }
    let elements: Vec<u64> = dtokens
        .map(|t| parse_element(t, origin, *dline))
        .collect::<Result<_, _>>()?;
    let domain = Domain::with_cap(elements, domain_cap)
        .map_err(|e| syntax(origin, *dline, e.to_string()))?;
    let mut lang = ConstraintLanguage::new(domain.clone());

    while let Some((hline, hbody)) = it.next() {
        let mut tokens = hbody.split_whitespace();
        if tokens.next() != Some("relation") {
            return Err(syntax(
                origin,
                *hline,
                format!("expected `relation <name> <arity>`, got `{hbody}`"),
            ));
        }
        let name = tokens
            .next()
            .ok_or_else(|| syntax(origin, *hline, "missing relation name"))?;
        let arity: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| syntax(origin, *hline, "missing or malformed arity"))?;
        if tokens.next().is_some() {
            return Err(syntax(origin, *hline, "trailing tokens after arity"));
        }

        let mut tuples = Vec::new();
        let mut closed = false;
        for (tline, tbody) in it.by_ref() {
            if tbody == "end" {
                closed = true;
                break;
            }
            let tuple = parse_tuple(tbody, origin, *tline)?;
            if tuple.len() != arity {
                return Err(syntax(
                    origin,
                    *tline,
                    format!("tuple has {} entries, relation {name} has arity {arity}", tuple.len()),
                ));
            }
            for &e in &tuple {
                if !domain.contains(e) {
                    return Err(syntax(origin, *tline, format!("element {e} outside the domain")));
                }
            }
            tuples.push(tuple);
        }
        if !closed {
            return Err(syntax(origin, *hline, format!("relation {name} is missing its `end`")));
        }
        let relation =
            Relation::new(arity, tuples, &domain).map_err(|e| syntax(origin, *hline, e.to_string()))?;
        lang.add_relation(name, relation)
            .map_err(|e| syntax(origin, *hline, e.to_string()))?;
    }
    Ok(lang)
}

pub fn parse_language(path: &Path) -> Result<ConstraintLanguage, CliError> {
    parse_language_with_cap(path, DEFAULT_DOMAIN_CAP)
}

pub fn parse_language_with_cap(
    path: &Path,
    domain_cap: usize,
) -> Result<ConstraintLanguage, CliError> {
    parse_language_str(&read_file(path)?, &path.display().to_string(), domain_cap)
}

/// The target of the first `use` line of an instance file, if any.
pub fn instance_use_path(src: &str) -> Option<String> {
    logical_lines(src).into_iter().find_map(|(_, body)| {
        body.strip_prefix("use ")
            .map(|rest| rest.trim().to_string())
    })
}

/// Parses an instance file against an already-loaded language. Any `use`
/// line is accepted and ignored here; resolution is the caller's job.
pub fn parse_instance_str(
    src: &str,
    lang: &ConstraintLanguage,
    origin: &str,
) -> Result<Instance, CliError> {
    let mut variables: Vec<String> = Vec::new();
    let mut weights: Vec<u64> = Vec::new();
    let mut constraints: Vec<Constraint> = Vec::new();

    for (line, body) in logical_lines(src) {
        let mut tokens = body.split_whitespace();
        match tokens.next() {
            Some("use") => {}
            Some("var") => {
                let name = tokens
                    .next()
                    .ok_or_else(|| syntax(origin, line, "missing variable name"))?;
                let weight = tokens
                    .next()
                    .ok_or_else(|| syntax(origin, line, "missing weight"))?;
                let weight: u64 = weight.parse().map_err(|_| {
                    syntax(origin, line, format!("weight must be a natural number, got `{weight}`"))
                })?;
                if tokens.next().is_some() {
                    return Err(syntax(origin, line, "trailing tokens after weight"));
                }
                if variables.iter().any(|v| v == name) {
                    return Err(syntax(origin, line, format!("duplicate variable {name}")));
                }
                variables.push(name.to_string());
                weights.push(weight);
            }
            Some("con") => {
                let rel_name = tokens
                    .next()
                    .ok_or_else(|| syntax(origin, line, "missing relation name"))?;
                let relation = lang.relation(rel_name).ok_or_else(|| {
                    syntax(origin, line, format!("unknown relation {rel_name}"))
                })?;
                let mut scope = Vec::new();
                for var in tokens {
                    let idx = variables.iter().position(|v| v == var).ok_or_else(|| {
                        syntax(origin, line, format!("unknown variable {var}"))
                    })?;
                    scope.push(idx);
                }
                if scope.len() != relation.arity() {
                    return Err(syntax(
                        origin,
                        line,
                        format!(
                            "scope has {} variables, relation {rel_name} has arity {}",
                            scope.len(),
                            relation.arity()
                        ),
                    ));
                }
                constraints.push(Constraint {
                    name: rel_name.to_string(),
                    scope,
                    relation: relation.clone(),
                });
            }
            Some(other) => {
                return Err(syntax(
                    origin,
                    line,
                    format!("expected `use`, `var`, or `con`, got `{other}`"),
                ))
            }
            None => unreachable!("logical lines are non-empty"),
        }
    }
    Instance::new(lang.domain().clone(), variables, weights, constraints)
        .map_err(|e| syntax(origin, 0, e.to_string()))
}

pub fn parse_instance(path: &Path, lang: &ConstraintLanguage) -> Result<Instance, CliError> {
    parse_instance_str(&read_file(path)?, lang, &path.display().to_string())
}

/// Parses an operation file: `op <name> <arity>`, one `(args) -> value`
/// row per argument tuple, `end`. The domain is the set of elements that
/// appear in argument position; the row set must cover it exactly.
pub fn parse_operation_str(src: &str, origin: &str) -> Result<(String, Operation), CliError> {
    let lines = logical_lines(src);
    let mut it = lines.iter();

    let (hline, hbody) = it
        .next()
        .ok_or_else(|| syntax(origin, 0, "empty file; expected an `op` line"))?;
    let mut tokens = hbody.split_whitespace();
    if tokens.next() != Some("op") {
        return Err(syntax(origin, *hline, "expected `op <name> <arity>` first"));
    }
    let name = tokens
        .next()
        .ok_or_else(|| syntax(origin, *hline, "missing operation name"))?
        .to_string();
    let arity: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| syntax(origin, *hline, "missing or malformed arity"))?;

    let mut rows: Vec<(Vec<u64>, u64)> = Vec::new();
    let mut closed = false;
    for (line, body) in it {
        if body == "end" {
            closed = true;
            break;
        }
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| syntax(origin, *line, format!("expected `(args) -> value`, got `{body}`")))?;
        let args = parse_tuple(lhs.trim(), origin, *line)?;
        if args.len() != arity {
            return Err(syntax(
                origin,
                *line,
                format!("argument tuple has {} entries, expected {arity}", args.len()),
            ));
        }
        let value = parse_element(rhs.trim(), origin, *line)?;
        rows.push((args, value));
    }
    if !closed {
        return Err(syntax(origin, *hline, format!("operation {name} is missing its `end`")));
    }

    let mut elements: Vec<u64> = rows.iter().flat_map(|(args, _)| args.iter().copied()).collect();
    elements.sort_unstable();
    elements.dedup();
    if elements.is_empty() {
        return Err(syntax(origin, *hline, "operation table has no rows"));
    }
    let domain = Domain::new(elements).map_err(|e| syntax(origin, *hline, e.to_string()))?;
    let op = Operation::from_rows(&domain, arity, &rows)
        .map_err(|e| syntax(origin, *hline, e.to_string()))?;
    Ok((name, op))
}

pub fn parse_operation(path: &Path) -> Result<(String, Operation), CliError> {
    parse_operation_str(&read_file(path)?, &path.display().to_string())
}

/// Parses an equation-system file: `eqn <p>`, `gmap <g(0)> ... <g(p-1)>`,
/// `var <name> <weight>` lines, and `equ <+var|-var>... = <c>` lines.
pub fn parse_eqn_str(src: &str, origin: &str) -> Result<EqnInstance, CliError> {
    let mut prime: Option<(usize, u64)> = None;
    let mut gmap: Option<Vec<u64>> = None;
    let mut variables: Vec<String> = Vec::new();
    let mut weights: Vec<u64> = Vec::new();
    let mut equations: Vec<Equation> = Vec::new();

    for (line, body) in logical_lines(src) {
        let mut tokens = body.split_whitespace();
        match tokens.next() {
            Some("eqn") => {
                let p = tokens
                    .next()
                    .ok_or_else(|| syntax(origin, line, "missing modulus"))?;
                let p = parse_element(p, origin, line)?;
                prime = Some((line, p));
            }
            Some("gmap") => {
                let values: Vec<u64> = tokens
                    .map(|t| parse_element(t, origin, line))
                    .collect::<Result<_, _>>()?;
                gmap = Some(values);
            }
            Some("var") => {
                let name = tokens
                    .next()
                    .ok_or_else(|| syntax(origin, line, "missing variable name"))?;
                let weight = tokens
                    .next()
                    .ok_or_else(|| syntax(origin, line, "missing weight"))?;
                variables.push(name.to_string());
                weights.push(parse_element(weight, origin, line)?);
            }
            Some("equ") => {
                let mut terms = Vec::new();
                let mut constant: Option<u64> = None;
                let mut after_eq = false;
                for t in tokens {
                    if after_eq {
                        if constant.is_some() {
                            return Err(syntax(origin, line, "trailing tokens after the constant"));
                        }
                        constant = Some(parse_element(t, origin, line)?);
                    } else if t == "=" {
                        after_eq = true;
                    } else if let Some(name) = t.strip_prefix('+') {
                        terms.push(Term::plus(name));
                    } else if let Some(name) = t.strip_prefix('-') {
                        terms.push(Term::minus(name));
                    } else {
                        return Err(syntax(
                            origin,
                            line,
                            format!("expected `+var`, `-var`, or `= c`, got `{t}`"),
                        ));
                    }
                }
                let constant = constant
                    .ok_or_else(|| syntax(origin, line, "equation is missing `= <constant>`"))?;
                equations.push(Equation { terms, constant });
            }
            Some(other) => {
                return Err(syntax(
                    origin,
                    line,
                    format!("expected `eqn`, `gmap`, `var`, or `equ`, got `{other}`"),
                ))
            }
            None => unreachable!("logical lines are non-empty"),
        }
    }

    let (pline, p) = prime.ok_or_else(|| syntax(origin, 0, "missing `eqn <p>` line"))?;
    let gmap = gmap.ok_or_else(|| syntax(origin, 0, "missing `gmap` line"))?;
    EqnInstance::new(p, variables, weights, equations, gmap)
        .map_err(|e| syntax(origin, pline, e.to_string()))
}

pub fn parse_eqn(path: &Path) -> Result<EqnInstance, CliError> {
    parse_eqn_str(&read_file(path)?, &path.display().to_string())
}

/// Parses an assignment file: `<var> <value>` lines. Lines of the form
/// `assignment.<var> = <value>` are accepted too, so structured solver
/// output can be fed back directly.
pub fn parse_assignment_str(src: &str, origin: &str) -> Result<Vec<(String, u64)>, CliError> {
    let mut pairs = Vec::new();
    for (line, body) in logical_lines(src) {
        let (name, value) = if let Some(rest) = body.strip_prefix("assignment.") {
            let (name, value) = rest
                .split_once('=')
                .ok_or_else(|| syntax(origin, line, "expected `assignment.<var> = <value>`"))?;
            (name.trim().to_string(), value.trim().to_string())
        } else {
            let mut tokens = body.split_whitespace();
            let name = tokens
                .next()
                .ok_or_else(|| syntax(origin, line, "missing variable name"))?
                .to_string();
            let value = tokens
                .next()
                .ok_or_else(|| syntax(origin, line, "missing value"))?
                .to_string();
            if tokens.next().is_some() {
                return Err(syntax(origin, line, "trailing tokens after value"));
            }
            (name, value)
        };
        // skip non-assignment keys from structured output
        if name.contains(' ') || name.is_empty() {
            return Err(syntax(origin, line, "malformed variable name"));
        }
        pairs.push((name, parse_element(&value, origin, line)?));
    }
    Ok(pairs)
}

pub fn parse_assignment(path: &Path) -> Result<Vec<(String, u64)>, CliError> {
    parse_assignment_str(&read_file(path)?, &path.display().to_string())
}

fn tuple_text(tuple: &[u64]) -> String {
    let inner: Vec<String> = tuple.iter().map(|e| e.to_string()).collect();
    format!("({})", inner.join(","))
}

pub fn language_text(lang: &ConstraintLanguage) -> String {
    let mut out = String::new();
    let elems: Vec<String> = lang.domain().elements().iter().map(|e| e.to_string()).collect();
    let _ = writeln!(out, "domain {}", elems.join(" "));
    for (name, relation) in lang.relations() {
        let _ = writeln!(out, "relation {name} {}", relation.arity());
        for tuple in relation.tuples() {
            let _ = writeln!(out, "{}", tuple_text(tuple));
        }
        let _ = writeln!(out, "end");
    }
    out
}

/// Serializes an instance; `use_path`, when given, becomes the `use` line.
pub fn instance_text(instance: &Instance, use_path: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(p) = use_path {
        let _ = writeln!(out, "use {p}");
    }
    for (v, w) in instance.variables().iter().zip(instance.weights()) {
        let _ = writeln!(out, "var {v} {w}");
    }
    for c in instance.constraints() {
        let vars: Vec<&str> = c
            .scope
            .iter()
            .map(|&i| instance.variables()[i].as_str())
            .collect();
        let _ = writeln!(out, "con {} {}", c.name, vars.join(" "));
    }
    out
}

pub fn operation_text(name: &str, op: &Operation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "op {name} {}", op.arity());
    for (args, value) in op.rows() {
        let _ = writeln!(out, "{} -> {value}", tuple_text(&args));
    }
    let _ = writeln!(out, "end");
    out
}

pub fn eqn_text(eqn: &EqnInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "eqn {}", eqn.prime());
    let gs: Vec<String> = eqn.gmap().iter().map(|g| g.to_string()).collect();
    let _ = writeln!(out, "gmap {}", gs.join(" "));
    for (v, w) in eqn.variables().iter().zip(eqn.weights()) {
        let _ = writeln!(out, "var {v} {w}");
    }
    for eq in eqn.equations() {
        let terms: Vec<String> = eq
            .terms
            .iter()
            .map(|t| format!("{}{}", if t.negated { '-' } else { '+' }, t.variable))
            .collect();
        let _ = writeln!(out, "equ {} = {}", terms.join(" "), eq.constant);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Structured,
}

/// A graph given explicitly or drawn uniformly from all edge sets of the
/// requested size, deterministically in the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Edges(Vec<(usize, usize)>),
    Random { count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(u64),
    Klein,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    ClassifyMaximal {
        op: PathBuf,
        assume_maximal: bool,
    },
    ClassifyHomogeneous {
        lang: PathBuf,
    },
    ClassifyTractable {
        lang: PathBuf,
    },
    Solve {
        instance: PathBuf,
        lang: Option<PathBuf>,
    },
    Oracle {
        instance: PathBuf,
        lang: Option<PathBuf>,
    },
    Ratio {
        instance: PathBuf,
        assignment: PathBuf,
        lang: Option<PathBuf>,
    },
    GenIndependentSet {
        vertices: usize,
        graph: GraphSpec,
        low: u64,
        high: u64,
        lang_out: Option<PathBuf>,
        inst_out: Option<PathBuf>,
    },
    GenMaxpcut {
        vertices: usize,
        graph: GraphSpec,
        prime: u64,
        gmap: Option<Vec<u64>>,
        out: Option<PathBuf>,
    },
    GenEqnToMaxsol {
        eqn: PathBuf,
        group: Option<GroupSpec>,
        embedding: Option<Vec<u64>>,
        lang_out: Option<PathBuf>,
        inst_out: Option<PathBuf>,
    },
    GenSplitIneq {
        coeffs: Vec<i64>,
        bound: i64,
        domain_size: u64,
    },
    AlgebraPolymorphism {
        op: PathBuf,
        lang: PathBuf,
    },
    AlgebraIterate {
        op: PathBuf,
        times: u32,
    },
    AlgebraFixity {
        op: PathBuf,
    },
    AlgebraGfReport {
        op: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub budget: Option<u64>,
    pub domain_cap: usize,
    pub assume_szczepara: bool,
    pub jobs: usize,
    pub format: OutputFormat,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            budget: None,
            domain_cap: DEFAULT_DOMAIN_CAP,
            assume_szczepara: false,
            jobs: 1,
            format: OutputFormat::Structured,
            seed: 0,
        }
    }
}

/// Outcome of one CLI run: the process exit code (0 success, 1 infeasible,
/// 2 error at the driver level) and the full stdout payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub exit_code: i32,
    pub output: String,
}

struct Emitter {
    format: OutputFormat,
    out: String,
}

impl Emitter {
    fn new(format: OutputFormat) -> Self {
        Emitter {
            format,
            out: String::new(),
        }
    }

    /// Human summary line; text mode only.
    fn say(&mut self, line: &str) {
        if self.format == OutputFormat::Text {
            let _ = writeln!(self.out, "{line}");
        }
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{key} = {value}");
    }

    fn notes(&mut self, notes: &[String]) {
        for (i, n) in notes.iter().enumerate() {
            self.kv(&format!("note.{i}"), n);
        }
    }

    fn raw(&mut self, s: &str) {
        self.out.push_str(s);
    }

    /// Witness tables and parameters; structured mode only.
    fn certificate(&mut self, cert: &Certificate) -> Result<(), CliError> {
        if self.format != OutputFormat::Structured {
            return Ok(());
        }
        let verified = cert.verify()?;
        match cert {
            Certificate::Constant { op, value } => {
                self.kv("certificate.kind", "constant");
                self.kv("certificate.value", value);
                self.table("f", op);
            }
            Certificate::Majority { op } => {
                self.kv("certificate.kind", "majority");
                self.table("f", op);
            }
            Certificate::Affine { op, group } => {
                self.kv("certificate.kind", "affine");
                self.table("f", op);
                self.table("group_add", &group.add_op());
            }
            Certificate::FieldMean { op, labeling, prime } => {
                self.kv("certificate.kind", "field-mean");
                self.kv("certificate.prime", prime);
                self.kv("certificate.labeling", join_u64(labeling));
                self.table("f", op);
            }
            Certificate::BadPair { op, a, b } => {
                self.kv("certificate.kind", "bad-pair");
                self.kv("certificate.a", a);
                self.kv("certificate.b", b);
                self.table("f", op);
            }
            Certificate::GeneralisedMax { original, witness } => {
                self.kv("certificate.kind", "generalised-max");
                self.table("original", original);
                self.table("witness", witness);
            }
            Certificate::OutsideFamilies { op } => {
                self.kv("certificate.kind", "outside-families");
                self.table("f", op);
            }
            Certificate::Homogeneous { node, signature, .. } => {
                self.kv("certificate.kind", "homogeneous");
                self.kv("certificate.node", node);
                let sig: Vec<String> = signature
                    .iter()
                    .map(|(name, preserved)| format!("{name}:{preserved}"))
                    .collect();
                self.kv("certificate.signature", sig.join(" "));
            }
            Certificate::Polymorphism { name, op, language } => {
                self.kv("certificate.kind", "polymorphism");
                self.kv("certificate.operation", name);
                self.kv("certificate.language", relation_names(language));
                self.table("f", op);
            }
            Certificate::GenMaxPolymorphism { op, language } => {
                self.kv("certificate.kind", "genmax-polymorphism");
                self.kv("certificate.language", relation_names(language));
                self.table("witness", op);
            }
            Certificate::AffinePolymorphism { group, language } => {
                self.kv("certificate.kind", "affine-polymorphism");
                self.kv("certificate.language", relation_names(language));
                self.table("group_add", &group.add_op());
                self.table("f", &group.affine_op());
            }
        }
        self.kv("certificate.verified", verified);
        Ok(())
    }

    fn table(&mut self, name: &str, op: &Operation) {
        let _ = writeln!(self.out, "certificate.begin");
        self.raw(&operation_text(name, op));
        let _ = writeln!(self.out, "certificate.end");
    }

    fn finish(self, exit_code: i32) -> Report {
        Report {
            exit_code,
            output: self.out,
        }
    }
}

fn join_u64(values: &[u64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn relation_names(lang: &ConstraintLanguage) -> String {
    lang.relations()
        .map(|(name, _)| name)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Loads an instance plus its language, from `--lang` when given, else
/// from the instance's `use` line resolved relative to the instance file.
fn load_instance(
    instance_path: &Path,
    lang_path: Option<&Path>,
    domain_cap: usize,
) -> Result<(Instance, ConstraintLanguage), CliError> {
    let src = read_file(instance_path)?;
    let lang = match lang_path {
        Some(p) => parse_language_with_cap(p, domain_cap)?,
        None => {
            let rel = instance_use_path(&src).ok_or_else(|| {
                CliError::InvalidArgument(format!(
                    "{} has no `use` line and no --lang was given",
                    instance_path.display()
                ))
            })?;
            let base = instance_path.parent().unwrap_or_else(|| Path::new("."));
            parse_language_with_cap(&base.join(rel), domain_cap)?
        }
    };
    let instance = parse_instance_str(&src, &lang, &instance_path.display().to_string())?;
    Ok((instance, lang))
}

fn build_graph(vertices: usize, spec: &GraphSpec, seed: u64) -> Result<Graph, CliError> {
    match spec {
        GraphSpec::Edges(edges) => Ok(Graph::new(vertices, edges.clone())?),
        GraphSpec::Random { count } => {
            let mut pairs: Vec<(usize, usize)> = (0..vertices)
                .flat_map(|u| (u + 1..vertices).map(move |v| (u, v)))
                .collect();
            if *count > pairs.len() {
                return Err(CliError::InvalidArgument(format!(
                    "{count} random edges requested but only {} distinct pairs exist",
                    pairs.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            pairs.shuffle(&mut rng);
            pairs.truncate(*count);
            Ok(Graph::new(vertices, pairs)?)
        }
    }
}

fn build_group(spec: &GroupSpec) -> Result<AbelianGroup, CliError> {
    match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 {
                return Err(CliError::InvalidArgument("cyclic group order must be positive".into()));
            }
            let d = Domain::new((0..*n).collect())?;
            let add = Operation::from_fn(&d, 2, |args| (args[0] + args[1]) % n)?;
            Ok(AbelianGroup::new(&add)?)
        }
        GroupSpec::Klein => {
            let d = Domain::new(vec![0, 1, 2, 3])?;
            let add = Operation::from_fn(&d, 2, |args| args[0] ^ args[1])?;
            Ok(AbelianGroup::new(&add)?)
        }
    }
}

/// Derives the language of an instance from its constraints, keyed by
/// constraint name.
fn derive_language(instance: &Instance) -> Result<ConstraintLanguage, CliError> {
    let mut seen: BTreeMap<&str, &Relation> = BTreeMap::new();
    for c in instance.constraints() {
        match seen.get(c.name.as_str()) {
            Some(r) if **r != c.relation => {
                return Err(CliError::InvalidArgument(format!(
                    "constraint name {} is used with two different relations",
                    c.name
                )))
            }
            _ => {
                seen.insert(&c.name, &c.relation);
            }
        }
    }
    let mut lang = ConstraintLanguage::new(instance.domain().clone());
    for (name, relation) in seen {
        lang.add_relation(name, relation.clone())?;
    }
    Ok(lang)
}

fn emit_solution(em: &mut Emitter, result: &SolveResult, instance: &Instance) {
    let status = match result.status {
        SolveStatus::Optimal => "OPTIMAL",
        SolveStatus::Feasible => "FEASIBLE",
        SolveStatus::Infeasible => "INFEASIBLE",
    };
    em.kv("status", status);
    if let Some(m) = &result.measure {
        em.kv("measure", m);
    }
    if let Some(g) = &result.guarantee {
        em.kv("guarantee", g);
    }
    if let Some(a) = &result.assignment {
        for v in instance.variables() {
            if let Some(value) = a.get(v) {
                em.kv(&format!("assignment.{v}"), value);
            }
        }
    }
}

fn emit_classification(em: &mut Emitter, report: &ClassificationReport) -> Result<(), CliError> {
    em.kv("bucket", report.bucket);
    em.notes(&report.notes);
    if let Some(cert) = &report.certificate {
        em.certificate(cert)?;
    }
    Ok(())
}

/// Writes generated text to a file, or onto the report under a comment
/// header when no path was given.
fn deliver(
    em: &mut Emitter,
    text: &str,
    path: Option<&Path>,
    label: &str,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            em.kv(&format!("wrote.{label}"), p.display());
        }
        None => {
            em.raw(&format!("# {label}\n"));
            em.raw(text);
        }
    }
    Ok(())
}

/// `use` line for a generated instance: the language file's name when both
/// files land in the same directory, its full path otherwise.
fn use_line_for(lang_out: Option<&Path>, inst_out: Option<&Path>) -> Option<String> {
    let lang = lang_out?;
    match inst_out {
        Some(inst) if inst.parent() == lang.parent() => lang
            .file_name()
            .map(|n| n.to_string_lossy().into_owned()),
        _ => Some(lang.display().to_string()),
    }
}

const EXIT_OK: i32 = 0;
const EXIT_INFEASIBLE: i32 = 1;

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let mut em = Emitter::new(config.format);
    match &config.command {
        Command::ClassifyMaximal { op, assume_maximal } => {
            let (name, f) = parse_operation(op)?;
            let options = MaximalOptions {
                assume_maximal: *assume_maximal,
                assume_szczepara: config.assume_szczepara,
            };
            let report = classify_maximal(&f, options)?;
            em.say(&format!(
                "operation {name} generates a {} problem",
                report.bucket
            ));
            em.kv("command", "classify-maximal");
            em.kv("operation", &name);
            emit_classification(&mut em, &report)?;
            Ok(em.finish(EXIT_OK))
        }
        Command::ClassifyHomogeneous { lang } => {
            let language = parse_language_with_cap(lang, config.domain_cap)?;
            let report = classify_homogeneous(&language)?;
            em.say(&format!("language falls in bucket {}", report.bucket));
            em.kv("command", "classify-homogeneous");
            emit_classification(&mut em, &report)?;
            Ok(em.finish(EXIT_OK))
        }
        Command::ClassifyTractable { lang } => {
            let language = parse_language_with_cap(lang, config.domain_cap)?;
            let report = detect_tractable(&language, config.budget)?;
            em.kv("command", "classify-tractable");
            match &report.dispatch {
                Some((tag, cert)) => {
                    em.say(&format!("language dispatches to the {tag} solver"));
                    em.kv("dispatch", tag);
                    em.notes(&report.notes);
                    em.certificate(cert)?;
                }
                None => {
                    em.say("no exact solver applies");
                    em.kv("dispatch", "NONE");
                    em.notes(&report.notes);
                }
            }
            Ok(em.finish(EXIT_OK))
        }
        Command::Solve { instance, lang } => {
            let (inst, language) = load_instance(instance, lang.as_deref(), config.domain_cap)?;
            let mut notes: Vec<String> = Vec::new();
            let detection = detect_tractable(&language, config.budget)?;
            notes.extend(detection.notes.iter().cloned());

            let mut dispatch_label = "NONE".to_string();
            let mut dispatched: Option<SolveResult> = None;
            if let Some((tag, cert)) = &detection.dispatch {
                dispatch_label = tag.to_string();
                match (tag, cert) {
                    (SolverTag::Injective, _) => match solve_injective(&inst) {
                        Ok(r) => dispatched = Some(r),
                        Err(SolveError::NotInjective(reason)) => {
                            // the discriminator also preserves products of
                            // unary relations, which this solver rejects
                            notes.push(format!(
                                "injective solver refused the instance ({reason}); falling back to exhaustive search"
                            ));
                            dispatch_label = "NONE".to_string();
                        }
                        Err(e) => return Err(e.into()),
                    },
                    (SolverTag::GenMax, Certificate::GenMaxPolymorphism { op, .. }) => {
                        dispatched = Some(solve_genmax(&inst, op)?);
                    }
                    (SolverTag::Affine, Certificate::AffinePolymorphism { group, .. }) => {
                        dispatched = Some(solve_affine(&inst, group)?);
                    }
                    _ => {
                        return Err(CliError::InvalidArgument(
                            "dispatch certificate does not match its solver".into(),
                        ))
                    }
                }
            }

            let result = match dispatched {
                Some(r) => r,
                None => match brute_force_with(&inst, config.budget, config.jobs) {
                    Ok(r) => r,
                    Err(SolveError::BudgetExceeded { budget }) => {
                        notes.push(format!(
                            "exhaustive search exceeds the budget of {budget}; reporting a feasible solution without optimality"
                        ));
                        match csp_search(&inst, config.budget)? {
                            Some(a) => {
                                let m = measure(&inst, &a)?;
                                SolveResult {
                                    status: SolveStatus::Feasible,
                                    assignment: Some(a),
                                    measure: Some(m),
                                    guarantee: None,
                                }
                            }
                            None => SolveResult::infeasible(),
                        }
                    }
                    Err(e) => return Err(e.into()),
                },
            };

            em.say(&format!("solver dispatch: {dispatch_label}"));
            em.kv("command", "solve");
            em.kv("dispatch", &dispatch_label);
            emit_solution(&mut em, &result, &inst);
            em.notes(&notes);
            let code = if result.status == SolveStatus::Infeasible {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            };
            Ok(em.finish(code))
        }
        Command::Oracle { instance, lang } => {
            let (inst, _) = load_instance(instance, lang.as_deref(), config.domain_cap)?;
            let result = brute_force_with(&inst, config.budget, config.jobs)?;
            em.say("exhaustive optimum");
            em.kv("command", "oracle");
            emit_solution(&mut em, &result, &inst);
            let code = if result.status == SolveStatus::Infeasible {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            };
            Ok(em.finish(code))
        }
        Command::Ratio {
            instance,
            assignment,
            lang,
        } => {
            let (inst, _) = load_instance(instance, lang.as_deref(), config.domain_cap)?;
            let pairs = parse_assignment(assignment)?;
            let a = Assignment::from_pairs(pairs);
            let ratio = performance_ratio(&inst, &a, config.budget)?;
            em.say("performance ratio of the given assignment");
            em.kv("command", "ratio");
            em.kv("measure", measure(&inst, &a)?);
            em.kv("ratio", ratio);
            Ok(em.finish(EXIT_OK))
        }
        Command::GenIndependentSet {
            vertices,
            graph,
            low,
            high,
            lang_out,
            inst_out,
        } => {
            let g = build_graph(*vertices, graph, config.seed)?;
            let inst = gen_independent_set_gadget(&g, *low, *high)?;
            let language = derive_language(&inst)?;
            em.kv("command", "gen-independent-set");
            em.kv("vertices", g.vertices());
            em.kv("edges", g.edges().len());
            deliver(&mut em, &language_text(&language), lang_out.as_deref(), "language")?;
            let use_line = use_line_for(lang_out.as_deref(), inst_out.as_deref());
            deliver(
                &mut em,
                &instance_text(&inst, use_line.as_deref()),
                inst_out.as_deref(),
                "instance",
            )?;
            Ok(em.finish(EXIT_OK))
        }
        Command::GenMaxpcut {
            vertices,
            graph,
            prime,
            gmap,
            out,
        } => {
            let g = build_graph(*vertices, graph, config.seed)?;
            let identity: Vec<u64> = (0..*prime).collect();
            let gmap = gmap.as_deref().unwrap_or(&identity);
            let eqn = gen_maxpcut_eqn(&g, *prime, gmap)?;
            em.kv("command", "gen-maxpcut");
            em.kv("vertices", g.vertices());
            em.kv("edges", g.edges().len());
            deliver(&mut em, &eqn_text(&eqn), out.as_deref(), "eqn")?;
            Ok(em.finish(EXIT_OK))
        }
        Command::GenEqnToMaxsol {
            eqn,
            group,
            embedding,
            lang_out,
            inst_out,
        } => {
            let system = parse_eqn(eqn)?;
            let spec = group
                .clone()
                .unwrap_or(GroupSpec::Cyclic(system.prime()));
            let grp = build_group(&spec)?;
            let identity: Vec<u64> = (0..system.prime()).collect();
            let emb = embedding.as_deref().unwrap_or(&identity);
            let inst = eqn_to_maxsol(&system, &grp, emb)?;
            let language = derive_language(&inst)?;
            em.kv("command", "gen-eqn2maxsol");
            em.kv("prime", system.prime());
            em.kv("group_order", grp.order());
            deliver(&mut em, &language_text(&language), lang_out.as_deref(), "language")?;
            let use_line = use_line_for(lang_out.as_deref(), inst_out.as_deref());
            deliver(
                &mut em,
                &instance_text(&inst, use_line.as_deref()),
                inst_out.as_deref(),
                "instance",
            )?;
            Ok(em.finish(EXIT_OK))
        }
        Command::GenSplitIneq {
            coeffs,
            bound,
            domain_size,
        } => {
            let system = split_inequality(coeffs, *bound, *domain_size);
            em.say("split into inequalities of at most three variables");
            em.kv("command", "gen-split-ineq");
            for (i, ineq) in system.inequalities.iter().enumerate() {
                let terms: Vec<String> = ineq
                    .terms
                    .iter()
                    .map(|(c, v)| format!("{c:+}*{v}"))
                    .collect();
                em.kv(
                    &format!("inequality.{i}"),
                    format!("{} >= {}", terms.join(" "), ineq.bound),
                );
            }
            for f in &system.fresh {
                em.kv(&format!("fresh.{}.low", f.name), f.low);
                em.kv(&format!("fresh.{}.high", f.name), f.high);
                let def: Vec<String> = f
                    .definition
                    .iter()
                    .map(|(c, v)| format!("{c:+}*{v}"))
                    .collect();
                em.kv(&format!("fresh.{}.definition", f.name), def.join(" "));
            }
            Ok(em.finish(EXIT_OK))
        }
        Command::AlgebraPolymorphism { op, lang } => {
            let (name, f) = parse_operation(op)?;
            let language = parse_language_with_cap(lang, config.domain_cap)?;
            if f.domain() != language.domain() {
                return Err(CliError::InvalidArgument(
                    "operation and language have different domains".into(),
                ));
            }
            em.kv("command", "algebra-polymorphism");
            em.kv("operation", &name);
            let mut all = true;
            for (rel_name, relation) in language.relations() {
                let holds = crate::algebra::is_polymorphism(&f, relation)?;
                all &= holds;
                em.kv(&format!("preserves.{rel_name}"), holds);
            }
            em.kv("polymorphism", all);
            em.say(if all {
                "the operation preserves every relation"
            } else {
                "the operation violates at least one relation"
            });
            Ok(em.finish(EXIT_OK))
        }
        Command::AlgebraIterate { op, times } => {
            let (name, f) = parse_operation(op)?;
            let iterated = crate::algebra::iterate(&f, *times)?;
            em.raw(&operation_text(&format!("{name}_{times}"), &iterated));
            Ok(em.finish(EXIT_OK))
        }
        Command::AlgebraFixity { op } => {
            let (name, f) = parse_operation(op)?;
            let fx = crate::algebra::fixity(&f)?;
            em.kv("command", "algebra-fixity");
            em.kv("operation", &name);
            em.kv("count", fx.len());
            let pairs: Vec<String> = fx
                .pairs()
                .iter()
                .map(|(a, b)| format!("({a},{b})"))
                .collect();
            em.kv("pairs", pairs.join(" "));
            Ok(em.finish(EXIT_OK))
        }
        Command::AlgebraGfReport { op } => {
            let (name, f) = parse_operation(op)?;
            let gf = crate::algebra::build_gf(&f)?;
            em.kv("command", "algebra-gf-report");
            em.kv("operation", &name);
            for v in gf.vertices() {
                let s = gf.succ(v)?;
                em.kv(&format!("succ.{}.{}", v.0, v.1), format!("({},{})", s.0, s.1));
            }
            let reflexive: Vec<String> = gf
                .reflexive_vertices()
                .iter()
                .map(|(a, b)| format!("({a},{b})"))
                .collect();
            em.kv("reflexive", reflexive.join(" "));
            em.kv("nontrivial_cycle", gf.has_nontrivial_cycle());
            Ok(em.finish(EXIT_OK))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Measure;

    const LANG: &str = "\
# two-element language
domain 0 1
relation LE 2
(0,0)
(0,1)
(1,1)
end
relation ONE 1
(1)
end
";

    fn parse_lang() -> ConstraintLanguage {
        parse_language_str(LANG, "test.lang", DEFAULT_DOMAIN_CAP).unwrap()
    }

    #[test]
    fn language_round_trip() {
        let lang = parse_lang();
        let text = language_text(&lang);
        let again = parse_language_str(&text, "again.lang", DEFAULT_DOMAIN_CAP).unwrap();
        assert_eq!(language_text(&again), text);
        assert_eq!(again.relation("LE").unwrap().len(), 3);
    }

    #[test]
    fn language_diagnostics_carry_position() {
        let bad = "domain 0 1\nrelation R 2\n(0,3)\nend\n";
        let err = parse_language_str(bad, "bad.lang", DEFAULT_DOMAIN_CAP).unwrap_err();
        assert_eq!(err.to_string(), "bad.lang:3: element 3 outside the domain");

        let dup = "domain 0 1\nrelation R 1\n(0)\nend\nrelation R 1\n(1)\nend\n";
        let err = parse_language_str(dup, "dup.lang", DEFAULT_DOMAIN_CAP).unwrap_err();
        assert!(err.to_string().starts_with("dup.lang:5: "));

        let wide = "domain 0 1\nrelation R 2\n(0,1,0)\nend\n";
        let err = parse_language_str(wide, "wide.lang", DEFAULT_DOMAIN_CAP).unwrap_err();
        assert!(err.to_string().contains("arity"));
    }

    #[test]
    fn instance_round_trip_and_diagnostics() {
        let lang = parse_lang();
        let src = "use test.lang\nvar x 2\nvar y 3\ncon LE x y\ncon ONE y\n";
        let inst = parse_instance_str(src, &lang, "test.inst").unwrap();
        assert_eq!(inst.variables(), &["x".to_string(), "y".to_string()]);
        assert_eq!(inst.weights(), &[2, 3]);
        assert_eq!(inst.constraints().len(), 2);
        let text = instance_text(&inst, Some("test.lang"));
        assert_eq!(text, src);

        let unknown = "var x 1\ncon NOPE x\n";
        let err = parse_instance_str(unknown, &lang, "i").unwrap_err();
        assert_eq!(err.to_string(), "i:2: unknown relation NOPE");

        let badarity = "var x 1\ncon LE x\n";
        let err = parse_instance_str(badarity, &lang, "i").unwrap_err();
        assert!(err.to_string().contains("arity"));

        let negative = "var x -1\n";
        let err = parse_instance_str(negative, &lang, "i").unwrap_err();
        assert!(err.to_string().contains("natural number"));
    }

    #[test]
    fn operation_round_trip() {
        let src = "op max 2\n(0,0) -> 0\n(0,1) -> 1\n(1,0) -> 1\n(1,1) -> 1\nend\n";
        let (name, op) = parse_operation_str(src, "max.op").unwrap();
        assert_eq!(name, "max");
        assert_eq!(op.eval(&[0, 1]), 1);
        assert_eq!(operation_text(&name, &op), src);

        let incomplete = "op f 2\n(0,0) -> 0\n(1,1) -> 1\nend\n";
        assert!(parse_operation_str(incomplete, "f.op").is_err());
    }

    #[test]
    fn eqn_round_trip() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let eqn = gen_maxpcut_eqn(&g, 3, &[0, 1, 2]).unwrap();
        let text = eqn_text(&eqn);
        let again = parse_eqn_str(&text, "t.eqn").unwrap();
        assert_eq!(again, eqn);
    }

    #[test]
    fn assignment_accepts_both_forms() {
        let pairs = parse_assignment_str("x 1\nassignment.y = 0\n", "a").unwrap();
        assert_eq!(pairs, vec![("x".to_string(), 1), ("y".to_string(), 0)]);
    }

    fn write(dir: &std::path::Path, name: &str, content: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn solve_and_oracle_agree_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "t.lang", LANG);
        let inst = write(
            dir.path(),
            "t.inst",
            "use t.lang\nvar x 2\nvar y 3\ncon LE x y\n",
        );

        let solve = run(&RunConfig::new(Command::Solve {
            instance: inst.clone(),
            lang: None,
        }))
        .unwrap();
        assert_eq!(solve.exit_code, 0);
        assert!(solve.output.contains("dispatch = GENMAX"), "{}", solve.output);
        assert!(solve.output.contains("measure = 5"), "{}", solve.output);

        let oracle = run(&RunConfig::new(Command::Oracle {
            instance: inst,
            lang: None,
        }))
        .unwrap();
        assert!(oracle.output.contains("measure = 5"), "{}", oracle.output);
    }

    #[test]
    fn infeasible_instances_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "t.lang",
            "domain 0 1\nrelation NONE 1\nend\n",
        );
        let inst = write(dir.path(), "t.inst", "use t.lang\nvar x 1\ncon NONE x\n");
        let report = run(&RunConfig::new(Command::Oracle {
            instance: inst,
            lang: None,
        }))
        .unwrap();
        assert_eq!(report.exit_code, 1);
        assert!(report.output.contains("status = INFEASIBLE"));
    }

    #[test]
    fn ratio_command_reports_the_exact_ratio() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "t.lang", LANG);
        let inst = write(dir.path(), "t.inst", "use t.lang\nvar x 4\n");
        let assign = write(dir.path(), "half.assign", "x 0\n");
        // optimum is 4 at x=1; the given assignment measures 0
        let report = run(&RunConfig::new(Command::Ratio {
            instance: inst,
            assignment: assign,
            lang: None,
        }))
        .unwrap();
        assert!(report.output.contains("ratio = inf"), "{}", report.output);
    }

    #[test]
    fn generated_gadget_files_solve() {
        let dir = tempfile::tempdir().unwrap();
        let lang_out = dir.path().join("g.lang");
        let inst_out = dir.path().join("g.inst");
        let config = RunConfig::new(Command::GenIndependentSet {
            vertices: 3,
            graph: GraphSpec::Edges(vec![(0, 1), (1, 2), (0, 2)]),
            low: 1,
            high: 2,
            lang_out: Some(lang_out),
            inst_out: Some(inst_out.clone()),
        });
        run(&config).unwrap();

        let oracle = run(&RunConfig::new(Command::Oracle {
            instance: inst_out,
            lang: None,
        }))
        .unwrap();
        assert!(oracle.output.contains("measure = 4"), "{}", oracle.output);
    }

    #[test]
    fn random_graphs_are_seed_deterministic() {
        let spec = GraphSpec::Random { count: 4 };
        let a = build_graph(5, &spec, 7).unwrap();
        let b = build_graph(5, &spec, 7).unwrap();
        let c = build_graph(5, &spec, 8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges().len(), 4);
        assert_eq!(c.edges().len(), 4);
    }

    #[test]
    fn eqn2maxsol_pipeline_preserves_measures() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let eqn = gen_maxpcut_eqn(&g, 2, &[0, 1]).unwrap();
        let eqn_path = write(dir.path(), "cut.eqn", &eqn_text(&eqn));
        let lang_out = dir.path().join("cut.lang");
        let inst_out = dir.path().join("cut.inst");
        run(&RunConfig::new(Command::GenEqnToMaxsol {
            eqn: eqn_path,
            group: None,
            embedding: None,
            lang_out: Some(lang_out),
            inst_out: Some(inst_out.clone()),
        }))
        .unwrap();

        let oracle = run(&RunConfig::new(Command::Oracle {
            instance: inst_out,
            lang: None,
        }))
        .unwrap();
        let (opt, _) = eqn.optimum().unwrap();
        assert_eq!(opt, Measure::from(2u64));
        assert!(oracle.output.contains("measure = 2"), "{}", oracle.output);
    }

    #[test]
    fn structured_output_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "t.lang", LANG);
        let inst = write(
            dir.path(),
            "t.inst",
            "use t.lang\nvar x 2\nvar y 3\ncon LE x y\n",
        );
        let config = RunConfig::new(Command::Solve {
            instance: inst,
            lang: None,
        });
        let a = run(&config).unwrap();
        let b = run(&config).unwrap();
        assert_eq!(a.output, b.output);
    }
}
