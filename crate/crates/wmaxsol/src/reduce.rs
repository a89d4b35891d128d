//! Constructive reductions between problem forms: equality elimination,
//! independent-set hardness gadgets, Max-p-Cut as equation systems, equation
//! systems as constraint instances, and inequality splitting.

use std::collections::BTreeMap;

use num::{BigUint, Zero};

use crate::algebra::{is_prime, AbelianGroup};
use crate::model::{Constraint, Domain, Instance, Measure, ModelError, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One signed variable occurrence in an equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub variable: String,
    /// True when the occurrence enters the sum as -x rather than +x.
    pub negated: bool,
}

impl Term {
    pub fn plus(variable: &str) -> Self {
        Term {
            variable: variable.to_string(),
            negated: false,
        }
    }

    pub fn minus(variable: &str) -> Self {
        Term {
            variable: variable.to_string(),
            negated: true,
        }
    }
}

/// A linear equation over Z_p: the signed sum of the terms equals
/// `constant`. Coefficients other than +1 and -1 are expressed by listing
/// a variable several times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub terms: Vec<Term>,
    pub constant: u64,
}

/// A weighted system of linear equations over Z_p. The measure of a
/// solution s is the sum of w(v) * g(s(v)) over all variables, where g is
/// the value map carried by the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqnInstance {
    prime: u64,
    variables: Vec<String>,
    weights: Vec<u64>,
    equations: Vec<Equation>,
    gmap: Vec<u64>,
    index: BTreeMap<String, usize>,
}

impl EqnInstance {
    pub fn new(
        prime: u64,
        variables: Vec<String>,
        weights: Vec<u64>,
        equations: Vec<Equation>,
        gmap: Vec<u64>,
    ) -> Result<Self, ReduceError> {
        if !is_prime(prime) {
            return Err(ReduceError::InvalidArgument(format!(
                "modulus {prime} is not prime"
            )));
        }
        if variables.len() != weights.len() {
            return Err(ReduceError::InvalidArgument(format!(
                "{} variables but {} weights",
                variables.len(),
                weights.len()
            )));
        }
        if gmap.len() != prime as usize {
            return Err(ReduceError::InvalidArgument(format!(
                "value map has {} entries, expected {prime}",
                gmap.len()
            )));
        }
        let mut index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(ReduceError::InvalidArgument(format!(
                    "duplicate variable {v}"
                )));
            }
        }
        for (i, eq) in equations.iter().enumerate() {
            if eq.terms.is_empty() {
                return Err(ReduceError::InvalidArgument(format!(
                    "equation {i} has no terms"
                )));
            }
            if eq.constant >= prime {
                return Err(ReduceError::InvalidArgument(format!(
                    "equation {i} has constant {} outside Z_{prime}",
                    eq.constant
                )));
            }
            for t in &eq.terms {
                if !index.contains_key(&t.variable) {
                    return Err(ReduceError::InvalidArgument(format!(
                        "equation {i} references undeclared variable {}",
                        t.variable
                    )));
                }
            }
        }
        Ok(EqnInstance {
            prime,
            variables,
            weights,
            equations,
            gmap,
            index,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn gmap(&self) -> &[u64] {
        &self.gmap
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn check_values(&self, values: &[u64]) -> Result<(), ReduceError> {
        if values.len() != self.variables.len() {
            return Err(ReduceError::InvalidArgument(format!(
                "{} values for {} variables",
                values.len(),
                self.variables.len()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v >= self.prime) {
            return Err(ReduceError::InvalidArgument(format!(
                "value {v} outside Z_{}",
                self.prime
            )));
        }
        Ok(())
    }

    /// True when `values` (indexed like `variables`) satisfies every
    /// equation.
    pub fn is_solution(&self, values: &[u64]) -> Result<bool, ReduceError> {
        self.check_values(values)?;
        Ok(self.equations.iter().all(|eq| {
            let mut sum = 0u64;
            for t in &eq.terms {
                let v = values[self.index[&t.variable]];
                let signed = if t.negated { self.prime - v } else { v } % self.prime;
                sum = (sum + signed) % self.prime;
            }
            sum == eq.constant
        }))
    }

    /// Measure of a (not necessarily feasible) value vector: the weighted
    /// sum of g over the assigned values.
    pub fn measure(&self, values: &[u64]) -> Result<Measure, ReduceError> {
        self.check_values(values)?;
        let mut m = Measure::zero();
        for (w, v) in self.weights.iter().zip(values) {
            m += BigUint::from(*w) * BigUint::from(self.gmap[*v as usize]);
        }
        Ok(m)
    }

    /// Exhaustive optimum over all p^n value vectors; a testing oracle, so
    /// only suitable for small systems. Ties go to the lexicographically
    /// largest solution. None when the system is unsatisfiable.
    pub fn optimum(&self) -> Option<(Measure, Vec<u64>)> {
        let n = self.variables.len();
        let mut values = vec![0u64; n];
        let mut best: Option<(Measure, Vec<u64>)> = None;
        loop {
            if self.is_solution(&values).expect("enumerated values are in range") {
                let m = self.measure(&values).expect("enumerated values are in range");
                if best.as_ref().is_none_or(|(b, _)| m >= *b) {
                    best = Some((m, values.clone()));
                }
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return best;
                }
                pos -= 1;
                values[pos] += 1;
                if values[pos] < self.prime {
                    break;
                }
                values[pos] = 0;
            }
        }
    }
}

/// An undirected graph on vertices 0..n, without self-loops. Edges are
/// stored as sorted distinct (low, high) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, ReduceError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(ReduceError::InvalidArgument(format!(
                    "self-loop at vertex {u}"
                )));
            }
            if u >= vertices || v >= vertices {
                return Err(ReduceError::InvalidArgument(format!(
                    "edge ({u}, {v}) outside vertex range 0..{vertices}"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(Graph {
            vertices,
            edges: normalized,
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of edges whose endpoints receive different values under the
    /// given vertex coloring.
    pub fn cut_size(&self, colors: &[u64]) -> Result<usize, ReduceError> {
        if colors.len() != self.vertices {
            return Err(ReduceError::InvalidArgument(format!(
                "{} colors for {} vertices",
                colors.len(),
                self.vertices
            )));
        }
        Ok(self
            .edges
            .iter()
            .filter(|(u, v)| colors[*u] != colors[*v])
            .count())
    }
}

/// Detects whether a constraint is the full equality relation on the
/// instance domain: binary, with exactly the diagonal tuples.
fn is_equality_constraint(c: &Constraint, domain: &Domain) -> bool {
    c.relation.arity() == 2
        && c.relation.len() == domain.len()
        && domain
            .elements()
            .iter()
            .all(|&d| c.relation.contains(&[d, d]))
}

/// Removes every equality constraint by merging the variables it links.
///
/// Merged classes keep the lowest-index variable as representative and
/// carry the summed weight, so the optimum is unchanged. The returned map
/// sends each original variable index to its representative's index in the
/// new instance; a solution s' of the output lifts to the input via
/// s(v_i) = s'(mapping[i]).
pub fn eliminate_equalities(instance: &Instance) -> (Instance, Vec<usize>) {
    let n = instance.variables().len();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    for c in instance.constraints() {
        if is_equality_constraint(c, instance.domain()) {
            let a = find(&mut parent, c.scope[0]);
            let b = find(&mut parent, c.scope[1]);
            // lowest index wins so representatives are stable
            parent[a.max(b)] = a.min(b);
        }
    }

    let mut representatives: Vec<usize> = (0..n).filter(|&i| find(&mut parent, i) == i).collect();
    representatives.sort_unstable();
    let mut new_index = vec![usize::MAX; n];
    for (pos, &rep) in representatives.iter().enumerate() {
        new_index[rep] = pos;
    }
    let mapping: Vec<usize> = (0..n).map(|i| new_index[find(&mut parent, i)]).collect();

    let mut weights = vec![0u128; representatives.len()];
    for i in 0..n {
        weights[mapping[i]] += instance.weights()[i] as u128;
    }
    let weights: Vec<u64> = weights
        .into_iter()
        .map(|w| u64::try_from(w).expect("summed weights fit in u64"))
        .collect();
    let variables: Vec<String> = representatives
        .iter()
        .map(|&i| instance.variables()[i].clone())
        .collect();

    let constraints: Vec<Constraint> = instance
        .constraints()
        .iter()
        .filter(|c| !is_equality_constraint(c, instance.domain()))
        .map(|c| Constraint {
            name: c.name.clone(),
            scope: c.scope.iter().map(|&i| mapping[i]).collect(),
            relation: c.relation.clone(),
        })
        .collect();

    let reduced = Instance::new(instance.domain().clone(), variables, weights, constraints)
        .expect("merging variables preserves instance validity");
    (reduced, mapping)
}

/// Builds the independent-set gadget over the two-element domain {a, b}:
/// one weight-1 variable per vertex and the relation {(a,a), (a,b), (b,a)}
/// on every edge, so optima put a maximum independent set at b and the
/// rest at a.
pub fn gen_independent_set_gadget(g: &Graph, a: u64, b: u64) -> Result<Instance, ReduceError> {
    if a >= b {
        return Err(ReduceError::InvalidArgument(format!(
            "gadget levels must satisfy a < b, got a={a}, b={b}"
        )));
    }
    let domain = Domain::new(vec![a, b])?;
    let relation = Relation::new(2, vec![vec![a, a], vec![a, b], vec![b, a]], &domain)?;
    let variables: Vec<String> = (0..g.vertices()).map(|i| format!("x_{i}")).collect();
    let weights = vec![1u64; g.vertices()];
    let constraints: Vec<Constraint> = g
        .edges()
        .iter()
        .map(|&(u, v)| Constraint {
            name: "R".to_string(),
            scope: vec![u, v],
            relation: relation.clone(),
        })
        .collect();
    Ok(Instance::new(domain, variables, weights, constraints)?)
}

/// Smallest element of Z_p at which the value map attains its minimum.
fn gmap_argmin(gmap: &[u64]) -> u64 {
    let mut arg = 0usize;
    for (i, &v) in gmap.iter().enumerate() {
        if v < gmap[arg] {
            arg = i;
        }
    }
    arg as u64
}

/// Encodes Max-p-Cut on `g` as an equation system over Z_p: weight-0
/// variables x_i per vertex, weight-1 variables z_{i}_{j}_{k} per edge
/// {i, j} and k in 0..p, and equations k(x_i - x_j) + g_min = z_{i}_{j}_{k}
/// with the k-fold product written as k repetitions of the signed pair.
/// Equal endpoints contribute p * g(g_min) to the measure, distinct
/// endpoints the full sum of g over Z_p.
pub fn gen_maxpcut_eqn(g: &Graph, p: u64, gmap: &[u64]) -> Result<EqnInstance, ReduceError> {
    if !is_prime(p) {
        return Err(ReduceError::InvalidArgument(format!("{p} is not prime")));
    }
    if gmap.len() != p as usize {
        return Err(ReduceError::InvalidArgument(format!(
            "value map has {} entries, expected {p}",
            gmap.len()
        )));
    }
    let g_min = gmap_argmin(gmap);
    let mut variables: Vec<String> = (0..g.vertices()).map(|i| format!("x_{i}")).collect();
    let mut weights = vec![0u64; g.vertices()];
    let mut equations = Vec::with_capacity(g.edges().len() * p as usize);
    for &(i, j) in g.edges() {
        for k in 0..p {
            let z = format!("z_{i}_{j}_{k}");
            let mut terms = Vec::with_capacity(2 * k as usize + 1);
            for _ in 0..k {
                terms.push(Term::plus(&format!("x_{i}")));
                terms.push(Term::minus(&format!("x_{j}")));
            }
            terms.push(Term::minus(&z));
            equations.push(Equation {
                terms,
                constant: (p - g_min) % p,
            });
            variables.push(z);
            weights.push(1);
        }
    }
    EqnInstance::new(p, variables, weights, equations, gmap.to_vec())
}

/// Evaluates both sides of the measure identity linking a p-cut and its
/// equation encoding: completing the z-variables from a vertex assignment
/// and measuring (left) against |E| p g(g_min) + (g_s - p g(g_min)) cut
/// (right). The two agree on every assignment.
pub fn pcut_measure_identity(
    g: &Graph,
    p: u64,
    gmap: &[u64],
    assignment: &[u64],
) -> Result<(Measure, Measure), ReduceError> {
    if assignment.len() != g.vertices() {
        return Err(ReduceError::InvalidArgument(format!(
            "{} values for {} vertices",
            assignment.len(),
            g.vertices()
        )));
    }
    if let Some(v) = assignment.iter().find(|&&v| v >= p) {
        return Err(ReduceError::InvalidArgument(format!(
            "vertex value {v} outside Z_{p}"
        )));
    }
    let eqn = gen_maxpcut_eqn(g, p, gmap)?;
    let g_min = gmap_argmin(gmap);

    let mut values = assignment.to_vec();
    for &(i, j) in g.edges() {
        let diff = (assignment[i] + p - assignment[j]) % p;
        for k in 0..p {
            values.push((k * diff % p + g_min) % p);
        }
    }
    debug_assert!(eqn.is_solution(&values).expect("completed values are in range"));
    let lhs = eqn.measure(&values)?;

    let g_s: u64 = gmap.iter().sum();
    let g_at_min = gmap[g_min as usize];
    let cut = g.cut_size(assignment)? as u64;
    let rhs = BigUint::from(g.edges().len() as u64) * BigUint::from(p) * BigUint::from(g_at_min)
        + BigUint::from(g_s - p * g_at_min) * BigUint::from(cut);
    Ok((lhs, rhs))
}

/// Rewrites an equation system as a constraint instance over a group the
/// prime field embeds into. Every variable is restricted to the image
/// subgroup by a unary constraint U, and every equation becomes its
/// extensionally materialized solution relation over the distinct scope
/// variables in first-occurrence order. When the instance's value map
/// equals the embedding, measures coincide solution for solution.
pub fn eqn_to_maxsol(
    e: &EqnInstance,
    group: &AbelianGroup,
    embedding: &[u64],
) -> Result<Instance, ReduceError> {
    let p = e.prime();
    if embedding.len() != p as usize {
        return Err(ReduceError::InvalidArgument(format!(
            "embedding has {} entries, expected {p}",
            embedding.len()
        )));
    }
    for &h in embedding {
        if !group.carrier().contains(h) {
            return Err(ReduceError::InvalidArgument(format!(
                "embedding value {h} is not a group element"
            )));
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            if embedding[i as usize] == embedding[j as usize] {
                return Err(ReduceError::InvalidArgument(format!(
                    "embedding is not injective: {i} and {j} both map to {}",
                    embedding[i as usize]
                )));
            }
        }
    }
    for i in 0..p {
        for j in 0..p {
            let lhs = embedding[((i + j) % p) as usize];
            let rhs = group.add(embedding[i as usize], embedding[j as usize]);
            if lhs != rhs {
                return Err(ReduceError::InvalidArgument(format!(
                    "embedding is not a homomorphism at ({i}, {j})"
                )));
            }
        }
    }

    let domain = group.carrier().clone();
    let image: Vec<Vec<u64>> = embedding.iter().map(|&h| vec![h]).collect();
    let unary = Relation::new(1, image, &domain)?;

    let mut constraints: Vec<Constraint> = (0..e.variables().len())
        .map(|i| Constraint {
            name: "U".to_string(),
            scope: vec![i],
            relation: unary.clone(),
        })
        .collect();

    for (idx, eq) in e.equations().iter().enumerate() {
        // distinct scope variables in first-occurrence order, with net
        // coefficients folded into Z_p
        let mut scope_vars: Vec<&str> = Vec::new();
        let mut coeffs: Vec<u64> = Vec::new();
        for t in &eq.terms {
            let pos = match scope_vars.iter().position(|v| *v == t.variable) {
                Some(pos) => pos,
                None => {
                    scope_vars.push(&t.variable);
                    coeffs.push(0);
                    scope_vars.len() - 1
                }
            };
            coeffs[pos] = (coeffs[pos] + if t.negated { p - 1 } else { 1 }) % p;
        }
        let m = scope_vars.len();
        let mut tuples = Vec::new();
        let mut point = vec![0u64; m];
        loop {
            let sum = point
                .iter()
                .zip(&coeffs)
                .fold(0u64, |acc, (&v, &c)| (acc + c * v) % p);
            if sum == eq.constant {
                tuples.push(point.iter().map(|&v| embedding[v as usize]).collect());
            }
            let mut pos = m;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                point[pos] += 1;
                if point[pos] < p {
                    break;
                }
                point[pos] = 0;
            }
            if point.iter().all(|&v| v == 0) {
                break;
            }
        }
        constraints.push(Constraint {
            name: format!("eq_{idx}"),
            scope: scope_vars
                .iter()
                .map(|v| e.variable_index(v).expect("validated at construction"))
                .collect(),
            relation: Relation::new(m, tuples, &domain)?,
        });
    }

    Ok(Instance::new(
        domain,
        e.variables().to_vec(),
        e.weights().to_vec(),
        constraints,
    )?)
}

/// One linear inequality: the sum of coefficient * variable is at least
/// `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub terms: Vec<(i64, String)>,
    pub bound: i64,
}

impl Inequality {
    /// None when a referenced variable is missing from the map.
    pub fn satisfied_by(&self, values: &BTreeMap<String, i64>) -> Option<bool> {
        let mut sum = 0i64;
        for (c, v) in &self.terms {
            sum += c * values.get(v)?;
        }
        Some(sum >= self.bound)
    }
}

/// A fresh variable introduced by inequality splitting. Its defining
/// inequality pair forces it to equal the sum in `definition`, so it must
/// be able to range over [low, high].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshVariable {
    pub name: String,
    pub low: i64,
    pub high: i64,
    pub definition: Vec<(i64, String)>,
}

/// Result of splitting an inequality: an equivalent system in which every
/// inequality has at most three variables. Whether the caller's domain
/// accommodates each fresh variable's range is the caller's problem; the
/// ranges are reported rather than assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSystem {
    pub inequalities: Vec<Inequality>,
    pub fresh: Vec<FreshVariable>,
}

impl SplitSystem {
    /// Extends an assignment of the original variables with the forced
    /// value of every fresh variable, in introduction order. None when a
    /// referenced variable is missing.
    pub fn forced_extension(
        &self,
        values: &BTreeMap<String, i64>,
    ) -> Option<BTreeMap<String, i64>> {
        let mut full = values.clone();
        for f in &self.fresh {
            let mut sum = 0i64;
            for (c, v) in &f.definition {
                sum += c * full.get(v)?;
            }
            full.insert(f.name.clone(), sum);
        }
        Some(full)
    }
}

/// Splits a_0 x_0 + ... + a_{k-1} x_{k-1} >= bound over the domain
/// {0, ..., d-1} into inequalities of at most three variables each: the
/// first half of the terms is named by a fresh zero-weight variable z via
/// the pair (half - z >= 0, -half + z >= 0), the tail becomes
/// z + rest >= bound, and all three are split recursively. Inputs with at
/// most three terms pass through unchanged.
pub fn split_inequality(coeffs: &[i64], bound: i64, d: u64) -> SplitSystem {
    let top = d.saturating_sub(1) as i64;
    let mut ranges: BTreeMap<String, (i64, i64)> = BTreeMap::new();
    let terms: Vec<(i64, String)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let name = format!("x_{i}");
            ranges.insert(name.clone(), (0, top));
            (c, name)
        })
        .collect();
    let mut system = SplitSystem {
        inequalities: Vec::new(),
        fresh: Vec::new(),
    };
    let mut counter = 0usize;
    split_rec(terms, bound, &mut ranges, &mut counter, &mut system);
    system
}

fn sum_range(terms: &[(i64, String)], ranges: &BTreeMap<String, (i64, i64)>) -> (i64, i64) {
    let mut low = 0i64;
    let mut high = 0i64;
    for (c, v) in terms {
        let (vlow, vhigh) = ranges[v];
        low += (c * vlow).min(c * vhigh);
        high += (c * vlow).max(c * vhigh);
    }
    (low, high)
}

fn split_rec(
    terms: Vec<(i64, String)>,
    bound: i64,
    ranges: &mut BTreeMap<String, (i64, i64)>,
    counter: &mut usize,
    system: &mut SplitSystem,
) {
    if terms.len() <= 3 {
        system.inequalities.push(Inequality { terms, bound });
        return;
    }
    let half = terms.len() / 2;
    let left = terms[..half].to_vec();
    let right = terms[half..].to_vec();
    let name = format!("z_{}", *counter);
    *counter += 1;
    let (low, high) = sum_range(&left, ranges);
    ranges.insert(name.clone(), (low, high));
    system.fresh.push(FreshVariable {
        name: name.clone(),
        low,
        high,
        definition: left.clone(),
    });

    let mut below = left.clone();
    below.push((-1, name.clone()));
    let mut above: Vec<(i64, String)> = left.iter().map(|(c, v)| (-c, v.clone())).collect();
    above.push((1, name.clone()));
    let mut tail = vec![(1, name)];
    tail.extend(right);

    split_rec(below, 0, ranges, counter, system);
    split_rec(above, 0, ranges, counter, system);
    split_rec(tail, bound, ranges, counter, system);
}
