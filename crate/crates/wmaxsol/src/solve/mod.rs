//! Exact and approximate solvers, a brute-force oracle, and the
//! performance-ratio harness.

mod affine;
mod search;
mod semilattice;

pub use affine::{analyze_affine, solve_affine, AffineAnalysis};
pub use search::{csp_search, DEFAULT_SEARCH_BUDGET};
pub use semilattice::solve_2semilattice;

use num::{BigInt, BigRational, One};

use crate::algebra::{is_polymorphism, op_predicates, AlgebraError};
use crate::model::{
    measure, satisfies_all, Assignment, Constraint, Instance, Measure, ModelError, Operation,
    Relation,
};

pub const DEFAULT_BRUTE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("search budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("certificate rejected: {0}")]
    InvalidCertificate(String),
    #[error("relation is not unary or an injective graph: {0}")]
    NotInjective(String),
    #[error("solver does not apply: {0}")]
    NotApplicable(String),
    #[error("assignment rejected: {0}")]
    MalformedAssignment(String),
    #[error("internal invariant violated: {0}")]
    InternalError(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
}

/// Outcome of a solver run. OPTIMAL and FEASIBLE carry a feasible
/// assignment and its measure; `guarantee` is an exact lower bound on
/// measure/optimum for approximate solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub assignment: Option<Assignment>,
    pub measure: Option<Measure>,
    pub guarantee: Option<BigRational>,
}

impl SolveResult {
    pub fn infeasible() -> Self {
        SolveResult {
            status: SolveStatus::Infeasible,
            assignment: None,
            measure: None,
            guarantee: None,
        }
    }

    fn solved(status: SolveStatus, instance: &Instance, values: &[u64]) -> Self {
        let assignment = Assignment::from_values(instance, values);
        let m = measure(instance, &assignment).expect("solver assignments are total");
        SolveResult {
            status,
            assignment: Some(assignment),
            measure: Some(m),
            guarantee: None,
        }
    }

    fn with_guarantee(mut self, g: BigRational) -> Self {
        if self.status != SolveStatus::Infeasible {
            self.guarantee = Some(g);
        }
        self
    }
}

/// max(opt/m, m/opt), with an infinity sentinel for zero-measure solutions
/// to instances with positive optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerformanceRatio {
    Finite(BigRational),
    Infinite,
}

impl std::fmt::Display for PerformanceRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PerformanceRatio::Finite(r) => write!(f, "{r}"),
            PerformanceRatio::Infinite => write!(f, "inf"),
        }
    }
}

fn rational(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exhaustive maximization. Enumerates all |D|^|V| assignments; ties are
/// broken toward the lexicographically largest assignment in variable
/// order, so the result is deterministic.
pub fn brute_force(instance: &Instance) -> Result<SolveResult, SolveError> {
    brute_force_with(instance, None, 1)
}

/// Brute force with an explicit enumeration budget and worker count.
/// Workers partition on the first variable's value; the merge reproduces
/// the sequential tie-break exactly.
pub fn brute_force_with(
    instance: &Instance,
    budget: Option<u64>,
    jobs: usize,
) -> Result<SolveResult, SolveError> {
    let budget = budget.unwrap_or(DEFAULT_BRUTE_BUDGET);
    let nvars = instance.variables().len();
    let dsize = instance.domain().len() as u128;
    let total = dsize.checked_pow(nvars as u32);
    if total.is_none_or(|t| t > budget as u128) {
        return Err(SolveError::BudgetExceeded { budget });
    }
    if nvars == 0 {
        return Ok(SolveResult::solved(SolveStatus::Optimal, instance, &[]));
    }
    let jobs = jobs.max(1);
    let best = if jobs == 1 {
        scan_block(instance, None)
    } else {
        let elems = instance.domain().elements();
        let chunks: Vec<Vec<u64>> = (0..jobs)
            .map(|w| {
                elems
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|(i, _)| i % jobs == w)
                    .map(|(_, e)| e)
                    .collect()
            })
            .filter(|c: &Vec<u64>| !c.is_empty())
            .collect();
        let results: Vec<Option<(Measure, Vec<u64>)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| scope.spawn(move || scan_block(instance, Some(chunk.as_slice()))))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        // the sequential scan prefers larger measure, then the later (hence
        // lexicographically larger) assignment
        results.into_iter().flatten().reduce(|a, b| {
            if (&b.0, &b.1) >= (&a.0, &a.1) {
                b
            } else {
                a
            }
        })
    };
    match best {
        Some((_, values)) => Ok(SolveResult::solved(SolveStatus::Optimal, instance, &values)),
        None => Ok(SolveResult::infeasible()),
    }
}

// Scans assignments in lexicographic order, restricted (if given) to a set
// of first-variable values; keeps (measure, values) maximal, replacing on
// ties so the lexicographically largest maximizer survives.
fn scan_block(instance: &Instance, first_values: Option<&[u64]>) -> Option<(Measure, Vec<u64>)> {
    let elems = instance.domain().elements();
    let nvars = instance.variables().len();
    let firsts = first_values.unwrap_or(elems);
    if nvars == 0 || firsts.is_empty() {
        return None;
    }
    let weights = instance.weights();
    let mut best: Option<(Measure, Vec<u64>)> = None;
    let mut values = vec![elems[0]; nvars];
    let mut idx = vec![0usize; nvars];
    'outer: for &first in firsts {
        values[0] = first;
        for slot in idx.iter_mut().skip(1) {
            *slot = 0;
        }
        for v in values.iter_mut().skip(1) {
            *v = elems[0];
        }
        loop {
            if satisfies_all(instance, &values) {
                let m: Measure = weights
                    .iter()
                    .zip(&values)
                    .map(|(&w, &v)| Measure::from(w) * Measure::from(v))
                    .sum();
                let better = match &best {
                    Some((bm, _)) => m >= *bm,
                    None => true,
                };
                if better {
                    best = Some((m, values.clone()));
                }
            }
            // mixed-radix increment over positions 1..nvars
            let mut pos = nvars;
            loop {
                if pos == 1 {
                    continue 'outer;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    values[pos] = elems[idx[pos]];
                    break;
                }
                idx[pos] = 0;
                values[pos] = elems[0];
            }
        }
    }
    best
}

/// Repeated join-and-project to a fixpoint: each constraint keeps only
/// tuples that some tuple of every overlapping constraint agrees with on
/// shared variables. The solution set is unchanged; relations may become
/// empty, which downstream solvers read as infeasibility.
pub fn pairwise_consistency(instance: &Instance) -> Instance {
    let mut cons: Vec<Constraint> = instance.constraints().to_vec();
    // tuples disagreeing on a repeated scope variable can never participate
    for c in &mut cons {
        if scope_has_repeats(&c.scope) {
            let tuples: Vec<Vec<u64>> = c
                .relation
                .tuples()
                .iter()
                .filter(|t| consistent_on_repeats(&c.scope, t))
                .cloned()
                .collect();
            c.relation = Relation::from_sorted(c.relation.arity(), tuples);
        }
    }
    loop {
        let mut changed = false;
        for i in 0..cons.len() {
            for j in 0..cons.len() {
                if i == j {
                    continue;
                }
                let shared = shared_vars(&cons[i].scope, &cons[j].scope);
                if shared.is_empty() {
                    continue;
                }
                let keep: Vec<Vec<u64>> = cons[i]
                    .relation
                    .tuples()
                    .iter()
                    .filter(|t| {
                        cons[j]
                            .relation
                            .tuples()
                            .iter()
                            .any(|u| agree_on(&shared, &cons[i].scope, t, &cons[j].scope, u))
                    })
                    .cloned()
                    .collect();
                if keep.len() < cons[i].relation.len() {
                    cons[i].relation = Relation::from_sorted(cons[i].relation.arity(), keep);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    instance
        .with_constraints(cons)
        .expect("rewriting relations preserves scope shapes")
}

fn scope_has_repeats(scope: &[usize]) -> bool {
    scope
        .iter()
        .enumerate()
        .any(|(k, v)| scope[..k].contains(v))
}

fn consistent_on_repeats(scope: &[usize], t: &[u64]) -> bool {
    scope.iter().enumerate().all(|(k, &var)| {
        scope[..k]
            .iter()
            .position(|&earlier| earlier == var)
            .is_none_or(|first| t[first] == t[k])
    })
}

fn shared_vars(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().copied().filter(|v| b.contains(v)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn agree_on(shared: &[usize], sa: &[usize], ta: &[u64], sb: &[usize], tb: &[u64]) -> bool {
    shared.iter().all(|&v| {
        let pa = sa.iter().position(|&x| x == v).unwrap();
        let pb = sb.iter().position(|&x| x == v).unwrap();
        ta[pa] == tb[pb]
    })
}

/// Exact solver for languages with a generalised max-closed polymorphism.
/// After enforcing pairwise consistency, every variable can take its
/// maximum allowed value simultaneously.
pub fn solve_genmax(instance: &Instance, witness: &Operation) -> Result<SolveResult, SolveError> {
    if witness.domain() != instance.domain() {
        return Err(SolveError::InvalidCertificate(
            "witness domain differs from the instance domain".into(),
        ));
    }
    if !op_predicates(witness).is_generalised_max {
        return Err(SolveError::InvalidCertificate(
            "witness is not generalised max-closed".into(),
        ));
    }
    for c in instance.constraints() {
        if !is_polymorphism(witness, &c.relation)? {
            return Err(SolveError::InvalidCertificate(format!(
                "witness does not preserve relation {:?}",
                c.name
            )));
        }
    }
    let consistent = pairwise_consistency(instance);
    if consistent
        .constraints()
        .iter()
        .any(|c| c.relation.is_empty())
    {
        return Ok(SolveResult::infeasible());
    }
    let nvars = instance.variables().len();
    let mut values = vec![instance.domain().max_element(); nvars];
    for (i, v) in values.iter_mut().enumerate() {
        // allowed sets from different constraints coincide at the fixpoint;
        // intersecting anyway keeps the computation honest
        let mut allowed: Option<Vec<u64>> = None;
        for c in consistent.constraints() {
            for (k, &var) in c.scope.iter().enumerate() {
                if var != i {
                    continue;
                }
                let col = c.relation.column(k);
                allowed = Some(match allowed {
                    None => col,
                    Some(prev) => prev.into_iter().filter(|x| col.contains(x)).collect(),
                });
            }
        }
        if let Some(vals) = allowed {
            let Some(&top) = vals.last() else {
                return Err(SolveError::InternalError(
                    "pairwise-consistent nonempty constraints disagree on a variable".into(),
                ));
            };
            *v = top;
        }
    }
    if !satisfies_all(&consistent, &values) {
        return Err(SolveError::InternalError(
            "maximum allowed values do not satisfy a generalised max-closed instance".into(),
        ));
    }
    Ok(SolveResult::solved(SolveStatus::Optimal, instance, &values))
}

// Graph-of-an-injective-map check: binary, no first coordinate maps to two
// seconds, no second coordinate reached from two firsts.
fn injective_graph(r: &Relation) -> bool {
    if r.arity() != 2 {
        return false;
    }
    for (i, t) in r.tuples().iter().enumerate() {
        for u in &r.tuples()[i + 1..] {
            if (t[0] == u[0]) != (t[1] == u[1]) {
                return false;
            }
        }
    }
    true
}

/// Exact solver for instances whose constraints are unary relations or
/// graphs of injective partial maps. Each connected component of the
/// variable graph admits at most |D| propagated solutions.
pub fn solve_injective(instance: &Instance) -> Result<SolveResult, SolveError> {
    for c in instance.constraints() {
        let ok = c.relation.arity() == 1 || injective_graph(&c.relation);
        if !ok {
            return Err(SolveError::NotInjective(c.name.clone()));
        }
    }
    let nvars = instance.variables().len();
    let elems = instance.domain().elements();

    // union-find over variables joined by binary constraints
    let mut parent: Vec<usize> = (0..nvars).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in instance.constraints() {
        if c.scope.len() == 2 && c.scope[0] != c.scope[1] {
            let (a, b) = (
                find(&mut parent, c.scope[0]),
                find(&mut parent, c.scope[1]),
            );
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }

    let mut values = vec![0u64; nvars];
    let mut components: Vec<Vec<usize>> = Vec::new();
    {
        let mut seen: Vec<Option<usize>> = vec![None; nvars];
        for v in 0..nvars {
            let r = find(&mut parent, v);
            match seen[r] {
                Some(ci) => components[ci].push(v),
                None => {
                    seen[r] = Some(components.len());
                    components.push(vec![v]);
                }
            }
        }
    }

    for comp in &components {
        let seed = comp[0];
        let mut best: Option<(Measure, Vec<u64>)> = None;
        'candidate: for &seed_value in elems {
            // propagate the seed value through the component's constraints
            let mut assigned: Vec<Option<u64>> = vec![None; nvars];
            assigned[seed] = Some(seed_value);
            let mut queue = vec![seed];
            while let Some(v) = queue.pop() {
                let val = assigned[v].unwrap();
                for c in instance.constraints() {
                    if c.scope.len() != 2 || c.scope[0] == c.scope[1] {
                        continue;
                    }
                    let (x, y) = (c.scope[0], c.scope[1]);
                    let forced = if x == v {
                        c.relation.tuples().iter().find(|t| t[0] == val).map(|t| (y, t[1]))
                    } else if y == v {
                        c.relation.tuples().iter().find(|t| t[1] == val).map(|t| (x, t[0]))
                    } else {
                        continue;
                    };
                    let Some((other, forced_value)) = forced else {
                        continue 'candidate; // val has no partner in this graph
                    };
                    match assigned[other] {
                        Some(existing) if existing != forced_value => continue 'candidate,
                        Some(_) => {}
                        None => {
                            assigned[other] = Some(forced_value);
                            queue.push(other);
                        }
                    }
                }
            }
            let comp_values: Vec<u64> = comp
                .iter()
                .map(|&v| assigned[v].expect("components are connected"))
                .collect();
            // unary constraints and self-loop scopes filter the candidate
            for c in instance.constraints() {
                let relevant = match c.scope.len() {
                    1 => comp.contains(&c.scope[0]),
                    2 if c.scope[0] == c.scope[1] => comp.contains(&c.scope[0]),
                    _ => false,
                };
                if !relevant {
                    continue;
                }
                let val = assigned[c.scope[0]].unwrap();
                let holds = match c.scope.len() {
                    1 => c.relation.contains(&[val]),
                    _ => c.relation.contains(&[val, val]),
                };
                if !holds {
                    continue 'candidate;
                }
            }
            let m: Measure = comp
                .iter()
                .zip(&comp_values)
                .map(|(&v, &val)| Measure::from(instance.weights()[v]) * Measure::from(val))
                .sum();
            let better = match &best {
                Some((bm, bv)) => (&m, &comp_values) >= (bm, bv),
                None => true,
            };
            if better {
                best = Some((m, comp_values));
            }
        }
        let Some((_, comp_values)) = best else {
            return Ok(SolveResult::infeasible());
        };
        for (&v, &val) in comp.iter().zip(&comp_values) {
            values[v] = val;
        }
    }
    Ok(SolveResult::solved(SolveStatus::Optimal, instance, &values))
}

/// Feasibility plus the min(D)/max(D) bound that holds for any zero-free
/// domain: every feasible solution is within max(D)/min(D) of optimal.
pub fn trivial_approx(instance: &Instance, budget: Option<u64>) -> Result<SolveResult, SolveError> {
    let d = instance.domain();
    if d.min_element() == 0 {
        return Err(SolveError::NotApplicable(
            "the trivial bound needs a domain without 0".into(),
        ));
    }
    let Some(a) = csp_search(instance, budget)? else {
        return Ok(SolveResult::infeasible());
    };
    let values = a.values_for(instance)?;
    let status = if d.len() == 1 {
        SolveStatus::Optimal
    } else {
        SolveStatus::Feasible
    };
    Ok(SolveResult::solved(status, instance, &values)
        .with_guarantee(rational(d.min_element(), d.max_element())))
}

/// max(opt/m, m/opt) for a feasible assignment, exactly; Infinite when the
/// assignment measures 0 but the optimum is positive.
pub fn performance_ratio(
    instance: &Instance,
    a: &Assignment,
    budget: Option<u64>,
) -> Result<PerformanceRatio, SolveError> {
    if !crate::model::is_feasible(instance, a)? {
        return Err(SolveError::MalformedAssignment(
            "assignment violates a constraint".into(),
        ));
    }
    let oracle = brute_force_with(instance, budget, 1)?;
    let opt = match oracle.measure {
        Some(m) => m,
        None => {
            return Err(SolveError::InternalError(
                "oracle found no solution although one was given".into(),
            ))
        }
    };
    let m = measure(instance, a)?;
    let zero = Measure::from(0u32);
    if opt == zero {
        return Ok(PerformanceRatio::Finite(BigRational::one()));
    }
    if m == zero {
        return Ok(PerformanceRatio::Infinite);
    }
    let opt = BigInt::from(opt);
    let m = BigInt::from(m);
    let up = BigRational::new(opt.clone(), m.clone());
    let down = BigRational::new(m, opt);
    Ok(PerformanceRatio::Finite(up.max(down)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, Domain};

    fn dom(elems: &[u64]) -> Domain {
        Domain::new(elems.to_vec()).unwrap()
    }

    fn inst(
        d: &Domain,
        weights: &[u64],
        cons: Vec<(&str, Vec<usize>, Relation)>,
    ) -> Instance {
        let vars: Vec<String> = (0..weights.len()).map(|i| format!("v{i}")).collect();
        Instance::new(
            d.clone(),
            vars,
            weights.to_vec(),
            cons.into_iter()
                .map(|(name, scope, relation)| Constraint {
                    name: name.into(),
                    scope,
                    relation,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn brute_force_independent_set_edge() {
        let d = dom(&[0, 1]);
        let r = Relation::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1]], &d).unwrap();
        let i = inst(&d, &[1, 1], vec![("R", vec![0, 1], r)]);
        let res = brute_force(&i).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.measure, Some(Measure::from(1u32)));
        // tie between (1,0) and (0,1) goes to the lexicographically larger
        let a = res.assignment.unwrap();
        assert_eq!((a.get("v0"), a.get("v1")), (Some(1), Some(0)));
    }

    #[test]
    fn brute_force_empty_relation_is_infeasible() {
        let d = dom(&[0, 1]);
        let r = Relation::new(1, vec![], &d).unwrap();
        let i = inst(&d, &[1], vec![("none", vec![0], r)]);
        assert_eq!(brute_force(&i).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn brute_force_unconstrained_maximum() {
        let d = dom(&[0, 1, 3]);
        let i = inst(&d, &[2, 5], vec![]);
        let res = brute_force(&i).unwrap();
        assert_eq!(res.measure, Some(Measure::from(3u32 * (2 + 5))));
    }

    #[test]
    fn brute_force_budget() {
        let d = dom(&[0, 1]);
        let i = inst(&d, &[1, 1, 1, 1, 1], vec![]);
        assert!(matches!(
            brute_force_with(&i, Some(16), 1),
            Err(SolveError::BudgetExceeded { budget: 16 })
        ));
    }

    #[test]
    fn parallel_scan_matches_sequential() {
        let d = dom(&[0, 1, 2]);
        let r = Relation::new(2, vec![vec![0, 1], vec![1, 0], vec![2, 2], vec![1, 2]], &d).unwrap();
        let i = inst(
            &d,
            &[3, 1, 2],
            vec![
                ("R", vec![0, 1], r.clone()),
                ("R2", vec![1, 2], r),
            ],
        );
        let seq = brute_force_with(&i, None, 1).unwrap();
        for jobs in [2, 3, 7] {
            let par = brute_force_with(&i, None, jobs).unwrap();
            assert_eq!(par, seq);
        }
    }

    #[test]
    fn consistency_prunes_incompatible_projections() {
        // R1 allows y ∈ {0}, R2 allows y ∈ {1}: joint infeasibility shows
        // up as an empty relation
        let d = dom(&[0, 1]);
        let r1 = Relation::new(2, vec![vec![0, 0], vec![1, 0]], &d).unwrap();
        let r2 = Relation::new(2, vec![vec![1, 0], vec![1, 1]], &d).unwrap();
        let i = inst(
            &d,
            &[1, 1, 1],
            vec![("R1", vec![0, 1], r1), ("R2", vec![1, 2], r2)],
        );
        let out = pairwise_consistency(&i);
        assert!(out.constraints().iter().any(|c| c.relation.is_empty()));
        assert_eq!(brute_force(&i).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn consistency_preserves_solutions() {
        let d = dom(&[0, 1, 2]);
        let r1 = Relation::new(2, vec![vec![0, 1], vec![1, 2], vec![2, 0]], &d).unwrap();
        let r2 = Relation::new(2, vec![vec![1, 1], vec![2, 2], vec![1, 0]], &d).unwrap();
        let i = inst(
            &d,
            &[1, 2, 1],
            vec![("R1", vec![0, 1], r1), ("R2", vec![1, 2], r2)],
        );
        let out = pairwise_consistency(&i);
        let enumerate = |inst: &Instance| -> Vec<Vec<u64>> {
            let mut sols = Vec::new();
            for a in 0..3u64 {
                for b in 0..3u64 {
                    for c in 0..3u64 {
                        if satisfies_all(inst, &[a, b, c]) {
                            sols.push(vec![a, b, c]);
                        }
                    }
                }
            }
            sols
        };
        assert_eq!(enumerate(&i), enumerate(&out));
    }

    #[test]
    fn genmax_running_example() {
        let d = dom(&[0, 1, 2, 3]);
        let r = Relation::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 2], vec![1, 2]], &d).unwrap();
        let max = Operation::from_fn(&d, 2, |t| t[0].max(t[1])).unwrap();
        let i = inst(&d, &[1, 1], vec![("R", vec![0, 1], r)]);
        let res = solve_genmax(&i, &max).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.measure, Some(Measure::from(3u32)));
        let a = res.assignment.unwrap();
        assert_eq!((a.get("v0"), a.get("v1")), (Some(1), Some(2)));
        assert_eq!(brute_force(&i).unwrap().measure, res.measure);
    }

    #[test]
    fn genmax_detects_infeasibility() {
        let d = dom(&[0, 1]);
        let u0 = Relation::new(1, vec![vec![0]], &d).unwrap();
        let u1 = Relation::new(1, vec![vec![1]], &d).unwrap();
        let max = Operation::from_fn(&d, 2, |t| t[0].max(t[1])).unwrap();
        let i = inst(
            &d,
            &[1],
            vec![("U0", vec![0], u0), ("U1", vec![0], u1)],
        );
        assert_eq!(
            solve_genmax(&i, &max).unwrap().status,
            SolveStatus::Infeasible
        );
    }

    #[test]
    fn genmax_rejects_bad_witnesses() {
        let d = dom(&[0, 1]);
        let r = Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 0]], &d).unwrap();
        let i = inst(&d, &[1, 1], vec![("R", vec![0, 1], r)]);
        let min = Operation::from_fn(&d, 2, |t| t[0].min(t[1])).unwrap();
        assert!(matches!(
            solve_genmax(&i, &min),
            Err(SolveError::InvalidCertificate(_))
        ));
        let max = Operation::from_fn(&d, 2, |t| t[0].max(t[1])).unwrap();
        // max is generalised max-closed but does not preserve R
        assert!(matches!(
            solve_genmax(&i, &max),
            Err(SolveError::InvalidCertificate(_))
        ));
    }

    #[test]
    fn injective_single_swap_edge() {
        let d = dom(&[0, 1]);
        let r = Relation::new(2, vec![vec![0, 1], vec![1, 0]], &d).unwrap();
        let i = inst(&d, &[1, 1], vec![("swap", vec![0, 1], r)]);
        let res = solve_injective(&i).unwrap();
        assert_eq!(res.measure, Some(Measure::from(1u32)));
        assert_eq!(brute_force(&i).unwrap().measure, res.measure);
    }

    #[test]
    fn injective_chain_picks_better_propagation() {
        let d = dom(&[0, 1]);
        let swap = Relation::new(2, vec![vec![0, 1], vec![1, 0]], &d).unwrap();
        let i = inst(
            &d,
            &[1, 1, 1],
            vec![
                ("s1", vec![0, 1], swap.clone()),
                ("s2", vec![1, 2], swap),
            ],
        );
        let res = solve_injective(&i).unwrap();
        assert_eq!(res.measure, Some(Measure::from(2u32)));
        let a = res.assignment.unwrap();
        assert_eq!(
            (a.get("v0"), a.get("v1"), a.get("v2")),
            (Some(1), Some(0), Some(1))
        );
    }

    #[test]
    fn injective_isolated_variable_maxes_out() {
        let d = dom(&[0, 3]);
        let i = inst(&d, &[5], vec![]);
        let res = solve_injective(&i).unwrap();
        assert_eq!(res.measure, Some(Measure::from(15u32)));
    }

    #[test]
    fn injective_rejects_wide_relations() {
        let d = dom(&[0, 1]);
        let r = Relation::new(2, vec![vec![0, 0], vec![0, 1]], &d).unwrap();
        let i = inst(&d, &[1, 1], vec![("fork", vec![0, 1], r)]);
        assert!(matches!(
            solve_injective(&i),
            Err(SolveError::NotInjective(_))
        ));
    }

    #[test]
    fn injective_honours_unary_filters() {
        let d = dom(&[0, 1]);
        let swap = Relation::new(2, vec![vec![0, 1], vec![1, 0]], &d).unwrap();
        let pin = Relation::new(1, vec![vec![0]], &d).unwrap();
        let i = inst(
            &d,
            &[1, 10],
            vec![("swap", vec![0, 1], swap), ("pin", vec![1], pin)],
        );
        let res = solve_injective(&i).unwrap();
        // y is pinned to 0, so x must be 1
        assert_eq!(res.measure, Some(Measure::from(1u32)));
    }

    #[test]
    fn trivial_bound_on_zero_free_domain() {
        let d = dom(&[1, 2]);
        let i = inst(&d, &[1, 1], vec![]);
        let res = trivial_approx(&i, None).unwrap();
        assert_eq!(res.status, SolveStatus::Feasible);
        assert_eq!(res.guarantee, Some(rational(1, 2)));
        let zero = dom(&[0, 1]);
        let iz = inst(&zero, &[1], vec![]);
        assert!(matches!(
            trivial_approx(&iz, None),
            Err(SolveError::NotApplicable(_))
        ));
        let single = dom(&[3]);
        let is = inst(&single, &[1], vec![]);
        let rs = trivial_approx(&is, None).unwrap();
        assert_eq!(rs.status, SolveStatus::Optimal);
        assert_eq!(rs.guarantee, Some(rational(1, 1)));
    }

    #[test]
    fn ratio_of_optimal_is_one() {
        let d = dom(&[0, 1]);
        let i = inst(&d, &[1, 1], vec![]);
        let best = Assignment::from_pairs([("v0", 1u64), ("v1", 1u64)]);
        assert_eq!(
            performance_ratio(&i, &best, None).unwrap(),
            PerformanceRatio::Finite(BigRational::one())
        );
    }

    #[test]
    fn ratio_of_half_optimal_is_two() {
        let d = dom(&[0, 1, 2]);
        let i = inst(&d, &[1], vec![]);
        let half = Assignment::from_pairs([("v0", 1u64)]);
        assert_eq!(
            performance_ratio(&i, &half, None).unwrap(),
            PerformanceRatio::Finite(rational(2, 1))
        );
    }

    #[test]
    fn ratio_zero_measure_is_infinite() {
        let d = dom(&[0, 2]);
        let i = inst(&d, &[1], vec![]);
        let zero = Assignment::from_pairs([("v0", 0u64)]);
        assert_eq!(
            performance_ratio(&i, &zero, None).unwrap(),
            PerformanceRatio::Infinite
        );
    }

    #[test]
    fn ratio_rejects_infeasible_assignments() {
        let d = dom(&[0, 1]);
        let r = Relation::new(1, vec![vec![1]], &d).unwrap();
        let i = inst(&d, &[1], vec![("pin", vec![0], r)]);
        let bad = Assignment::from_pairs([("v0", 0u64)]);
        assert!(matches!(
            performance_ratio(&i, &bad, None),
            Err(SolveError::MalformedAssignment(_))
        ));
    }
}
