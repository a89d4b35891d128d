//! Complete backtracking search for plain constraint satisfaction, used by
//! solvers that need satisfiability probes rather than optimization.

use super::SolveError;
use crate::model::{Assignment, Instance};

pub const DEFAULT_SEARCH_BUDGET: u64 = 20_000_000;

/// Finds any feasible assignment, or proves there is none. Backtracking
/// over per-variable candidate sets with consistency propagation at every
/// node; exponential worst case, complete.
///
/// Smallest-domain-first variable order (ties by lowest index), values
/// ascending, so the returned assignment is deterministic.
pub fn csp_search(
    instance: &Instance,
    budget: Option<u64>,
) -> Result<Option<Assignment>, SolveError> {
    let budget = budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let nvars = instance.variables().len();
    let mut domains: Vec<Vec<u64>> = vec![instance.domain().elements().to_vec(); nvars];
    let mut visits = 0u64;
    match descend(instance, &mut domains, &mut visits, budget)? {
        Some(values) => Ok(Some(Assignment::from_values(instance, &values))),
        None => Ok(None),
    }
}

// Shrinks domains to a propagation fixpoint: every constraint keeps only
// tuples compatible with current domains (and consistent on repeated scope
// positions), and every variable keeps only values some compatible tuple
// supports. Returns false when a domain empties.
fn propagate(instance: &Instance, domains: &mut [Vec<u64>]) -> bool {
    loop {
        let mut changed = false;
        for c in instance.constraints() {
            let mut support: Vec<Vec<u64>> = vec![Vec::new(); c.scope.len()];
            for t in c.relation.tuples() {
                let compatible = c.scope.iter().enumerate().all(|(k, &var)| {
                    domains[var].contains(&t[k])
                }) && consistent_on_repeats(&c.scope, t);
                if compatible {
                    for (k, &v) in t.iter().enumerate() {
                        if !support[k].contains(&v) {
                            support[k].push(v);
                        }
                    }
                }
            }
            for (k, &var) in c.scope.iter().enumerate() {
                let before = domains[var].len();
                domains[var].retain(|v| support[k].contains(v));
                if domains[var].is_empty() {
                    return false;
                }
                if domains[var].len() < before {
                    changed = true;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn consistent_on_repeats(scope: &[usize], t: &[u64]) -> bool {
    scope.iter().enumerate().all(|(k, &var)| {
        scope[..k]
            .iter()
            .position(|&earlier| earlier == var)
            .is_none_or(|first| t[first] == t[k])
    })
}

fn descend(
    instance: &Instance,
    domains: &mut Vec<Vec<u64>>,
    visits: &mut u64,
    budget: u64,
) -> Result<Option<Vec<u64>>, SolveError> {
    if !propagate(instance, domains) {
        return Ok(None);
    }
    let branch_var = (0..domains.len())
        .filter(|&i| domains[i].len() > 1)
        .min_by_key(|&i| domains[i].len());
    let Some(var) = branch_var else {
        // all domains are singletons; propagation alone does not imply
        // global satisfiability, so check the point assignment
        let values: Vec<u64> = domains.iter().map(|d| d[0]).collect();
        if crate::model::satisfies_all(instance, &values) {
            return Ok(Some(values));
        }
        return Ok(None);
    };
    let candidates = domains[var].clone();
    for v in candidates {
        *visits += 1;
        if *visits > budget {
            return Err(SolveError::BudgetExceeded { budget });
        }
        let mut narrowed = domains.clone();
        narrowed[var] = vec![v];
        if let Some(values) = descend(instance, &mut narrowed, visits, budget)? {
            return Ok(Some(values));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_feasible, Constraint, Domain, Relation};

    fn neq_instance() -> Instance {
        // x ≠ y ≠ z ≠ x over a two-element domain: unsatisfiable triangle
        let d = Domain::new(vec![0, 1]).unwrap();
        let neq = Relation::new(2, vec![vec![0, 1], vec![1, 0]], &d).unwrap();
        let con = |s: [usize; 2]| Constraint {
            name: "neq".into(),
            scope: s.to_vec(),
            relation: neq.clone(),
        };
        Instance::new(
            d,
            vec!["x".into(), "y".into(), "z".into()],
            vec![1, 1, 1],
            vec![con([0, 1]), con([1, 2]), con([2, 0])],
        )
        .unwrap()
    }

    #[test]
    fn feasible_instance_yields_feasible_assignment() {
        let d = Domain::new(vec![0, 1, 2]).unwrap();
        let neq = Relation::new(
            2,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 2],
                vec![2, 0],
                vec![2, 1],
            ],
            &d,
        )
        .unwrap();
        let con = |s: [usize; 2]| Constraint {
            name: "neq".into(),
            scope: s.to_vec(),
            relation: neq.clone(),
        };
        let inst = Instance::new(
            d,
            vec!["x".into(), "y".into(), "z".into()],
            vec![1, 1, 1],
            vec![con([0, 1]), con([1, 2]), con([2, 0])],
        )
        .unwrap();
        let a = csp_search(&inst, None).unwrap().expect("3-coloring exists");
        assert!(is_feasible(&inst, &a).unwrap());
    }

    #[test]
    fn odd_cycle_over_two_values_is_unsatisfiable() {
        assert_eq!(csp_search(&neq_instance(), None).unwrap(), None);
    }

    #[test]
    fn empty_instance_gets_the_empty_assignment() {
        let d = Domain::new(vec![0, 1]).unwrap();
        let inst = Instance::new(d, vec![], vec![], vec![]).unwrap();
        let a = csp_search(&inst, None).unwrap().expect("trivially feasible");
        assert_eq!(a, Assignment::new());
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        assert!(matches!(
            csp_search(&neq_instance(), Some(1)),
            Err(SolveError::BudgetExceeded { budget: 1 })
        ));
    }

    #[test]
    fn repeated_scope_positions_must_agree() {
        // R(x, x) with R = {(0,1)} can never be satisfied
        let d = Domain::new(vec![0, 1]).unwrap();
        let r = Relation::new(2, vec![vec![0, 1]], &d).unwrap();
        let inst = Instance::new(
            d,
            vec!["x".into()],
            vec![1],
            vec![Constraint {
                name: "r".into(),
                scope: vec![0, 0],
                relation: r,
            }],
        )
        .unwrap();
        assert_eq!(csp_search(&inst, None).unwrap(), None);
    }
}
