//! Approximation for languages with a two-semilattice polymorphism on a
//! domain containing 0: identify the variables forced to 0 in every
//! solution, exclude 0 everywhere else, and solve the augmented instance.

use num::{BigInt, BigRational, One};

use super::{csp_search, SolveError, SolveResult, SolveStatus};
use crate::algebra::{is_polymorphism, op_predicates};
use crate::model::{Constraint, Instance, Operation, Relation};

/// Approximate solver for a two-semilattice polymorphism f. Requires 0 in
/// the domain; the caller asserts f's least absorbed element is positive
/// (the hypothesis that makes the zero-free combination feasible).
///
/// Returns FEASIBLE with guarantee p/max(D), where p is the second-least
/// domain element: every variable that can be nonzero in some solution is
/// nonzero in the returned one.
pub fn solve_2semilattice(
    instance: &Instance,
    f: &Operation,
    budget: Option<u64>,
) -> Result<SolveResult, SolveError> {
    let d = instance.domain();
    if f.domain() != d {
        return Err(SolveError::InvalidCertificate(
            "operation domain differs from the instance domain".into(),
        ));
    }
    if !op_predicates(f).is_two_semilattice {
        return Err(SolveError::InvalidCertificate(
            "operation is not a two-semilattice".into(),
        ));
    }
    if !d.contains(0) {
        return Err(SolveError::NotApplicable(
            "the zero-exclusion construction needs 0 in the domain".into(),
        ));
    }
    for c in instance.constraints() {
        if !is_polymorphism(f, &c.relation)? {
            return Err(SolveError::InvalidCertificate(format!(
                "operation does not preserve relation {:?}",
                c.name
            )));
        }
    }
    let nonzero: Vec<Vec<u64>> = d
        .elements()
        .iter()
        .filter(|&&e| e != 0)
        .map(|&e| vec![e])
        .collect();
    let u = Relation::new(1, nonzero, d).expect("nonzero elements are in the domain");
    if !is_polymorphism(f, &u)? {
        return Err(SolveError::InvalidCertificate(
            "operation does not preserve the nonzero unary relation".into(),
        ));
    }

    if csp_search(instance, budget)?.is_none() {
        return Ok(SolveResult::infeasible());
    }

    let with_u_on = |vars: &[usize]| -> Instance {
        let mut cons = instance.constraints().to_vec();
        for &v in vars {
            cons.push(Constraint {
                name: format!("nonzero_{v}"),
                scope: vec![v],
                relation: u.clone(),
            });
        }
        instance
            .with_constraints(cons)
            .expect("unary constraints keep scopes valid")
    };

    // a variable is forced to zero exactly when excluding zero on it alone
    // kills satisfiability
    let mut unforced = Vec::new();
    for v in 0..instance.variables().len() {
        if csp_search(&with_u_on(&[v]), budget)?.is_some() {
            unforced.push(v);
        }
    }
    let augmented = with_u_on(&unforced);
    let Some(a) = csp_search(&augmented, budget)? else {
        return Err(SolveError::InternalError(
            "zero-free combination infeasible although each variable is separately nonzero"
                .into(),
        ));
    };
    let values = a.values_for(instance)?;
    let guarantee = if d.len() < 2 {
        BigRational::one()
    } else {
        BigRational::new(
            BigInt::from(d.elements()[1]),
            BigInt::from(d.max_element()),
        )
    };
    Ok(SolveResult::solved(SolveStatus::Feasible, instance, &values).with_guarantee(guarantee))
}
