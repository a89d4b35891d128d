//! Approximation for instances whose relations are cosets: Gaussian
//! elimination over the prime-field coordinates gives exact solution-set
//! marginals, and fixing variables greedily by conditional expectation
//! derandomizes the uniform random solution.

use num::{BigInt, BigRational, One, Zero};

use super::{SolveError, SolveResult, SolveStatus};
use crate::algebra::{
    self, coset_to_linear_system, group_coords, is_polymorphism, AbelianGroup, GroupCoords,
};
use crate::model::{Domain, Instance};

/// Exact structure of the solution set of a coset-constrained instance.
#[derive(Debug, Clone)]
pub struct AffineAnalysis {
    pub satisfiable: bool,
    /// Sorted support of each variable's solution-set marginal. The
    /// distribution is uniform on the support. Empty when unsatisfiable.
    pub marginals: Vec<Vec<u64>>,
    /// Expected measure of a uniformly random solution, exactly.
    pub expected: BigRational,
}

impl AffineAnalysis {
    fn unsatisfiable() -> Self {
        AffineAnalysis {
            satisfiable: false,
            marginals: Vec::new(),
            expected: BigRational::zero(),
        }
    }
}

// Global linear system over Z_p: constraint-local coset rows expanded onto
// per-variable coordinate blocks. None when a constraint relation is empty.
fn global_rows(
    instance: &Instance,
    g: &AbelianGroup,
    coords: &GroupCoords,
) -> Result<Option<Vec<(Vec<u64>, u64)>>, SolveError> {
    let dim = coords.dim;
    let p = coords.p;
    let ncols = instance.variables().len() * dim;
    let mut rows = Vec::new();
    for c in instance.constraints() {
        if c.relation.is_empty() {
            return Ok(None);
        }
        if !is_polymorphism(&g.affine_op(), &c.relation)? {
            return Err(SolveError::InvalidCertificate(format!(
                "relation {:?} is not closed under x - y + z",
                c.name
            )));
        }
        let local = coset_to_linear_system(&c.relation, g)?;
        for (coef, rhs) in &local.rows {
            let mut row = vec![0u64; ncols];
            for (k, &var) in c.scope.iter().enumerate() {
                for d in 0..dim {
                    let col = var * dim + d;
                    // repeated scope variables accumulate coefficients
                    row[col] = (row[col] + coef[k * dim + d]) % p;
                }
            }
            rows.push((row, *rhs));
        }
    }
    Ok(Some(rows))
}

// Marginal support of one variable: project the nullspace basis onto the
// variable's coordinate block, enumerate that subspace shifted by the
// particular solution, and map coordinate vectors back to elements.
fn marginal_support(
    var: usize,
    particular: &[u64],
    basis: &[Vec<u64>],
    coords: &GroupCoords,
) -> Vec<u64> {
    let dim = coords.dim;
    let p = coords.p;
    let block = |v: &[u64]| -> Vec<u64> { v[var * dim..(var + 1) * dim].to_vec() };
    let mut projected: Vec<Vec<u64>> = basis.iter().map(|b| block(b)).collect();
    algebra::row_reduce(&mut projected, p);
    let rank = projected.len();
    let base = block(particular);
    let mut support = std::collections::BTreeSet::new();
    let mut combo = vec![0u64; rank];
    loop {
        let mut point = base.clone();
        for (c, b) in combo.iter().zip(&projected) {
            for (x, &bv) in point.iter_mut().zip(b) {
                *x = (*x + c * bv) % p;
            }
        }
        support.insert(coords.element_at(&point));
        let mut pos = rank;
        loop {
            if pos == 0 {
                return support.into_iter().collect();
            }
            pos -= 1;
            combo[pos] += 1;
            if combo[pos] < p {
                break;
            }
            combo[pos] = 0;
        }
    }
}

fn expected_of(marginals: &[Vec<u64>], weights: &[u64]) -> BigRational {
    let mut total = BigRational::zero();
    for (support, &w) in marginals.iter().zip(weights) {
        let sum: u64 = support.iter().sum();
        let mean = BigRational::new(BigInt::from(sum), BigInt::from(support.len() as u64));
        total += BigRational::from(BigInt::from(w)) * mean;
    }
    total
}

fn analyze_rows(
    instance: &Instance,
    coords: &GroupCoords,
    rows: &[(Vec<u64>, u64)],
) -> AffineAnalysis {
    let nvars = instance.variables().len();
    let ncols = nvars * coords.dim;
    let Some((particular, basis)) = algebra::solve_linear(rows, ncols, coords.p) else {
        return AffineAnalysis::unsatisfiable();
    };
    let marginals: Vec<Vec<u64>> = (0..nvars)
        .map(|v| marginal_support(v, &particular, &basis, coords))
        .collect();
    let expected = expected_of(&marginals, instance.weights());
    AffineAnalysis {
        satisfiable: true,
        marginals,
        expected,
    }
}

/// Solution-set marginals and expected measure of an instance whose
/// relations are all invariant under x − y + z over `g`.
pub fn analyze_affine(instance: &Instance, g: &AbelianGroup) -> Result<AffineAnalysis, SolveError> {
    if instance.domain() != g.carrier() {
        return Err(SolveError::InvalidCertificate(
            "group carrier differs from the instance domain".into(),
        ));
    }
    let coords = group_coords(g)?;
    match global_rows(instance, g, &coords)? {
        None => Ok(AffineAnalysis::unsatisfiable()),
        Some(rows) => Ok(analyze_rows(instance, &coords, &rows)),
    }
}

fn pin_rows(var: usize, value: u64, coords: &GroupCoords, ncols: usize) -> Vec<(Vec<u64>, u64)> {
    let dim = coords.dim;
    coords
        .coords_of(value)
        .iter()
        .enumerate()
        .map(|(d, &rhs)| {
            let mut row = vec![0u64; ncols];
            row[var * dim + d] = 1;
            (row, rhs)
        })
        .collect()
}

/// E_min: the least possible mean of a solution-set marginal with more
/// than one value, attained by the two smallest domain elements.
fn least_pair_mean(d: &Domain) -> BigRational {
    let e = d.elements();
    BigRational::new(BigInt::from(e[0] + e[1]), BigInt::from(2u32))
}

/// Derandomized conditional-expectation solver for coset-constrained
/// instances. FEASIBLE with guarantee E_min/max(D); OPTIMAL when the
/// system determines every variable outright.
pub fn solve_affine(instance: &Instance, g: &AbelianGroup) -> Result<SolveResult, SolveError> {
    if instance.domain() != g.carrier() {
        return Err(SolveError::InvalidCertificate(
            "group carrier differs from the instance domain".into(),
        ));
    }
    let coords = group_coords(g)?;
    let Some(base_rows) = global_rows(instance, g, &coords)? else {
        return Ok(SolveResult::infeasible());
    };
    let initial = analyze_rows(instance, &coords, &base_rows);
    if !initial.satisfiable {
        return Ok(SolveResult::infeasible());
    }
    let nvars = instance.variables().len();
    let ncols = nvars * coords.dim;
    let mut rows = base_rows;
    let mut current = initial.clone();
    let mut values = Vec::with_capacity(nvars);
    for var in 0..nvars {
        let mut best: Option<(u64, AffineAnalysis, Vec<(Vec<u64>, u64)>)> = None;
        for &v in &current.marginals[var] {
            let mut candidate_rows = rows.clone();
            candidate_rows.extend(pin_rows(var, v, &coords, ncols));
            let analysis = analyze_rows(instance, &coords, &candidate_rows);
            assert!(
                analysis.satisfiable,
                "pinning a marginal value keeps the system consistent"
            );
            // values ascend, so strict improvement keeps the smallest maximizer
            let improves = match &best {
                Some((_, b, _)) => analysis.expected > b.expected,
                None => true,
            };
            if improves {
                best = Some((v, analysis, candidate_rows));
            }
        }
        let (v, analysis, new_rows) = best.expect("marginal supports are nonempty");
        // fixing the best value never lowers the conditional expectation
        assert!(
            analysis.expected >= current.expected,
            "conditional expectation must not decrease"
        );
        values.push(v);
        rows = new_rows;
        current = analysis;
    }
    let result = SolveResult::solved(
        if initial.marginals.iter().all(|m| m.len() == 1) {
            SolveStatus::Optimal
        } else {
            SolveStatus::Feasible
        },
        instance,
        &values,
    );
    let final_measure = result.measure.clone().expect("solved results carry a measure");
    assert!(
        BigRational::from(BigInt::from(final_measure)) == current.expected,
        "a fully pinned system has integral expectation equal to the measure"
    );
    let guarantee = if instance.domain().len() < 2 || result.status == SolveStatus::Optimal {
        BigRational::one()
    } else {
        least_pair_mean(instance.domain())
            / BigRational::from(BigInt::from(instance.domain().max_element()))
    };
    Ok(result.with_guarantee(guarantee))
}
