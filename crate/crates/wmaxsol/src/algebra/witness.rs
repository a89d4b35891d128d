//! Backtracking search for a binary operation that is generalised
//! max-closed and preserves every relation of a language.

use super::{componentwise_max_tuple, AlgebraError};
use crate::model::{ConstraintLanguage, Operation};

pub const DEFAULT_WITNESS_BUDGET: u64 = 100_000_000;

// One invariance obligation: applying the candidate operation to the tuple
// pair (s, t) of relation `rel` must land inside `rel` again.
struct Obligation {
    rel: usize,
    s: usize,
    t: usize,
    // distinct table cells this obligation reads
    cells: Vec<usize>,
    unassigned: usize,
}

/// Searches for a generalised max-closed polymorphism of the language.
/// Returns the first witness in a fixed cell/value order, None when the
/// exhaustive search proves there is none, and BudgetExceeded when the
/// node budget (default 10^8 assignments) runs out first.
pub fn find_genmax_witness(
    lang: &ConstraintLanguage,
    budget: Option<u64>,
) -> Result<Option<Operation>, AlgebraError> {
    let budget = budget.unwrap_or(DEFAULT_WITNESS_BUDGET);
    let d = lang.domain();
    let elems = d.elements();
    let n = elems.len();

    // any generalised max-closed polymorphism forces the componentwise
    // maximum of each nonempty relation back into the relation
    for (_, r) in lang.relations() {
        if let Some(t_max) = componentwise_max_tuple(r) {
            if !r.contains(&t_max) {
                return Ok(None);
            }
        }
    }

    // cell (i, j) holds f(elems[i], elems[j]) at table index i * n + j;
    // assignment order keeps each off-diagonal cell adjacent to its mirror
    let mut order = Vec::with_capacity(n * n);
    for i in 0..n {
        order.push(i * n + i);
    }
    for i in 0..n {
        for j in i + 1..n {
            order.push(i * n + j);
            order.push(j * n + i);
        }
    }

    // candidate values per cell: the diagonal must not decrease
    let candidates: Vec<Vec<u64>> = (0..n * n)
        .map(|cell| {
            let i = cell / n;
            if cell % n == i {
                elems.iter().copied().filter(|&v| v >= elems[i]).collect()
            } else {
                elems.to_vec()
            }
        })
        .collect();

    let mut obligations = Vec::new();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n * n];
    for (rel_idx, (_, r)) in lang.relations().enumerate() {
        for s in 0..r.len() {
            for t in 0..r.len() {
                let mut cells: Vec<usize> = r.tuples()[s]
                    .iter()
                    .zip(&r.tuples()[t])
                    .map(|(&a, &b)| d.index_of(a).unwrap() * n + d.index_of(b).unwrap())
                    .collect();
                cells.sort_unstable();
                cells.dedup();
                let ob = Obligation {
                    rel: rel_idx,
                    s,
                    t,
                    unassigned: cells.len(),
                    cells,
                };
                for &c in &ob.cells {
                    watchers[c].push(obligations.len());
                }
                obligations.push(ob);
            }
        }
    }

    let rels: Vec<&crate::model::Relation> = lang.relations().map(|(_, r)| r).collect();
    let mut table: Vec<Option<u64>> = vec![None; n * n];
    let mut visits: u64 = 0;

    // checks the obligation against the (now fully assigned) cells it reads
    let check = |ob: &Obligation, table: &[Option<u64>]| -> bool {
        let r = rels[ob.rel];
        let image: Vec<u64> = r.tuples()[ob.s]
            .iter()
            .zip(&r.tuples()[ob.t])
            .map(|(&a, &b)| {
                let cell = d.index_of(a).unwrap() * n + d.index_of(b).unwrap();
                table[cell].expect("all cells of a completed obligation are assigned")
            })
            .collect();
        r.contains(&image)
    };

    // pair rule between f(a,b) and f(b,a) for a ≠ b
    let mirror_ok = |cell: usize, v: u64, table: &[Option<u64>]| -> bool {
        let (i, j) = (cell / n, cell % n);
        if i == j {
            return true;
        }
        let Some(w) = table[j * n + i] else { return true };
        let (a, b) = (elems[i], elems[j]);
        let (lo, hi) = (a.min(b), a.max(b));
        (v > lo || w > hi) && (w > lo || v > hi)
    };

    fn descend(
        depth: usize,
        order: &[usize],
        candidates: &[Vec<u64>],
        table: &mut Vec<Option<u64>>,
        obligations: &mut [Obligation],
        watchers: &[Vec<usize>],
        visits: &mut u64,
        budget: u64,
        check: &dyn Fn(&Obligation, &[Option<u64>]) -> bool,
        mirror_ok: &dyn Fn(usize, u64, &[Option<u64>]) -> bool,
    ) -> Result<bool, AlgebraError> {
        if depth == order.len() {
            return Ok(true);
        }
        let cell = order[depth];
        for &v in &candidates[cell] {
            *visits += 1;
            if *visits > budget {
                return Err(AlgebraError::BudgetExceeded { budget });
            }
            if !mirror_ok(cell, v, table) {
                continue;
            }
            table[cell] = Some(v);
            let mut ok = true;
            let mut completed = 0;
            for &ob_idx in &watchers[cell] {
                obligations[ob_idx].unassigned -= 1;
                completed += 1;
                if ok && obligations[ob_idx].unassigned == 0 && !check(&obligations[ob_idx], table)
                {
                    ok = false;
                }
            }
            if ok {
                match descend(
                    depth + 1,
                    order,
                    candidates,
                    table,
                    obligations,
                    watchers,
                    visits,
                    budget,
                    check,
                    mirror_ok,
                ) {
                    Ok(true) => return Ok(true),
                    Ok(false) => {}
                    Err(e) => {
                        for &ob_idx in watchers[cell].iter().take(completed) {
                            obligations[ob_idx].unassigned += 1;
                        }
                        table[cell] = None;
                        return Err(e);
                    }
                }
            }
            for &ob_idx in watchers[cell].iter().take(completed) {
                obligations[ob_idx].unassigned += 1;
            }
            table[cell] = None;
        }
        Ok(false)
    }

    let found = descend(
        0,
        &order,
        &candidates,
        &mut table,
        &mut obligations,
        &watchers,
        &mut visits,
        budget,
        &check,
        &mirror_ok,
    )?;
    if !found {
        return Ok(None);
    }
    let final_table: Vec<u64> = table.into_iter().map(|v| v.unwrap()).collect();
    Ok(Some(
        Operation::from_fn(d, 2, |t| {
            let i = d.index_of(t[0]).unwrap();
            let j = d.index_of(t[1]).unwrap();
            final_table[i * n + j]
        })
        .expect("witness table values come from the domain"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_polymorphism, is_polymorphism_lang, op_predicates};
    use crate::model::{Domain, Relation};

    fn dom(n: u64) -> Domain {
        Domain::new((0..n).collect()).unwrap()
    }

    fn lang(d: &Domain, rels: Vec<(&str, Relation)>) -> ConstraintLanguage {
        let mut l = ConstraintLanguage::new(d.clone());
        for (name, r) in rels {
            l.add_relation(name, r).unwrap();
        }
        l
    }

    /// All 16 binary tables over {0,1} that are generalised max-closed and
    /// preserve every relation, by brute enumeration.
    fn boolean_witnesses(l: &ConstraintLanguage) -> Vec<Operation> {
        let d = l.domain();
        let mut out = Vec::new();
        for code in 0..16u32 {
            let f = Operation::from_fn(d, 2, |t| {
                let bit = 2 * t[0] + t[1];
                ((code >> bit) & 1) as u64
            })
            .unwrap();
            if op_predicates(&f).is_generalised_max && is_polymorphism_lang(&f, l).unwrap() {
                out.push(f);
            }
        }
        out
    }

    #[test]
    fn boolean_disjunction_complement_has_no_witness() {
        let d = dom(2);
        let r = Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 0]], &d).unwrap();
        let l = lang(&d, vec![("R", r)]);
        assert!(boolean_witnesses(&l).is_empty());
        assert_eq!(find_genmax_witness(&l, None).unwrap(), None);
    }

    #[test]
    fn boolean_search_matches_enumeration() {
        let d = dom(2);
        let cases: Vec<Vec<Vec<u64>>> = vec![
            vec![vec![0, 0], vec![1, 1]],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![0, 1], vec![1, 0], vec![1, 1]],
            vec![vec![0, 0], vec![0, 1], vec![1, 1]],
            vec![vec![1, 0]],
        ];
        for tuples in cases {
            let r = Relation::new(2, tuples.clone(), &d).unwrap();
            let l = lang(&d, vec![("R", r)]);
            let by_enumeration = !boolean_witnesses(&l).is_empty();
            let by_search = find_genmax_witness(&l, None).unwrap().is_some();
            assert_eq!(by_search, by_enumeration, "disagreement on {tuples:?}");
        }
    }

    #[test]
    fn witness_for_a_non_max_closed_relation() {
        // Q is not preserved by max but admits another witness
        let d = dom(4);
        let q = Relation::new(
            2,
            vec![vec![0, 1], vec![1, 0], vec![2, 1], vec![2, 2], vec![2, 3]],
            &d,
        )
        .unwrap();
        let l = lang(&d, vec![("Q", q.clone())]);
        let max = Operation::from_fn(&d, 2, |t| t[0].max(t[1])).unwrap();
        assert!(!is_polymorphism(&max, &q).unwrap());
        let w = find_genmax_witness(&l, None).unwrap().expect("witness exists");
        assert!(op_predicates(&w).is_generalised_max);
        assert!(is_polymorphism(&w, &q).unwrap());
    }

    #[test]
    fn max_closed_language_yields_a_witness() {
        let d = dom(4);
        let r = Relation::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 2], vec![1, 2]], &d).unwrap();
        let l = lang(&d, vec![("R", r.clone())]);
        let w = find_genmax_witness(&l, None).unwrap().expect("witness exists");
        assert!(op_predicates(&w).is_generalised_max);
        assert!(is_polymorphism(&w, &r).unwrap());
    }

    #[test]
    fn missing_max_tuple_short_circuits() {
        // componentwise max (1,2) is absent, so no witness can exist
        let d = dom(3);
        let r = Relation::new(2, vec![vec![0, 2], vec![1, 1]], &d).unwrap();
        let l = lang(&d, vec![("R", r)]);
        assert_eq!(find_genmax_witness(&l, None).unwrap(), None);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let d = dom(4);
        let q = Relation::new(
            2,
            vec![vec![0, 1], vec![1, 0], vec![2, 1], vec![2, 2], vec![2, 3]],
            &d,
        )
        .unwrap();
        let l = lang(&d, vec![("Q", q)]);
        assert!(matches!(
            find_genmax_witness(&l, Some(3)),
            Err(AlgebraError::BudgetExceeded { budget: 3 })
        ));
    }

    #[test]
    fn empty_language_has_the_max_witness() {
        let d = dom(3);
        let l = ConstraintLanguage::new(d.clone());
        let w = find_genmax_witness(&l, None).unwrap().expect("witness exists");
        assert!(op_predicates(&w).is_generalised_max);
    }
}
