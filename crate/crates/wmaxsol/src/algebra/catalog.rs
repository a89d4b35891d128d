//! Catalog of the distinguished operations used by the classification over
//! languages containing all permutation relations: the switching operation,
//! both discriminators, near projections, and the missing-element operations.

use super::AlgebraError;
use crate::model::{Domain, Operation};

/// s(a, b, c) = c when a = b, b when a = c, and a otherwise.
pub fn switching(d: &Domain) -> Operation {
    Operation::from_fn(d, 3, |t| {
        if t[0] == t[1] {
            t[2]
        } else if t[0] == t[2] {
            t[1]
        } else {
            t[0]
        }
    })
    .expect("switching stays within the domain")
}

/// t(a, b, c) = c when a = b, and a otherwise.
pub fn discriminator(d: &Domain) -> Operation {
    Operation::from_fn(d, 3, |t| if t[0] == t[1] { t[2] } else { t[0] })
        .expect("discriminator stays within the domain")
}

/// d(a, b, c) = a when a = b, and c otherwise.
pub fn dual_discriminator(d: &Domain) -> Operation {
    Operation::from_fn(d, 3, |t| if t[0] == t[1] { t[0] } else { t[2] })
        .expect("dual discriminator stays within the domain")
}

/// The k-ary near projection: a_1 unless the arguments are pairwise
/// distinct, in which case a_k. Defined for 3 ≤ k ≤ |D|.
pub fn near_projection(d: &Domain, k: usize) -> Result<Operation, AlgebraError> {
    if k < 3 || k > d.len() {
        return Err(AlgebraError::InvalidArgument(format!(
            "near projection arity must lie in 3..={}, got {k}",
            d.len()
        )));
    }
    Ok(Operation::from_fn(d, k, |t| {
        if pairwise_distinct(t) {
            t[k - 1]
        } else {
            t[0]
        }
    })
    .expect("near projection stays within the domain"))
}

/// The (|D|−1)-ary operation returning the unique domain element absent
/// from the arguments when they are pairwise distinct, and a_1 otherwise.
/// Needs |D| ≥ 2; for |D| = 2 this is the unary swap.
pub fn complement_op(d: &Domain) -> Result<Operation, AlgebraError> {
    let n = d.len();
    if n < 2 {
        return Err(AlgebraError::InvalidArgument(
            "the missing-element operation needs at least two elements".into(),
        ));
    }
    Ok(Operation::from_fn(d, n - 1, |t| {
        if pairwise_distinct(t) {
            missing_element(d, t)
        } else {
            t[0]
        }
    })
    .expect("missing element stays within the domain"))
}

/// The (|D|−1)-ary operation acting as the dual discriminator on its first
/// three arguments unless the arguments are pairwise distinct, in which
/// case the absent element. Defined for |D| ≥ 4.
pub fn dual_discriminator_complement(d: &Domain) -> Result<Operation, AlgebraError> {
    let n = d.len();
    if n < 4 {
        return Err(AlgebraError::InvalidArgument(format!(
            "the extended dual discriminator needs at least four elements, got {n}"
        )));
    }
    Ok(Operation::from_fn(d, n - 1, |t| {
        if pairwise_distinct(t) {
            missing_element(d, t)
        } else if t[0] == t[1] {
            t[0]
        } else {
            t[2]
        }
    })
    .expect("extended dual discriminator stays within the domain"))
}

/// The ternary sums x + y + z over every exponent-two group structure on a
/// four-element domain. Empty for other domain sizes.
pub fn klein_sum_ops(d: &Domain) -> Vec<Operation> {
    if d.len() != 4 {
        return Vec::new();
    }
    super::enumerate_abelian_groups(d)
        .into_iter()
        .filter(|g| {
            d.elements()
                .iter()
                .all(|&a| g.add(a, a) == g.identity())
        })
        .map(|g| {
            Operation::from_fn(d, 3, |t| g.add(g.add(t[0], t[1]), t[2]))
                .expect("group sums stay within the carrier")
        })
        .collect()
}

/// Every catalog operation applicable to the given domain, in a fixed
/// order, keyed by a stable name.
pub fn named_ops(d: &Domain) -> Vec<(String, Operation)> {
    let mut out = vec![
        ("switching".to_string(), switching(d)),
        ("discriminator".to_string(), discriminator(d)),
        ("dual_discriminator".to_string(), dual_discriminator(d)),
    ];
    for k in 3..=d.len() {
        out.push((format!("near_projection_{k}"), near_projection(d, k).unwrap()));
    }
    if d.len() >= 2 {
        out.push(("complement".to_string(), complement_op(d).unwrap()));
    }
    if d.len() >= 4 {
        out.push((
            "dual_discriminator_complement".to_string(),
            dual_discriminator_complement(d).unwrap(),
        ));
    }
    for (i, op) in klein_sum_ops(d).into_iter().enumerate() {
        out.push((format!("klein_sum_{i}"), op));
    }
    out
}

fn pairwise_distinct(t: &[u64]) -> bool {
    t.iter()
        .enumerate()
        .all(|(i, a)| t[i + 1..].iter().all(|b| a != b))
}

fn missing_element(d: &Domain, t: &[u64]) -> u64 {
    *d.elements()
        .iter()
        .find(|e| !t.contains(e))
        .expect("n-1 distinct arguments leave exactly one element uncovered")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::op_predicates;

    fn dom(n: u64) -> Domain {
        Domain::new((0..n).collect()).unwrap()
    }

    #[test]
    fn discriminator_values() {
        let t = discriminator(&dom(3));
        assert_eq!(t.eval(&[1, 1, 2]), 2);
        assert_eq!(t.eval(&[0, 1, 2]), 0);
    }

    #[test]
    fn dual_discriminator_values() {
        let d = dual_discriminator(&dom(3));
        assert_eq!(d.eval(&[0, 1, 2]), 2);
        assert_eq!(d.eval(&[1, 1, 0]), 1);
        assert!(op_predicates(&d).is_majority);
    }

    #[test]
    fn switching_values() {
        let s = switching(&dom(3));
        assert_eq!(s.eval(&[0, 0, 2]), 2);
        assert_eq!(s.eval(&[1, 2, 1]), 2);
        assert_eq!(s.eval(&[0, 1, 2]), 0);
        assert_eq!(s.eval(&[2, 1, 1]), 2);
        assert!(op_predicates(&s).is_idempotent);
    }

    #[test]
    fn near_projection_values_and_range() {
        let d = dom(3);
        let l3 = near_projection(&d, 3).unwrap();
        assert_eq!(l3.eval(&[0, 0, 1]), 0);
        assert_eq!(l3.eval(&[0, 1, 2]), 2);
        assert!(near_projection(&d, 2).is_err());
        assert!(near_projection(&d, 4).is_err());
        assert!(near_projection(&dom(4), 4).is_ok());
    }

    #[test]
    fn complement_on_three_elements_is_doubled_sum() {
        // over {0,1,2} the binary missing-element op agrees with 2x + 2y mod 3
        let r3 = complement_op(&dom(3)).unwrap();
        assert_eq!(r3.arity(), 2);
        assert_eq!(r3.eval(&[0, 1]), 2);
        for x in 0..3u64 {
            for y in 0..3u64 {
                assert_eq!(r3.eval(&[x, y]), (2 * x + 2 * y) % 3);
            }
        }
    }

    #[test]
    fn complement_on_two_elements_is_the_swap() {
        let r2 = complement_op(&dom(2)).unwrap();
        assert_eq!(r2.arity(), 1);
        assert_eq!(r2.eval(&[0]), 1);
        assert_eq!(r2.eval(&[1]), 0);
    }

    #[test]
    fn complement_defaults_to_first_argument() {
        let r4 = complement_op(&dom(4)).unwrap();
        assert_eq!(r4.arity(), 3);
        assert_eq!(r4.eval(&[0, 1, 2]), 3);
        assert_eq!(r4.eval(&[2, 1, 2]), 2);
    }

    #[test]
    fn extended_dual_discriminator() {
        let d4 = dual_discriminator_complement(&dom(4)).unwrap();
        assert_eq!(d4.arity(), 3);
        assert_eq!(d4.eval(&[0, 1, 2]), 3);
        assert_eq!(d4.eval(&[1, 1, 3]), 1);
        assert_eq!(d4.eval(&[1, 3, 3]), 3);
        assert!(dual_discriminator_complement(&dom(3)).is_err());
    }

    #[test]
    fn klein_sums_exist_only_on_four_elements() {
        assert!(klein_sum_ops(&dom(3)).is_empty());
        let sums = klein_sum_ops(&dom(4));
        assert_eq!(sums.len(), 4);
        // the labeling with identity 0 satisfies 1 + 2 + 3 = 0
        assert!(sums.iter().any(|f| f.eval(&[1, 2, 3]) == 0));
        // x + y + z is a Mal'tsev operation for any of the group structures
        for f in &sums {
            assert!(op_predicates(f).is_maltsev);
        }
    }

    #[test]
    fn catalog_contents_track_domain_size() {
        let names = |n: u64| -> Vec<String> {
            named_ops(&dom(n)).into_iter().map(|(s, _)| s).collect()
        };
        assert_eq!(
            names(2),
            ["switching", "discriminator", "dual_discriminator", "complement"]
        );
        assert_eq!(
            names(3),
            [
                "switching",
                "discriminator",
                "dual_discriminator",
                "near_projection_3",
                "complement"
            ]
        );
        assert!(names(4).contains(&"dual_discriminator_complement".to_string()));
        assert!(names(4).contains(&"klein_sum_3".to_string()));
    }
}
