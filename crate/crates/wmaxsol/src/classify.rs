//! Approximability buckets for constraint languages generated by a single
//! operation and for languages containing every permutation relation, plus
//! solver dispatch for concrete languages. Every definite bucket carries a
//! certificate that re-verifies against the algebra predicates.

use crate::algebra::{
    self, enumerate_abelian_groups, find_genmax_witness, is_affine_for, is_polymorphism_lang,
    iterate, named_ops, op_predicates, AbelianGroup, AlgebraError,
};
use crate::model::{ConstraintLanguage, Operation, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("internal error: {0}")]
    InternalError(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Approximability bucket of a weighted maximum-solution problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bucket {
    /// Solvable to optimality in polynomial time.
    Po,
    ApxComplete,
    PolyApxComplete,
    /// Finding any solution with non-zero measure is NP-hard.
    NzNpHard,
    /// Finding any feasible solution is NP-hard.
    FeasNpHard,
    Unknown,
}

impl std::fmt::Display for Bucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Bucket::Po => "PO",
            Bucket::ApxComplete => "APX-complete",
            Bucket::PolyApxComplete => "poly-APX-complete",
            Bucket::NzNpHard => "NZ-NP-hard",
            Bucket::FeasNpHard => "FEAS-NP-hard",
            Bucket::Unknown => "UNKNOWN",
        };
        f.write_str(s)
    }
}

/// Machine-checkable evidence for a classification or dispatch decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Unary operation sending every element to `value`.
    Constant { op: Operation, value: u64 },
    /// Ternary operation satisfying the majority identities.
    Majority { op: Operation },
    /// Ternary operation equal to x - y + z over the recorded group.
    Affine { op: Operation, group: AbelianGroup },
    /// Binary operation equal to ((p+1)/2)(x + y) mod p once the domain is
    /// renamed by `labeling` (element at domain index i maps to labeling[i]).
    FieldMean {
        op: Operation,
        labeling: Vec<u64>,
        prime: u64,
    },
    /// a < b, f(a, b) = a, and a is the least element in any such pair.
    BadPair { op: Operation, a: u64, b: u64 },
    /// Iterating the original operation |D| times yields a witness that
    /// satisfies the generalised max conditions.
    GeneralisedMax {
        original: Operation,
        witness: Operation,
    },
    /// The operation fails all four family tests (unary constant, majority,
    /// ternary affine, binary commutative idempotent).
    OutsideFamilies { op: Operation },
    /// Catalog polymorphism signature of a language containing every
    /// permutation relation, together with the lattice node it selects.
    Homogeneous {
        language: ConstraintLanguage,
        node: String,
        signature: Vec<(String, bool)>,
    },
    /// The named operation is a polymorphism of every relation.
    Polymorphism {
        name: String,
        op: Operation,
        language: ConstraintLanguage,
    },
    /// The operation satisfies the generalised max conditions and is a
    /// polymorphism of every relation.
    GenMaxPolymorphism {
        op: Operation,
        language: ConstraintLanguage,
    },
    /// x - y + z over the recorded group is a polymorphism of every relation.
    AffinePolymorphism {
        group: AbelianGroup,
        language: ConstraintLanguage,
    },
}

impl Certificate {
    /// Re-checks the claim against the algebra predicates from scratch.
    pub fn verify(&self) -> Result<bool, ClassifyError> {
        match self {
            Certificate::Constant { op, value } => Ok(op.arity() == 1
                && op.domain().contains(*value)
                && op
                    .domain()
                    .elements()
                    .iter()
                    .all(|&x| op.eval(&[x]) == *value)),
            Certificate::Majority { op } => {
                Ok(op.arity() == 3 && op_predicates(op).is_majority)
            }
            Certificate::Affine { op, group } => {
                Ok(op.arity() == 3 && op.domain() == group.carrier() && is_affine_for(op, group))
            }
            Certificate::FieldMean {
                op,
                labeling,
                prime,
            } => Ok(field_mean_matches(op, labeling, *prime)),
            Certificate::BadPair { op, a, b } => {
                let preds = op_predicates(op);
                let shape = op.arity() == 2
                    && preds.is_commutative
                    && preds.is_idempotent
                    && a < b
                    && op.eval(&[*a, *b]) == *a;
                let minimal = bad_pairs(op)
                    .first()
                    .map(|&(least, _)| least == *a)
                    .unwrap_or(false);
                Ok(shape && minimal)
            }
            Certificate::GeneralisedMax { original, witness } => {
                let n = original.domain().len() as u32;
                let iterated = iterate(original, n)?;
                Ok(iterated == *witness && op_predicates(witness).is_generalised_max)
            }
            Certificate::OutsideFamilies { op } => Ok(!in_any_family(op)),
            Certificate::Homogeneous {
                language,
                node,
                signature,
            } => {
                if !permutation_relations_present(language) {
                    return Ok(false);
                }
                let fresh = catalog_signature(language)?;
                if fresh != *signature {
                    return Ok(false);
                }
                let (_, fresh_node) = signature_bucket(language, &fresh)?;
                Ok(fresh_node == *node)
            }
            Certificate::Polymorphism { op, language, .. } => {
                Ok(is_polymorphism_lang(op, language)?)
            }
            Certificate::GenMaxPolymorphism { op, language } => {
                Ok(op_predicates(op).is_generalised_max && is_polymorphism_lang(op, language)?)
            }
            Certificate::AffinePolymorphism { group, language } => {
                Ok(is_polymorphism_lang(&group.affine_op(), language)?)
            }
        }
    }
}

/// Outcome of a classification: the bucket, evidence, and caveats. The
/// certificate is absent exactly when the bucket is UNKNOWN.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub bucket: Bucket,
    pub certificate: Option<Certificate>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MaximalOptions {
    /// Caller asserts the invariant clone of the operation is maximal; this
    /// unlocks the feasibility-NP-hard fallback for out-of-family operations.
    pub assume_maximal: bool,
    /// Caller accepts buckets that are conditional on Szczepara's conjecture
    /// (binary commutative idempotent operations over more than four
    /// elements).
    pub assume_szczepara: bool,
}

const CLOSURE_NOTE: &str =
    "assumes a language whose expressive closure is exactly the relations invariant under the operation";
const CONJECTURE_NOTE: &str =
    "conditional on Szczepara's conjecture; unverified for domains with more than four elements";

/// Buckets the problem generated by a single operation: unary constants,
/// majority operations, ternary group differences, and binary commutative
/// idempotent operations. Out-of-family inputs are rejected unless the
/// caller asserts maximality, which turns them into the feasibility-hard
/// fallback.
pub fn classify_maximal(
    f: &Operation,
    options: MaximalOptions,
) -> Result<ClassificationReport, ClassifyError> {
    let d = f.domain();
    let n = d.len();
    let preds = op_predicates(f);
    let zero = d.contains(0);
    let report = |bucket, certificate, mut notes: Vec<String>| {
        notes.insert(0, CLOSURE_NOTE.to_string());
        Ok(ClassificationReport {
            bucket,
            certificate,
            notes,
        })
    };

    if f.arity() == 1 && preds.is_constant {
        let value = f.eval(&[d.elements()[0]]);
        let cert = Certificate::Constant { op: f.clone(), value };
        let bucket = if value == d.max_element() {
            Bucket::Po
        } else if value == 0 {
            Bucket::NzNpHard
        } else {
            Bucket::ApxComplete
        };
        return report(bucket, Some(cert), Vec::new());
    }

    if f.arity() == 3 && preds.is_majority {
        let bucket = if zero {
            Bucket::PolyApxComplete
        } else {
            Bucket::ApxComplete
        };
        return report(bucket, Some(Certificate::Majority { op: f.clone() }), Vec::new());
    }

    if f.arity() == 3 {
        if let Some(group) = affine_group_of(f) {
            return report(
                Bucket::ApxComplete,
                Some(Certificate::Affine { op: f.clone(), group }),
                Vec::new(),
            );
        }
    }

    if f.arity() == 2 && preds.is_commutative && preds.is_idempotent {
        if let Some((labeling, prime)) = field_mean_labeling(f) {
            return report(
                Bucket::ApxComplete,
                Some(Certificate::FieldMean {
                    op: f.clone(),
                    labeling,
                    prime,
                }),
                Vec::new(),
            );
        }

        let pairs = bad_pairs(f);
        if let Some(&(a, b)) = pairs.first() {
            let bucket = if a == 0 {
                Bucket::PolyApxComplete
            } else {
                Bucket::ApxComplete
            };
            let cert = Certificate::BadPair { op: f.clone(), a, b };
            if n <= 4 {
                return report(bucket, Some(cert), Vec::new());
            }
            if options.assume_szczepara {
                return report(bucket, Some(cert), vec![CONJECTURE_NOTE.to_string()]);
            }
            return report(
                Bucket::Unknown,
                None,
                vec![
                    "binary commutative idempotent operations over more than four elements are only classified under Szczepara's conjecture; set assume_szczepara to obtain the conditional bucket".to_string(),
                ],
            );
        }

        // No pair a < b with f(a, b) = a: the |D|-th iterate must act as a
        // generalised max operation whenever the invariant clone is maximal.
        let witness = iterate(f, n as u32)?;
        if op_predicates(&witness).is_generalised_max {
            return report(
                Bucket::Po,
                Some(Certificate::GeneralisedMax {
                    original: f.clone(),
                    witness,
                }),
                Vec::new(),
            );
        }
        if n <= 4 || options.assume_szczepara {
            return Err(ClassifyError::InternalError(
                "the iterated operation is not generalised max even though no pair a < b has f(a, b) = a; the invariant clone of the input cannot be maximal".to_string(),
            ));
        }
        return report(
            Bucket::Unknown,
            None,
            vec![
                "no pair a < b has f(a, b) = a, but the iterated operation is not generalised max; over more than four elements this is unresolved without Szczepara's conjecture".to_string(),
            ],
        );
    }

    if options.assume_maximal {
        return report(
            Bucket::FeasNpHard,
            Some(Certificate::OutsideFamilies { op: f.clone() }),
            vec!["the operation is outside every tractable family, so with a maximal invariant clone even feasibility is NP-hard".to_string()],
        );
    }
    Err(ClassifyError::NotApplicable(
        "the operation is not a unary constant, majority, ternary group difference, or binary commutative idempotent operation; pass assume_maximal to obtain the feasibility-hard fallback"
            .to_string(),
    ))
}

/// Buckets a language that contains every permutation relation on its
/// domain, by matching its catalog polymorphism signature against the
/// lattice of such languages.
pub fn classify_homogeneous(
    lang: &ConstraintLanguage,
) -> Result<ClassificationReport, ClassifyError> {
    let d = lang.domain();
    if d.len() < 2 {
        return Err(ClassifyError::NotApplicable(
            "the permutation-relation lattice needs at least two elements".to_string(),
        ));
    }
    if !permutation_relations_present(lang) {
        return Err(ClassifyError::NotApplicable(
            "the language does not contain every permutation relation on its domain".to_string(),
        ));
    }
    let signature = catalog_signature(lang)?;
    let (bucket, node) = signature_bucket(lang, &signature)?;
    Ok(ClassificationReport {
        bucket,
        certificate: Some(Certificate::Homogeneous {
            language: lang.clone(),
            node,
            signature,
        }),
        notes: Vec::new(),
    })
}

/// Solver selected by `detect_tractable`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    Injective,
    GenMax,
    Affine,
}

impl std::fmt::Display for SolverTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverTag::Injective => "INJECTIVE",
            SolverTag::GenMax => "GENMAX",
            SolverTag::Affine => "AFFINE",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TractableReport {
    pub dispatch: Option<(SolverTag, Certificate)>,
    pub notes: Vec<String>,
}

/// Picks the first applicable exact solver for the language: the injective
/// solver when the discriminator is a polymorphism, then the generalised
/// max solver when a witness exists, then the group solver when some
/// enumerated x - y + z is a polymorphism. A witness search that runs out
/// of budget is reported as a note, not a failure.
pub fn detect_tractable(
    lang: &ConstraintLanguage,
    witness_budget: Option<u64>,
) -> Result<TractableReport, ClassifyError> {
    let d = lang.domain();
    let mut notes = Vec::new();

    let t = algebra::discriminator(d);
    if is_polymorphism_lang(&t, lang)? {
        return Ok(TractableReport {
            dispatch: Some((
                SolverTag::Injective,
                Certificate::Polymorphism {
                    name: "discriminator".to_string(),
                    op: t,
                    language: lang.clone(),
                },
            )),
            notes,
        });
    }

    match find_genmax_witness(lang, witness_budget) {
        Ok(Some(witness)) => {
            return Ok(TractableReport {
                dispatch: Some((
                    SolverTag::GenMax,
                    Certificate::GenMaxPolymorphism {
                        op: witness,
                        language: lang.clone(),
                    },
                )),
                notes,
            });
        }
        Ok(None) => {}
        Err(AlgebraError::BudgetExceeded { budget }) => {
            notes.push(format!(
                "generalised max witness search gave up after {budget} visited nodes"
            ));
        }
        Err(e) => return Err(e.into()),
    }

    for group in enumerate_abelian_groups(d) {
        if is_polymorphism_lang(&group.affine_op(), lang)? {
            return Ok(TractableReport {
                dispatch: Some((
                    SolverTag::Affine,
                    Certificate::AffinePolymorphism {
                        group,
                        language: lang.clone(),
                    },
                )),
                notes,
            });
        }
    }

    Ok(TractableReport {
        dispatch: None,
        notes,
    })
}

fn affine_group_of(f: &Operation) -> Option<AbelianGroup> {
    enumerate_abelian_groups(f.domain())
        .into_iter()
        .find(|g| is_affine_for(f, g))
}

fn in_any_family(f: &Operation) -> bool {
    let preds = op_predicates(f);
    (f.arity() == 1 && preds.is_constant)
        || (f.arity() == 3 && preds.is_majority)
        || (f.arity() == 3 && affine_group_of(f).is_some())
        || (f.arity() == 2 && preds.is_commutative && preds.is_idempotent)
}

/// Pairs a < b with f(a, b) = a, sorted ascending.
fn bad_pairs(f: &Operation) -> Vec<(u64, u64)> {
    if f.arity() != 2 {
        return Vec::new();
    }
    let elements = f.domain().elements();
    let mut out = Vec::new();
    for (i, &a) in elements.iter().enumerate() {
        for &b in &elements[i + 1..] {
            if f.eval(&[a, b]) == a {
                out.push((a, b));
            }
        }
    }
    out
}

/// Searches for a renaming of the domain onto 0..p under which f becomes
/// ((p+1)/2)(x + y) mod p. Only prime domain sizes above two qualify.
fn field_mean_labeling(f: &Operation) -> Option<(Vec<u64>, u64)> {
    let d = f.domain();
    let n = d.len() as u64;
    if f.arity() != 2 || n <= 2 || !algebra::is_prime(n) {
        return None;
    }
    for perm in algebra::lexicographic_permutations(d.len()) {
        let labeling: Vec<u64> = perm.iter().map(|&i| i as u64).collect();
        if field_mean_matches(f, &labeling, n) {
            return Some((labeling, n));
        }
    }
    None
}

fn field_mean_matches(f: &Operation, labeling: &[u64], prime: u64) -> bool {
    let d = f.domain();
    let n = d.len() as u64;
    if f.arity() != 2 || n != prime || prime <= 2 || !algebra::is_prime(prime) {
        return false;
    }
    if labeling.len() != d.len() {
        return false;
    }
    let mut seen = vec![false; d.len()];
    for &v in labeling {
        if v >= prime || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    let half = (prime + 1) / 2;
    let elements = d.elements();
    let value_of = |e: u64| labeling[d.index_of(e).expect("element of the same domain")];
    let element_at = |v: u64| {
        let idx = labeling.iter().position(|&w| w == v).expect("labeling is a bijection");
        elements[idx]
    };
    for &x in elements {
        for &y in elements {
            let expected = element_at(half * (value_of(x) + value_of(y)) % prime);
            if f.eval(&[x, y]) != expected {
                return false;
            }
        }
    }
    true
}

fn permutation_relations_present(lang: &ConstraintLanguage) -> bool {
    let d = lang.domain();
    let elements = d.elements();
    for perm in algebra::lexicographic_permutations(d.len()) {
        let tuples: Vec<Vec<u64>> = elements
            .iter()
            .enumerate()
            .map(|(i, &e)| vec![e, elements[perm[i]]])
            .collect();
        let graph = Relation::new(2, tuples, d).expect("permutation graphs are valid relations");
        if !lang.relations().any(|(_, r)| *r == graph) {
            return false;
        }
    }
    true
}

/// Which catalog operations are polymorphisms of every relation.
fn catalog_signature(lang: &ConstraintLanguage) -> Result<Vec<(String, bool)>, ClassifyError> {
    let mut out = Vec::new();
    for (name, op) in named_ops(lang.domain()) {
        let holds = is_polymorphism_lang(&op, lang)?;
        out.push((name, holds));
    }
    Ok(out)
}

/// Maps a catalog signature to its bucket and lattice node. The tree is
/// exhaustive for languages containing every permutation relation; the
/// consistency checks surface transcription bugs as internal errors.
fn signature_bucket(
    lang: &ConstraintLanguage,
    signature: &[(String, bool)],
) -> Result<(Bucket, String), ClassifyError> {
    let d = lang.domain();
    let n = d.len();
    let zero = d.contains(0);
    let has = |name: &str| {
        signature
            .iter()
            .any(|(entry, holds)| entry == name && *holds)
    };

    let disc = has("discriminator");
    let dual = has("dual_discriminator");
    let swit = has("switching");
    let comp = has("complement");
    let dualcomp = has("dual_discriminator_complement");
    let klein = signature
        .iter()
        .any(|(entry, holds)| entry.starts_with("klein_sum_") && *holds);
    // The least i in 2..=n-1 whose near projection l_{i+1} is a polymorphism.
    let near = (2..n).find(|i| has(&format!("near_projection_{}", i + 1)));

    if disc && !dual {
        return Err(ClassifyError::InternalError(
            "the discriminator is a polymorphism but the dual discriminator is not; no lattice node has that signature".to_string(),
        ));
    }
    if dualcomp && !dual {
        return Err(ClassifyError::InternalError(
            "the dual discriminator complement is a polymorphism but the dual discriminator is not; no lattice node has that signature".to_string(),
        ));
    }

    if disc {
        let node = if comp { "D^1_1" } else { "D^0_1" };
        return Ok((Bucket::Po, node.to_string()));
    }
    if dual {
        let j = near.unwrap_or(n);
        let node = if j == n {
            if dualcomp {
                format!("D^1_{n}")
            } else {
                format!("D^0_{n}")
            }
        } else if comp && j + 2 <= n {
            format!("D^1_{j}")
        } else {
            format!("D^0_{j}")
        };
        let bucket = if zero {
            Bucket::PolyApxComplete
        } else {
            Bucket::ApxComplete
        };
        return Ok((bucket, node));
    }
    if swit {
        let node = if n != 3 && comp { "E^1_1" } else { "E^0_1" };
        return Ok((Bucket::ApxComplete, node.to_string()));
    }
    if n == 3 && comp {
        return Ok((Bucket::ApxComplete, "Inv(r_3)".to_string()));
    }
    if n == 4 && klein {
        return Ok((Bucket::ApxComplete, "Inv(x+y+z)".to_string()));
    }
    let node = if n == 2 && comp {
        "Inv(r_2)".to_string()
    } else {
        match near {
            Some(j) if comp && j + 3 <= n => format!("E^1_{j}"),
            Some(j) => format!("E^0_{j}"),
            None if comp && n >= 4 => format!("E^1_{}", n - 2),
            None => format!("E^0_{n}"),
        }
    };
    Ok((Bucket::FeasNpHard, node))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain;

    fn domain(elements: &[u64]) -> Domain {
        Domain::new(elements.to_vec()).unwrap()
    }

    fn binary(d: &Domain, f: impl FnMut(&[u64]) -> u64) -> Operation {
        Operation::from_fn(d, 2, f).unwrap()
    }

    fn verify(report: &ClassificationReport) {
        let cert = report
            .certificate
            .as_ref()
            .expect("definite buckets carry certificates");
        assert!(cert.verify().unwrap(), "certificate failed: {cert:?}");
    }

    fn perm_language(d: &Domain) -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::new(d.clone());
        let elements = d.elements();
        for (i, perm) in algebra::lexicographic_permutations(d.len()).into_iter().enumerate() {
            let tuples: Vec<Vec<u64>> = elements
                .iter()
                .enumerate()
                .map(|(k, &e)| vec![e, elements[perm[k]]])
                .collect();
            lang.add_relation(&format!("perm{i}"), Relation::new(2, tuples, d).unwrap())
                .unwrap();
        }
        lang
    }

    #[test]
    fn constant_to_top_is_tractable() {
        let d = domain(&[0, 1, 2]);
        let f = Operation::from_fn(&d, 1, |_| 2).unwrap();
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::Po);
        verify(&report);
    }

    #[test]
    fn constant_zero_blocks_nonzero_measure() {
        let d = domain(&[0, 1, 2]);
        let f = Operation::from_fn(&d, 1, |_| 0).unwrap();
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::NzNpHard);
        verify(&report);
    }

    #[test]
    fn interior_constant_is_apx() {
        let d = domain(&[0, 1, 2]);
        let f = Operation::from_fn(&d, 1, |_| 1).unwrap();
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        verify(&report);
    }

    #[test]
    fn majority_splits_on_zero() {
        let with_zero = domain(&[0, 1]);
        let report = classify_maximal(
            &algebra::dual_discriminator(&with_zero),
            MaximalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.bucket, Bucket::PolyApxComplete);
        verify(&report);

        let without_zero = domain(&[1, 2]);
        let report = classify_maximal(
            &algebra::dual_discriminator(&without_zero),
            MaximalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        verify(&report);
    }

    #[test]
    fn group_difference_is_apx() {
        let d = domain(&[0, 1, 2]);
        let group = enumerate_abelian_groups(&d)
            .into_iter()
            .find(|g| g.identity() == 0)
            .unwrap();
        let report = classify_maximal(&group.affine_op(), MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        assert!(matches!(
            report.certificate,
            Some(Certificate::Affine { .. })
        ));
        verify(&report);
    }

    #[test]
    fn boolean_max_is_tractable() {
        let d = domain(&[0, 1]);
        let f = binary(&d, |t| t[0].max(t[1]));
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::Po);
        assert!(matches!(
            report.certificate,
            Some(Certificate::GeneralisedMax { .. })
        ));
        verify(&report);
    }

    #[test]
    fn boolean_min_is_poly_apx() {
        let d = domain(&[0, 1]);
        let f = binary(&d, |t| t[0].min(t[1]));
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::PolyApxComplete);
        assert_eq!(
            report.certificate,
            Some(Certificate::BadPair { op: f, a: 0, b: 1 })
        );
    }

    #[test]
    fn min_without_zero_is_apx() {
        let d = domain(&[1, 2]);
        let f = binary(&d, |t| t[0].min(t[1]));
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        verify(&report);
    }

    #[test]
    fn field_mean_is_recognised() {
        let d = domain(&[0, 1, 2]);
        // 2x + 2y mod 3 is the mean: 2 is the inverse of 2, and (3+1)/2 = 2.
        let f = algebra::complement_op(&d).unwrap();
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        assert!(matches!(
            report.certificate,
            Some(Certificate::FieldMean { prime: 3, .. })
        ));
        verify(&report);
    }

    #[test]
    fn relabeled_field_mean_is_recognised() {
        // Pull the mean over Z_5 back through a scrambled labeling.
        let d = domain(&[0, 1, 2, 3, 4]);
        let labeling = [2u64, 0, 4, 1, 3];
        let value_of = |e: u64| labeling[e as usize];
        let element_at = |v: u64| labeling.iter().position(|&w| w == v).unwrap() as u64;
        let f = binary(&d, |t| {
            element_at(3 * (value_of(t[0]) + value_of(t[1])) % 5)
        });
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        assert!(matches!(
            report.certificate,
            Some(Certificate::FieldMean { prime: 5, .. })
        ));
        verify(&report);
    }

    #[test]
    fn wide_domains_need_the_conjecture() {
        let d = domain(&[0, 1, 2, 3, 4]);
        let f = binary(&d, |t| t[0].min(t[1]));
        let plain = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(plain.bucket, Bucket::Unknown);
        assert!(plain.certificate.is_none());

        let assumed = classify_maximal(
            &f,
            MaximalOptions {
                assume_szczepara: true,
                ..MaximalOptions::default()
            },
        )
        .unwrap();
        assert_eq!(assumed.bucket, Bucket::PolyApxComplete);
        assert!(assumed.notes.iter().any(|n| n.contains("Szczepara")));
        verify(&assumed);
    }

    #[test]
    fn wide_max_stays_tractable() {
        // The witness check is unconditional, so no conjecture is needed.
        let d = domain(&[0, 1, 2, 3, 4]);
        let f = binary(&d, |t| t[0].max(t[1]));
        let report = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(report.bucket, Bucket::Po);
        verify(&report);
    }

    #[test]
    fn out_of_family_operations_need_the_maximality_flag() {
        let d = domain(&[0, 1]);
        let f = binary(&d, |t| t[0]);
        assert!(matches!(
            classify_maximal(&f, MaximalOptions::default()),
            Err(ClassifyError::NotApplicable(_))
        ));
        let report = classify_maximal(
            &f,
            MaximalOptions {
                assume_maximal: true,
                ..MaximalOptions::default()
            },
        )
        .unwrap();
        assert_eq!(report.bucket, Bucket::FeasNpHard);
        verify(&report);
    }

    #[test]
    fn classification_is_deterministic() {
        let d = domain(&[0, 1, 2]);
        let f = binary(&d, |t| t[0].max(t[1]));
        let first = classify_maximal(&f, MaximalOptions::default()).unwrap();
        let second = classify_maximal(&f, MaximalOptions::default()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn permutation_language_is_tractable() {
        let d = domain(&[0, 1, 2]);
        let report = classify_homogeneous(&perm_language(&d)).unwrap();
        assert_eq!(report.bucket, Bucket::Po);
        match report.certificate.as_ref().unwrap() {
            Certificate::Homogeneous { node, .. } => assert_eq!(node, "D^1_1"),
            other => panic!("unexpected certificate {other:?}"),
        }
        verify(&report);
    }

    #[test]
    fn zero_touching_relation_drops_to_poly_apx() {
        let d = domain(&[0, 1, 2]);
        let mut lang = perm_language(&d);
        lang.add_relation(
            "low",
            Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 0]], &d).unwrap(),
        )
        .unwrap();
        let report = classify_homogeneous(&lang).unwrap();
        assert_eq!(report.bucket, Bucket::PolyApxComplete);
        match report.certificate.as_ref().unwrap() {
            Certificate::Homogeneous { node, .. } => assert_eq!(node, "D^0_2"),
            other => panic!("unexpected certificate {other:?}"),
        }
        verify(&report);
    }

    #[test]
    fn zero_free_dual_discriminator_language_is_apx() {
        let d = domain(&[1, 2]);
        let mut lang = perm_language(&d);
        lang.add_relation(
            "low",
            Relation::new(2, vec![vec![1, 1], vec![1, 2], vec![2, 1]], &d).unwrap(),
        )
        .unwrap();
        let report = classify_homogeneous(&lang).unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        verify(&report);
    }

    #[test]
    fn parity_language_is_apx() {
        let d = domain(&[0, 1]);
        let mut lang = perm_language(&d);
        let parity: Vec<Vec<u64>> = (0u64..16)
            .map(|bits| (0..4).map(|i| (bits >> i) & 1).collect::<Vec<u64>>())
            .filter(|t: &Vec<u64>| t.iter().sum::<u64>() % 2 == 0)
            .collect();
        lang.add_relation("even", Relation::new(4, parity, &d).unwrap())
            .unwrap();
        let report = classify_homogeneous(&lang).unwrap();
        assert_eq!(report.bucket, Bucket::ApxComplete);
        match report.certificate.as_ref().unwrap() {
            Certificate::Homogeneous { node, .. } => assert_eq!(node, "E^1_1"),
            other => panic!("unexpected certificate {other:?}"),
        }
        verify(&report);
    }

    #[test]
    fn not_all_equal_language_is_feasibility_hard() {
        let d = domain(&[0, 1]);
        let mut lang = perm_language(&d);
        let nae: Vec<Vec<u64>> = (0u64..8)
            .map(|bits| (0..3).map(|i| (bits >> i) & 1).collect::<Vec<u64>>())
            .filter(|t: &Vec<u64>| t.iter().any(|&v| v == 0) && t.iter().any(|&v| v == 1))
            .collect();
        lang.add_relation("nae", Relation::new(3, nae, &d).unwrap())
            .unwrap();
        let report = classify_homogeneous(&lang).unwrap();
        assert_eq!(report.bucket, Bucket::FeasNpHard);
        match report.certificate.as_ref().unwrap() {
            Certificate::Homogeneous { node, .. } => assert_eq!(node, "Inv(r_2)"),
            other => panic!("unexpected certificate {other:?}"),
        }
        verify(&report);
    }

    #[test]
    fn missing_permutations_are_rejected() {
        let d = domain(&[0, 1]);
        let mut lang = ConstraintLanguage::new(d.clone());
        lang.add_relation(
            "eq",
            Relation::new(2, vec![vec![0, 0], vec![1, 1]], &d).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            classify_homogeneous(&lang),
            Err(ClassifyError::NotApplicable(_))
        ));
    }

    #[test]
    fn dispatch_prefers_the_injective_solver() {
        let d = domain(&[0, 1, 2]);
        let mut lang = ConstraintLanguage::new(d.clone());
        lang.add_relation(
            "cycle",
            Relation::new(2, vec![vec![0, 1], vec![1, 2], vec![2, 0]], &d).unwrap(),
        )
        .unwrap();
        let report = detect_tractable(&lang, None).unwrap();
        let (tag, cert) = report.dispatch.unwrap();
        assert_eq!(tag, SolverTag::Injective);
        assert!(cert.verify().unwrap());
    }

    #[test]
    fn dispatch_finds_a_generalised_max_witness() {
        // The order relation is not discriminator-invariant but max
        // preserves it.
        let d = domain(&[0, 1]);
        let mut lang = ConstraintLanguage::new(d.clone());
        lang.add_relation(
            "le",
            Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]], &d).unwrap(),
        )
        .unwrap();
        let report = detect_tractable(&lang, None).unwrap();
        let (tag, cert) = report.dispatch.unwrap();
        assert_eq!(tag, SolverTag::GenMax);
        assert!(cert.verify().unwrap());
    }

    #[test]
    fn dispatch_falls_back_to_the_group_solver() {
        // x + y + z = 1 over Z_3: the componentwise max (2,2,2) sums to 0,
        // so no generalised max witness exists, and the discriminator fails.
        let d = domain(&[0, 1, 2]);
        let mut lang = ConstraintLanguage::new(d.clone());
        let coset: Vec<Vec<u64>> = (0u64..27)
            .map(|code| vec![code % 3, (code / 3) % 3, code / 9])
            .filter(|t| (t[0] + t[1] + t[2]) % 3 == 1)
            .collect();
        lang.add_relation("sum1", Relation::new(3, coset, &d).unwrap())
            .unwrap();
        let report = detect_tractable(&lang, None).unwrap();
        let (tag, cert) = report.dispatch.unwrap();
        assert_eq!(tag, SolverTag::Affine);
        assert!(cert.verify().unwrap());
    }

    #[test]
    fn dispatch_reports_untractable_languages() {
        let d = domain(&[0, 1]);
        let mut lang = ConstraintLanguage::new(d.clone());
        let nae: Vec<Vec<u64>> = (0u64..8)
            .map(|bits| (0..3).map(|i| (bits >> i) & 1).collect::<Vec<u64>>())
            .filter(|t: &Vec<u64>| t.iter().any(|&v| v == 0) && t.iter().any(|&v| v == 1))
            .collect();
        lang.add_relation("nae", Relation::new(3, nae, &d).unwrap())
            .unwrap();
        let report = detect_tractable(&lang, None).unwrap();
        assert!(report.dispatch.is_none());
    }

    #[test]
    fn injective_permutation_graph_outranks_the_group_detector() {
        // The coset {(0,0),(1,2),(2,1)} is the graph of x -> 2x, so the
        // discriminator is a polymorphism and wins the first-applicable scan
        // even though x - y + z over Z_3 also preserves the relation.
        let d = domain(&[0, 1, 2]);
        let mut lang = ConstraintLanguage::new(d.clone());
        lang.add_relation(
            "double",
            Relation::new(2, vec![vec![0, 0], vec![1, 2], vec![2, 1]], &d).unwrap(),
        )
        .unwrap();
        let report = detect_tractable(&lang, None).unwrap();
        let (tag, _) = report.dispatch.unwrap();
        assert_eq!(tag, SolverTag::Injective);
    }
}
