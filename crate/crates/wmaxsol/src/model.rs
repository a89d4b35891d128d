//! Problem representation: finite domains, relations, operations, constraint
//! languages, weighted instances, and assignments.
//!
//! An instance asks for an assignment of domain elements to variables that
//! satisfies every constraint and maximises the weighted sum of assigned
//! values. Weights are machine integers; measures are arbitrary precision so
//! sums never overflow.

use std::collections::BTreeMap;
use std::fmt;

use num::BigUint;

/// Objective value of an assignment: sum of `weight * value` over variables.
pub type Measure = BigUint;

/// Default upper bound on domain size. Larger domains need an explicit cap.
pub const DEFAULT_DOMAIN_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("domain is empty")]
    EmptyDomain,
    #[error("domain has {size} elements, cap is {cap}")]
    DomainTooLarge { size: usize, cap: usize },
    #[error("element {element} is not in the domain")]
    ElementOutOfDomain { element: u64 },
    #[error("relation arity must be at least 1")]
    ZeroArity,
    #[error("tuple {tuple:?} has {} entries, relation arity is {arity}", tuple.len())]
    TupleArityMismatch { tuple: Vec<u64>, arity: usize },
    #[error("duplicate relation name {name:?}")]
    DuplicateRelation { name: String },
    #[error("duplicate variable name {name:?}")]
    DuplicateVariable { name: String },
    #[error("{count} variables but {weights} weights")]
    WeightCountMismatch { count: usize, weights: usize },
    #[error("constraint scope references variable index {index}, instance has {count} variables")]
    ScopeOutOfRange { index: usize, count: usize },
    #[error("constraint on {relation:?} has scope of length {scope}, relation arity is {arity}")]
    ScopeArityMismatch {
        relation: String,
        scope: usize,
        arity: usize,
    },
    #[error("operation table defines arguments {args:?} twice")]
    DuplicateOperationRow { args: Vec<u64> },
    #[error("operation table is missing rows: {given} of {expected} argument tuples defined")]
    IncompleteOperationTable { given: usize, expected: usize },
    #[error("assignment is missing variable {variable:?}")]
    MalformedAssignment { variable: String },
    #[error("assignment sets {variable:?} to {value}, which is not in the domain")]
    ValueOutOfDomain { variable: String, value: u64 },
}

/// A finite set of natural numbers, kept sorted and deduplicated.
///
/// Domains need not be contiguous: `{0, 3, 7}` is as legal as `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Domain {
    elements: Vec<u64>,
}

impl Domain {
    /// Builds a domain under the default size cap.
    pub fn new(elements: Vec<u64>) -> Result<Self, ModelError> {
        Self::with_cap(elements, DEFAULT_DOMAIN_CAP)
    }

    /// Builds a domain with an explicit size cap.
    pub fn with_cap(mut elements: Vec<u64>, cap: usize) -> Result<Self, ModelError> {
        elements.sort_unstable();
        elements.dedup();
        if elements.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        if elements.len() > cap {
            return Err(ModelError::DomainTooLarge {
                size: elements.len(),
                cap,
            });
        }
        Ok(Domain { elements })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty domains
    }

    pub fn contains(&self, element: u64) -> bool {
        self.elements.binary_search(&element).is_ok()
    }

    /// Position of `element` in sorted order, if present.
    pub fn index_of(&self, element: u64) -> Option<usize> {
        self.elements.binary_search(&element).ok()
    }

    // named to dodge Ord::min / Ord::max, which win method resolution by value
    pub fn min_element(&self) -> u64 {
        self.elements[0]
    }

    pub fn max_element(&self) -> u64 {
        *self.elements.last().unwrap()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A finite relation over a domain: a set of same-length tuples.
///
/// Tuples are stored sorted lexicographically with duplicates removed, so two
/// relations are equal exactly when they contain the same tuples. The empty
/// relation of any arity is legal and unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Relation {
    arity: usize,
    tuples: Vec<Vec<u64>>,
}

impl Relation {
    pub fn new(arity: usize, mut tuples: Vec<Vec<u64>>, domain: &Domain) -> Result<Self, ModelError> {
        if arity == 0 {
            return Err(ModelError::ZeroArity);
        }
        for t in &tuples {
            if t.len() != arity {
                return Err(ModelError::TupleArityMismatch {
                    tuple: t.clone(),
                    arity,
                });
            }
            for &e in t {
                if !domain.contains(e) {
                    return Err(ModelError::ElementOutOfDomain { element: e });
                }
            }
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation { arity, tuples })
    }

    /// Internal constructor for tuples already known to be valid.
    pub(crate) fn from_sorted(arity: usize, mut tuples: Vec<Vec<u64>>) -> Self {
        debug_assert!(arity > 0);
        tuples.sort_unstable();
        tuples.dedup();
        Relation { arity, tuples }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<u64>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[u64]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    /// Set of values appearing at `position` across all tuples, sorted.
    pub fn column(&self, position: usize) -> Vec<u64> {
        let mut vals: Vec<u64> = self.tuples.iter().map(|t| t[position]).collect();
        vals.sort_unstable();
        vals.dedup();
        vals
    }
}

/// A finitary operation on a domain, stored as a full table.
///
/// The table is indexed in mixed radix over domain positions, first argument
/// most significant, so equality of tables is equality of operations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Operation {
    domain: Domain,
    arity: usize,
    values: Vec<u64>,
}

impl Operation {
    /// Builds the table by evaluating `f` on every argument tuple.
    pub fn from_fn<F>(domain: &Domain, arity: usize, mut f: F) -> Result<Self, ModelError>
    where
        F: FnMut(&[u64]) -> u64,
    {
        if arity == 0 {
            return Err(ModelError::ZeroArity);
        }
        let n = domain.len();
        let size = n.pow(arity as u32);
        let mut values = Vec::with_capacity(size);
        let mut args = vec![domain.elements()[0]; arity];
        let mut idx = vec![0usize; arity];
        loop {
            for (a, &i) in args.iter_mut().zip(&idx) {
                *a = domain.elements()[i];
            }
            let out = f(&args);
            if !domain.contains(out) {
                return Err(ModelError::ElementOutOfDomain { element: out });
            }
            values.push(out);
            // mixed-radix increment, least significant last
            let mut pos = arity;
            loop {
                if pos == 0 {
                    return Ok(Operation {
                        domain: domain.clone(),
                        arity,
                        values,
                    });
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Builds an operation from explicit `(arguments, value)` rows. Every
    /// argument tuple over the domain must appear exactly once.
    pub fn from_rows(
        domain: &Domain,
        arity: usize,
        rows: &[(Vec<u64>, u64)],
    ) -> Result<Self, ModelError> {
        if arity == 0 {
            return Err(ModelError::ZeroArity);
        }
        let n = domain.len();
        let size = n.pow(arity as u32);
        let mut values: Vec<Option<u64>> = vec![None; size];
        for (args, out) in rows {
            if args.len() != arity {
                return Err(ModelError::TupleArityMismatch {
                    tuple: args.clone(),
                    arity,
                });
            }
            let mut index = 0usize;
            for &a in args {
                let i = domain
                    .index_of(a)
                    .ok_or(ModelError::ElementOutOfDomain { element: a })?;
                index = index * n + i;
            }
            if !domain.contains(*out) {
                return Err(ModelError::ElementOutOfDomain { element: *out });
            }
            if values[index].is_some() {
                return Err(ModelError::DuplicateOperationRow { args: args.clone() });
            }
            values[index] = Some(*out);
        }
        let given = values.iter().filter(|v| v.is_some()).count();
        if given != size {
            return Err(ModelError::IncompleteOperationTable {
                given,
                expected: size,
            });
        }
        Ok(Operation {
            domain: domain.clone(),
            arity,
            values: values.into_iter().map(|v| v.unwrap()).collect(),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Applies the operation. Panics if an argument is outside the domain or
    /// the arity is wrong; callers validate instances before evaluating.
    pub fn eval(&self, args: &[u64]) -> u64 {
        assert_eq!(args.len(), self.arity, "operation arity mismatch");
        let n = self.domain.len();
        let mut index = 0usize;
        for &a in args {
            let i = self
                .domain
                .index_of(a)
                .unwrap_or_else(|| panic!("element {a} is not in the domain"));
            index = index * n + i;
        }
        self.values[index]
    }

    /// Iterates over all `(arguments, value)` rows in table order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<u64>, u64)> + '_ {
        let n = self.domain.len();
        (0..self.values.len()).map(move |mut index| {
            let mut args = vec![0u64; self.arity];
            for pos in (0..self.arity).rev() {
                args[pos] = self.domain.elements()[index % n];
                index /= n;
            }
            let mut key = 0usize;
            for &a in &args {
                key = key * n + self.domain.index_of(a).unwrap();
            }
            (args, self.values[key])
        })
    }
}

/// A named set of relations over a shared domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintLanguage {
    domain: Domain,
    relations: Vec<(String, Relation)>,
}

impl ConstraintLanguage {
    pub fn new(domain: Domain) -> Self {
        ConstraintLanguage {
            domain,
            relations: Vec::new(),
        }
    }

    pub fn add_relation(&mut self, name: &str, relation: Relation) -> Result<(), ModelError> {
        if self.relations.iter().any(|(n, _)| n == name) {
            return Err(ModelError::DuplicateRelation {
                name: name.to_string(),
            });
        }
        self.relations.push((name.to_string(), relation));
        Ok(())
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r)
    }

    /// Relations in insertion order.
    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(n, r)| (n.as_str(), r))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }
}

/// One constraint: a relation applied to a scope of variable indices.
///
/// Scopes may repeat variables. The relation is stored inline so solver
/// transformations can tighten it per constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub scope: Vec<usize>,
    pub relation: Relation,
}

/// A weighted constraint satisfaction instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    domain: Domain,
    variables: Vec<String>,
    weights: Vec<u64>,
    constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new(
        domain: Domain,
        variables: Vec<String>,
        weights: Vec<u64>,
        constraints: Vec<Constraint>,
    ) -> Result<Self, ModelError> {
        if variables.len() != weights.len() {
            return Err(ModelError::WeightCountMismatch {
                count: variables.len(),
                weights: weights.len(),
            });
        }
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(ModelError::DuplicateVariable { name: v.clone() });
            }
        }
        for c in &constraints {
            if c.scope.len() != c.relation.arity() {
                return Err(ModelError::ScopeArityMismatch {
                    relation: c.name.clone(),
                    scope: c.scope.len(),
                    arity: c.relation.arity(),
                });
            }
            for &i in &c.scope {
                if i >= variables.len() {
                    return Err(ModelError::ScopeOutOfRange {
                        index: i,
                        count: variables.len(),
                    });
                }
            }
        }
        Ok(Instance {
            domain,
            variables,
            weights,
            constraints,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Same instance with the constraint list replaced. Scope and arity
    /// validation is re-run.
    pub fn with_constraints(&self, constraints: Vec<Constraint>) -> Result<Self, ModelError> {
        Instance::new(
            self.domain.clone(),
            self.variables.clone(),
            self.weights.clone(),
            constraints,
        )
    }
}

/// A total or partial map from variable names to domain elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<String, u64>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment {
            values: BTreeMap::new(),
        }
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        Assignment {
            values: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    /// Pairs instance variables (in order) with `values`.
    pub fn from_values(instance: &Instance, values: &[u64]) -> Self {
        Assignment {
            values: instance
                .variables()
                .iter()
                .cloned()
                .zip(values.iter().copied())
                .collect(),
        }
    }

    pub fn set(&mut self, variable: &str, value: u64) {
        self.values.insert(variable.to_string(), value);
    }

    pub fn get(&self, variable: &str) -> Option<u64> {
        self.values.get(variable).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Values in instance variable order; errors if a variable is missing or
    /// set outside the domain.
    pub fn values_for(&self, instance: &Instance) -> Result<Vec<u64>, ModelError> {
        instance
            .variables()
            .iter()
            .map(|v| {
                let value = self
                    .get(v)
                    .ok_or_else(|| ModelError::MalformedAssignment {
                        variable: v.clone(),
                    })?;
                if !instance.domain().contains(value) {
                    return Err(ModelError::ValueOutOfDomain {
                        variable: v.clone(),
                        value,
                    });
                }
                Ok(value)
            })
            .collect()
    }
}

impl Default for Assignment {
    fn default() -> Self {
        Self::new()
    }
}

/// Weighted measure of an assignment: `sum over variables of weight * value`.
///
/// An instance with no variables has measure zero.
pub fn measure(instance: &Instance, assignment: &Assignment) -> Result<Measure, ModelError> {
    let values = assignment.values_for(instance)?;
    let mut total = Measure::from(0u32);
    for (&w, &v) in instance.weights().iter().zip(&values) {
        total += Measure::from(w) * Measure::from(v);
    }
    Ok(total)
}

/// Whether the assignment satisfies every constraint.
pub fn is_feasible(instance: &Instance, assignment: &Assignment) -> Result<bool, ModelError> {
    let values = assignment.values_for(instance)?;
    Ok(satisfies_all(instance, &values))
}

/// Feasibility for index-aligned values, used by solver inner loops.
pub(crate) fn satisfies_all(instance: &Instance, values: &[u64]) -> bool {
    instance.constraints().iter().all(|c| {
        let image: Vec<u64> = c.scope.iter().map(|&i| values[i]).collect();
        c.relation.contains(&image)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(elems: &[u64]) -> Domain {
        Domain::new(elems.to_vec()).unwrap()
    }

    #[test]
    fn domain_sorts_and_dedups() {
        let d = dom(&[3, 0, 7, 3]);
        assert_eq!(d.elements(), &[0, 3, 7]);
        assert_eq!(d.min_element(), 0);
        assert_eq!(d.max_element(), 7);
        assert_eq!(d.index_of(3), Some(1));
        assert_eq!(d.index_of(4), None);
    }

    #[test]
    fn domain_cap_is_enforced() {
        let err = Domain::new(vec![0, 1, 2, 3, 4, 5, 6]).unwrap_err();
        assert_eq!(
            err,
            ModelError::DomainTooLarge { size: 7, cap: 6 }
        );
        assert!(Domain::with_cap((0..7).collect(), 7).is_ok());
        assert_eq!(Domain::new(vec![]).unwrap_err(), ModelError::EmptyDomain);
    }

    #[test]
    fn relation_is_canonical() {
        let d = dom(&[0, 1, 2]);
        let r1 = Relation::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 0]], &d).unwrap();
        let r2 = Relation::new(2, vec![vec![0, 1], vec![1, 0]], &d).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.tuples(), &[vec![0, 1], vec![1, 0]]);
        assert!(r1.contains(&[1, 0]));
        assert!(!r1.contains(&[1, 1]));
    }

    #[test]
    fn relation_rejects_bad_tuples() {
        let d = dom(&[0, 1]);
        assert_eq!(
            Relation::new(2, vec![vec![0, 5]], &d).unwrap_err(),
            ModelError::ElementOutOfDomain { element: 5 }
        );
        assert!(matches!(
            Relation::new(2, vec![vec![0]], &d).unwrap_err(),
            ModelError::TupleArityMismatch { .. }
        ));
        assert_eq!(
            Relation::new(0, vec![], &d).unwrap_err(),
            ModelError::ZeroArity
        );
    }

    #[test]
    fn operation_table_round_trips() {
        let d = dom(&[0, 1, 2]);
        let max = Operation::from_fn(&d, 2, |a| a[0].max(a[1])).unwrap();
        assert_eq!(max.eval(&[1, 2]), 2);
        assert_eq!(max.eval(&[2, 0]), 2);
        let rows: Vec<(Vec<u64>, u64)> = max.rows().collect();
        assert_eq!(rows.len(), 9);
        let rebuilt = Operation::from_rows(&d, 2, &rows).unwrap();
        assert_eq!(rebuilt, max);
    }

    #[test]
    fn operation_from_rows_requires_totality() {
        let d = dom(&[0, 1]);
        let rows = vec![(vec![0, 0], 0u64)];
        assert!(Operation::from_rows(&d, 2, &rows).is_err());
    }

    // Weights {x: 2, y: 3} against values {x: 1, y: 2} give 2*1 + 3*2.
    #[test]
    fn measure_weights_values() {
        let d = dom(&[0, 1, 2]);
        let inst = Instance::new(
            d,
            vec!["x".into(), "y".into()],
            vec![2, 3],
            vec![],
        )
        .unwrap();
        let a = Assignment::from_pairs([("x", 1u64), ("y", 2u64)]);
        assert_eq!(measure(&inst, &a).unwrap(), Measure::from(8u32));
    }

    #[test]
    fn empty_instance_is_feasible_with_measure_zero() {
        let d = dom(&[0, 1]);
        let inst = Instance::new(d, vec![], vec![], vec![]).unwrap();
        let a = Assignment::new();
        assert_eq!(measure(&inst, &a).unwrap(), Measure::from(0u32));
        assert!(is_feasible(&inst, &a).unwrap());
    }

    #[test]
    fn missing_variable_is_malformed() {
        let d = dom(&[0, 1]);
        let inst = Instance::new(d, vec!["x".into()], vec![1], vec![]).unwrap();
        let a = Assignment::new();
        assert_eq!(
            measure(&inst, &a).unwrap_err(),
            ModelError::MalformedAssignment {
                variable: "x".into()
            }
        );
        let mut b = Assignment::new();
        b.set("x", 9);
        assert_eq!(
            is_feasible(&inst, &b).unwrap_err(),
            ModelError::ValueOutOfDomain {
                variable: "x".into(),
                value: 9
            }
        );
    }

    #[test]
    fn feasibility_checks_every_constraint() {
        let d = dom(&[0, 1]);
        let r = Relation::new(2, vec![vec![0, 1], vec![1, 0]], &d).unwrap();
        let inst = Instance::new(
            d,
            vec!["x".into(), "y".into()],
            vec![1, 1],
            vec![Constraint {
                name: "neq".into(),
                scope: vec![0, 1],
                relation: r,
            }],
        )
        .unwrap();
        let good = Assignment::from_pairs([("x", 0u64), ("y", 1u64)]);
        let bad = Assignment::from_pairs([("x", 1u64), ("y", 1u64)]);
        assert!(is_feasible(&inst, &good).unwrap());
        assert!(!is_feasible(&inst, &bad).unwrap());
    }

    #[test]
    fn empty_relation_makes_constraints_unsatisfiable() {
        let d = dom(&[0, 1]);
        let empty = Relation::new(1, vec![], &d).unwrap();
        assert!(empty.is_empty());
        let inst = Instance::new(
            d,
            vec!["x".into()],
            vec![1],
            vec![Constraint {
                name: "none".into(),
                scope: vec![0],
                relation: empty,
            }],
        )
        .unwrap();
        for v in [0u64, 1] {
            let a = Assignment::from_pairs([("x", v)]);
            assert!(!is_feasible(&inst, &a).unwrap());
        }
    }

    #[test]
    fn instance_validation_catches_scope_errors() {
        let d = dom(&[0, 1]);
        let r = Relation::new(1, vec![vec![0]], &d).unwrap();
        let err = Instance::new(
            d.clone(),
            vec!["x".into()],
            vec![1],
            vec![Constraint {
                name: "r".into(),
                scope: vec![1],
                relation: r.clone(),
            }],
        )
        .unwrap_err();
        assert_eq!(err, ModelError::ScopeOutOfRange { index: 1, count: 1 });
        let err = Instance::new(
            d,
            vec!["x".into()],
            vec![1],
            vec![Constraint {
                name: "r".into(),
                scope: vec![0, 0],
                relation: r,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::ScopeArityMismatch { .. }));
    }
}
