//! Operation algebra: componentwise application, polymorphism tests, binary
//! iterates, fixity sets, the pair digraph of a binary operation, named
//! operation catalogs, abelian groups with coset extraction, and the search
//! for generalised max witnesses.

mod catalog;
mod groups;
mod witness;

pub use catalog::{
    complement_op, discriminator, dual_discriminator, dual_discriminator_complement,
    klein_sum_ops, named_ops, near_projection, switching,
};
pub use groups::{
    coset_to_linear_system, enumerate_abelian_groups, group_coords, AbelianGroup, GroupCoords,
    LinearSystem,
};
pub(crate) use groups::{is_prime, lexicographic_permutations, row_reduce, solve_linear};
pub use witness::{find_genmax_witness, DEFAULT_WITNESS_BUDGET};

use crate::model::{ConstraintLanguage, Domain, Operation, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("expected {expected} tuples/arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("search budget of {budget} node visits exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("relation is not a coset: {0}")]
    NotACoset(String),
    #[error("unsupported group structure: {0}")]
    UnsupportedGroup(String),
}

/// Applies a k-ary operation to k tuples of equal length, position by
/// position: result[i] = f(t_1[i], ..., t_k[i]).
pub fn apply_componentwise(f: &Operation, ts: &[Vec<u64>]) -> Result<Vec<u64>, AlgebraError> {
    if ts.len() != f.arity() {
        return Err(AlgebraError::ArityMismatch {
            expected: f.arity(),
            got: ts.len(),
        });
    }
    let n = match ts.first() {
        Some(t) => t.len(),
        None => return Err(AlgebraError::ArityMismatch { expected: 1, got: 0 }),
    };
    for t in ts {
        if t.len() != n {
            return Err(AlgebraError::ArityMismatch {
                expected: n,
                got: t.len(),
            });
        }
        for &e in t {
            if !f.domain().contains(e) {
                return Err(AlgebraError::DomainMismatch(format!(
                    "tuple entry {e} is outside the operation's domain"
                )));
            }
        }
    }
    let mut args = vec![0u64; f.arity()];
    Ok((0..n)
        .map(|i| {
            for (a, t) in args.iter_mut().zip(ts) {
                *a = t[i];
            }
            f.eval(&args)
        })
        .collect())
}

/// Whether R is invariant under f: every componentwise application of f to
/// tuples of R lands in R. The empty relation is invariant under everything.
pub fn is_polymorphism(f: &Operation, r: &Relation) -> Result<bool, AlgebraError> {
    for t in r.tuples() {
        for &e in t {
            if !f.domain().contains(e) {
                return Err(AlgebraError::DomainMismatch(format!(
                    "relation entry {e} is outside the operation's domain"
                )));
            }
        }
    }
    if r.is_empty() {
        return Ok(true);
    }
    let k = f.arity();
    let m = r.len();
    // odometer over all m^k selections of tuples, with repetition
    let mut pick = vec![0usize; k];
    let mut args = vec![0u64; k];
    loop {
        let mut inside = true;
        let mut image = Vec::with_capacity(r.arity());
        for i in 0..r.arity() {
            for (a, &sel) in args.iter_mut().zip(&pick) {
                *a = r.tuples()[sel][i];
            }
            image.push(f.eval(&args));
        }
        if !r.contains(&image) {
            inside = false;
        }
        if !inside {
            return Ok(false);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < m {
                break;
            }
            pick[pos] = 0;
        }
    }
}

/// Whether f is a polymorphism of every relation in the language.
pub fn is_polymorphism_lang(f: &Operation, lang: &ConstraintLanguage) -> Result<bool, AlgebraError> {
    if f.domain() != lang.domain() {
        return Err(AlgebraError::DomainMismatch(
            "operation and language have different domains".into(),
        ));
    }
    for (_, r) in lang.relations() {
        if !is_polymorphism(f, r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The n-th iterate of a binary operation: f_1 = f and
/// f_{n+1}(x, y) = f(x, f_n(x, y)).
pub fn iterate(f: &Operation, n: u32) -> Result<Operation, AlgebraError> {
    if f.arity() != 2 {
        return Err(AlgebraError::InvalidArgument(format!(
            "iterates are defined for binary operations, got arity {}",
            f.arity()
        )));
    }
    if n == 0 {
        return Err(AlgebraError::InvalidArgument(
            "iterate index must be at least 1".into(),
        ));
    }
    let mut cur = f.clone();
    for _ in 1..n {
        cur = Operation::from_fn(f.domain(), 2, |a| f.eval(&[a[0], cur.eval(a)]))
            .expect("iterate stays within the domain");
    }
    Ok(cur)
}

/// The set of pairs on which a binary operation acts as a projection:
/// {(x, y) : f(x, y) ∈ {x, y}}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixitySet {
    pairs: Vec<(u64, u64)>,
}

impl FixitySet {
    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: (u64, u64)) -> bool {
        self.pairs.binary_search(&pair).is_ok()
    }

    pub fn is_subset_of(&self, other: &FixitySet) -> bool {
        self.pairs.iter().all(|&p| other.contains(p))
    }
}

/// Fixity of a binary operation.
pub fn fixity(f: &Operation) -> Result<FixitySet, AlgebraError> {
    if f.arity() != 2 {
        return Err(AlgebraError::InvalidArgument(format!(
            "fixity is defined for binary operations, got arity {}",
            f.arity()
        )));
    }
    let mut pairs = Vec::new();
    for &a in f.domain().elements() {
        for &b in f.domain().elements() {
            let v = f.eval(&[a, b]);
            if v == a || v == b {
                pairs.push((a, b));
            }
        }
    }
    Ok(FixitySet { pairs })
}

/// The functional digraph of a binary operation on vertex set D × D, with
/// the edge (a, b) → (a, f(a, b)).
///
/// Every vertex has out-degree exactly one and edges never change the first
/// component. Self-loops ("reflexive vertices") are expected terminal points;
/// a nontrivial cycle is one of length at least two.
#[derive(Debug, Clone)]
pub struct GfDigraph {
    domain: Domain,
    // successor by vertex index; vertex (a, b) has index a_idx * |D| + b_idx
    succ: Vec<usize>,
}

/// Builds the pair digraph of a binary operation.
pub fn build_gf(f: &Operation) -> Result<GfDigraph, AlgebraError> {
    if f.arity() != 2 {
        return Err(AlgebraError::InvalidArgument(format!(
            "the pair digraph is defined for binary operations, got arity {}",
            f.arity()
        )));
    }
    let d = f.domain();
    let n = d.len();
    let mut succ = Vec::with_capacity(n * n);
    for &a in d.elements() {
        for &b in d.elements() {
            let v = f.eval(&[a, b]);
            succ.push(d.index_of(a).unwrap() * n + d.index_of(v).unwrap());
        }
    }
    Ok(GfDigraph {
        domain: d.clone(),
        succ,
    })
}

impl GfDigraph {
    fn vertex_index(&self, v: (u64, u64)) -> Result<usize, AlgebraError> {
        let n = self.domain.len();
        let a = self.domain.index_of(v.0);
        let b = self.domain.index_of(v.1);
        match (a, b) {
            (Some(a), Some(b)) => Ok(a * n + b),
            _ => Err(AlgebraError::InvalidArgument(format!(
                "({}, {}) is not a vertex",
                v.0, v.1
            ))),
        }
    }

    fn vertex_at(&self, index: usize) -> (u64, u64) {
        let n = self.domain.len();
        (
            self.domain.elements()[index / n],
            self.domain.elements()[index % n],
        )
    }

    pub fn vertices(&self) -> Vec<(u64, u64)> {
        (0..self.succ.len()).map(|i| self.vertex_at(i)).collect()
    }

    pub fn succ(&self, v: (u64, u64)) -> Result<(u64, u64), AlgebraError> {
        Ok(self.vertex_at(self.succ[self.vertex_index(v)?]))
    }

    pub fn is_reflexive(&self, v: (u64, u64)) -> Result<bool, AlgebraError> {
        let i = self.vertex_index(v)?;
        Ok(self.succ[i] == i)
    }

    pub fn reflexive_vertices(&self) -> Vec<(u64, u64)> {
        (0..self.succ.len())
            .filter(|&i| self.succ[i] == i)
            .map(|i| self.vertex_at(i))
            .collect()
    }

    /// Follows the successor map `steps` times from `start`.
    pub fn walk(&self, start: (u64, u64), steps: usize) -> Result<(u64, u64), AlgebraError> {
        let mut i = self.vertex_index(start)?;
        for _ in 0..steps {
            i = self.succ[i];
        }
        Ok(self.vertex_at(i))
    }

    /// Whether some directed cycle of length ≥ 2 exists. Self-loops do not
    /// count.
    pub fn has_nontrivial_cycle(&self) -> bool {
        let m = self.succ.len();
        for start in 0..m {
            // after m steps the walk is inside its terminal cycle
            let mut v = start;
            for _ in 0..m {
                v = self.succ[v];
            }
            if self.succ[v] != v {
                let mut w = self.succ[v];
                let mut len = 1;
                while w != v {
                    w = self.succ[w];
                    len += 1;
                }
                if len >= 2 {
                    return true;
                }
            }
        }
        false
    }
}

/// Structural flags of an operation, each true iff the defining identity
/// holds over the whole domain. Flags whose arity does not match the
/// operation are false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpPredicates {
    pub is_constant: bool,
    pub is_idempotent: bool,
    pub is_commutative: bool,
    pub is_majority: bool,
    pub is_two_semilattice: bool,
    pub is_generalised_max: bool,
    pub is_maltsev: bool,
}

pub fn op_predicates(f: &Operation) -> OpPredicates {
    let d = f.domain().elements();
    let mut p = OpPredicates::default();

    p.is_constant = {
        let mut vals = f.rows().map(|(_, v)| v);
        match vals.next() {
            Some(first) => vals.all(|v| v == first),
            None => false,
        }
    };
    p.is_idempotent = d
        .iter()
        .all(|&a| f.eval(&vec![a; f.arity()]) == a);

    if f.arity() == 2 {
        p.is_commutative = d
            .iter()
            .all(|&a| d.iter().all(|&b| f.eval(&[a, b]) == f.eval(&[b, a])));
        p.is_two_semilattice = p.is_idempotent
            && p.is_commutative
            && d.iter().all(|&a| {
                d.iter().all(|&b| {
                    let ab = f.eval(&[a, b]);
                    f.eval(&[a, ab]) == ab
                })
            });
        // f(a,a) ≥ a, and f(a,b) ≤ min(a,b) for a ≠ b forces f(b,a) > max(a,b)
        p.is_generalised_max = d.iter().all(|&a| f.eval(&[a, a]) >= a)
            && d.iter().all(|&a| {
                d.iter().all(|&b| {
                    a == b || f.eval(&[a, b]) > a.min(b) || f.eval(&[b, a]) > a.max(b)
                })
            });
    }

    if f.arity() == 3 {
        p.is_majority = d.iter().all(|&a| {
            d.iter().all(|&b| {
                f.eval(&[a, a, b]) == a && f.eval(&[a, b, a]) == a && f.eval(&[b, a, a]) == a
            })
        });
        p.is_maltsev = d
            .iter()
            .all(|&x| d.iter().all(|&y| f.eval(&[x, y, y]) == x && f.eval(&[y, y, x]) == x));
    }

    p
}

/// Whether a ternary operation is x −_G y +_G z for the given group.
pub fn is_affine_for(f: &Operation, g: &AbelianGroup) -> bool {
    if f.arity() != 3 || f.domain() != g.carrier() {
        return false;
    }
    let d = f.domain().elements();
    d.iter().all(|&x| {
        d.iter().all(|&y| {
            d.iter()
                .all(|&z| f.eval(&[x, y, z]) == g.add(g.sub(x, y), z))
        })
    })
}

/// Componentwise maximum tuple of a relation; None for the empty relation.
pub fn componentwise_max_tuple(r: &Relation) -> Option<Vec<u64>> {
    if r.is_empty() {
        return None;
    }
    let mut out = r.tuples()[0].clone();
    for t in &r.tuples()[1..] {
        for (o, &e) in out.iter_mut().zip(t) {
            *o = (*o).max(e);
        }
    }
    Some(out)
}
