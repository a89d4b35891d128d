//! Abelian group structures on a domain, their enumeration up to table
//! identity, coordinatization over prime fields, and extraction of linear
//! systems from coset relations.

use std::collections::BTreeMap;

use super::{is_polymorphism, AlgebraError};
use crate::model::{Domain, Operation, Relation};

/// A commutative group on the domain elements, stored as an addition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    carrier: Domain,
    // add_table[i * n + j] is elems[i] + elems[j]
    add_table: Vec<u64>,
    identity: u64,
    // neg[i] is the inverse of elems[i]
    neg: Vec<u64>,
}

impl AbelianGroup {
    /// Validates the group laws: commutativity, associativity, a two-sided
    /// identity, and inverses. Closure is guaranteed by the table type.
    pub fn new(add: &Operation) -> Result<Self, AlgebraError> {
        if add.arity() != 2 {
            return Err(AlgebraError::InvalidArgument(format!(
                "a group addition table must be binary, got arity {}",
                add.arity()
            )));
        }
        let d = add.domain().clone();
        let elems = d.elements();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for &a in elems {
            for &b in elems {
                table.push(add.eval(&[a, b]));
            }
        }
        let at = |i: usize, j: usize| table[i * n + j];
        for i in 0..n {
            for j in 0..n {
                if at(i, j) != at(j, i) {
                    return Err(AlgebraError::InvalidArgument(
                        "addition is not commutative".into(),
                    ));
                }
            }
        }
        let idx = |e: u64| d.index_of(e).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if at(idx(at(i, j)), k) != at(i, idx(at(j, k))) {
                        return Err(AlgebraError::InvalidArgument(
                            "addition is not associative".into(),
                        ));
                    }
                }
            }
        }
        let identity = elems
            .iter()
            .copied()
            .find(|&e| elems.iter().all(|&a| at(idx(e), idx(a)) == a))
            .ok_or_else(|| AlgebraError::InvalidArgument("no identity element".into()))?;
        let mut neg = Vec::with_capacity(n);
        for &a in elems {
            let inv = elems
                .iter()
                .copied()
                .find(|&b| at(idx(a), idx(b)) == identity)
                .ok_or_else(|| {
                    AlgebraError::InvalidArgument(format!("element {a} has no inverse"))
                })?;
            neg.push(inv);
        }
        Ok(AbelianGroup {
            carrier: d,
            add_table: table,
            identity,
            neg,
        })
    }

    pub fn carrier(&self) -> &Domain {
        &self.carrier
    }

    pub fn order(&self) -> usize {
        self.carrier.len()
    }

    pub fn identity(&self) -> u64 {
        self.identity
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let n = self.carrier.len();
        let i = self.carrier.index_of(a).expect("element of the carrier");
        let j = self.carrier.index_of(b).expect("element of the carrier");
        self.add_table[i * n + j]
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.neg[self.carrier.index_of(a).expect("element of the carrier")]
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn add_op(&self) -> Operation {
        Operation::from_fn(&self.carrier, 2, |t| self.add(t[0], t[1]))
            .expect("sums stay within the carrier")
    }

    /// The ternary operation x − y + z.
    pub fn affine_op(&self) -> Operation {
        Operation::from_fn(&self.carrier, 3, |t| self.add(self.sub(t[0], t[1]), t[2]))
            .expect("affine combinations stay within the carrier")
    }

    pub fn has_exponent_two(&self) -> bool {
        self.carrier
            .elements()
            .iter()
            .all(|&a| self.add(a, a) == self.identity)
    }
}

pub(crate) fn lexicographic_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// All abelian group structures on the domain, one per distinct addition
/// table, sorted by table. Every relabeling of the abstract groups of the
/// given order appears; |D| is capped by the domain itself.
///
/// Orders 1, 2, 3, 5 admit only the cyclic group; order 4 the cyclic and
/// the exponent-two group; order 6 only the cyclic group.
pub fn enumerate_abelian_groups(d: &Domain) -> Vec<AbelianGroup> {
    let n = d.len();
    let elems = d.elements();
    let mut templates: Vec<Box<dyn Fn(usize, usize) -> usize>> =
        vec![Box::new(move |i, j| (i + j) % n)];
    if n == 4 {
        templates.push(Box::new(|i, j| i ^ j));
    }
    let mut tables: Vec<Vec<u64>> = Vec::new();
    for tpl in &templates {
        for perm in lexicographic_permutations(n) {
            // abstract index a is realized as elems[perm[a]]
            let mut table = vec![0u64; n * n];
            for a in 0..n {
                for b in 0..n {
                    table[perm[a] * n + perm[b]] = elems[perm[tpl(a, b)]];
                }
            }
            tables.push(table);
        }
    }
    tables.sort();
    tables.dedup();
    tables
        .into_iter()
        .map(|table| {
            let op = Operation::from_fn(d, 2, |t| {
                let i = d.index_of(t[0]).unwrap();
                let j = d.index_of(t[1]).unwrap();
                table[i * n + j]
            })
            .expect("template tables are closed");
            AbelianGroup::new(&op).expect("template tables satisfy the group laws")
        })
        .collect()
}

/// Coordinates of a group over a prime field: each element maps to a vector
/// in Z_p^dim. Supported shapes are cyclic groups of prime order (dim 1)
/// and the exponent-two group on four elements (p = 2, dim 2).
#[derive(Debug, Clone)]
pub struct GroupCoords {
    pub p: u64,
    pub dim: usize,
    to_coords: BTreeMap<u64, Vec<u64>>,
    from_coords: BTreeMap<Vec<u64>, u64>,
}

impl GroupCoords {
    pub fn coords_of(&self, e: u64) -> &[u64] {
        &self.to_coords[&e]
    }

    pub fn element_at(&self, coords: &[u64]) -> u64 {
        self.from_coords[coords]
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Builds the prime-field coordinatization of a group, or reports the group
/// shape as unsupported. The generator is the smallest non-identity
/// element, which fixes the labeling deterministically.
pub fn group_coords(g: &AbelianGroup) -> Result<GroupCoords, AlgebraError> {
    let n = g.order() as u64;
    let mut to_coords = BTreeMap::new();
    if is_prime(n) {
        let gen = *g
            .carrier()
            .elements()
            .iter()
            .find(|&&e| e != g.identity())
            .expect("prime order is at least two");
        let mut cur = g.identity();
        for k in 0..n {
            to_coords.insert(cur, vec![k]);
            cur = g.add(cur, gen);
        }
        let from_coords = to_coords.iter().map(|(&e, c)| (c.clone(), e)).collect();
        return Ok(GroupCoords {
            p: n,
            dim: 1,
            to_coords,
            from_coords,
        });
    }
    if n == 4 && g.has_exponent_two() {
        let mut rest = g
            .carrier()
            .elements()
            .iter()
            .copied()
            .filter(|&e| e != g.identity());
        let g1 = rest.next().unwrap();
        let g2 = rest.next().unwrap();
        to_coords.insert(g.identity(), vec![0, 0]);
        to_coords.insert(g1, vec![1, 0]);
        to_coords.insert(g2, vec![0, 1]);
        to_coords.insert(g.add(g1, g2), vec![1, 1]);
        let from_coords = to_coords.iter().map(|(&e, c)| (c.clone(), e)).collect();
        return Ok(GroupCoords {
            p: 2,
            dim: 2,
            to_coords,
            from_coords,
        });
    }
    Err(AlgebraError::UnsupportedGroup(format!(
        "no prime-field coordinates for a group of order {n} with composite cyclic structure"
    )))
}

/// A system of linear equations over Z_p describing a coset relation in
/// group coordinates. Each variable of the relation contributes
/// `coords_per_var` consecutive columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub modulus: u64,
    pub coords_per_var: usize,
    pub num_vars: usize,
    /// Rows (coefficients, rhs); coefficient vectors have
    /// num_vars * coords_per_var entries.
    pub rows: Vec<(Vec<u64>, u64)>,
    /// Element ↔ coordinate vector, sorted by element.
    pub labeling: Vec<(u64, Vec<u64>)>,
}

impl LinearSystem {
    fn coords_of(&self, e: u64) -> Option<&[u64]> {
        self.labeling
            .iter()
            .find(|(el, _)| *el == e)
            .map(|(_, c)| c.as_slice())
    }

    /// Whether a tuple of domain elements satisfies every row.
    pub fn satisfied_by(&self, tuple: &[u64]) -> bool {
        if tuple.len() != self.num_vars {
            return false;
        }
        let mut flat = Vec::with_capacity(self.num_vars * self.coords_per_var);
        for &e in tuple {
            match self.coords_of(e) {
                Some(c) => flat.extend_from_slice(c),
                None => return false,
            }
        }
        self.rows.iter().all(|(coef, rhs)| {
            let lhs: u64 = coef
                .iter()
                .zip(&flat)
                .map(|(&a, &x)| a * x % self.modulus)
                .sum::<u64>()
                % self.modulus;
            lhs == *rhs
        })
    }

    /// Enumerates every satisfying tuple. Exponential in the tuple length;
    /// intended for verification on small systems.
    pub fn solutions(&self) -> Vec<Vec<u64>> {
        let elems: Vec<u64> = self.labeling.iter().map(|(e, _)| *e).collect();
        let mut out = Vec::new();
        let mut tuple = vec![elems[0]; self.num_vars];
        let mut idx = vec![0usize; self.num_vars];
        loop {
            if self.satisfied_by(&tuple) {
                out.push(tuple.clone());
            }
            let mut pos = self.num_vars;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    tuple[pos] = elems[idx[pos]];
                    break;
                }
                idx[pos] = 0;
                tuple[pos] = elems[0];
            }
        }
    }
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p for prime p
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Reduces the matrix to reduced row echelon form in place and returns the
/// pivot columns. Zero rows are removed.
pub(crate) fn row_reduce(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = mod_inverse(rows[rank][col] % p, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % p != 0 {
                let factor = rows[r][col] % p;
                for c in 0..ncols {
                    let sub = factor * rows[rank][c] % p;
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

/// A basis of {y : M y = 0} over Z_p, from the reduced row echelon form of
/// M. One basis vector per free column, in column order.
pub(crate) fn nullspace_basis(m: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let pivots = row_reduce(&mut rows, p);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            // pivot variable = −(coefficient of the free column)
            v[pc] = (p - rows[r][free] % p) % p;
        }
        basis.push(v);
    }
    basis
}

/// Solves M x = b over Z_p: a particular solution together with a nullspace
/// basis, or None when inconsistent.
pub(crate) fn solve_linear(
    rows: &[(Vec<u64>, u64)],
    ncols: usize,
    p: u64,
) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let mut aug: Vec<Vec<u64>> = rows
        .iter()
        .map(|(coef, rhs)| {
            let mut r: Vec<u64> = coef.iter().map(|&x| x % p).collect();
            r.resize(ncols, 0);
            r.push(rhs % p);
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug, p);
    if pivots.contains(&ncols) {
        return None; // a row reduced to 0 = nonzero
    }
    let mut particular = vec![0u64; ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        particular[pc] = aug[r][ncols];
    }
    let coef_rows: Vec<Vec<u64>> = aug.iter().map(|r| r[..ncols].to_vec()).collect();
    Some((particular, nullspace_basis(&coef_rows, ncols, p)))
}

/// Extracts the defining linear system of a coset relation: a relation that
/// is nonempty and closed under x − y + z is an affine subspace in group
/// coordinates, and the returned rows are satisfied by exactly its tuples.
pub fn coset_to_linear_system(
    r: &Relation,
    g: &AbelianGroup,
) -> Result<LinearSystem, AlgebraError> {
    if r.is_empty() {
        return Err(AlgebraError::InvalidArgument(
            "the empty relation has no coset structure".into(),
        ));
    }
    for t in r.tuples() {
        for &e in t {
            if !g.carrier().contains(e) {
                return Err(AlgebraError::DomainMismatch(format!(
                    "relation entry {e} is outside the group carrier"
                )));
            }
        }
    }
    let coords = group_coords(g)?;
    if !is_polymorphism(&g.affine_op(), r)? {
        return Err(AlgebraError::NotACoset(
            "the relation is not closed under x - y + z".into(),
        ));
    }
    let p = coords.p;
    let dim = coords.dim;
    let ncols = r.arity() * dim;
    let flat = |t: &[u64]| -> Vec<u64> {
        let mut v = Vec::with_capacity(ncols);
        for &e in t {
            v.extend_from_slice(coords.coords_of(e));
        }
        v
    };
    // tuples are sorted, so tuples()[0] is the lexicographically smallest
    let t0 = flat(&r.tuples()[0]);
    let mut diffs: Vec<Vec<u64>> = r
        .tuples()
        .iter()
        .map(|t| {
            flat(t)
                .iter()
                .zip(&t0)
                .map(|(&a, &b)| (a + p - b) % p)
                .collect()
        })
        .collect();
    let pivots = row_reduce(&mut diffs, p);
    debug_assert_eq!(
        (p as usize).pow(pivots.len() as u32),
        r.len(),
        "a relation closed under x - y + z has coset cardinality"
    );
    let complement = nullspace_basis(&diffs, ncols, p);
    let rows = complement
        .into_iter()
        .map(|h| {
            let rhs = h
                .iter()
                .zip(&t0)
                .map(|(&a, &x)| a * x % p)
                .sum::<u64>()
                % p;
            (h, rhs)
        })
        .collect();
    let labeling = g
        .carrier()
        .elements()
        .iter()
        .map(|&e| (e, coords.coords_of(e).to_vec()))
        .collect();
    Ok(LinearSystem {
        modulus: p,
        coords_per_var: dim,
        num_vars: r.arity(),
        rows,
        labeling,
    })
}
