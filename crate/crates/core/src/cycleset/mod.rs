//! Finite cycle sets: validation, derived predicates, retraction, and the
//! invariants used for classification.
//!
//! A cycle set on `{0, .., n-1}` is stored by its left multiplications: row `x`
//! is the permutation `σ_x : y -> x·y`. The axiom checked throughout is
//! `(x·y)·(x·z) = (y·x)·(y·z)`, equivalently `σ_{x·y} ∘ σ_x = σ_{y·x} ∘ σ_y`.

mod iso;
mod solution;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::perm::{generators_commute, orbit_under, GroupType, PermError, PermGroup, Permutation};

pub use iso::find_isomorphism;
pub use solution::{Solution, SolutionError, SolutionJson};

/// Default cap on the number of violations [`validate`] reports.
pub const DEFAULT_VIOLATION_LIMIT: usize = 100;

/// Interchange form `{"n": .., "table": [[..]]}`, row-major and 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub n: usize,
    pub table: Vec<Vec<usize>>,
}

/// One way a table fails to be a cycle set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// Row `row` is not a permutation.
    NonBijectiveRow { row: usize },
    /// `(x·y)·(x·z) != (y·x)·(y·z)`.
    Axiom { x: usize, y: usize, z: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonBijectiveRow { row } => write!(f, "row {row} is not a bijection"),
            Violation::Axiom { x, y, z } => write!(f, "cycle set axiom fails at (x, y, z) = ({x}, {y}, {z})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("table is not a cycle set ({} violation(s), first: {})", .0.len(), .0[0])]
    Violations(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleSetError {
    #[error("retraction is not well defined: classes of {x} and {y} disagree")]
    IllDefinedQuotient { x: usize, y: usize },
    #[error("relabeling is not a bijection of the underlying set")]
    BadRelabeling,
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A finite cycle set.
///
/// Ordering is lexicographic on the row-major table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TableJson", into = "TableJson")]
pub struct CycleSet {
    rows: Vec<Permutation>,
}

/// Checks a raw table, returning every violated triple or non-bijective row
/// (sorted, at most `limit`).
pub fn validate(table: &[Vec<usize>]) -> Result<CycleSet, ValidationError> {
    validate_with_limit(table, DEFAULT_VIOLATION_LIMIT)
}

pub fn validate_with_limit(table: &[Vec<usize>], limit: usize) -> Result<CycleSet, ValidationError> {
    let n = table.len();
    if n == 0 {
        return Err(ValidationError::Malformed("empty table".into()));
    }
    for (x, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(ValidationError::Malformed(format!("row {x} has length {}, expected {n}", row.len())));
        }
        if let Some(&v) = row.iter().find(|&&v| v >= n) {
            return Err(ValidationError::Malformed(format!("row {x} contains out-of-range entry {v}")));
        }
    }
    let mut violations = Vec::new();
    for (x, row) in table.iter().enumerate() {
        if Permutation::from_images(row.clone()).is_err() {
            violations.push(Violation::NonBijectiveRow { row: x });
        }
    }
    'outer: for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let (xy, yx) = (table[x][y], table[y][x]);
            for z in 0..n {
                if violations.len() >= limit {
                    break 'outer;
                }
                if table[xy][table[x][z]] != table[yx][table[y][z]] {
                    violations.push(Violation::Axiom { x, y, z });
                }
            }
        }
    }
    if violations.is_empty() {
        let rows = table.iter().map(|r| Permutation::from_images_unchecked(r.clone())).collect();
        Ok(CycleSet { rows })
    } else {
        violations.truncate(limit);
        Err(ValidationError::Violations(violations))
    }
}

impl TryFrom<TableJson> for CycleSet {
    type Error = ValidationError;

    fn try_from(json: TableJson) -> Result<Self, Self::Error> {
        if json.n != json.table.len() {
            return Err(ValidationError::Malformed(format!(
                "declared n = {} but table has {} rows",
                json.n,
                json.table.len()
            )));
        }
        validate(&json.table)
    }
}

impl From<CycleSet> for TableJson {
    fn from(x: CycleSet) -> Self {
        TableJson { n: x.size(), table: x.table() }
    }
}

/// One retraction step: the quotient by equal rows and the class map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionStep {
    pub quotient: CycleSet,
    /// `projection[x]` is the class of `x`; classes are numbered by least member.
    pub projection: Vec<usize>,
}

impl CycleSet {
    /// Validates a list of left multiplications.
    pub fn from_rows(rows: Vec<Permutation>) -> Result<CycleSet, ValidationError> {
        let table: Vec<Vec<usize>> = rows.iter().map(|r| r.images().to_vec()).collect();
        validate(&table)
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Permutation>) -> CycleSet {
        CycleSet { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// `x·y`.
    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.rows[x].apply(y)
    }

    /// The left multiplication `σ_x`.
    pub fn row(&self, x: usize) -> &Permutation {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Permutation] {
        &self.rows
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|r| r.images().to_vec()).collect()
    }

    /// Row-major flattening of the table.
    pub fn encoding(&self) -> Vec<usize> {
        self.rows.iter().flat_map(|r| r.images().iter().copied()).collect()
    }

    pub fn to_json(&self) -> TableJson {
        self.clone().into()
    }

    /// The squaring map `x -> x·x`.
    pub fn squaring_map(&self) -> Vec<usize> {
        (0..self.size()).map(|x| self.op(x, x)).collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        Permutation::from_images(self.squaring_map()).is_ok()
    }

    pub fn is_square_free(&self) -> bool {
        (0..self.size()).all(|x| self.op(x, x) == x)
    }

    /// Distinct rows in order of first appearance.
    pub fn distinct_rows(&self) -> Vec<Permutation> {
        let mut seen = std::collections::HashSet::new();
        self.rows.iter().filter(|r| seen.insert(*r)).cloned().collect()
    }

    /// The group generated by all left multiplications.
    pub fn permutation_group(&self) -> Result<PermGroup, PermError> {
        PermGroup::generate(&self.distinct_rows(), self.size())
    }

    /// Transitivity of the permutation group, computed from the orbit of 0
    /// under the rows directly.
    pub fn is_indecomposable(&self) -> bool {
        orbit_under(&self.distinct_rows(), self.size(), 0).len() == self.size()
    }

    /// Whether the permutation group is abelian; only the rows need to commute.
    pub fn has_abelian_group(&self) -> bool {
        generators_commute(&self.distinct_rows())
    }

    /// Order and type of the permutation group.
    pub fn group_summary(&self) -> Result<(usize, GroupType), PermError> {
        let g = self.permutation_group()?;
        Ok((g.order(), g.group_type()))
    }

    /// The image `(F(x))` table under a relabeling `F`, i.e. the cycle set
    /// `Y` with `F(x)·F(y) = F(x·y)`.
    pub fn relabel(&self, f: &[usize]) -> Result<CycleSet, CycleSetError> {
        let n = self.size();
        let f = Permutation::from_images(f.to_vec()).map_err(|_| CycleSetError::BadRelabeling)?;
        if f.degree() != n {
            return Err(CycleSetError::BadRelabeling);
        }
        let mut table = vec![vec![0; n]; n];
        for x in 0..n {
            for y in 0..n {
                table[f.apply(x)][f.apply(y)] = f.apply(self.op(x, y));
            }
        }
        let rows = table.into_iter().map(Permutation::from_images_unchecked).collect();
        Ok(CycleSet { rows })
    }

    /// Quotient by the equivalence "same left multiplication".
    pub fn retract(&self) -> Result<RetractionStep, CycleSetError> {
        let n = self.size();
        let mut class_of_row: HashMap<&Permutation, usize> = HashMap::new();
        let mut projection = Vec::with_capacity(n);
        let mut reps = Vec::new();
        for (x, row) in self.rows.iter().enumerate() {
            let next = class_of_row.len();
            let c = *class_of_row.entry(row).or_insert(next);
            if c == next {
                reps.push(x);
            }
            projection.push(c);
        }
        let m = reps.len();
        let mut table = vec![vec![0; m]; m];
        for (cx, &rx) in reps.iter().enumerate() {
            for (cy, &ry) in reps.iter().enumerate() {
                table[cx][cy] = projection[self.op(rx, ry)];
            }
        }
        for x in 0..n {
            for y in 0..n {
                if table[projection[x]][projection[y]] != projection[self.op(x, y)] {
                    return Err(CycleSetError::IllDefinedQuotient { x, y });
                }
            }
        }
        let quotient = validate(&table).map_err(|_| CycleSetError::IllDefinedQuotient { x: 0, y: 0 })?;
        Ok(RetractionStep { quotient, projection })
    }

    /// `σ^0(X), σ^1(X), ..`: stops at size 1 or when a retraction no longer shrinks.
    pub fn retraction_tower(&self) -> Vec<CycleSet> {
        let mut tower = vec![self.clone()];
        loop {
            let last = tower.last().expect("tower is never empty");
            if last.size() == 1 {
                break;
            }
            let next = last.retract().expect("finite cycle sets have well-defined retractions").quotient;
            if next.size() == last.size() {
                break;
            }
            tower.push(next);
        }
        tower
    }

    pub fn retraction_tower_sizes(&self) -> Vec<usize> {
        self.retraction_tower().iter().map(CycleSet::size).collect()
    }

    /// Multipermutation level: least `m` with `|σ^m(X)| = 1`, or `None` if the
    /// tower stalls above size 1.
    pub fn mpl(&self) -> Option<usize> {
        let sizes = self.retraction_tower_sizes();
        (*sizes.last().expect("tower is never empty") == 1).then(|| sizes.len() - 1)
    }

    pub fn to_solution(&self) -> Solution {
        Solution::from_cycle_set(self)
    }

    pub fn from_solution(s: &Solution) -> CycleSet {
        s.to_cycle_set()
    }

    /// An isomorphism `F` onto `other` (`F(x·y) = F(x)·F(y)`), if one exists.
    pub fn are_isomorphic(&self, other: &CycleSet) -> Option<Vec<usize>> {
        find_isomorphism(self, other)
    }

    /// For `X` indecomposable of size `p²` with mpl 2 and cyclic permutation
    /// group: the function `f` with `σ_{x_i} = σ_{x_0}^{1 + p·f(i mod p)}`, where
    /// `x_0` is the least point whose row generates the group and
    /// `x_i = σ_{x_0}^i(x_0)`. `None` when the hypotheses fail.
    pub fn f_invariant(&self) -> Option<Vec<usize>> {
        let n = self.size();
        let base = (0..n).find(|&x| self.rows[x].order() == n)?;
        self.f_invariant_with_base(base)
    }

    /// As [`CycleSet::f_invariant`] with an explicit base point, which must
    /// have a row of order `|X|`.
    pub fn f_invariant_with_base(&self, base: usize) -> Option<Vec<usize>> {
        let n = self.size();
        let (p, k) = arith::prime_power(n)?;
        if k != 2 || !self.is_indecomposable() || !self.has_abelian_group() || self.mpl() != Some(2) {
            return None;
        }
        let phi = &self.rows[base];
        if phi.order() != n {
            return None;
        }
        // x_i = phi^i(base); position[x_i] = i
        let mut points = Vec::with_capacity(n);
        let mut position = vec![0; n];
        let mut cur = base;
        for i in 0..n {
            points.push(cur);
            position[cur] = i;
            cur = phi.apply(cur);
        }
        let mut f = vec![0; p];
        for (i, &xi) in points.iter().enumerate() {
            // in a regular cyclic group σ_{x_i} = phi^e is pinned down by where it sends the base
            let e = position[self.rows[xi].apply(base)];
            if e % p != 1 % p || self.rows[xi] != phi.pow(e as i64) {
                return None;
            }
            let value = (e - 1) / p;
            if i < p {
                f[i] = value;
            } else if f[i % p] != value {
                return None;
            }
        }
        Some(f)
    }

    /// Rows rendered in cycle notation, one per line.
    pub fn to_cycle_notation(&self) -> String {
        self.rows.iter().enumerate().map(|(x, r)| format!("σ_{x} = {r}\n")).collect()
    }
}

impl fmt::Debug for CycleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CycleSet").field("n", &self.size()).field("table", &self.table()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(m: usize) -> CycleSet {
        validate(&(0..m).map(|_| (0..m).map(|j| (j + 1) % m).collect()).collect::<Vec<_>>()).unwrap()
    }

    fn c4_level2() -> CycleSet {
        let a = vec![1, 2, 3, 0];
        let b = vec![3, 0, 1, 2];
        validate(&[a.clone(), b.clone(), a, b]).unwrap()
    }

    fn identity_table(n: usize) -> CycleSet {
        validate(&vec![(0..n).collect::<Vec<_>>(); n]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(c4_level2().size(), 4);
        assert!(validate(&[vec![0]]).is_ok());
        let err = validate(&[vec![0, 1], vec![1, 0]]).unwrap_err();
        match err {
            ValidationError::Violations(v) => assert_eq!(v[0], Violation::Axiom { x: 0, y: 1, z: 0 }),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_malformed() {
        assert!(matches!(validate(&[]), Err(ValidationError::Malformed(_))));
        assert!(matches!(validate(&[vec![0, 1], vec![0]]), Err(ValidationError::Malformed(_))));
        assert!(matches!(validate(&[vec![0, 2], vec![0, 1]]), Err(ValidationError::Malformed(_))));
        match validate(&[vec![0, 0], vec![0, 1]]) {
            Err(ValidationError::Violations(v)) => assert_eq!(v[0], Violation::NonBijectiveRow { row: 0 }),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn violation_limit_truncates() {
        // σ_0 = id, σ_1 = σ_2 = (0 1 2): broken for many triples
        let t = vec![vec![0, 1, 2], vec![1, 2, 0], vec![1, 2, 0]];
        let all = match validate_with_limit(&t, usize::MAX) {
            Err(ValidationError::Violations(v)) => v,
            _ => panic!(),
        };
        assert!(all.len() > 2);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        match validate_with_limit(&t, 2) {
            Err(ValidationError::Violations(v)) => assert_eq!(v, all[..2].to_vec()),
            _ => panic!(),
        }
    }

    #[test]
    fn predicates() {
        assert!(shift(4).is_nondegenerate());
        assert!(!shift(4).is_square_free());
        assert!(c4_level2().is_nondegenerate());
        assert!(identity_table(3).is_square_free() && identity_table(3).is_nondegenerate());
        assert!(c4_level2().is_indecomposable());
        assert!(!identity_table(2).is_indecomposable());
        assert!(shift(6).is_indecomposable());
    }

    #[test]
    fn permutation_groups() {
        let g = c4_level2().permutation_group().unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.cyclic_generator().unwrap().to_string(), "(0 1 2 3)");
        assert_eq!(identity_table(3).permutation_group().unwrap().order(), 1);
    }

    #[test]
    fn retraction_examples() {
        let step = c4_level2().retract().unwrap();
        assert_eq!(step.projection, vec![0, 1, 0, 1]);
        assert_eq!(step.quotient, shift(2));
        assert_eq!(shift(5).retract().unwrap().quotient.size(), 1);
        assert_eq!(c4_level2().retraction_tower_sizes(), vec![4, 2, 1]);
        assert_eq!(shift(6).retraction_tower_sizes(), vec![6, 1]);
        assert_eq!(c4_level2().mpl(), Some(2));
        assert_eq!(shift(3).mpl(), Some(1));
        assert_eq!(validate(&[vec![0]]).unwrap().mpl(), Some(0));
    }

    #[test]
    fn irretractable_has_no_level() {
        // all four rows differ, so the first retraction is the identity map
        let x = validate(&[vec![0, 1, 3, 2], vec![2, 3, 1, 0], vec![1, 0, 2, 3], vec![3, 2, 0, 1]]).unwrap();
        assert_eq!(x.retraction_tower_sizes(), vec![4]);
        assert_eq!(x.mpl(), None);
        assert!(!x.has_abelian_group());
    }

    #[test]
    fn relabel_produces_isomorphic_copy() {
        let x = c4_level2();
        let f = vec![2, 0, 3, 1];
        let y = x.relabel(&f).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(y.op(f[a], f[b]), f[x.op(a, b)]);
            }
        }
        assert!(x.relabel(&[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn f_invariant_examples() {
        assert_eq!(c4_level2().f_invariant(), Some(vec![0, 1]));
        assert_eq!(shift(4).f_invariant(), None);
    }

    #[test]
    fn json_round_trip() {
        let x = c4_level2();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"n":4,"table":[[1,2,3,0],[3,0,1,2],[1,2,3,0],[3,0,1,2]]}"#);
        assert_eq!(serde_json::from_str::<CycleSet>(&s).unwrap(), x);
        assert!(serde_json::from_str::<CycleSet>(r#"{"n":2,"table":[[0,1],[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<CycleSet>(r#"{"n":3,"table":[[0,1],[1,0]]}"#).is_err());
    }
}
