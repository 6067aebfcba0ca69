//! Enumeration and classification drivers.
//!
//! Two independent routes produce indecomposable cycle sets with abelian
//! permutation group: the parameterized constructions of [`crate::construct`]
//! and a brute-force search over tables whose rows lie in a regular abelian
//! group. A transitive abelian group acts regularly, so after relabeling every
//! such cycle set has its rows in the regular representation of its group;
//! searching one template per abelian group of order `n` is therefore
//! complete up to isomorphism.

mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::construct::{
    build_elementary_abelian, build_p2_level2, build_prime_power, trivial_cycle_set, ConstructError, CyclicBuildSpec,
};
use crate::cycleset::CycleSet;
use crate::perm::{GroupType, PermError, Permutation};

pub use search::{abelian_group_types, abelian_templates, enumerate_in_template, Template};

pub const DEFAULT_MAX_CANDIDATES: u64 = 100_000_000;

/// Largest size accepted by full-mode search.
pub const FULL_MODE_LIMIT: usize = 9;
/// Largest size accepted by restricted-mode search.
pub const RESTRICTED_MODE_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("search budget of {limit} candidates exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("parameterized route and brute-force oracle disagree: {0}")]
    OracleDisagreement(String),
    #[error("mode {0} is not supported here")]
    InvalidMode(SearchMode),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Rows range over all of `Sym(n)`.
    #[serde(alias = "full-bruteforce")]
    Full,
    /// Rows range over one regular abelian group per isomorphism type.
    #[serde(alias = "regular-abelian-restricted")]
    RegularAbelian,
    /// The parameterized constructions only.
    #[serde(alias = "spec-parameterized")]
    Spec,
}

impl std::fmt::Display for SearchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMode::Full => "full",
            SearchMode::RegularAbelian => "regular-abelian",
            SearchMode::Spec => "spec",
        })
    }
}

impl std::str::FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" | "full-bruteforce" => Ok(SearchMode::Full),
            "regular-abelian" | "regular-abelian-restricted" => Ok(SearchMode::RegularAbelian),
            "spec" | "spec-parameterized" => Ok(SearchMode::Spec),
            other => Err(format!("unknown mode {other:?} (expected full, regular-abelian or spec)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_candidates: u64,
    pub parallel: bool,
    pub mode: SearchMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_candidates: DEFAULT_MAX_CANDIDATES, parallel: true, mode: SearchMode::RegularAbelian }
    }
}

impl SearchConfig {
    pub fn with_mode(mode: SearchMode) -> Self {
        SearchConfig { mode, ..Self::default() }
    }

    fn check(&self) -> Result<(), ClassifyError> {
        if self.max_candidates == 0 {
            return Err(ClassifyError::InvalidParameter("budget must be positive".into()));
        }
        Ok(())
    }
}

/// One isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    /// The member with the least row-major table.
    pub witness: CycleSet,
    pub mpl: Option<usize>,
    pub group_order: usize,
    pub group_type: GroupType,
    pub f_invariant: Option<Vec<usize>>,
    /// Number of input tables in the class.
    pub raw_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub size: usize,
    /// `any`, `abelian-group` or `cyclic-group`.
    pub constraint: String,
    pub templates_searched: Vec<String>,
    pub classes: Vec<ClassEntry>,
}

impl ClassificationReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn witnesses(&self) -> Vec<&CycleSet> {
        self.classes.iter().map(|c| &c.witness).collect()
    }
}

/// Greedy partition into isomorphism classes. Inputs are visited in table
/// order, so each witness is the least member of its class; classes appear in
/// order of their witnesses. All inputs should have the same size.
pub fn dedupe_by_isomorphism(xs: &[CycleSet]) -> Result<ClassificationReport, ClassifyError> {
    let mut sorted: Vec<&CycleSet> = xs.iter().collect();
    sorted.sort();
    let mut reps: Vec<(&CycleSet, usize)> = Vec::new();
    for x in sorted {
        match reps.iter_mut().find(|(w, _)| w.are_isomorphic(x).is_some()) {
            Some((_, count)) => *count += 1,
            None => reps.push((x, 1)),
        }
    }
    let classes = reps
        .into_iter()
        .map(|(w, raw_count)| {
            let (group_order, group_type) = w.group_summary()?;
            Ok(ClassEntry {
                witness: w.clone(),
                mpl: w.mpl(),
                group_order,
                group_type,
                f_invariant: w.f_invariant(),
                raw_count,
            })
        })
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    Ok(ClassificationReport {
        size: xs.first().map_or(0, CycleSet::size),
        constraint: "any".into(),
        templates_searched: Vec::new(),
        classes,
    })
}

/// Every cycle set on `{0, .., n-1}` allowed by the mode, sorted and without
/// repeats. Full mode searches `Sym(n)` (`n ≤ 9`); restricted mode searches
/// every regular abelian group of order `n` (`n ≤ 25`). Raw tables are not
/// quotiented by relabeling.
pub fn brute_force_enumerate(n: usize, config: &SearchConfig) -> Result<Vec<CycleSet>, ClassifyError> {
    config.check()?;
    if n == 0 {
        return Err(ClassifyError::InvalidParameter("size must be at least 1".into()));
    }
    match config.mode {
        SearchMode::Full => {
            if n > FULL_MODE_LIMIT {
                return Err(ClassifyError::InvalidParameter(format!("full mode supports n ≤ {FULL_MODE_LIMIT}")));
            }
            enumerate_in_template(&Template::symmetric(n), config.max_candidates, config.parallel)
        }
        SearchMode::RegularAbelian => {
            if n > RESTRICTED_MODE_LIMIT {
                return Err(ClassifyError::InvalidParameter(format!(
                    "restricted mode supports n ≤ {RESTRICTED_MODE_LIMIT}"
                )));
            }
            let templates = abelian_templates(n);
            search::enumerate_in_templates(&templates, config.max_candidates, config.parallel)
        }
        SearchMode::Spec => Err(ClassifyError::InvalidMode(SearchMode::Spec)),
    }
}

/// Restricted-mode classification: every indecomposable cycle set of size
/// `n` with abelian permutation group, up to isomorphism.
pub fn classify_by_search(n: usize, config: &SearchConfig) -> Result<ClassificationReport, ClassifyError> {
    let restricted = SearchConfig { mode: SearchMode::RegularAbelian, ..*config };
    let found: Vec<CycleSet> = brute_force_enumerate(n, &restricted)?
        .into_iter()
        .filter(|x| x.is_indecomposable() && x.has_abelian_group())
        .collect();
    let mut report = dedupe_by_isomorphism(&found)?;
    report.size = n;
    report.constraint = "abelian-group".into();
    report.templates_searched = abelian_templates(n).iter().map(|t| t.name().to_string()).collect();
    Ok(report)
}

/// Exponent chains `k = j_0 > j_1 > .. > j_level = 0` with `level ≥ 2`, in
/// lexicographic order.
fn exponent_chains(k: u32, level: Option<usize>) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    // interior exponents are a non-empty subset of 1..k-1, listed in decreasing order
    let interior: Vec<u32> = (1..k).collect();
    for mask in 1u64..(1u64 << interior.len()) {
        let mut chain = vec![k];
        chain.extend(interior.iter().rev().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &j)| j));
        chain.push(0);
        if level.map_or(true, |l| chain.len() - 1 == l) {
            out.push(chain);
        }
    }
    out.sort();
    out
}

/// Every valid [`CyclicBuildSpec`] for `p^k`, optionally at a single level,
/// in lexicographic order of (exponents, digit functions). Each candidate
/// digit table counts against `max_candidates`.
pub fn enumerate_specs(
    p: usize,
    k: u32,
    level: Option<usize>,
    max_candidates: u64,
) -> Result<Vec<CyclicBuildSpec>, ClassifyError> {
    if !arith::is_prime(p) {
        return Err(ConstructError::NotPrime(p).into());
    }
    if k == 0 {
        return Err(ClassifyError::InvalidParameter("k must be at least 1".into()));
    }
    if max_candidates == 0 {
        return Err(ClassifyError::InvalidParameter("budget must be positive".into()));
    }
    let mut used = 0u64;
    let mut out = Vec::new();
    for chain in exponent_chains(k, level) {
        let lvl = chain.len() - 1;
        // f_m has domain p^{j_m} and codomain p^{j_{m-1} - j_m}; position 0 is fixed to 0
        let shapes: Vec<(usize, usize)> =
            (1..lvl).map(|m| (p.pow(chain[m]), p.pow(chain[m - 1] - chain[m]))).collect();
        let free: usize = shapes.iter().map(|(d, _)| d - 1).sum();
        let mut digits = vec![0usize; free];
        loop {
            used += 1;
            if used > max_candidates {
                return Err(ClassifyError::BudgetExceeded { limit: max_candidates });
            }
            let mut tables = Vec::with_capacity(shapes.len());
            let mut pos = 0;
            for &(d, _) in &shapes {
                let mut f = vec![0];
                f.extend_from_slice(&digits[pos..pos + d - 1]);
                pos += d - 1;
                tables.push(f);
            }
            let spec = CyclicBuildSpec { p, k, level: lvl, exponents: chain.clone(), digit_functions: tables };
            if spec.validate().is_ok() {
                out.push(spec);
            }
            // odometer, last digit fastest so the order is lexicographic
            let bounds: Vec<usize> = shapes.iter().flat_map(|&(d, c)| std::iter::repeat(c).take(d - 1)).collect();
            let mut carry = true;
            for i in (0..free).rev() {
                digits[i] += 1;
                if digits[i] < bounds[i] {
                    carry = false;
                    break;
                }
                digits[i] = 0;
            }
            if carry {
                break;
            }
        }
    }
    Ok(out)
}

/// The trivial cycle set of size `p^k` together with every output of
/// [`enumerate_specs`], up to isomorphism. Size `p²` gives exactly the `p`
/// cyclic classes; larger `k` is exploratory.
pub fn classify_cyclic_prime_power(p: usize, k: u32, config: &SearchConfig) -> Result<ClassificationReport, ClassifyError> {
    config.check()?;
    let specs = enumerate_specs(p, k, None, config.max_candidates)?;
    let mut members = vec![trivial_cycle_set(p.pow(k))?];
    for spec in &specs {
        members.push(build_prime_power(spec)?);
    }
    let mut report = dedupe_by_isomorphism(&members)?;
    report.constraint = "cyclic-group".into();
    report.templates_searched = vec!["spec-parameterized".into()];
    Ok(report)
}

/// The parameterized list for size `pq`: the trivial set, and for `p = q`
/// the `p - 1` level-2 cyclic sets and the elementary-abelian set.
pub fn pq_candidates(p: usize, q: usize) -> Result<Vec<CycleSet>, ClassifyError> {
    for r in [p, q] {
        if !arith::is_prime(r) {
            return Err(ConstructError::NotPrime(r).into());
        }
    }
    let mut out = vec![trivial_cycle_set(p * q)?];
    if p == q {
        for t in 1..p {
            out.push(build_p2_level2(p, t)?);
        }
        out.push(build_elementary_abelian(p, &Permutation::standard_cycle(p))?);
    }
    Ok(out)
}

/// Indecomposable cycle sets of size `pq` with abelian permutation group.
/// The classes come from the parameterized constructions; for `pq ≤ 25` they
/// are checked class by class against the restricted brute-force search, and
/// any mismatch is an error. Witnesses are the constructed tables; after the
/// cross-check `raw_count` is the number of searched tables in the class.
pub fn classify_pq(p: usize, q: usize, config: &SearchConfig) -> Result<ClassificationReport, ClassifyError> {
    config.check()?;
    let n = p * q;
    let mut report = dedupe_by_isomorphism(&pq_candidates(p, q)?)?;
    report.constraint = "abelian-group".into();
    report.templates_searched = vec!["spec-parameterized".into()];
    if n <= RESTRICTED_MODE_LIMIT {
        let oracle = classify_by_search(n, config)?;
        compare_class_sets(&report, &oracle)?;
        for entry in &mut report.classes {
            let matched = oracle.classes.iter().find(|o| o.witness.are_isomorphic(&entry.witness).is_some());
            entry.raw_count = matched.expect("class sets were just compared").raw_count;
        }
        report.templates_searched.extend(oracle.templates_searched);
    }
    Ok(report)
}

/// Checks that two reports list the same classes up to isomorphism.
pub fn compare_class_sets(a: &ClassificationReport, b: &ClassificationReport) -> Result<(), ClassifyError> {
    if a.classes.len() != b.classes.len() {
        return Err(ClassifyError::OracleDisagreement(format!(
            "{} classes versus {} at size {}",
            a.classes.len(),
            b.classes.len(),
            a.size
        )));
    }
    for ca in &a.classes {
        if !b.classes.iter().any(|cb| cb.witness.are_isomorphic(&ca.witness).is_some()) {
            return Err(ClassifyError::OracleDisagreement(format!(
                "class with witness {:?} has no counterpart",
                ca.witness.table()
            )));
        }
    }
    Ok(())
}
