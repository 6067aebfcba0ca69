//! Indecomposable cycle sets of size `p^k` with cyclic permutation group.
//!
//! A [`CyclicBuildSpec`] describes `X = {0, .., p^k - 1}` with rows
//! `σ_i = ψ^{e_i}`, where `ψ = (0 1 .. p^k-1)` and
//!
//! ```text
//! e_i = 1 + p^{j_{n-1}} f_{n-1}(i) + .. + p^{j_1} f_1(i)
//! ```
//!
//! with `f_m` read on `i mod p^{j_m}`. The cycle set axiom for such rows is the
//! congruence `Q_{i,j} ≡ Q_{j,i} (mod p^k)` where
//!
//! ```text
//! K_{j,i} = j + 1 + p^{j_{n-1}} f_{n-1}(i) + .. + p^{j_2} f_2(i)
//! Q_{j,i} = Σ_m p^{j_m} f_m(i) + Σ_m p^{j_m} f_m(K_{j,i})
//! ```
//!
//! The leading coefficient in `K` is `p^{j_{n-1}}` (the size of the
//! second-to-last retraction), which is what makes `Q_{j,i}` the exponent of
//! `σ_{σ_i(j)} σ_i` minus 2.

use serde::{Deserialize, Serialize};

use super::{mixed_radix_digits, ConstructError};
use crate::arith;
use crate::cycleset::CycleSet;
use crate::perm::Permutation;

/// Parameters of the prime-power construction.
///
/// `exponents` is the chain `j_0 = k > j_1 > .. > j_level = 0`;
/// `digit_functions[m - 1]` is the table of `f_m` on `{0, .., p^{j_m} - 1}`
/// for `m = 1 .. level - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicBuildSpec {
    pub p: usize,
    pub k: u32,
    pub level: usize,
    pub exponents: Vec<u32>,
    pub digit_functions: Vec<Vec<usize>>,
}

/// A failed `Q_{i,j} ≡ Q_{j,i}` congruence; `q_ij` and `q_ji` are reduced mod `p^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QWitness {
    pub i: usize,
    pub j: usize,
    pub q_ij: usize,
    pub q_ji: usize,
}

impl CyclicBuildSpec {
    pub fn size(&self) -> usize {
        self.p.pow(self.k)
    }

    /// `p^{j_m}`.
    pub fn block(&self, m: usize) -> usize {
        self.p.pow(self.exponents[m])
    }

    /// `f_m(x mod p^{j_m})` for `m` in `1..level`.
    pub fn digit(&self, m: usize, x: usize) -> usize {
        self.digit_functions[m - 1][x % self.block(m)]
    }

    /// `Σ_{m >= from} p^{j_m} f_m(x)`, not reduced.
    fn weighted_digits(&self, x: usize, from: usize) -> usize {
        (from..self.level).map(|m| self.block(m) * self.digit(m, x)).sum()
    }

    /// `φ_m(l) = 1 + Σ_{r >= m} p^{j_r} f_r(l)`.
    pub fn phi(&self, m: usize, l: usize) -> usize {
        1 + self.weighted_digits(l, m)
    }

    /// Exponent `e_i` of `ψ` in `σ_i`, reduced mod `p^k`.
    pub fn row_exponent(&self, i: usize) -> usize {
        (1 + self.weighted_digits(i, 1)) % self.size()
    }

    pub fn k_value(&self, j: usize, i: usize) -> usize {
        j + 1 + self.weighted_digits(i, 2)
    }

    pub fn q_value(&self, j: usize, i: usize) -> usize {
        self.weighted_digits(i, 1) + self.weighted_digits(self.k_value(j, i), 1)
    }

    /// Structural checks: prime `p`, exponent chain, table shapes and ranges.
    fn check_shape(&self) -> Result<(), ConstructError> {
        if !arith::is_prime(self.p) {
            return Err(ConstructError::NotPrime(self.p));
        }
        let chain_err = |reason: String| Err(ConstructError::ExponentChain(reason));
        if self.level < 2 {
            return chain_err(format!("level must be at least 2, got {}", self.level));
        }
        if self.exponents.len() != self.level + 1 {
            return chain_err(format!("expected {} exponents, got {}", self.level + 1, self.exponents.len()));
        }
        if self.exponents[0] != self.k || self.exponents[self.level] != 0 {
            return chain_err(format!("chain must run from j_0 = k = {} down to 0", self.k));
        }
        if self.exponents.windows(2).any(|w| w[1] >= w[0]) {
            return chain_err("exponents must be strictly decreasing".into());
        }
        if self.size() > 1 << 16 {
            return chain_err(format!("p^k = {} is too large", self.size()));
        }
        if self.digit_functions.len() != self.level - 1 {
            return Err(ConstructError::DigitFunction {
                index: 0,
                reason: format!("expected {} digit functions, got {}", self.level - 1, self.digit_functions.len()),
            });
        }
        for m in 1..self.level {
            let table = &self.digit_functions[m - 1];
            let bound = self.p.pow(self.exponents[m - 1] - self.exponents[m]);
            if table.len() != self.block(m) {
                return Err(ConstructError::DigitFunction {
                    index: m,
                    reason: format!("table has length {}, expected {}", table.len(), self.block(m)),
                });
            }
            if let Some(v) = table.iter().find(|&&v| v >= bound) {
                return Err(ConstructError::DigitFunction {
                    index: m,
                    reason: format!("value {v} outside 0..{bound}"),
                });
            }
        }
        Ok(())
    }

    fn check_zero(&self) -> Result<(), ConstructError> {
        match (1..self.level).find(|&m| self.digit_functions[m - 1][0] != 0) {
            Some(m) => Err(ConstructError::DigitFunction { index: m, reason: "f(0) must be 0".into() }),
            None => Ok(()),
        }
    }

    /// First colliding pair of each `φ_m`.
    fn check_injective(&self) -> Result<(), ConstructError> {
        for m in 1..self.level {
            let mut seen = std::collections::HashMap::new();
            for l in 0..self.block(m) {
                if let Some(&first) = seen.get(&self.phi(m, l)) {
                    return Err(ConstructError::NotInjective { index: m, first, second: l });
                }
                seen.insert(self.phi(m, l), l);
            }
        }
        Ok(())
    }

    /// Runs every check, cheapest first: exponent chain, `f(0) = 0`,
    /// injectivity of each `φ_m`, then the `Q` congruences.
    pub fn validate(&self) -> Result<(), ConstructError> {
        self.check_shape()?;
        self.check_zero()?;
        self.check_injective()?;
        q_symmetry_check(self).map_err(ConstructError::QSymmetry)
    }
}

/// Evaluates `Q` on all pairs; returns the first pair `(i, j)`, `i < j`, with
/// `Q_{i,j} ≢ Q_{j,i} (mod p^k)`. Assumes the spec is structurally well formed.
pub fn q_symmetry_check(spec: &CyclicBuildSpec) -> Result<(), QWitness> {
    let n = spec.size();
    let q: Vec<Vec<usize>> = (0..n).map(|j| (0..n).map(|i| spec.q_value(j, i) % n).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            if q[i][j] != q[j][i] {
                return Err(QWitness { i, j, q_ij: q[i][j], q_ji: q[j][i] });
            }
        }
    }
    Ok(())
}

/// Builds the cycle set described by a validated spec.
pub fn build_prime_power(spec: &CyclicBuildSpec) -> Result<CycleSet, ConstructError> {
    spec.validate()?;
    let n = spec.size();
    let rows = (0..n).map(|i| Permutation::shift(n, spec.row_exponent(i))).collect();
    Ok(CycleSet::from_rows_unchecked(rows))
}

/// Relabeling onto the normal form: `x_0` is the least point whose row has
/// order `|X|`, and `x_i = σ_{x_0}^i(x_0)` is sent to `i`. Returns the image
/// list of the relabeling.
pub fn cyclic_normal_labels(x: &CycleSet) -> Option<Vec<usize>> {
    let n = x.size();
    let base = (0..n).find(|&a| x.row(a).order() == n)?;
    let mut labels = vec![0; n];
    let mut cur = base;
    for i in 0..n {
        labels[cur] = i;
        cur = x.op(base, cur);
    }
    Some(labels)
}

/// Recovers construction parameters from an indecomposable cycle set of size
/// `p^k` with cyclic permutation group and level at least 2.
///
/// The returned spec rebuilds the relabeled copy `x.relabel(cyclic_normal_labels(x))`
/// exactly, so its output is isomorphic to `x`.
pub fn extract_spec(x: &CycleSet) -> Result<CyclicBuildSpec, ConstructError> {
    let unmet = |reason: &str| Err(ConstructError::HypothesesUnmet(reason.to_string()));
    let n = x.size();
    let Some((p, k)) = arith::prime_power(n) else {
        return unmet("size is not a prime power");
    };
    if !x.is_indecomposable() {
        return unmet("not indecomposable");
    }
    if !x.has_abelian_group() {
        return unmet("permutation group is not abelian");
    }
    let Some(labels) = cyclic_normal_labels(x) else {
        return unmet("no left multiplication generates the permutation group");
    };
    let y = x.relabel(&labels).expect("normal labels are a bijection");
    // in the normal form σ_0 = ψ, and every row is a power of ψ
    let exponents_of_rows: Vec<usize> = (0..n).map(|i| y.op(i, 0)).collect();
    for (i, &e) in exponents_of_rows.iter().enumerate() {
        if *y.row(i) != Permutation::shift(n, e) {
            return unmet("permutation group is not cyclic");
        }
    }
    let Some(level) = y.mpl() else {
        return unmet("not multipermutational");
    };
    if level < 2 {
        return unmet("level is below 2");
    }
    let sizes = y.retraction_tower_sizes();
    let mut exponents = Vec::with_capacity(sizes.len());
    for s in &sizes {
        match arith::prime_power(*s) {
            Some((q, e)) if q == p => exponents.push(e),
            _ if *s == 1 => exponents.push(0),
            _ => return unmet("retraction sizes are not powers of p"),
        }
    }
    // digits of e_i - 1 in the radix chain 0 < j_{n-1} < .. < j_1 < k
    let mut radix: Vec<u32> = vec![0];
    radix.extend(exponents[1..level].iter().rev());
    radix.push(k);
    let mut digit_functions: Vec<Vec<Option<usize>>> =
        (1..level).map(|m| vec![None; p.pow(exponents[m])]).collect();
    for (i, &e) in exponents_of_rows.iter().enumerate() {
        let digits = mixed_radix_digits((e + n - 1) % n, p, &radix)?;
        if digits[0] != 0 {
            return unmet("row exponent is not 1 modulo the last retraction size");
        }
        // digits[r] multiplies p^{j_{level - r}}
        for m in 1..level {
            let d = digits[level - m];
            let slot = &mut digit_functions[m - 1][i % p.pow(exponents[m])];
            match slot {
                None => *slot = Some(d),
                Some(prev) if *prev == d => {}
                Some(_) => return unmet("digit is not constant on residue classes"),
            }
        }
    }
    let spec = CyclicBuildSpec {
        p,
        k,
        level,
        exponents,
        digit_functions: digit_functions
            .into_iter()
            .map(|t| t.into_iter().map(|d| d.expect("every residue occurs")).collect())
            .collect(),
    };
    let rebuilt = build_prime_power(&spec)?;
    if rebuilt != y {
        return unmet("extracted parameters do not rebuild the input");
    }
    Ok(spec)
}
