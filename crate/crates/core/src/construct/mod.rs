//! Explicit constructions of indecomposable cycle sets.
//!
//! Pair-indexed cycle sets are flattened as `(a, i) -> a·m + i`, where `m` is
//! the size of the second coordinate. Both [`build_elementary_abelian`] and
//! [`DynamicalCocycle::extension`] use this.

mod cocycle;
mod prime_power;

use thiserror::Error;

use crate::arith;
use crate::cycleset::CycleSet;
use crate::perm::Permutation;

pub use cocycle::{CocycleJson, CocycleWitness, DynamicalCocycle};
pub use prime_power::{build_prime_power, cyclic_normal_labels, extract_spec, q_symmetry_check, CyclicBuildSpec, QWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad exponent chain: {0}")]
    ExponentChain(String),
    #[error("digit function f_{index}: {reason}")]
    DigitFunction { index: usize, reason: String },
    #[error("φ_{index} is not injective: {first} and {second} collide")]
    NotInjective { index: usize, first: usize, second: usize },
    #[error("Q_{{{}, {}}} = {} but Q_{{{}, {}}} = {} (mod p^k)", .0.i, .0.j, .0.q_ij, .0.j, .0.i, .0.q_ji)]
    QSymmetry(QWitness),
    #[error("mixed-radix input {value} is out of range 0..{bound}")]
    RadixOutOfRange { value: usize, bound: usize },
    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),
    #[error("cocycle condition fails at {0:?}")]
    Cocycle(CocycleWitness),
    #[error("malformed cocycle: {0}")]
    MalformedCocycle(String),
}

/// `i·j = j + 1 mod m`.
pub fn trivial_cycle_set(m: usize) -> Result<CycleSet, ConstructError> {
    if m == 0 {
        return Err(ConstructError::InvalidParameter("size must be at least 1".into()));
    }
    let row = Permutation::standard_cycle(m);
    Ok(CycleSet::from_rows_unchecked(vec![row; m]))
}

/// Digits `(a_0, .., a_m)` with `value = a_0 + a_1 p^{j_1} + .. + a_m p^{j_m}` and
/// `a_i < p^{j_{i+1} - j_i}`, for the chain `exponents = (0 = j_0, j_1, .., j_{m+1})`.
pub fn mixed_radix_digits(value: usize, p: usize, exponents: &[u32]) -> Result<Vec<usize>, ConstructError> {
    check_radix_chain(p, exponents)?;
    let top = p.pow(*exponents.last().expect("chain checked non-empty"));
    if value >= top {
        return Err(ConstructError::RadixOutOfRange { value, bound: top });
    }
    let mut rest = value;
    let mut digits = Vec::with_capacity(exponents.len() - 1);
    for w in exponents.windows(2) {
        let base = p.pow(w[1] - w[0]);
        digits.push(rest % base);
        rest /= base;
    }
    Ok(digits)
}

/// Inverse of [`mixed_radix_digits`].
pub fn mixed_radix_compose(digits: &[usize], p: usize, exponents: &[u32]) -> Result<usize, ConstructError> {
    check_radix_chain(p, exponents)?;
    if digits.len() + 1 != exponents.len() {
        return Err(ConstructError::InvalidParameter("digit count must be one less than the chain length".into()));
    }
    let mut value = 0;
    for (d, w) in digits.iter().zip(exponents.windows(2)) {
        if *d >= p.pow(w[1] - w[0]) {
            return Err(ConstructError::InvalidParameter(format!("digit {d} out of range")));
        }
        value += d * p.pow(w[0]);
    }
    Ok(value)
}

fn check_radix_chain(p: usize, exponents: &[u32]) -> Result<(), ConstructError> {
    if p < 2 {
        return Err(ConstructError::InvalidParameter(format!("radix base {p} must be at least 2")));
    }
    if exponents.len() < 2 || exponents[0] != 0 || exponents.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConstructError::InvalidParameter(
            "radix chain must start at 0 and be strictly increasing with at least two entries".into(),
        ));
    }
    Ok(())
}

/// The `p - 1` maps `k -> k·t mod p`, `t = 1..p-1`: the bijections of `Z/p`
/// fixing 0 with `f(i+1) + f(j) ≡ f(i) + f(j+1) (mod p)`.
pub fn lemma2_functions(p: usize) -> Result<Vec<Vec<usize>>, ConstructError> {
    if !arith::is_prime(p) {
        return Err(ConstructError::NotPrime(p));
    }
    Ok((1..p).map(|t| (0..p).map(|k| k * t % p).collect()).collect())
}

/// The level-2 cycle set of size `p²` with `σ_i = ψ^{1 + p·(i·t mod p)}`.
pub fn build_p2_level2(p: usize, t: usize) -> Result<CycleSet, ConstructError> {
    if !arith::is_prime(p) {
        return Err(ConstructError::NotPrime(p));
    }
    if t == 0 || t >= p {
        return Err(ConstructError::InvalidParameter(format!("t must lie in 1..{p}, got {t}")));
    }
    let n = p * p;
    let rows = (0..n).map(|i| Permutation::shift(n, 1 + p * (i * t % p))).collect();
    Ok(CycleSet::from_rows_unchecked(rows))
}

/// `(a, i)·(b, j) = (b + 1, α^a(j))` on `Z/p × Z/p`, for a `p`-cycle `α`.
pub fn build_elementary_abelian(p: usize, alpha: &Permutation) -> Result<CycleSet, ConstructError> {
    if !arith::is_prime(p) {
        return Err(ConstructError::NotPrime(p));
    }
    if alpha.degree() != p || !alpha.is_full_cycle() {
        return Err(ConstructError::InvalidParameter(format!("alpha = {alpha} is not a {p}-cycle on Z/{p}")));
    }
    let powers: Vec<Permutation> = (0..p).map(|a| alpha.pow(a as i64)).collect();
    let n = p * p;
    let rows = (0..n)
        .map(|x| {
            let a = x / p;
            Permutation::from_images_unchecked(
                (0..n).map(|y| ((y / p + 1) % p) * p + powers[a].apply(y % p)).collect(),
            )
        })
        .collect();
    Ok(CycleSet::from_rows_unchecked(rows))
}
