//! Dynamical cocycles over a base cycle set and their extensions
//! `(s, i)·(t, j) = (α_{(i,j)}(s, t), i·j)` on `S × I`.

use serde::{Deserialize, Serialize};

use super::ConstructError;
use crate::cycleset::{CycleSet, TableJson};
use crate::perm::Permutation;

/// Interchange form. `alpha[i][j][s]` is the image list of `t -> α_{(i,j)}(s, t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleJson {
    pub base: TableJson,
    pub fiber: usize,
    pub alpha: Vec<Vec<Vec<Vec<usize>>>>,
}

/// A point `(i, j, k, r, s, t)` where the cocycle condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleWitness {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

/// A family `α_{(i,j)}(s, -)` of permutations of the fiber, not yet checked
/// against the cocycle condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CocycleJson", into = "CocycleJson")]
pub struct DynamicalCocycle {
    base: CycleSet,
    fiber: usize,
    alpha: Vec<Permutation>,
}

impl DynamicalCocycle {
    pub fn new(base: CycleSet, fiber: usize, alpha: Vec<Vec<Vec<Vec<usize>>>>) -> Result<Self, ConstructError> {
        let m = base.size();
        if fiber == 0 {
            return Err(ConstructError::MalformedCocycle("fiber must be non-empty".into()));
        }
        if alpha.len() != m || alpha.iter().any(|a| a.len() != m || a.iter().any(|b| b.len() != fiber)) {
            return Err(ConstructError::MalformedCocycle(format!("alpha must be indexed {m} × {m} × {fiber}")));
        }
        let mut flat = Vec::with_capacity(m * m * fiber);
        for (i, ai) in alpha.into_iter().enumerate() {
            for (j, aij) in ai.into_iter().enumerate() {
                for (s, images) in aij.into_iter().enumerate() {
                    if images.len() != fiber || images.iter().any(|&v| v >= fiber) {
                        return Err(ConstructError::MalformedCocycle(format!("alpha[{i}][{j}][{s}] is not a map of the fiber")));
                    }
                    let p = Permutation::from_images(images).map_err(|_| {
                        ConstructError::MalformedCocycle(format!("alpha[{i}][{j}][{s}] is not a permutation"))
                    })?;
                    flat.push(p);
                }
            }
        }
        Ok(DynamicalCocycle { base, fiber, alpha: flat })
    }

    /// Builds the family from a closure `(i, j, s, t) -> α_{(i,j)}(s, t)`.
    pub fn from_fn(base: CycleSet, fiber: usize, f: impl Fn(usize, usize, usize, usize) -> usize) -> Result<Self, ConstructError> {
        let m = base.size();
        let alpha = (0..m)
            .map(|i| (0..m).map(|j| (0..fiber).map(|s| (0..fiber).map(|t| f(i, j, s, t)).collect()).collect()).collect())
            .collect();
        Self::new(base, fiber, alpha)
    }

    pub fn base(&self) -> &CycleSet {
        &self.base
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    /// `α_{(i,j)}(s, t)`.
    #[inline]
    pub fn alpha(&self, i: usize, j: usize, s: usize, t: usize) -> usize {
        let m = self.base.size();
        self.alpha[(i * m + j) * self.fiber + s].apply(t)
    }

    /// First failure of
    /// `α_{(i·j, i·k)}(α_{(i,j)}(r,s), α_{(i,k)}(r,t)) = α_{(j·i, j·k)}(α_{(j,i)}(s,r), α_{(j,k)}(s,t))`
    /// in lexicographic `(i, j, k, r, s, t)` order.
    pub fn cocycle_failure(&self) -> Option<CocycleWitness> {
        let m = self.base.size();
        let n = self.fiber;
        let x = &self.base;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let (ij, ik, ji, jk) = (x.op(i, j), x.op(i, k), x.op(j, i), x.op(j, k));
                    for r in 0..n {
                        for s in 0..n {
                            for t in 0..n {
                                let lhs = self.alpha(ij, ik, self.alpha(i, j, r, s), self.alpha(i, k, r, t));
                                let rhs = self.alpha(ji, jk, self.alpha(j, i, s, r), self.alpha(j, k, s, t));
                                if lhs != rhs {
                                    return Some(CocycleWitness { i, j, k, r, s, t });
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        match self.cocycle_failure() {
            Some(w) => Err(ConstructError::Cocycle(w)),
            None => Ok(()),
        }
    }

    /// The extension on `S × I`, with `(s, i)` stored at `s·|I| + i`.
    pub fn extension(&self) -> Result<CycleSet, ConstructError> {
        self.validate()?;
        let m = self.base.size();
        let size = m * self.fiber;
        let rows = (0..size)
            .map(|a| {
                let (s, i) = (a / m, a % m);
                Permutation::from_images_unchecked(
                    (0..size)
                        .map(|b| {
                            let (t, j) = (b / m, b % m);
                            self.alpha(i, j, s, t) * m + self.base.op(i, j)
                        })
                        .collect(),
                )
            })
            .collect();
        let ext = CycleSet::from_rows_unchecked(rows);
        debug_assert!(crate::cycleset::validate(&ext.table()).is_ok());
        Ok(ext)
    }

    pub fn to_json(&self) -> CocycleJson {
        self.clone().into()
    }
}

impl TryFrom<CocycleJson> for DynamicalCocycle {
    type Error = ConstructError;

    fn try_from(json: CocycleJson) -> Result<Self, Self::Error> {
        let base = CycleSet::try_from(json.base).map_err(|e| ConstructError::MalformedCocycle(format!("base: {e}")))?;
        DynamicalCocycle::new(base, json.fiber, json.alpha)
    }
}

impl From<DynamicalCocycle> for CocycleJson {
    fn from(c: DynamicalCocycle) -> Self {
        let m = c.base.size();
        let alpha = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..c.fiber).map(|s| c.alpha[(i * m + j) * c.fiber + s].images().to_vec()).collect())
                    .collect()
            })
            .collect();
        CocycleJson { base: c.base.to_json(), fiber: c.fiber, alpha }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_elementary_abelian, trivial_cycle_set};

    #[test]
    fn constant_identity_cocycle_is_decomposable() {
        let c = DynamicalCocycle::from_fn(trivial_cycle_set(3).unwrap(), 2, |_, _, _, t| t).unwrap();
        let x = c.extension().unwrap();
        assert_eq!(x.size(), 6);
        assert!(!x.is_indecomposable());
        // (s, i)·(t, j) = (t, j + 1)
        assert_eq!(x.op(1 * 3 + 2, 0 * 3 + 1), 0 * 3 + 2);
    }

    #[test]
    fn translation_cocycle_gives_the_elementary_abelian_set() {
        for p in [2, 3, 5] {
            let c = DynamicalCocycle::from_fn(trivial_cycle_set(p).unwrap(), p, |i, _, _, t| (t + i) % p).unwrap();
            let x = c.extension().unwrap();
            assert!(crate::cycleset::validate(&x.table()).is_ok());
            let y = build_elementary_abelian(p, &Permutation::standard_cycle(p)).unwrap();
            assert!(x.are_isomorphic(&y).is_some());
            // swapping the two coordinates is an explicit isomorphism
            let swap: Vec<usize> = (0..p * p).map(|a| (a % p) * p + a / p).collect();
            assert_eq!(x.relabel(&swap).unwrap(), y);
        }
    }

    #[test]
    fn additive_cocycle_fails() {
        // α_{(i,j)}(s, t) = t + s at p = 2: the two sides are s + t and r + t
        let p = 2;
        let c = DynamicalCocycle::from_fn(trivial_cycle_set(p).unwrap(), p, |_, _, s, t| (t + s) % p).unwrap();
        let w = c.cocycle_failure().unwrap();
        assert_eq!(w, CocycleWitness { i: 0, j: 0, k: 0, r: 0, s: 1, t: 0 });
        let x = c.base();
        let lhs = c.alpha(x.op(w.i, w.j), x.op(w.i, w.k), c.alpha(w.i, w.j, w.r, w.s), c.alpha(w.i, w.k, w.r, w.t));
        let rhs = c.alpha(x.op(w.j, w.i), x.op(w.j, w.k), c.alpha(w.j, w.i, w.s, w.r), c.alpha(w.j, w.k, w.s, w.t));
        assert_ne!(lhs, rhs);
        assert!(matches!(c.extension(), Err(ConstructError::Cocycle(_))));
    }

    #[test]
    fn malformed_inputs() {
        let base = trivial_cycle_set(2).unwrap();
        assert!(DynamicalCocycle::new(base.clone(), 2, vec![]).is_err());
        let bad = vec![vec![vec![vec![0, 0], vec![0, 1]]; 2]; 2];
        assert!(matches!(DynamicalCocycle::new(base.clone(), 2, bad), Err(ConstructError::MalformedCocycle(_))));
        assert!(DynamicalCocycle::new(base, 0, vec![vec![vec![]; 2]; 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = DynamicalCocycle::from_fn(trivial_cycle_set(2).unwrap(), 2, |i, _, _, t| (t + i) % 2).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.starts_with(r#"{"base":{"n":2,"table":[[1,0],[1,0]]},"fiber":2,"alpha":[[[[0,1],[0,1]]"#));
        assert_eq!(serde_json::from_str::<DynamicalCocycle>(&text).unwrap(), c);
    }
}
