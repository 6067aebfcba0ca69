//! Involutive non-degenerate solutions of the set-theoretic Yang-Baxter
//! equation, `r(x, y) = (λ_x(y), ρ_y(x))`, and their correspondence with
//! cycle sets: `λ_x = σ_x^{-1}`, `ρ_y(x) = λ_x(y)·x`, and back `x·y = λ_x^{-1}(y)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::CycleSet;
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("malformed solution: {0}")]
    Malformed(String),
    #[error("{map} row {index} is not a bijection")]
    Degenerate { map: &'static str, index: usize },
    #[error("r is not involutive at ({x}, {y})")]
    NotInvolutive { x: usize, y: usize },
    #[error("braid relation fails at ({x}, {y}, {z})")]
    Braid { x: usize, y: usize, z: usize },
}

/// Interchange form `{"n": .., "lambda": [[..]], "rho": [[..]]}`; row `x` of
/// `lambda` is `λ_x`, row `y` of `rho` is `ρ_y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub n: usize,
    pub lambda: Vec<Vec<usize>>,
    pub rho: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SolutionJson", into = "SolutionJson")]
pub struct Solution {
    lambda: Vec<Permutation>,
    rho: Vec<Permutation>,
}

impl Solution {
    /// Checks non-degeneracy, involutivity on all pairs and the braid relation
    /// on all triples.
    pub fn new(lambda: Vec<Vec<usize>>, rho: Vec<Vec<usize>>) -> Result<Solution, SolutionError> {
        let n = lambda.len();
        if n == 0 || rho.len() != n || lambda.iter().chain(rho.iter()).any(|r| r.len() != n) {
            return Err(SolutionError::Malformed("lambda and rho must both be n×n with n ≥ 1".into()));
        }
        let to_perms = |rows: Vec<Vec<usize>>, map: &'static str| {
            rows.into_iter()
                .enumerate()
                .map(|(index, r)| {
                    if r.iter().any(|&v| v >= n) {
                        return Err(SolutionError::Malformed(format!("{map} row {index} has an out-of-range entry")));
                    }
                    Permutation::from_images(r).map_err(|_| SolutionError::Degenerate { map, index })
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let s = Solution { lambda: to_perms(lambda, "lambda")?, rho: to_perms(rho, "rho")? };
        s.check()?;
        Ok(s)
    }

    pub(crate) fn from_cycle_set(x: &CycleSet) -> Solution {
        let n = x.size();
        let lambda: Vec<Permutation> = x.rows().iter().map(Permutation::inverse).collect();
        let rho = (0..n)
            .map(|y| Permutation::from_images_unchecked((0..n).map(|a| x.op(lambda[a].apply(y), a)).collect()))
            .collect();
        Solution { lambda, rho }
    }

    pub fn size(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self, x: usize) -> &Permutation {
        &self.lambda[x]
    }

    pub fn rho(&self, y: usize) -> &Permutation {
        &self.rho[y]
    }

    /// `r(x, y) = (λ_x(y), ρ_y(x))`.
    #[inline]
    pub fn apply(&self, x: usize, y: usize) -> (usize, usize) {
        (self.lambda[x].apply(y), self.rho[y].apply(x))
    }

    /// First pair where `r² != id`, if any.
    pub fn involutivity_failure(&self) -> Option<(usize, usize)> {
        let n = self.size();
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).find(|&(x, y)| {
            let (a, b) = self.apply(x, y);
            self.apply(a, b) != (x, y)
        })
    }

    /// First triple where `r₁r₂r₁ != r₂r₁r₂`, if any.
    pub fn braid_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.size();
        let r1 = |(a, b, c): (usize, usize, usize)| {
            let (u, v) = self.apply(a, b);
            (u, v, c)
        };
        let r2 = |(a, b, c): (usize, usize, usize)| {
            let (u, v) = self.apply(b, c);
            (a, u, v)
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let t = (x, y, z);
                    if r1(r2(r1(t))) != r2(r1(r2(t))) {
                        return Some(t);
                    }
                }
            }
        }
        None
    }

    pub fn check(&self) -> Result<(), SolutionError> {
        if let Some((x, y)) = self.involutivity_failure() {
            return Err(SolutionError::NotInvolutive { x, y });
        }
        if let Some((x, y, z)) = self.braid_failure() {
            return Err(SolutionError::Braid { x, y, z });
        }
        Ok(())
    }

    /// The cycle set `x·y = λ_x^{-1}(y)`.
    pub fn to_cycle_set(&self) -> CycleSet {
        let rows = self.lambda.iter().map(Permutation::inverse).collect();
        let x = CycleSet::from_rows_unchecked(rows);
        debug_assert!(super::validate(&x.table()).is_ok());
        x
    }

    pub fn to_json(&self) -> SolutionJson {
        self.clone().into()
    }
}

impl TryFrom<SolutionJson> for Solution {
    type Error = SolutionError;

    fn try_from(json: SolutionJson) -> Result<Self, Self::Error> {
        if json.n != json.lambda.len() {
            return Err(SolutionError::Malformed(format!("declared n = {} but lambda has {} rows", json.n, json.lambda.len())));
        }
        Solution::new(json.lambda, json.rho)
    }
}

impl From<Solution> for SolutionJson {
    fn from(s: Solution) -> Self {
        SolutionJson {
            n: s.size(),
            lambda: s.lambda.iter().map(|p| p.images().to_vec()).collect(),
            rho: s.rho.iter().map(|p| p.images().to_vec()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycleset::validate;

    fn shift(m: usize) -> CycleSet {
        validate(&(0..m).map(|_| (0..m).map(|j| (j + 1) % m).collect()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn shift_gives_the_prime_solution() {
        let p = 5;
        let s = shift(p).to_solution();
        for x in 0..p {
            for y in 0..p {
                assert_eq!(s.apply(x, y), ((y + p - 1) % p, (x + 1) % p));
            }
        }
        assert!(s.check().is_ok());
    }

    #[test]
    fn identity_table_gives_the_twist() {
        let n = 3;
        let x = validate(&vec![(0..n).collect::<Vec<_>>(); n]).unwrap();
        let s = x.to_solution();
        for a in 0..n {
            for b in 0..n {
                assert_eq!(s.apply(a, b), (b, a));
            }
        }
        assert_eq!(CycleSet::from_solution(&s), x);
    }

    #[test]
    fn from_solution_on_the_prime_solution() {
        let p = 5;
        let lambda = (0..p).map(|_| (0..p).map(|y| (y + p - 1) % p).collect()).collect();
        let rho = (0..p).map(|_| (0..p).map(|x| (x + 1) % p).collect()).collect();
        let s = Solution::new(lambda, rho).unwrap();
        assert_eq!(s.to_cycle_set(), shift(p));
    }

    #[test]
    fn rejects_bad_solutions() {
        // r(x, y) = (y, y) is degenerate in rho
        let lambda = vec![vec![0, 1], vec![0, 1]];
        let rho = vec![vec![0, 0], vec![1, 1]];
        assert!(matches!(Solution::new(lambda, rho), Err(SolutionError::Degenerate { map: "rho", .. })));
        // r(x, y) = (y+1, x) on Z/2 squares to a shift, not the identity
        let lambda = vec![vec![1, 0], vec![1, 0]];
        let rho = vec![vec![0, 1], vec![0, 1]];
        assert!(matches!(Solution::new(lambda, rho), Err(SolutionError::NotInvolutive { .. })));
        assert!(matches!(Solution::new(vec![vec![0]], vec![]), Err(SolutionError::Malformed(_))));
    }

    #[test]
    fn json_shape() {
        let s = shift(2).to_solution();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"n":2,"lambda":[[1,0],[1,0]],"rho":[[1,0],[1,0]]}"#);
        assert_eq!(serde_json::from_str::<Solution>(&text).unwrap(), s);
    }
}
