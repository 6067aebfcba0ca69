//! Permutations of `0..n` and the finite permutation groups they generate.
//!
//! Composition convention, used everywhere in the crate: `p.compose(&q)` (or
//! `&p * &q`) is the map `i -> p(q(i))`, i.e. the right factor is applied first.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of elements produced by a group closure.
pub const DEFAULT_GROUP_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("image list is not a bijection of 0..{degree}: {reason}")]
    NotBijective { degree: usize, reason: String },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("cannot generate a group on zero points from an empty generator list")]
    EmptyGenerators,
    #[error("group closure exceeded the limit of {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("cannot parse permutation {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A bijection of `{0, .., n-1}`, stored as its image list.
///
/// Ordering is lexicographic on the image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree).collect() }
    }

    /// Builds a permutation from `images[i] = image of i`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for (i, &v) in images.iter().enumerate() {
            if v >= degree {
                return Err(PermError::NotBijective {
                    degree,
                    reason: format!("image {v} of point {i} is out of range"),
                });
            }
            if seen[v] {
                return Err(PermError::NotBijective {
                    degree,
                    reason: format!("value {v} appears twice"),
                });
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// The product of the given cycles on `degree` points. Cycles must be disjoint.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (pos, &a) in cycle.iter().enumerate() {
                if a >= degree {
                    return Err(PermError::NotBijective {
                        degree,
                        reason: format!("cycle entry {a} is out of range"),
                    });
                }
                if touched[a] {
                    return Err(PermError::NotBijective {
                        degree,
                        reason: format!("point {a} appears in more than one cycle position"),
                    });
                }
                touched[a] = true;
                images[a] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// The standard `degree`-cycle `i -> i + 1 mod degree`.
    pub fn standard_cycle(degree: usize) -> Self {
        Permutation { images: (0..degree).map(|i| (i + 1) % degree).collect() }
    }

    /// Translation `i -> i + shift mod degree`, i.e. the standard cycle raised to `shift`.
    pub fn shift(degree: usize, shift: usize) -> Self {
        Permutation { images: (0..degree).map(|i| (i + shift) % degree).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: the map `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// The `exponent`-fold composite; negative exponents use the inverse.
    pub fn pow(&self, exponent: i64) -> Permutation {
        let order = self.order() as i64;
        let e = exponent.rem_euclid(order) as usize;
        // along each cycle, move e steps forward
        let mut images = vec![0; self.degree()];
        for cycle in self.cycles_with_fixed() {
            let len = cycle.len();
            for (pos, &a) in cycle.iter().enumerate() {
                images[a] = cycle[(pos + e) % len];
            }
        }
        Permutation { images }
    }

    /// Least `e >= 1` with `self^e = id`.
    pub fn order(&self) -> usize {
        self.cycles_with_fixed().iter().fold(1, |acc, c| acc.lcm(&c.len()))
    }

    fn cycles_with_fixed(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.images[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.images[cur];
            }
            out.push(cycle);
        }
        out
    }

    /// Non-trivial cycles, each starting at its least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_with_fixed().into_iter().filter(|c| c.len() > 1).collect()
    }

    /// Sorted multiset of all cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles_with_fixed().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }

    /// True iff this is a single cycle through all `degree` points.
    pub fn is_full_cycle(&self) -> bool {
        self.degree() > 0 && self.order() == self.degree() && self.cycles_with_fixed().len() == 1
    }

    /// One-line form, e.g. `[1,2,3,0]`.
    pub fn to_one_line(&self) -> String {
        let parts: Vec<String> = self.images.iter().map(|v| v.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    /// Parses either one-line form `[1,2,0]` or cycle notation `(0 1 2)(3 4)`.
    ///
    /// Cycle notation needs a degree; when `degree` is `None` it is taken as one
    /// more than the largest point mentioned.
    pub fn parse(input: &str, degree: Option<usize>) -> Result<Permutation, PermError> {
        let s = input.trim();
        let err = |reason: &str| PermError::Parse { input: input.to_string(), reason: reason.to_string() };
        if let Some(body) = s.strip_prefix('[') {
            let body = body.strip_suffix(']').ok_or_else(|| err("missing closing ']'"))?;
            let images = if body.trim().is_empty() {
                Vec::new()
            } else {
                body.split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| err("bad integer")))
                    .collect::<Result<Vec<_>, _>>()?
            };
            if let Some(d) = degree {
                if d != images.len() {
                    return Err(PermError::DegreeMismatch { left: images.len(), right: d });
                }
            }
            return Permutation::from_images(images);
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
            let close = open.find(')').ok_or_else(|| err("missing ')'"))?;
            let cycle = open[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| err("bad integer")))
                .collect::<Result<Vec<_>, _>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        let max_point = cycles.iter().flatten().max().map_or(0, |m| m + 1);
        let degree = match degree {
            Some(d) if d < max_point => return Err(err("point exceeds the given degree")),
            Some(d) => d,
            None => max_point,
        };
        Permutation::from_cycles(degree, &cycles)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(images: Vec<usize>) -> Result<Self, Self::Error> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Permutation::parse(s, None)
    }
}

/// Panics on degree mismatch; use [`Permutation::compose`] for the checked form.
impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs).expect("composing permutations of different degree")
    }
}

/// Cycle notation; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Shape of a permutation group as far as this crate needs to tell them apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupType {
    Cyclic,
    AbelianNoncyclic,
    Nonabelian,
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupType::Cyclic => "cyclic",
            GroupType::AbelianNoncyclic => "abelian-noncyclic",
            GroupType::Nonabelian => "nonabelian",
        })
    }
}

/// A permutation group given by generators, stored with its full element list.
///
/// Elements are kept sorted lexicographically by image list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PermGroup {
    pub fn generate(generators: &[Permutation], degree: usize) -> Result<PermGroup, PermError> {
        PermGroup::generate_with_limit(generators, degree, DEFAULT_GROUP_LIMIT)
    }

    /// Breadth-first closure of `generators`, failing once more than `limit`
    /// elements have been found.
    pub fn generate_with_limit(
        generators: &[Permutation],
        degree: usize,
        limit: usize,
    ) -> Result<PermGroup, PermError> {
        if generators.is_empty() && degree == 0 {
            return Err(PermError::EmptyGenerators);
        }
        for g in generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch { left: g.degree(), right: degree });
            }
        }
        let identity = Permutation::identity(degree);
        let mut found: HashSet<Permutation> = HashSet::new();
        let mut queue = VecDeque::new();
        found.insert(identity.clone());
        queue.push_back(identity);
        // finite group: closure under right multiplication by generators suffices
        while let Some(g) = queue.pop_front() {
            for s in generators {
                let h = &g * s;
                if !found.contains(&h) {
                    if found.len() >= limit {
                        return Err(PermError::GroupTooLarge { limit });
                    }
                    found.insert(h.clone());
                    queue.push_back(h);
                }
            }
        }
        let mut elements: Vec<Permutation> = found.into_iter().collect();
        elements.sort_unstable();
        Ok(PermGroup { degree, generators: generators.to_vec(), elements })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Orbit of `point`, sorted.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        orbit_under(&self.generators, self.degree, point)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree >= 1 && self.orbit(0).len() == self.degree
    }

    pub fn is_abelian(&self) -> bool {
        generators_commute(&self.generators)
    }

    /// The lexicographically least element generating the whole group, if the group is cyclic.
    pub fn cyclic_generator(&self) -> Option<&Permutation> {
        let n = self.order();
        self.elements.iter().find(|g| g.order() == n)
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_generator().is_some()
    }

    pub fn group_type(&self) -> GroupType {
        if !self.is_abelian() {
            GroupType::Nonabelian
        } else if self.is_cyclic() {
            GroupType::Cyclic
        } else {
            GroupType::AbelianNoncyclic
        }
    }
}

/// Orbit of `point` under the group generated by `generators`, sorted.
pub fn orbit_under(generators: &[Permutation], degree: usize, point: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    let mut stack = vec![point];
    seen[point] = true;
    while let Some(a) = stack.pop() {
        for g in generators {
            let b = g.apply(a);
            if !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    (0..degree).filter(|&i| seen[i]).collect()
}

pub(crate) fn generators_commute(generators: &[Permutation]) -> bool {
    generators.iter().enumerate().all(|(i, a)| generators[i + 1..].iter().all(|b| a * b == b * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, Some(n)).unwrap()
    }

    #[test]
    fn compose_examples() {
        let c4 = cyc("(0 1 2 3)", 4);
        assert_eq!(c4.compose(&Permutation::identity(4)).unwrap(), c4);
        assert_eq!(&cyc("(0 1)(2 3)", 4) * &cyc("(0 2)(1 3)", 4), cyc("(0 3)(1 2)", 4));
        assert_eq!(&c4 * &c4, cyc("(0 2)(1 3)", 4));
        assert!(matches!(
            c4.compose(&Permutation::identity(3)),
            Err(PermError::DegreeMismatch { left: 4, right: 3 })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Permutation::identity(5).inverse(), Permutation::identity(5));
        assert_eq!(cyc("(0 1 2 3)", 4).inverse(), cyc("(0 3 2 1)", 4));
    }

    #[test]
    fn power_examples() {
        let c4 = cyc("(0 1 2 3)", 4);
        assert!(c4.pow(0).is_identity());
        assert_eq!(c4.pow(5), c4);
        assert_eq!(c4.pow(-1), c4.inverse());
        assert_eq!(Permutation::standard_cycle(8).pow(5), cyc("(0 5 2 7 4 1 6 3)", 8));
    }

    #[test]
    fn group_examples() {
        let c4 = PermGroup::generate(&[cyc("(0 1 2 3)", 4)], 4).unwrap();
        assert_eq!(c4.order(), 4);
        assert!(c4.is_transitive() && c4.is_abelian());
        assert_eq!(c4.cyclic_generator(), Some(&cyc("(0 1 2 3)", 4)));

        let klein = PermGroup::generate(&[cyc("(0 1)(2 3)", 4), cyc("(0 2)(1 3)", 4)], 4).unwrap();
        assert_eq!(klein.order(), 4);
        assert!(klein.is_abelian() && klein.is_transitive());
        assert_eq!(klein.cyclic_generator(), None);
        assert_eq!(klein.group_type(), GroupType::AbelianNoncyclic);

        let trivial = PermGroup::generate(&[Permutation::identity(3)], 3).unwrap();
        assert_eq!(trivial.order(), 1);

        let split = PermGroup::generate(&[cyc("(0 1)", 4), cyc("(2 3)", 4)], 4).unwrap();
        assert!(!split.is_transitive());

        assert_eq!(cyc("(0 1 2 3 4)", 5).order(), 5);
        assert_eq!(PermGroup::generate(&[], 0), Err(PermError::EmptyGenerators));
    }

    #[test]
    fn symmetric_group_and_limit() {
        let s4 = PermGroup::generate(&[cyc("(0 1)", 4), cyc("(0 1 2 3)", 4)], 4).unwrap();
        assert_eq!(s4.order(), 24);
        assert_eq!(s4.group_type(), GroupType::Nonabelian);
        assert!(matches!(
            PermGroup::generate_with_limit(&[cyc("(0 1)", 4), cyc("(0 1 2 3)", 4)], 4, 10),
            Err(PermError::GroupTooLarge { limit: 10 })
        ));
    }

    #[test]
    fn parse_and_print() {
        let p = cyc("(0 1 2 3)", 4);
        assert_eq!(p.to_string(), "(0 1 2 3)");
        assert_eq!(p.to_one_line(), "[1,2,3,0]");
        assert_eq!(Permutation::parse("[1,2,3,0]", None).unwrap(), p);
        assert_eq!("(0 2)(1 3)".parse::<Permutation>().unwrap().to_string(), "(0 2)(1 3)");
        assert_eq!(Permutation::parse("()", Some(3)).unwrap(), Permutation::identity(3));
        assert!(Permutation::parse("[0,0]", None).is_err());
        assert!(Permutation::parse("(0 1)(1 2)", None).is_err());
        assert!(Permutation::parse("(0 5)", Some(3)).is_err());
    }

    #[test]
    fn serde_uses_image_list() {
        let p = cyc("(0 1 2)", 3);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1,2,0]");
        assert!(serde_json::from_str::<Permutation>("[1,1,0]").is_err());
    }
}
