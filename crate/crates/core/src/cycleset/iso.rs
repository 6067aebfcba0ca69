//! Isomorphism search between cycle sets.
//!
//! Backtracking over images of points in increasing order. Every assignment is
//! propagated through products and left divisions of already mapped points,
//! so for indecomposable inputs the first choice (the image of point 0)
//! typically determines the whole map.

use super::CycleSet;
use crate::perm::Permutation;

const UNSET: usize = usize::MAX;

/// Local invariant of a point; isomorphisms preserve it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PointProfile {
    row_cycle_type: Vec<usize>,
    idempotent: bool,
    row_multiplicity: usize,
}

fn profiles(x: &CycleSet) -> Vec<PointProfile> {
    let n = x.size();
    (0..n)
        .map(|a| PointProfile {
            row_cycle_type: x.row(a).cycle_type(),
            idempotent: x.op(a, a) == a,
            row_multiplicity: (0..n).filter(|&b| x.row(b) == x.row(a)).count(),
        })
        .collect()
}

struct Side<'a> {
    x: &'a CycleSet,
    inverse_rows: Vec<Permutation>,
    profiles: Vec<PointProfile>,
}

impl<'a> Side<'a> {
    fn new(x: &'a CycleSet) -> Self {
        Side { x, inverse_rows: x.rows().iter().map(Permutation::inverse).collect(), profiles: profiles(x) }
    }

    /// `σ_a^{-1}(b)`.
    fn divide(&self, a: usize, b: usize) -> usize {
        self.inverse_rows[a].apply(b)
    }
}

#[derive(Clone)]
struct State {
    map: Vec<usize>,
    inv: Vec<usize>,
    assigned: Vec<usize>,
}

struct Search<'a> {
    src: Side<'a>,
    dst: Side<'a>,
}

impl Search<'_> {
    fn assign(&self, st: &mut State, queue: &mut Vec<usize>, a: usize, b: usize) -> bool {
        if st.map[a] != UNSET {
            return st.map[a] == b;
        }
        if st.inv[b] != UNSET || self.src.profiles[a] != self.dst.profiles[b] {
            return false;
        }
        st.map[a] = b;
        st.inv[b] = a;
        st.assigned.push(a);
        queue.push(a);
        true
    }

    fn propagate(&self, st: &mut State, mut queue: Vec<usize>) -> bool {
        while let Some(a) = queue.pop() {
            let mut i = 0;
            while i < st.assigned.len() {
                let c = st.assigned[i];
                i += 1;
                for (u, v) in [(a, c), (c, a)] {
                    let (fu, fv) = (st.map[u], st.map[v]);
                    let prod = self.src.x.op(u, v);
                    if !self.assign(st, &mut queue, prod, self.dst.x.op(fu, fv)) {
                        return false;
                    }
                    let quot = self.src.divide(u, v);
                    if !self.assign(st, &mut queue, quot, self.dst.divide(fu, fv)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn extend(&self, st: State) -> Option<Vec<usize>> {
        let Some(a) = st.map.iter().position(|&b| b == UNSET) else {
            return Some(st.map);
        };
        for b in 0..st.map.len() {
            if st.inv[b] != UNSET || self.src.profiles[a] != self.dst.profiles[b] {
                continue;
            }
            let mut next = st.clone();
            let mut queue = Vec::new();
            if self.assign(&mut next, &mut queue, a, b) && self.propagate(&mut next, queue) {
                if let Some(found) = self.extend(next) {
                    return Some(found);
                }
            }
        }
        None
    }
}

/// The first isomorphism `F: a -> b` in the fixed search order, as an image list.
pub fn find_isomorphism(a: &CycleSet, b: &CycleSet) -> Option<Vec<usize>> {
    let n = a.size();
    if n != b.size() {
        return None;
    }
    let search = Search { src: Side::new(a), dst: Side::new(b) };
    let mut pa = search.src.profiles.clone();
    let mut pb = search.dst.profiles.clone();
    pa.sort();
    pb.sort();
    if pa != pb || a.retraction_tower_sizes() != b.retraction_tower_sizes() {
        return None;
    }
    let st = State { map: vec![UNSET; n], inv: vec![UNSET; n], assigned: Vec::new() };
    let found = search.extend(st)?;
    debug_assert!((0..n).all(|x| (0..n).all(|y| found[a.op(x, y)] == b.op(found[x], found[y]))));
    Some(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycleset::validate;

    fn c4_level2() -> CycleSet {
        let a = vec![1, 2, 3, 0];
        let b = vec![3, 0, 1, 2];
        validate(&[a.clone(), b.clone(), a, b]).unwrap()
    }

    fn shift(m: usize) -> CycleSet {
        validate(&(0..m).map(|_| (0..m).map(|j| (j + 1) % m).collect()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn finds_relabelings() {
        let x = c4_level2();
        let y = x.relabel(&[3, 1, 0, 2]).unwrap();
        let f = find_isomorphism(&x, &y).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f[x.op(a, b)], y.op(f[a], f[b]));
            }
        }
        assert_eq!(find_isomorphism(&x, &x), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn distinguishes_levels() {
        assert_eq!(find_isomorphism(&shift(4), &c4_level2()), None);
        assert_eq!(find_isomorphism(&shift(4), &shift(3)), None);
    }

    #[test]
    fn decomposable_inputs() {
        // two copies of the shift on Z/2 glued trivially: x·y = y+1 within each block, fixed across
        let t = vec![vec![1, 0, 2, 3], vec![1, 0, 2, 3], vec![0, 1, 3, 2], vec![0, 1, 3, 2]];
        let x = validate(&t).unwrap();
        let y = x.relabel(&[2, 0, 3, 1]).unwrap();
        assert!(find_isomorphism(&x, &y).is_some());
        let id = validate(&vec![vec![0, 1, 2, 3]; 4]).unwrap();
        assert_eq!(find_isomorphism(&x, &id), None);
    }
}
