//! Exhaustive enumeration of cycle set tables.
//!
//! Rows are assigned one point at a time. After every assignment the axiom in
//! the form `σ_{x·y} σ_x = σ_{y·x} σ_y` is scanned over all pairs of assigned
//! points: a pair whose two products are assigned is checked, and a pair with
//! exactly one assigned product forces the other row. Branching happens only
//! on points that no pair forces.

use std::sync::atomic::{AtomicU64, Ordering};

use itertools::Itertools;
use rayon::prelude::*;

use super::ClassifyError;
use crate::arith;
use crate::cycleset::CycleSet;
use crate::perm::Permutation;

/// A fixed set of allowed rows: a regular abelian group or all of `Sym(n)`.
/// Both are groups, so rows forced by propagation stay inside the template.
#[derive(Debug, Clone)]
pub struct Template {
    name: String,
    degree: usize,
    elements: Vec<Permutation>,
}

impl Template {
    /// All `n!` permutations, in lexicographic order of image lists.
    pub fn symmetric(n: usize) -> Template {
        let elements = (0..n)
            .permutations(n)
            .map(Permutation::from_images_unchecked)
            .collect();
        Template { name: format!("Sym({n})"), degree: n, elements }
    }

    /// The regular representation of `Z/c_1 × .. × Z/c_r` on `c_1·..·c_r`
    /// points, with `(a_1, .., a_r)` at `a_1 + c_1(a_2 + c_2(..))`.
    pub fn regular_abelian(factors: &[usize]) -> Template {
        let n: usize = factors.iter().product();
        let digits = |mut x: usize| {
            factors
                .iter()
                .map(|&c| {
                    let d = x % c;
                    x /= c;
                    d
                })
                .collect::<Vec<_>>()
        };
        let compose = |d: &[usize]| d.iter().zip(factors).rev().fold(0, |acc, (&a, &c)| acc * c + a);
        let translations: Vec<Permutation> = (0..n)
            .map(|g| {
                let dg = digits(g);
                Permutation::from_images_unchecked(
                    (0..n)
                        .map(|x| {
                            let sum: Vec<usize> = digits(x).iter().zip(&dg).zip(factors).map(|((a, b), c)| (a + b) % c).collect();
                            compose(&sum)
                        })
                        .collect(),
                )
            })
            .collect();
        let mut elements = translations;
        elements.sort();
        let name = if factors.len() == 1 {
            format!("Z/{}", factors[0])
        } else {
            factors.iter().map(|c| format!("Z/{c}")).join("×")
        };
        Template { name, degree: n, elements }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }
}

/// Invariant factors `c_1 | c_2 | ..` of every abelian group of order `n`,
/// one list per isomorphism type.
pub fn abelian_group_types(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![1]];
    }
    // for each prime, every partition of its exponent
    let per_prime: Vec<Vec<Vec<usize>>> = arith::factorize(n)
        .into_iter()
        .map(|(p, e)| partitions(e as usize).into_iter().map(|part| part.into_iter().map(|a| p.pow(a as u32)).collect()).collect())
        .collect();
    let mut out = Vec::new();
    for choice in per_prime.iter().map(|v| v.iter()).multi_cartesian_product() {
        // align the prime-power parts from the largest down and multiply
        let width = choice.iter().map(|c| c.len()).max().unwrap_or(1);
        let mut factors = vec![1usize; width];
        for parts in &choice {
            for (slot, q) in parts.iter().enumerate() {
                factors[width - 1 - slot] *= q;
            }
        }
        out.push(factors);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Partitions of `e` as non-increasing lists.
fn partitions(e: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for a in (1..=rest.min(max)).rev() {
            cur.push(a);
            go(rest - a, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(e, e, &mut Vec::new(), &mut out);
    out
}

/// One regular template per abelian group of order `n`, cyclic first.
pub fn abelian_templates(n: usize) -> Vec<Template> {
    abelian_group_types(n).iter().map(|f| Template::regular_abelian(f)).collect()
}

struct Budget<'a> {
    used: &'a AtomicU64,
    limit: u64,
}

impl Budget<'_> {
    fn spend(&self) -> Result<(), ClassifyError> {
        let before = self.used.fetch_add(1, Ordering::Relaxed);
        if before >= self.limit {
            Err(ClassifyError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone)]
struct Partial {
    rows: Vec<Option<Permutation>>,
}

impl Partial {
    fn assigned(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().enumerate().filter(|(_, r)| r.is_some()).map(|(i, _)| i)
    }

    /// Runs the pair scan to a fixpoint; `false` on contradiction.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            let known: Vec<usize> = self.assigned().collect();
            for &a in &known {
                for &b in &known {
                    if a >= b {
                        continue;
                    }
                    let (sa, sb) = (self.rows[a].clone().unwrap(), self.rows[b].clone().unwrap());
                    let u = sa.apply(b);
                    let v = sb.apply(a);
                    match (self.rows[u].clone(), self.rows[v].clone()) {
                        (Some(su), Some(sv)) => {
                            if &su * &sa != &sv * &sb {
                                return false;
                            }
                        }
                        (Some(su), None) => {
                            let forced = &(&su * &sa) * &sb.inverse();
                            self.rows[v] = Some(forced);
                            changed = true;
                        }
                        (None, Some(sv)) => {
                            let forced = &(&sv * &sb) * &sa.inverse();
                            self.rows[u] = Some(forced);
                            changed = true;
                        }
                        (None, None) => {}
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Next point to branch on: the least unassigned point that is a product
    /// of assigned points, else the least unassigned point.
    fn next_point(&self) -> Option<usize> {
        let known: Vec<usize> = self.assigned().collect();
        for &a in &known {
            let sa = self.rows[a].as_ref().unwrap();
            let mut best = None;
            for &b in &known {
                let u = sa.apply(b);
                if self.rows[u].is_none() {
                    best = Some(best.map_or(u, |w: usize| w.min(u)));
                }
            }
            if best.is_some() {
                return best;
            }
        }
        self.rows.iter().position(Option::is_none)
    }

    fn finish(self) -> CycleSet {
        CycleSet::from_rows_unchecked(self.rows.into_iter().map(Option::unwrap).collect())
    }
}

fn extend(
    state: Partial,
    template: &Template,
    budget: &Budget<'_>,
    out: &mut Vec<CycleSet>,
) -> Result<(), ClassifyError> {
    let Some(w) = state.next_point() else {
        out.push(state.finish());
        return Ok(());
    };
    for cand in template.elements() {
        budget.spend()?;
        let mut next = state.clone();
        next.rows[w] = Some(cand.clone());
        if next.propagate() {
            extend(next, template, budget, out)?;
        }
    }
    Ok(())
}

/// Every cycle set on `{0, .., n-1}` whose rows lie in `template`, sorted.
/// Each candidate row tried counts against `max_candidates`.
pub fn enumerate_in_template(
    template: &Template,
    max_candidates: u64,
    parallel: bool,
) -> Result<Vec<CycleSet>, ClassifyError> {
    enumerate_in_templates(std::slice::from_ref(template), max_candidates, parallel)
}

/// Union over several templates of equal degree, sharing one budget.
pub(super) fn enumerate_in_templates(
    templates: &[Template],
    max_candidates: u64,
    parallel: bool,
) -> Result<Vec<CycleSet>, ClassifyError> {
    let used = AtomicU64::new(0);
    let budget = Budget { used: &used, limit: max_candidates };
    let mut all = Vec::new();
    for template in templates {
        let root = Partial { rows: vec![None; template.degree()] };
        let branch = |cand: &Permutation| -> Result<Vec<CycleSet>, ClassifyError> {
            budget.spend()?;
            let mut out = Vec::new();
            let mut st = root.clone();
            st.rows[0] = Some(cand.clone());
            if st.propagate() {
                extend(st, template, &budget, &mut out)?;
            }
            Ok(out)
        };
        let chunks: Vec<Vec<CycleSet>> = if parallel {
            template.elements().par_iter().map(branch).collect::<Result<_, _>>()?
        } else {
            template.elements().iter().map(branch).collect::<Result<_, _>>()?
        };
        all.extend(chunks.into_iter().flatten());
    }
    all.sort();
    all.dedup();
    Ok(all)
}
