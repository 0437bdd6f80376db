//! Exhaustive landscape classification: strict k-minima, k-basins and
//! pairwise Hamming audits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{Assignment, IsingInstance};
use crate::scan::{scan_all, SpinState};

/// Upper limit on neighborhood sizes `sum_{s<=k} C(n, s)` probed per assignment.
pub const MAX_NEIGHBORHOOD: u128 = 50_000_000;

/// Which assignments become vertices of the k-basin graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexRule {
    /// No change of at most k variables strictly lowers the energy.
    #[default]
    NoStrictImprovement,
    /// No change of at most k variables strictly raises the energy.
    NoStrictWorsening,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LandscapeReport {
    pub k: usize,
    /// Strict k-minima in lexicographic order.
    pub minima: Vec<Assignment>,
    pub basin_count: usize,
    /// Component sizes, largest first.
    pub basin_sizes: Vec<usize>,
    pub vertex_count: usize,
}

fn neighborhood_size(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for s in 1..=k.min(n) {
        c = c * (n - s + 1) as u128 / s as u128;
        total += c;
    }
    total
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={n}")));
    }
    if neighborhood_size(n, k) > MAX_NEIGHBORHOOD {
        return Err(Error::limit(format!(
            "radius-{k} neighborhood of {n} variables is too large"
        )));
    }
    Ok(())
}

/// Depth-first search over every subset of at most `depth` more variables
/// with indices from `start`; stops at the first subset whose energy
/// satisfies `hit`. The state is restored on return.
fn any_change<H: Fn(i64) -> bool + Copy>(state: &mut SpinState<'_>, start: usize, depth: usize, hit: H) -> bool {
    for i in start..state.len() {
        state.flip(i);
        let found = hit(state.energy()) || (depth > 1 && any_change(state, i + 1, depth - 1, hit));
        state.flip(i);
        if found {
            return true;
        }
    }
    false
}

fn strict_k_min(state: &mut SpinState<'_>, k: usize) -> bool {
    if !state.is_local_minimum() {
        return false;
    }
    if k == 1 {
        return true;
    }
    let base = state.energy();
    !any_change(state, 0, k, move |e| e <= base)
}

fn is_vertex(state: &mut SpinState<'_>, k: usize, rule: VertexRule) -> bool {
    let base = state.energy();
    match rule {
        VertexRule::NoStrictImprovement => {
            if k == 1 {
                return (0..state.len()).all(|i| state.delta(i) >= 0);
            }
            !any_change(state, 0, k, move |e| e < base)
        }
        VertexRule::NoStrictWorsening => !any_change(state, 0, k, move |e| e > base),
    }
}

/// Every assignment within Hamming distance `1..=k` has strictly larger energy.
pub fn is_k_minimum(inst: &IsingInstance, a: &Assignment, k: usize) -> Result<bool> {
    if a.len() != inst.n() {
        return Err(Error::LengthMismatch {
            expected: inst.n(),
            got: a.len(),
        });
    }
    check_k(inst.n(), k)?;
    let mut state = SpinState::new(inst, a);
    Ok(strict_k_min(&mut state, k))
}

/// Number of strict k-minima, without materializing them.
pub fn count_k_minima(inst: &IsingInstance, k: usize, workers: usize) -> Result<u64> {
    check_k(inst.n(), k)?;
    let blocks = scan_all(
        inst,
        workers,
        || 0u64,
        |c, s| {
            if strict_k_min(s, k) {
                *c += 1;
            }
        },
    )?;
    Ok(blocks.into_iter().sum())
}

/// All strict k-minima by Gray-code enumeration.
pub fn enumerate_k_minima(inst: &IsingInstance, k: usize, workers: usize) -> Result<LandscapeReport> {
    check_k(inst.n(), k)?;
    let blocks = scan_all(inst, workers, Vec::new, |acc: &mut Vec<Assignment>, s| {
        if strict_k_min(s, k) {
            acc.push(s.assignment());
        }
    })?;
    let mut minima: Vec<Assignment> = blocks.into_iter().flatten().collect();
    minima.sort();
    Ok(LandscapeReport {
        k,
        minima,
        basin_count: 0,
        basin_sizes: Vec::new(),
        vertex_count: 0,
    })
}

/// Plain union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn component_sizes(&mut self) -> Vec<usize> {
        let roots: Vec<usize> = (0..self.parent.len()).filter(|&x| self.find(x) == x).collect();
        let mut sizes: Vec<usize> = roots.iter().map(|&x| self.size[x]).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

fn for_each_mask_within<F: FnMut(u64)>(n: usize, k: usize, start: usize, mask: u64, f: &mut F) {
    for i in start..n {
        let m = mask | (1u64 << i);
        f(m);
        if k > 1 {
            for_each_mask_within(n, k - 1, i + 1, m, f);
        }
    }
}

/// Connected components of the graph on basin vertices with edges between
/// vertices at Hamming distance at most `k`.
pub fn k_basins(inst: &IsingInstance, k: usize, rule: VertexRule, workers: usize) -> Result<LandscapeReport> {
    check_k(inst.n(), k)?;
    if inst.n() > 40 {
        return Err(Error::limit("basin enumeration supports at most 40 variables"));
    }
    let blocks = scan_all(
        inst,
        workers,
        || (Vec::new(), Vec::new()),
        |acc: &mut (Vec<u64>, Vec<Assignment>), s| {
            if is_vertex(s, k, rule) {
                let a = s.assignment();
                acc.0.push(a.to_mask());
                if strict_k_min(s, k) {
                    acc.1.push(a);
                }
            }
        },
    )?;
    let mut vertices = Vec::new();
    let mut minima = Vec::new();
    for (v, m) in blocks {
        vertices.extend(v);
        minima.extend(m);
    }
    vertices.sort_unstable();
    minima.sort();
    let mut uf = UnionFind::new(vertices.len());
    for (idx, &v) in vertices.iter().enumerate() {
        for_each_mask_within(inst.n(), k, 0, 0, &mut |flip| {
            let w = v ^ flip;
            if w > v {
                if let Ok(j) = vertices.binary_search(&w) {
                    uf.union(idx, j);
                }
            }
        });
    }
    let basin_sizes = uf.component_sizes();
    Ok(LandscapeReport {
        k,
        minima,
        basin_count: basin_sizes.len(),
        basin_sizes,
        vertex_count: vertices.len(),
    })
}

/// Smallest pairwise Hamming distance; `n + 1` for a single assignment.
pub fn min_pairwise_hamming(assignments: &[Assignment]) -> Result<usize> {
    let first = assignments
        .first()
        .ok_or_else(|| Error::invalid("empty assignment list"))?;
    let n = first.len();
    if assignments.iter().any(|a| a.len() != n) {
        return Err(Error::invalid("assignments of unequal length"));
    }
    let mut best = n + 1;
    for (i, a) in assignments.iter().enumerate() {
        for b in &assignments[i + 1..] {
            best = best.min(a.hamming(b));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_column, gen_csse, ColumnTargets};

    #[test]
    fn checkerboard_is_three_minimum_but_not_four() {
        let ci = gen_column(2, 2, ColumnTargets::Zeros).unwrap();
        // coordinates (0,0),(1,0),(0,1),(1,1): parity pattern + - - +
        let board: Assignment = "+--+".parse().unwrap();
        assert_eq!(ci.inst.energy(&board).unwrap(), 0);
        assert!(is_k_minimum(&ci.inst, &board, 3).unwrap());
        assert!(!is_k_minimum(&ci.inst, &board, 4).unwrap());
    }

    #[test]
    fn k_one_matches_local_minimum() {
        let inst = gen_csse(4).unwrap();
        for m in 0..16 {
            let a = Assignment::from_mask(4, m);
            assert_eq!(is_k_minimum(&inst, &a, 1).unwrap(), inst.is_local_minimum(&a).unwrap());
        }
    }

    #[test]
    fn csse_minima_and_basins() {
        let inst = gen_csse(4).unwrap();
        let r1 = enumerate_k_minima(&inst, 1, 1).unwrap();
        assert_eq!(r1.minima.len(), 6);
        assert!(r1.minima.iter().all(|a| a.count_up() == 2));
        assert_eq!(enumerate_k_minima(&inst, 2, 1).unwrap().minima.len(), 0);

        let b1 = k_basins(&inst, 1, VertexRule::default(), 1).unwrap();
        assert_eq!((b1.vertex_count, b1.basin_count), (6, 6));
        let b2 = k_basins(&inst, 2, VertexRule::default(), 1).unwrap();
        assert_eq!((b2.vertex_count, b2.basin_count), (6, 1));
        assert_eq!(b2.basin_sizes, vec![6]);
    }

    #[test]
    fn zero_instance_landscape() {
        let inst = IsingInstance::zero(4);
        for k in 1..=4 {
            assert_eq!(enumerate_k_minima(&inst, k, 1).unwrap().minima.len(), 0);
        }
        let b = k_basins(&inst, 1, VertexRule::default(), 1).unwrap();
        assert_eq!((b.vertex_count, b.basin_count), (16, 1));
        let lit = k_basins(&inst, 1, VertexRule::NoStrictWorsening, 1).unwrap();
        assert_eq!(lit.vertex_count, 16);
    }

    #[test]
    fn literal_rule_selects_maxima_side() {
        let inst = gen_csse(4).unwrap();
        // all-equal assignments are the only ones no single flip makes worse
        let lit = k_basins(&inst, 1, VertexRule::NoStrictWorsening, 1).unwrap();
        assert_eq!(lit.vertex_count, 2);
    }

    #[test]
    fn k_range_is_validated() {
        let inst = gen_csse(4).unwrap();
        let a = Assignment::all_down(4);
        assert!(is_k_minimum(&inst, &a, 0).is_err());
        assert!(is_k_minimum(&inst, &a, 5).is_err());
        assert!(enumerate_k_minima(&inst, 0, 1).is_err());
    }

    #[test]
    fn pairwise_hamming() {
        let pair = ["++".parse().unwrap(), "+-".parse().unwrap()];
        assert_eq!(min_pairwise_hamming(&pair).unwrap(), 1);
        assert_eq!(min_pairwise_hamming(&[Assignment::all_up(4)]).unwrap(), 5);
        assert!(min_pairwise_hamming(&[]).is_err());
    }

    #[test]
    fn union_find_components() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert_eq!(uf.component_sizes(), vec![2, 2, 1]);
    }
}
