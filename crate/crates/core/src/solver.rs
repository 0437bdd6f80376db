//! Exact minimization.
//!
//! Every solver here is an instance of one enumeration engine. The variables
//! are split into an *outer* set, a set `T` handled by effective fields, and
//! optional *blocks* that have no couplings between each other. For every
//! assignment of the outer set, each `i` in `T` gets
//!
//! ```text
//! h_eff_i = h_i + sum_{j outer} J_ij S_j      h_max_i = sum_{j inner} |J_ij|
//! ```
//!
//! and is fixed when `|h_eff_i| >= h_max_i`. Fixed spins take
//! `S_i = -sign(h_eff_i)`, the free ones are enumerated, and each block is
//! minimized on its own at every leaf.
//!
//! Ties between optima always go to the lexicographically smallest
//! assignment (bit 0 before bit 1, variable 0 first). Two cases need care:
//!
//! * a fixed variable with `h_eff_i = 0` has `h_max_i = 0`, so it is
//!   decoupled from every other inner variable and bit 0 is optimal;
//! * a fixed variable with `|h_eff_i| = h_max_i > 0` may be flipped at no
//!   cost in some optima. Its forced value always reaches the optimal energy,
//!   so the leaf count stays `2^|F|`; when that energy ties the best seen in
//!   the current work block, the free and tied variables are walked together
//!   once more and those leaves are reported separately as `tie_leaves`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{Assignment, DegreeGraph, IsingInstance};
use crate::scan::{check_enum_bits, gray_walk, partitioned_walk, SpinState};
use crate::tset::{find_t1t2, find_t_constrained, find_t_randomized, SplitConstraint, TParams, TSetCertificate};

/// Maximum degree below which the automatic effective pipeline goes
/// straight to the coloring baseline.
pub const AUTO_MIN_DEGREE: usize = 16;

/// Share of vertices that must reach degree `d_TT` before the combined
/// solver builds `T1`, `T2`.
pub const DEGREE_SHARE: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brute,
    Coloring,
    Effective,
    AvgDegree,
    Combined,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Coloring => "coloring",
            Method::Effective => "effective",
            Method::AvgDegree => "avg-degree",
            Method::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub outer_assignments: u64,
    /// `sum 2^|F|` over outer assignments.
    pub leaves_explored: u64,
    /// Extra leaves walked to settle ties on weakly fixed variables.
    pub tie_leaves: u64,
    /// Assignments visited inside blocks, summed over leaves.
    pub block_steps: u64,
}

impl Counters {
    fn add(&mut self, o: &Counters) {
        self.outer_assignments += o.outer_assignments;
        self.leaves_explored += o.leaves_explored;
        self.tie_leaves += o.tie_leaves;
        self.block_steps += o.block_steps;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub best: Assignment,
    pub energy: i64,
    pub method: Method,
    /// The engine configuration that actually ran, after any fallback.
    pub engine: Method,
    pub counters: Counters,
    /// Variables handled by effective fields.
    pub t: Vec<usize>,
    /// Independently minimized blocks.
    pub blocks: Vec<Vec<usize>>,
    /// Human-readable trail of construction outcomes and fallbacks.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub seed: u64,
    pub workers: usize,
    pub params: TParams,
    /// Retries for every randomized set construction.
    pub retries: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            workers: 1,
            params: TParams::default(),
            retries: 32,
        }
    }
}

/// Effective fields of `T` for one assignment of its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EffectiveView {
    pub t: Vec<usize>,
    /// Values of the complement, listed in increasing variable order.
    pub outer: Assignment,
    /// Aligned with `t`.
    pub h_eff: Vec<i64>,
    pub h_max: Vec<i64>,
    pub fixed: Vec<usize>,
    pub free: Vec<usize>,
    /// Forced spin per fixed variable; `+1` when `h_eff = 0`.
    pub forced: Vec<(usize, i8)>,
}

fn sorted_set(n: usize, vars: &[usize], what: &str) -> Result<(Vec<usize>, Vec<bool>)> {
    let mut mark = vec![false; n];
    for &v in vars {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, n });
        }
        if std::mem::replace(&mut mark[v], true) {
            return Err(Error::invalid(format!("variable {v} repeated in {what}")));
        }
    }
    let mut s = vars.to_vec();
    s.sort_unstable();
    Ok((s, mark))
}

fn h_eff_of(inst: &IsingInstance, i: usize, inner: &[bool], spin: impl Fn(usize) -> i8) -> i64 {
    inst.field(i)
        + inst
            .neighbors(i)
            .iter()
            .filter(|&&(j, _)| !inner[j])
            .map(|&(j, w)| w * spin(j) as i64)
            .sum::<i64>()
}

fn h_max_of(inst: &IsingInstance, i: usize, inner: &[bool]) -> i64 {
    inst.neighbors(i)
        .iter()
        .filter(|&&(j, _)| inner[j])
        .map(|&(_, w)| w.abs())
        .sum()
}

pub fn effective_view(inst: &IsingInstance, t: &[usize], outer: &Assignment) -> Result<EffectiveView> {
    let n = inst.n();
    let (t, in_t) = sorted_set(n, t, "T")?;
    let rest: Vec<usize> = (0..n).filter(|&v| !in_t[v]).collect();
    if outer.len() != rest.len() {
        return Err(Error::LengthMismatch {
            expected: rest.len(),
            got: outer.len(),
        });
    }
    let mut full = Assignment::all_down(n);
    for (k, &v) in rest.iter().enumerate() {
        full.set_bit(v, outer.bit(k));
    }
    let mut view = EffectiveView {
        t: t.clone(),
        outer: outer.clone(),
        h_eff: Vec::with_capacity(t.len()),
        h_max: Vec::with_capacity(t.len()),
        fixed: Vec::new(),
        free: Vec::new(),
        forced: Vec::new(),
    };
    for &i in &t {
        let he = h_eff_of(inst, i, &in_t, |j| full.spin(j));
        let hm = h_max_of(inst, i, &in_t);
        if he.abs() >= hm {
            view.fixed.push(i);
            view.forced.push((i, if he > 0 { -1 } else { 1 }));
        } else {
            view.free.push(i);
        }
        view.h_eff.push(he);
        view.h_max.push(hm);
    }
    Ok(view)
}

/// Engine configuration: `t` with effective fields, `blocks` minimized
/// separately, everything else enumerated.
struct Layout {
    outer: Vec<usize>,
    t: Vec<usize>,
    h_max: Vec<i64>,
    inner: Vec<bool>,
    blocks: Vec<Vec<usize>>,
}

impl Layout {
    fn new(inst: &IsingInstance, t: &[usize], blocks: &[Vec<usize>]) -> Result<Self> {
        let n = inst.n();
        let mut all = t.to_vec();
        for b in blocks {
            all.extend(b);
        }
        let (_, inner) = sorted_set(n, &all, "T and blocks")?;
        let (t, _) = sorted_set(n, t, "T")?;
        let mut block_of = vec![usize::MAX; n];
        let mut sorted_blocks = Vec::with_capacity(blocks.len());
        for (k, b) in blocks.iter().enumerate() {
            let (b, _) = sorted_set(n, b, "block")?;
            for &v in &b {
                block_of[v] = k;
            }
            sorted_blocks.push(b);
        }
        for (i, j, _) in inst.couplings() {
            if block_of[i] != usize::MAX && block_of[j] != usize::MAX && block_of[i] != block_of[j] {
                return Err(Error::invalid(format!("blocks are coupled through ({i}, {j})")));
            }
        }
        let outer: Vec<usize> = (0..n).filter(|&v| !inner[v]).collect();
        check_enum_bits(outer.len(), "outer enumeration")?;
        let widest = sorted_blocks.iter().map(Vec::len).max().unwrap_or(0);
        check_enum_bits(t.len() + widest, "inner enumeration")?;
        let h_max = t.iter().map(|&i| h_max_of(inst, i, &inner)).collect();
        Ok(Layout {
            outer,
            t,
            h_max,
            inner,
            blocks: sorted_blocks,
        })
    }
}

#[derive(Default)]
struct Acc {
    best: Option<(i64, Vec<u64>)>,
    counters: Counters,
}

fn better(e: i64, w: &[u64], than: &Option<(i64, Vec<u64>)>) -> bool {
    match than {
        None => true,
        Some((be, bw)) => match e.cmp(be) {
            Ordering::Less => true,
            Ordering::Equal => w < bw.as_slice(),
            Ordering::Greater => false,
        },
    }
}

impl Acc {
    fn offer(&mut self, s: &SpinState<'_>) {
        if better(s.energy(), s.words(), &self.best) {
            self.best = Some((s.energy(), s.words().to_vec()));
        }
    }

    fn merge(&mut self, o: Acc) {
        self.counters.add(&o.counters);
        if let Some((e, w)) = o.best {
            if better(e, &w, &self.best) {
                self.best = Some((e, w));
            }
        }
    }
}

/// Minimizes each block in turn, leaving the state at the lexicographically
/// smallest block optimum. Returns the number of assignments visited.
fn settle_blocks(s: &mut SpinState<'_>, blocks: &[Vec<usize>]) -> u64 {
    let mut steps = 0;
    for b in blocks {
        let mut best: Option<(i64, Vec<u64>)> = None;
        gray_walk(s, b, |s| {
            if better(s.energy(), s.words(), &best) {
                best = Some((s.energy(), s.words().to_vec()));
            }
        });
        steps += 1u64 << b.len();
        let (_, words) = best.expect("a walk visits at least once");
        let target = Assignment::from_words(s.len(), words);
        for &v in b {
            s.set(v, target.bit(v));
        }
    }
    steps
}

fn walk_leaves(s: &mut SpinState<'_>, vars: &[usize], blocks: &[Vec<usize>], acc: &mut Acc) -> i64 {
    let mut emin = i64::MAX;
    let mut steps = 0;
    gray_walk(s, vars, |s| {
        steps += settle_blocks(s, blocks);
        emin = emin.min(s.energy());
        acc.offer(s);
    });
    acc.counters.block_steps += steps;
    emin
}

fn visit_outer(s: &mut SpinState<'_>, layout: &Layout, acc: &mut Acc, free: &mut Vec<usize>, weak: &mut Vec<usize>) {
    free.clear();
    weak.clear();
    acc.counters.outer_assignments += 1;
    for (k, &i) in layout.t.iter().enumerate() {
        let he = h_eff_of(s.instance(), i, &layout.inner, |j| s.spin(j));
        let hm = layout.h_max[k];
        if he.abs() < hm {
            free.push(i);
            continue;
        }
        s.set(i, he < 0);
        if he.abs() == hm && hm > 0 {
            weak.push(i);
        }
    }
    acc.counters.leaves_explored += 1u64 << free.len();
    let emin = walk_leaves(s, free, &layout.blocks, acc);
    if !weak.is_empty() && acc.best.as_ref().is_some_and(|(e, _)| *e == emin) {
        let mut both = free.clone();
        both.extend(weak.iter());
        acc.counters.tie_leaves += 1u64 << both.len();
        walk_leaves(s, &both, &layout.blocks, acc);
    }
}

fn run_engine(inst: &IsingInstance, layout: &Layout, workers: usize) -> (Assignment, i64, Counters) {
    let base = Assignment::all_down(inst.n());
    let parts = partitioned_walk(inst, &base, &layout.outer, workers, |state, walk| {
        let mut acc = Acc::default();
        let (mut free, mut weak) = (Vec::new(), Vec::new());
        gray_walk(state, walk, |s| visit_outer(s, layout, &mut acc, &mut free, &mut weak));
        acc
    });
    let mut total = Acc::default();
    for p in parts {
        total.merge(p);
    }
    let (energy, words) = total.best.expect("at least one leaf");
    (Assignment::from_words(inst.n(), words), energy, total.counters)
}

fn engine_result(
    inst: &IsingInstance,
    t: &[usize],
    blocks: &[Vec<usize>],
    method: Method,
    engine: Method,
    workers: usize,
    notes: Vec<String>,
) -> Result<SolveResult> {
    let layout = Layout::new(inst, t, blocks)?;
    let (best, energy, counters) = run_engine(inst, &layout, workers);
    Ok(SolveResult {
        best,
        energy,
        method,
        engine,
        counters,
        t: layout.t,
        blocks: layout.blocks,
        notes,
    })
}

/// Exhaustive Gray-code scan.
pub fn solve_brute(inst: &IsingInstance, workers: usize) -> Result<SolveResult> {
    engine_result(inst, &[], &[], Method::Brute, Method::Brute, workers, Vec::new())
}

/// Effective-field enumeration with the set of a certificate. Exact for any
/// set; the certificate conditions only bound the work.
pub fn solve_effective(inst: &IsingInstance, cert: &TSetCertificate, workers: usize) -> Result<SolveResult> {
    let mut notes = Vec::new();
    if !cert.success {
        notes.push("certificate not successful; set used as given".into());
    }
    engine_result(inst, &cert.t, &[], Method::Effective, Method::Effective, workers, notes)
}

/// Engine over an arbitrary set `t`, with `h_max` taken over `t` and the
/// blocks.
pub fn solve_with_sets(
    inst: &IsingInstance,
    t: &[usize],
    blocks: &[Vec<usize>],
    workers: usize,
) -> Result<SolveResult> {
    engine_result(
        inst,
        t,
        blocks,
        Method::Effective,
        Method::Effective,
        workers,
        Vec::new(),
    )
}

/// Greedy coloring in index order; each vertex takes the smallest color
/// unused by its lower-indexed neighbors.
pub fn greedy_coloring(graph: &DegreeGraph) -> Vec<usize> {
    let n = graph.n();
    let mut color = vec![usize::MAX; n];
    let mut used = Vec::new();
    for v in 0..n {
        used.clear();
        used.resize(graph.degree(v) + 1, false);
        for &u in graph.neighbors(v) {
            if color[u] < used.len() {
                used[color[u]] = true;
            }
        }
        color[v] = used.iter().position(|&x| !x).expect("degree + 1 slots");
    }
    color
}

/// Largest color class; the lowest color wins ties.
pub fn largest_color_class(graph: &DegreeGraph) -> Vec<usize> {
    let color = greedy_coloring(graph);
    let k = color.iter().copied().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for &c in &color {
        sizes[c] += 1;
    }
    let Some(best) = (0..k).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))) else {
        return Vec::new();
    };
    (0..graph.n()).filter(|&v| color[v] == best).collect()
}

/// Enumerates the complement of the largest greedy color class; the class is
/// independent, so every member is fixed by its effective field.
pub fn solve_coloring_baseline(inst: &IsingInstance, workers: usize) -> Result<SolveResult> {
    let t = largest_color_class(&inst.degree_graph());
    engine_result(inst, &t, &[], Method::Coloring, Method::Coloring, workers, Vec::new())
}

fn coloring_in(inst: &IsingInstance, pool: &[usize]) -> Result<Vec<usize>> {
    let sub = inst.restrict(pool, &Assignment::all_down(inst.n()))?;
    Ok(largest_color_class(&sub.degree_graph())
        .into_iter()
        .map(|k| pool[k])
        .collect())
}

/// A certified set inside `pool`, built on the instance induced by `pool`;
/// falls back to the largest color class there.
fn t_within(inst: &IsingInstance, pool: &[usize], opts: &SolveOptions, notes: &mut Vec<String>) -> Result<Vec<usize>> {
    if pool.is_empty() {
        return Ok(Vec::new());
    }
    let sub = inst.restrict(pool, &Assignment::all_down(inst.n()))?;
    let cert = find_t_randomized(&sub, &opts.params, opts.seed, opts.retries)?;
    if cert.success {
        notes.push(format!(
            "certified T of size {} on {} variables",
            cert.t.len(),
            pool.len()
        ));
        Ok(cert.t.iter().map(|&k| pool[k]).collect())
    } else {
        notes.push("T construction failed; largest color class used".into());
        coloring_in(inst, pool)
    }
}

/// Automatic effective pipeline: certified `T` when the maximum degree is at
/// least [`AUTO_MIN_DEGREE`], else (or on failure) the coloring baseline,
/// then brute force.
pub fn solve_auto(inst: &IsingInstance, opts: &SolveOptions) -> Result<SolveResult> {
    let mut notes = Vec::new();
    let dmax = inst.degree_graph().max_degree();
    if dmax >= AUTO_MIN_DEGREE {
        let cert = find_t_randomized(inst, &opts.params, opts.seed, opts.retries)?;
        if cert.success {
            notes.push(format!("certified T of size {}", cert.t.len()));
            return engine_result(
                inst,
                &cert.t,
                &[],
                Method::Effective,
                Method::Effective,
                opts.workers,
                notes,
            );
        }
        notes.push("T construction failed".into());
    } else {
        notes.push(format!("max degree {dmax} below {AUTO_MIN_DEGREE}"));
    }
    fallback(inst, Method::Effective, opts.workers, notes)
}

fn fallback(inst: &IsingInstance, method: Method, workers: usize, mut notes: Vec<String>) -> Result<SolveResult> {
    let t = largest_color_class(&inst.degree_graph());
    notes.push("coloring baseline".into());
    match engine_result(inst, &t, &[], method, Method::Coloring, workers, notes.clone()) {
        Err(Error::ResourceLimit(_)) => {
            notes.push("brute force".into());
            engine_result(inst, &[], &[], method, Method::Brute, workers, notes)
        }
        other => other,
    }
}

/// Variables of degree at most twice the average degree.
pub fn low_degree_set(graph: &DegreeGraph, factor: f64) -> Vec<usize> {
    let cap = factor * graph.average_degree();
    (0..graph.n()).filter(|&v| graph.degree(v) as f64 <= cap).collect()
}

/// Enumerates the variables of degree above `2 d`; `T` is certified on the
/// instance induced by the rest, whose maximum degree is at most `2 d`.
pub fn solve_avg_degree(inst: &IsingInstance, opts: &SolveOptions) -> Result<SolveResult> {
    let graph = inst.degree_graph();
    let w = low_degree_set(&graph, 2.0);
    let mut notes = vec![format!("|W| = {} of {}", w.len(), inst.n())];
    let t = t_within(inst, &w, opts, &mut notes)?;
    engine_result(inst, &t, &[], Method::AvgDegree, Method::AvgDegree, opts.workers, notes)
}

/// Checks `sum_j |J_ij| <= j_max` for every `i`.
pub fn check_row_bound(inst: &IsingInstance, j_max: i64) -> Result<()> {
    for i in 0..inst.n() {
        let s = inst.abs_row_sum(i);
        if s > j_max {
            return Err(Error::Precondition(format!(
                "row {i} has sum |J| = {s} above J_max = {j_max}"
            )));
        }
    }
    Ok(())
}

/// Split-set solver: `T1`, `T2` with no edge between them are minimized
/// separately at every leaf, and `T` is certified inside the low-degree part
/// of the remainder with the extra split-coupling condition.
///
/// When fewer than [`DEGREE_SHARE`] of the vertices reach degree `d_TT`,
/// the variables above `d_TT` are enumerated instead and `T` is built on the
/// rest. If `T1`, `T2` cannot be built the automatic effective pipeline runs.
pub fn solve_combined(inst: &IsingInstance, alpha: f64, j_max: i64, opts: &SolveOptions) -> Result<SolveResult> {
    check_row_bound(inst, j_max)?;
    let graph = inst.degree_graph();
    let n = inst.n();
    let d = graph.average_degree();
    let mut params = opts.params.clone();
    if params.degree.is_none() {
        params.degree = Some(d.max(1.0));
    }
    let th = params.thresholds(inst)?;
    let opts = SolveOptions { params, ..opts.clone() };
    let mut notes = Vec::new();

    let reach = (0..n).filter(|&v| graph.degree(v) >= th.d_tt).count();
    if n > 0 && (reach as f64) < DEGREE_SHARE * n as f64 {
        let rest: Vec<usize> = (0..n).filter(|&v| graph.degree(v) <= th.d_tt).collect();
        notes.push(format!(
            "{reach} of {n} vertices reach d_TT = {}; enumerating higher degrees",
            th.d_tt
        ));
        let t = t_within(inst, &rest, &opts, &mut notes)?;
        return engine_result(inst, &t, &[], Method::Combined, Method::Effective, opts.workers, notes);
    }

    let split = match find_t1t2(&graph, alpha, opts.seed, opts.retries) {
        Ok(s) if s.success => s,
        Ok(_) => {
            notes.push("T1/T2 construction failed".into());
            return fallback_auto(inst, &opts, notes);
        }
        Err(e) => {
            notes.push(format!("T1/T2 unavailable: {e}"));
            return fallback_auto(inst, &opts, notes);
        }
    };
    notes.push(format!("|T1| = |T2| = {}", split.target));

    let mut in_split = vec![false; n];
    for &v in split.t1.iter().chain(&split.t2) {
        in_split[v] = true;
    }
    let cap = 2.0 * d;
    let w0: Vec<usize> = (0..n)
        .filter(|&v| !in_split[v] && graph.degree(v) as f64 <= cap)
        .collect();
    // T is built on the instance induced by W0 u T1 u T2.
    let mut region = w0.clone();
    region.extend(&split.t1);
    region.extend(&split.t2);
    region.sort_unstable();
    let local: std::collections::HashMap<usize, usize> = region.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let sub = inst.restrict(&region, &Assignment::all_down(n))?;
    let constraint = SplitConstraint {
        t1: split.t1.iter().map(|v| local[v]).collect(),
        t2: split.t2.iter().map(|v| local[v]).collect(),
        j_max,
    };
    let pool: Vec<usize> = w0.iter().map(|v| local[v]).collect();
    let cert = find_t_constrained(&sub, &pool, &constraint, &opts.params, opts.seed, opts.retries)?;
    let t: Vec<usize> = cert.t.iter().map(|&k| region[k]).collect();
    notes.push(format!(
        "constrained T of size {} ({})",
        t.len(),
        if cert.success { "certified" } else { "below size target" }
    ));
    let blocks = vec![split.t1.clone(), split.t2.clone()];
    engine_result(
        inst,
        &t,
        &blocks,
        Method::Combined,
        Method::Combined,
        opts.workers,
        notes,
    )
}

fn fallback_auto(inst: &IsingInstance, opts: &SolveOptions, mut notes: Vec<String>) -> Result<SolveResult> {
    let mut r = solve_auto(inst, opts)?;
    notes.append(&mut r.notes);
    r.notes = notes;
    r.method = Method::Combined;
    Ok(r)
}

fn z_counts(inst: &IsingInstance, layout: &Layout, workers: usize) -> BigUint {
    let base = Assignment::all_down(inst.n());
    let width = layout.t.len() + 1;
    let parts = partitioned_walk(inst, &base, &layout.outer, workers, |state, walk| {
        let mut hist = vec![0u64; width];
        gray_walk(state, walk, |s| {
            let free = layout
                .t
                .iter()
                .zip(&layout.h_max)
                .filter(|&(&i, &hm)| h_eff_of(s.instance(), i, &layout.inner, |j| s.spin(j)).abs() < hm)
                .count();
            hist[free] += 1;
        });
        hist
    });
    let mut z = BigUint::zero();
    for hist in parts {
        for (k, &c) in hist.iter().enumerate() {
            if c > 0 {
                z += BigUint::from(c) << k;
            }
        }
    }
    z
}

/// `Z = sum over assignments of the complement of T of 2^|F|`.
pub fn compute_z(inst: &IsingInstance, t: &[usize], workers: usize) -> Result<BigUint> {
    let layout = Layout::new(inst, t, &[])?;
    Ok(z_counts(inst, &layout, workers))
}

/// `Z` with `h_max` taken over `T` and the blocks, as used by the split-set
/// solver.
pub fn compute_z_with_blocks(
    inst: &IsingInstance,
    t: &[usize],
    blocks: &[Vec<usize>],
    workers: usize,
) -> Result<BigUint> {
    let layout = Layout::new(inst, t, blocks)?;
    Ok(z_counts(inst, &layout, workers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_column, gen_csse, gen_multicopy, gen_random, ColumnTargets, RandomSpec};
    use crate::tset::check_t;

    fn oracle(inst: &IsingInstance) -> (i64, Assignment) {
        let mut best: Option<(i64, Assignment)> = None;
        for m in 0..1u64 << inst.n() {
            let a = Assignment::from_mask(inst.n(), m);
            let e = inst.energy(&a).unwrap();
            if best.as_ref().is_none_or(|(be, ba)| e < *be || (e == *be && a < *ba)) {
                best = Some((e, a));
            }
        }
        best.unwrap()
    }

    #[test]
    fn brute_on_csse_and_single_field() {
        let r = solve_brute(&gen_csse(4).unwrap(), 1).unwrap();
        assert_eq!(r.energy, 8);
        assert_eq!(r.best.to_string(), "0011");
        assert_eq!(r.counters.leaves_explored, 16);

        let inst = IsingInstance::new(vec![3], &[], 5).unwrap();
        let r = solve_brute(&inst, 1).unwrap();
        assert_eq!((r.energy, r.best.spin(0)), (2, -1));

        let ci = gen_column(2, 2, ColumnTargets::Zeros).unwrap();
        assert_eq!(solve_brute(&ci.inst, 1).unwrap().energy, 0);
    }

    #[test]
    fn view_examples() {
        let inst = IsingInstance::new(vec![0, 0, 0], &[(0, 2, 1), (1, 2, 1)], 0).unwrap();
        let v = effective_view(&inst, &[2], &"++".parse().unwrap()).unwrap();
        assert_eq!((v.h_eff[0], v.h_max[0]), (2, 0));
        assert_eq!(v.forced, vec![(2, -1)]);

        let inst = IsingInstance::new(vec![0; 4], &[(0, 1, 5), (0, 2, 1), (1, 3, 1)], 0).unwrap();
        let v = effective_view(&inst, &[0, 1], &"++".parse().unwrap()).unwrap();
        assert_eq!(v.free, vec![0, 1]);
        assert_eq!(v.h_eff, vec![1, 1]);

        let inst = gen_random(&RandomSpec {
            n: 6,
            density: 0.5,
            wmin: -3,
            wmax: 3,
            seed: 4,
        })
        .unwrap();
        let all: Vec<usize> = (0..6).collect();
        let v = effective_view(&inst, &all, &Assignment::all_down(0)).unwrap();
        assert_eq!(v.h_eff, inst.h());
        let rows: Vec<i64> = (0..6).map(|i| inst.abs_row_sum(i)).collect();
        assert_eq!(v.h_max, rows);
    }

    #[test]
    fn z_example_and_edgeless() {
        let inst = IsingInstance::new(vec![0; 4], &[(0, 1, 5), (0, 2, 1), (1, 3, 1)], 0).unwrap();
        assert_eq!(compute_z(&inst, &[0, 1], 1).unwrap(), BigUint::from(16u32));

        let inst = IsingInstance::new(vec![1, -2, 3, 1, 1], &[], 0).unwrap();
        assert_eq!(compute_z(&inst, &[1, 3], 1).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn z_matches_direct_view_enumeration() {
        let inst = gen_csse(4).unwrap();
        let mut z = 0u64;
        for m in 0..8 {
            let v = effective_view(&inst, &[0], &Assignment::from_mask(3, m)).unwrap();
            z += 1 << v.free.len();
        }
        assert_eq!(compute_z(&inst, &[0], 1).unwrap(), BigUint::from(z));
    }

    #[test]
    fn every_solver_matches_oracle() {
        for seed in 0..40 {
            let n = 6 + (seed as usize % 7);
            let density = [0.1, 0.3, 0.7][seed as usize % 3];
            let inst = gen_random(&RandomSpec {
                n,
                density,
                wmin: -5,
                wmax: 5,
                seed,
            })
            .unwrap();
            let (e, a) = oracle(&inst);
            let opts = SolveOptions {
                seed,
                ..Default::default()
            };
            let cert = find_t_randomized(&inst, &TParams::default(), seed, 4).unwrap();
            let dmax = (0..n).map(|i| inst.abs_row_sum(i)).max().unwrap_or(0);
            for r in [
                solve_brute(&inst, 1).unwrap(),
                solve_coloring_baseline(&inst, 1).unwrap(),
                solve_effective(&inst, &cert, 1).unwrap(),
                solve_auto(&inst, &opts).unwrap(),
                solve_avg_degree(&inst, &opts).unwrap(),
                solve_combined(&inst, 0.5, dmax, &opts).unwrap(),
            ] {
                assert_eq!((r.energy, &r.best), (e, &a), "seed {seed} {:?}", r.method);
            }
        }
    }

    #[test]
    fn weak_ties_resolve_lexicographically() {
        // h_eff of variable 1 is -1 = -h_max when variable 0 is down, and
        // flipping it costs nothing at the optimum.
        let inst = IsingInstance::new(vec![0, 0, 0], &[(0, 1, 1), (1, 2, 1)], 0).unwrap();
        let (e, a) = oracle(&inst);
        let r = solve_with_sets(&inst, &[1, 2], &[], 1).unwrap();
        assert_eq!((r.energy, r.best), (e, a));
    }

    #[test]
    fn leaves_equal_z_and_bound_minima() {
        let inst = gen_multicopy(3, 4).unwrap();
        let cert = find_t_randomized(&inst, &TParams::default(), 3, 8).unwrap();
        assert!(check_t(&inst, &cert.t, &TParams::default(), None).unwrap().checks.all());
        let r = solve_effective(&inst, &cert, 1).unwrap();
        let z = compute_z(&inst, &cert.t, 1).unwrap();
        assert_eq!(BigUint::from(r.counters.leaves_explored), z);
        assert!(BigUint::from(216u32) <= z);
        assert_eq!(r.energy, solve_brute(&inst, 1).unwrap().energy);
    }

    #[test]
    fn coloring_on_multicopy_uses_classes_of_three() {
        let inst = gen_multicopy(3, 4).unwrap();
        let r = solve_coloring_baseline(&inst, 1).unwrap();
        assert_eq!(r.t.len(), 3);
        assert_eq!(r.counters.outer_assignments, 1 << 9);
        assert_eq!(r.counters.leaves_explored, 1 << 9);
    }

    #[test]
    fn edgeless_instances() {
        let inst = IsingInstance::new(vec![2, -1, 0, 4], &[], 0).unwrap();
        let all: Vec<usize> = (0..4).collect();
        let r = solve_with_sets(&inst, &all, &[], 1).unwrap();
        assert_eq!(r.counters.outer_assignments, 1);
        assert_eq!(r.counters.leaves_explored, 1);
        assert_eq!(r.best.to_string(), "0100");
        let c = solve_coloring_baseline(&inst, 1).unwrap();
        assert_eq!(c.best, r.best);
        let opts = SolveOptions::default();
        assert_eq!(solve_combined(&inst, 0.5, 0, &opts).unwrap().best, r.best);
    }

    #[test]
    fn combined_splits_disjoint_blocks() {
        let inst = gen_multicopy(2, 6).unwrap();
        let params = TParams {
            c_dtbar: 0.5,
            ..TParams::default()
        };
        let opts = SolveOptions {
            params,
            ..Default::default()
        };
        let r = solve_combined(&inst, 0.5, 10, &opts).unwrap();
        assert_eq!(r.engine, Method::Combined);
        let (e, a) = oracle(&inst);
        assert_eq!((r.energy, r.best), (e, a));
        let (b1, b2) = (&r.blocks[0], &r.blocks[1]);
        assert!(b1.iter().all(|&v| v < 6) && b2.iter().all(|&v| v >= 6));
    }

    #[test]
    fn combined_rejects_row_bound_violation() {
        let inst = gen_csse(4).unwrap();
        assert!(matches!(
            solve_combined(&inst, 0.5, 5, &SolveOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn star_hub_is_enumerated() {
        let edges: Vec<(usize, usize, i64)> = (1..10).map(|v| (0, v, 1)).collect();
        let inst = IsingInstance::new(vec![1; 10], &edges, 0).unwrap();
        let w = low_degree_set(&inst.degree_graph(), 2.0);
        assert!(!w.contains(&0));
        assert_eq!(w.len(), 9);
        let r = solve_avg_degree(&inst, &SolveOptions::default()).unwrap();
        assert!(!r.t.contains(&0));
        assert_eq!(r.energy, oracle(&inst).0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let inst = gen_random(&RandomSpec {
            n: 16,
            density: 0.3,
            wmin: -5,
            wmax: 5,
            seed: 11,
        })
        .unwrap();
        let a = solve_brute(&inst, 1).unwrap();
        let b = solve_brute(&inst, 4).unwrap();
        assert_eq!(a, b);
        let t = largest_color_class(&inst.degree_graph());
        assert_eq!(compute_z(&inst, &t, 1).unwrap(), compute_z(&inst, &t, 3).unwrap());
    }

    #[test]
    fn coupled_blocks_are_rejected() {
        let inst = gen_csse(4).unwrap();
        assert!(solve_with_sets(&inst, &[], &[vec![0], vec![1]], 1).is_err());
    }
}
