//! Construction and certification of the variable subsets that drive the
//! effective-field solver.
//!
//! A set `T` is useful when couplings inside `T` are weak compared with the
//! couplings from each member to the outside. [`check_t`] evaluates the
//! conditions on a candidate set:
//!
//! 1. every member has at most `d_T = c_dT * eps * d` neighbors inside `T`;
//! 2. every member with an internal neighbor (every member, in constrained
//!    mode) has at least `d_TT = floor(1 / (c_dTbar * eps))` outside
//!    neighbors `j` with `|J_ij| >= max_{k in T} |J_ik|`; `d_TT` of them are
//!    selected as *strong edges*;
//! 3. for every member, the strong edges landing on its outside neighbors
//!    number at most `Delta = c_Delta * d`;
//! 4. (constrained mode) `sum_{j in T1 u T2} |J_ij| <= c_split * J_max *
//!    (|T1| + |T2|) / |V0|`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{DegreeGraph, IsingInstance};
use crate::rng::{seeded, seeded_stream};

/// Subset enumeration is only offered up to this many variables.
pub const MAX_DETERMINISTIC_N: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrongEdgeRule {
    /// Largest `|J_ij|` first, lower index on ties.
    Greedy,
    /// Uniform choice among qualifying edges, seeded per vertex.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TParams {
    /// Sampling density; `None` means `log2(d) / d` (0.5 when `d < 2`).
    pub epsilon: Option<f64>,
    /// Degree bound `d`; `None` means the instance's maximum degree.
    pub degree: Option<f64>,
    pub c_dt: f64,
    pub c_dtbar: f64,
    pub c_delta: f64,
    pub c_split: f64,
    /// Minimum acceptable `|T| / (eps * N)` for randomized construction.
    pub target_fraction: f64,
    pub strong_edges: StrongEdgeRule,
}

impl Default for TParams {
    fn default() -> Self {
        TParams {
            epsilon: None,
            degree: None,
            c_dt: 99.0,
            c_dtbar: 99.0,
            c_delta: 99.0,
            c_split: 99.0,
            target_fraction: 0.5,
            strong_edges: StrongEdgeRule::Greedy,
        }
    }
}

/// Numeric thresholds derived from [`TParams`] for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub d: f64,
    pub epsilon: f64,
    pub d_t: f64,
    /// Clamped to at least 1.
    pub d_tt: usize,
    pub delta: f64,
}

pub fn default_epsilon(d: f64) -> f64 {
    if d < 2.0 {
        0.5
    } else {
        d.log2() / d
    }
}

impl TParams {
    pub fn with_epsilon(epsilon: f64) -> Self {
        TParams {
            epsilon: Some(epsilon),
            ..Default::default()
        }
    }

    pub fn thresholds(&self, inst: &IsingInstance) -> Result<Thresholds> {
        let d = self.degree.unwrap_or_else(|| inst.degree_graph().max_degree() as f64);
        let epsilon = self.epsilon.unwrap_or_else(|| default_epsilon(d));
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon {epsilon} outside (0, 1)")));
        }
        if self.c_dt <= 0.0 || self.c_dtbar <= 0.0 || self.c_delta <= 0.0 || self.c_split <= 0.0 {
            return Err(Error::invalid("T-set constants must be positive"));
        }
        let d_tt = ((1.0 / (self.c_dtbar * epsilon)).floor() as usize).max(1);
        Ok(Thresholds {
            d,
            epsilon,
            d_t: self.c_dt * epsilon * d,
            d_tt,
            delta: self.c_delta * d,
        })
    }
}

/// Extra requirements when `T` must avoid and weakly couple to `T1 u T2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitConstraint {
    pub t1: Vec<usize>,
    pub t2: Vec<usize>,
    pub j_max: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub internal_degree: bool,
    pub strong_edge_count: bool,
    pub strong_edge_load: bool,
    /// Only evaluated in constrained mode.
    pub split_coupling: Option<bool>,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.internal_degree && self.strong_edge_count && self.strong_edge_load && self.split_coupling.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TMethod {
    Checked,
    Randomized { seed: u64, attempts: usize },
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TSetCertificate {
    /// Members in ascending order.
    pub t: Vec<usize>,
    /// Selected strong edges per member (members exempt from condition 2 map
    /// to an empty list).
    pub strong_edges: BTreeMap<usize, Vec<usize>>,
    pub thresholds: Thresholds,
    /// Bound of the fourth condition, in constrained mode.
    pub split_bound: Option<f64>,
    pub checks: Checks,
    /// Members failing at least one condition.
    pub violations: Vec<usize>,
    pub max_internal_degree: usize,
    pub max_strong_load: usize,
    pub method: TMethod,
    /// All checks pass on a nonempty set (and, for constructions, the size
    /// target was met).
    pub success: bool,
}

#[derive(Debug, Clone, Default)]
struct VertexEval {
    internal_degree: usize,
    candidates: usize,
    strong: Vec<usize>,
    exempt: bool,
    split_sum: i64,
}

struct Evaluation {
    per_vertex: Vec<VertexEval>,
    load: Vec<usize>,
}

/// Evaluates conditions 1, 2 and the strong-edge selection for `members`
/// of the set described by `in_t`.
fn evaluate(
    inst: &IsingInstance,
    in_t: &[bool],
    members: &[usize],
    th: &Thresholds,
    constraint: Option<(&[bool], &SplitConstraint)>,
    rule: StrongEdgeRule,
    select: impl Fn(&VertexEval) -> bool,
) -> Evaluation {
    let mut per_vertex = Vec::with_capacity(members.len());
    let mut load = vec![0usize; inst.n()];
    for &i in members {
        let nbrs = inst.neighbors(i);
        let internal: Vec<i64> = nbrs.iter().filter(|&&(j, _)| in_t[j]).map(|&(_, w)| w.abs()).collect();
        let max_in = internal.iter().copied().max().unwrap_or(0);
        let exempt = constraint.is_none() && internal.is_empty();
        let mut cands: Vec<(usize, i64)> = if exempt {
            Vec::new()
        } else {
            nbrs.iter()
                .filter(|&&(j, w)| !in_t[j] && w.abs() >= max_in)
                .map(|&(j, w)| (j, w.abs()))
                .collect()
        };
        let mut ev = VertexEval {
            internal_degree: internal.len(),
            candidates: cands.len(),
            exempt,
            split_sum: constraint
                .map(|(in_split, _)| nbrs.iter().filter(|&&(j, _)| in_split[j]).map(|&(_, w)| w.abs()).sum())
                .unwrap_or(0),
            strong: Vec::new(),
        };
        if !exempt && cands.len() >= th.d_tt && select(&ev) {
            match rule {
                StrongEdgeRule::Greedy => {
                    cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                }
                StrongEdgeRule::Random(seed) => {
                    cands.shuffle(&mut seeded_stream(seed, i as u64));
                }
            }
            let mut strong: Vec<usize> = cands[..th.d_tt].iter().map(|&(j, _)| j).collect();
            strong.sort_unstable();
            for &j in &strong {
                load[j] += 1;
            }
            ev.strong = strong;
        }
        per_vertex.push(ev);
    }
    Evaluation { per_vertex, load }
}

fn strong_load(inst: &IsingInstance, in_t: &[bool], load: &[usize], i: usize) -> usize {
    inst.neighbors(i)
        .iter()
        .filter(|&&(j, _)| !in_t[j])
        .map(|&(j, _)| load[j])
        .sum()
}

fn membership(n: usize, set: &[usize], what: &str) -> Result<Vec<bool>> {
    let mut mark = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, n });
        }
        if std::mem::replace(&mut mark[v], true) {
            return Err(Error::invalid(format!("variable {v} repeated in {what}")));
        }
    }
    Ok(mark)
}

fn split_bound(n: usize, c: &SplitConstraint, c_split: f64) -> f64 {
    let split = (c.t1.len() + c.t2.len()) as f64;
    let v0 = (n - c.t1.len() - c.t2.len()).max(1) as f64;
    c_split * c.j_max as f64 * split / v0
}

/// Evaluates every condition on `t` and selects strong edges.
pub fn check_t(
    inst: &IsingInstance,
    t: &[usize],
    params: &TParams,
    constraint: Option<&SplitConstraint>,
) -> Result<TSetCertificate> {
    let th = params.thresholds(inst)?;
    let n = inst.n();
    let in_t = membership(n, t, "T")?;
    let mut members = t.to_vec();
    members.sort_unstable();
    let split = match constraint {
        Some(c) => {
            let mut both = c.t1.clone();
            both.extend(&c.t2);
            let in_split = membership(n, &both, "T1 u T2")?;
            if members.iter().any(|&v| in_split[v]) {
                return Err(Error::invalid("T must be disjoint from T1 and T2"));
            }
            Some((in_split, c))
        }
        None => None,
    };
    let bound = constraint.map(|c| split_bound(n, c, params.c_split));
    let eval = evaluate(
        inst,
        &in_t,
        &members,
        &th,
        split.as_ref().map(|(m, c)| (m.as_slice(), *c)),
        params.strong_edges,
        |_| true,
    );

    let mut checks = Checks {
        internal_degree: true,
        strong_edge_count: true,
        strong_edge_load: true,
        split_coupling: bound.map(|_| true),
    };
    let mut violations = Vec::new();
    let mut max_internal_degree = 0;
    let mut max_strong_load = 0;
    let mut strong_edges = BTreeMap::new();
    for (&i, ev) in members.iter().zip(&eval.per_vertex) {
        let c1 = ev.internal_degree as f64 <= th.d_t;
        let c2 = ev.exempt || ev.candidates >= th.d_tt;
        let load = strong_load(inst, &in_t, &eval.load, i);
        let c3 = load as f64 <= th.delta;
        let c4 = bound.is_none_or(|b| ev.split_sum as f64 <= b);
        checks.internal_degree &= c1;
        checks.strong_edge_count &= c2;
        checks.strong_edge_load &= c3;
        if let Some(s) = checks.split_coupling.as_mut() {
            *s &= c4;
        }
        if !(c1 && c2 && c3 && c4) {
            violations.push(i);
        }
        max_internal_degree = max_internal_degree.max(ev.internal_degree);
        max_strong_load = max_strong_load.max(load);
        strong_edges.insert(i, ev.strong.clone());
    }
    Ok(TSetCertificate {
        success: checks.all() && !members.is_empty(),
        t: members,
        strong_edges,
        thresholds: th,
        split_bound: bound,
        checks,
        violations,
        max_internal_degree,
        max_strong_load,
        method: TMethod::Checked,
    })
}

/// Re-validates a certificate against its own stored strong edges.
///
/// Confirms each strong edge leaves `T`, is a real coupling at least as
/// strong as every internal coupling of its member, that non-exempt members
/// carry exactly `d_TT` of them, and that conditions 1, 3 and 4 hold for the
/// stored selection.
pub fn verify_certificate(
    inst: &IsingInstance,
    cert: &TSetCertificate,
    constraint: Option<&SplitConstraint>,
) -> Result<bool> {
    let n = inst.n();
    let in_t = membership(n, &cert.t, "T")?;
    let th = &cert.thresholds;
    let mut load = vec![0usize; n];
    for &i in &cert.t {
        let strong = cert.strong_edges.get(&i).map(Vec::as_slice).unwrap_or(&[]);
        let internal: Vec<i64> = inst
            .neighbors(i)
            .iter()
            .filter(|&&(j, _)| in_t[j])
            .map(|&(_, w)| w.abs())
            .collect();
        if internal.len() as f64 > th.d_t {
            return Ok(false);
        }
        let exempt = constraint.is_none() && internal.is_empty();
        if !exempt && strong.len() != th.d_tt {
            return Ok(false);
        }
        let max_in = internal.iter().copied().max().unwrap_or(0);
        for &j in strong {
            let w = inst.coupling(i, j).abs();
            if in_t[j] || w == 0 || w < max_in {
                return Ok(false);
            }
            load[j] += 1;
        }
    }
    for &i in &cert.t {
        if strong_load(inst, &in_t, &load, i) as f64 > th.delta {
            return Ok(false);
        }
    }
    if let Some(c) = constraint {
        let mut both = c.t1.clone();
        both.extend(&c.t2);
        let in_split = membership(n, &both, "T1 u T2")?;
        let bound = split_bound(n, c, 99.0).max(cert.split_bound.unwrap_or(f64::NEG_INFINITY));
        for &i in &cert.t {
            if in_split[i] {
                return Ok(false);
            }
            let s: i64 = inst
                .neighbors(i)
                .iter()
                .filter(|&&(j, _)| in_split[j])
                .map(|&(_, w)| w.abs())
                .sum();
            if s as f64 > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Labels a sampled set good/bad and keeps the good members, then removes
/// members until the whole set certifies.
fn label_and_prune(
    inst: &IsingInstance,
    pool: &[usize],
    params: &TParams,
    th: &Thresholds,
    constraint: Option<&SplitConstraint>,
    rng: &mut crate::rng::Rng,
) -> Result<TSetCertificate> {
    let n = inst.n();
    let t0: Vec<usize> = pool.iter().copied().filter(|_| rng.gen_bool(th.epsilon)).collect();
    let in_t0 = membership(n, &t0, "T0")?;
    let split = match constraint {
        Some(c) => {
            let mut both = c.t1.clone();
            both.extend(&c.t2);
            Some((membership(n, &both, "T1 u T2")?, c))
        }
        None => None,
    };
    let bound = constraint.map(|c| split_bound(n, c, params.c_split));
    let edge_seed: u64 = rng.gen();
    let eval = evaluate(
        inst,
        &in_t0,
        &t0,
        th,
        split.as_ref().map(|(m, c)| (m.as_slice(), *c)),
        StrongEdgeRule::Random(edge_seed),
        |ev| ev.internal_degree as f64 <= th.d_t,
    );
    let mut good = Vec::new();
    for (&i, ev) in t0.iter().zip(&eval.per_vertex) {
        if constraint.is_some() && (inst.degree(i) < th.d_tt) {
            continue;
        }
        let c1 = ev.internal_degree as f64 <= th.d_t;
        let c2 = ev.exempt || ev.candidates >= th.d_tt;
        let c3 = strong_load(inst, &in_t0, &eval.load, i) as f64 <= th.delta;
        // Sampling marks a vertex bad once the sum reaches the bound.
        let c4 = bound.is_none_or(|b| (ev.split_sum as f64) < b);
        if ev.exempt || (c1 && c2 && c3 && c4) {
            good.push(i);
        }
    }
    let mut cert = check_t(inst, &good, params, constraint)?;
    while !cert.violations.is_empty() {
        let drop: std::collections::HashSet<usize> = cert.violations.iter().copied().collect();
        let kept: Vec<usize> = cert.t.iter().copied().filter(|v| !drop.contains(v)).collect();
        cert = check_t(inst, &kept, params, constraint)?;
    }
    Ok(cert)
}

fn randomized(
    inst: &IsingInstance,
    pool: &[usize],
    params: &TParams,
    constraint: Option<&SplitConstraint>,
    seed: u64,
    max_retries: usize,
) -> Result<TSetCertificate> {
    let th = params.thresholds(inst)?;
    let target = params.target_fraction * th.epsilon * pool.len() as f64;
    let mut best: Option<TSetCertificate> = None;
    for attempt in 0..=max_retries {
        let mut rng = seeded_stream(seed, attempt as u64);
        let mut cert = label_and_prune(inst, pool, params, &th, constraint, &mut rng)?;
        cert.method = TMethod::Randomized {
            seed,
            attempts: attempt + 1,
        };
        let big_enough = !cert.t.is_empty() && cert.t.len() as f64 >= target;
        cert.success = cert.success && big_enough;
        if cert.success {
            return Ok(cert);
        }
        if best.as_ref().is_none_or(|b| cert.t.len() > b.t.len()) {
            best = Some(cert);
        }
    }
    let mut best = best.expect("at least one attempt");
    best.success = false;
    best.method = TMethod::Randomized {
        seed,
        attempts: max_retries + 1,
    };
    Ok(best)
}

/// Random sampling with per-vertex probability `eps`, good/bad labeling,
/// and pruning to a certified set. Attempt `a` draws from stream `a` of the
/// seed; after `max_retries` failed retries the largest certified set is
/// returned with `success == false`.
pub fn find_t_randomized(
    inst: &IsingInstance,
    params: &TParams,
    seed: u64,
    max_retries: usize,
) -> Result<TSetCertificate> {
    let pool: Vec<usize> = (0..inst.n()).collect();
    randomized(inst, &pool, params, None, seed, max_retries)
}

/// Constrained variant: `T` is drawn from `pool` (disjoint from `T1 u T2`),
/// members must have degree at least `d_TT`, carry strong edges with
/// nonzero couplings, and satisfy the fourth condition.
pub fn find_t_constrained(
    inst: &IsingInstance,
    pool: &[usize],
    constraint: &SplitConstraint,
    params: &TParams,
    seed: u64,
    max_retries: usize,
) -> Result<TSetCertificate> {
    randomized(inst, pool, params, Some(constraint), seed, max_retries)
}

/// Calls `f` on each `size`-subset of `0..n` in lexicographic order until it
/// returns `true`.
fn for_each_combination<F: FnMut(&[usize]) -> bool>(n: usize, size: usize, mut f: F) -> bool {
    if size > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut pos = size;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            if idx[pos] < n - size + pos {
                break;
            }
            if pos == 0 {
                return false;
            }
        }
        idx[pos] += 1;
        for k in pos + 1..size {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

/// First `size`-subset in lexicographic order that certifies.
pub fn find_t_deterministic(inst: &IsingInstance, params: &TParams, size: usize) -> Result<TSetCertificate> {
    let n = inst.n();
    if n > MAX_DETERMINISTIC_N {
        return Err(Error::limit(format!(
            "subset iteration is limited to {MAX_DETERMINISTIC_N} variables"
        )));
    }
    params.thresholds(inst)?;
    let mut found = None;
    if size > 0 {
        let mut err = None;
        for_each_combination(n, size, |t| match check_t(inst, t, params, None) {
            Ok(c) if c.success => {
                found = Some(c);
                true
            }
            Ok(_) => false,
            Err(e) => {
                err = Some(e);
                true
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    let mut cert = match found {
        Some(c) => c,
        None => {
            let mut c = check_t(inst, &[], params, None)?;
            c.success = false;
            c
        }
    };
    cert.method = TMethod::Deterministic;
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSets {
    pub t1: Vec<usize>,
    pub t2: Vec<usize>,
    pub target: usize,
    pub success: bool,
    pub deterministic: bool,
}

/// Target size `floor(alpha * N * ln(d) / d)` for average degree `d`.
pub fn t1t2_target(graph: &DegreeGraph, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} outside (0, 1)")));
    }
    let d = graph.average_degree();
    if d < 2.0 {
        return Err(Error::Precondition(format!("average degree {d} below 2")));
    }
    let target = (alpha * graph.n() as f64 * d.ln() / d).floor() as usize;
    if target == 0 {
        return Err(Error::Precondition("target size rounds to zero".into()));
    }
    Ok(target)
}

/// Two disjoint sets of the size given by [`t1t2_target`] with no edge
/// between them.
pub fn find_t1t2(graph: &DegreeGraph, alpha: f64, seed: u64, retries: usize) -> Result<SplitSets> {
    let target = t1t2_target(graph, alpha)?;
    Ok(find_t1t2_with_target(graph, target, seed, retries))
}

fn free_of(graph: &DegreeGraph, t1: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; graph.n()];
    for &u in t1 {
        blocked[u] = true;
        for &v in graph.neighbors(u) {
            blocked[v] = true;
        }
    }
    (0..graph.n()).filter(|&v| !blocked[v]).collect()
}

/// Exhaustive lexicographic search for graphs of at most
/// [`MAX_DETERMINISTIC_N`] vertices, randomized sampling otherwise.
pub fn find_t1t2_with_target(graph: &DegreeGraph, target: usize, seed: u64, retries: usize) -> SplitSets {
    let n = graph.n();
    let fail = |deterministic| SplitSets {
        t1: Vec::new(),
        t2: Vec::new(),
        target,
        success: false,
        deterministic,
    };
    if target == 0 || 2 * target > n {
        return fail(n <= MAX_DETERMINISTIC_N);
    }
    if n <= MAX_DETERMINISTIC_N {
        let mut out = None;
        for_each_combination(n, target, |t1| {
            let free = free_of(graph, t1);
            if free.len() >= target {
                out = Some((t1.to_vec(), free[..target].to_vec()));
                true
            } else {
                false
            }
        });
        return match out {
            Some((t1, t2)) => SplitSets {
                t1,
                t2,
                target,
                success: true,
                deterministic: true,
            },
            None => fail(true),
        };
    }
    let mut rng = seeded(seed);
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..=retries {
        let mut t1: Vec<usize> = all.choose_multiple(&mut rng, target).copied().collect();
        t1.sort_unstable();
        let mut free = free_of(graph, &t1);
        if free.len() >= target {
            free.shuffle(&mut rng);
            let mut t2 = free[..target].to_vec();
            t2.sort_unstable();
            return SplitSets {
                t1,
                t2,
                target,
                success: true,
                deterministic: false,
            };
        }
    }
    fail(false)
}

/// Result of the non-sparse good-set construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSet {
    pub t: Vec<usize>,
    pub t0: Vec<usize>,
    pub epsilon: f64,
    /// `floor(1 / eps)`; a member needs at least half this many qualifying
    /// outside variables.
    pub inverse_floor: usize,
    pub attempts: usize,
    pub success: bool,
}

/// `log2(N) / N`, clamped into `(0, 1)`.
pub fn default_nonsparse_epsilon(n: usize) -> f64 {
    if n < 2 {
        0.5
    } else {
        ((n as f64).log2() / n as f64).min(0.5)
    }
}

/// Number of `j` outside `t0` with `|J_ij| >= max_{k in t0} |J_ik|`. The
/// zero diagonal is part of the maximum, so uncoupled `j` qualify when `i`
/// has no coupling into `t0`.
pub fn max_tier_outside(inst: &IsingInstance, in_t0: &[bool], i: usize) -> usize {
    let max_in = inst
        .neighbors(i)
        .iter()
        .filter(|&&(j, _)| in_t0[j])
        .map(|&(_, w)| w.abs())
        .max()
        .unwrap_or(0);
    if max_in == 0 {
        return (0..inst.n()).filter(|&j| !in_t0[j]).count();
    }
    inst.neighbors(i)
        .iter()
        .filter(|&&(j, w)| !in_t0[j] && w.abs() >= max_in)
        .count()
}

/// Samples `T0` of size `floor(eps N)` uniformly, keeps members with at
/// least `floor(1/eps) / 2` max-tier outside variables, and retries until
/// at least half of `T0` is kept.
pub fn good_set_nonsparse(inst: &IsingInstance, epsilon: f64, seed: u64, retries: usize) -> Result<GoodSet> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let n = inst.n();
    let size = (epsilon * n as f64).floor() as usize;
    if size == 0 {
        return Err(Error::invalid(format!(
            "floor(eps * N) is zero for eps = {epsilon}, N = {n}"
        )));
    }
    let inverse_floor = (1.0 / epsilon).floor() as usize;
    let all: Vec<usize> = (0..n).collect();
    let mut best: Option<GoodSet> = None;
    for attempt in 0..=retries {
        let mut rng = seeded_stream(seed, attempt as u64);
        let mut t0: Vec<usize> = all.choose_multiple(&mut rng, size).copied().collect();
        t0.sort_unstable();
        let in_t0 = membership(n, &t0, "T0")?;
        let t: Vec<usize> = t0
            .iter()
            .copied()
            .filter(|&i| 2 * max_tier_outside(inst, &in_t0, i) >= inverse_floor)
            .collect();
        let success = 2 * t.len() >= size;
        let g = GoodSet {
            t,
            t0,
            epsilon,
            inverse_floor,
            attempts: attempt + 1,
            success,
        };
        if success {
            return Ok(g);
        }
        if best.as_ref().is_none_or(|b| g.t.len() > b.t.len()) {
            best = Some(g);
        }
    }
    let mut best = best.expect("at least one attempt");
    best.attempts = retries + 1;
    Ok(best)
}
