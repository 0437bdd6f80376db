//! Instance families: the all-pairs construction with `C(N, N/2)` local
//! minima, its block-diagonal copies, the hypercube column construction, and
//! seeded random instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{Assignment, IsingBuilder, IsingInstance};
use crate::rng::seeded;
use crate::scan::{scan_all, MAX_ENUM_BITS};

/// Largest `l^f` accepted by [`gen_column`].
pub const MAX_COLUMN_VARS: usize = 1 << 20;
/// Largest `l^f` accepted by [`zero_energy_assignments`].
pub const MAX_ZERO_ENUM_VARS: usize = 24;

fn check_even(n: usize, what: &str) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("{what} must be even and at least 2, got {n}")));
    }
    Ok(())
}

fn add_all_pairs(b: &mut IsingBuilder, offset: usize, size: usize) {
    for i in 0..size {
        for j in i + 1..size {
            b.add_coupling(offset + i, offset + j, 2);
            b.add_constant(2);
        }
    }
}

/// Clauses `x_i or x_j` and `not x_i or not x_j` on every pair, reduced:
/// `J_ij = 2`, `h = 0`, `c0 = 2 C(N, 2)`. Local minima are exactly the
/// balanced assignments.
pub fn gen_csse(n: usize) -> Result<IsingInstance> {
    check_even(n, "N")?;
    let mut b = IsingBuilder::new(n);
    add_all_pairs(&mut b, 0, n);
    b.build()
}

/// `copies` decoupled copies of [`gen_csse`]`(block)`, variables laid out
/// block after block.
pub fn gen_multicopy(copies: usize, block: usize) -> Result<IsingInstance> {
    check_even(block, "block")?;
    if copies == 0 {
        return Err(Error::invalid("copies must be at least 1"));
    }
    let n = copies
        .checked_mul(block)
        .ok_or_else(|| Error::invalid("instance too large"))?;
    let mut b = IsingBuilder::new(n);
    for c in 0..copies {
        add_all_pairs(&mut b, c * block, block);
    }
    b.build()
}

/// How the column targets `M_C` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnTargets {
    Zeros,
    /// Column sums of a uniformly random assignment drawn from the seed.
    Sampled(u64),
}

/// Hypercube column instance on `[0, l)^f`.
#[derive(Debug, Clone)]
pub struct ColumnInstance {
    pub f: usize,
    pub l: usize,
    /// `M_C` per column, aligned with `columns`.
    pub targets: Vec<i64>,
    pub columns: Vec<Vec<usize>>,
    pub inst: IsingInstance,
    pub seed: Option<u64>,
    /// The assignment whose column sums define `targets` in sampled mode.
    pub planted: Option<Assignment>,
}

impl ColumnInstance {
    pub fn n(&self) -> usize {
        self.inst.n()
    }

    /// Whether every column sum matches its target.
    pub fn is_zero_energy(&self, a: &Assignment) -> bool {
        self.columns
            .iter()
            .zip(&self.targets)
            .all(|(col, &m)| col.iter().map(|&v| a.spin(v) as i64).sum::<i64>() == m)
    }
}

/// Variable index of the point `coords` (coordinate `a` has weight `l^a`).
pub fn column_index(coords: &[usize], l: usize) -> usize {
    coords.iter().rev().fold(0, |acc, &x| acc * l + x)
}

/// Columns of `[0, l)^f`: direction-major, then by the remaining coordinates.
pub fn hypercube_columns(f: usize, l: usize) -> Vec<Vec<usize>> {
    let rest = l.pow(f as u32 - 1);
    let mut columns = Vec::with_capacity(f * rest);
    let mut coords = vec![0usize; f];
    for dir in 0..f {
        for r in 0..rest {
            let mut rem = r;
            for (a, c) in coords.iter_mut().enumerate() {
                if a != dir {
                    *c = rem % l;
                    rem /= l;
                }
            }
            columns.push(
                (0..l)
                    .map(|t| {
                        coords[dir] = t;
                        column_index(&coords, l)
                    })
                    .collect(),
            );
        }
    }
    columns
}

/// Expands `4 * sum_C (sum_{i in C} S_i - M_C)^2`: per column every pair
/// gains `J += 8`, every member `h += -8 M_C`, and the offset `4 (l + M_C^2)`.
/// Zero energy is attained exactly when every column meets its target.
pub fn gen_column(f: usize, l: usize, mode: ColumnTargets) -> Result<ColumnInstance> {
    if f == 0 {
        return Err(Error::invalid("f must be at least 1"));
    }
    check_even(l, "l")?;
    let n = (l as u64)
        .checked_pow(f as u32)
        .filter(|&n| n <= MAX_COLUMN_VARS as u64)
        .ok_or_else(|| Error::limit(format!("l^f = {l}^{f} exceeds {MAX_COLUMN_VARS} variables")))?
        as usize;
    let columns = hypercube_columns(f, l);
    let (targets, seed, planted) = match mode {
        ColumnTargets::Zeros => (vec![0; columns.len()], None, None),
        ColumnTargets::Sampled(seed) => {
            let mut rng = seeded(seed);
            let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let planted = Assignment::from_bits(&bits);
            let targets = columns
                .iter()
                .map(|col| col.iter().map(|&v| planted.spin(v) as i64).sum())
                .collect();
            (targets, Some(seed), Some(planted))
        }
    };
    let mut b = IsingBuilder::new(n);
    for (col, &m) in columns.iter().zip(&targets) {
        b.add_constant(4 * (l as i64 + m * m));
        for (x, &i) in col.iter().enumerate() {
            b.add_field(i, -8 * m);
            for &j in &col[x + 1..] {
                b.add_coupling(i, j, 8);
            }
        }
    }
    Ok(ColumnInstance {
        f,
        l,
        targets,
        columns,
        inst: b.build()?,
        seed,
        planted,
    })
}

/// Every assignment meeting all column targets, in lexicographic order.
pub fn zero_energy_assignments(ci: &ColumnInstance, workers: usize) -> Result<Vec<Assignment>> {
    let n = ci.n();
    if n > MAX_ZERO_ENUM_VARS.min(MAX_ENUM_BITS) {
        return Err(Error::limit(format!(
            "{n} variables exceeds the exhaustive limit of {MAX_ZERO_ENUM_VARS}"
        )));
    }
    let blocks = scan_all(&ci.inst, workers, Vec::new, |acc: &mut Vec<Assignment>, s| {
        if s.energy() == 0 {
            acc.push(s.assignment());
        }
    })?;
    let mut all: Vec<Assignment> = blocks.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

/// Parameters for [`gen_random`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    /// Probability that a pair is coupled.
    pub density: f64,
    pub wmin: i64,
    pub wmax: i64,
    pub seed: u64,
}

fn check_weights(wmin: i64, wmax: i64) -> Result<()> {
    if wmin > wmax || (wmin == 0 && wmax == 0) {
        return Err(Error::invalid(format!("empty weight range [{wmin}, {wmax}]")));
    }
    Ok(())
}

fn nonzero_weight<R: Rng>(rng: &mut R, wmin: i64, wmax: i64) -> i64 {
    loop {
        let w = rng.gen_range(wmin..=wmax);
        if w != 0 {
            return w;
        }
    }
}

/// Erdos-Renyi couplings with nonzero weights and fields, both uniform in
/// `[wmin, wmax]` (fields may be zero).
pub fn gen_random(spec: &RandomSpec) -> Result<IsingInstance> {
    check_weights(spec.wmin, spec.wmax)?;
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::invalid(format!("density {} outside [0, 1]", spec.density)));
    }
    let mut rng = seeded(spec.seed);
    let mut b = IsingBuilder::new(spec.n);
    for i in 0..spec.n {
        b.add_field(i, rng.gen_range(spec.wmin..=spec.wmax));
    }
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            if rng.gen_bool(spec.density) {
                b.add_coupling(i, j, nonzero_weight(&mut rng, spec.wmin, spec.wmax));
            }
        }
    }
    b.build()
}

/// Random `d`-regular coupling graph. Stubs are paired one at a time with a
/// uniformly chosen compatible partner (no loops, no repeated edges); a dead
/// end restarts the pairing.
pub fn gen_random_regular(n: usize, d: usize, wmin: i64, wmax: i64, seed: u64) -> Result<IsingInstance> {
    check_weights(wmin, wmax)?;
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::invalid(format!("no {d}-regular graph on {n} vertices")));
    }
    let mut rng = seeded(seed);
    let mut edges = std::collections::BTreeSet::new();
    let mut done = false;
    for _ in 0..1_000 {
        edges.clear();
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut stuck = false;
        while let Some(u) = stubs.pop() {
            let ok: Vec<usize> = (0..stubs.len())
                .filter(|&k| stubs[k] != u && !edges.contains(&(u.min(stubs[k]), u.max(stubs[k]))))
                .collect();
            let Some(&k) = ok.choose(&mut rng) else {
                stuck = true;
                break;
            };
            let v = stubs.swap_remove(k);
            edges.insert((u.min(v), u.max(v)));
        }
        if !stuck {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::limit("could not complete a simple regular pairing"));
    }
    let mut b = IsingBuilder::new(n);
    for i in 0..n {
        b.add_field(i, rng.gen_range(wmin..=wmax));
    }
    for (i, j) in edges {
        b.add_coupling(i, j, nonzero_weight(&mut rng, wmin, wmax));
    }
    b.build()
}
