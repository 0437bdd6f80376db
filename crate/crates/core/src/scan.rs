//! Incremental spin state and Gray-code enumeration.
//!
//! A [`SpinState`] keeps every local field and the total energy current under
//! single flips in O(degree). Exhaustive scans walk a reflected Gray code so
//! consecutive assignments differ in one spin. Large scans are cut into a
//! fixed number of blocks by pinning the highest-listed variables; the block
//! count never depends on the worker count, so merged results are identical
//! for any degree of parallelism.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ising::{bit_mask, Assignment, IsingInstance};

/// Largest number of variables any exhaustive walk may cover.
pub const MAX_ENUM_BITS: usize = 40;

/// Variables pinned per block when a scan is partitioned.
const PREFIX_BITS: usize = 6;
/// Scans shorter than this are never partitioned.
const PARTITION_MIN_BITS: usize = 14;

#[derive(Clone)]
pub struct SpinState<'a> {
    inst: &'a IsingInstance,
    spins: Vec<i8>,
    fields: Vec<i64>,
    energy: i64,
    words: Vec<u64>,
}

impl<'a> SpinState<'a> {
    pub fn new(inst: &'a IsingInstance, a: &Assignment) -> Self {
        assert_eq!(a.len(), inst.n());
        let spins = a.spins();
        let fields = (0..inst.n()).map(|i| inst.local_field_unchecked(a, i)).collect();
        let energy = inst.energy(a).expect("length checked");
        SpinState {
            inst,
            spins,
            fields,
            energy,
            words: a.words().to_vec(),
        }
    }

    pub fn down(inst: &'a IsingInstance) -> Self {
        Self::new(inst, &Assignment::all_down(inst.n()))
    }

    pub fn instance(&self) -> &'a IsingInstance {
        self.inst
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    #[inline]
    pub fn energy(&self) -> i64 {
        self.energy
    }

    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        self.spins[i]
    }

    #[inline]
    pub fn field(&self, i: usize) -> i64 {
        self.fields[i]
    }

    #[inline]
    pub fn delta(&self, i: usize) -> i64 {
        -2 * self.spins[i] as i64 * self.fields[i]
    }

    /// Packed bits in [`Assignment`] layout; slice order is lexicographic order.
    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let s = self.spins[i] as i64;
        self.energy -= 2 * s * self.fields[i];
        for &(j, w) in self.inst.neighbors(i) {
            self.fields[j] -= 2 * w * s;
        }
        self.spins[i] = -self.spins[i];
        let (w, m) = bit_mask(i);
        self.words[w] ^= m;
    }

    #[inline]
    pub fn set(&mut self, i: usize, up: bool) {
        if (self.spins[i] > 0) != up {
            self.flip(i);
        }
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::from_words(self.spins.len(), self.words.clone())
    }

    pub fn is_local_minimum(&self) -> bool {
        self.spins.iter().zip(&self.fields).all(|(&s, &l)| (s as i64) * l < 0)
    }
}

/// Visits all `2^vars.len()` settings of `vars`, starting from the current
/// state, flipping one variable between consecutive visits.
pub fn gray_walk<F>(state: &mut SpinState<'_>, vars: &[usize], mut visit: F)
where
    F: FnMut(&mut SpinState<'_>),
{
    visit(state);
    let total: u64 = 1u64 << vars.len();
    for step in 1..total {
        state.flip(vars[step.trailing_zeros() as usize]);
        visit(state);
    }
}

pub fn check_enum_bits(bits: usize, what: &str) -> Result<()> {
    if bits > MAX_ENUM_BITS {
        return Err(Error::limit(format!(
            "{what} needs 2^{bits} steps (limit 2^{MAX_ENUM_BITS})"
        )));
    }
    Ok(())
}

/// Runs `f(block)` for every block index, in parallel when `workers > 1`,
/// returning results in block order.
pub fn map_blocks<T, F>(blocks: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 || blocks <= 1 {
        return (0..blocks).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..blocks).into_par_iter().map(&f).collect()),
        Err(_) => (0..blocks).map(f).collect(),
    }
}

/// Splits a walk over `vars` into blocks by pinning its last variables.
///
/// For each block, `f` receives a state equal to `base` with the pinned
/// variables set from the block index, plus the variables left to walk.
pub fn partitioned_walk<T, F>(inst: &IsingInstance, base: &Assignment, vars: &[usize], workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SpinState<'_>, &[usize]) -> T + Sync + Send,
{
    let pinned = if vars.len() >= PARTITION_MIN_BITS {
        PREFIX_BITS
    } else {
        0
    };
    let (walk, prefix) = vars.split_at(vars.len() - pinned);
    map_blocks(1usize << pinned, workers, |block| {
        let mut a = base.clone();
        for (k, &v) in prefix.iter().enumerate() {
            a.set_bit(v, (block >> k) & 1 == 1);
        }
        let mut state = SpinState::new(inst, &a);
        f(&mut state, walk)
    })
}

/// Calls `visit` on every assignment of the instance, block by block; the
/// per-block accumulators are returned in block order for merging.
pub fn scan_all<T, I, V>(inst: &IsingInstance, workers: usize, init: I, visit: V) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, &mut SpinState<'_>) + Sync + Send,
{
    check_enum_bits(inst.n(), "exhaustive scan")?;
    let vars: Vec<usize> = (0..inst.n()).collect();
    let base = Assignment::all_down(inst.n());
    Ok(partitioned_walk(inst, &base, &vars, workers, |state, walk| {
        let mut acc = init();
        gray_walk(state, walk, |s| visit(&mut acc, s));
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn sample() -> IsingInstance {
        IsingInstance::new(
            vec![1, -2, 0, 3, -1],
            &[(0, 1, 2), (1, 2, -3), (2, 3, 1), (0, 4, 5), (3, 4, -2)],
            4,
        )
        .unwrap()
    }

    #[test]
    fn flip_keeps_fields_and_energy_exact() {
        let inst = sample();
        let mut st = SpinState::down(&inst);
        for &i in &[0, 3, 3, 4, 1, 2, 0] {
            st.flip(i);
            let a = st.assignment();
            assert_eq!(st.energy(), inst.energy(&a).unwrap());
            for v in 0..inst.n() {
                assert_eq!(st.field(v), inst.local_field(&a, v).unwrap());
            }
        }
    }

    #[test]
    fn gray_walk_visits_every_assignment_once() {
        let inst = sample();
        let mut st = SpinState::down(&inst);
        let mut seen = HashSet::new();
        gray_walk(&mut st, &[0, 2, 4], |s| {
            assert!(seen.insert(s.assignment()));
        });
        assert_eq!(seen.len(), 8);
        assert!(seen.iter().all(|a| !a.bit(1) && !a.bit(3)));
    }

    #[test]
    fn partitioned_scan_covers_space_for_any_worker_count() {
        let inst = IsingInstance::zero(15);
        let count = |workers| {
            scan_all(&inst, workers, || 0u64, |c, _| *c += 1)
                .unwrap()
                .into_iter()
                .sum::<u64>()
        };
        assert_eq!(count(1), 1 << 15);
        assert_eq!(count(3), 1 << 15);
    }

    #[test]
    fn oversized_scan_is_refused() {
        let inst = IsingInstance::zero(MAX_ENUM_BITS + 1);
        assert!(matches!(
            scan_all(&inst, 1, || (), |_, _| ()),
            Err(Error::ResourceLimit(_))
        ));
    }
}
