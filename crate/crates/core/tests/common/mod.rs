//! Independent brute-force oracles: direct evaluation from definitions, no
//! incremental state.

#![allow(dead_code)]

use m2s_core::{Assignment, IsingInstance, Wcnf};

pub fn all_assignments(n: usize) -> impl Iterator<Item = Assignment> {
    (0..1u64 << n).map(move |m| Assignment::from_mask(n, m))
}

/// Energy straight from the definition.
pub fn energy(inst: &IsingInstance, a: &Assignment) -> i64 {
    let mut e = inst.c0();
    for i in 0..inst.n() {
        e += inst.field(i) * a.spin(i) as i64;
        for j in i + 1..inst.n() {
            e += inst.coupling(i, j) * (a.spin(i) as i64) * (a.spin(j) as i64);
        }
    }
    e
}

/// Lowest energy, then lexicographically smallest assignment.
pub fn ground_state(inst: &IsingInstance) -> (i64, Assignment) {
    let mut best: Option<(i64, Assignment)> = None;
    for a in all_assignments(inst.n()) {
        let e = energy(inst, &a);
        if best.as_ref().is_none_or(|(be, ba)| e < *be || (e == *be && a < *ba)) {
            best = Some((e, a));
        }
    }
    best.expect("at least one assignment")
}

pub fn violated_weight(w: &Wcnf, a: &Assignment) -> i64 {
    w.clauses
        .iter()
        .filter(|c| {
            !c.lits.iter().any(|&l| {
                let v = l.unsigned_abs() as usize - 1;
                a.bit(v) == (l > 0)
            })
        })
        .map(|c| c.weight)
        .sum()
}

/// Strict k-minimum by comparing against every assignment in the radius.
pub fn is_strict_k_min(inst: &IsingInstance, a: &Assignment, k: usize) -> bool {
    let e = energy(inst, a);
    all_assignments(inst.n()).all(|b| {
        let d = a.hamming(&b);
        d == 0 || d > k || energy(inst, &b) > e
    })
}

pub fn local_minima(inst: &IsingInstance) -> Vec<Assignment> {
    all_assignments(inst.n())
        .filter(|a| is_strict_k_min(inst, a, 1))
        .collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
