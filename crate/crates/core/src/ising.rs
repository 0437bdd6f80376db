//! Integer Ising instances, spin assignments and the interaction graph.
//!
//! Energies are kept in "E4 units": four times the Hamiltonian written with
//! quarter-integer coefficients, so that every comparison is exact. For an
//! instance produced from a weighted 2-CNF the energy of an assignment is
//! four times the weight of the clauses it violates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin vector stored as packed bits, `bit(i) == true` meaning `S_i = +1`.
///
/// Bits are packed most-significant first so that the derived ordering of the
/// word vector is the lexicographic order of `(b_0, b_1, ..., b_{n-1})` with
/// `false < true`. Every solver uses this order to break energy ties.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn bit_mask(i: usize) -> (usize, u64) {
    (i / 64, 1u64 << (63 - (i % 64)))
}

impl Assignment {
    /// All spins down (`S_i = -1`), the lexicographically smallest assignment.
    pub fn all_down(n: usize) -> Self {
        Assignment {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn all_up(n: usize) -> Self {
        let mut a = Self::all_down(n);
        for i in 0..n {
            a.set_bit(i, true);
        }
        a
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut a = Self::all_down(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            a.set_bit(i, b);
        }
        a
    }

    /// Builds from a slice of `+1`/`-1` spins; any positive value counts as up.
    pub fn from_spins(spins: &[i8]) -> Self {
        let mut a = Self::all_down(spins.len());
        for (i, &s) in spins.iter().enumerate() {
            a.set_bit(i, s > 0);
        }
        a
    }

    /// Decodes the low `n` bits of `mask`, bit `i` of the mask being variable `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "from_mask supports at most 64 variables");
        let mut a = Self::all_down(n);
        for i in 0..n {
            a.set_bit(i, (mask >> i) & 1 == 1);
        }
        a
    }

    /// Inverse of [`Assignment::from_mask`].
    pub fn to_mask(&self) -> u64 {
        assert!(self.n <= 64, "to_mask supports at most 64 variables");
        (0..self.n).fold(0u64, |m, i| m | ((self.bit(i) as u64) << i))
    }

    pub(crate) fn from_words(n: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), n.div_ceil(64));
        Assignment { n, words }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        let (w, m) = bit_mask(i);
        self.words[w] & m != 0
    }

    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        if self.bit(i) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set_bit(&mut self, i: usize, value: bool) {
        let (w, m) = bit_mask(i);
        if value {
            self.words[w] |= m;
        } else {
            self.words[w] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let (w, m) = bit_mask(i);
        self.words[w] ^= m;
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut a = self.clone();
        a.flip(i);
        a
    }

    pub fn spins(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.spin(i)).collect()
    }

    /// Number of up spins.
    pub fn count_up(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming(&self, other: &Assignment) -> usize {
        assert_eq!(self.n, other.n, "hamming distance of unequal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Renders as `+`/`-` characters, e.g. `++--`.
    pub fn to_sign_string(&self) -> String {
        (0..self.n).map(|i| if self.bit(i) { '+' } else { '-' }).collect()
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| self.words.cmp(&other.words))
    }
}

/// Bit string, `1` for an up spin.
impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment({})", self.to_sign_string())
    }
}

/// Accepts either a bit string (`0101`) or a sign string (`-+-+`).
impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '1' | '+' => Ok(true),
                '0' | '-' => Ok(false),
                other => Err(Error::invalid(format!("unexpected character {other:?} in assignment"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Assignment::from_bits(&bits))
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Weighted Ising instance `c0 + sum_i h_i S_i + sum_{i<j} J_ij S_i S_j`.
///
/// Couplings are stored once per unordered pair, never on the diagonal, and
/// never with weight zero. Adjacency lists mirror the coupling map for
/// O(degree) field updates.
#[derive(Clone, PartialEq, Eq)]
pub struct IsingInstance {
    n: usize,
    h: Vec<i64>,
    couplings: BTreeMap<(usize, usize), i64>,
    adj: Vec<Vec<(usize, i64)>>,
    c0: i64,
}

impl fmt::Debug for IsingInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsingInstance")
            .field("n", &self.n)
            .field("c0", &self.c0)
            .field("h", &self.h)
            .field("couplings", &self.couplings.len())
            .finish()
    }
}

impl IsingInstance {
    /// Builds an instance from fields, an edge list and an offset.
    ///
    /// Rejects diagonal or out-of-range pairs, duplicated pairs and weights
    /// whose magnitude sum (with flip deltas) would leave the `i64` range.
    /// Pairs may be given in either orientation; zero couplings are dropped.
    pub fn new(h: Vec<i64>, couplings: &[(usize, usize, i64)], c0: i64) -> Result<Self> {
        let n = h.len();
        let mut map = BTreeMap::new();
        for &(i, j, w) in couplings {
            let key = ordered_pair(i, j, n)?;
            if map.insert(key, w).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "duplicate coupling ({}, {})",
                    key.0, key.1
                )));
            }
        }
        Self::from_map(h, map, c0)
    }

    fn from_map(h: Vec<i64>, mut couplings: BTreeMap<(usize, usize), i64>, c0: i64) -> Result<Self> {
        let n = h.len();
        couplings.retain(|_, w| *w != 0);
        // Flip deltas are 2 * local field, so the whole magnitude budget is doubled.
        let mut budget: i128 = (c0 as i128).abs();
        for &x in &h {
            budget += 2 * (x as i128).abs();
        }
        for &w in couplings.values() {
            budget += 4 * (w as i128).abs();
        }
        if budget > i64::MAX as i128 {
            return Err(Error::Overflow);
        }
        let mut adj = vec![Vec::new(); n];
        for (&(i, j), &w) in &couplings {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(IsingInstance {
            n,
            h,
            couplings,
            adj,
            c0,
        })
    }

    /// Instance with no fields, couplings or offset.
    pub fn zero(n: usize) -> Self {
        Self::from_map(vec![0; n], BTreeMap::new(), 0).expect("zero instance is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c0(&self) -> i64 {
        self.c0
    }

    pub fn h(&self) -> &[i64] {
        &self.h
    }

    pub fn field(&self, i: usize) -> i64 {
        self.h[i]
    }

    /// `J_ij` for any orientation; zero when absent or on the diagonal.
    pub fn coupling(&self, i: usize, j: usize) -> i64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.couplings.get(&key).copied().unwrap_or(0)
    }

    /// Nonzero couplings as `(i, j, J_ij)` with `i < j`, in ascending order.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.couplings.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn coupling_count(&self) -> usize {
        self.couplings.len()
    }

    /// Neighbors of `i` with their coupling weights, ascending by index.
    pub fn neighbors(&self, i: usize) -> &[(usize, i64)] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    /// `sum_j |J_ij|`.
    pub fn abs_row_sum(&self, i: usize) -> i64 {
        self.adj[i].iter().map(|&(_, w)| w.abs()).sum()
    }

    fn check_len(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: a.len(),
            });
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(())
    }

    /// Exact energy in E4 units.
    pub fn energy(&self, a: &Assignment) -> Result<i64> {
        self.check_len(a)?;
        let mut e = self.c0;
        for (i, &hi) in self.h.iter().enumerate() {
            e += hi * a.spin(i) as i64;
        }
        for (&(i, j), &w) in &self.couplings {
            e += w * (a.spin(i) as i64) * (a.spin(j) as i64);
        }
        Ok(e)
    }

    /// `L_i = h_i + sum_{j != i} J_ij S_j`.
    pub fn local_field(&self, a: &Assignment, i: usize) -> Result<i64> {
        self.check_len(a)?;
        self.check_index(i)?;
        Ok(self.local_field_unchecked(a, i))
    }

    pub(crate) fn local_field_unchecked(&self, a: &Assignment, i: usize) -> i64 {
        self.h[i] + self.adj[i].iter().map(|&(j, w)| w * a.spin(j) as i64).sum::<i64>()
    }

    /// Energy change caused by flipping spin `i`: `-2 S_i L_i`.
    pub fn flip_delta(&self, a: &Assignment, i: usize) -> Result<i64> {
        let l = self.local_field(a, i)?;
        Ok(-2 * a.spin(i) as i64 * l)
    }

    /// Strict local minimum: every single flip raises the energy.
    pub fn is_local_minimum(&self, a: &Assignment) -> Result<bool> {
        self.check_len(a)?;
        Ok((0..self.n).all(|i| (a.spin(i) as i64) * self.local_field_unchecked(a, i) < 0))
    }

    pub fn degree_graph(&self) -> DegreeGraph {
        DegreeGraph::new(
            self.adj
                .iter()
                .map(|list| list.iter().map(|&(j, _)| j).collect())
                .collect(),
        )
    }

    /// Instance on `vars` obtained by fixing every other variable to its
    /// value in `a`. Variable `vars[k]` becomes variable `k`.
    pub fn restrict(&self, vars: &[usize], a: &Assignment) -> Result<IsingInstance> {
        self.check_len(a)?;
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in vars.iter().enumerate() {
            self.check_index(v)?;
            if pos[v] != usize::MAX {
                return Err(Error::invalid(format!("variable {v} listed twice")));
            }
            pos[v] = k;
        }
        let mut c0 = self.c0;
        let mut h: Vec<i64> = vars.iter().map(|&v| self.h[v]).collect();
        for (i, &hi) in self.h.iter().enumerate() {
            if pos[i] == usize::MAX {
                c0 += hi * a.spin(i) as i64;
            }
        }
        let mut map = BTreeMap::new();
        for (&(i, j), &w) in &self.couplings {
            match (pos[i] != usize::MAX, pos[j] != usize::MAX) {
                (true, true) => {
                    let (p, q) = (pos[i].min(pos[j]), pos[i].max(pos[j]));
                    map.insert((p, q), w);
                }
                (true, false) => h[pos[i]] += w * a.spin(j) as i64,
                (false, true) => h[pos[j]] += w * a.spin(i) as i64,
                (false, false) => c0 += w * (a.spin(i) as i64) * (a.spin(j) as i64),
            }
        }
        Self::from_map(h, map, c0)
    }

    pub fn to_json(&self) -> InstanceJson {
        InstanceJson {
            n: self.n,
            c0: self.c0,
            h: self.h.clone(),
            j: self.couplings().map(|(i, j, w)| [i as i64, j as i64, w]).collect(),
        }
    }

    pub fn from_json(doc: &InstanceJson) -> Result<Self> {
        if doc.h.len() != doc.n {
            return Err(Error::InvalidInstance(format!(
                "h has {} entries but n = {}",
                doc.h.len(),
                doc.n
            )));
        }
        let mut couplings = Vec::with_capacity(doc.j.len());
        for &[i, j, w] in &doc.j {
            if i < 0 || j < 0 {
                return Err(Error::InvalidInstance(format!("negative index in ({i}, {j})")));
            }
            if i >= j {
                return Err(Error::InvalidInstance(format!(
                    "coupling ({i}, {j}) must satisfy i < j"
                )));
            }
            couplings.push((i as usize, j as usize, w));
        }
        Self::new(doc.h.clone(), &couplings, doc.c0)
    }
}

fn ordered_pair(i: usize, j: usize, n: usize) -> Result<(usize, usize)> {
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { index: i.max(j), n });
    }
    if i == j {
        return Err(Error::InvalidInstance(format!("diagonal coupling ({i}, {i})")));
    }
    Ok(if i < j { (i, j) } else { (j, i) })
}

/// Accumulating builder; repeated couplings on the same pair add up.
#[derive(Debug, Clone, Default)]
pub struct IsingBuilder {
    h: Vec<i64>,
    couplings: BTreeMap<(usize, usize), i64>,
    c0: i64,
    overflow: bool,
}

impl IsingBuilder {
    pub fn new(n: usize) -> Self {
        IsingBuilder {
            h: vec![0; n],
            ..Default::default()
        }
    }

    pub fn add_field(&mut self, i: usize, w: i64) -> &mut Self {
        match self.h[i].checked_add(w) {
            Some(v) => self.h[i] = v,
            None => self.overflow = true,
        }
        self
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, w: i64) -> &mut Self {
        assert_ne!(i, j, "diagonal coupling");
        let key = if i < j { (i, j) } else { (j, i) };
        let slot = self.couplings.entry(key).or_insert(0);
        match slot.checked_add(w) {
            Some(v) => *slot = v,
            None => self.overflow = true,
        }
        self
    }

    pub fn add_constant(&mut self, w: i64) -> &mut Self {
        match self.c0.checked_add(w) {
            Some(v) => self.c0 = v,
            None => self.overflow = true,
        }
        self
    }

    pub fn build(self) -> Result<IsingInstance> {
        if self.overflow {
            return Err(Error::Overflow);
        }
        let n = self.h.len();
        if let Some(&(_, j)) = self.couplings.keys().find(|&&(_, j)| j >= n) {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        IsingInstance::from_map(self.h, self.couplings, self.c0)
    }
}

/// Wire form: `{ "n": int, "c0": int, "h": [int], "J": [[i, j, w]] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub c0: i64,
    pub h: Vec<i64>,
    #[serde(rename = "J")]
    pub j: Vec<[i64; 3]>,
}

/// Interaction graph: an edge for every nonzero coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeGraph {
    adj: Vec<Vec<usize>>,
}

impl DegreeGraph {
    /// Builds from adjacency lists, symmetrizing and deduplicating them.
    pub fn new(mut adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        let mut extra = Vec::new();
        for (i, list) in adj.iter().enumerate() {
            for &j in list {
                assert!(j < n && j != i, "invalid edge ({i}, {j})");
                extra.push((j, i));
            }
        }
        for (j, i) in extra {
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        DegreeGraph { adj }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in edges {
            adj[i].push(j);
        }
        Self::new(adj)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.adj.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.adj.len() as f64
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }
}
