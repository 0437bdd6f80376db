//! Weighted 2-CNF in DIMACS WCNF form and its exact reduction to an Ising
//! instance.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::ising::{Assignment, IsingBuilder, IsingInstance};

/// A clause of one or two literals. Literal `+v` is variable `v - 1` true,
/// `-v` its negation (DIMACS numbering).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub lits: Vec<i64>,
    pub weight: i64,
}

impl Clause {
    pub fn is_satisfied(&self, a: &Assignment) -> bool {
        self.lits
            .iter()
            .any(|&l| a.bit(l.unsigned_abs() as usize - 1) == (l > 0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Wcnf {
    pub n: usize,
    pub clauses: Vec<Clause>,
    /// Hard-clause weight from the header, if given. Hard clauses are treated
    /// as ordinary weighted clauses.
    pub top: Option<i64>,
    /// Tautological clauses dropped while parsing.
    pub tautologies_dropped: usize,
}

impl Wcnf {
    pub fn new(n: usize) -> Self {
        Wcnf {
            n,
            ..Default::default()
        }
    }

    /// Adds a clause after normalization; returns `false` when it was a
    /// tautology and got dropped.
    pub fn push(&mut self, lits: &[i64], weight: i64) -> Result<bool> {
        match normalize(lits, weight, self.n) {
            Ok(Some(c)) => {
                self.clauses.push(c);
                Ok(true)
            }
            Ok(None) => {
                self.tautologies_dropped += 1;
                Ok(false)
            }
            Err(msg) => Err(Error::invalid(msg)),
        }
    }

    pub fn total_weight(&self) -> i64 {
        self.clauses.iter().map(|c| c.weight).sum()
    }

    pub fn violated_weight(&self, a: &Assignment) -> i64 {
        self.clauses
            .iter()
            .filter(|c| !c.is_satisfied(a))
            .map(|c| c.weight)
            .sum()
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p wcnf {} {}", self.n, self.clauses.len());
        if let Some(top) = self.top {
            let _ = write!(out, " {top}");
        }
        out.push('\n');
        for c in &self.clauses {
            let _ = write!(out, "{}", c.weight);
            for l in &c.lits {
                let _ = write!(out, " {l}");
            }
            out.push_str(" 0\n");
        }
        out
    }
}

fn normalize(lits: &[i64], weight: i64, n: usize) -> std::result::Result<Option<Clause>, String> {
    if weight <= 0 {
        return Err(format!("nonpositive weight {weight}"));
    }
    if lits.is_empty() || lits.len() > 2 {
        return Err(format!("clause has {} literals (expected 1 or 2)", lits.len()));
    }
    for &l in lits {
        if l == 0 || l.unsigned_abs() as usize > n {
            return Err(format!("literal {l} out of range 1..={n}"));
        }
    }
    let mut lits = lits.to_vec();
    if lits.len() == 2 && lits[0].abs() == lits[1].abs() {
        if lits[0] != lits[1] {
            return Ok(None);
        }
        lits.pop();
    }
    Ok(Some(Clause { lits, weight }))
}

/// Parses DIMACS WCNF (`p wcnf n m [top]`, clause lines `w l1 [l2] 0`).
pub fn parse_wcnf<R: BufRead>(reader: R) -> Result<Wcnf> {
    let mut wcnf: Option<Wcnf> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        if line.starts_with('p') {
            if wcnf.is_some() {
                return Err(perr("duplicate header".into()));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 4 || toks.len() > 5 || toks[0] != "p" || toks[1] != "wcnf" {
                return Err(perr(format!("malformed header {line:?}")));
            }
            let n: usize = toks[2]
                .parse()
                .map_err(|_| perr(format!("bad variable count {:?}", toks[2])))?;
            let _m: usize = toks[3]
                .parse()
                .map_err(|_| perr(format!("bad clause count {:?}", toks[3])))?;
            let top = match toks.get(4) {
                Some(t) => Some(t.parse::<i64>().map_err(|_| perr(format!("bad top weight {t:?}")))?),
                None => None,
            };
            wcnf = Some(Wcnf { top, ..Wcnf::new(n) });
            continue;
        }
        let w = wcnf.as_mut().ok_or_else(|| perr("clause before header".into()))?;
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| perr(format!("bad integer {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let (&last, body) = nums.split_last().ok_or_else(|| perr("empty clause line".into()))?;
        if last != 0 || body.is_empty() {
            return Err(perr("clause must be `weight lits... 0`".into()));
        }
        let (&weight, lits) = body.split_first().expect("nonempty");
        match normalize(lits, weight, w.n) {
            Ok(Some(c)) => w.clauses.push(c),
            Ok(None) => w.tautologies_dropped += 1,
            Err(msg) => return Err(perr(msg)),
        }
    }
    wcnf.ok_or(Error::Parse {
        line: 0,
        msg: "missing `p wcnf` header".into(),
    })
}

pub fn parse_wcnf_str(text: &str) -> Result<Wcnf> {
    parse_wcnf(text.as_bytes())
}

/// Reduces to an instance whose energy is four times the violated weight.
///
/// A clause over literal signs `s_i, s_j` violated with indicator
/// `(1 - s_i S_i)(1 - s_j S_j) / 4` contributes `w` to the offset, `-w s_i`
/// and `-w s_j` to the fields and `w s_i s_j` to the coupling. A unit clause
/// contributes `2w` to the offset and `-2w s_i` to its field.
pub fn wcnf_to_ising(w: &Wcnf) -> Result<IsingInstance> {
    let mut b = IsingBuilder::new(w.n);
    for c in &w.clauses {
        let wt = c.weight;
        let var = |l: i64| l.unsigned_abs() as usize - 1;
        let sign = |l: i64| l.signum();
        match *c.lits.as_slice() {
            [l] => {
                b.add_constant(wt.checked_mul(2).ok_or(Error::Overflow)?);
                b.add_field(var(l), -2 * wt * sign(l));
            }
            [l1, l2] => {
                b.add_constant(wt);
                b.add_field(var(l1), -wt * sign(l1));
                b.add_field(var(l2), -wt * sign(l2));
                b.add_coupling(var(l1), var(l2), wt * sign(l1) * sign(l2));
            }
            _ => return Err(Error::invalid("clause with more than two literals")),
        }
    }
    b.build()
}

/// Satisfied weight of `a` on a reduced instance: `total - E4 / 4`.
pub fn ising_to_maxsat_value(inst: &IsingInstance, a: &Assignment, total_weight: i64) -> Result<i64> {
    let e = inst.energy(a)?;
    if e % 4 != 0 {
        return Err(Error::invalid(format!(
            "energy {e} is not a multiple of 4; instance was not produced by reduction"
        )));
    }
    Ok(total_weight - e / 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_clause() {
        let w = parse_wcnf_str("p wcnf 2 1\n1 1 2 0\n").unwrap();
        assert_eq!(w.n, 2);
        assert_eq!(
            w.clauses,
            vec![Clause {
                lits: vec![1, 2],
                weight: 1
            }]
        );
        assert_eq!(w.top, None);
    }

    #[test]
    fn parses_pair_construction_with_comments_and_top() {
        let w = parse_wcnf_str("c pair\np wcnf 2 2 100\n1 1 2 0\n\n1 -1 -2 0\n").unwrap();
        assert_eq!(w.clauses.len(), 2);
        assert_eq!(w.clauses[1].lits, vec![-1, -2]);
        assert_eq!(w.top, Some(100));
    }

    #[test]
    fn drops_tautologies_and_merges_repeated_literal() {
        let w = parse_wcnf_str("p wcnf 2 3\n1 1 -1 0\n2 2 2 0\n1 -2 0\n").unwrap();
        assert_eq!(w.tautologies_dropped, 1);
        assert_eq!(w.clauses[0].lits, vec![2]);
        assert_eq!(w.clauses[1].lits, vec![-2]);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "p cnf 2 1\n1 2 0\n",
            "p wcnf x 1\n",
            "1 1 2 0\n",
            "p wcnf 3 1\n1 1 2 3 0\n",
            "p wcnf 2 1\n1 3 0\n",
            "p wcnf 2 1\n0 1 0\n",
            "p wcnf 2 1\n-1 1 0\n",
            "p wcnf 2 1\n1 1 2\n",
            "",
        ] {
            assert!(parse_wcnf_str(bad).is_err(), "{bad:?} should fail");
        }
        match parse_wcnf_str("p wcnf 3 1\n1 1 2 3 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn positive_clause_reduction() {
        let mut w = Wcnf::new(2);
        w.push(&[1, 2], 1).unwrap();
        let inst = wcnf_to_ising(&w).unwrap();
        assert_eq!(inst.h(), &[-1, -1]);
        assert_eq!(inst.coupling(0, 1), 1);
        assert_eq!(inst.c0(), 1);
        assert_eq!(inst.energy(&"--".parse().unwrap()).unwrap(), 4);
        assert_eq!(inst.energy(&"++".parse().unwrap()).unwrap(), 0);
    }

    #[test]
    fn negated_literal_flips_field_sign() {
        let mut w = Wcnf::new(2);
        w.push(&[-1, 2], 1).unwrap();
        let inst = wcnf_to_ising(&w).unwrap();
        assert_eq!(inst.h(), &[1, -1]);
        assert_eq!(inst.coupling(0, 1), -1);
        assert_eq!(inst.c0(), 1);
    }

    #[test]
    fn maxsat_value_round_trip() {
        let mut w = Wcnf::new(2);
        w.push(&[1, 2], 1).unwrap();
        let inst = wcnf_to_ising(&w).unwrap();
        assert_eq!(ising_to_maxsat_value(&inst, &"--".parse().unwrap(), 1).unwrap(), 0);

        let mut unit = Wcnf::new(1);
        unit.push(&[1], 3).unwrap();
        let inst = wcnf_to_ising(&unit).unwrap();
        assert_eq!(ising_to_maxsat_value(&inst, &"+".parse().unwrap(), 3).unwrap(), 3);

        let odd = IsingInstance::new(vec![1], &[], 0).unwrap();
        assert!(ising_to_maxsat_value(&odd, &"+".parse().unwrap(), 1).is_err());
    }

    #[test]
    fn dimacs_writer_round_trips() {
        let w = parse_wcnf_str("p wcnf 3 2 9\n2 1 -3 0\n5 2 0\n").unwrap();
        assert_eq!(parse_wcnf_str(&w.to_dimacs()).unwrap(), w);
    }
}
