//! Exact indices of the blocks and the closed-form census of integer powers:
//! `p(m; l)` and the witness sets `𝒫(m; l)` of words `w` with `|w| = m`
//! and `w^l` a factor of the infinite word.
//!
//! Every nonzero witness set is a run `C_0(v), …, C_{c-1}(v)` of conjugates
//! of one block product `v`, so results carry `(v, c)` and expand on demand.
//! Thresholds compare integers only.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::{BlockTable, RationalIndex};
use crate::error::{range, Error, Result};
use crate::word::{conjugate, strip_suffix, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub value: RationalIndex,
    pub witness: Word,
}

fn check_level(n: i64) -> Result<()> {
    if n < 1 {
        return range(format!("block indices need n ≥ 1, got {n}"));
    }
    Ok(())
}

/// Prefix index `1 + d_{n+1} + |D_{n−k}|/|s_n|`, witnessed by `r_{n+1}`.
pub fn prefix_index(table: &BlockTable, n: i64) -> Result<IndexReport> {
    check_level(n)?;
    let d = table.d(n + 1)? as i64;
    let len = table.len_s(n)?;
    let tail = table.length_d(n - table.k() as i64)?;
    let value = RationalIndex::new(1 + d, tail, len)?;
    let witness = table.r(n + 1)?;
    let expected = (d + 1) * len as i64 + tail;
    if witness.len() as i64 != expected {
        return Err(Error::InvariantViolation(format!(
            "|r_{}| = {} but the index predicts {expected}",
            n + 1,
            witness.len()
        )));
    }
    Ok(IndexReport { value, witness })
}

/// Block index `2 + d_{n+1} + |D_{n−k}|/|s_n|`, witnessed by `s_n^{d_{n+1}+2} D_{n−k}`.
pub fn block_index(table: &BlockTable, n: i64) -> Result<IndexReport> {
    check_level(n)?;
    let k = table.k() as i64;
    let d = table.d(n + 1)?;
    let s = table.s(n)?;
    let value = RationalIndex::new(2 + d as i64, table.length_d(n - k)?, s.len() as u64)?;
    let power = s.pow(d + 2);
    let witness = if n >= k {
        power.concat(&*table.big_d(n - k)?)
    } else {
        // D_{n-k} = a_{n+1}^{-1}
        strip_suffix(&power, &Word::letter(Letter::cyclic(n + 1, table.k())))?
    };
    Ok(IndexReport { value, witness })
}

/// `m = |s_n^r s_{n-1}^{d_n} ⋯ s_{n+2-i}^{d_{n+3-i}} s_{n+1-i}|`, or `r|s_n|` when `i = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LengthMember {
    pub m: u64,
    pub i: usize,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthSets {
    pub n: usize,
    /// `sets[i - 1]` is `𝒟_i(n)`, restricted to `[|s_n|, |s_{n+1}|)`.
    pub sets: Vec<Vec<LengthMember>>,
}

impl LengthSets {
    pub fn members(&self) -> impl Iterator<Item = &LengthMember> {
        self.sets.iter().flatten()
    }

    pub fn representations(&self, m: u64) -> Vec<LengthMember> {
        self.members().filter(|x| x.m == m).copied().collect()
    }

    pub fn contains(&self, m: u64) -> bool {
        self.members().any(|x| x.m == m)
    }
}

/// The product `s_n^r s_{n-1}^{d_n} ⋯ s_{n+2-i}^{d_{n+3-i}} s_{n+1-i}` as `(level, exponent)` factors.
fn base_factors(table: &BlockTable, n: usize, i: usize, r: usize) -> Result<Vec<(i64, usize)>> {
    let n = n as i64;
    let mut f = vec![(n, r)];
    if i >= 2 {
        for j in 1..=i as i64 - 2 {
            let e = table.d(n - j + 1)?;
            if e > 0 {
                f.push((n - j, e));
            }
        }
        f.push((n + 1 - i as i64, 1));
    }
    Ok(f)
}

fn factors_len(table: &BlockTable, f: &[(i64, usize)]) -> Result<u64> {
    f.iter()
        .map(|&(level, e)| table.len_s(level).map(|l| l * e as u64))
        .sum()
}

fn factors_word(table: &BlockTable, f: &[(i64, usize)]) -> Result<Word> {
    let mut w = Word::empty();
    for &(level, e) in f {
        w.extend_from(&table.s(level)?.pow(e));
    }
    Ok(w)
}

fn factors_expr(f: &[(i64, usize)]) -> String {
    f.iter()
        .map(|&(level, e)| match e {
            1 => format!("s_{level}"),
            e => format!("s_{level}^{e}"),
        })
        .collect::<Vec<_>>()
        .join("·")
}

/// The `k` length sets of window `n ≥ 1`.
pub fn length_sets(table: &BlockTable, n: i64) -> Result<LengthSets> {
    check_level(n)?;
    let k = table.k();
    let d = table.d(n + 1)?;
    let lo = table.len_s(n)?;
    let hi = table.len_s(n + 1)?;
    let n = n as usize;
    let mut sets = Vec::with_capacity(k);
    for i in 1..=k {
        let r_max = if i == k { d - 1 } else { d };
        let mut set = Vec::new();
        for r in 1..=r_max {
            let m = factors_len(table, &base_factors(table, n, i, r)?)?;
            if (lo..hi).contains(&m) {
                set.push(LengthMember { m, i, r });
            }
        }
        sets.push(set);
    }
    Ok(LengthSets { n, sets })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusCase {
    SmallLength,
    OffGridZero,
    D1Case,
    DiCase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub case: CensusCase,
    /// Window level with `|s_n| ≤ m < |s_{n+1}|`; absent for small lengths.
    pub n: Option<usize>,
    /// Every `(i, r)` representing `m` in the window.
    pub representations: Vec<LengthMember>,
    /// The small-length rule applied beyond `l = 2`.
    pub extension: bool,
    /// A formal form disagreed with the others and was set aside.
    pub formal_overridden: bool,
}

/// The conjugates `C_0(base), …, C_{count-1}(base)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugateRange {
    pub expr: String,
    pub base: Word,
    pub count: usize,
}

impl ConjugateRange {
    pub fn words(&self) -> Result<BTreeSet<Word>> {
        (0..self.count).map(|j| conjugate(&self.base, j)).collect()
    }

    pub fn describe(&self) -> String {
        format!("first {} conjugates of {}", self.count, self.expr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerCensus {
    pub m: u64,
    pub l: usize,
    pub count: usize,
    /// Present iff `count > 0`.
    pub witnesses: Option<ConjugateRange>,
    pub provenance: Provenance,
}

impl PowerCensus {
    pub fn witness_set(&self) -> Result<BTreeSet<Word>> {
        match &self.witnesses {
            Some(range) => range.words(),
            None => Ok(BTreeSet::new()),
        }
    }
}

/// The witnesses one representation of `m` predicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub rep: LengthMember,
    pub witnesses: Option<ConjugateRange>,
    /// The count was `|D_j| + 1` with `j < 0`, so the form yields no witnesses by convention.
    pub formal: bool,
}

fn closed_form(table: &BlockTable, n: usize, rep: LengthMember, l: usize) -> Result<ClosedForm> {
    let factors = base_factors(table, n, rep.i, rep.r)?;
    let n = n as i64;
    let via_d = |j: i64| -> Result<(i64, bool)> { Ok((table.length_d(j)? + 1, j < 0)) };
    let (count, formal) = if rep.i == 1 {
        let d = table.d(n + 1)?;
        match (rep.r * l).cmp(&(d + 2)) {
            std::cmp::Ordering::Less => (table.len_s(n)? as i64, false),
            std::cmp::Ordering::Equal => via_d(n - table.k() as i64)?,
            std::cmp::Ordering::Greater => (0, false),
        }
    } else if l == 2 {
        via_d(n + 1 - rep.i as i64)?
    } else {
        (0, false)
    };
    let witnesses = if count > 0 {
        Some(ConjugateRange {
            expr: factors_expr(&factors),
            base: factors_word(table, &factors)?,
            count: count as usize,
        })
    } else {
        None
    };
    Ok(ClosedForm { rep, witnesses, formal })
}

impl ClosedForm {
    fn words(&self) -> Result<BTreeSet<Word>> {
        self.witnesses.as_ref().map_or(Ok(BTreeSet::new()), ConjugateRange::words)
    }

    fn describe(&self, table: &BlockTable, n: usize) -> String {
        let expr = base_factors(table, n, self.rep.i, self.rep.r)
            .map(|f| factors_expr(&f))
            .unwrap_or_default();
        let count = self.witnesses.as_ref().map_or(0, |w| w.count);
        let note = if self.formal { " (formal |D| = -1)" } else { "" };
        format!("i = {}, r = {}: |{expr}| with {count} witnesses{note}", self.rep.i, self.rep.r)
    }
}

/// Every representation of `m` in its window with its closed form; empty for `m ≤ d_1`.
pub fn closed_forms(table: &BlockTable, m: u64, l: usize) -> Result<Vec<ClosedForm>> {
    let Some(n) = table.level_of_length(m)? else {
        return Ok(Vec::new());
    };
    length_sets(table, n as i64)?
        .representations(m)
        .into_iter()
        .map(|rep| closed_form(table, n, rep, l))
        .collect()
}

/// `p(m; l)` and `𝒫(m; l)` from the closed forms.
///
/// When `m` has several representations, the forms that are not formal must
/// agree; formal forms contribute no witnesses. Any other disagreement is an
/// [`Error::Ambiguity`].
pub fn census(table: &BlockTable, m: u64, l: usize) -> Result<PowerCensus> {
    if l < 2 {
        return range(format!("power exponent l must be at least 2, got {l}"));
    }
    if m < 1 {
        return range("power length m must be at least 1");
    }
    let Some(n) = table.level_of_length(m)? else {
        // m ≤ d_1: a_1 is separating and occurs in runs of length d_1 or d_1 + 1
        let d1 = table.d(1)? as u64;
        let witnesses = (l as u64 * m <= d1 + 1).then(|| ConjugateRange {
            expr: format!("a_1^{m}"),
            base: Word::from_letters(std::iter::repeat_n(Letter::new(1), m as usize)),
            count: 1,
        });
        return Ok(PowerCensus {
            m,
            l,
            count: witnesses.as_ref().map_or(0, |w| w.count),
            witnesses,
            provenance: Provenance {
                case: CensusCase::SmallLength,
                n: None,
                representations: Vec::new(),
                extension: l > 2,
                formal_overridden: false,
            },
        });
    };
    let forms: Vec<ClosedForm> = length_sets(table, n as i64)?
        .representations(m)
        .into_iter()
        .map(|rep| closed_form(table, n, rep, l))
        .collect::<Result<_>>()?;
    let reps: Vec<LengthMember> = forms.iter().map(|f| f.rep).collect();
    if forms.is_empty() {
        return Ok(PowerCensus {
            m,
            l,
            count: 0,
            witnesses: None,
            provenance: Provenance {
                case: CensusCase::OffGridZero,
                n: Some(n),
                representations: reps,
                extension: false,
                formal_overridden: false,
            },
        });
    }
    let solid: Vec<&ClosedForm> = forms.iter().filter(|f| !f.formal).collect();
    let chosen = solid.first().copied().unwrap_or(&forms[0]);
    let mut formal_overridden = false;
    if forms.len() > 1 {
        let expected = chosen.words()?;
        for f in &forms {
            if f.words()? == expected {
                continue;
            }
            if f.formal && !chosen.formal {
                formal_overridden = true;
                continue;
            }
            return Err(Error::Ambiguity {
                m: m as usize,
                candidates: forms.iter().map(|f| f.describe(table, n)).collect(),
            });
        }
    }
    let witnesses = chosen.witnesses.clone();
    Ok(PowerCensus {
        m,
        l,
        count: witnesses.as_ref().map_or(0, |w| w.count),
        witnesses,
        provenance: Provenance {
            case: if chosen.rep.i == 1 { CensusCase::D1Case } else { CensusCase::DiCase },
            n: Some(n),
            representations: reps,
            extension: false,
            formal_overridden,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRange {
    pub m_max: u64,
    pub l: usize,
    /// Nonzero censuses, ascending in `m`.
    pub rows: Vec<PowerCensus>,
    /// Lengths outside every length set.
    pub zero_off_grid: u64,
    /// Grid or small lengths whose closed form gives zero.
    pub zero_on_grid: Vec<u64>,
}

/// Censuses of every `1 ≤ m ≤ m_max`, zero rows summarized.
pub fn census_range(table: &BlockTable, m_max: u64, l: usize) -> Result<CensusRange> {
    if l < 2 {
        return range(format!("power exponent l must be at least 2, got {l}"));
    }
    let all: Vec<PowerCensus> = (1..=m_max)
        .into_par_iter()
        .map(|m| census(table, m, l))
        .collect::<Result<_>>()?;
    let mut out = CensusRange {
        m_max,
        l,
        rows: Vec::new(),
        zero_off_grid: 0,
        zero_on_grid: Vec::new(),
    };
    for c in all {
        if c.count > 0 {
            out.rows.push(c);
        } else if c.provenance.case == CensusCase::OffGridZero {
            out.zero_off_grid += 1;
        } else {
            out.zero_on_grid.push(c.m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{conjugacy_class, is_primitive};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn table(spec: &str) -> BlockTable {
        BlockTable::new(spec.parse().unwrap())
    }

    const SPECS: [&str; 7] = [
        "k=2; d=; 1",
        "k=2; d=1,2; 3",
        "k=3; d=; 1",
        "k=3; d=1,1,2; 2,1,2",
        "k=4; d=; 1",
        "k=4; d=2,1,3,1; 2,2",
        "k=5; d=; 1",
    ];

    #[test]
    fn indices_of_examples() {
        let fib = table("k=2; d=; 1");
        let p = prefix_index(&fib, 1).unwrap();
        assert_eq!(p.value, RationalIndex::new(1, 1, 2).unwrap());
        assert_eq!(p.witness, w("aba"));
        let abcca = table("k=3; d=1,1,2; 2,1,2");
        let p = prefix_index(&abcca, 3).unwrap();
        assert_eq!(p.value, RationalIndex::new(3, 0, 11).unwrap());
        assert_eq!(p.witness.len(), 33);
        assert_eq!(block_index(&abcca, 3).unwrap().value, RationalIndex::new(4, 0, 11).unwrap());
        let tri = table("k=3; d=; 1");
        assert_eq!(block_index(&tri, 4).unwrap().value, RationalIndex::new(3, 1, 13).unwrap());
        assert!(block_index(&tri, 0).is_err());
        assert!(prefix_index(&tri, 0).is_err());
    }

    #[test]
    fn indices_across_specs() {
        for spec in SPECS {
            let t = table(spec);
            for n in 1..=10 {
                let p = prefix_index(&t, n).unwrap();
                let b = block_index(&t, n).unwrap();
                if n >= t.k() as i64 {
                    assert!(b.value >= RationalIndex::new(3, 0, 1).unwrap());
                }
                let len = t.len_s(n).unwrap();
                assert_eq!(b.witness.len() as u64, b.value.whole * len + b.value.num);
                assert_eq!(p.witness.len() as u64 + len, b.witness.len() as u64);
            }
        }
    }

    #[test]
    fn abcca_length_sets() {
        let t = table("k=3; d=1,1,2; 2,1,2");
        let ls = length_sets(&t, 3).unwrap();
        let ms: Vec<Vec<u64>> = ls.sets.iter().map(|s| s.iter().map(|x| x.m).collect()).collect();
        assert_eq!(ms, vec![vec![11, 22], vec![15, 26], vec![21]]);
    }

    #[test]
    fn tribonacci_length_sets() {
        let t = table("k=3; d=; 1");
        for n in 1..=10 {
            let ls = length_sets(&t, n).unwrap();
            assert!(ls.sets[2].is_empty());
            let expected = t.len_s(n).unwrap() + t.len_s(n - 1).unwrap();
            assert_eq!(ls.sets[1].iter().map(|x| x.m).collect::<Vec<_>>(), vec![expected]);
        }
    }

    #[test]
    fn members_lie_in_window() {
        for spec in SPECS {
            let t = table(spec);
            for n in 1..=10 {
                let lo = t.len_s(n).unwrap();
                let hi = t.len_s(n + 1).unwrap();
                assert!(length_sets(&t, n).unwrap().members().all(|x| (lo..hi).contains(&x.m)));
            }
        }
    }

    #[test]
    fn abcca_census_table() {
        let t = table("k=3; d=1,1,2; 2,1,2");
        let cases = [
            (11, 2, 11),
            (22, 2, 1),
            (32, 2, 32),
            (58, 2, 58),
            (116, 2, 8),
            (15, 2, 8),
            (26, 2, 8),
            (21, 2, 2),
            (43, 2, 23),
            (90, 2, 34),
            (148, 2, 34),
            (101, 2, 23),
            (11, 3, 11),
            (22, 3, 0),
            (32, 3, 2),
            (58, 3, 58),
            (116, 3, 0),
        ];
        for (m, l, count) in cases {
            assert_eq!(census(&t, m, l).unwrap().count, count, "p({m};{l})");
        }
        let s3 = t.s(3).unwrap();
        assert_eq!(census(&t, 22, 2).unwrap().witness_set().unwrap(), BTreeSet::from([s3.pow(2)]));
        let s4 = t.s(4).unwrap();
        assert_eq!(
            census(&t, 32, 3).unwrap().witness_set().unwrap(),
            BTreeSet::from([(*s4).clone(), conjugate(&s4, 1).unwrap()])
        );
        let c = census(&t, 15, 2).unwrap();
        assert_eq!(c.witnesses.as_ref().unwrap().describe(), "first 8 conjugates of s_3·s_2");
        let set = c.witness_set().unwrap();
        assert!(set.contains(&w("abacabacabaabac")));
        assert!(set.contains(&w("cabaabacabacaba")));
    }

    #[test]
    fn tribonacci_small_census() {
        let t = table("k=3; d=; 1");
        let c = census(&t, 1, 2).unwrap();
        assert_eq!(c.witness_set().unwrap(), BTreeSet::from([w("a")]));
        assert_eq!(c.provenance.case, CensusCase::SmallLength);
        assert!(!c.provenance.extension);
        assert!(census(&t, 1, 3).unwrap().provenance.extension);
        assert!(census(&t, 1, 1).is_err());
        assert!(census(&t, 0, 2).is_err());
        let nonzero: Vec<u64> = census_range(&t, 13, 2).unwrap().rows.iter().map(|c| c.m).collect();
        assert_eq!(nonzero, vec![1, 2, 3, 4, 6, 7, 11, 13]);
        assert!(census_range(&t, 0, 2).unwrap().rows.is_empty());
    }

    #[test]
    fn abcca_cube_range() {
        let t = table("k=3; d=1,1,2; 2,1,2");
        let r = census_range(&t, 58, 3).unwrap();
        let nonzero: Vec<u64> = r.rows.iter().map(|c| c.m).collect();
        assert_eq!(nonzero, vec![4, 11, 32, 58]);
        assert!(r.zero_on_grid.contains(&22));
    }

    #[test]
    fn formal_form_collision() {
        // m = 12 = 2|s_2| = |s_2·s_1·s_0^2·s_-1|; the second form has the formal count |D_-1| + 1
        let t = table("k=4; d=2,1,3,1; 2,2");
        let forms = closed_forms(&t, 12, 2).unwrap();
        assert_eq!(forms.len(), 2);
        assert!(forms[1].formal && forms[1].witnesses.is_none());
        let c = census(&t, 12, 2).unwrap();
        assert_eq!(c.count, 6);
        assert!(c.provenance.formal_overridden);
        assert_eq!(c.provenance.case, CensusCase::D1Case);
    }

    #[test]
    fn block_length_squares_are_conjugacy_classes() {
        for spec in SPECS {
            let t = table(spec);
            for n in 1..=7 {
                let s = t.s(n).unwrap();
                let c = census(&t, s.len() as u64, 2).unwrap();
                assert_eq!(c.witness_set().unwrap(), conjugacy_class(&s), "{spec} n = {n}");
            }
        }
    }

    #[test]
    fn k_bonacci_has_no_fourth_powers() {
        for k in 3..=5 {
            let t = BlockTable::new(crate::DirectiveSpec::k_bonacci(k).unwrap());
            let top = t.len_s(7).unwrap();
            assert!(census_range(&t, top, 4).unwrap().rows.is_empty());
        }
    }

    #[test]
    fn census_invariants() {
        for spec in SPECS {
            let t = table(spec);
            let top = t.len_s(7).unwrap();
            for m in 1..=top {
                let cs: Vec<PowerCensus> = (2..=5).map(|l| census(&t, m, l).unwrap()).collect();
                for pair in cs.windows(2) {
                    assert!(pair[0].count >= pair[1].count, "{spec} m = {m}");
                }
                for c in &cs {
                    let set = c.witness_set().unwrap();
                    assert_eq!(set.len(), c.count);
                    assert!(set.iter().all(|x| x.len() as u64 == m));
                    let primitive_case = c
                        .provenance
                        .representations
                        .first()
                        .is_some_and(|rep| rep.i >= 2 || rep.r == 1);
                    if primitive_case {
                        assert!(set.iter().all(is_primitive), "{spec} m = {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn index_floor_is_largest_block_power() {
        for spec in SPECS {
            let t = table(spec);
            for n in 1..=6 {
                let m = t.len_s(n).unwrap();
                let floor = block_index(&t, n).unwrap().value.floor() as usize;
                let largest = (2..=floor + 2).filter(|&l| census(&t, m, l).unwrap().count > 0).max();
                assert_eq!(largest, Some(floor), "{spec} n = {n}");
            }
        }
    }
}
