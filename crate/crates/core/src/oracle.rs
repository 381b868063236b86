//! Brute-force ground truth on literal prefixes, independent of every closed form.
//!
//! [`scan_powers`] finds, for each length `m`, the distinct words `w` with
//! `w^l` occurring in a prefix. For a fixed `m` the positions `i` with
//! `x[i] = x[i+m]` form maximal runs; a run of length `R ≥ (l−1)m` starting
//! at `p` holds `w^l` exactly for the starts `p ..= p + R − (l−1)m`, and the
//! first `m` of them already realize every distinct base of the run.
//! Bases are deduplicated exactly by Karp–Miller–Rosenberg names.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::{BlockTable, RationalIndex};
use crate::directive::PalindromicPrefixTable;
use crate::error::{range, Error, Result};
use crate::word::{occurrences, Word};

/// The smallest level `N ≥ 1` with `|s_N| ≥ min_length`.
pub fn prefix_level(table: &BlockTable, min_length: usize) -> Result<i64> {
    if min_length == 0 {
        return range("prefix length must be at least 1");
    }
    let mut n = 1;
    while (table.len_s(n)? as usize) < min_length {
        n += 1;
        if n > table.max_level() as i64 {
            return Err(Error::Resource(format!(
                "no block up to the level guard {} reaches length {min_length}",
                table.max_level()
            )));
        }
    }
    Ok(n)
}

/// The smallest block `s_N`, `N ≥ 1`, of length at least `min_length`.
pub fn generate_prefix(table: &BlockTable, min_length: usize) -> Result<Arc<Word>> {
    table.s(prefix_level(table, min_length)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanResult {
    pub l: usize,
    /// `m ↦ (base ↦ first start of base^l)`; every scanned `m` is present.
    pub per_length: BTreeMap<usize, BTreeMap<Word, usize>>,
}

impl ScanResult {
    pub fn bases(&self, m: usize) -> BTreeSet<Word> {
        self.per_length
            .get(&m)
            .map(|b| b.keys().cloned().collect())
            .unwrap_or_default()
    }

    pub fn count(&self, m: usize) -> usize {
        self.per_length.get(&m).map_or(0, BTreeMap::len)
    }

    pub fn same_bases(&self, other: &ScanResult) -> bool {
        self.l == other.l
            && self.per_length.len() == other.per_length.len()
            && self
                .per_length
                .iter()
                .zip(&other.per_length)
                .all(|((ma, a), (mb, b))| ma == mb && a.keys().eq(b.keys()))
    }

    /// Re-checks every recorded occurrence by direct comparison.
    pub fn verify_occurrences(&self, prefix: &Word) -> Result<()> {
        let x = prefix.as_bytes();
        for (&m, bases) in &self.per_length {
            for (w, &p) in bases {
                let ok = w.len() == m
                    && p + self.l * m <= x.len()
                    && (0..self.l).all(|j| &x[p + j * m..p + (j + 1) * m] == w.as_bytes());
                if !ok {
                    return Err(Error::InvariantViolation(format!(
                        "{w}^{} is not at position {p}",
                        self.l
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Exact names for factors: `names[t][i]` identifies `x[i .. i + 2^t]`.
struct FactorNames {
    names: Vec<Vec<u32>>,
}

impl FactorNames {
    fn build(x: &[u8], max_len: usize) -> FactorNames {
        let mut names = vec![x.iter().map(|&c| c as u32).collect::<Vec<u32>>()];
        let mut span = 1;
        while span * 2 <= max_len && span * 2 <= x.len() {
            let prev = names.last().expect("level 0 exists");
            let count = x.len() - 2 * span + 1;
            let mut keyed: Vec<(u64, u32)> = (0..count)
                .into_par_iter()
                .map(|i| (((prev[i] as u64) << 32) | prev[i + span] as u64, i as u32))
                .collect();
            keyed.par_sort_unstable();
            let mut next = vec![0u32; count];
            let mut id = 0u32;
            for (j, &(key, i)) in keyed.iter().enumerate() {
                if j > 0 && key != keyed[j - 1].0 {
                    id += 1;
                }
                next[i as usize] = id;
            }
            names.push(next);
            span *= 2;
        }
        FactorNames { names }
    }

    /// Equal keys iff `x[i .. i + m]` are equal words; `1 ≤ m ≤ max_len`.
    fn key(&self, i: usize, m: usize) -> (u32, u32) {
        let t = (usize::BITS - 1 - m.leading_zeros()) as usize;
        let t = t.min(self.names.len() - 1);
        let span = 1 << t;
        debug_assert!(m <= 2 * span);
        (self.names[t][i], self.names[t][i + m - span])
    }
}

fn check_scan_range(n: usize, l: usize, m_min: usize, m_max: usize) -> Result<()> {
    if l < 2 {
        return range(format!("power exponent l must be at least 2, got {l}"));
    }
    if m_min < 1 || m_min > m_max {
        return range(format!("length range [{m_min}, {m_max}] is empty or starts below 1"));
    }
    if m_max * l > n {
        return range(format!("m_max = {m_max} exceeds |prefix| / l = {}", n / l));
    }
    Ok(())
}

/// Distinct bases `w`, `m_min ≤ |w| ≤ m_max`, with `w^l` a factor of `prefix`.
pub fn scan_powers(prefix: &Word, l: usize, m_min: usize, m_max: usize) -> Result<ScanResult> {
    Ok(scan_powers_multi(prefix, &[l], m_min, m_max)?.remove(0))
}

/// [`scan_powers`] for several exponents at once; `m_max · max(ls) ≤ |prefix|`.
pub fn scan_powers_multi(prefix: &Word, ls: &[usize], m_min: usize, m_max: usize) -> Result<Vec<ScanResult>> {
    let x = prefix.as_bytes();
    if ls.is_empty() {
        return range("no exponents given");
    }
    for &l in ls {
        check_scan_range(x.len(), l, m_min, m_max)?;
    }
    let names = FactorNames::build(x, m_max);

    let per_m: Vec<Vec<BTreeMap<Word, usize>>> = (m_min..=m_max)
        .into_par_iter()
        .map(|m| {
            let mut found: Vec<HashMap<(u32, u32), usize>> = vec![HashMap::new(); ls.len()];
            let end = x.len() - m;
            let mut i = 0;
            while i < end {
                if x[i] != x[i + m] {
                    i += 1;
                    continue;
                }
                let p = i;
                while i < end && x[i] == x[i + m] {
                    i += 1;
                }
                let run = i - p;
                for (slot, &l) in found.iter_mut().zip(ls) {
                    if run < (l - 1) * m {
                        continue;
                    }
                    let last = p + (run - (l - 1) * m).min(m - 1);
                    for q in p..=last {
                        slot.entry(names.key(q, m)).or_insert(q);
                    }
                }
            }
            found
                .into_iter()
                .map(|slot| slot.into_values().map(|q| (prefix.slice(q..q + m), q)).collect())
                .collect()
        })
        .collect();

    Ok(ls
        .iter()
        .enumerate()
        .map(|(j, &l)| ScanResult {
            l,
            per_length: (m_min..=m_max).zip(per_m.iter().map(|row| row[j].clone())).collect(),
        })
        .collect())
}

/// Quadratic reference scanner: tests every start and every length letter by letter.
pub fn scan_powers_naive(prefix: &Word, l: usize, m_min: usize, m_max: usize) -> Result<ScanResult> {
    let x = prefix.as_bytes();
    check_scan_range(x.len(), l, m_min, m_max)?;
    let mut per_length = BTreeMap::new();
    for m in m_min..=m_max {
        let mut bases: BTreeMap<Word, usize> = BTreeMap::new();
        for i in 0..=x.len() - l * m {
            if (m..l * m).all(|j| x[i + j] == x[i + j - m]) {
                bases.entry(prefix.slice(i..i + m)).or_insert(i);
            }
        }
        per_length.insert(m, bases);
    }
    Ok(ScanResult { l, per_length })
}

/// Distinct factors of length `m`, each with its first start.
pub fn factor_set(prefix: &Word, m: usize) -> Result<BTreeMap<Word, usize>> {
    let x = prefix.as_bytes();
    if m == 0 || m > x.len() {
        return range(format!("factor length {m} outside [1, {}]", x.len()));
    }
    let names = FactorNames::build(x, m);
    let mut first: HashMap<(u32, u32), usize> = HashMap::new();
    for i in 0..=x.len() - m {
        first.entry(names.key(i, m)).or_insert(i);
    }
    Ok(first.into_values().map(|i| (prefix.slice(i..i + m), i)).collect())
}

/// The length-`m` factors of the word: the factor set of `s_N` for the first
/// `N ≥ n + k + 3` (with `|s_{n+1}| > m`) whose set equals that of `s_{N+1}`.
pub fn stable_factor_set(table: &BlockTable, m: usize) -> Result<BTreeSet<Word>> {
    if m == 0 {
        return range("factor length must be at least 1");
    }
    let mut n = 0;
    while table.len_s(n + 1)? as usize <= m {
        n += 1;
    }
    let mut level = n + table.k() as i64 + 3;
    let mut current: BTreeSet<Word> = factor_set(&*table.s(level)?, m)?.into_keys().collect();
    for _ in 0..2 {
        let next: BTreeSet<Word> = factor_set(&*table.s(level + 1)?, m)?.into_keys().collect();
        if next == current {
            return Ok(current);
        }
        level += 1;
        current = next;
    }
    Err(Error::Unstable(format!("length-{m} factor set still grows at s_{level}")))
}

/// A prefix of the word whose power census is stable under extension.
#[derive(Debug, Clone, Serialize)]
pub struct PrefixCertificate {
    pub level: i64,
    #[serde(skip)]
    pub word: Arc<Word>,
    pub prefix_length: usize,
    pub covered_m_max: usize,
    pub l_max: usize,
    /// The level whose scan matched the scan of `level`.
    pub checked_against_level: i64,
    pub escalations: usize,
    pub method: String,
    /// Scans of `word` for `l = 2 ..= l_max` and `m = 1 ..= covered_m_max`.
    #[serde(skip)]
    pub scans: Vec<ScanResult>,
}

impl PrefixCertificate {
    pub fn scan(&self, l: usize) -> Option<&ScanResult> {
        self.scans.iter().find(|s| s.l == l)
    }
}

/// Certifies a prefix for all power lengths `m ≤ m_max` and exponents `2 ≤ l ≤ l_max`.
pub fn certify_prefix(table: &BlockTable, m_max: usize, l_max: usize) -> Result<PrefixCertificate> {
    if m_max < 1 {
        return range("m_max must be at least 1");
    }
    if l_max < 2 {
        return range(format!("l_max must be at least 2, got {l_max}"));
    }
    let k = table.k() as i64;
    let mut n = 0;
    while table.len_s(n + 1)? as usize <= m_max {
        n += 1;
    }
    let mut level = n + k + 3;
    while (table.len_s(level)? as usize) < m_max * l_max {
        level += 1;
    }
    let ls: Vec<usize> = (2..=l_max).collect();
    let first_level = level;
    let mut current = scan_powers_multi(&*table.s(level)?, &ls, 1, m_max)?;
    let mut mismatch = String::new();
    for escalations in 0..2 {
        let next = scan_powers_multi(&*table.s(level + 1)?, &ls, 1, m_max)?;
        match current.iter().zip(&next).find(|(a, b)| !a.same_bases(b)) {
            None => {
                let word = table.s(level)?;
                let closure = PalindromicPrefixTable::new(table.spec().clone());
                if closure.prefix(word.len())? != *word {
                    return Err(Error::InvariantViolation(format!(
                        "s_{level} is not a prefix of the palindromic-closure word"
                    )));
                }
                return Ok(PrefixCertificate {
                    level,
                    prefix_length: word.len(),
                    word,
                    covered_m_max: m_max,
                    l_max,
                    checked_against_level: level + 1,
                    escalations,
                    method: format!(
                        "scan of s_{level} equals scan of s_{} (length {}) for all m ≤ {m_max}, 2 ≤ l ≤ {l_max}; \
                         start level n + k + 3 = {first_level} with |s_{}| > m_max; prefix checked against palindromic closure",
                        level + 1,
                        table.len_s(level + 1)?,
                        n + 1
                    ),
                    scans: current,
                });
            }
            Some((a, b)) => {
                let m = a
                    .per_length
                    .keys()
                    .find(|m| a.bases(**m) != b.bases(**m))
                    .copied()
                    .unwrap_or(0);
                mismatch = format!(
                    "l = {}, m = {m}: {} bases on s_{level}, {} on s_{}",
                    a.l,
                    a.count(m),
                    b.count(m),
                    level + 1
                );
                level += 1;
                current = next;
            }
        }
    }
    Err(Error::Unstable(mismatch))
}

/// The largest `r = q + |u|/|base|` with `base^r` a factor of `prefix`.
pub fn max_fractional_power(prefix: &Word, base: &Word) -> Result<RationalIndex> {
    if base.is_empty() {
        return range("the base must be non-empty");
    }
    let x = prefix.as_bytes();
    let m = base.len();
    let mut best = 0;
    let mut skip_until = 0;
    for p in occurrences(x, base.as_bytes()) {
        if p < skip_until {
            continue;
        }
        let mut e = p + m;
        while e < x.len() && x[e] == x[e - m] {
            e += 1;
        }
        best = best.max(e - p);
        // later occurrences before e − m + 1 end their run at e as well
        skip_until = e + 1 - m;
    }
    if best == 0 {
        return Err(Error::NotAFactor(format!("{base} does not occur in the prefix")));
    }
    Ok(RationalIndex::from_length(best as u64, m as u64))
}

/// Length of the longest prefix of `prefix` with period `|base|`, `base` a prefix of it.
pub fn prefix_power_length(prefix: &Word, base: &Word) -> Result<usize> {
    if base.is_empty() || !base.is_prefix_of(prefix) {
        return Err(Error::NotAFactor(format!("{base} is not a non-empty prefix")));
    }
    let x = prefix.as_bytes();
    let m = base.len();
    let mut e = m;
    while e < x.len() && x[e] == x[e - m] {
        e += 1;
    }
    if e == x.len() {
        return Err(Error::InsufficientData(format!(
            "the {m}-periodic prefix reaches the end of the {}-letter prefix",
            x.len()
        )));
    }
    Ok(e)
}
