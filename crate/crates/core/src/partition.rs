//! The `n`-partition: the tiling of a prefix `s_N` by blocks of levels
//! `n − k + 1 ..= n`, obtained by expanding the block recurrence top-down.
//! Positions are 0-based.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::blocks::BlockTable;
use crate::error::{range, Error, Result};
use crate::word::{occurrences, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionItem {
    pub level: i64,
    pub start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionView {
    pub n: i64,
    pub upto_level: i64,
    pub items: Vec<PartitionItem>,
    pub covered_prefix_length: usize,
}

impl PartitionView {
    pub fn min_level(&self, k: usize) -> i64 {
        self.n - k as i64 + 1
    }

    pub fn levels(&self) -> impl Iterator<Item = i64> + '_ {
        self.items.iter().map(|it| it.level)
    }

    /// Tiling without gaps or overlaps, levels in range, each item equal to its block.
    pub fn check(&self, table: &BlockTable) -> Result<()> {
        let prefix = table.s(self.upto_level)?;
        if prefix.len() != self.covered_prefix_length {
            return Err(Error::InvariantViolation(format!(
                "partition covers {} letters but |s_{}| = {}",
                self.covered_prefix_length,
                self.upto_level,
                prefix.len()
            )));
        }
        let lo = self.min_level(table.k());
        let mut pos = 0;
        for it in &self.items {
            if it.start != pos || it.level < lo || it.level > self.n {
                return Err(Error::InvariantViolation(format!(
                    "item {it:?} breaks the tiling at position {pos}"
                )));
            }
            let block = table.s(it.level)?;
            if block.len() != it.length || prefix.as_bytes()[pos..pos + it.length] != *block.as_bytes() {
                return Err(Error::InvariantViolation(format!(
                    "item at {pos} does not spell s_{}",
                    it.level
                )));
            }
            pos += it.length;
        }
        if pos != self.covered_prefix_length {
            return Err(Error::InvariantViolation(format!("tiling stops at {pos}")));
        }
        Ok(())
    }
}

/// The `n`-partition of `s_{upto_level}`.
pub fn n_partition(table: &BlockTable, n: i64, upto_level: i64) -> Result<PartitionView> {
    if n < 0 {
        return range(format!("n-partitions need n ≥ 0, got {n}"));
    }
    if upto_level <= n {
        return range(format!("the covered block s_{upto_level} must lie above level n = {n}"));
    }
    let lens: Vec<usize> = (n - table.k() as i64 + 1..=upto_level)
        .map(|m| table.len_s(m).map(|l| l as usize))
        .collect::<Result<_>>()?;
    let lo = n - table.k() as i64 + 1;
    let len_of = |m: i64| lens[(m - lo) as usize];

    let mut items = Vec::new();
    let mut pos = 0;
    // pending levels, last element expanded first
    let mut stack = vec![upto_level];
    while let Some(m) = stack.pop() {
        if m <= n {
            items.push(PartitionItem {
                level: m,
                start: pos,
                length: len_of(m),
            });
            pos += len_of(m);
            continue;
        }
        for (level, e) in table.expansion(m)?.into_iter().rev() {
            stack.extend(std::iter::repeat_n(level, e));
        }
    }
    Ok(PartitionView {
        n,
        upto_level,
        items,
        covered_prefix_length: pos,
    })
}

/// Merges the `n`-partition into the `(n+1)`-partition: every block of level
/// `n − k + 1` closes one `s_{n+1}` together with the items of its expansion.
pub fn regroup(table: &BlockTable, view: &PartitionView) -> Result<PartitionView> {
    let n = view.n;
    let lo = view.min_level(table.k());
    let pattern: Vec<i64> = table
        .expansion(n + 1)?
        .into_iter()
        .flat_map(|(level, e)| std::iter::repeat_n(level, e))
        .collect();
    let body = pattern.len() - 1;
    let mut out: Vec<PartitionItem> = Vec::with_capacity(view.items.len());
    for it in &view.items {
        if it.level != lo {
            out.push(*it);
            continue;
        }
        if out.len() < body {
            return Err(Error::InvariantViolation(format!(
                "s_{lo} block at {} lacks a full s_{} before it",
                it.start,
                n + 1
            )));
        }
        let group = out.split_off(out.len() - body);
        let levels: Vec<i64> = group.iter().map(|g| g.level).chain([it.level]).collect();
        if levels != pattern {
            return Err(Error::InvariantViolation(format!(
                "group ending at {} reads {levels:?}, expected {pattern:?}",
                it.start + it.length
            )));
        }
        let start = group.first().map_or(it.start, |g| g.start);
        out.push(PartitionItem {
            level: n + 1,
            start,
            length: it.start + it.length - start,
        });
    }
    Ok(PartitionView {
        n: n + 1,
        upto_level: view.upto_level,
        items: out,
        covered_prefix_length: view.covered_prefix_length,
    })
}

/// Ascending start positions of the blocks of one level.
pub fn block_positions(table: &BlockTable, view: &PartitionView, level: i64) -> Result<Vec<usize>> {
    let lo = view.min_level(table.k());
    if level < lo || level > view.n {
        return range(format!("level {level} lies outside [{lo}, {}]", view.n));
    }
    Ok(view
        .items
        .iter()
        .filter(|it| it.level == level)
        .map(|it| it.start)
        .collect())
}

/// The return words of `w` observed in `prefix`.
pub fn return_words(prefix: &Word, w: &Word) -> Result<BTreeSet<Word>> {
    if w.is_empty() {
        return range("return words of the empty word are undefined");
    }
    let starts: Vec<usize> = occurrences(prefix.as_bytes(), w.as_bytes()).collect();
    if starts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{w} occurs {} time(s) in a prefix of length {}",
            starts.len(),
            prefix.len()
        )));
    }
    Ok(starts.windows(2).map(|p| prefix.slice(p[0]..p[1])).collect())
}

/// Return words of `w` on the first block prefix of length at least `min_len`,
/// confirmed unchanged on a prefix at least twice as long.
pub fn stable_return_words(table: &BlockTable, w: &Word, min_len: usize) -> Result<BTreeSet<Word>> {
    let mut level = 1;
    while (table.len_s(level)? as usize) < min_len.max(w.len()) {
        level += 1;
    }
    let mut current = return_words(&*table.s(level)?, w);
    for _ in 0..8 {
        let target = 2 * table.len_s(level)?;
        while table.len_s(level)? < target {
            level += 1;
        }
        let next = return_words(&*table.s(level)?, w);
        match (&current, &next) {
            (Ok(a), Ok(b)) if a == b => return next,
            _ => current = next,
        }
    }
    Err(Error::InsufficientData(format!(
        "return words of {w} did not stabilize by level {level}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(spec: &str) -> BlockTable {
        BlockTable::new(spec.parse().unwrap())
    }

    #[test]
    fn tribonacci_one_partition_of_s3() {
        let t = table("k=3; d=; 1");
        let v = n_partition(&t, 1, 3).unwrap();
        assert_eq!(v.levels().collect::<Vec<_>>(), vec![1, 0, -1, 1, 0]);
        assert_eq!(v.covered_prefix_length, 7);
        v.check(&t).unwrap();
        assert_eq!(block_positions(&t, &v, 1).unwrap(), vec![0, 4]);
        assert_eq!(block_positions(&t, &v, -1).unwrap(), vec![3]);
        assert!(block_positions(&t, &v, 2).is_err());
        assert!(block_positions(&t, &v, -2).is_err());
    }

    #[test]
    fn one_step_partition_follows_recurrence() {
        for spec in ["k=3; d=1,1,2; 2,1,2", "k=4; d=2,1,3,1; 2,2", "k=2; d=1,2; 3"] {
            let t = table(spec);
            for n in 0..6 {
                let v = n_partition(&t, n, n + 1).unwrap();
                let expected: Vec<i64> = t
                    .expansion(n + 1)
                    .unwrap()
                    .into_iter()
                    .flat_map(|(l, e)| std::iter::repeat_n(l, e))
                    .collect();
                assert_eq!(v.levels().collect::<Vec<_>>(), expected);
                v.check(&t).unwrap();
            }
        }
    }

    #[test]
    fn regroup_round_trip() {
        for spec in ["k=3; d=; 1", "k=3; d=1,1,2; 2,1,2", "k=4; d=2,1,3,1; 2,2", "k=2; d=1,2; 3"] {
            let t = table(spec);
            for n in 0..=6 {
                let v = n_partition(&t, n, n + 4).unwrap();
                v.check(&t).unwrap();
                let up = regroup(&t, &v).unwrap();
                assert_eq!(up, n_partition(&t, n + 1, n + 4).unwrap(), "{spec} n = {n}");
            }
        }
    }

    #[test]
    fn fibonacci_return_words_of_a() {
        let t = table("k=2; d=; 1");
        let prefix = crate::word::Word::empty();
        assert!(return_words(&prefix, &"a".parse().unwrap()).is_err());
        let mut level = 1;
        while t.len_s(level).unwrap() < 10_000 {
            level += 1;
        }
        let rw = return_words(&t.s(level).unwrap(), &"a".parse().unwrap()).unwrap();
        assert_eq!(rw, BTreeSet::from(["a".parse().unwrap(), "ab".parse().unwrap()]));
    }

    #[test]
    fn return_word_counts_equal_k() {
        for spec in ["k=3; d=; 1", "k=3; d=1,1,2; 2,1,2", "k=4; d=2,1,3,1; 2,2"] {
            let t = table(spec);
            let k = t.k();
            let s4 = t.s(4).unwrap();
            for len in [1, 2, 3, 5, 9] {
                let w = s4.slice(1..1 + len);
                let rw = stable_return_words(&t, &w, 2000).unwrap();
                assert_eq!(rw.len(), k, "{spec} {w}");
            }
        }
    }

    #[test]
    fn single_occurrence_is_insufficient() {
        let t = table("k=3; d=; 1");
        let s3 = t.s(3).unwrap();
        assert!(matches!(
            return_words(&s3, &"abacaba".parse().unwrap()),
            Err(Error::InsufficientData(_))
        ));
    }
}
