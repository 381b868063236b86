//! Invariant batteries over one directive. Every check compares materialized
//! words or integers; a failing check reports its first counterexample.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::blocks::{BlockTable, RationalIndex};
use crate::directive::{h_word, PalindromicPrefixTable};
use crate::error::{Error, Result};
use crate::oracle::{certify_prefix, max_fractional_power, prefix_power_length, stable_factor_set};
use crate::partition::{n_partition, regroup, return_words};
use crate::powers::{block_index, census, prefix_index};
use crate::singular::factor_partition;
use crate::word::{
    conjugate, is_palindrome, occurrences, palindrome_pair_splits, reversal, strip_prefix, strip_suffix, Letter,
    Word,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Number of cases that passed before the first failure.
    pub cases: usize,
    pub counterexample: Option<String>,
}

/// Runs `f` on each case until the first failure. Resource errors propagate.
fn run<I, F>(name: &str, cases: I, mut f: F) -> Result<CheckOutcome>
where
    I: IntoIterator<Item = i64>,
    F: FnMut(i64) -> Result<Option<String>>,
{
    let mut passed = 0;
    for n in cases {
        let failure = match f(n) {
            Ok(None) => {
                passed += 1;
                continue;
            }
            Ok(Some(msg)) => msg,
            Err(e @ Error::Resource(_)) => return Err(e),
            Err(e) => e.to_string(),
        };
        return Ok(CheckOutcome {
            name: name.to_string(),
            passed: false,
            cases: passed,
            counterexample: Some(format!("n = {n}: {failure}")),
        });
    }
    Ok(CheckOutcome {
        name: name.to_string(),
        passed: true,
        cases: passed,
        counterexample: None,
    })
}

/// Short display of a possibly long word.
pub fn show(w: &Word) -> String {
    if w.len() <= 48 {
        w.to_string()
    } else {
        format!("{}…({} letters)", w.prefix(40), w.len())
    }
}

fn differ(what: &str, left: &Word, right: &Word) -> Option<String> {
    (left != right).then(|| format!("{what}: {} ≠ {}", show(left), show(right)))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Option<String> {
    (!cond).then(msg)
}

/// Word and integer identities of the block algebra for `1 ≤ n ≤ n_max`.
pub fn block_identities(table: &BlockTable, n_max: i64) -> Result<Vec<CheckOutcome>> {
    let k = table.k() as i64;
    let ku = table.k();
    let letter = |i: i64| Word::letter(Letter::cyclic(i, ku));
    let closure = PalindromicPrefixTable::new(table.spec().clone());
    let mut out = Vec::new();

    out.push(run("last letter of s_n is a_(n+1 mod k)", 1 - k..=n_max, |n| {
        let s = table.s(n)?;
        Ok(ensure(s.last() == Some(Letter::cyclic(n + 1, ku)), || {
            format!("s_n ends with {:?}", s.last())
        }))
    })?);

    out.push(run("|s_n| = Q_n, increasing, s_n prefix of s_(n+1)", 0..=n_max, |n| {
        let s = table.s(n)?;
        let next = table.s(n + 1)?;
        Ok(ensure(
            s.len() as u64 == table.q(n as usize)? && next.len() > s.len() && s.is_prefix_of(&next),
            || format!("|s_n| = {}, Q_n = {}", s.len(), table.q(n as usize).unwrap_or(0)),
        ))
    })?);

    out.push(run("|s_n|_(a_1) = Q_n - P_n", 0..=n_max, |n| {
        let s = table.s(n)?;
        let count = s.count(Letter::new(1)) as u64;
        let (q, p) = (table.q(n as usize)?, table.p(n as usize)?);
        Ok(ensure(count == q - p, || format!("{count} ≠ {q} - {p}")))
    })?);

    out.push(run("s_(n+1) D_(n-k+1) = s_n D_n", 0..=n_max, |n| {
        let right = table.s(n)?.concat(&*table.big_d(n)?);
        let left = if n - k + 1 >= 0 {
            table.s(n + 1)?.concat(&*table.big_d(n - k + 1)?)
        } else {
            // D_(n-k+1) = a_(n+2)^(-1)
            strip_suffix(&*table.s(n + 1)?, &letter(n + 2))?
        };
        let lengths = table.length_d(n)? - table.length_d(n - k + 1)?
            == table.len_s(n + 1)? as i64 - table.len_s(n)? as i64;
        Ok(differ("words", &left, &right).or_else(|| ensure(lengths, || "length form fails".into())))
    })?);

    out.push(run("|s_n| > |D_(n-1)|", 1..=n_max, |n| {
        let (s, d) = (table.len_s(n)? as i64, table.length_d(n - 1)?);
        Ok(ensure(s > d, || format!("{s} ≤ {d}")))
    })?);

    out.push(run("D_n = s_n^(d_(n+1)) D_(n-k)", 0..=n_max, |n| {
        let power = table.s(n)?.pow(table.d(n + 1)?);
        let right = if n >= k {
            power.concat(&*table.big_d(n - k)?)
        } else {
            strip_suffix(&power, &letter(n + 1))?
        };
        Ok(differ("words", &*table.big_d(n)?, &right))
    })?);

    out.push(run("D_n = u_(L_(n+1))", 0..=n_max, |n| {
        let u = closure.u(table.big_l(n as usize + 1)?)?;
        Ok(differ("words", &*table.big_d(n)?, &u))
    })?);

    out.push(run("reversal(s_n) is the |D_(n-k)| mod |s_n| conjugate of s_n", 0..=n_max, |n| {
        let s = table.s(n)?;
        let shift = table.length_d(n - k)?.rem_euclid(s.len() as i64) as usize;
        Ok(differ("words", &reversal(&s), &conjugate(&s, shift)?))
    })?);

    out.push(run("s_n = U_n V_n, the unique product of two palindromes", 0..=n_max, |n| {
        let s = table.s(n)?;
        let rev = reversal(&s);
        if n >= k {
            let u = (*table.big_d(n - k)?).clone();
            let v = strip_suffix(&rev, &u)?;
            if !is_palindrome(&u) || !is_palindrome(&v) || u.concat(&v) != *s {
                return Ok(Some(format!("U = {}, V = {}", show(&u), show(&v))));
            }
        } else {
            // U_n = a_(n+1)^(-1), V_n = s̃_n a_(n+1)
            let v = rev.concat(&letter(n + 1));
            if !is_palindrome(&v) || strip_prefix(&v, &letter(n + 1))? != *s {
                return Ok(Some(format!("V = {}", show(&v))));
            }
        }
        let expected = table.length_d(n - k)?.rem_euclid(s.len() as i64) as usize;
        let splits = palindrome_pair_splits(&s);
        if splits != vec![expected] {
            return Ok(Some(format!("palindrome splits {splits:?}, expected [{expected}]")));
        }
        if s.len() <= 2000 {
            let naive: Vec<usize> = (0..s.len())
                .filter(|&i| is_palindrome(&s.slice(0..i)) && is_palindrome(&s.slice(i..s.len())))
                .collect();
            if naive != splits {
                return Ok(Some(format!("exhaustive splits {naive:?}")));
            }
        }
        Ok(None)
    })?);

    out.push(run("s_n s_(n-1) G_(n-1,k-1)^(-1) = s_(n-1) s_n G_(n,1)^(-1)", 1..=n_max, |n| {
        let (s, prev) = (table.s(n)?, table.s(n - 1)?);
        let left = strip_suffix(&s.concat(&prev), &table.big_g(n - 1, ku - 1)?)?;
        let right = strip_suffix(&prev.concat(&s), &table.big_g(n, 1)?)?;
        Ok(differ("words", &left, &right))
    })?);

    out.push(run("G_(n,1) = reversal(G_(n-1,k-1))", 1..=n_max, |n| {
        Ok(differ("words", &table.big_g(n, 1)?, &reversal(&table.big_g(n - 1, ku - 1)?)))
    })?);

    out.push(run("first and last letters of G_(n,r)", 0..=n_max, |n| {
        for r in 1..ku {
            let g = table.big_g(n, r)?;
            if g.first() != Some(Letter::cyclic(n - r as i64 + 1, ku)) || g.last() != Some(Letter::cyclic(n + 1, ku)) {
                return Ok(Some(format!("r = {r}: G = {}", show(&g))));
            }
        }
        Ok(None)
    })?);

    out.push(run("sum of |D_(n-j)| over 1 ≤ j < k = |s_n| - k", 1..=n_max, |n| {
        let sum: i64 = (1..k).map(|j| table.length_d(n - j)).sum::<Result<i64>>()?;
        let expected = table.len_s(n)? as i64 - k;
        Ok(ensure(sum == expected, || format!("{sum} ≠ {expected}")))
    })?);

    out.push(run("s_(n+1) s_n = s_n^(d_(n+1)+1) t_(n-1)", 1..=n_max, |n| {
        let s = table.s(n)?;
        let left = table.s(n + 1)?.concat(&s);
        let right = table.t(n - 1)?.after(&s.pow(table.d(n + 1)? + 1))?;
        Ok(differ("words", &left, &right))
    })?);

    out.push(run("s_n = h_(L_n)", 1..=n_max, |n| {
        let h = h_word(table.spec(), table.big_l(n as usize)?)?;
        Ok(differ("words", &*table.s(n)?, &h))
    })?);

    Ok(out)
}

/// The palindromic-closure prefix and the block prefix agree on `len` letters.
pub fn construction_equivalence(table: &BlockTable, len: usize) -> Result<CheckOutcome> {
    let closure = PalindromicPrefixTable::new(table.spec().clone());
    run("closure prefix = block prefix", [len as i64], |_| {
        let mut n = 1;
        while (table.len_s(n)? as usize) < len {
            n += 1;
        }
        let blocks = table.s(n)?.prefix(len);
        let closed = closure.prefix(len)?;
        Ok((0..len).find(|&i| blocks.as_bytes()[i] != closed.as_bytes()[i]).map(|i| format!("first difference at position {i} (0-based)")))
    })
}

/// Factor partition, tilings, return words and the singular-word laws for `1 ≤ n ≤ n_max`.
pub fn partition_checks(table: &BlockTable, n_max: i64) -> Result<Vec<CheckOutcome>> {
    let k = table.k() as i64;
    let ku = table.k();
    let mut out = Vec::new();

    out.push(run("factor partition equals the length-|s_n| factor set", 1..=n_max, |n| {
        let p = factor_partition(table, n)?;
        for class in p.classes() {
            if let Some(w) = class.iter().find(|w| !class.contains(&reversal(w))) {
                return Ok(Some(format!("class not closed under reversal at {}", show(w))));
            }
        }
        let truth = stable_factor_set(table, p.factor_len())?;
        let union = p.union();
        Ok(ensure(union == truth, || {
            let extra = union.difference(&truth).next().map(show);
            let missing = truth.difference(&union).next().map(show);
            format!("extra {extra:?}, missing {missing:?}")
        }))
    })?);

    let long_prefix = |n: i64| -> Result<std::sync::Arc<Word>> { table.s(n + k + 3) };

    out.push(run("singular words are positively separated and never squared", 1..=n_max.min(6), |n| {
        let p = factor_partition(table, n)?;
        let prefix = long_prefix(n)?;
        for w in p.omega.iter().flatten() {
            let starts: Vec<usize> = occurrences(prefix.as_bytes(), w.as_bytes()).collect();
            if let Some(pair) = starts.windows(2).find(|q| q[1] - q[0] <= w.len()) {
                return Ok(Some(format!("{} at {} and {}", show(w), pair[0], pair[1])));
            }
            if occurrences(prefix.as_bytes(), w.pow(2).as_bytes()).next().is_some() {
                return Ok(Some(format!("square of {} occurs", show(w))));
            }
        }
        Ok(None)
    })?);

    out.push(run("n-partition tiles s_(n+4) and regroups to the (n+1)-partition", 0..=n_max.min(6), |n| {
        let view = n_partition(table, n, n + 4)?;
        view.check(table)?;
        let up = regroup(table, &view)?;
        Ok(ensure(up == n_partition(table, n + 1, n + 4)?, || "regrouped partition differs".into()))
    })?);

    out.push(run("positions of D_n are the formal positions of s_n^(d_(n+1)-1) s_(n-1)^(d_n)", 1..=n_max.min(5), |n| {
        let view = n_partition(table, n - 1, n + k + 3)?;
        let prefix = table.s(n + k + 3)?;
        let d = table.big_d(n)?;
        if d.is_empty() {
            return Ok(Some("D_n is empty".into()));
        }
        let limit = prefix.len().saturating_sub(d.len());
        let mut pattern: Vec<i64> = Vec::new();
        for _ in 1..table.d(n + 1)? {
            for (level, e) in table.expansion(n)? {
                pattern.extend(std::iter::repeat_n(level, e));
            }
        }
        pattern.extend(std::iter::repeat_n(n - 1, table.d(n)?));
        let levels: Vec<i64> = view.levels().collect();
        let formal: BTreeSet<usize> = (0..levels.len())
            .filter(|&j| levels[j..].starts_with(&pattern))
            .map(|j| view.items[j].start)
            .filter(|&p| p <= limit)
            .collect();
        let actual: BTreeSet<usize> = occurrences(prefix.as_bytes(), d.as_bytes()).filter(|&p| p <= limit).collect();
        Ok(ensure(formal == actual, || {
            format!("{} formal vs {} actual positions", formal.len(), actual.len())
        }))
    })?);

    out.push(run("occurrences of c s_n start at the last letter of an n-partition block", 1..=n_max.min(5), |n| {
        let view = n_partition(table, n, n + k + 3)?;
        let prefix = table.s(n + k + 3)?;
        let s = table.s(n)?;
        let ends: BTreeMap<usize, i64> = view.items.iter().map(|it| (it.start + it.length - 1, it.level)).collect();
        let mut level_of: BTreeMap<Letter, i64> = BTreeMap::new();
        for q in occurrences(prefix.as_bytes(), s.as_bytes()).filter(|&q| q > 0) {
            let c = prefix.at(q - 1);
            let Some(&level) = ends.get(&(q - 1)) else {
                return Ok(Some(format!("{c} s_n at {} is not block-aligned", q - 1)));
            };
            if *level_of.entry(c).or_insert(level) != level {
                return Ok(Some(format!("letter {c} precedes blocks of two levels")));
            }
        }
        Ok(None)
    })?);

    out.push(run("every factor has exactly k return words", 1..=n_max.min(5), |n| {
        let prefix = table.s(n + k + 4)?;
        let s = table.s(n)?;
        for len in [1, s.len() / 2 + 1, s.len()] {
            let w = s.slice(s.len() - len..s.len());
            let rw = return_words(&prefix, &w)?;
            let longer = return_words(&*table.s(n + k + 5)?, &w)?;
            if rw != longer || rw.len() != ku {
                return Ok(Some(format!("{} has {} return words", show(&w), rw.len())));
            }
        }
        Ok(None)
    })?);

    Ok(out)
}

/// Census against oracle scans for `m ≤ |s_(n_max)|`, `l ∈ {2, 3, 4}`, and block indices for `1 ≤ n ≤ n_max`.
pub fn power_checks(table: &BlockTable, n_max: i64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let m_max = table.len_s(n_max)? as usize;
    let cert = certify_prefix(table, m_max, 4)?;

    out.push(run("census witnesses = oracle power sets", 2..=4, |l| {
        let scan = cert.scan(l as usize).expect("scanned exponents 2..=4");
        for m in 1..=m_max {
            let c = census(table, m as u64, l as usize)?;
            let predicted = c.witness_set()?;
            let truth = scan.bases(m);
            if predicted != truth {
                return Ok(Some(format!(
                    "m = {m}: census {} words, oracle {} words",
                    predicted.len(),
                    truth.len()
                )));
            }
        }
        Ok(None)
    })?);

    out.push(run("letter a_1 is separating", [0], |_| {
        let x = cert.word.as_bytes();
        Ok(x.windows(2).position(|p| p[0] != 1 && p[1] != 1).map(|i| format!("no a_1 at {i}")))
    })?);

    out.push(run("block index = largest s_n power in the word", 1..=n_max, |n| {
        let s = table.s(n)?;
        let index = block_index(table, n)?;
        let seen = max_fractional_power(&cert.word, &s)?;
        if seen != index.value {
            return Ok(Some(format!("oracle {seen}, closed form {}", index.value)));
        }
        if !index.witness.is_factor_of(&cert.word) {
            return Ok(Some("maximal power witness does not occur".into()));
        }
        Ok(None)
    })?);

    out.push(run("greatest s_n-power prefix is r_(n+1)", 1..=n_max, |n| {
        let s = table.s(n)?;
        let report = prefix_index(table, n)?;
        let len = prefix_power_length(&cert.word, &s)?;
        let seen = RationalIndex::from_length(len as u64, s.len() as u64);
        Ok(differ("prefix", &cert.word.prefix(len), &report.witness)
            .or_else(|| ensure(seen == report.value, || format!("index {seen} ≠ {}", report.value))))
    })?);

    Ok(out)
}

/// Every battery: block identities for `n ≤ n_max`, structural checks for
/// `n ≤ min(n_max, 6)`, and a construction comparison on `10^4` letters.
pub fn verify_suite(table: &BlockTable, n_max: i64) -> Result<Vec<CheckOutcome>> {
    let mut out = block_identities(table, n_max)?;
    out.push(construction_equivalence(table, 10_000)?);
    out.extend(partition_checks(table, n_max.min(6))?);
    out.extend(power_checks(table, n_max.clamp(1, 6))?);
    Ok(out)
}
