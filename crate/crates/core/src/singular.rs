//! Singular `n`-words of the `r`-th kind and the partition of the length-`|s_n|`
//! factors into `k` disjoint classes.

use std::collections::{BTreeSet, HashMap};

use crate::blocks::BlockTable;
use crate::error::{range, Error, Result};
use crate::word::{conjugacy_class, factors_of_length, reversal, strip_prefix, strip_suffix, Letter, Word};

/// The palindrome `x^{-1} G̃_{n,r} D_{n-r} G_{n,r} x^{-1}`, `x` the last letter of `G_{n,r}`.
pub fn singular_window(table: &BlockTable, n: i64, r: usize) -> Result<Word> {
    check_params(table, n, r)?;
    let k = table.k();
    let g = table.big_g(n, r)?;
    let x = Word::letter(g.last().expect("G is non-empty"));
    let g_rev = reversal(&g);
    let middle = if n >= r as i64 {
        g_rev.concat(&*table.big_d(n - r as i64)?).concat(&g)
    } else {
        // D_{n-r} = a_{k+1+n-r}^{-1} cancels the last letter of G̃_{n,r}
        let c = Word::letter(Letter::cyclic(k as i64 + 1 + n - r as i64, k));
        strip_suffix(&g_rev, &c)?.concat(&g)
    };
    let window = strip_suffix(&strip_prefix(&middle, &x)?, &x)?;

    if n < r as i64 {
        // alternate description: r_n a_{n-r+k+1} r_n
        let rn = table.r(n)?;
        let alt = rn
            .concat(&Word::letter(Letter::cyclic(n - r as i64 + k as i64 + 1, k)))
            .concat(&rn);
        if alt != window {
            return Err(Error::InvariantViolation(format!(
                "singular window for n = {n}, r = {r}: {window} disagrees with {alt}"
            )));
        }
    }
    Ok(window)
}

fn check_params(table: &BlockTable, n: i64, r: usize) -> Result<()> {
    if n < 1 {
        return range(format!("singular words need n ≥ 1, got {n}"));
    }
    if r == 0 || r >= table.k() {
        return range(format!("kind r must lie in [1, {}], got {r}", table.k() - 1));
    }
    Ok(())
}

/// `Ω_n^r`: the length-`|s_n|` factors of the singular window.
pub fn singular_words(table: &BlockTable, n: i64, r: usize) -> Result<BTreeSet<Word>> {
    let window = singular_window(table, n, r)?;
    factors_of_length(&window, table.len_s(n)? as usize)
}

/// The `k` disjoint classes of factors of length `|s_n|`.
#[derive(Debug, Clone)]
pub struct FactorPartition {
    pub n: i64,
    /// `Ω_n^0`, the conjugacy class of `s_n`.
    pub omega0: BTreeSet<Word>,
    /// `omega[r - 1]` is `Ω_n^r`.
    pub omega: Vec<BTreeSet<Word>>,
    pub source_window: Vec<Word>,
    factor_len: usize,
    lookup: HashMap<Word, usize>,
}

impl FactorPartition {
    pub fn factor_len(&self) -> usize {
        self.factor_len
    }

    /// Class index `0..k` of `w`, or `None` when `w` is not a factor.
    pub fn classify_factor(&self, w: &Word) -> Result<Option<usize>> {
        if w.len() != self.factor_len {
            return range(format!(
                "classified words must have length {}, got {}",
                self.factor_len,
                w.len()
            ));
        }
        Ok(self.lookup.get(w).copied())
    }

    /// Every class by index, `Ω_n^0` first.
    pub fn classes(&self) -> impl Iterator<Item = &BTreeSet<Word>> {
        std::iter::once(&self.omega0).chain(&self.omega)
    }

    pub fn union(&self) -> BTreeSet<Word> {
        self.classes().flatten().cloned().collect()
    }

    pub fn total(&self) -> usize {
        self.classes().map(BTreeSet::len).sum()
    }
}

/// Builds the partition and checks disjointness and class sizes before returning.
pub fn factor_partition(table: &BlockTable, n: i64) -> Result<FactorPartition> {
    if n < 1 {
        return range(format!("factor partitions need n ≥ 1, got {n}"));
    }
    let k = table.k();
    let s = table.s(n)?;
    let omega0 = conjugacy_class(&s);
    let mut omega = Vec::with_capacity(k - 1);
    let mut windows = Vec::with_capacity(k - 1);
    for r in 1..k {
        let window = singular_window(table, n, r)?;
        omega.push(factors_of_length(&window, s.len())?);
        windows.push(window);
    }

    let violation = |msg: String| Err(Error::InvariantViolation(format!("n = {n}: {msg}")));
    if omega0.len() != s.len() {
        return violation(format!("|Ω^0| = {} but |s_n| = {}", omega0.len(), s.len()));
    }
    for r in 1..k {
        let expected = table.big_g(n, r)?.len() - 1;
        if omega[r - 1].len() != expected {
            return violation(format!("|Ω^{r}| = {} but |G_(n,r)| - 1 = {expected}", omega[r - 1].len()));
        }
    }
    let mut lookup = HashMap::new();
    for (class, set) in std::iter::once(&omega0).chain(&omega).enumerate() {
        for w in set {
            if let Some(prev) = lookup.insert(w.clone(), class) {
                return violation(format!("{w} lies in classes {prev} and {class}"));
            }
        }
    }
    let expected_total = (k - 1) * s.len() + 1;
    if lookup.len() != expected_total {
        return violation(format!("{} factors, expected {expected_total}", lookup.len()));
    }
    Ok(FactorPartition {
        n,
        omega0,
        omega,
        source_window: windows,
        factor_len: s.len(),
        lookup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::is_palindrome;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn table(spec: &str) -> BlockTable {
        BlockTable::new(spec.parse().unwrap())
    }

    #[test]
    fn tribonacci_first_level() {
        let t = table("k=3; d=; 1");
        assert_eq!(singular_window(&t, 1, 1).unwrap(), w("aa"));
        assert_eq!(singular_words(&t, 1, 1).unwrap(), BTreeSet::from([w("aa")]));
        assert_eq!(singular_window(&t, 1, 2).unwrap(), w("aca"));
        assert_eq!(singular_words(&t, 1, 2).unwrap(), BTreeSet::from([w("ac"), w("ca")]));
        let p = factor_partition(&t, 1).unwrap();
        let sizes: Vec<usize> = p.classes().map(BTreeSet::len).collect();
        assert_eq!(sizes, vec![2, 1, 2]);
        assert_eq!(p.total(), 5);
        assert_eq!(p.classify_factor(&w("ab")).unwrap(), Some(0));
        assert_eq!(p.classify_factor(&w("aa")).unwrap(), Some(1));
        assert_eq!(p.classify_factor(&w("bb")).unwrap(), None);
        assert!(p.classify_factor(&w("abc")).is_err());
    }

    #[test]
    fn sturmian_singular_word() {
        // k = 2: Ω_n^1 = {w_n}, with w_2 = b s_2 a^{-1}
        let t = table("k=2; d=; 1");
        assert_eq!(singular_words(&t, 2, 1).unwrap(), BTreeSet::from([w("bab")]));
        let s2 = t.s(2).unwrap();
        assert_eq!(w("b").concat(&strip_suffix(&s2, &w("a")).unwrap()), w("bab"));
    }

    #[test]
    fn parameter_errors() {
        let t = table("k=3; d=; 1");
        assert!(singular_words(&t, 0, 1).is_err());
        assert!(singular_words(&t, 2, 3).is_err());
        assert!(factor_partition(&t, 0).is_err());
    }

    #[test]
    fn windows_are_palindromes_and_classes_reversal_closed() {
        for spec in ["k=3; d=1,1,2; 2,1,2", "k=4; d=2,1,3,1; 2,2", "k=2; d=1,2; 3", "k=5; d=; 1"] {
            let t = table(spec);
            for n in 1..=5 {
                let p = factor_partition(&t, n).unwrap();
                for window in &p.source_window {
                    assert!(is_palindrome(window));
                }
                for class in p.classes() {
                    assert!(class.iter().all(|x| class.contains(&reversal(x))), "{spec} n = {n}");
                }
                for r in 1..t.k() {
                    let expected = t.len_s(n).unwrap() as i64 - t.length_d(n - r as i64).unwrap() - 1;
                    assert_eq!(p.omega[r - 1].len() as i64, expected);
                }
            }
        }
    }

    #[test]
    fn abcca_level_three_total() {
        let t = table("k=3; d=1,1,2; 2,1,2");
        assert_eq!(factor_partition(&t, 3).unwrap().total(), 23);
    }
}
