//! The building blocks `s_n`, the palindromic prefixes `D_n`, the tails
//! `G_{n,r}`, the words `t_n` and `r_n`, and the integer sequences
//! `L_n`, `Q_n`, `P_n` of one directive.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::directive::{DirectiveSpec, MAX_WORD_LEN};
use crate::error::{range, Error, Result};
use crate::word::{strip_prefix, strip_suffix, Letter, Word};

/// Default cap on the block level `n`.
pub const DEFAULT_LEVEL_GUARD: usize = 64;

/// Exact rational `whole + num/den` with `0 ≤ num < den`.
///
/// The fraction is kept against the given denominator (typically `|s_n|`),
/// never reduced. Equality and ordering compare rational values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RationalIndex {
    pub whole: u64,
    pub num: u64,
    pub den: u64,
}

impl RationalIndex {
    /// `whole + num/den` where `num` may be negative or exceed `den`; normalized into range.
    pub fn new(whole: i64, num: i64, den: u64) -> Result<RationalIndex> {
        if den == 0 {
            return range("denominator must be positive");
        }
        let total = whole as i128 * den as i128 + num as i128;
        if total < 0 {
            return range("index must be non-negative");
        }
        Ok(Self::from_length(total as u64, den))
    }

    /// The exponent of a fractional power of total length `len` over a base of length `den`.
    pub fn from_length(len: u64, den: u64) -> RationalIndex {
        RationalIndex {
            whole: len / den,
            num: len % den,
            den,
        }
    }

    pub fn floor(&self) -> u64 {
        self.whole
    }

    fn numerator(&self) -> u128 {
        self.whole as u128 * self.den as u128 + self.num as u128
    }
}

impl PartialEq for RationalIndex {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RationalIndex {}

impl PartialOrd for RationalIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numerator() * other.den as u128).cmp(&(other.numerator() * self.den as u128))
    }
}

impl fmt::Display for RationalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "{}", self.whole)
        } else {
            write!(f, "{} + {}/{}", self.whole, self.num, self.den)
        }
    }
}

/// A word preceded by a formal inverse letter: `c^{-1} · body`.
///
/// It only becomes a word after something ending in `c` is placed in front
/// of it; [`CancellingWord::after`] performs that checked cancellation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellingWord {
    pub cancel: Option<Letter>,
    pub body: Word,
}

impl CancellingWord {
    /// `w · c^{-1} · body`.
    pub fn after(&self, w: &Word) -> Result<Word> {
        let head = match self.cancel {
            Some(c) => strip_suffix(w, &Word::letter(c))?,
            None => w.clone(),
        };
        Ok(head.concat(&self.body))
    }

    /// The plain word, when no cancellation is pending.
    pub fn to_word(&self) -> Result<Word> {
        match self.cancel {
            None => Ok(self.body.clone()),
            Some(c) => Err(Error::Cancellation(format!("{c}^-1 has nothing to cancel against"))),
        }
    }

    /// Signed length: `|body| − 1` when a letter is pending cancellation.
    pub fn len(&self) -> i64 {
        self.body.len() as i64 - i64::from(self.cancel.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Memoized block data for one directive. Safe to share across threads.
#[derive(Debug)]
pub struct BlockTable {
    spec: DirectiveSpec,
    max_level: usize,
    /// `s[i]` holds `s_{i+1-k}`.
    s: RwLock<Vec<Arc<Word>>>,
    d: RwLock<HashMap<usize, Arc<Word>>>,
}

impl BlockTable {
    pub fn new(spec: DirectiveSpec) -> BlockTable {
        Self::with_guard(spec, DEFAULT_LEVEL_GUARD)
    }

    pub fn with_guard(spec: DirectiveSpec, max_level: usize) -> BlockTable {
        let k = spec.k();
        // seeds s_{1-k} = a_2, ..., s_{-1} = a_k, s_0 = a_1
        let seeds = (1..=k)
            .map(|i| Arc::new(Word::letter(Letter::cyclic(i as i64 + 1, k))))
            .collect();
        BlockTable {
            spec,
            max_level,
            s: RwLock::new(seeds),
            d: RwLock::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &DirectiveSpec {
        &self.spec
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    fn check_level(&self, n: i64) -> Result<()> {
        if n > self.max_level as i64 {
            return Err(Error::Resource(format!(
                "block level {n} exceeds the guard {}",
                self.max_level
            )));
        }
        Ok(())
    }

    /// `d_i` with `d_i = 0` for `i ≤ 0`.
    pub fn d(&self, i: i64) -> Result<usize> {
        self.spec.d(i)
    }

    pub fn big_l(&self, n: usize) -> Result<usize> {
        self.spec.partial_sum(n)
    }

    /// `Q_n = |s_n|` from its recurrence, `n ≥ 0`.
    pub fn q(&self, n: usize) -> Result<u64> {
        self.sequence(n, 1)
    }

    /// `P_n` from its recurrence, `n ≥ 0`. Equals `|s_n| − |s_n|_{a_1}`.
    pub fn p(&self, n: usize) -> Result<u64> {
        self.sequence(n, 0)
    }

    fn sequence(&self, n: usize, first: u64) -> Result<u64> {
        self.check_level(n as i64)?;
        let k = self.k();
        let overflow = || Error::Resource(format!("sequence value at level {n} overflows"));
        let mut v: Vec<u64> = vec![first];
        for m in 1..=n {
            let mut acc: u64 = 0;
            if m < k {
                // d_m v_{m-1} + ... + d_1 v_0 + 1
                for j in 1..=m {
                    let term = (self.spec.exponent(m - j + 1)? as u64)
                        .checked_mul(v[m - j])
                        .ok_or_else(overflow)?;
                    acc = acc.checked_add(term).ok_or_else(overflow)?;
                }
                acc = acc.checked_add(1).ok_or_else(overflow)?;
            } else {
                // d_m v_{m-1} + ... + d_{m+2-k} v_{m+1-k} + v_{m-k}
                for j in 1..k {
                    let term = (self.spec.exponent(m - j + 1)? as u64)
                        .checked_mul(v[m - j])
                        .ok_or_else(overflow)?;
                    acc = acc.checked_add(term).ok_or_else(overflow)?;
                }
                acc = acc.checked_add(v[m - k]).ok_or_else(overflow)?;
            }
            v.push(acc);
        }
        Ok(v[n])
    }

    /// `|s_n|` for `n ≥ 1 − k`.
    pub fn len_s(&self, n: i64) -> Result<u64> {
        if n < 1 - self.k() as i64 {
            return range(format!("s_{n} is undefined below index {}", 1 - self.k() as i64));
        }
        if n <= 0 {
            return Ok(1);
        }
        self.q(n as usize)
    }

    /// `s_n` for `n ≥ 1 − k`.
    pub fn s(&self, n: i64) -> Result<Arc<Word>> {
        let k = self.k() as i64;
        if n < 1 - k {
            return range(format!("s_{n} is undefined below index {}", 1 - k));
        }
        self.check_level(n)?;
        let idx = (n + k - 1) as usize;
        if let Some(w) = self.s.read().expect("lock").get(idx) {
            return Ok(Arc::clone(w));
        }
        let len = self.q(n as usize)?;
        if len > MAX_WORD_LEN as u64 {
            return Err(Error::Resource(format!("|s_{n}| = {len} exceeds the word-length guard")));
        }
        let mut memo = self.s.write().expect("lock");
        while memo.len() <= idx {
            let m = memo.len() as i64 + 1 - k;
            // s_m = s_{m-1}^{d_m} ... s_{m-k+1}^{d_{m-k+2}} s_{m-k}, with d_i = 0 for i ≤ 0
            let mut w = Word::empty();
            for j in 1..k {
                let e = self.spec.d(m - j + 1)?;
                let block = &memo[(m - j + k - 1) as usize];
                for _ in 0..e {
                    w.extend_from(block);
                }
            }
            w.extend_from(&memo[(m - 1) as usize]);
            memo.push(Arc::new(w));
        }
        Ok(Arc::clone(&memo[idx]))
    }

    /// One step of the block recurrence: `s_m` as `(level, exponent)` factors, zero exponents dropped.
    pub fn expansion(&self, m: i64) -> Result<Vec<(i64, usize)>> {
        if m < 1 {
            return range(format!("s_{m} is a seed and has no expansion"));
        }
        let k = self.k() as i64;
        let mut parts = Vec::with_capacity(k as usize);
        for j in 1..k {
            let e = self.spec.d(m - j + 1)?;
            if e > 0 {
                parts.push((m - j, e));
            }
        }
        parts.push((m - k, 1));
        Ok(parts)
    }

    /// `D_n = s_n^{d_{n+1}-1} s_{n-1}^{d_n} ... s_0^{d_1}` for `n ≥ 0`.
    pub fn big_d(&self, n: i64) -> Result<Arc<Word>> {
        if n < 0 {
            return range(format!(
                "D_{n} is a formal inverse; use length_d or the letter-cancellation forms"
            ));
        }
        let n = n as usize;
        if let Some(w) = self.d.read().expect("lock").get(&n) {
            return Ok(Arc::clone(w));
        }
        let len = self.length_d(n as i64)?;
        if len > MAX_WORD_LEN as i64 {
            return Err(Error::Resource(format!("|D_{n}| exceeds the word-length guard")));
        }
        let mut parts = Vec::with_capacity(n + 1);
        parts.push((self.s(n as i64)?, self.spec.exponent(n + 1)? - 1));
        for j in (0..n).rev() {
            parts.push((self.s(j as i64)?, self.spec.exponent(j + 1)?));
        }
        let mut w = Word::empty();
        for (block, e) in parts {
            for _ in 0..e {
                w.extend_from(&block);
            }
        }
        let w = Arc::new(w);
        self.d.write().expect("lock").insert(n, Arc::clone(&w));
        Ok(w)
    }

    /// `|D_n|` for `n ≥ −k`, with the convention `|D_{−j}| = −1`.
    pub fn length_d(&self, n: i64) -> Result<i64> {
        let k = self.k() as i64;
        if n < -k {
            return range(format!("|D_{n}| is undefined below index {}", -k));
        }
        if n < 0 {
            return Ok(-1);
        }
        let n = n as usize;
        let mut len = (self.spec.exponent(n + 1)? as i64 - 1) * self.q(n)? as i64;
        for j in 0..n {
            len += self.spec.exponent(j + 1)? as i64 * self.q(j)? as i64;
        }
        Ok(len)
    }

    /// `G_{n,r}` for `n ≥ 0`, `1 ≤ r ≤ k − 1`: the tail in `s_n = D_{n-r} G_{n,r}`.
    pub fn big_g(&self, n: i64, r: usize) -> Result<Word> {
        let k = self.k();
        if r == 0 || r >= k {
            return range(format!("G_(n,r) needs 1 ≤ r ≤ {}, got r = {r}", k - 1));
        }
        if n < 0 {
            return range("G_(n,r) needs n ≥ 0");
        }
        let s = self.s(n)?;
        if n >= r as i64 {
            strip_prefix(&s, &*self.big_d(n - r as i64)?)
        } else {
            // G_{n,r} = a_{k+1+n-r} s_n
            let mut w = Word::letter(Letter::cyclic(k as i64 + 1 + n - r as i64, k));
            w.extend_from(&s);
            Ok(w)
        }
    }

    /// `t_n = D_{n-k+1} G_{n+1,k-1}`; for `n ≤ k − 2` the leading `D` is the formal `a_{n+2}^{-1}`.
    pub fn t(&self, n: i64) -> Result<CancellingWord> {
        let k = self.k() as i64;
        if n < 0 {
            return range("t_n needs n ≥ 0");
        }
        let g = self.big_g(n + 1, self.k() - 1)?;
        if n - k + 1 >= 0 {
            Ok(CancellingWord {
                cancel: None,
                body: self.big_d(n - k + 1)?.concat(&g),
            })
        } else {
            Ok(CancellingWord {
                cancel: Some(Letter::cyclic(n + 2, self.k())),
                body: g,
            })
        }
    }

    /// `r_n = s_{n-1} D_{n-1}`, with `r_0 = ε`.
    pub fn r(&self, n: i64) -> Result<Word> {
        match n {
            n if n < 0 => range("r_n needs n ≥ 0"),
            0 => Ok(Word::empty()),
            n => Ok(self.s(n - 1)?.concat(&*self.big_d(n - 1)?)),
        }
    }

    /// The smallest `n ≥ 1` with `|s_n| ≤ m < |s_{n+1}|`, or `None` when `m < |s_1|`.
    pub fn level_of_length(&self, m: u64) -> Result<Option<usize>> {
        if m < self.q(1)? {
            return Ok(None);
        }
        let mut n = 1;
        while self.q(n + 1)? <= m {
            n += 1;
        }
        Ok(Some(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn table(spec: &str) -> BlockTable {
        BlockTable::new(spec.parse().unwrap())
    }

    #[test]
    fn blocks_of_worked_examples() {
        let tri = table("k=3; d=; 1");
        assert_eq!(*tri.s(4).unwrap(), w("abacabaabacab"));
        assert_eq!(*tri.s(-2).unwrap(), w("b"));
        assert_eq!(*tri.s(-1).unwrap(), w("c"));
        assert_eq!(*tri.s(0).unwrap(), w("a"));
        assert!(matches!(tri.s(-3), Err(Error::Range(_))));

        let ab = table("k=3; d=1,1,2; 2,1,2");
        assert_eq!(*ab.s(1).unwrap(), w("ab"));
        assert_eq!(*ab.s(2).unwrap(), w("abac"));
        assert_eq!(*ab.s(3).unwrap(), w("abacabacaba"));
        assert_eq!(*ab.s(4).unwrap(), w("abacabacabaabacabacabaabacabacab"));
        assert_eq!(
            *ab.s(5).unwrap(),
            w("abacabacabaabacabacabaabacabacababacabacabaabacabacabaabac")
        );
        assert_eq!(ab.s(5).unwrap().len(), 58);
    }

    #[test]
    fn palindromic_prefixes_d() {
        let ab = table("k=3; d=1,1,2; 2,1,2");
        assert_eq!(*ab.big_d(0).unwrap(), Word::empty());
        assert_eq!(*ab.big_d(1).unwrap(), w("a"));
        assert_eq!(*ab.big_d(2).unwrap(), w("abacaba"));
        assert_eq!(*ab.big_d(3).unwrap(), w("abacabacabaabacabacaba"));
        assert_eq!(ab.length_d(3).unwrap(), 22);
        assert!(ab.big_d(-1).is_err());
        let tri = table("k=3; d=; 1");
        assert_eq!(*tri.big_d(3).unwrap(), w("abacaba"));
        assert_eq!(*tri.big_d(2).unwrap(), w("aba"));
        assert_eq!(tri.length_d(-2).unwrap(), -1);
        assert_eq!(tri.length_d(-3).unwrap(), -1);
        assert!(tri.length_d(-4).is_err());
        for n in 0..=8 {
            assert_eq!(tri.length_d(n).unwrap(), tri.big_d(n).unwrap().len() as i64);
        }
    }

    #[test]
    fn d_zero_is_power_of_first_letter() {
        let t = table("k=2; d=4; 1");
        assert_eq!(*t.big_d(0).unwrap(), w("aaa"));
    }

    #[test]
    fn tails_g() {
        let tri = table("k=3; d=; 1");
        assert_eq!(tri.big_g(4, 1).unwrap(), w("abacab"));
        assert_eq!(tri.big_g(4, 2).unwrap(), w("cabaabacab"));
        assert_eq!(tri.big_g(1, 2).unwrap(), w("cab"));
        assert!(tri.big_g(4, 0).is_err());
        assert!(tri.big_g(4, 3).is_err());
    }

    #[test]
    fn t_and_r_words() {
        let ab = table("k=3; d=1,1,2; 2,1,2");
        assert_eq!(ab.r(0).unwrap(), Word::empty());
        let r4 = ab.r(4).unwrap();
        assert_eq!(r4.len(), 33);
        assert_eq!(r4, ab.s(3).unwrap().concat(&ab.big_d(3).unwrap()));
        let tri = table("k=3; d=; 1");
        assert_eq!(tri.t(3).unwrap().to_word().unwrap(), w("acabaabacab"));
    }

    #[test]
    fn t_satisfies_block_factorization() {
        // s_{n+1} s_n = s_n^{d_{n+1}+1} t_{n-1} for n ≥ 1
        for spec in ["k=3; d=; 1", "k=3; d=1,1,2; 2,1,2", "k=2; d=1,2; 3", "k=4; d=2,1,3,1; 2,2", "k=5; d=; 1"] {
            let t = table(spec);
            for n in 1..=9i64 {
                let lhs = t.s(n + 1).unwrap().concat(&t.s(n).unwrap());
                let head = t.s(n).unwrap().pow(t.d(n + 1).unwrap() + 1);
                assert_eq!(t.t(n - 1).unwrap().after(&head).unwrap(), lhs, "{spec} n = {n}");
            }
        }
    }

    #[test]
    fn integer_sequences() {
        let tri = table("k=3; d=; 1");
        assert_eq!((tri.q(0).unwrap(), tri.p(0).unwrap()), (1, 0));
        assert_eq!((tri.q(4).unwrap(), tri.p(4).unwrap()), (13, 6));
        assert_eq!(tri.s(4).unwrap().count(Letter::new(1)), 7);
        // k = 2, all d_i = 1: Fibonacci denominators
        let fib = table("k=2; d=; 1");
        let (mut a, mut b) = (1u64, 2u64);
        assert_eq!(fib.q(0).unwrap(), 1);
        for n in 1..=10 {
            assert_eq!(fib.q(n).unwrap(), b);
            assert_eq!(fib.s(n as i64).unwrap().len() as u64, b);
            (a, b) = (b, a + b);
        }
    }

    #[test]
    fn guard_is_enforced() {
        let t = BlockTable::with_guard("k=3; d=; 1".parse().unwrap(), 5);
        assert!(t.s(5).is_ok());
        assert!(matches!(t.s(6), Err(Error::Resource(_))));
        let big = BlockTable::with_guard("k=2; d=; 50".parse().unwrap(), 60);
        assert!(matches!(big.s(12), Err(Error::Resource(_))));
    }

    #[test]
    fn level_lookup() {
        let tri = table("k=3; d=; 1");
        assert_eq!(tri.level_of_length(1).unwrap(), None);
        assert_eq!(tri.level_of_length(2).unwrap(), Some(1));
        assert_eq!(tri.level_of_length(3).unwrap(), Some(1));
        assert_eq!(tri.level_of_length(13).unwrap(), Some(4));
    }

    #[test]
    fn rational_index() {
        let a = RationalIndex::new(3, 1, 13).unwrap();
        assert_eq!(a.to_string(), "3 + 1/13");
        assert_eq!(RationalIndex::new(4, 0, 11).unwrap(), RationalIndex::new(2, 22, 11).unwrap());
        let b = RationalIndex::new(2, -1, 2).unwrap();
        assert_eq!((b.whole, b.num, b.den), (1, 1, 2));
        assert!(a > b);
        assert_eq!(RationalIndex::from_length(40, 13), a);
    }

    #[test]
    fn concurrent_reads_agree() {
        let t = Arc::new(table("k=3; d=1,1,2; 2,1,2"));
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let t = Arc::clone(&t);
                std::thread::spawn(move || {
                    let n = 3 + (i % 5) as i64;
                    (n, (*t.s(n).unwrap()).clone(), (*t.big_d(n).unwrap()).clone())
                })
            })
            .collect();
        for h in handles {
            let (n, s, d) = h.join().unwrap();
            assert_eq!(s, *t.s(n).unwrap());
            assert_eq!(d, *t.big_d(n).unwrap());
        }
    }
}
