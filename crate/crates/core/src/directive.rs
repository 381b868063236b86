//! Directive words `Δ = a_1^{d_1} a_2^{d_2} ... a_k^{d_k} a_1^{d_{k+1}} ...` and the
//! generic standard-episturmian construction: palindromic closure, the
//! morphisms `Ψ_a`, and the words `h_n = μ_n(x_{n+1})` and `u_n`.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{range, Error, Result};
use crate::word::{longest_palindromic_suffix_len, Alphabet, Letter, Word};

/// Upper bound on the length of any word materialized by the library.
pub const MAX_WORD_LEN: usize = 1 << 28;

/// An eventually periodic (or explicitly finite) sequence of positive exponents
/// `d_1, d_2, ...` over a `k`-letter alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectiveSpec {
    alphabet: Alphabet,
    preperiod: Vec<usize>,
    /// Empty for a finite specification; indices past the preperiod are then range errors.
    period: Vec<usize>,
}

impl DirectiveSpec {
    pub fn periodic(k: usize, preperiod: Vec<usize>, period: Vec<usize>) -> Result<DirectiveSpec> {
        if period.is_empty() {
            return range("period must be non-empty");
        }
        Self::build(k, preperiod, period)
    }

    /// A finite list of exponents. With `repeat_last`, the final exponent repeats forever.
    pub fn finite(k: usize, exponents: Vec<usize>, repeat_last: bool) -> Result<DirectiveSpec> {
        if repeat_last {
            let mut pre = exponents;
            let last = pre
                .pop()
                .ok_or_else(|| Error::Range("cannot repeat the last of zero exponents".into()))?;
            return Self::build(k, pre, vec![last]);
        }
        Self::build(k, exponents, Vec::new())
    }

    fn build(k: usize, preperiod: Vec<usize>, period: Vec<usize>) -> Result<DirectiveSpec> {
        let alphabet = Alphabet::new(k)?;
        if preperiod.iter().chain(&period).any(|&d| d == 0) {
            return range("every exponent d_i must be positive");
        }
        Ok(DirectiveSpec {
            alphabet,
            preperiod,
            period,
        })
    }

    /// The k-bonacci directive `(a_1 a_2 ... a_k)^ω`.
    pub fn k_bonacci(k: usize) -> Result<DirectiveSpec> {
        Self::periodic(k, Vec::new(), vec![1])
    }

    pub fn k(&self) -> usize {
        self.alphabet.size()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn preperiod(&self) -> &[usize] {
        &self.preperiod
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// `d_i` for `i ≥ 1`.
    pub fn exponent(&self, i: usize) -> Result<usize> {
        if i == 0 {
            return range("exponents are indexed from 1");
        }
        let j = i - 1;
        if j < self.preperiod.len() {
            return Ok(self.preperiod[j]);
        }
        if self.period.is_empty() {
            return range(format!(
                "d_{i} requested but the finite specification has only {} exponents",
                self.preperiod.len()
            ));
        }
        Ok(self.period[(j - self.preperiod.len()) % self.period.len()])
    }

    /// `d_i` extended by `d_i = 0` for `i ≤ 0`.
    pub fn d(&self, i: i64) -> Result<usize> {
        if i <= 0 {
            Ok(0)
        } else {
            self.exponent(i as usize)
        }
    }

    /// `L_n = d_1 + ... + d_n`, with `L_0 = 0`.
    pub fn partial_sum(&self, n: usize) -> Result<usize> {
        let mut sum = 0usize;
        for i in 1..=n {
            sum = sum
                .checked_add(self.exponent(i)?)
                .ok_or_else(|| Error::Resource("L_n overflows".into()))?;
        }
        Ok(sum)
    }

    /// The run index `j` with `L_{j-1} < i ≤ L_j`.
    fn run_of(&self, i: usize) -> Result<usize> {
        if i == 0 {
            return range("directive positions are indexed from 1");
        }
        let mut acc = 0;
        for (j, &d) in self.preperiod.iter().enumerate() {
            acc += d;
            if i <= acc {
                return Ok(j + 1);
            }
        }
        if self.period.is_empty() {
            return range(format!("directive position {i} lies beyond the finite specification"));
        }
        let cycle: usize = self.period.iter().sum();
        let rest = i - acc;
        let cycles = (rest - 1) / cycle;
        let mut acc = cycles * cycle;
        for (j, &d) in self.period.iter().enumerate() {
            acc += d;
            if rest <= acc {
                return Ok(self.preperiod.len() + cycles * self.period.len() + j + 1);
            }
        }
        unreachable!("position lies within one period")
    }

    /// `x_i`, the `i`-th letter of `Δ`.
    pub fn directive_letter(&self, i: usize) -> Result<Letter> {
        let j = self.run_of(i)?;
        Ok(Letter::cyclic(j as i64, self.k()))
    }

    /// `P(n) = sup{p < n : x_p = x_n}`, or `None` when no earlier occurrence exists.
    pub fn pos_prev(&self, n: usize) -> Result<Option<usize>> {
        let j = self.run_of(n)?;
        let run_start = self.partial_sum(j - 1)? + 1;
        if n > run_start {
            return Ok(Some(n - 1));
        }
        if j > self.k() {
            Ok(Some(self.partial_sum(j - self.k())?))
        } else {
            Ok(None)
        }
    }

    /// `S(n) = inf{p > n : x_p = x_n}`. Always defined for periodic specifications.
    pub fn pos_next(&self, n: usize) -> Result<Option<usize>> {
        let j = self.run_of(n)?;
        let run_end = self.partial_sum(j)?;
        if n < run_end {
            return Ok(Some(n + 1));
        }
        match self.partial_sum(j + self.k() - 1) {
            Ok(l) => Ok(Some(l + 1)),
            Err(Error::Range(_)) if self.is_finite() => Ok(None),
            Err(e) => Err(e),
        }
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for DirectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}; d={}", self.k(), join(&self.preperiod))?;
        if !self.period.is_empty() {
            write!(f, "; {}", join(&self.period))?;
        }
        Ok(())
    }
}

impl FromStr for DirectiveSpec {
    type Err = Error;

    /// Parses `k=<int>; d=<list>[; <period list>]`, e.g. `k=3; d=1,1,2; 2,1,2`.
    fn from_str(s: &str) -> Result<DirectiveSpec> {
        let parts: Vec<&str> = s.split(';').map(str::trim).collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(Error::Parse(format!(
                "expected `k=<int>; d=<list>[; <list>]`, got {s:?}"
            )));
        }
        let k = parts[0]
            .strip_prefix("k=")
            .ok_or_else(|| Error::Parse("missing `k=`".into()))?
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad alphabet size: {e}")))?;
        let pre = parts[1]
            .strip_prefix("d=")
            .ok_or_else(|| Error::Parse("missing `d=`".into()))?;
        let list = |text: &str| -> Result<Vec<usize>> {
            let text = text.trim();
            if text.is_empty() {
                return Ok(Vec::new());
            }
            text.split(',')
                .map(|t| {
                    let d = t
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad exponent {t:?}: {e}")))?;
                    if d == 0 {
                        Err(Error::Parse("exponents must be positive (d_i > 0)".into()))
                    } else {
                        Ok(d)
                    }
                })
                .collect()
        };
        let pre = list(pre)?;
        let built = if parts.len() == 3 {
            let period = list(parts[2])?;
            if period.is_empty() {
                return Err(Error::Parse("period list is empty".into()));
            }
            DirectiveSpec::periodic(k, pre, period)
        } else {
            if pre.is_empty() {
                return Err(Error::Parse("no exponents given".into()));
            }
            DirectiveSpec::finite(k, pre, false)
        };
        built.map_err(|e| match e {
            Error::Range(msg) => Error::Parse(msg),
            other => other,
        })
    }
}

/// The shortest palindrome having `w` as a prefix.
pub fn palindromic_closure(w: &Word) -> Word {
    let keep = w.len() - longest_palindromic_suffix_len(w);
    let mut out = w.clone();
    for i in (0..keep).rev() {
        out.push(w.at(i));
    }
    out
}

/// The morphism `Ψ_a`: `a ↦ a`, `x ↦ ax` for `x ≠ a`.
pub fn psi(a: Letter, w: &Word) -> Word {
    let mut out = Word::empty();
    for x in w.letters() {
        if x != a {
            out.push(a);
        }
        out.push(x);
    }
    out
}

/// Memoized palindromic prefixes `u_n` and words `h_n` of one directive.
///
/// `u_n` is built by iterated palindromic closure and `h_n` by composing the
/// morphisms `Ψ_{x_i}`; the two constructions never consult each other.
#[derive(Debug)]
pub struct PalindromicPrefixTable {
    spec: DirectiveSpec,
    /// `u[i]` holds `u_{i+1}`.
    u: Mutex<Vec<Arc<Word>>>,
}

impl PalindromicPrefixTable {
    pub fn new(spec: DirectiveSpec) -> Self {
        PalindromicPrefixTable {
            spec,
            u: Mutex::new(vec![Arc::new(Word::empty())]),
        }
    }

    pub fn spec(&self) -> &DirectiveSpec {
        &self.spec
    }

    /// `u_n` for `n ≥ 1`; `u_1 = ε`, `u_{n+1} = (u_n x_n)^{(+)}`.
    pub fn u(&self, n: usize) -> Result<Arc<Word>> {
        if n == 0 {
            return range("u_n is indexed from 1");
        }
        let mut memo = self.u.lock().expect("memo lock poisoned");
        while memo.len() < n {
            let i = memo.len();
            let last = memo.last().expect("u_1 seeded");
            if last.len() >= MAX_WORD_LEN / 2 {
                return Err(Error::Resource(format!("u_{} exceeds the word-length guard", i + 1)));
            }
            let mut w = (**last).clone();
            w.push(self.spec.directive_letter(i)?);
            memo.push(Arc::new(palindromic_closure(&w)));
        }
        Ok(Arc::clone(&memo[n - 1]))
    }

    /// `h_n = μ_n(x_{n+1})` with `μ_n = Ψ_{x_1} ∘ ... ∘ Ψ_{x_n}`.
    pub fn h(&self, n: usize) -> Result<Word> {
        h_word(&self.spec, n)
    }

    /// The length-`len` prefix of the limit of the `u_n`.
    pub fn prefix(&self, len: usize) -> Result<Word> {
        let mut n = 1;
        loop {
            let u = self.u(n)?;
            if u.len() >= len {
                return Ok(u.prefix(len));
            }
            n += 1;
        }
    }
}

/// `h_n = μ_n(x_{n+1})`, computed by applying `Ψ_{x_n}`, then `Ψ_{x_{n-1}}`, ..., then `Ψ_{x_1}`.
pub fn h_word(spec: &DirectiveSpec, n: usize) -> Result<Word> {
    let mut w = Word::letter(spec.directive_letter(n + 1)?);
    for i in (1..=n).rev() {
        let a = spec.directive_letter(i)?;
        let grown = w.len() + w.letters().filter(|&x| x != a).count();
        if grown > MAX_WORD_LEN {
            return Err(Error::Resource(format!("h_{n} exceeds the word-length guard")));
        }
        w = psi(a, &w);
    }
    Ok(w)
}

/// `u_n` without memoization.
pub fn u_word(spec: &DirectiveSpec, n: usize) -> Result<Word> {
    PalindromicPrefixTable::new(spec.clone())
        .u(n)
        .map(|w| (*w).clone())
}
