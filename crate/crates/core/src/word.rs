//! Finite words over `a_1..a_k` and the primitive operations on them.
//!
//! Letters are stored as 1-based indices in a byte, so an alphabet holds at
//! most 255 letters. Words are rendered as `a`, `b`, `c`, ... when every
//! letter fits in the Latin alphabet, and as comma-separated `a1,a2,...`
//! tokens otherwise.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{range, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(u8);

impl Letter {
    /// The letter `a_index`. Panics if `index` is 0.
    pub fn new(index: u8) -> Letter {
        assert!(index >= 1, "letters are 1-based");
        Letter(index)
    }

    /// Letter `a_i` with `i` reduced cyclically into `1..=k`, so `a_{k+1} = a_1`.
    pub fn cyclic(i: i64, k: usize) -> Letter {
        let k = k as i64;
        Letter(((i - 1).rem_euclid(k) + 1) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 <= 26 {
            write!(f, "{}", (b'a' + self.0 - 1) as char)
        } else {
            write!(f, "a{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    k: usize,
}

impl Alphabet {
    pub fn new(k: usize) -> Result<Alphabet> {
        if !(2..=255).contains(&k) {
            return range(format!("alphabet size must lie in [2, 255], got {k}"));
        }
        Ok(Alphabet { k })
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (1..=self.k as u8).map(Letter)
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w.bytes.iter().find(|&&b| b as usize > self.k) {
            Some(b) => range(format!("letter index {b} outside alphabet of size {}", self.k)),
            None => Ok(()),
        }
    }
}

/// A finite word. The empty word is `Word::default()`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bytes: Vec<u8>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    /// Builds a word from raw 1-based letter indices.
    pub fn from_indices(indices: &[u8]) -> Result<Word> {
        if indices.contains(&0) {
            return range("letter index 0 is not a letter");
        }
        Ok(Word {
            bytes: indices.to_vec(),
        })
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        Word {
            bytes: letters.into_iter().map(|l| l.0).collect(),
        }
    }

    pub fn letter(l: Letter) -> Word {
        Word { bytes: vec![l.0] }
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// The raw 1-based letter indices.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn at(&self, i: usize) -> Letter {
        Letter(self.bytes[i])
    }

    pub fn first(&self) -> Option<Letter> {
        self.bytes.first().copied().map(Letter)
    }

    pub fn last(&self) -> Option<Letter> {
        self.bytes.last().copied().map(Letter)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.bytes.iter().copied().map(Letter)
    }

    /// `|w|_a`.
    pub fn count(&self, a: Letter) -> usize {
        self.bytes.iter().filter(|&&b| b == a.0).count()
    }

    pub fn slice(&self, r: Range<usize>) -> Word {
        Word {
            bytes: self.bytes[r].to_vec(),
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.slice(0..len.min(self.len()))
    }

    pub fn push(&mut self, l: Letter) {
        self.bytes.push(l.0);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.bytes.extend_from_slice(&other.bytes);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut bytes = Vec::with_capacity(self.len() + other.len());
        bytes.extend_from_slice(&self.bytes);
        bytes.extend_from_slice(&other.bytes);
        Word { bytes }
    }

    pub fn pow(&self, e: usize) -> Word {
        Word {
            bytes: self.bytes.repeat(e),
        }
    }

    pub fn is_prefix_of(&self, w: &Word) -> bool {
        w.bytes.starts_with(&self.bytes)
    }

    pub fn is_suffix_of(&self, w: &Word) -> bool {
        w.bytes.ends_with(&self.bytes)
    }

    pub fn is_factor_of(&self, w: &Word) -> bool {
        self.is_empty() || occurrences(w.as_bytes(), self.as_bytes()).next().is_some()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bytes.iter().all(|&b| b <= 26) {
            for &b in &self.bytes {
                write!(f, "{}", (b'a' + b - 1) as char)?;
            }
            Ok(())
        } else {
            for (i, &b) in self.bytes.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "a{b}")?;
            }
            Ok(())
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `abac` style words, or comma-separated tokens such as `a1,a27,b`.
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Word::empty());
        }
        let parse_char = |c: char| -> Result<u8> {
            if c.is_ascii_lowercase() {
                Ok(c as u8 - b'a' + 1)
            } else {
                Err(Error::Parse(format!("unexpected character {c:?} in word")))
            }
        };
        let mut bytes = Vec::new();
        if s.contains(',') {
            for tok in s.split(',').map(str::trim) {
                let mut chars = tok.chars();
                match (chars.next(), chars.as_str()) {
                    (Some('a'), rest) if !rest.is_empty() => {
                        let i: u8 = rest
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad letter token {tok:?}")))?;
                        if i == 0 {
                            return Err(Error::Parse("letter a0 does not exist".into()));
                        }
                        bytes.push(i);
                    }
                    (Some(c), "") => bytes.push(parse_char(c)?),
                    _ => return Err(Error::Parse(format!("bad letter token {tok:?}"))),
                }
            }
        } else {
            for c in s.chars() {
                bytes.push(parse_char(c)?);
            }
        }
        Ok(Word { bytes })
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn reversal(w: &Word) -> Word {
    let mut bytes = w.bytes.clone();
    bytes.reverse();
    Word { bytes }
}

pub fn is_palindrome(w: &Word) -> bool {
    let b = &w.bytes;
    b.iter().eq(b.iter().rev())
}

/// The `j`-th conjugate `x_{j+1}..x_m x_1..x_j`.
pub fn conjugate(w: &Word, j: usize) -> Result<Word> {
    if w.is_empty() || j >= w.len() {
        return range(format!("conjugate index {j} outside [0, {})", w.len()));
    }
    let mut bytes = w.bytes.clone();
    bytes.rotate_left(j);
    Ok(Word { bytes })
}

pub fn conjugacy_class(w: &Word) -> BTreeSet<Word> {
    (0..w.len())
        .map(|j| conjugate(w, j).expect("index in range"))
        .collect()
}

/// True iff `w` is not a proper power of a shorter word.
///
/// The empty word is reported as not primitive.
pub fn is_primitive(w: &Word) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    // w is a proper power iff its smallest period p divides n with p < n.
    let pi = prefix_function(&w.bytes);
    let p = n - pi[n - 1];
    p == n || !n.is_multiple_of(p)
}

/// `p^{-1} w`.
pub fn strip_prefix(w: &Word, p: &Word) -> Result<Word> {
    match w.bytes.strip_prefix(p.bytes.as_slice()) {
        Some(rest) => Ok(Word {
            bytes: rest.to_vec(),
        }),
        None => Err(Error::Cancellation(format!("{p} is not a prefix of {w}"))),
    }
}

/// `w s^{-1}`.
pub fn strip_suffix(w: &Word, s: &Word) -> Result<Word> {
    match w.bytes.strip_suffix(s.bytes.as_slice()) {
        Some(rest) => Ok(Word {
            bytes: rest.to_vec(),
        }),
        None => Err(Error::Cancellation(format!("{s} is not a suffix of {w}"))),
    }
}

/// All distinct factors of length `n`.
pub fn factors_of_length(w: &Word, n: usize) -> Result<BTreeSet<Word>> {
    if n > w.len() {
        return range(format!("factor length {n} exceeds word length {}", w.len()));
    }
    let seen: HashSet<&[u8]> = w.bytes.windows(n.max(1)).collect();
    if n == 0 {
        return Ok(BTreeSet::from([Word::empty()]));
    }
    Ok(seen.into_iter().map(|b| Word { bytes: b.to_vec() }).collect())
}

/// Length of the longest palindromic suffix of `w`.
///
/// A suffix `v` of `w` is a palindrome iff it equals a prefix of `reversal(w)`,
/// so this is the longest border of `reversal(w) # w`.
pub fn longest_palindromic_suffix_len(w: &Word) -> usize {
    if w.is_empty() {
        return 0;
    }
    let mut text = Vec::with_capacity(2 * w.len() + 1);
    text.extend(w.bytes.iter().rev());
    text.push(0);
    text.extend_from_slice(&w.bytes);
    *prefix_function(&text).last().expect("non-empty")
}

/// Every split point `i` in `[0, |w|)` such that `w[..i]` and `w[i..]` are both palindromes.
pub fn palindrome_pair_splits(w: &Word) -> Vec<usize> {
    let n = w.len();
    let pal_prefix = palindromic_prefix_flags(&w.bytes);
    let rev: Vec<u8> = w.bytes.iter().rev().copied().collect();
    let pal_suffix = palindromic_prefix_flags(&rev);
    (0..n)
        .filter(|&i| pal_prefix[i] && pal_suffix[n - i])
        .collect()
}

/// `flags[len]` is true iff `b[..len]` is a palindrome, for `len` in `0..=|b|`.
fn palindromic_prefix_flags(b: &[u8]) -> Vec<bool> {
    let n = b.len();
    let mut flags = vec![false; n + 1];
    flags[0] = true;
    if n == 0 {
        return flags;
    }
    // Palindromic prefixes of b are exactly the borders of b # reversal(b).
    let mut text = Vec::with_capacity(2 * n + 1);
    text.extend_from_slice(b);
    text.push(0);
    text.extend(b.iter().rev());
    let pi = prefix_function(&text);
    let mut len = pi[2 * n];
    while len > 0 {
        flags[len] = true;
        len = pi[len - 1];
    }
    flags
}

/// Knuth-Morris-Pratt failure function.
pub fn prefix_function(s: &[u8]) -> Vec<usize> {
    let mut pi = vec![0; s.len()];
    for i in 1..s.len() {
        let mut j = pi[i - 1];
        while j > 0 && s[i] != s[j] {
            j = pi[j - 1];
        }
        if s[i] == s[j] {
            j += 1;
        }
        pi[i] = j;
    }
    pi
}

/// Z-array: `z[i]` is the length of the longest common prefix of `s` and `s[i..]`.
pub fn z_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = z[i - l].min(r - i);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// Start positions of `pattern` in `text`, ascending. `pattern` must be non-empty.
pub fn occurrences<'a>(text: &'a [u8], pattern: &'a [u8]) -> impl Iterator<Item = usize> + 'a {
    assert!(!pattern.is_empty());
    let pi = prefix_function(pattern);
    let m = pattern.len();
    let mut j = 0;
    text.iter().enumerate().filter_map(move |(i, &c)| {
        while j > 0 && (j == m || c != pattern[j]) {
            j = pi[j - 1];
        }
        if c == pattern[j] {
            j += 1;
        }
        (j == m).then(|| i + 1 - m)
    })
}
