//! Strict standard episturmian words directed by `a_1^{d_1} a_2^{d_2} ... a_k^{d_k} a_1^{d_{k+1}} ...`
//! with every `d_i > 0`.
//!
//! The crate builds the blocks `s_n` and their companion words, partitions
//! the factors of length `|s_n|` into conjugates and singular words, tiles
//! the word by blocks, and enumerates every integer power `w^l` occurring in
//! the infinite word from closed forms. An independent brute-force scanner
//! in [`oracle`] checks the closed forms against literal prefixes.

pub mod blocks;
pub mod directive;
pub mod error;
pub mod oracle;
pub mod partition;
pub mod powers;
pub mod report;
pub mod singular;
pub mod verify;
pub mod word;

pub use blocks::{BlockTable, CancellingWord, RationalIndex};
pub use directive::{DirectiveSpec, PalindromicPrefixTable};
pub use error::{Error, Result};
pub use word::{Alphabet, Letter, Word};
