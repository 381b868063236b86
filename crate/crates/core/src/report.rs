//! Structured command results shared by the text and JSON-lines front ends.
//!
//! A [`Report`] carries a one-line statement of the law a command exercises,
//! a typed payload, and an optional comparison against the brute-force oracle.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::blocks::{BlockTable, RationalIndex};
use crate::error::{range, Error, Result};
use crate::oracle::{certify_prefix, generate_prefix, max_fractional_power, prefix_power_length, stable_factor_set};
use crate::partition::{n_partition, regroup, PartitionItem};
use crate::powers::{block_index, census, census_range, prefix_index, CensusCase, PowerCensus};
use crate::singular::factor_partition;
use crate::verify::{verify_suite, CheckOutcome};
use crate::word::Word;

/// Words listed per class or row unless the full listing is requested.
pub const TRUNCATE_WORDS: usize = 8;
/// Partition items listed unless the full listing is requested.
pub const TRUNCATE_ITEMS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Mismatch,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub method: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelWord {
    pub level: i64,
    pub length: usize,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GWord {
    pub r: usize,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlocksPayload {
    pub n: i64,
    pub s: LevelWord,
    pub q: u64,
    pub p: u64,
    pub big_l: usize,
    pub d_next: usize,
    pub big_d: Vec<LevelWord>,
    pub big_g: Vec<GWord>,
    pub block_index: Option<RationalIndex>,
    pub prefix_index: Option<RationalIndex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPayload {
    pub r: usize,
    pub size: usize,
    pub words: Vec<Word>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPayload {
    pub n: i64,
    pub factor_length: usize,
    pub total: usize,
    pub classes: Vec<ClassPayload>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPayload {
    pub n: i64,
    pub upto_level: i64,
    pub covered_prefix_length: usize,
    pub item_count: usize,
    pub items: Vec<PartitionItem>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexPayload {
    pub n: i64,
    pub block_index: RationalIndex,
    pub block_witness_length: usize,
    pub prefix_index: RationalIndex,
    pub prefix_witness_length: usize,
    pub prefix_witness: Option<Word>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub i: usize,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub m: u64,
    pub l: usize,
    pub count: usize,
    pub case: String,
    pub window: Option<usize>,
    pub representations: Vec<Representation>,
    pub extension: bool,
    pub formal_overridden: bool,
    /// `first c conjugates of <expr>`, absent when the count is zero.
    pub witnesses: Option<String>,
    pub base: Option<Word>,
    pub words: Vec<Word>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub m_max: u64,
    pub l: usize,
    pub nonzero_lengths: Vec<u64>,
    pub zero_off_grid: u64,
    pub zero_on_grid: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckPayload {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Prefix { length: usize, word: Word },
    Blocks(BlocksPayload),
    Singular(SingularPayload),
    Partition(PartitionPayload),
    Index(IndexPayload),
    Census(CensusRow),
    CensusSummary(CensusSummary),
    Check(CheckPayload),
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub spec: String,
    pub statement: String,
    pub payload: Payload,
    pub verification: Option<Verification>,
    pub status: Status,
}

impl Report {
    fn new(command: &str, table: &BlockTable, statement: &str, payload: Payload, verification: Option<Verification>) -> Report {
        let status = match &verification {
            Some(v) if !v.passed => Status::Mismatch,
            _ => Status::Ok,
        };
        Report {
            command: command.into(),
            spec: table.spec().to_string(),
            statement: statement.into(),
            payload,
            verification,
            status,
        }
    }

    pub fn error(command: &str, spec: &str, err: &Error) -> Report {
        Report {
            command: command.into(),
            spec: spec.into(),
            statement: String::new(),
            payload: Payload::Error { message: err.to_string() },
            verification: None,
            status: Status::Error,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// Human-readable rendering of the same fields as the JSON form.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        // a bare prefix stays pipeable
        if let Payload::Prefix { word, .. } = &self.payload {
            let _ = writeln!(out, "{word}");
            return out;
        }
        if !self.statement.is_empty() {
            let _ = writeln!(out, "# {}", self.statement);
        }
        match &self.payload {
            Payload::Prefix { .. } => {}
            Payload::Blocks(b) => render_blocks(&mut out, b),
            Payload::Singular(s) => {
                let _ = writeln!(out, "n = {}, factor length {}, {} factors", s.n, s.factor_length, s.total);
                for c in &s.classes {
                    let label = if c.r == 0 { "conjugates of s_n".to_string() } else { format!("singular, kind {}", c.r) };
                    let _ = writeln!(out, "  class {} ({label}): {} words", c.r, c.size);
                    for w in &c.words {
                        let _ = writeln!(out, "    {w}");
                    }
                    if c.truncated {
                        let _ = writeln!(out, "    ...");
                    }
                }
            }
            Payload::Partition(p) => {
                let _ = writeln!(
                    out,
                    "{}-partition of s_{}: {} blocks over {} letters",
                    p.n, p.upto_level, p.item_count, p.covered_prefix_length
                );
                let seq: Vec<String> = p.items.iter().map(|it| format!("s_{}@{}", it.level, it.start)).collect();
                let _ = writeln!(out, "  {}{}", seq.join(" "), if p.truncated { " ..." } else { "" });
            }
            Payload::Index(ix) => {
                let _ = writeln!(out, "n = {}", ix.n);
                let _ = writeln!(out, "  index of s_n in the word: {} (witness length {})", ix.block_index, ix.block_witness_length);
                let _ = writeln!(out, "  index of s_n as a prefix: {} (witness length {})", ix.prefix_index, ix.prefix_witness_length);
                if let Some(w) = &ix.prefix_witness {
                    let _ = writeln!(out, "  r_(n+1) = {w}");
                }
            }
            Payload::Census(c) => {
                let _ = write!(out, "p({};{}) = {}  [{}", c.m, c.l, c.count, c.case);
                if let Some(n) = c.window {
                    let _ = write!(out, ", n = {n}");
                }
                if c.extension {
                    let _ = write!(out, ", extension");
                }
                if c.formal_overridden {
                    let _ = write!(out, ", formal form set aside");
                }
                let _ = writeln!(out, "]");
                if let Some(wit) = &c.witnesses {
                    let _ = writeln!(out, "  {wit}");
                }
                for w in &c.words {
                    let _ = writeln!(out, "    {w}");
                }
                if c.truncated {
                    let _ = writeln!(out, "    ...");
                }
            }
            Payload::CensusSummary(s) => {
                let _ = writeln!(
                    out,
                    "l = {}, m <= {}: nonzero at {:?}; {} zero off the length sets, {} zero on them",
                    s.l,
                    s.m_max,
                    s.nonzero_lengths,
                    s.zero_off_grid,
                    s.zero_on_grid.len()
                );
            }
            Payload::Check(c) => {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                let _ = write!(out, "{mark}  {} ({} cases)", c.name, c.cases);
                if let Some(ce) = &c.counterexample {
                    let _ = write!(out, ": {ce}");
                }
                let _ = writeln!(out);
            }
            Payload::Error { message } => {
                let _ = writeln!(out, "error: {message}");
            }
        }
        if let (Some(v), false) = (&self.verification, matches!(self.payload, Payload::Check(_))) {
            let mark = if v.passed { "verified" } else { "MISMATCH" };
            let _ = write!(out, "  {mark} by {}", v.method);
            if let Some(d) = &v.detail {
                let _ = write!(out, ": {d}");
            }
            let _ = writeln!(out);
        }
        out
    }
}

fn render_blocks(out: &mut String, b: &BlocksPayload) {
    let _ = writeln!(out, "s_{} = {}  (|s_{}| = {})", b.n, b.s.word, b.n, b.s.length);
    let _ = writeln!(out, "Q_{} = {}, P_{} = {}, L_{} = {}, d_{} = {}", b.n, b.q, b.n, b.p, b.n, b.big_l, b.n + 1, b.d_next);
    for d in &b.big_d {
        let _ = writeln!(out, "D_{} = {}  (length {})", d.level, d.word, d.length);
    }
    for g in &b.big_g {
        let _ = writeln!(out, "G_({},{}) = {}", b.n, g.r, g.word);
    }
    if let Some(ix) = b.block_index {
        let _ = writeln!(out, "index of s_{} = {}", b.n, ix);
    }
    if let Some(ix) = b.prefix_index {
        let _ = writeln!(out, "prefix index of s_{} = {}", b.n, ix);
    }
}

fn level_word(level: i64, word: &Word) -> LevelWord {
    LevelWord {
        level,
        length: word.len(),
        word: word.clone(),
    }
}

fn truncated_words<'a, I: IntoIterator<Item = &'a Word>>(words: I, full: bool) -> (Vec<Word>, bool) {
    let all: Vec<Word> = words.into_iter().cloned().collect();
    if full || all.len() <= TRUNCATE_WORDS {
        (all, false)
    } else {
        (all[..TRUNCATE_WORDS].to_vec(), true)
    }
}

fn nonnegative(what: &str, n: i64) -> Result<()> {
    if n < 0 {
        return range(format!("{what} must be non-negative, got {n}"));
    }
    Ok(())
}

pub fn generate(table: &BlockTable, length: usize) -> Result<Report> {
    let word = if length == 0 { Word::empty() } else { generate_prefix(table, length)?.prefix(length) };
    Ok(Report::new(
        "generate",
        table,
        "the word is the limit of its blocks s_n, each a prefix of the next",
        Payload::Prefix { length, word },
        None,
    ))
}

pub fn blocks(table: &BlockTable, n: i64, verify: bool) -> Result<Report> {
    nonnegative("n", n)?;
    let s = table.s(n)?;
    let big_d = (n - 1..=n)
        .filter(|&j| j >= 0)
        .map(|j| Ok(level_word(j, &*table.big_d(j)?)))
        .collect::<Result<Vec<_>>>()?;
    let big_g = (1..table.k())
        .map(|r| Ok(GWord { r, word: table.big_g(n, r)? }))
        .collect::<Result<Vec<_>>>()?;
    let (bi, pi) = if n >= 1 {
        (Some(block_index(table, n)?.value), Some(prefix_index(table, n)?.value))
    } else {
        (None, None)
    };
    let payload = BlocksPayload {
        n,
        s: level_word(n, &s),
        q: table.q(n as usize)?,
        p: table.p(n as usize)?,
        big_l: table.big_l(n as usize)?,
        d_next: table.d(n + 1)?,
        big_d,
        big_g,
        block_index: bi,
        prefix_index: pi,
    };
    let verification = if verify {
        let h = crate::directive::h_word(table.spec(), payload.big_l)?;
        let passed = h == *s;
        Some(Verification {
            method: "palindromic-closure construction".into(),
            passed,
            detail: (!passed).then(|| "s_n differs from the closure prefix of the same length".into()),
        })
    } else {
        None
    };
    Ok(Report::new(
        "blocks",
        table,
        "s_n = s_(n-1)^(d_n) ... s_(n-k+1)^(d_(n-k+2)) s_(n-k), with D_n = s_n^(d_(n+1)) D_(n-k) the palindromic prefix",
        Payload::Blocks(payload),
        verification,
    ))
}

pub fn singular(table: &BlockTable, n: i64, full: bool, verify: bool) -> Result<Report> {
    let p = factor_partition(table, n)?;
    let classes = p
        .classes()
        .enumerate()
        .map(|(r, class)| {
            let (words, truncated) = truncated_words(class, full);
            ClassPayload {
                r,
                size: class.len(),
                words,
                truncated,
            }
        })
        .collect();
    let verification = if verify {
        let truth = stable_factor_set(table, p.factor_len())?;
        let union = p.union();
        let passed = union == truth;
        Some(Verification {
            method: "factor enumeration on a stable prefix".into(),
            passed,
            detail: (!passed).then(|| {
                format!(
                    "{} predicted factors missing, {} extra",
                    truth.difference(&union).count(),
                    union.difference(&truth).count()
                )
            }),
        })
    } else {
        None
    };
    Ok(Report::new(
        "singular",
        table,
        "factors of length |s_n| split into the conjugates of s_n and k-1 classes of singular words, (k-1)|s_n|+1 in all",
        Payload::Singular(SingularPayload {
            n,
            factor_length: p.factor_len(),
            total: p.total(),
            classes,
        }),
        verification,
    ))
}

pub fn partition(table: &BlockTable, n: i64, length: Option<usize>, full: bool, verify: bool) -> Result<Report> {
    nonnegative("n", n)?;
    let k = table.k() as i64;
    let upto = match length {
        None => n + k,
        Some(len) => {
            let mut level = n + 1;
            while (table.len_s(level)? as usize) < len {
                level += 1;
            }
            level
        }
    };
    let view = n_partition(table, n, upto)?;
    let verification = if verify {
        let tiled = view.check(table);
        let up = regroup(table, &view);
        let detail = match (&tiled, &up) {
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
            (Ok(()), Ok(v)) if *v != n_partition(table, n + 1, upto)? => Some("regrouping differs from the (n+1)-partition".into()),
            _ => None,
        };
        Some(Verification {
            method: "literal tiling and regrouping".into(),
            passed: detail.is_none(),
            detail,
        })
    } else {
        None
    };
    let item_count = view.items.len();
    let truncated = !full && item_count > TRUNCATE_ITEMS;
    let items = if truncated { view.items[..TRUNCATE_ITEMS].to_vec() } else { view.items };
    Ok(Report::new(
        "partition",
        table,
        "the word tiles uniquely into blocks s_n, s_(n-1), ..., s_(n-k+1)",
        Payload::Partition(PartitionPayload {
            n,
            upto_level: upto,
            covered_prefix_length: view.covered_prefix_length,
            item_count,
            items,
            truncated,
        }),
        verification,
    ))
}

pub fn index(table: &BlockTable, n: i64, full: bool, verify: bool) -> Result<Report> {
    let bi = block_index(table, n)?;
    let pi = prefix_index(table, n)?;
    let verification = if verify {
        let s = table.s(n)?;
        let cert = certify_prefix(table, s.len(), 2)?;
        let longer = table.s(cert.level + 2)?;
        let seen = max_fractional_power(&longer, &s)?;
        let prefix_len = prefix_power_length(&longer, &s)?;
        let mut problems = Vec::new();
        if seen != bi.value {
            problems.push(format!("largest power seen {seen}"));
        }
        if longer.prefix(prefix_len) != pi.witness {
            problems.push(format!("greatest power prefix has length {prefix_len}"));
        }
        Some(Verification {
            method: "power search on a certified prefix".into(),
            passed: problems.is_empty(),
            detail: (!problems.is_empty()).then(|| problems.join("; ")),
        })
    } else {
        None
    };
    Ok(Report::new(
        "index",
        table,
        "the largest power of s_n is s_n^(2+d_(n+1)) D_(n-k); as a prefix it is r_(n+1), one s_n shorter",
        Payload::Index(IndexPayload {
            n,
            block_index: bi.value,
            block_witness_length: bi.witness.len(),
            prefix_index: pi.value,
            prefix_witness_length: pi.witness.len(),
            prefix_witness: full.then_some(pi.witness),
        }),
        verification,
    ))
}

const CENSUS_STATEMENT: &str = "l-th powers of length m occur only on the length sets; their bases are consecutive conjugates of one block product";

fn census_row(c: &PowerCensus, full: bool) -> Result<CensusRow> {
    let set = c.witness_set()?;
    let (words, truncated) = truncated_words(&set, full);
    let case = match c.provenance.case {
        CensusCase::SmallLength => "small-length",
        CensusCase::OffGridZero => "off-grid-zero",
        CensusCase::D1Case => "d1-case",
        CensusCase::DiCase => "di-case",
    };
    Ok(CensusRow {
        m: c.m,
        l: c.l,
        count: c.count,
        case: case.into(),
        window: c.provenance.n,
        representations: c
            .provenance
            .representations
            .iter()
            .map(|rep| Representation { i: rep.i, r: rep.r })
            .collect(),
        extension: c.provenance.extension,
        formal_overridden: c.provenance.formal_overridden,
        witnesses: c.witnesses.as_ref().map(|w| w.describe()),
        base: c.witnesses.as_ref().map(|w| w.base.clone()),
        words,
        truncated,
    })
}

fn compare(predicted: &BTreeSet<Word>, truth: &BTreeSet<Word>) -> Verification {
    let passed = predicted == truth;
    Verification {
        method: "brute-force power scan on a certified prefix".into(),
        passed,
        detail: (!passed).then(|| format!("closed form {} bases, scan {}", predicted.len(), truth.len())),
    }
}

/// The census of one length.
pub fn census_one(table: &BlockTable, m: u64, l: usize, full: bool, verify: bool) -> Result<Report> {
    let c = census(table, m, l)?;
    let verification = if verify {
        let cert = certify_prefix(table, m as usize, l)?;
        let scan = cert.scan(l).ok_or_else(|| Error::InvariantViolation(format!("no scan for l = {l}")))?;
        Some(compare(&c.witness_set()?, &scan.bases(m as usize)))
    } else {
        None
    };
    Ok(Report::new(
        "census",
        table,
        CENSUS_STATEMENT,
        Payload::Census(census_row(&c, full)?),
        verification,
    ))
}

/// One report per nonzero length, then a summary whose verification covers every zero length.
pub fn census_up_to(table: &BlockTable, m_max: u64, l: usize, full: bool, verify: bool) -> Result<Vec<Report>> {
    let range = census_range(table, m_max, l)?;
    let scan = if verify {
        let cert = certify_prefix(table, m_max as usize, l)?;
        Some(cert.scan(l).cloned().ok_or_else(|| Error::InvariantViolation(format!("no scan for l = {l}")))?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(range.rows.len() + 1);
    for c in &range.rows {
        let verification = match &scan {
            Some(s) => Some(compare(&c.witness_set()?, &s.bases(c.m as usize))),
            None => None,
        };
        out.push(Report::new("census", table, CENSUS_STATEMENT, Payload::Census(census_row(c, full)?), verification));
    }
    let nonzero: Vec<u64> = range.rows.iter().map(|c| c.m).collect();
    let verification = scan.map(|s| {
        let stray: Vec<u64> = (1..=m_max)
            .filter(|m| !nonzero.contains(m) && s.count(*m as usize) > 0)
            .collect();
        Verification {
            method: "brute-force power scan on a certified prefix".into(),
            passed: stray.is_empty(),
            detail: (!stray.is_empty()).then(|| format!("scan finds powers at predicted-zero lengths {stray:?}")),
        }
    });
    out.push(Report::new(
        "census",
        table,
        CENSUS_STATEMENT,
        Payload::CensusSummary(CensusSummary {
            m_max,
            l,
            nonzero_lengths: nonzero,
            zero_off_grid: range.zero_off_grid,
            zero_on_grid: range.zero_on_grid,
        }),
        verification,
    ));
    Ok(out)
}

fn check_report(table: &BlockTable, c: CheckOutcome) -> Report {
    let verification = Verification {
        method: "literal word and integer comparison".into(),
        passed: c.passed,
        detail: c.counterexample.clone(),
    };
    Report::new(
        "verify",
        table,
        "",
        Payload::Check(CheckPayload {
            name: c.name,
            passed: c.passed,
            cases: c.cases,
            counterexample: c.counterexample,
        }),
        Some(verification),
    )
}

/// One report per battery check.
pub fn verify(table: &BlockTable, n_max: i64) -> Result<Vec<Report>> {
    nonnegative("n", n_max)?;
    Ok(verify_suite(table, n_max)?.into_iter().map(|c| check_report(table, c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(spec: &str) -> BlockTable {
        BlockTable::new(spec.parse().unwrap())
    }

    fn round_trip(r: &Report) {
        let back: Report = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(&back, r);
    }

    #[test]
    fn generate_tribonacci_prefix() {
        let r = generate(&table("k=3; d=; 1"), 13).unwrap();
        assert_eq!(r.render_text(), "abacabaabacab\n");
        round_trip(&r);
        let empty = generate(&table("k=3; d=; 1"), 0).unwrap();
        assert_eq!(empty.payload, Payload::Prefix { length: 0, word: Word::empty() });
    }

    #[test]
    fn blocks_report_values() {
        let r = blocks(&table("k=3; d=1,1,2; 2,1,2"), 3, true).unwrap();
        let Payload::Blocks(b) = &r.payload else { panic!("blocks payload") };
        assert_eq!(b.s.word.to_string(), "abacabacaba");
        assert_eq!(b.big_d[0].word.to_string(), "abacaba");
        assert_eq!(r.status, Status::Ok);
        round_trip(&r);
        let r = blocks(&table("k=3; d=; 1"), 4, false).unwrap();
        assert!(r.render_text().contains("G_(4,2) = cabaabacab"));
        let r = blocks(&table("k=3; d=; 1"), 0, false).unwrap();
        assert!(r.render_text().contains("s_0 = a "));
    }

    #[test]
    fn census_reports() {
        let t = table("k=3; d=1,1,2; 2,1,2");
        let r = census_one(&t, 15, 2, false, true).unwrap();
        let Payload::Census(c) = &r.payload else { panic!("census payload") };
        assert_eq!(c.count, 8);
        assert_eq!(c.witnesses.as_deref(), Some("first 8 conjugates of s_3·s_2"));
        assert_eq!(r.status, Status::Ok);
        round_trip(&r);
        let Payload::Census(c) = census_one(&t, 22, 3, false, false).unwrap().payload else { panic!() };
        assert_eq!(c.count, 0);
        let rows = census_up_to(&t, 58, 2, false, true).unwrap();
        assert!(rows.iter().all(|r| r.status == Status::Ok));
        rows.iter().for_each(round_trip);
    }

    #[test]
    fn other_reports_round_trip() {
        let t = table("k=3; d=; 1");
        for r in [
            singular(&t, 2, false, true).unwrap(),
            partition(&t, 1, None, false, true).unwrap(),
            partition(&t, 1, Some(500), false, false).unwrap(),
            index(&t, 3, true, true).unwrap(),
        ] {
            assert_eq!(r.status, Status::Ok, "{r:?}");
            round_trip(&r);
        }
        let checks = verify(&t, 4).unwrap();
        assert!(checks.iter().all(|r| r.status == Status::Ok));
    }
}
