//! Properties over randomly drawn periodic directive sequences and random words.

use std::collections::BTreeSet;

use episturm::oracle::{certify_prefix, stable_factor_set};
use episturm::powers::census;
use episturm::singular::factor_partition;
use episturm::verify::{block_identities, construction_equivalence};
use episturm::word::{conjugate, is_palindrome, is_primitive, reversal, strip_prefix, strip_suffix};
use episturm::{BlockTable, DirectiveSpec, Word};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = DirectiveSpec> {
    (2usize..=4)
        .prop_flat_map(|k| {
            (
                Just(k),
                proptest::collection::vec(1usize..=3, 0..4),
                proptest::collection::vec(1usize..=3, 1..4),
            )
        })
        .prop_map(|(k, pre, period)| DirectiveSpec::periodic(k, pre, period).unwrap())
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(1u8..=3, 0..max_len).prop_map(|v| Word::from_indices(&v).unwrap())
}

proptest! {
    #[test]
    fn strip_inverts_concat(u in word_strategy(20), v in word_strategy(20)) {
        let uv = u.concat(&v);
        prop_assert_eq!(strip_suffix(&uv, &v).unwrap(), u.clone());
        prop_assert_eq!(strip_prefix(&uv, &u).unwrap(), v);
    }

    #[test]
    fn nontrivial_self_conjugate_is_not_primitive(w in word_strategy(24)) {
        let fixed = (1..w.len()).any(|j| conjugate(&w, j).unwrap() == w);
        prop_assert_eq!(fixed, !w.is_empty() && !is_primitive(&w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identities_hold_for_any_directive(spec in spec_strategy()) {
        let t = BlockTable::new(spec.clone());
        for outcome in block_identities(&t, 7).unwrap() {
            prop_assert!(outcome.passed, "{}: {:?}", spec, outcome);
        }
        prop_assert!(construction_equivalence(&t, 3000).unwrap().passed);
    }

    #[test]
    fn blocks_and_palindromic_prefixes(spec in spec_strategy()) {
        let t = BlockTable::new(spec);
        for n in 0..7 {
            let d = t.big_d(n).unwrap();
            prop_assert!(is_palindrome(&d));
            prop_assert!(d.is_prefix_of(&t.s(n + 3).unwrap()));
            let s = t.s(n).unwrap();
            prop_assert!(is_primitive(&s));
            prop_assert!(conjugate(&s, 0).unwrap() == *s);
        }
    }

    #[test]
    fn complexity_is_arnoux_rauzy(spec in spec_strategy(), m in 1usize..40) {
        let t = BlockTable::new(spec);
        let k = t.k();
        let factors = stable_factor_set(&t, m).unwrap();
        prop_assert_eq!(factors.len(), (k - 1) * m + 1);
        let reversed: BTreeSet<Word> = factors.iter().map(reversal).collect();
        prop_assert_eq!(reversed, factors);
    }

    #[test]
    fn factor_partition_counts(spec in spec_strategy(), n in 1i64..=4) {
        let t = BlockTable::new(spec);
        let p = factor_partition(&t, n).unwrap();
        let s_len = t.len_s(n).unwrap() as usize;
        prop_assert_eq!(p.total(), (t.k() - 1) * s_len + 1);
        prop_assert_eq!(p.union().len(), p.total());
    }

    #[test]
    fn census_matches_scan(spec in spec_strategy()) {
        let t = BlockTable::new(spec.clone());
        // largest block length whose certificate prefix stays small
        let k = t.k() as i64;
        let level = (1..=4).rev().find(|&j| t.len_s(j + k + 4).unwrap() <= 300_000).unwrap_or(1);
        let m_max = t.len_s(level).unwrap() as usize;
        let cert = certify_prefix(&t, m_max, 3).unwrap();
        for l in 2..=3 {
            let scan = cert.scan(l).unwrap();
            for m in 1..=m_max {
                let c = census(&t, m as u64, l).unwrap();
                prop_assert_eq!(c.witness_set().unwrap(), scan.bases(m), "{} m={} l={}", spec, m, l);
            }
        }
    }

    #[test]
    fn census_monotone_in_exponent(spec in spec_strategy(), m in 1u64..200) {
        let t = BlockTable::new(spec);
        let counts: Vec<usize> = (2..=5).map(|l| census(&t, m, l).unwrap().count).collect();
        prop_assert!(counts.windows(2).all(|c| c[0] >= c[1]));
    }
}
