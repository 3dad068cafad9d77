#[path = "support/oracle.rs"]
mod oracle;

use std::collections::{BTreeMap, BTreeSet};

use mutest_core::gen::{generate_module, GenConfig};
use mutest_core::mutagen::{enumerate_all_mutants, SuppressionConfig};
use proptest::prelude::*;

fn engine_counts(seed: u64) -> (BTreeMap<u32, usize>, BTreeMap<u32, usize>, String) {
    let m = generate_module(seed, &GenConfig::small(), "src/gen.mini");
    let lines: BTreeSet<u32> = (1..=m.source_text.lines().count() as u32).collect();
    let mut got = BTreeMap::new();
    for mutant in enumerate_all_mutants(&m, &lines, &SuppressionConfig::default()).unwrap() {
        *got.entry(mutant.line()).or_default() += 1;
    }
    (got, oracle::count_per_line(&m), m.source_text.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_counts_match_brute_force(seed in any::<u64>()) {
        let (got, want, src) = engine_counts(seed);
        prop_assert_eq!(got, want, "module:\n{}", src);
    }
}
