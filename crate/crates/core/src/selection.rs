//! Operator selection: one surfaced mutant per line, chosen by how often
//! mutants in the same context survived and whether reviewers found them
//! worth fixing.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::mutagen::{Mutant, NodeKind, OperatorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContextKey {
    pub operator: OperatorKind,
    pub node_kind: NodeKind,
}

impl ContextKey {
    pub fn new(operator: OperatorKind, node_kind: NodeKind) -> Self {
        ContextKey {
            operator,
            node_kind,
        }
    }

    pub fn of(mutant: &Mutant) -> Self {
        ContextKey::new(mutant.operator, mutant.point.node_kind)
    }

    /// All 30 keys, operator-major.
    pub fn all() -> impl Iterator<Item = ContextKey> {
        OperatorKind::ALL.into_iter().flat_map(|op| {
            NodeKind::ALL
                .into_iter()
                .map(move |kind| ContextKey::new(op, kind))
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub generated: u64,
    pub survived: u64,
    pub killed: u64,
    pub not_useful: u64,
    pub please_fix: u64,
}

impl Counters {
    pub fn is_consistent(&self) -> bool {
        self.survived + self.killed <= self.generated
            && self.not_useful + self.please_fix <= self.generated
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeEvent {
    Generated,
    Survived,
    Killed,
    PleaseFix,
    NotUseful,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedbackVerdict {
    PleaseFix,
    NotUseful,
}

impl From<FeedbackVerdict> for OutcomeEvent {
    fn from(v: FeedbackVerdict) -> Self {
        match v {
            FeedbackVerdict::PleaseFix => OutcomeEvent::PleaseFix,
            FeedbackVerdict::NotUseful => OutcomeEvent::NotUseful,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SelectionError {
    #[error("{event:?} on {key:?} would leave counters inconsistent ({counters:?})")]
    InvariantViolation {
        key: ContextKey,
        event: OutcomeEvent,
        counters: Counters,
    },
}

/// Weights of the two smoothed signals; they should sum to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub survival: f64,
    pub productivity: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            survival: 0.5,
            productivity: 0.5,
        }
    }
}

/// Per-context counters. Missing keys read as all-zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorStats {
    counters: BTreeMap<ContextKey, Counters>,
}

impl OperatorStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: ContextKey) -> Counters {
        self.counters.get(&key).copied().unwrap_or_default()
    }

    /// Installs counters for `key` as read from storage.
    pub fn set(&mut self, key: ContextKey, counters: Counters) -> Result<(), SelectionError> {
        if !counters.is_consistent() {
            return Err(SelectionError::InvariantViolation {
                key,
                event: OutcomeEvent::Generated,
                counters,
            });
        }
        self.counters.insert(key, counters);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (ContextKey, Counters)> + '_ {
        self.counters.iter().map(|(k, c)| (*k, *c))
    }

    /// Increments exactly one counter, refusing updates that would break
    /// `survived + killed <= generated` or `not_useful + please_fix <= generated`.
    pub fn record_outcome(
        &mut self,
        key: ContextKey,
        event: OutcomeEvent,
    ) -> Result<(), SelectionError> {
        let mut c = self.get(key);
        match event {
            OutcomeEvent::Generated => c.generated += 1,
            OutcomeEvent::Survived => c.survived += 1,
            OutcomeEvent::Killed => c.killed += 1,
            OutcomeEvent::PleaseFix => c.please_fix += 1,
            OutcomeEvent::NotUseful => c.not_useful += 1,
        }
        if !c.is_consistent() {
            return Err(SelectionError::InvariantViolation {
                key,
                event,
                counters: self.get(key),
            });
        }
        self.counters.insert(key, c);
        Ok(())
    }
}

/// Functional form of [`OperatorStats::record_outcome`].
pub fn record_outcome(
    stats: &OperatorStats,
    key: ContextKey,
    event: OutcomeEvent,
) -> Result<OperatorStats, SelectionError> {
    let mut next = stats.clone();
    next.record_outcome(key, event)?;
    Ok(next)
}

pub fn score_operator(stats: &OperatorStats, key: ContextKey) -> f64 {
    score_with(stats, key, ScoreWeights::default())
}

/// Weighted sum of Laplace-smoothed survival and productivity rates.
pub fn score_with(stats: &OperatorStats, key: ContextKey, weights: ScoreWeights) -> f64 {
    let c = stats.get(key);
    let survival = (c.survived + 1) as f64 / (c.survived + c.killed + 2) as f64;
    let productivity = (c.please_fix + 1) as f64 / (c.please_fix + c.not_useful + 2) as f64;
    weights.survival * survival + weights.productivity * productivity
}

pub fn select_mutant_for_line<'a>(candidates: &'a [Mutant], stats: &OperatorStats) -> Option<&'a Mutant> {
    select_with(candidates, stats, ScoreWeights::default())
}

/// Picks the highest-scoring candidate; ties go to the earlier operator in
/// AOR < LCR < ROR < UOI < SBR, then the lower variant index, then the
/// earlier position in `candidates`.
pub fn select_with<'a>(
    candidates: &'a [Mutant],
    stats: &OperatorStats,
    weights: ScoreWeights,
) -> Option<&'a Mutant> {
    let scored: Vec<(f64, &Mutant)> = candidates
        .iter()
        .map(|m| (score_with(stats, ContextKey::of(m), weights), m))
        .collect();
    let mut best: Option<(f64, &Mutant)> = None;
    for (score, m) in scored {
        best = match best {
            None => Some((score, m)),
            Some((bs, bm)) => {
                let better = score > bs
                    || (score == bs && (m.operator, m.variant) < (bm.operator, bm.variant));
                if better {
                    Some((score, m))
                } else {
                    Some((bs, bm))
                }
            }
        };
    }
    best.map(|(_, m)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;
    use crate::mutagen::{enumerate_all_mutants, SuppressionConfig};
    use alloc::collections::BTreeSet;

    fn key(op: OperatorKind, kind: NodeKind) -> ContextKey {
        ContextKey::new(op, kind)
    }

    fn stats_with(k: ContextKey, c: Counters) -> OperatorStats {
        let mut s = OperatorStats::new();
        s.set(k, c).unwrap();
        s
    }

    #[test]
    fn empty_stats_score_half() {
        let s = OperatorStats::new();
        for k in ContextKey::all() {
            assert_eq!(score_operator(&s, k), 0.5);
        }
        assert_eq!(ContextKey::all().count(), 30);
    }

    #[test]
    fn score_arithmetic() {
        let k = key(OperatorKind::Ror, NodeKind::BinaryRelational);
        let s = stats_with(
            k,
            Counters {
                generated: 10,
                survived: 8,
                killed: 2,
                ..Default::default()
            },
        );
        assert!((score_operator(&s, k) - 0.625).abs() < 1e-12);
        let s = stats_with(
            k,
            Counters {
                generated: 10,
                killed: 10,
                not_useful: 10,
                ..Default::default()
            },
        );
        assert!((score_operator(&s, k) - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn record_sequence_and_violation() {
        let k = key(OperatorKind::Ror, NodeKind::BinaryRelational);
        let s = record_outcome(&OperatorStats::new(), k, OutcomeEvent::Generated).unwrap();
        assert_eq!(
            s.get(k),
            Counters {
                generated: 1,
                ..Default::default()
            }
        );
        let s = record_outcome(&s, k, OutcomeEvent::Killed).unwrap();
        assert_eq!(s.get(k).killed, 1);
        assert!(matches!(
            record_outcome(&s, k, OutcomeEvent::Survived),
            Err(SelectionError::InvariantViolation { .. })
        ));
    }

    fn candidates() -> Vec<Mutant> {
        let m = parse_source("fn f(a, b, x) {\n    if (a < b) { x = 1; }\n}\n", "m").unwrap();
        let lines: BTreeSet<u32> = [2].into_iter().collect();
        enumerate_all_mutants(&m, &lines, &SuppressionConfig::default())
            .unwrap()
            .into_iter()
            .filter(|m| matches!(m.operator, OperatorKind::Ror | OperatorKind::Sbr))
            .collect()
    }

    #[test]
    fn tie_goes_to_operator_order() {
        let c = candidates();
        let chosen = select_mutant_for_line(&c, &OperatorStats::new()).unwrap();
        assert_eq!(chosen.operator, OperatorKind::Ror);
        assert_eq!(chosen.variant, 0);
    }

    #[test]
    fn history_overrides_order() {
        let c = candidates();
        let mut s = OperatorStats::new();
        // SBR: survival 9/10 -> score 0.5*0.9 + 0.5*0.5 = 0.7
        s.set(
            key(OperatorKind::Sbr, NodeKind::Statement),
            Counters {
                generated: 8,
                survived: 8,
                ..Default::default()
            },
        )
        .unwrap();
        // ROR: survival 1/10 -> 0.3
        s.set(
            key(OperatorKind::Ror, NodeKind::BinaryRelational),
            Counters {
                generated: 8,
                killed: 8,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(select_mutant_for_line(&c, &s).unwrap().operator, OperatorKind::Sbr);
    }

    #[test]
    fn no_candidates() {
        assert!(select_mutant_for_line(&[], &OperatorStats::new()).is_none());
    }
}
