//! Running a test suite against a mutant.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lang::{parse_source, LinkError, ParseError, Suite, Verdict};
use crate::mutagen::{Mutant, MutantStatus};
use crate::project::Project;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("mutant {id} does not parse: {source}")]
    Unparsable { id: String, source: ParseError },
    #[error(transparent)]
    Link(#[from] LinkError),
}

/// Result of running tests against one mutant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub status: MutantStatus,
    /// Tests actually executed, in declaration order.
    pub tests_run: Vec<String>,
    /// Tests that pass on the unmutated program but not on the mutant.
    pub killing_tests: Vec<String>,
    /// Verdict of every executed test.
    pub verdicts: Vec<(String, Verdict)>,
}

/// Runs `project`'s tests against `mutant`. A test kills the mutant when it
/// is in `baseline_passing` and does not pass on the mutant. With
/// `early_exit` the run stops at the first killing test.
pub fn evaluate_mutant(
    project: &Project,
    mutant: &Mutant,
    baseline_passing: &BTreeSet<String>,
    step_budget: u64,
    early_exit: bool,
) -> Result<Evaluation, EvalError> {
    let module = parse_source(&mutant.mutated_source, &mutant.point.path).map_err(|source| {
        EvalError::Unparsable {
            id: mutant.id.clone(),
            source,
        }
    })?;
    let suite = project.suite_with(&module)?;
    Ok(run_against(&suite, baseline_passing, step_budget, early_exit))
}

pub(crate) fn run_against(
    suite: &Suite<'_>,
    baseline_passing: &BTreeSet<String>,
    step_budget: u64,
    early_exit: bool,
) -> Evaluation {
    let mut eval = Evaluation {
        status: MutantStatus::Live,
        tests_run: Vec::new(),
        killing_tests: Vec::new(),
        verdicts: Vec::new(),
    };
    for name in suite.test_names() {
        let outcome = suite.run_test(name, step_budget);
        eval.tests_run.push(outcome.test_name.clone());
        let kills = outcome.verdict.is_failure() && baseline_passing.contains(*name);
        eval.verdicts.push((outcome.test_name.clone(), outcome.verdict));
        if kills {
            eval.status = MutantStatus::Killed;
            eval.killing_tests.push(outcome.test_name);
            if early_exit {
                break;
            }
        }
    }
    eval
}

/// Re-runs a single recorded killing test against the mutant.
pub fn reverify_kill(
    project: &Project,
    mutant: &Mutant,
    test: &str,
    step_budget: u64,
) -> Result<bool, EvalError> {
    let module = parse_source(&mutant.mutated_source, &mutant.point.path).map_err(|source| {
        EvalError::Unparsable {
            id: mutant.id.clone(),
            source,
        }
    })?;
    let suite = project.suite_with(&module)?;
    Ok(suite.run_test(test, step_budget).verdict.is_failure())
}
