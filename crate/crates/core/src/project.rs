//! A subject project: program modules plus test modules.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::lang::interp::LineCoverage;
use crate::lang::{LinkError, SubjectModule, Suite, TestOutcome};

#[derive(Clone, Debug, Default)]
pub struct Project {
    pub sources: Vec<SubjectModule>,
    pub tests: Vec<SubjectModule>,
}

impl Project {
    pub fn new(sources: Vec<SubjectModule>, tests: Vec<SubjectModule>) -> Self {
        Project { sources, tests }
    }

    pub fn source(&self, path: &str) -> Option<&SubjectModule> {
        self.sources.iter().find(|m| m.path == path)
    }

    pub fn is_source(&self, path: &str) -> bool {
        self.source(path).is_some()
    }

    pub fn suite(&self) -> Result<Suite<'_>, LinkError> {
        Suite::new(&self.sources, &self.tests)
    }

    /// This project's tests linked against its program with one module
    /// swapped for `replacement` (matched by path).
    pub fn suite_with<'a>(&'a self, replacement: &'a SubjectModule) -> Result<Suite<'a>, LinkError> {
        Suite::new(
            self.sources.iter().map(move |m| {
                if m.path == replacement.path {
                    replacement
                } else {
                    m
                }
            }),
            &self.tests,
        )
    }

    /// Another test suite linked against this project's program.
    pub fn suite_against<'a>(&'a self, tests: &'a [SubjectModule]) -> Result<Suite<'a>, LinkError> {
        Suite::new(&self.sources, tests)
    }

    pub fn run_tests(&self, step_budget: u64) -> Result<Vec<TestOutcome>, LinkError> {
        Ok(self.suite()?.run_all(step_budget))
    }

    /// Names of tests that pass on the unmodified project.
    pub fn passing_tests(&self, step_budget: u64) -> Result<BTreeSet<String>, LinkError> {
        Ok(self
            .run_tests(step_budget)?
            .into_iter()
            .filter(|o| !o.verdict.is_failure())
            .map(|o| o.test_name)
            .collect())
    }

    /// Runs every test with line tracing; returns the outcomes and the lines
    /// of program modules that executed (test modules are left out).
    pub fn run_tests_traced(&self, step_budget: u64) -> Result<(Vec<TestOutcome>, LineCoverage), LinkError> {
        let suite = self.suite()?;
        let mut cov = LineCoverage::new();
        let outcomes = suite
            .test_names()
            .iter()
            .map(|t| suite.run_test_traced(t, step_budget, &mut cov))
            .collect();
        cov.retain(|path, _| self.is_source(path));
        Ok((outcomes, cov))
    }
}
