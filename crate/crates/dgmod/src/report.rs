//! Pass/fail reports for axiom validators. A failing check always carries a
//! concrete witness (basis indices or a degree) that can be re-checked by hand.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn push_pass(&mut self, name: &str) {
        self.checks.push(Check { name: name.to_string(), pass: true, witness: None });
    }

    pub fn push_fail(&mut self, name: &str, witness: String) {
        self.checks.push(Check { name: name.to_string(), pass: false, witness: Some(witness) });
    }

    pub fn record(&mut self, name: &str, witness: Option<String>) {
        match witness {
            None => self.push_pass(name),
            Some(w) => self.push_fail(name, w),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match (&c.pass, &c.witness) {
                (true, _) => writeln!(f, "[pass] {}", c.name)?,
                (false, Some(w)) => writeln!(f, "[FAIL] {}: {}", c.name, w)?,
                (false, None) => writeln!(f, "[FAIL] {}", c.name)?,
            }
        }
        Ok(())
    }
}
