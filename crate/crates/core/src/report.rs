//! Named pass/fail records produced by the verifiers.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// First counterexample found, when the check failed.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// Records `name`; `witness = None` means it held.
    pub fn record(&mut self, name: impl Into<String>, witness: Option<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: witness.is_none(),
            witness,
        });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.record(name, None);
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.record(name, Some(witness.into()));
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.failures().any(|c| c.name == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Prefixes every check name, e.g. with the color it concerns.
    pub fn scoped(mut self, prefix: &str) -> Report {
        for c in &mut self.checks {
            c.name = format!("{prefix}: {}", c.name);
        }
        self
    }

    /// One line per check as `name<TAB>pass|fail<TAB>witness`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                c.name,
                if c.passed { "pass" } else { "fail" },
                c.witness.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "ok    {}", c.name)?,
                Some(w) => writeln!(f, "FAIL  {}: {}", c.name, w)?,
            }
        }
        if self.is_ok() {
            writeln!(f, "all axioms hold")?;
        }
        Ok(())
    }
}
