//! Pass/fail records of checked inequalities and measured quantities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One checked inequality `lhs <op> rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    pub fn lt(name: &str, inequality: &str, lhs: f64, rhs: f64) -> Self {
        Check::with(name, inequality, lhs, rhs, lhs < rhs)
    }

    pub fn le(name: &str, inequality: &str, lhs: f64, rhs: f64) -> Self {
        Check::with(name, inequality, lhs, rhs, lhs <= rhs)
    }

    pub fn gt(name: &str, inequality: &str, lhs: f64, rhs: f64) -> Self {
        Check::with(name, inequality, lhs, rhs, lhs > rhs)
    }

    pub fn ge(name: &str, inequality: &str, lhs: f64, rhs: f64) -> Self {
        Check::with(name, inequality, lhs, rhs, lhs >= rhs)
    }

    /// A yes/no condition, recorded as `1 == 1` or `0 == 1`.
    pub fn holds(name: &str, statement: &str, ok: bool) -> Self {
        Check::with(name, statement, if ok { 1.0 } else { 0.0 }, 1.0, ok)
    }

    fn with(name: &str, inequality: &str, lhs: f64, rhs: f64, pass: bool) -> Self {
        Check {
            name: name.to_string(),
            inequality: inequality.to_string(),
            lhs,
            rhs,
            pass,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub quantities: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report {
            title: title.to_string(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn record(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.quantities.insert(name.to_string(), v);
        self
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).and_then(serde_json::Value::as_f64)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.quantities {
            self.quantities.insert(format!("{prefix}.{k}"), v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_listed() {
        let mut r = Report::new("t");
        r.push(Check::lt("a", "x < 1", 0.5, 1.0));
        r.push(Check::lt("b", "y < 1", 1.0, 1.0));
        r.record("n", 3);
        assert!(!r.all_pass());
        assert_eq!(r.failures()[0].name, "b");
        assert_eq!(r.quantity("n"), Some(3.0));
    }
}
