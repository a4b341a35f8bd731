//! Machine-readable run reports: every residual is recorded, passing or
//! not, so runs can be diffed for regressions.

use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<(i32, i32)>,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config_digest: String,
    pub mode: String,
    pub lambda: Vec<f64>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(digest: String, mode: String, lambda: Vec<f64>) -> Self {
        Report {
            config_digest: digest,
            mode,
            lambda,
            checks: Vec::new(),
            artifacts: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64, tol: f64) -> bool {
        self.push_at(name, None, None, value, tol)
    }

    pub fn push_lambda(&mut self, name: impl Into<String>, lambda: f64, value: f64, tol: f64) -> bool {
        self.push_at(name, Some(lambda), None, value, tol)
    }

    pub fn push_at(
        &mut self,
        name: impl Into<String>,
        lambda: Option<f64>,
        site: Option<(i32, i32)>,
        value: f64,
        tol: f64,
    ) -> bool {
        let pass = value <= tol;
        self.checks.push(Check {
            name: name.into(),
            lambda,
            site,
            value,
            tol,
            pass,
        });
        self.pass &= pass;
        pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}
