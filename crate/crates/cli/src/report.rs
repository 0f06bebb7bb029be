//! JSON-lines reports: a header line, one line per record, a summary line.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    /// First mismatching degree, failing grid cell, residues, gaps.
    pub witness: Option<Value>,
    pub message: Option<String>,
}

impl Record {
    pub fn new(name: impl Into<String>) -> Self {
        Record {
            name: name.into(),
            parameters: BTreeMap::new(),
            status: Status::Pass,
            witness: None,
            message: None,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), v.into());
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.status = if pass { Status::Pass } else { Status::Fail };
        self
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn message(mut self, m: impl Into<String>) -> Self {
        self.message = Some(m.into());
        self
    }

    pub fn error(name: impl Into<String>, err: impl fmt::Display) -> Self {
        let mut r = Record::new(name).message(err.to_string());
        r.status = Status::Error;
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Line {
    Header { schema_version: u32, command: Vec<String> },
    Record(Record),
    Summary { total: usize, passed: usize, failed: usize, errors: usize, duration_ms: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Vec<String>,
    pub records: Vec<Record>,
    pub duration_ms: u64,
}

/// Compare strings with embedded digit runs by numeric value.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return Ordering::Equal,
            (None, _) => return Ordering::Less,
            (_, None) => return Ordering::Greater,
            (Some(c), Some(d)) if c.is_ascii_digit() && d.is_ascii_digit() => {
                let i = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let j = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let (u, v) = (trim_zeros(&x[..i]), trim_zeros(&y[..j]));
                let o = u.len().cmp(&v.len()).then_with(|| u.cmp(v));
                if o != Ordering::Equal {
                    return o;
                }
                x = &x[i..];
                y = &y[j..];
            }
            (Some(c), Some(d)) => {
                if c != d {
                    return c.cmp(d);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(s: &[u8]) -> &[u8] {
    let k = s.iter().take_while(|&&c| c == b'0').count().min(s.len().saturating_sub(1));
    &s[k..]
}

impl Report {
    pub fn new(command: Vec<String>, mut records: Vec<Record>, duration_ms: u64) -> Self {
        records.sort_by(|a, b| natural_cmp(&a.name, &b.name));
        Report { command, records, duration_ms }
    }

    pub fn count(&self, s: Status) -> usize {
        self.records.iter().filter(|r| r.status == s).count()
    }

    pub fn all_pass(&self) -> bool {
        self.count(Status::Pass) == self.records.len()
    }

    pub fn lines(&self) -> Vec<Line> {
        let mut out = vec![Line::Header { schema_version: SCHEMA_VERSION, command: self.command.clone() }];
        out.extend(self.records.iter().cloned().map(Line::Record));
        out.push(Line::Summary {
            total: self.records.len(),
            passed: self.count(Status::Pass),
            failed: self.count(Status::Fail),
            errors: self.count(Status::Error),
            duration_ms: self.duration_ms,
        });
        out
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        for line in self.lines() {
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    #[cfg(test)]
    pub fn parse_json(text: &str) -> serde_json::Result<Report> {
        let mut command = Vec::new();
        let mut records = Vec::new();
        let mut duration_ms = 0;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match serde_json::from_str::<Line>(line)? {
                Line::Header { command: c, .. } => command = c,
                Line::Record(r) => records.push(r),
                Line::Summary { duration_ms: d, .. } => duration_ms = d,
            }
        }
        Ok(Report { command, records, duration_ms })
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
            write!(w, "{:<5} {}", r.status, r.name)?;
            if !params.is_empty() {
                write!(w, " [{}]", params.join(" "))?;
            }
            if let Some(wit) = &r.witness {
                write!(w, " {wit}")?;
            }
            if let Some(m) = &r.message {
                write!(w, " -- {m}")?;
            }
            writeln!(w)?;
        }
        writeln!(
            w,
            "{} records: {} passed, {} failed, {} errors ({} ms)",
            self.records.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error),
            self.duration_ms
        )
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
