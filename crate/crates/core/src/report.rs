//! The outcome record shared by every verification experiment.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::dyadic::DyadicRational;

/// Rounds to 12 significant digits, the precision used for all float output.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Formats a float with 12 significant digits, trailing zeros dropped.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let r = round12(x);
    let exp = r.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if !(-5..12).contains(&exp) {
        let s = format!("{r:.11e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        format!("{}e{e}", trim(mantissa.to_string()))
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim(format!("{r:.decimals$}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(DyadicRational),
    Float(f64),
    Int(i128),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(d) => write!(f, "{d} (~{})", fmt12(d.to_f64())),
            Value::Float(x) => f.write_str(&fmt12(*x)),
            Value::Int(i) => write!(f, "{i}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

/// A named value, serialized as `{"label": .., "exact"|"float"|"int"|"text": ..}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Labeled {
    pub label: String,
    pub value: Value,
}

impl Labeled {
    pub fn exact(label: impl Into<String>, v: DyadicRational) -> Self {
        Self {
            label: label.into(),
            value: Value::Exact(v),
        }
    }

    pub fn float(label: impl Into<String>, v: f64) -> Self {
        Self {
            label: label.into(),
            value: Value::Float(v),
        }
    }

    pub fn int(label: impl Into<String>, v: impl Into<i128>) -> Self {
        Self {
            label: label.into(),
            value: Value::Int(v.into()),
        }
    }

    pub fn text(label: impl Into<String>, v: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            value: Value::Text(v.into()),
        }
    }
}

impl Serialize for Labeled {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("label", &self.label)?;
        match &self.value {
            Value::Exact(d) => m.serialize_entry("exact", d)?,
            Value::Float(x) => m.serialize_entry("float", &round12(*x))?,
            Value::Int(i) => m.serialize_entry("int", i)?,
            Value::Text(t) => m.serialize_entry("text", t)?,
        }
        m.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Holds {
    Yes,
    No,
    ReportOnly,
}

impl Holds {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Holds::Yes
        } else {
            Holds::No
        }
    }
}

impl Serialize for Holds {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Holds::Yes => s.serialize_bool(true),
            Holds::No => s.serialize_bool(false),
            Holds::ReportOnly => s.serialize_str("report-only"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    MonteCarlo,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub measured: Vec<Labeled>,
    pub bound: Option<Labeled>,
    pub holds: Holds,
    pub method: Method,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub ci_halfwidth: Option<f64>,
    pub elapsed_ms: u64,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, method: Method) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            measured: Vec::new(),
            bound: None,
            holds: Holds::Yes,
            method,
            samples: None,
            seed: None,
            ci_halfwidth: None,
            elapsed_ms: 0,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn measure(&mut self, l: Labeled) {
        self.measured.push(l);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    /// Records one asserted check; the report fails if any check fails.
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.notes.push(format!("FAILED: {}", what.into()));
            if self.holds != Holds::ReportOnly {
                self.holds = Holds::No;
            }
        }
    }

    /// True when the report asserts something and that assertion failed.
    pub fn failed(&self) -> bool {
        self.holds == Holds::No
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// JSON without the wall-clock field, so identical runs produce identical bytes.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("plain data serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("elapsed_ms");
        }
        serde_json::to_string_pretty(&v).expect("plain data serializes")
    }

    /// Sort key: name, then parameters.
    pub fn sort_key(&self) -> (String, String) {
        (self.name.clone(), format!("{:?}", self.params))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.holds {
            Holds::Yes => "HOLDS",
            Holds::No => "FAILS",
            Holds::ReportOnly => "REPORT-ONLY",
        };
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            f,
            "[{status}] {} ({}) {}",
            self.name,
            method_name(self.method),
            params.join(" ")
        )?;
        for m in &self.measured {
            writeln!(f, "  {}: {}", m.label, m.value)?;
        }
        if let Some(b) = &self.bound {
            writeln!(f, "  bound {}: {}", b.label, b.value)?;
        }
        if let Some(s) = self.samples {
            writeln!(f, "  samples: {s}")?;
        }
        if let Some(s) = self.seed {
            writeln!(f, "  seed: {s}")?;
        }
        if let Some(c) = self.ci_halfwidth {
            writeln!(f, "  ci_halfwidth: {}", fmt12(c))?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        write!(f, "  elapsed: {} ms", self.elapsed_ms)
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Exhaustive => "exhaustive",
        Method::MonteCarlo => "monte-carlo",
        Method::ClosedForm => "closed-form",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digit_formatting() {
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(3.5200000000023), "3.52");
        assert_eq!(fmt12(3.5200000000123), "3.52000000001");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(352.045_678_912_345_6), "352.045678912");
        assert_eq!(fmt12(6.0), "6");
        assert_eq!(fmt12(1.5e-7), "1.5e-7");
        assert_eq!(fmt12(-0.25), "-0.25");
        assert_eq!(round12(std::f64::consts::SQRT_2).to_string(), "1.41421356237");
    }

    #[test]
    fn json_shape() {
        let mut r = VerificationReport::new("demo", Method::Exhaustive).param("k", 2);
        r.measure(Labeled::exact("bias", DyadicRational::new(7u32, 4)));
        r.measure(Labeled::float("ratio", 1.125));
        r.bound = Some(Labeled::exact("formula", DyadicRational::new(7u32, 4)));
        r.elapsed_ms = 12;
        let j = r.to_json();
        assert!(j.contains("\"exact\": \"7/2^4\""));
        assert!(j.contains("\"holds\": true"));
        assert!(j.contains("\"method\": \"exhaustive\""));
        assert!(j.contains("elapsed_ms"));
        assert!(!r.canonical_json().contains("elapsed_ms"));
        r.holds = Holds::ReportOnly;
        assert!(r.to_json().contains("\"report-only\""));
        r.check(false, "x");
        assert!(!r.failed());
        r.holds = Holds::Yes;
        r.check(false, "y");
        assert!(r.failed());
    }
}
