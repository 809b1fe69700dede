//! Deterministic JSON reports.
//!
//! Object keys are emitted in sorted order, integers and exact rationals as
//! strings, and decimals as strings rounded to a stated number of digits.

use std::time::Duration;

use heckeamp::Verdict;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Digits after the point for decimal renderings of exact rationals.
pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Map<String, Value>,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(command: &'static str, config: Map<String, Value>) -> Self {
        Self { command, config, results: Value::Null, verdicts: Vec::new() }
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool) {
        self.verdicts.push(Verdict::new(name, pass));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn first_failure(&self) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| !v.pass)
    }

    pub fn to_value(&self, wall_time: Option<Duration>) -> Value {
        let verdicts: Vec<Value> = self.verdicts.iter().map(|v| json!({"name": v.name, "pass": v.pass})).collect();
        let mut out = json!({
            "tool": "heckeamp",
            "toolVersion": TOOL_VERSION,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "verdicts": verdicts,
            "allPass": self.all_pass(),
        });
        if let Some(t) = wall_time {
            out["wallTimeSeconds"] = Value::String(format!("{:.3}", t.as_secs_f64()));
        }
        out
    }

    pub fn render(&self, wall_time: Option<Duration>) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value(wall_time)).expect("report is valid JSON");
        s.push('\n');
        s
    }
}

pub fn int(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

pub fn ints<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(xs.into_iter().map(int).collect())
}

/// `"n/d"`, or `"n"` for integers.
pub fn exact(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

/// `x` rounded half away from zero to `digits` places.
pub fn decimal_string(x: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (x.abs() * BigRational::from_integer(scale.clone())).round().to_integer();
    let (int_part, frac_part) = (&scaled / &scale, &scaled % &scale);
    let sign = if x.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{frac_part:0>digits$}")
}

pub fn decimal(x: &BigRational) -> Value {
    Value::String(decimal_string(x, DECIMAL_DIGITS))
}

/// A floating-point quantity in scientific notation with 9 fractional digits.
pub fn float(x: f64) -> Value {
    Value::String(format!("{x:.9e}"))
}
