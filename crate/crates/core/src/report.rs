//! Line-oriented `key = value` reports.

use std::fmt;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, prefix: &str, other: Report) {
        for (k, v) in other.entries {
            self.entries.push((format!("{prefix}{k}"), v));
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Formats a bit count, printing integers without a fractional part.
pub fn fmt_bits(bits: f64) -> String {
    if (bits - bits.round()).abs() < 1e-9 {
        format!("{}", bits.round() as i64)
    } else {
        format!("{bits:.6}")
    }
}
