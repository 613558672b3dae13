//! CSV emission with round-trip float formatting.

use std::fmt::Write as _;

/// 17 significant digits.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            buf: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.buf, "{}", fields.join(","));
    }

    pub fn floats(&mut self, values: &[f64]) {
        let fields: Vec<String> = values.iter().map(|v| float(*v)).collect();
        self.row(&fields);
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
