//! CSV emission.
//!
//! Every file starts with a header row. Reals are written with 10 significant
//! digits: plain decimal notation when the decimal exponent lies in `[-5, 10)`,
//! scientific (`1.234e-7`) otherwise, trailing zeros trimmed. Counts are
//! written as integers. A missing value (failed row) is an empty field.

use std::fmt::Write;

/// `x` rounded to 10 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Free text made safe for a CSV field.
pub fn fmt_text(s: &str) -> String {
    s.replace([',', '\n', '\r', '"'], ";")
}

/// Accumulates rows of an in-memory CSV document.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    buf: String,
    columns: usize,
}

/// One CSV field.
#[derive(Debug, Clone, Copy)]
pub enum Field<'a> {
    Real(f64),
    Count(usize),
    Text(&'a str),
    Missing,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[Field<'_>]) {
        assert_eq!(fields.len(), self.columns, "CSV row width");
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match f {
                Field::Real(x) => self.buf.push_str(&fmt_real(*x)),
                Field::Count(n) => write!(self.buf, "{n}").expect("write to String"),
                Field::Text(s) => self.buf.push_str(&fmt_text(s)),
                Field::Missing => {}
            }
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}
