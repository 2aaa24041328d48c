//! JSON and CSV writers. Floats are always printed with 17 significant
//! digits so that every value round-trips exactly.

use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub const TOOL: &str = "constwidth";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pretty printer that writes floats as `d.dddddddddddddddde±x`.
pub struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Default for FullPrecision<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::new())
    }
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// A float with 17 significant digits. Non-finite values are spelled as
/// in Rust (`NaN`, `inf`); JSON output never reaches this for them.
pub fn float(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        value.to_string()
    }
}

pub fn timestamp_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub config: &'a C,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorObject>,
}

#[derive(Serialize)]
pub struct ErrorObject {
    pub kind: &'static str,
    pub message: String,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision::default());
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let json = to_json(&[0.1, 1.0 / 3.0, -2.5e-300, f64::NAN]);
        let back: Vec<Option<f64>> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Some(0.1), Some(1.0 / 3.0), Some(-2.5e-300), None]);
        assert!(json.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn integers_are_untouched() {
        assert_eq!(to_json(&42u64), "42\n");
    }
}
