//! Deterministic JSON and CSV writers with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};

/// Compact JSON with every float printed as `{:.16e}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFloatFormatter;

impl Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        CompactFormatter.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `chi_tilde,intensity` rows.
pub fn curve_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("chi_tilde,intensity\n");
    for &(t, y) in curve {
        out.push_str(&fmt_f64(t));
        out.push(',');
        out.push_str(&fmt_f64(y));
        out.push('\n');
    }
    out
}
