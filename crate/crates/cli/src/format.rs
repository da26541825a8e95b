//! Deterministic JSON and number formatting.
//!
//! Every float is written with 17 significant digits in exponent form and
//! object keys are sorted, so equal values always give equal bytes.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

/// `{:.16e}`, or an empty string for non-finite values.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

struct Exact17 {
    indent: usize,
    has_value: bool,
}

impl Exact17 {
    fn newline<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for Exact17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Canonical bytes of a JSON value, with a trailing newline.
pub fn write_value(value: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        Exact17 {
            indent: 0,
            has_value: false,
        },
    );
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    out
}

/// Canonical bytes of any serializable value. Non-finite floats become `null`.
pub fn to_canonical<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    Ok(write_value(&serde_json::to_value(value)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        let bytes = write_value(&json!({"b": 0.1, "a": [1.0, -0.25], "n": 3}));
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("\"a\": [\n    1.0000000000000000e0,\n    -2.5000000000000000e-1\n  ]"));
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("\"n\": 3"));
    }

    #[test]
    fn reparse_is_byte_identical() {
        let v = json!({"x": [std::f64::consts::PI, 1e300, -0.0], "e": {}, "l": [], "s": "δ"});
        let once = write_value(&v);
        let again = write_value(&serde_json::from_slice(&once).unwrap());
        assert_eq!(once, again);
    }

    #[test]
    fn non_finite_is_null() {
        let bytes = to_canonical(&vec![f64::INFINITY, f64::NAN]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "[\n  null,\n  null\n]\n");
        assert_eq!(num(f64::NAN), "");
        assert_eq!(num(2.0), "2.0000000000000000e0");
    }
}
