//! Byte-stable text output: every float is printed with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// A float in scientific notation with 17 significant digits.
pub fn f17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Joins floats as one CSV line.
pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|&v| f17(v)).collect::<Vec<_>>().join(",")
}

/// Pretty-printing formatter that writes floats through [`f17`].
struct Precise<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for Precise<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(f17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serialization into memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(f17(1.0), "1.0000000000000000e0");
        assert_eq!(f17(-0.1), "-1.0000000000000001e-1");
        let back: f64 = f17(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn json_roundtrip_and_shape() {
        #[derive(Serialize)]
        struct S {
            x: f64,
            v: Vec<f64>,
            n: usize,
        }
        let s = to_json(&S {
            x: 0.1,
            v: vec![2.5, -1e-20],
            n: 3,
        });
        let parsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["x"].as_f64().unwrap(), 0.1);
        assert_eq!(parsed["v"][1].as_f64().unwrap(), -1e-20);
        assert_eq!(parsed["n"].as_u64().unwrap(), 3);
        assert!(s.contains("\"x\": 1.0000000000000001e-1"));
        assert!(s.ends_with("}\n"));
    }
}
