//! Machine-readable outputs: a fixed-key JSON report and the CSV fringe
//! table. Floats carry 12 significant digits and the key order is fixed, so
//! outputs are byte-stable for a fixed seed.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// Ordered JSON value; objects keep insertion order.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn opt_num(v: Option<f64>) -> Json {
        v.map(Json::Num).unwrap_or(Json::Null)
    }
}

/// Object constructor taking borrowed keys.
pub fn obj<K: Into<String>>(fields: Vec<(K, Json)>) -> Json {
    Json::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
}

/// 12 significant digits; plain decimal in a sane range, scientific outside.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    if !x.is_finite() {
        // Serialized as null by the JSON writer; CSV never sees these.
        return "null".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..=15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn escape(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn render_into(value: &Json, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Json::Null => out.push_str("null"),
        Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Json::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Json::Num(x) if !x.is_finite() => out.push_str("null"),
        Json::Num(x) => out.push_str(&fmt_sig12(*x)),
        Json::Str(s) => escape(s, out),
        Json::Arr(items) if items.is_empty() => out.push_str("[]"),
        Json::Arr(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&pad);
                out.push_str("  ");
                render_into(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&pad);
            out.push(']');
        }
        Json::Obj(fields) if fields.is_empty() => out.push_str("{}"),
        Json::Obj(fields) => {
            out.push('{');
            for (i, (key, item)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&pad);
                out.push_str("  ");
                escape(key, out);
                out.push_str(": ");
                render_into(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&pad);
            out.push('}');
        }
    }
}

pub fn render_json(value: &Json) -> String {
    let mut out = String::new();
    render_into(value, 0, &mut out);
    out.push('\n');
    out
}

/// The mandatory-header fringe table.
pub fn render_fringe_csv(points: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("theta,rate_plus,rate_minus\n");
    for (theta, plus, minus) in points {
        let _ = writeln!(out, "{},{},{}", fmt_sig12(*theta), fmt_sig12(*plus), fmt_sig12(*minus));
    }
    out
}

/// Write-then-rename so failures never leave a partial output file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    fs::write(&tmp_path, contents)?;
    fs::rename(&tmp_path, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig12(0.25), "0.250000000000");
        assert_eq!(fmt_sig12(1.0), "1.00000000000");
        assert_eq!(fmt_sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig12(1.0e-7), "1.00000000000e-7");
        assert_eq!(fmt_sig12(0.0), "0.0");
    }

    #[test]
    fn json_renders_fixed_order() {
        let value = obj(vec![
            ("b", Json::Num(0.5)),
            ("a", Json::Bool(true)),
            ("n", Json::Null),
        ]);
        let text = render_json(&value);
        let b = text.find("\"b\"").unwrap();
        let a = text.find("\"a\"").unwrap();
        assert!(b < a, "insertion order must be preserved");
        assert!(text.contains("null"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let text = render_fringe_csv(&[(0.0, 1.0, 2.0), (0.5, 3.0, 4.0)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "theta,rate_plus,rate_minus");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.0,"));
    }
}
