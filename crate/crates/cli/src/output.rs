use std::fs;
use std::io::Write;
use std::path::PathBuf;

/// Exit-code contract: 0 all-pass, 1 verdict failure, 2 usage/parse error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Writes a rendered report to the output path or stdout.
pub fn emit(out: &Option<PathBuf>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())
        }
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut body = serde_json::to_string_pretty(value).expect("serializable report");
    body.push('\n');
    body
}

/// RFC-4180 quoting: fields containing commas, quotes, or line breaks are
/// wrapped in double quotes with inner quotes doubled.
pub fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        // shortest round-trip representation, stable across runs
        let mut buffer = ryu_string(x);
        if !buffer.contains('.') && !buffer.contains('e') && !buffer.contains("inf") {
            buffer.push_str(".0");
        }
        buffer
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn ryu_string(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| format!("{x}"))
}
