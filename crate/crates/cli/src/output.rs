use serde::Serialize;
use serde_json::Value;

use bilzh_core::Error;

use crate::Format;

pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Report printed before the diagnostic, e.g. a failed verification.
    pub output: Option<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            ref e if e.is_verification_failure() => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
            output: None,
        }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
            output: None,
        }
    }

    pub fn verification(message: impl Into<String>, output: String) -> Self {
        Failure {
            code: 1,
            message: message.into(),
            output: Some(output),
        }
    }
}

pub type CmdResult = std::result::Result<String, Failure>;

fn csv_field(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// Pretty JSON, or for CSV a header of the top-level keys and one row.
pub fn render<T: Serialize>(value: &T, format: Format) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&v).unwrap()),
        Format::Csv => match &v {
            Value::Object(map) => {
                let keys: Vec<&str> = map.keys().map(String::as_str).collect();
                let row: Vec<String> = map.values().map(csv_field).collect();
                format!("{}\n{}\n", keys.join(","), row.join(","))
            }
            other => format!("{}\n", csv_field(other)),
        },
    }
}

/// CSV table with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|f| csv_field(&Value::String(f.clone()))).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
