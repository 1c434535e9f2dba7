//! Report rendering: every subcommand builds one JSON object; the CSV view
//! is derived from that same object so the two always carry equal values.

use serde_json::Value;

/// Renders a single cell. Arrays become `;`-joined scalars, null becomes
/// an empty cell.
fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn quote(cell: String) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell
    }
}

/// CSV rendering of a report object. Isolation traces flatten to one row
/// per step with the trace-level fields repeated; every other report is a
/// header row plus a single value row, columns in key order.
pub fn to_csv(report: &Value) -> String {
    let object = report.as_object().expect("reports are JSON objects");
    if let Some(steps) = object.get("steps").and_then(Value::as_array) {
        let head = ["method", "step_count", "bound", "bound_satisfied"];
        let step_cols = ["witness_bits", "scale", "d", "removed", "distances"];
        let mut out = String::new();
        out.push_str(&head.join(","));
        out.push_str(",step,");
        out.push_str(&step_cols.join(","));
        out.push('\n');
        let prefix: Vec<String> = head
            .iter()
            .map(|k| quote(cell(object.get(*k).unwrap_or(&Value::Null))))
            .collect();
        for (idx, step) in steps.iter().enumerate() {
            let mut row = prefix.clone();
            row.push((idx + 1).to_string());
            for k in step_cols {
                row.push(quote(cell(step.get(k).unwrap_or(&Value::Null))));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    } else {
        let mut header = Vec::new();
        let mut row = Vec::new();
        for (k, v) in object {
            header.push(k.clone());
            row.push(quote(cell(v)));
        }
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}
