//! JSON and CSV renderings of command payloads.

use adelic_zeta::zeta::{FeScan, ZetaPoint};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Json,
    Csv,
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}_{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        scalar => out.push((prefix.to_string(), cell(scalar))),
    }
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// A single record: pretty JSON, or a one-row CSV with flattened keys.
pub fn record(emit: Emit, v: &Value) -> String {
    match emit {
        Emit::Json => json_text(v),
        Emit::Csv => {
            let mut cells = Vec::new();
            flatten("", v, &mut cells);
            let header: Vec<&str> = cells.iter().map(|(k, _)| k.as_str()).collect();
            table(&header, [cells.iter().map(|(_, x)| x.clone()).collect()])
        }
    }
}

pub fn points(emit: Emit, points: &[ZetaPoint]) -> String {
    match emit {
        Emit::Json => {
            let mut m = Map::new();
            m.insert("points".into(), serde_json::to_value(points).expect("points serialize"));
            if let [a, b] = points {
                let diff = (a.value - b.value).norm();
                m.insert("difference".into(), json!(diff));
                m.insert("combined_err".into(), json!(a.err + b.err));
                m.insert("agree".into(), json!(diff <= a.err + b.err));
            }
            json_text(&Value::Object(m))
        }
        Emit::Csv => table(
            &["method", "s_re", "s_im", "val_re", "val_im", "err"],
            points.iter().map(|p| {
                vec![
                    p.method.as_str().to_string(),
                    p.s.re.to_string(),
                    p.s.im.to_string(),
                    p.value.re.to_string(),
                    p.value.im.to_string(),
                    p.err.to_string(),
                ]
            }),
        ),
    }
}

pub fn fescan(emit: Emit, scan: &FeScan) -> String {
    match emit {
        Emit::Json => json_text(&serde_json::to_value(scan).expect("scan serializes")),
        Emit::Csv => {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            table(
                &["s_re", "s_im", "val_re", "val_im", "err", "refl_re", "refl_im", "residual", "path_residual", "path_err"],
                scan.rows.iter().map(|r| {
                    vec![
                        r.s[0].to_string(),
                        r.s[1].to_string(),
                        r.value[0].to_string(),
                        r.value[1].to_string(),
                        r.err.to_string(),
                        r.reflected[0].to_string(),
                        r.reflected[1].to_string(),
                        r.residual.to_string(),
                        opt(r.path_residual),
                        opt(r.path_err),
                    ]
                }),
            )
        }
    }
}

/// HN output: the full record as JSON, or one CSV row per filtration step.
pub fn hn(emit: Emit, v: &Value) -> String {
    match emit {
        Emit::Json => json_text(v),
        Emit::Csv => {
            let steps = v["steps"].as_array().cloned().unwrap_or_default();
            table(
                &["rank", "degree", "slope"],
                steps.iter().map(|s| vec![cell(&s["rank"]), cell(&s["degree"]), cell(&s["slope"])]),
            )
        }
    }
}
