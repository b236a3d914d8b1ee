use cofix_core::CorpusReport;
use serde::Serialize;

pub fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
    s.push('\n');
    s
}

/// One indented `key: value` line.
pub fn kv(key: &str, value: &str) -> String {
    format!("  {:<24}{value}\n", format!("{key}:"))
}

/// One row per expectation.
pub fn corpus_csv(report: &CorpusReport) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario",
        "label",
        "op",
        "passed",
        "expected",
        "computed",
        "known_discrepancy",
    ])
    .map_err(|e| e.to_string())?;
    for s in &report.scenarios {
        for o in &s.outcomes {
            let passed = if o.passed { "true" } else { "false" };
            w.write_record([
                s.name.as_str(),
                &o.label,
                &o.op,
                passed,
                &o.expected,
                &o.computed,
                o.known_discrepancy.as_deref().unwrap_or(""),
            ])
            .map_err(|e| e.to_string())?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}
