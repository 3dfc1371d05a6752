//! Machine-readable report: the document serialized as JSON, schema
//! version 1. Key order is deterministic (maps are ordered), so output is
//! byte-stable for fixed inputs.

use super::ReportDocument;

pub fn emit_machine(doc: &ReportDocument) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("document serializes");
    out.push('\n');
    out
}
