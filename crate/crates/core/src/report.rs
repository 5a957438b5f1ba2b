//! Line-oriented report rows. Every report is JSON Lines with a fixed
//! field order, so identical inputs give byte-identical files.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::evolution::{EventKind, EvolutionChain};
use crate::extract::normalize_body;
use crate::model::{MethodIdentity, MethodRecord};
use crate::semdiff::{ChangeClass, SemEntry};
use crate::usage::{GuardInfo, MatchConfidence, UsageFinding};

/// Lowercase hex SHA-256 of the normalized body.
pub fn body_hash(raw: Option<&str>, strict: bool) -> Option<String> {
    normalize_body(raw, strict).map(|b| hex::encode(Sha256::digest(b.as_bytes())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatIdentity {
    #[serde(rename = "identity.qualified_class")]
    pub qualified_class: String,
    #[serde(rename = "identity.method_name")]
    pub method_name: String,
    #[serde(rename = "identity.param_types")]
    pub param_types: Vec<String>,
    #[serde(rename = "identity.return_type")]
    pub return_type: String,
}

impl From<&MethodIdentity> for FlatIdentity {
    fn from(id: &MethodIdentity) -> Self {
        FlatIdentity {
            qualified_class: id.qualified_class.clone(),
            method_name: id.method_name.clone(),
            param_types: id.param_types.clone(),
            return_type: id.return_type.clone(),
        }
    }
}

impl From<FlatIdentity> for MethodIdentity {
    fn from(f: FlatIdentity) -> Self {
        MethodIdentity {
            qualified_class: f.qualified_class,
            method_name: f.method_name,
            param_types: f.param_types,
            return_type: f.return_type,
        }
    }
}

/// One line of a snapshot dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpRow {
    #[serde(flatten)]
    pub identity: FlatIdentity,
    pub modifiers: Vec<String>,
    pub hide: bool,
    pub doc_comment: String,
    pub body_hash: Option<String>,
    pub file: String,
    pub start_line: u32,
    pub end_line: u32,
}

impl DumpRow {
    pub fn new(rec: &MethodRecord, strict: bool) -> Self {
        DumpRow {
            identity: (&rec.identity).into(),
            modifiers: rec
                .modifiers
                .iter()
                .map(|m| m.as_str().to_owned())
                .collect(),
            hide: rec.hide_annotation,
            doc_comment: rec.doc_comment.clone(),
            body_hash: body_hash(rec.raw_body.as_deref(), strict),
            file: rec.file.clone(),
            start_line: rec.line_span.start,
            end_line: rec.line_span.end,
        }
    }
}

/// One line of a SEM report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemRow {
    #[serde(flatten)]
    pub identity: FlatIdentity,
    pub old_version: String,
    pub new_version: String,
    pub change_class: ChangeClass,
    pub is_pasem: bool,
    pub modifier_old: Option<String>,
    pub modifier_new: Option<String>,
    pub old_body_hash: Option<String>,
    pub new_body_hash: Option<String>,
    pub old_file: String,
    pub new_file: String,
    pub old_lines: [u32; 2],
    pub new_lines: [u32; 2],
}

impl SemRow {
    pub fn new(e: &SemEntry, strict: bool) -> Self {
        let (o, n) = (&e.old_record, &e.new_record);
        SemRow {
            identity: (&e.identity).into(),
            old_version: e.old_version.clone(),
            new_version: e.new_version.clone(),
            change_class: e.change_class,
            is_pasem: e.is_pasem,
            modifier_old: e.modifier_transition.as_ref().map(|t| t.old_label()),
            modifier_new: e.modifier_transition.as_ref().map(|t| t.new_label()),
            old_body_hash: body_hash(o.raw_body.as_deref(), strict),
            new_body_hash: body_hash(n.raw_body.as_deref(), strict),
            old_file: o.file.clone(),
            new_file: n.file.clone(),
            old_lines: [o.line_span.start, o.line_span.end],
            new_lines: [n.line_span.start, n.line_span.end],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRow {
    pub old_version: String,
    pub new_version: String,
    pub kinds: Vec<EventKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRow {
    #[serde(flatten)]
    pub identity: FlatIdentity,
    pub silent_update_count: usize,
    pub late_doc_update: bool,
    pub gapped: bool,
    pub latest_is_pasem: bool,
    pub events: Vec<EventRow>,
}

impl From<&EvolutionChain> for ChainRow {
    fn from(c: &EvolutionChain) -> Self {
        ChainRow {
            identity: (&c.identity).into(),
            silent_update_count: c.silent_update_count,
            late_doc_update: c.late_doc_update,
            gapped: c.gapped,
            latest_is_pasem: c.latest_is_pasem,
            events: c
                .events
                .iter()
                .map(|e| EventRow {
                    old_version: e.old_version.clone(),
                    new_version: e.new_version.clone(),
                    kinds: e.kinds.iter().copied().collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingRow {
    pub client: String,
    #[serde(flatten)]
    pub identity: FlatIdentity,
    pub client_file: String,
    pub call_line: u32,
    pub match_confidence: MatchConfidence,
    pub guard: Option<GuardInfo>,
}

impl From<&UsageFinding> for FindingRow {
    fn from(f: &UsageFinding) -> Self {
        FindingRow {
            client: f.client.clone(),
            identity: (&f.pasem_identity).into(),
            client_file: f.client_file.clone(),
            call_line: f.call_line,
            match_confidence: f.match_confidence,
            guard: f.guard.clone(),
        }
    }
}

pub fn to_jsonl<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(&row)?);
        out.push('\n');
    }
    Ok(out)
}

/// Identities of the public entries of a SEM report, deduplicated and
/// sorted.
pub fn pasems_from_report(text: &str) -> Result<Vec<MethodIdentity>> {
    let mut ids = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let row: SemRow = serde_json::from_str(line)?;
        if row.is_pasem {
            ids.push(MethodIdentity::from(row.identity));
        }
    }
    ids.sort();
    ids.dedup();
    Ok(ids)
}
