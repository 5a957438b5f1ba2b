//! Silently-evolved method detection between two snapshots, heuristic
//! change triage and modifier census.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use similar::{capture_diff_slices, Algorithm, DiffOp};

use crate::error::{Error, Result};
use crate::extract::{body_tokens, normalize_body, normalize_comment};
use crate::lexer::is_keyword;
use crate::model::{AccessLevel, ApiSnapshot, MethodIdentity, MethodRecord, Modifier, ModifierSet};

/// Heuristic pre-label for human review of a body change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeClass {
    FormattingOnly,
    LikelyRefactoring,
    SemanticCandidate,
    Uncertain,
}

impl ChangeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeClass::FormattingOnly => "formatting-only",
            ChangeClass::LikelyRefactoring => "likely-refactoring",
            ChangeClass::SemanticCandidate => "semantic-candidate",
            ChangeClass::Uncertain => "uncertain",
        }
    }
}

/// Modifier sets (plus `@hide`) before and after a release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifierTransition {
    pub old: ModifierSet,
    pub old_hide: bool,
    pub new: ModifierSet,
    pub new_hide: bool,
}

impl ModifierTransition {
    pub fn old_label(&self) -> String {
        self.old.label(self.old_hide)
    }

    pub fn new_label(&self) -> String {
        self.new.label(self.new_hide)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemEntry {
    pub identity: MethodIdentity,
    pub old_version: String,
    pub new_version: String,
    pub old_record: MethodRecord,
    pub new_record: MethodRecord,
    pub modifier_transition: Option<ModifierTransition>,
    pub change_class: ChangeClass,
    pub is_pasem: bool,
}

pub(crate) fn comments_equal(a: &MethodRecord, b: &MethodRecord, strict: bool) -> bool {
    if strict {
        normalize_comment(&a.raw_doc_comment, true) == normalize_comment(&b.raw_doc_comment, true)
    } else {
        a.doc_comment == b.doc_comment
    }
}

pub(crate) fn bodies_differ(a: &MethodRecord, b: &MethodRecord, strict: bool) -> bool {
    if strict {
        normalize_body(a.raw_body.as_deref(), true) != normalize_body(b.raw_body.as_deref(), true)
    } else {
        a.body != b.body
    }
}

/// Pairs every identity present in both snapshots and keeps those whose
/// (nonempty) doc comments are equal while their bodies differ.
pub fn detect_sems(old: &ApiSnapshot, new: &ApiSnapshot, strict: bool) -> Result<Vec<SemEntry>> {
    if old.label() == new.label() {
        return Err(Error::SameSnapshot(old.label().to_owned()));
    }
    let mut out = Vec::new();
    for (id, o) in &old.methods {
        let Some(n) = new.get(id) else { continue };
        if !o.has_doc() || !n.has_doc() {
            continue;
        }
        if !comments_equal(o, n, strict) || !bodies_differ(o, n, strict) {
            continue;
        }
        let change_class = classify_change(o.raw_body.as_deref(), n.raw_body.as_deref())
            .unwrap_or(ChangeClass::FormattingOnly);
        out.push(SemEntry {
            identity: id.clone(),
            old_version: old.label().to_owned(),
            new_version: new.label().to_owned(),
            old_record: o.clone(),
            new_record: n.clone(),
            modifier_transition: diff_modifiers(o, n),
            change_class,
            is_pasem: n.access() == AccessLevel::Public,
        });
    }
    // BTreeMap iteration already yields identity order
    Ok(out)
}

/// Labels a body change by the first matching rule: formatting-only,
/// body presence change, qualifier/rename refactoring, statement or block
/// delta, otherwise uncertain.
pub fn classify_change(old_raw: Option<&str>, new_raw: Option<&str>) -> Result<ChangeClass> {
    match (old_raw, new_raw) {
        (None, None) => Err(Error::IdenticalBodies),
        (None, Some(_)) | (Some(_), None) => Ok(ChangeClass::Uncertain),
        (Some(a), Some(b)) => {
            let ta = body_tokens(a);
            let tb = body_tokens(b);
            if ta == tb {
                return if a == b {
                    Err(Error::IdenticalBodies)
                } else {
                    Ok(ChangeClass::FormattingOnly)
                };
            }
            Ok(classify_tokens(&ta, &tb))
        }
    }
}

/// Rules 3 to 5 of [`classify_change`] on two differing token sequences.
pub fn classify_tokens(old: &[String], new: &[String]) -> ChangeClass {
    if consistent_rename(old, new) {
        return ChangeClass::LikelyRefactoring;
    }
    let ops = capture_diff_slices(Algorithm::Myers, old, new);
    if qualifier_only(&ops, old, new) {
        return ChangeClass::LikelyRefactoring;
    }
    let structural = |t: &String| matches!(t.as_str(), ";" | "{" | "}");
    for op in &ops {
        let touched = match *op {
            DiffOp::Equal { .. } => continue,
            DiffOp::Delete {
                old_index, old_len, ..
            } => old[old_index..old_index + old_len].iter().any(structural),
            DiffOp::Insert {
                new_index, new_len, ..
            } => new[new_index..new_index + new_len].iter().any(structural),
            DiffOp::Replace {
                old_index,
                old_len,
                new_index,
                new_len,
            } => {
                old[old_index..old_index + old_len].iter().any(structural)
                    || new[new_index..new_index + new_len].iter().any(structural)
            }
        };
        if touched {
            return ChangeClass::SemanticCandidate;
        }
    }
    ChangeClass::Uncertain
}

fn is_ident(tok: &str) -> bool {
    tok.chars()
        .next()
        .is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$')
        && !is_keyword(tok)
}

/// Same shape, with a bijective renaming of at most three identifiers.
fn consistent_rename(old: &[String], new: &[String]) -> bool {
    if old.len() != new.len() {
        return false;
    }
    let mut fwd: HashMap<&str, &str> = HashMap::new();
    let mut back: HashMap<&str, &str> = HashMap::new();
    for (a, b) in old.iter().zip(new) {
        if a == b && !is_ident(a) {
            continue;
        }
        if !is_ident(a) || !is_ident(b) {
            return false;
        }
        if *fwd.entry(a).or_insert(b) != b.as_str() || *back.entry(b).or_insert(a) != a.as_str() {
            return false;
        }
    }
    let renamed = fwd.iter().filter(|(a, b)| a != b).count();
    (1..=3).contains(&renamed)
}

/// Every edit is a pure insertion or deletion of `Name .` qualifiers in
/// front of an identifier.
fn qualifier_only(ops: &[DiffOp], old: &[String], new: &[String]) -> bool {
    let mut any = false;
    for op in ops {
        let ok = match *op {
            DiffOp::Equal { .. } => true,
            DiffOp::Delete {
                old_index, old_len, ..
            } => qualifier_run(old, old_index, old_index + old_len),
            DiffOp::Insert {
                new_index, new_len, ..
            } => qualifier_run(new, new_index, new_index + new_len),
            DiffOp::Replace { .. } => false,
        };
        if !ok {
            return false;
        }
        any |= !matches!(op, DiffOp::Equal { .. });
    }
    any
}

/// Whether `seq[start..end)`, or an equivalent slide of it, is a run of
/// `Ident .` pairs that directly precedes an identifier and does not itself
/// follow a `.`.
fn qualifier_run(seq: &[String], start: usize, end: usize) -> bool {
    let fits = |s: usize, e: usize| {
        let run = &seq[s..e];
        run.len().is_multiple_of(2)
            && run
                .chunks(2)
                .all(|pair| (is_ident(&pair[0]) || pair[0] == "this") && pair[1] == ".")
            && seq.get(e).is_some_and(|t| is_ident(t))
            && (s == 0 || seq[s - 1] != ".")
    };
    if fits(start, end) {
        return true;
    }
    let (mut s, mut e) = (start, end);
    while s > 0 && seq[s - 1] == seq[e - 1] {
        s -= 1;
        e -= 1;
        if fits(s, e) {
            return true;
        }
    }
    let (mut s, mut e) = (start, end);
    while e < seq.len() && seq[s] == seq[e] {
        s += 1;
        e += 1;
        if fits(s, e) {
            return true;
        }
    }
    false
}

/// The transition between two records' modifier sets, if any.
pub fn diff_modifiers(old: &MethodRecord, new: &MethodRecord) -> Option<ModifierTransition> {
    (old.modifiers != new.modifiers || old.hide_annotation != new.hide_annotation).then(|| {
        ModifierTransition {
            old: old.modifiers.clone(),
            old_hide: old.hide_annotation,
            new: new.modifiers.clone(),
            new_hide: new.hide_annotation,
        }
    })
}

/// Census column under an access level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubModifier {
    Plain,
    Static,
    Final,
    Abstract,
    Hide,
    Native,
}

impl SubModifier {
    pub const ALL: [SubModifier; 6] = [
        SubModifier::Plain,
        SubModifier::Static,
        SubModifier::Final,
        SubModifier::Abstract,
        SubModifier::Hide,
        SubModifier::Native,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubModifier::Plain => "-",
            SubModifier::Static => "static",
            SubModifier::Final => "final",
            SubModifier::Abstract => "abstract",
            SubModifier::Hide => "hide",
            SubModifier::Native => "native",
        }
    }
}

/// SEM counts per (access level, sub-modifier) for one version pair. An
/// entry with several sub-modifiers is counted in each of their cells;
/// only entries with none land in the plain column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierCensus {
    pub version_pair: Option<(String, String)>,
    pub counts: BTreeMap<(AccessLevel, SubModifier), u64>,
    /// Entries per access level, each entry counted once.
    pub per_access: BTreeMap<AccessLevel, u64>,
}

impl ModifierCensus {
    fn empty() -> Self {
        let mut counts = BTreeMap::new();
        let mut per_access = BTreeMap::new();
        for a in AccessLevel::ALL {
            per_access.insert(a, 0);
            for s in SubModifier::ALL {
                counts.insert((a, s), 0);
            }
        }
        ModifierCensus {
            version_pair: None,
            counts,
            per_access,
        }
    }

    pub fn get(&self, access: AccessLevel, sub: SubModifier) -> u64 {
        self.counts.get(&(access, sub)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> u64 {
        self.per_access.values().sum()
    }

    /// Table layout: one header row of `access:sub` columns and one data row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["old_version".to_owned(), "new_version".to_owned()];
        let (old, new) = self.version_pair.clone().unwrap_or_default();
        let mut row = vec![old, new];
        for a in AccessLevel::ALL {
            for s in SubModifier::ALL {
                header.push(format!("{}:{}", a.as_str(), s.as_str()));
                row.push(self.get(a, s).to_string());
            }
        }
        w.write_record(&header)?;
        w.write_record(&row)?;
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "census.csv".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Tallies entries of a single version pair by the old record's access
/// level, modifiers and `@hide` flag.
pub fn census_modifiers(entries: &[SemEntry]) -> Result<ModifierCensus> {
    let mut census = ModifierCensus::empty();
    for e in entries {
        let pair = (e.old_version.clone(), e.new_version.clone());
        match &census.version_pair {
            None => census.version_pair = Some(pair),
            Some(p) if *p != pair => {
                return Err(Error::MixedVersionPairs(
                    format!("{}->{}", p.0, p.1),
                    format!("{}->{}", pair.0, pair.1),
                ))
            }
            Some(_) => {}
        }
        let rec = &e.old_record;
        let access = rec.access();
        *census.per_access.entry(access).or_default() += 1;
        let mut subs = Vec::new();
        for (m, s) in [
            (Modifier::Static, SubModifier::Static),
            (Modifier::Final, SubModifier::Final),
            (Modifier::Abstract, SubModifier::Abstract),
            (Modifier::Native, SubModifier::Native),
        ] {
            if rec.modifiers.contains(m) {
                subs.push(s);
            }
        }
        if rec.hide_annotation {
            subs.push(SubModifier::Hide);
        }
        if subs.is_empty() {
            subs.push(SubModifier::Plain);
        }
        for s in subs {
            *census.counts.entry((access, s)).or_default() += 1;
        }
    }
    Ok(census)
}

fn escape_body(body: Option<&str>) -> String {
    body.map(|b| {
        b.replace("\r\n", "\n")
            .replace('\\', "\\\\")
            .replace('\n', "\\n")
    })
    .unwrap_or_default()
}

/// Side-by-side worksheet for manual review: `identity,change_class,
/// old_body,new_body`, every field quoted, backslashes doubled and
/// newlines written as `\n`.
pub fn triage_csv(entries: &[SemEntry]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Always)
        .from_writer(Vec::new());
    w.write_record(["identity", "change_class", "old_body", "new_body"])?;
    for e in entries {
        w.write_record([
            e.identity.to_string(),
            e.change_class.as_str().to_owned(),
            escape_body(e.old_record.raw_body.as_deref()),
            escape_body(e.new_record.raw_body.as_deref()),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "triage.csv".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
