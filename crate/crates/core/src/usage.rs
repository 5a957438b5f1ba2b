//! Client usage scanning: finds call sites of flagged public methods in a
//! client source tree and checks whether each call sits under an API-level
//! version guard.
//!
//! Matching is textual (method name plus argument count, with the receiver
//! qualifier raising confidence); nothing is resolved. Guard detection is
//! intraprocedural and purely structural: only `if`/`else` constructs that
//! lexically enclose the call and compare `SDK_INT` with a literal or a
//! `VERSION_CODES` constant are recognized.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{enumerate_all, DEFAULT_SUFFIX};
use crate::error::{Error, Result};
use crate::lexer::{tokenize_source, Token, TokenKind};
use crate::model::{Diagnostic, MethodIdentity};

const BUILTIN_CODES: &str = include_str!("../data/version_codes.csv");

/// `Build.VERSION_CODES` name to API level table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionCodes {
    levels: BTreeMap<String, u32>,
}

impl Default for VersionCodes {
    fn default() -> Self {
        Self::builtin()
    }
}

impl VersionCodes {
    pub fn builtin() -> Self {
        Self::parse_csv(BUILTIN_CODES).expect("built-in version codes table is valid")
    }

    /// Parses `name,level` rows; a leading `name,level` header is optional.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut levels = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (idx == 0 && line == "name,level") {
                continue;
            }
            let (name, level) = line.split_once(',').ok_or_else(|| Error::CodesTable {
                line: lineno,
                reason: "expected `name,level`".into(),
            })?;
            let level: u32 = level
                .trim()
                .parse()
                .ok()
                .filter(|&l| l >= 1)
                .ok_or_else(|| Error::CodesTable {
                    line: lineno,
                    reason: format!("invalid level `{}`", level.trim()),
                })?;
            levels.insert(name.trim().to_owned(), level);
        }
        Ok(VersionCodes { levels })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text)
    }

    /// Adds or overrides entries.
    pub fn extend(&mut self, other: &VersionCodes) {
        for (k, v) in &other.levels {
            self.levels.insert(k.clone(), *v);
        }
    }

    pub fn level(&self, name: &str) -> Option<u32> {
        self.levels.get(name).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl Comparison {
    fn parse(op: &str) -> Option<Self> {
        Some(match op {
            "<" => Comparison::Lt,
            "<=" => Comparison::Le,
            ">" => Comparison::Gt,
            ">=" => Comparison::Ge,
            "==" => Comparison::Eq,
            "!=" => Comparison::Ne,
            _ => return None,
        })
    }

    /// The operator with its operands swapped (`28 > x` is `x < 28`).
    fn flipped(self) -> Self {
        match self {
            Comparison::Lt => Comparison::Gt,
            Comparison::Le => Comparison::Ge,
            Comparison::Gt => Comparison::Lt,
            Comparison::Ge => Comparison::Le,
            other => other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
            Comparison::Eq => "==",
            Comparison::Ne => "!=",
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Then,
    Else,
}

/// The version check protecting a call. Polarity and level are recorded
/// verbatim; whether they are the right ones is not judged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardInfo {
    pub comparison: Comparison,
    pub level: u32,
    pub branch: Branch,
    pub guard_line: u32,
    /// Token positions (inclusive) of the branch holding the call.
    #[serde(skip)]
    pub branch_span: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchConfidence {
    NameAndArity,
    Qualified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageFinding {
    pub client: String,
    pub pasem_identity: MethodIdentity,
    pub client_file: String,
    pub call_line: u32,
    pub match_confidence: MatchConfidence,
    pub guard: Option<GuardInfo>,
    /// Position of the method name token among the file's code tokens.
    #[serde(skip)]
    pub call_token: usize,
}

impl UsageFinding {
    pub fn is_protected(&self) -> bool {
        self.guard.is_some()
    }
}

/// Code tokens of one client file with bracket partners.
pub struct SourceTokens {
    toks: Vec<Token>,
    partner: Vec<usize>,
}

impl SourceTokens {
    pub fn new(text: &str) -> Result<Self> {
        let toks: Vec<Token> = tokenize_source(text)?
            .into_iter()
            .filter(|t| !t.kind.is_comment())
            .collect();
        let mut partner = vec![usize::MAX; toks.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            if t.kind != TokenKind::Punctuation {
                continue;
            }
            match t.text.as_str() {
                "{" | "(" | "[" => stack.push(i),
                "}" | ")" | "]" => {
                    let want = match t.text.as_str() {
                        "}" => "{",
                        ")" => "(",
                        _ => "[",
                    };
                    match stack.pop() {
                        Some(o) if toks[o].text == want => {
                            partner[o] = i;
                            partner[i] = o;
                        }
                        _ => {
                            return Err(Error::Parse {
                                line: t.line,
                                message: format!("unbalanced `{}`", t.text),
                            })
                        }
                    }
                }
                _ => {}
            }
        }
        if let Some(&o) = stack.last() {
            return Err(Error::Parse {
                line: toks[o].line,
                message: format!("`{}` is never closed", toks[o].text),
            });
        }
        Ok(SourceTokens { toks, partner })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.toks
    }

    fn is(&self, i: usize, text: &str) -> bool {
        i < self.toks.len() && self.toks[i].is(text)
    }

    /// Last token of the statement starting at `s`.
    fn statement_end(&self, s: usize, depth: usize) -> usize {
        let n = self.toks.len();
        if s >= n {
            return n.saturating_sub(1);
        }
        if depth > 64 {
            return self.simple_statement_end(s);
        }
        if self.is(s, "{") {
            return self.partner[s];
        }
        if self.is(s, "if") && self.is(s + 1, "(") {
            let then_end = self.statement_end(self.partner[s + 1] + 1, depth + 1);
            if self.is(then_end + 1, "else") {
                return self.statement_end(then_end + 2, depth + 1);
            }
            return then_end;
        }
        if (self.is(s, "for") || self.is(s, "while") || self.is(s, "synchronized"))
            && self.is(s + 1, "(")
        {
            return self.statement_end(self.partner[s + 1] + 1, depth + 1);
        }
        self.simple_statement_end(s)
    }

    fn simple_statement_end(&self, mut i: usize) -> usize {
        let n = self.toks.len();
        while i < n {
            if self.is(i, ";") {
                return i;
            }
            if self.is(i, "}") {
                return i.saturating_sub(1);
            }
            if self.is(i, "{") || self.is(i, "(") || self.is(i, "[") {
                i = self.partner[i];
            }
            i += 1;
        }
        n - 1
    }
}

struct IfConstruct {
    if_tok: usize,
    cond: (usize, usize),
    then_span: (usize, usize),
    else_span: Option<(usize, usize)>,
}

fn if_constructs(src: &SourceTokens) -> Vec<IfConstruct> {
    let mut out = Vec::new();
    for (i, t) in src.toks.iter().enumerate() {
        if !(t.kind == TokenKind::Keyword && t.text == "if") || !src.is(i + 1, "(") {
            continue;
        }
        let close = src.partner[i + 1];
        let then_start = close + 1;
        if then_start >= src.toks.len() {
            continue;
        }
        let then_end = src.statement_end(then_start, 0);
        let else_span = src.is(then_end + 1, "else").then(|| {
            let s = then_end + 2;
            (s, src.statement_end(s, 0))
        });
        out.push(IfConstruct {
            if_tok: i,
            cond: (i + 2, close),
            then_span: (then_start, then_end),
            else_span,
        });
    }
    out
}

fn parse_int(text: &str) -> Option<u32> {
    let t = text.trim_end_matches(['l', 'L']).replace('_', "");
    t.parse().ok()
}

/// Value of a level operand: an integer literal or `...VERSION_CODES.NAME`.
fn operand_forward(toks: &[Token], mut i: usize, end: usize, codes: &VersionCodes) -> Option<u32> {
    while i < end && toks[i].is("(") {
        i += 1;
    }
    if i >= end {
        return None;
    }
    if toks[i].kind == TokenKind::Number {
        return parse_int(&toks[i].text);
    }
    let mut chain = Vec::new();
    while i < end && toks[i].is_ident() {
        chain.push(toks[i].text.as_str());
        if i + 1 < end && toks[i + 1].is(".") {
            i += 2;
        } else {
            break;
        }
    }
    match chain.as_slice() {
        [.., "VERSION_CODES", name] => codes.level(name),
        _ => None,
    }
}

fn operand_backward(toks: &[Token], start: usize, i: usize, codes: &VersionCodes) -> Option<u32> {
    let mut i = i;
    while i > start && toks[i].is(")") {
        i -= 1;
    }
    if toks[i].kind == TokenKind::Number {
        return parse_int(&toks[i].text);
    }
    if toks[i].is_ident()
        && i >= start + 2
        && toks[i - 1].is(".")
        && toks[i - 2].text == "VERSION_CODES"
    {
        return codes.level(&toks[i].text);
    }
    None
}

fn parse_guard_condition(
    toks: &[Token],
    (start, end): (usize, usize),
    codes: &VersionCodes,
) -> Option<(Comparison, u32)> {
    for i in start..end {
        if !(toks[i].is_ident() && toks[i].text == "SDK_INT") {
            continue;
        }
        if i + 1 < end {
            if let Some(cmp) = Comparison::parse(&toks[i + 1].text) {
                if let Some(level) = operand_forward(toks, i + 2, end, codes) {
                    return Some((cmp, level));
                }
            }
        }
        let mut head = i;
        while head >= start + 2 && toks[head - 1].is(".") && toks[head - 2].is_ident() {
            head -= 2;
        }
        if head >= start + 2 {
            if let Some(cmp) = Comparison::parse(&toks[head - 1].text) {
                if let Some(level) = operand_backward(toks, start, head - 2, codes) {
                    return Some((cmp.flipped(), level));
                }
            }
        }
    }
    None
}

fn detect_guard_in(
    src: &SourceTokens,
    ifs: &[IfConstruct],
    call: usize,
    codes: &VersionCodes,
) -> Option<GuardInfo> {
    let within = |(a, b): (usize, usize)| a <= call && call <= b;
    let mut enclosing: Vec<(&IfConstruct, Branch, (usize, usize))> = ifs
        .iter()
        .filter_map(|c| {
            if within(c.then_span) {
                Some((c, Branch::Then, c.then_span))
            } else {
                c.else_span
                    .filter(|&s| within(s))
                    .map(|s| (c, Branch::Else, s))
            }
        })
        .collect();
    // innermost first
    enclosing.sort_by_key(|(_, _, (a, b))| b - a);
    enclosing.into_iter().find_map(|(c, branch, span)| {
        parse_guard_condition(&src.toks, c.cond, codes).map(|(comparison, level)| GuardInfo {
            comparison,
            level,
            branch,
            guard_line: src.toks[c.if_tok].line,
            branch_span: span,
        })
    })
}

/// Innermost enclosing `if`/`else` whose condition compares `SDK_INT` with
/// a level, or `None` when the call is unguarded.
pub fn detect_guard(src: &SourceTokens, call: usize, codes: &VersionCodes) -> Option<GuardInfo> {
    detect_guard_in(src, &if_constructs(src), call, codes)
}

/// Flagged methods indexed by name for call matching.
pub struct PasemIndex<'a> {
    by_name: HashMap<&'a str, Vec<&'a MethodIdentity>>,
}

impl<'a> PasemIndex<'a> {
    pub fn new(pasems: &'a [MethodIdentity]) -> Self {
        let mut by_name: HashMap<&str, Vec<&MethodIdentity>> = HashMap::new();
        for p in pasems {
            by_name.entry(p.method_name.as_str()).or_default().push(p);
        }
        for v in by_name.values_mut() {
            v.sort();
            v.dedup();
        }
        PasemIndex { by_name }
    }
}

fn is_type_like(t: &Token) -> bool {
    t.is_ident()
        || t.is("]")
        || (t.kind == TokenKind::Keyword
            && matches!(
                t.text.as_str(),
                "void"
                    | "int"
                    | "long"
                    | "boolean"
                    | "byte"
                    | "short"
                    | "char"
                    | "float"
                    | "double"
            ))
}

/// Finds matching call sites in one client file.
pub fn scan_source(
    client: &str,
    file: &str,
    text: &str,
    index: &PasemIndex<'_>,
    codes: &VersionCodes,
) -> Result<Vec<UsageFinding>> {
    let src = SourceTokens::new(text)?;
    let ifs = if_constructs(&src);
    let toks = &src.toks;
    let mut out = Vec::new();
    for i in 0..toks.len() {
        if !toks[i].is_ident() || !src.is(i + 1, "(") {
            continue;
        }
        let Some(cands) = index.by_name.get(toks[i].text.as_str()) else {
            continue;
        };
        let close = src.partner[i + 1];
        let mut after = close + 1;
        while src.is(after, "[") {
            after = src.partner[after] + 1;
        }
        if i > 0 {
            let prev = &toks[i - 1];
            let decl_follows = src.is(after, "{") || src.is(after, "throws");
            if (decl_follows && (is_type_like(prev) || prev.is(">")))
                || (src.is(after, ";") && is_type_like(prev))
            {
                continue;
            }
        }

        let arity = if close == i + 2 {
            0
        } else {
            let mut commas = 0;
            let mut k = i + 2;
            while k < close {
                if src.is(k, ",") {
                    commas += 1;
                } else if src.is(k, "(") || src.is(k, "[") || src.is(k, "{") {
                    k = src.partner[k];
                }
                k += 1;
            }
            commas + 1
        };
        let qualifier: Option<&str> = if i >= 2 && toks[i - 1].is(".") && toks[i - 2].is_ident() {
            Some(&toks[i - 2].text)
        } else if i >= 1 && toks[i - 1].is("new") {
            Some(&toks[i].text)
        } else {
            None
        };

        let matching: Vec<&&MethodIdentity> = cands.iter().filter(|p| p.arity() == arity).collect();
        if matching.is_empty() {
            continue;
        }
        let qualified: Vec<&&MethodIdentity> = matching
            .iter()
            .copied()
            .filter(|p| qualifier == Some(p.simple_class_name()))
            .collect();
        let (chosen, confidence) = if qualified.is_empty() {
            (matching, MatchConfidence::NameAndArity)
        } else {
            (qualified, MatchConfidence::Qualified)
        };
        let guard = detect_guard_in(&src, &ifs, i, codes);
        for p in chosen {
            out.push(UsageFinding {
                client: client.to_owned(),
                pasem_identity: (*p).clone(),
                client_file: file.to_owned(),
                call_line: toks[i].line,
                match_confidence: confidence,
                guard: guard.clone(),
                call_token: i,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub suffix: String,
    pub codes: VersionCodes,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            suffix: DEFAULT_SUFFIX.to_owned(),
            codes: VersionCodes::builtin(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ClientScan {
    pub client: String,
    pub findings: Vec<UsageFinding>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Label used for a client tree: its directory name.
pub fn client_label(root: &Path) -> String {
    root.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| root.display().to_string())
}

/// Scans every source file of one client tree. Findings are sorted by
/// (file, line, identity); unreadable or unbalanced files are skipped with
/// a diagnostic.
pub fn scan_call_sites(
    client_root: &Path,
    pasems: &[MethodIdentity],
    opts: &ScanOptions,
) -> Result<ClientScan> {
    let client = client_label(client_root);
    let listing = enumerate_all(client_root, &opts.suffix)?;
    let index = PasemIndex::new(pasems);
    let results: Vec<(String, Result<Vec<UsageFinding>>)> = listing
        .files
        .par_iter()
        .map(|rel| {
            let path = client_root.join(rel);
            let res = fs::read_to_string(&path)
                .map_err(|e| Error::io(&path, e))
                .and_then(|text| scan_source(&client, rel, &text, &index, &opts.codes));
            (rel.clone(), res)
        })
        .collect();
    let mut scan = ClientScan {
        client,
        findings: Vec::new(),
        diagnostics: listing.diagnostics,
    };
    for (rel, res) in results {
        match res {
            Ok(f) => scan.findings.extend(f),
            Err(err) => scan.diagnostics.push(Diagnostic {
                file: rel,
                message: match err {
                    Error::Io { source, .. } => source.to_string(),
                    other => other.to_string(),
                },
            }),
        }
    }
    scan.findings.sort_by(|a, b| {
        (&a.client_file, a.call_line, &a.pasem_identity, a.call_token).cmp(&(
            &b.client_file,
            b.call_line,
            &b.pasem_identity,
            b.call_token,
        ))
    });
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientUsage {
    pub client: String,
    /// Distinct flagged methods called.
    pub used: usize,
    pub findings: usize,
    pub protected: usize,
    pub unprotected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardLevels {
    pub pasem: String,
    pub levels: Vec<u32>,
    pub inconsistent_guard_levels: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageSummary {
    pub clients: Vec<ClientUsage>,
    pub clients_total: usize,
    pub clients_using: usize,
    pub fraction_clients_using: f64,
    pub pasems_total: usize,
    pub pasems_used: usize,
    pub coverage: f64,
    pub guard_levels: Vec<GuardLevels>,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Per-client and corpus-level usage figures. `clients` lists every
/// scanned client, including those without findings.
pub fn aggregate_usage(
    findings: &[UsageFinding],
    clients: &[String],
    pasems_total: usize,
) -> UsageSummary {
    let mut names: BTreeSet<&str> = clients.iter().map(String::as_str).collect();
    names.extend(findings.iter().map(|f| f.client.as_str()));

    let mut per_client = Vec::new();
    for name in &names {
        let mine: Vec<&UsageFinding> = findings.iter().filter(|f| f.client == *name).collect();
        let used: BTreeSet<&MethodIdentity> = mine.iter().map(|f| &f.pasem_identity).collect();
        let protected = mine.iter().filter(|f| f.is_protected()).count();
        per_client.push(ClientUsage {
            client: (*name).to_owned(),
            used: used.len(),
            findings: mine.len(),
            protected,
            unprotected: mine.len() - protected,
        });
    }

    let used_all: BTreeSet<&MethodIdentity> = findings.iter().map(|f| &f.pasem_identity).collect();
    let mut levels: BTreeMap<&MethodIdentity, BTreeSet<u32>> = BTreeMap::new();
    for f in findings {
        if let Some(g) = &f.guard {
            levels.entry(&f.pasem_identity).or_default().insert(g.level);
        }
    }
    let clients_using = per_client.iter().filter(|c| c.used > 0).count();
    UsageSummary {
        clients_total: per_client.len(),
        clients_using,
        fraction_clients_using: ratio(clients_using, per_client.len()),
        pasems_total,
        pasems_used: used_all.len(),
        coverage: ratio(used_all.len(), pasems_total),
        guard_levels: levels
            .into_iter()
            .map(|(id, lv)| GuardLevels {
                pasem: id.to_string(),
                inconsistent_guard_levels: lv.len() > 1,
                levels: lv.into_iter().collect(),
            })
            .collect(),
        clients: per_client,
    }
}

/// Guarded call counts per flagged method, highest first with identity
/// order breaking ties, truncated to `top_k`.
pub fn rank_protected(findings: &[UsageFinding], top_k: usize) -> Vec<(MethodIdentity, usize)> {
    let mut counts: BTreeMap<&MethodIdentity, usize> = BTreeMap::new();
    for f in findings.iter().filter(|f| f.is_protected()) {
        *counts.entry(&f.pasem_identity).or_insert(0) += 1;
    }
    let mut ranked: Vec<(MethodIdentity, usize)> =
        counts.into_iter().map(|(id, n)| (id.clone(), n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_k);
    ranked
}

/// `pasem,times` ranking table.
pub fn ranking_csv(ranked: &[(MethodIdentity, usize)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["pasem", "times"])?;
    for (id, n) in ranked {
        w.write_record([id.to_string(), n.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "ranking.csv".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(class: &str, name: &str, params: &[&str]) -> MethodIdentity {
        MethodIdentity {
            qualified_class: class.into(),
            method_name: name.into(),
            param_types: params.iter().map(|s| s.to_string()).collect(),
            return_type: "void".into(),
        }
    }

    fn scan(text: &str, pasems: &[MethodIdentity]) -> Vec<UsageFinding> {
        let index = PasemIndex::new(pasems);
        scan_source("app", "A.java", text, &index, &VersionCodes::builtin()).unwrap()
    }

    fn guard_of(text: &str) -> Option<GuardInfo> {
        let f = scan(text, &[id("p.X", "m", &[])]);
        assert_eq!(f.len(), 1, "{f:#?}");
        f[0].guard.clone()
    }

    #[test]
    fn builtin_codes_cover_levels() {
        let c = VersionCodes::builtin();
        assert_eq!(c.level("P"), Some(28));
        assert_eq!(c.level("BASE"), Some(1));
        assert_eq!(c.level("Q"), Some(29));
        assert_eq!(c.levels.len(), 29);
        let levels: BTreeSet<u32> = c.levels.values().copied().collect();
        assert_eq!(levels, (1..=29).collect());
    }

    #[test]
    fn codes_are_extensible() {
        let mut c = VersionCodes::builtin();
        c.extend(&VersionCodes::parse_csv("R,30\nS,31\n").unwrap());
        assert_eq!(c.level("S"), Some(31));
        assert!(VersionCodes::parse_csv("X,zero").is_err());
        assert!(VersionCodes::parse_csv("X").is_err());
    }

    #[test]
    fn name_and_arity_match() {
        let pasem = id(
            "android.database.DatabaseUtils",
            "getSqlStatementType",
            &["String"],
        );
        let f = scan(
            "class A { void f() { int t = utils.getSqlStatementType(sql); } }",
            std::slice::from_ref(&pasem),
        );
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].match_confidence, MatchConfidence::NameAndArity);
        assert_eq!(f[0].pasem_identity, pasem);
        assert!(f[0].guard.is_none());
    }

    #[test]
    fn qualified_match() {
        let pasem = id(
            "android.text.TextUtils",
            "writeToParcel",
            &["CharSequence", "Parcel", "int"],
        );
        let f = scan(
            "class A { void f() { TextUtils.writeToParcel(cs, p, 0); } }",
            &[pasem],
        );
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].match_confidence, MatchConfidence::Qualified);
    }

    #[test]
    fn arity_and_declarations_filtered() {
        let pasem = id("p.X", "m", &["int"]);
        let f = scan(
            "class A {\n void m(int a) { }\n abstract void m(int b);\n void g() { x.m(); x.m(1, 2); x.m(f(1, 2)); }\n}",
            &[pasem],
        );
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].call_line, 4);
    }

    #[test]
    fn no_matches() {
        assert!(scan("class A { void f() { other(); } }", &[id("p.X", "m", &[])]).is_empty());
    }

    #[test]
    fn then_branch_guard() {
        let g = guard_of("class A { void f() { if (Build.VERSION.SDK_INT < 28) { x.m(); } } }")
            .unwrap();
        assert_eq!(
            (g.comparison, g.level, g.branch),
            (Comparison::Lt, 28, Branch::Then)
        );
    }

    #[test]
    fn else_branch_with_codes_constant() {
        let g = guard_of(
            "class A { void f() {\n if (SDK_INT >= VERSION_CODES.P) { y(); } else {\n x.m();\n }\n} }",
        )
        .unwrap();
        assert_eq!(
            (g.comparison, g.level, g.branch),
            (Comparison::Ge, 28, Branch::Else)
        );
        assert_eq!(g.guard_line, 2);
    }

    #[test]
    fn unguarded_call() {
        assert!(guard_of("class A { void f() { x.m(); } }").is_none());
        assert!(guard_of("class A { void f() { if (ready) { x.m(); } } }").is_none());
        // guard condition that does not enclose the call
        assert!(guard_of("class A { void f() { if (SDK_INT < 21) { y(); } x.m(); } }").is_none());
    }

    #[test]
    fn flipped_operands_and_braceless() {
        let g =
            guard_of("class A { void f() { if (21 <= Build.VERSION.SDK_INT) x.m(); } }").unwrap();
        assert_eq!(
            (g.comparison, g.level, g.branch),
            (Comparison::Ge, 21, Branch::Then)
        );
        let g = guard_of(
            "class A { void f() { if (android.os.Build.VERSION.SDK_INT == Build.VERSION_CODES.LOLLIPOP_MR1) y(); else x.m(); } }",
        )
        .unwrap();
        assert_eq!(
            (g.comparison, g.level, g.branch),
            (Comparison::Eq, 22, Branch::Else)
        );
    }

    #[test]
    fn innermost_guard_wins_and_else_if_nests() {
        let g = guard_of(
            "class A { void f() { if (SDK_INT < 28) { if (SDK_INT >= 24) { x.m(); } } } }",
        )
        .unwrap();
        assert_eq!((g.comparison, g.level), (Comparison::Ge, 24));
        let g = guard_of(
            "class A { void f() { if (SDK_INT >= 29) { a(); } else if (SDK_INT >= 26) { b(); } else { x.m(); } } }",
        )
        .unwrap();
        assert_eq!(
            (g.comparison, g.level, g.branch),
            (Comparison::Ge, 26, Branch::Else)
        );
        // non-version inner if is transparent
        let g =
            guard_of("class A { void f() { if (SDK_INT < 23) { if (ok) { x.m(); } } } }").unwrap();
        assert_eq!(g.level, 23);
    }

    #[test]
    fn guard_span_contains_call() {
        let text = "class A { void f() { if (SDK_INT != 27) { y(); x.m(); z(); } } }";
        let f = scan(text, &[id("p.X", "m", &[])]);
        let g = f[0].guard.as_ref().unwrap();
        let (a, b) = g.branch_span;
        assert!(a <= f[0].call_token && f[0].call_token <= b);
        let src = SourceTokens::new(text).unwrap();
        assert!(src.tokens()[a].is("{") && src.tokens()[b].is("}"));
    }

    fn finding(client: &str, pasem: &MethodIdentity, level: Option<u32>) -> UsageFinding {
        UsageFinding {
            client: client.into(),
            pasem_identity: pasem.clone(),
            client_file: "A.java".into(),
            call_line: 1,
            match_confidence: MatchConfidence::NameAndArity,
            guard: level.map(|level| GuardInfo {
                comparison: Comparison::Lt,
                level,
                branch: Branch::Then,
                guard_line: 1,
                branch_span: (0, 0),
            }),
            call_token: 0,
        }
    }

    #[test]
    fn aggregate_counts() {
        let (a, b, c) = (
            id("p.X", "a", &[]),
            id("p.X", "b", &[]),
            id("p.X", "c", &[]),
        );
        let f = vec![
            finding("app", &a, Some(28)),
            finding("app", &b, None),
            finding("app", &c, None),
        ];
        let s = aggregate_usage(&f, &["app".into()], 3);
        assert_eq!(s.clients[0].used, 3);
        assert_eq!(s.clients[0].protected, 1);
        assert_eq!(s.clients[0].unprotected, 2);
        assert_eq!(s.coverage, 1.0);

        let s = aggregate_usage(&[], &[], 0);
        assert_eq!(s.clients_total, 0);
        assert_eq!(s.fraction_clients_using, 0.0);
        assert_eq!(s.pasems_used, 0);
    }

    #[test]
    fn inconsistent_levels_flagged() {
        let a = id("p.X", "a", &[]);
        let f = vec![finding("one", &a, Some(27)), finding("two", &a, Some(28))];
        let s = aggregate_usage(&f, &["one".into(), "two".into(), "three".into()], 2);
        assert!(s.guard_levels[0].inconsistent_guard_levels);
        assert_eq!(s.guard_levels[0].levels, [27, 28]);
        assert_eq!(s.clients_using, 2);
        assert!((s.fraction_clients_using - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ranking() {
        let (a, b) = (id("p.X", "a", &[]), id("p.X", "b", &[]));
        let mut f = vec![finding("c", &b, Some(1))];
        for _ in 0..3 {
            f.push(finding("c", &a, Some(2)));
        }
        f.push(finding("c", &a, None));
        assert_eq!(rank_protected(&f, 10), vec![(a.clone(), 3), (b.clone(), 1)]);
        assert_eq!(rank_protected(&f, 1), vec![(a.clone(), 3)]);
        assert!(rank_protected(&[finding("c", &a, None)], 10).is_empty());
        assert_eq!(
            ranking_csv(&rank_protected(&f, 10)).unwrap(),
            "pasem,times\np.X: void a(),3\np.X: void b(),1\n"
        );
    }
}
