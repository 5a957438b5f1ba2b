//! Method extraction: a structural scanner over the token stream that finds
//! every method and constructor declared in a named type, with its doc
//! comment, modifiers, signature and body.
//!
//! Only type bodies are scanned for members. Method bodies, field
//! initializers and enum constant bodies are skipped wholesale by brace
//! matching, so anonymous classes, lambdas and local classes never produce
//! records.

use std::fs;

use rayon::prelude::*;

use crate::corpus::{enumerate_sources, Whitelist};
use crate::error::{Error, Result};
use crate::lexer::{tokenize_source, Token, TokenKind};
use crate::model::{
    ApiSnapshot, Diagnostic, LineSpan, MethodIdentity, MethodRecord, Modifier, ModifierSet,
    SnapshotDescriptor,
};

/// Canonicalizes CRLF and lone CR line endings to LF.
fn canonical_newlines(text: &str) -> String {
    if !text.contains('\r') {
        return text.to_owned();
    }
    text.replace("\r\n", "\n").replace('\r', "\n")
}

fn collapse_ws(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    for word in line
        .split([' ', '\t', '\u{000c}'])
        .filter(|w| !w.is_empty())
    {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Normalizes doc comment text for comparison.
///
/// `strict` only canonicalizes line endings. Otherwise, for a complete
/// `/** ... */` block the delimiters and the per-line `*` gutter are
/// removed; every line is trimmed with internal runs of spaces and tabs
/// collapsed, and leading and trailing blank lines are dropped. Text that
/// is not a delimited block (already normalized text) only gets the
/// whitespace rules, which makes normalization a fixed point.
pub fn normalize_comment(raw: &str, strict: bool) -> String {
    let text = canonical_newlines(raw);
    if strict {
        return text;
    }
    let (inner, block) = match text.strip_prefix("/**").and_then(|t| t.strip_suffix("*/")) {
        Some(inner) => (inner, true),
        None => (text.as_str(), false),
    };
    let lines: Vec<String> = inner
        .split('\n')
        .map(|line| {
            let line = if block {
                let t = line.trim_start();
                t.strip_prefix('*').unwrap_or(line)
            } else {
                line
            };
            collapse_ws(line)
        })
        .collect();
    let first = lines.iter().position(|l| !l.is_empty());
    let last = lines.iter().rposition(|l| !l.is_empty());
    match (first, last) {
        (Some(a), Some(b)) => lines[a..=b].join("\n"),
        _ => String::new(),
    }
}

/// Comment-free token texts of a body.
pub fn body_tokens(raw: &str) -> Vec<String> {
    match tokenize_source(raw) {
        Ok(toks) => toks
            .into_iter()
            .filter(|t| !t.kind.is_comment())
            .map(|t| t.text)
            .collect(),
        // bodies come from lexed files, so this only triggers on external input
        Err(_) => raw.split_whitespace().map(str::to_owned).collect(),
    }
}

/// Normalized body used for equality: the text with canonical line endings
/// when `strict`, else the comment-free token sequence joined by spaces.
pub fn normalize_body(raw: Option<&str>, strict: bool) -> Option<String> {
    let raw = raw?;
    Some(if strict {
        canonical_newlines(raw)
    } else {
        body_tokens(raw).join(" ")
    })
}

fn has_hide_marker(doc: &str) -> bool {
    doc.match_indices("@hide").any(|(idx, m)| {
        !doc[idx + m.len()..]
            .chars()
            .next()
            .is_some_and(|c| c.is_alphanumeric() || c == '_')
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TypeKind {
    Class,
    Interface,
    Enum,
    Annotation,
    Record,
}

struct Parser<'a> {
    file: &'a str,
    src: &'a str,
    raw: Vec<Token>,
    /// Indices into `raw` of non-comment tokens.
    sig: Vec<usize>,
    /// For every opening bracket in `sig`, the index of its partner.
    partner: Vec<usize>,
    out: Vec<MethodRecord>,
}

fn parse_err(tok: &Token, message: impl Into<String>) -> Error {
    Error::Parse {
        line: tok.line,
        message: message.into(),
    }
}

impl<'a> Parser<'a> {
    fn new(file: &'a str, src: &'a str) -> Result<Self> {
        let raw = tokenize_source(src)?;
        let sig: Vec<usize> = (0..raw.len())
            .filter(|&i| !raw[i].kind.is_comment())
            .collect();
        let mut partner = vec![usize::MAX; sig.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (si, &ri) in sig.iter().enumerate() {
            let t = &raw[ri];
            if t.kind != TokenKind::Punctuation {
                continue;
            }
            match t.text.as_str() {
                "{" | "(" | "[" => stack.push(si),
                "}" | ")" | "]" => {
                    let want = match t.text.as_str() {
                        "}" => "{",
                        ")" => "(",
                        _ => "[",
                    };
                    match stack.pop() {
                        Some(open) if raw[sig[open]].text == want => {
                            partner[open] = si;
                            partner[si] = open;
                        }
                        _ => {
                            return Err(parse_err(
                                t,
                                format!("unbalanced braces: unexpected `{}`", t.text),
                            ))
                        }
                    }
                }
                _ => {}
            }
        }
        if let Some(&open) = stack.last() {
            return Err(parse_err(
                &raw[sig[open]],
                format!(
                    "unbalanced braces: `{}` is never closed",
                    raw[sig[open]].text
                ),
            ));
        }
        Ok(Parser {
            file,
            src,
            raw,
            sig,
            partner,
            out: Vec::new(),
        })
    }

    fn tok(&self, i: usize) -> &Token {
        &self.raw[self.sig[i]]
    }

    fn len(&self) -> usize {
        self.sig.len()
    }

    fn is(&self, i: usize, text: &str) -> bool {
        i < self.len() && self.tok(i).is(text)
    }

    fn doc_before(&self, i: usize) -> Option<&Token> {
        let r = self.sig[i];
        (r > 0 && self.raw[r - 1].kind == TokenKind::DocComment).then(|| &self.raw[r - 1])
    }

    fn run(mut self) -> Result<Vec<MethodRecord>> {
        let n = self.len();
        let mut package = String::new();
        let mut i = 0;
        while i < n {
            let t = self.tok(i);
            if t.is("package") {
                let (name, next) = self.dotted_until_semicolon(i + 1)?;
                package = name;
                i = next;
                continue;
            }
            if t.is("import") || (t.is_ident() && t.text == "module") {
                i = self.skip_statement(i)?;
                continue;
            }
            if t.is(";") {
                i += 1;
                continue;
            }
            let (_, _, j) = self.modifiers(i, n);
            if let Some((kind, name, open)) = self.type_header(j, n)? {
                let qual = if package.is_empty() {
                    name
                } else {
                    format!("{package}.{name}")
                };
                let close = self.partner[open];
                self.class_body(open, close, &qual, kind)?;
                i = close + 1;
                continue;
            }
            // `module` declarations and stray tokens
            i = if self.is(j, "{") {
                self.partner[j] + 1
            } else {
                j.max(i + 1)
            };
        }
        Ok(self.out)
    }

    fn dotted_until_semicolon(&self, mut i: usize) -> Result<(String, usize)> {
        let mut name = String::new();
        while i < self.len() && !self.is(i, ";") {
            let t = self.tok(i);
            if t.kind == TokenKind::AnnotationMarker {
                i = self.skip_annotation(i);
                continue;
            }
            name.push_str(&t.text);
            i += 1;
        }
        if i >= self.len() {
            return Err(parse_err(self.tok(self.len() - 1), "missing `;`"));
        }
        Ok((name, i + 1))
    }

    /// Skips to just past the next `;` at bracket depth zero.
    fn skip_statement(&self, mut i: usize) -> Result<usize> {
        while i < self.len() {
            let t = self.tok(i);
            if t.is(";") {
                return Ok(i + 1);
            }
            if t.is("{") || t.is("(") || t.is("[") {
                i = self.partner[i];
            }
            i += 1;
        }
        Err(parse_err(self.tok(self.len() - 1), "missing `;`"))
    }

    /// Skips `@Name(.Name)*` plus an optional argument list.
    fn skip_annotation(&self, i: usize) -> usize {
        let mut j = i + 1;
        if j < self.len() && self.tok(j).is_ident() {
            j += 1;
            while self.is(j, ".") && j + 1 < self.len() && self.tok(j + 1).is_ident() {
                j += 2;
            }
        }
        if self.is(j, "(") {
            j = self.partner[j] + 1;
        }
        j
    }

    /// Collects leading annotations and modifier keywords starting at `i`.
    fn modifiers(&self, mut i: usize, end: usize) -> (Vec<Modifier>, bool, usize) {
        let mut mods = Vec::new();
        let mut is_default = false;
        while i < end {
            let t = self.tok(i);
            if t.kind == TokenKind::AnnotationMarker {
                if self.is(i + 1, "interface") {
                    break;
                }
                i = self.skip_annotation(i);
                continue;
            }
            if let Some(m) =
                Modifier::from_keyword(&t.text).filter(|_| t.kind == TokenKind::Keyword)
            {
                mods.push(m);
                i += 1;
                continue;
            }
            match t.text.as_str() {
                "synchronized" | "transient" | "volatile" | "strictfp"
                    if t.kind == TokenKind::Keyword && !self.is(i + 1, "(") =>
                {
                    i += 1;
                }
                "default" if t.kind == TokenKind::Keyword => {
                    is_default = true;
                    i += 1;
                }
                "sealed" if t.is_ident() && self.next_is_declaration_word(i + 1) => i += 1,
                "non" if t.is_ident() && self.is(i + 1, "-") && self.is(i + 2, "sealed") => i += 3,
                _ => break,
            }
        }
        (mods, is_default, i)
    }

    fn next_is_declaration_word(&self, i: usize) -> bool {
        i < self.len() && {
            let t = self.tok(i);
            matches!(
                t.text.as_str(),
                "class"
                    | "interface"
                    | "abstract"
                    | "public"
                    | "static"
                    | "final"
                    | "protected"
                    | "private"
            )
        }
    }

    /// Recognizes `class|interface|enum|@interface|record Name ... {`.
    fn type_header(&self, i: usize, end: usize) -> Result<Option<(TypeKind, String, usize)>> {
        if i >= end {
            return Ok(None);
        }
        let t = self.tok(i);
        let (kind, name_at) = match t.text.as_str() {
            "class" if t.kind == TokenKind::Keyword => (TypeKind::Class, i + 1),
            "interface" if t.kind == TokenKind::Keyword => (TypeKind::Interface, i + 1),
            "enum" if t.kind == TokenKind::Keyword => (TypeKind::Enum, i + 1),
            "@" if self.is(i + 1, "interface") => (TypeKind::Annotation, i + 2),
            "record"
                if t.is_ident()
                    && i + 2 < end
                    && self.tok(i + 1).is_ident()
                    && (self.is(i + 2, "(") || self.is(i + 2, "<")) =>
            {
                (TypeKind::Record, i + 1)
            }
            _ => return Ok(None),
        };
        if name_at >= end || !self.tok(name_at).is_ident() {
            return Err(parse_err(t, "expected type name"));
        }
        let name = self.tok(name_at).text.clone();
        let mut j = name_at + 1;
        while j < end {
            let tj = self.tok(j);
            if tj.is("{") {
                return Ok(Some((kind, name, j)));
            }
            if tj.is(";") || tj.is("}") {
                break;
            }
            if tj.is("(") || tj.is("[") {
                j = self.partner[j];
            }
            j += 1;
        }
        Err(parse_err(t, format!("missing body for type `{name}`")))
    }

    fn skip_enum_constants(&self, mut i: usize, close: usize) -> usize {
        while i < close {
            let t = self.tok(i);
            if t.is(";") {
                return i + 1;
            }
            if t.is("{") || t.is("(") || t.is("[") {
                i = self.partner[i];
            }
            i += 1;
        }
        close
    }

    /// Skips a balanced `<...>` starting at `i`, treating `>>` and `>>>`
    /// as multiple closers.
    fn skip_angles(&self, mut i: usize, end: usize) -> usize {
        let mut depth: i32 = 0;
        while i < end {
            let t = self.tok(i);
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                ">>>" => depth -= 3,
                "(" | "[" => i = self.partner[i],
                _ => {}
            }
            i += 1;
            if depth <= 0 {
                break;
            }
        }
        i
    }

    fn class_body(&mut self, open: usize, close: usize, qual: &str, kind: TypeKind) -> Result<()> {
        let simple = qual.rsplit('.').next().unwrap_or(qual).to_owned();
        let mut i = open + 1;
        if kind == TypeKind::Enum {
            i = self.skip_enum_constants(i, close);
        }
        while i < close {
            let member_start = i;
            let (mods, _is_default, j) = self.modifiers(i, close);
            i = j;
            if i >= close {
                break;
            }
            if self.is(i, ";") {
                i += 1;
                continue;
            }
            if self.is(i, "{") {
                i = self.partner[i] + 1;
                continue;
            }
            if let Some((k, name, bopen)) = self.type_header(i, close)? {
                let bclose = self.partner[bopen];
                self.class_body(bopen, bclose, &format!("{qual}.{name}"), k)?;
                i = bclose + 1;
                continue;
            }
            if self.is(i, "<") {
                i = self.skip_angles(i, close);
            }

            // Find the parameter list: first `(` preceded by an identifier,
            // before anything that marks a field.
            let mut k = i;
            let mut paren = None;
            while k < close {
                let t = self.tok(k);
                if t.kind == TokenKind::AnnotationMarker {
                    k = self.skip_annotation(k);
                    continue;
                }
                if t.is("(") {
                    paren = Some(k);
                    break;
                }
                if t.is("=") || t.is(";") || t.is("{") {
                    break;
                }
                if t.is("[") {
                    k = self.partner[k];
                }
                k += 1;
            }
            let Some(p) = paren.filter(|&p| p > i && self.tok(p - 1).is_ident()) else {
                i = self.skip_field(i, close)?;
                continue;
            };

            let name = self.tok(p - 1).text.clone();
            let mut return_type = self.normalize_type(i, p - 1);
            if return_type.is_empty() && name != simple {
                return Err(parse_err(
                    self.tok(p - 1),
                    format!("cannot determine declaration of `{name}`"),
                ));
            }
            let pclose = self.partner[p];
            let param_types = self.params(p + 1, pclose);
            let mut q = pclose + 1;
            while self.is(q, "[") {
                return_type.push_str("[]");
                q = self.partner[q] + 1;
            }
            if self.is(q, "throws") || self.is(q, "default") {
                while q < close && !self.is(q, "{") && !self.is(q, ";") {
                    if self.is(q, "(") || self.is(q, "[") {
                        q = self.partner[q];
                    }
                    q += 1;
                }
            }
            if q >= close {
                return Err(parse_err(
                    self.tok(p - 1),
                    format!("missing body or `;` for `{name}`"),
                ));
            }
            let (body_range, end) = if self.is(q, "{") {
                (Some((q, self.partner[q])), self.partner[q])
            } else if self.is(q, ";") {
                (None, q)
            } else {
                return Err(parse_err(
                    self.tok(q),
                    format!("unexpected `{}` after `{name}(...)`", self.tok(q).text),
                ));
            };

            let mut modifiers = mods.clone();
            let implicit_public = matches!(kind, TypeKind::Interface | TypeKind::Annotation)
                && !mods.iter().any(|m| {
                    matches!(
                        m,
                        Modifier::Public | Modifier::Protected | Modifier::Private
                    )
                });
            if implicit_public {
                modifiers.push(Modifier::Public);
            }
            self.push_record(
                member_start,
                end,
                MethodIdentity {
                    qualified_class: qual.to_owned(),
                    method_name: name,
                    param_types,
                    return_type,
                },
                ModifierSet::new(modifiers),
                body_range,
            );
            i = end + 1;
        }
        Ok(())
    }

    fn skip_field(&self, mut i: usize, close: usize) -> Result<usize> {
        let mut saw_eq = false;
        while i < close {
            let t = self.tok(i);
            if t.is(";") {
                return Ok(i + 1);
            }
            if t.is("=") {
                saw_eq = true;
            }
            if t.is("{") {
                // compact record constructors and similar blocks end the member
                if !saw_eq {
                    return Ok(self.partner[i] + 1);
                }
                i = self.partner[i];
            } else if t.is("(") || t.is("[") {
                i = self.partner[i];
            }
            i += 1;
        }
        Ok(close)
    }

    fn params(&self, start: usize, end: usize) -> Vec<String> {
        let mut out = Vec::new();
        let mut depth: i32 = 0;
        let mut seg = start;
        let mut i = start;
        while i <= end {
            if i == end || (depth == 0 && self.is(i, ",")) {
                if let Some(ty) = self.param(seg, i) {
                    out.push(ty);
                }
                seg = i + 1;
                i += 1;
                continue;
            }
            let t = self.tok(i);
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                ">>>" => depth -= 3,
                "(" | "[" | "{" => i = self.partner[i],
                _ => {}
            }
            i += 1;
        }
        out
    }

    fn param(&self, start: usize, end: usize) -> Option<String> {
        let mut idx: Vec<usize> = Vec::new();
        let mut i = start;
        while i < end {
            let t = self.tok(i);
            if t.kind == TokenKind::AnnotationMarker {
                i = self.skip_annotation(i);
                continue;
            }
            if !t.is("final") {
                idx.push(i);
            }
            i += 1;
        }
        let mut dims = 0;
        while idx.len() >= 2
            && self.tok(idx[idx.len() - 1]).is("]")
            && self.tok(idx[idx.len() - 2]).is("[")
        {
            idx.truncate(idx.len() - 2);
            dims += 1;
        }
        let name = idx.pop()?;
        if self.tok(name).is("this") {
            return None;
        }
        let mut ty = self.normalize_indices(&idx);
        for _ in 0..dims {
            ty.push_str("[]");
        }
        Some(ty)
    }

    fn normalize_type(&self, start: usize, end: usize) -> String {
        let idx: Vec<usize> = (start..end).collect();
        self.normalize_indices(&idx)
    }

    /// Joins type tokens without whitespace, dropping annotations and
    /// generic arguments; varargs become an array dimension.
    fn normalize_indices(&self, idx: &[usize]) -> String {
        let mut out = String::new();
        let mut depth: i32 = 0;
        let mut k = 0;
        while k < idx.len() {
            let i = idx[k];
            let t = self.tok(i);
            if t.kind == TokenKind::AnnotationMarker {
                let stop = self.skip_annotation(i);
                while k < idx.len() && idx[k] < stop {
                    k += 1;
                }
                continue;
            }
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                ">>>" => depth -= 3,
                "..." if depth == 0 => out.push_str("[]"),
                s if depth == 0 => out.push_str(s),
                _ => {}
            }
            depth = depth.max(0);
            k += 1;
        }
        out
    }

    fn push_record(
        &mut self,
        start: usize,
        end: usize,
        identity: MethodIdentity,
        modifiers: ModifierSet,
        body: Option<(usize, usize)>,
    ) {
        let raw_doc = self
            .doc_before(start)
            .map(|t| t.text.clone())
            .unwrap_or_default();
        let mut doc_comment = normalize_comment(&raw_doc, false);
        // a doc block without any text counts as no documentation
        let raw_doc_comment = if doc_comment.is_empty() {
            String::new()
        } else {
            raw_doc
        };
        if raw_doc_comment.is_empty() {
            doc_comment.clear();
        }
        let (raw_body, body_toks) = match body {
            Some((open, close)) => {
                let (ro, rc) = (self.sig[open], self.sig[close]);
                let text = self.src[self.raw[ro].start..self.raw[rc].end].to_owned();
                let toks = self.raw[ro..=rc]
                    .iter()
                    .filter(|t| !t.kind.is_comment())
                    .map(|t| t.text.clone())
                    .collect();
                (Some(text), Some(toks))
            }
            None => (None, None),
        };
        self.out.push(MethodRecord {
            identity,
            modifiers,
            hide_annotation: has_hide_marker(&raw_doc_comment),
            doc_comment,
            raw_doc_comment,
            body: body_toks,
            raw_body,
            file: self.file.to_owned(),
            line_span: LineSpan {
                start: self.tok(start).line,
                end: self.tok(end).end_line,
            },
        });
    }
}

/// Extracts every method and constructor declared in a named type of one
/// source file. Any lexing or structural error rejects the whole file.
pub fn extract_methods(file: &str, text: &str) -> Result<Vec<MethodRecord>> {
    Parser::new(file, text)?.run()
}

/// Builds the snapshot for one release tree: enumerate whitelisted
/// sources, extract each file (in parallel) and merge in sorted path order.
pub fn extract_snapshot(
    descriptor: &SnapshotDescriptor,
    wl: &Whitelist,
    suffix: &str,
) -> Result<ApiSnapshot> {
    let listing = enumerate_sources(descriptor, wl, suffix)?;
    let results: Vec<(String, Result<Vec<MethodRecord>>)> = listing
        .files
        .par_iter()
        .map(|rel| {
            let path = descriptor.root.join(rel);
            let res = fs::read(&path)
                .map_err(|e| Error::io(&path, e))
                .and_then(|bytes| {
                    String::from_utf8(bytes).map_err(|_| Error::Parse {
                        line: 0,
                        message: "file is not valid UTF-8".into(),
                    })
                })
                .and_then(|text| extract_methods(rel, &text));
            (rel.clone(), res)
        })
        .collect();

    let mut snapshot = ApiSnapshot::new(descriptor.clone());
    snapshot.parse_diagnostics.extend(listing.diagnostics);
    for (rel, res) in results {
        match res {
            Ok(records) => snapshot.merge_file(records),
            Err(err) => snapshot.parse_diagnostics.push(Diagnostic {
                file: rel,
                message: match err {
                    Error::Io { source, .. } => source.to_string(),
                    other => other.to_string(),
                },
            }),
        }
    }
    Ok(snapshot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AccessLevel;

    const SQL_TYPE_SRC: &str = r#"package android.database;

public final class DatabaseUtils {
    /**
     * Returns one of the following which represent the type of the given SQL statement.
     * ...
     * @param sql the SQL statement whose type is returned by this method
     * @return one of the values listed above
     */
    public static int getSqlStatementType(String sql) {
        String prefixSql = sql.substring(0, 3).toUpperCase(Locale.ROOT);
        if (prefixSql.equals("SEL")) {
            return STATEMENT_SELECT;
        } else if (prefixSql.equals("ROL")) {
            return STATEMENT_ABORT;
        }
        return STATEMENT_OTHER;
    }
}
"#;

    fn one(src: &str) -> MethodRecord {
        let mut recs = extract_methods("A.java", src).unwrap();
        assert_eq!(recs.len(), 1, "{recs:#?}");
        recs.pop().unwrap()
    }

    #[test]
    fn documented_static_method_record() {
        let r = one(SQL_TYPE_SRC);
        assert_eq!(r.identity.qualified_class, "android.database.DatabaseUtils");
        assert_eq!(r.identity.method_name, "getSqlStatementType");
        assert_eq!(r.identity.param_types, ["String"]);
        assert_eq!(r.identity.return_type, "int");
        assert_eq!(
            r.modifiers,
            ModifierSet::new([Modifier::Public, Modifier::Static])
        );
        assert!(r.doc_comment.starts_with("Returns one of the following"));
        assert!(r.body.as_ref().is_some_and(|b| !b.is_empty()));
        assert_eq!(r.line_span, LineSpan { start: 10, end: 18 });
        assert!(r.raw_body.as_ref().unwrap().starts_with('{'));
        assert!(r.raw_body.as_ref().unwrap().ends_with('}'));
    }

    #[test]
    fn abstract_declaration_has_no_body() {
        let r = one("public abstract class WebSettings {\n  /** Zoom. */\n  public abstract void setBuiltInZoomControls(boolean enabled);\n}\n");
        assert_eq!(
            r.modifiers,
            ModifierSet::new([Modifier::Public, Modifier::Abstract])
        );
        assert!(r.body.is_none() && r.raw_body.is_none());
        assert_eq!(r.identity.param_types, ["boolean"]);
    }

    #[test]
    fn native_declaration_has_no_body() {
        let r = one("class Picture {\n /** h */\n public native int getHeight();\n}");
        assert!(r.modifiers.contains(Modifier::Native));
        assert!(r.body.is_none());
    }

    #[test]
    fn empty_file() {
        assert!(extract_methods("E.java", "").unwrap().is_empty());
    }

    #[test]
    fn documented_and_undocumented() {
        let recs = extract_methods(
            "A.java",
            "class A {\n /** Doc. */\n void a() {}\n void b() {}\n}\n",
        )
        .unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs.iter().filter(|r| r.doc_comment.is_empty()).count(), 1);
        assert_eq!(recs[1].access(), AccessLevel::DefaultAccess);
    }

    #[test]
    fn comment_whitespace_modes() {
        let a = "/** A.\n * B */";
        let b = "/**  A.\n    * B */";
        assert_eq!(normalize_comment(a, false), normalize_comment(b, false));
        assert_ne!(normalize_comment(a, true), normalize_comment(b, true));
        assert_eq!(normalize_comment(a, false), "A.\nB");
        assert_eq!(normalize_comment("/** x */\r\n", true), "/** x */\n");
    }

    #[test]
    fn hide_marker_detected() {
        let r = one("class A {\n /** @hide */\n public void f() {}\n}");
        assert!(r.hide_annotation);
        let r = one("class A {\n /** @hidden thing */\n public void f() {}\n}");
        assert!(!r.hide_annotation);
    }

    #[test]
    fn body_modes() {
        let a = "{\n  int x = 1; // note\n  return x;\n}";
        let b = "{\n  int x = 1;\n  return x;\n}";
        assert_eq!(
            normalize_body(Some(a), false),
            normalize_body(Some(b), false)
        );
        assert_ne!(normalize_body(Some(a), true), normalize_body(Some(b), true));
        let c = "{ int x = 1;\n        return x; }";
        assert_eq!(
            normalize_body(Some(b), false),
            normalize_body(Some(c), false)
        );
        assert_eq!(normalize_body(None, false), None);
    }

    #[test]
    fn generic_erasure_and_varargs() {
        let recs = extract_methods(
            "A.java",
            "class A {\n void f(List<Map<String,Integer>> x) {}\n void g(List y) {}\n <T extends Comparable<T>> List<T> h(final T... ts) { return null; }\n void k(int a[], @NonNull String b) {}\n}",
        )
        .unwrap();
        assert_eq!(recs[0].identity.param_types, recs[1].identity.param_types);
        assert_eq!(recs[2].identity.param_types, ["T[]"]);
        assert_eq!(recs[2].identity.return_type, "List");
        assert_eq!(recs[3].identity.param_types, ["int[]", "String"]);
    }

    #[test]
    fn nested_and_anonymous() {
        let src = r#"package p;
class Outer {
    /** in anon */
    Runnable r = new Runnable() {
        /** no */
        public void run() {}
    };
    static class Inner {
        /** yes */
        void g() {
            Object o = new Object() { void hidden() {} };
            Runnable l = () -> { };
        }
    }
    Outer(int x) {}
}
"#;
        let recs = extract_methods("A.java", src).unwrap();
        let names: Vec<String> = recs
            .iter()
            .map(|r| format!("{}#{}", r.identity.qualified_class, r.identity.method_name))
            .collect();
        assert_eq!(names, ["p.Outer.Inner#g", "p.Outer#Outer"]);
        assert!(recs[1].identity.is_constructor());
    }

    #[test]
    fn unbalanced_is_error() {
        assert!(extract_methods("A.java", "class A { void f() { }").is_err());
        assert!(extract_methods("A.java", "class A { void f() } }").is_err());
    }

    #[test]
    fn interface_members_are_public() {
        let recs = extract_methods(
            "I.java",
            "interface I {\n /** a */ void a();\n default int b() { return 1; }\n}",
        )
        .unwrap();
        assert!(recs.iter().all(|r| r.access() == AccessLevel::Public));
        assert!(recs[0].body.is_none());
        assert!(recs[1].body.is_some());
    }

    #[test]
    fn blank_doc_counts_as_undocumented() {
        let r = one("class A {\n /** */\n void f() {}\n}");
        assert!(r.raw_doc_comment.is_empty() && r.doc_comment.is_empty());
    }

    #[test]
    fn line_comment_breaks_doc_association() {
        let r = one("class A {\n /** doc */\n // stray\n void f() {}\n}");
        assert!(!r.has_doc());
        let r = one(
            "class A {\n /** doc */\n @Override\n @SuppressWarnings(\"x\") public void f() {}\n}",
        );
        assert!(r.has_doc());
        assert_eq!(r.line_span.start, 3);
    }
}
