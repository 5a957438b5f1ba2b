//! Java-family tokenizer used for structural scanning.
//!
//! The lexer only needs to be exact about token boundaries: string, char
//! and text-block literals and all comment forms are opaque single tokens,
//! so braces inside them never affect structure.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Punctuation,
    Operator,
    StringLiteral,
    CharLiteral,
    Number,
    DocComment,
    LineComment,
    BlockComment,
    AnnotationMarker,
}

impl TokenKind {
    pub fn is_comment(self) -> bool {
        matches!(
            self,
            TokenKind::DocComment | TokenKind::LineComment | TokenKind::BlockComment
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offsets into the source text.
    pub start: usize,
    pub end: usize,
    /// 1-based lines of the first and last character.
    pub line: u32,
    pub end_line: u32,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && !matches!(self.kind, TokenKind::StringLiteral | TokenKind::CharLiteral)
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Identifier
    }
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "void",
    "volatile",
    "while",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

// Longest first so maximal munch works with a linear scan.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">",
    "!", "~", "?", ":", "&", "|", "^",
];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32) {
        let end_line = if self.pos > start {
            line + self.src[start..self.pos].matches('\n').count() as u32
        } else {
            line
        };
        self.tokens.push(Token {
            kind,
            text: self.src[start..self.pos].to_owned(),
            start,
            end: self.pos,
            line,
            end_line,
        });
    }

    fn run(mut self) -> Result<Vec<Token>> {
        // a leading byte-order mark is not part of the program text
        if self.src.starts_with('\u{feff}') {
            self.pos = '\u{feff}'.len_utf8();
        }
        while let Some(c) = self.peek() {
            let start = self.pos;
            let line = self.line;
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if self.rest().starts_with("//") {
                while let Some(c) = self.peek() {
                    if c == '\n' || c == '\r' {
                        break;
                    }
                    self.bump();
                }
                self.push(TokenKind::LineComment, start, line);
            } else if self.rest().starts_with("/*") {
                let doc = self.rest().starts_with("/**") && !self.rest().starts_with("/**/");
                self.pos += 2;
                loop {
                    if self.rest().starts_with("*/") {
                        self.pos += 2;
                        break;
                    }
                    if self.bump().is_none() {
                        return Err(Error::Lex {
                            line,
                            message: "unterminated comment".into(),
                        });
                    }
                }
                let kind = if doc {
                    TokenKind::DocComment
                } else {
                    TokenKind::BlockComment
                };
                self.push(kind, start, line);
            } else if self.rest().starts_with("\"\"\"") {
                self.pos += 3;
                loop {
                    if self.rest().starts_with("\"\"\"") {
                        self.pos += 3;
                        break;
                    }
                    match self.bump() {
                        Some('\\') => {
                            self.bump();
                        }
                        Some(_) => {}
                        None => {
                            return Err(Error::Lex {
                                line,
                                message: "unterminated text block".into(),
                            })
                        }
                    }
                }
                self.push(TokenKind::StringLiteral, start, line);
            } else if c == '"' || c == '\'' {
                self.quoted(c, start, line)?;
            } else if c.is_alphabetic() || c == '_' || c == '$' {
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '$' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let kind = if is_keyword(&self.src[start..self.pos]) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                self.push(kind, start, line);
            } else if c.is_ascii_digit()
                || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
            {
                self.number();
                self.push(TokenKind::Number, start, line);
            } else if c == '@' {
                self.bump();
                self.push(TokenKind::AnnotationMarker, start, line);
            } else if self.rest().starts_with("...") {
                self.pos += 3;
                self.push(TokenKind::Punctuation, start, line);
            } else if "{}()[];,.".contains(c) {
                self.bump();
                self.push(TokenKind::Punctuation, start, line);
            } else if let Some(op) = OPERATORS.iter().find(|op| self.rest().starts_with(**op)) {
                self.pos += op.len();
                self.push(TokenKind::Operator, start, line);
            } else {
                return Err(Error::Lex {
                    line,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        Ok(self.tokens)
    }

    fn quoted(&mut self, quote: char, start: usize, line: u32) -> Result<()> {
        self.bump();
        loop {
            match self.peek() {
                Some('\\') => {
                    self.bump();
                    match self.peek() {
                        Some('\n') | Some('\r') | None => {}
                        _ => {
                            self.bump();
                        }
                    }
                }
                Some(c) if c == quote => {
                    self.bump();
                    break;
                }
                Some('\n') | Some('\r') | None => {
                    let what = if quote == '"' { "string" } else { "char" };
                    return Err(Error::Lex {
                        line,
                        message: format!("unterminated {what} literal"),
                    });
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        let kind = if quote == '"' {
            TokenKind::StringLiteral
        } else {
            TokenKind::CharLiteral
        };
        self.push(kind, start, line);
        Ok(())
    }

    fn number(&mut self) {
        let hex = self.rest().starts_with("0x") || self.rest().starts_with("0X");
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                self.bump();
                let exp = if hex {
                    c == 'p' || c == 'P'
                } else {
                    c == 'e' || c == 'E'
                };
                if exp && matches!(self.peek(), Some('+') | Some('-')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }
}

/// Splits source text into classified tokens. Accepts LF and CRLF line
/// endings; token lines are 1-based.
pub fn tokenize_source(text: &str) -> Result<Vec<Token>> {
    Lexer {
        src: text,
        pos: 0,
        line: 1,
        tokens: Vec::new(),
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        tokenize_source(src)
            .unwrap()
            .into_iter()
            .map(|t| t.text)
            .collect()
    }

    #[test]
    fn string_literals_are_opaque() {
        let toks = tokenize_source("int x = \"a{b\";").unwrap();
        let t: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(t, ["int", "x", "=", "\"a{b\"", ";"]);
        assert_eq!(toks[3].kind, TokenKind::StringLiteral);
        assert!(!toks
            .iter()
            .any(|t| t.kind == TokenKind::Punctuation && t.text == "{"));
    }

    #[test]
    fn doc_comment_first() {
        let toks = tokenize_source("/** doc */ void f(){}").unwrap();
        assert_eq!(toks[0].kind, TokenKind::DocComment);
        assert_eq!(toks[0].text, "/** doc */");
    }

    #[test]
    fn empty_block_comment_is_not_doc() {
        let toks = tokenize_source("/**/ /* x */").unwrap();
        assert_eq!(toks[0].kind, TokenKind::BlockComment);
        assert_eq!(toks[1].kind, TokenKind::BlockComment);
    }

    #[test]
    fn unterminated_string_reports_line() {
        let err = tokenize_source("\"unterminated").unwrap_err();
        assert!(matches!(err, Error::Lex { line: 1, .. }));
        let err = tokenize_source("class A {\n  /* open\n").unwrap_err();
        assert!(matches!(err, Error::Lex { line: 2, .. }));
        assert!(tokenize_source("char c = 'x;\n").is_err());
    }

    #[test]
    fn escapes_respected() {
        assert_eq!(
            texts(r#"s = "a\"}"; c = '\'';"#),
            ["s", "=", r#""a\"}""#, ";", "c", "=", r"'\''", ";"]
        );
    }

    #[test]
    fn text_block() {
        let toks = tokenize_source("String s = \"\"\"\n  { }\n  \"\"\";\nint y;").unwrap();
        assert_eq!(toks[3].kind, TokenKind::StringLiteral);
        assert_eq!(toks[3].line, 1);
        assert_eq!(toks[3].end_line, 3);
        assert_eq!(toks.last().unwrap().line, 4);
    }

    #[test]
    fn operators_and_numbers() {
        assert_eq!(
            texts("a >>>= 0x1F; b = 1.5e-3f; c -> d :: e ... "),
            [
                "a", ">>>=", "0x1F", ";", "b", "=", "1.5e-3f", ";", "c", "->", "d", "::", "e",
                "..."
            ]
        );
        assert_eq!(
            texts("x = .5 + 1_000L;"),
            ["x", "=", ".5", "+", "1_000L", ";"]
        );
    }

    #[test]
    fn crlf_lines() {
        let toks = tokenize_source("a\r\nb\r\n// c\r\nd").unwrap();
        let lines: Vec<u32> = toks.iter().map(|t| t.line).collect();
        assert_eq!(lines, [1, 2, 3, 4]);
        assert_eq!(toks[2].text, "// c");
    }

    #[test]
    fn keywords_and_annotations() {
        let toks = tokenize_source("@Override public void f()").unwrap();
        assert_eq!(toks[0].kind, TokenKind::AnnotationMarker);
        assert_eq!(toks[1].kind, TokenKind::Identifier);
        assert_eq!(toks[2].kind, TokenKind::Keyword);
        assert_eq!(toks[3].kind, TokenKind::Keyword);
    }
}
