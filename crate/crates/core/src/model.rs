//! Shared data model: method identities, extracted records and snapshots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Java access level. Exactly one is attached to every extracted method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccessLevel {
    Public,
    Protected,
    Private,
    DefaultAccess,
}

impl AccessLevel {
    pub const ALL: [AccessLevel; 4] = [
        AccessLevel::Public,
        AccessLevel::Protected,
        AccessLevel::Private,
        AccessLevel::DefaultAccess,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AccessLevel::Public => "public",
            AccessLevel::Protected => "protected",
            AccessLevel::Private => "private",
            AccessLevel::DefaultAccess => "default",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modifier {
    Public,
    Protected,
    Private,
    DefaultAccess,
    Static,
    Final,
    Abstract,
    Native,
}

impl Modifier {
    pub fn as_str(self) -> &'static str {
        match self {
            Modifier::Public => "public",
            Modifier::Protected => "protected",
            Modifier::Private => "private",
            Modifier::DefaultAccess => "default",
            Modifier::Static => "static",
            Modifier::Final => "final",
            Modifier::Abstract => "abstract",
            Modifier::Native => "native",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<Modifier> {
        Some(match kw {
            "public" => Modifier::Public,
            "protected" => Modifier::Protected,
            "private" => Modifier::Private,
            "static" => Modifier::Static,
            "final" => Modifier::Final,
            "abstract" => Modifier::Abstract,
            "native" => Modifier::Native,
            _ => return None,
        })
    }

    fn access(self) -> Option<AccessLevel> {
        match self {
            Modifier::Public => Some(AccessLevel::Public),
            Modifier::Protected => Some(AccessLevel::Protected),
            Modifier::Private => Some(AccessLevel::Private),
            Modifier::DefaultAccess => Some(AccessLevel::DefaultAccess),
            _ => None,
        }
    }
}

/// Modifier set of one method. Always holds exactly one access level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModifierSet(BTreeSet<Modifier>);

impl ModifierSet {
    /// Builds a set from source modifiers, adding `default-access` when no
    /// explicit access level is present. When several access keywords
    /// appear (invalid Java) the most visible one is kept.
    pub fn new(mods: impl IntoIterator<Item = Modifier>) -> Self {
        let mut set: BTreeSet<Modifier> = mods.into_iter().collect();
        let access = set.iter().filter_map(|m| m.access()).min();
        set.retain(|m| m.access().is_none());
        set.insert(match access {
            Some(AccessLevel::Public) => Modifier::Public,
            Some(AccessLevel::Protected) => Modifier::Protected,
            Some(AccessLevel::Private) => Modifier::Private,
            _ => Modifier::DefaultAccess,
        });
        ModifierSet(set)
    }

    pub fn access(&self) -> AccessLevel {
        self.0
            .iter()
            .find_map(|m| m.access())
            .unwrap_or(AccessLevel::DefaultAccess)
    }

    pub fn contains(&self, m: Modifier) -> bool {
        self.0.contains(&m)
    }

    pub fn iter(&self) -> impl Iterator<Item = Modifier> + '_ {
        self.0.iter().copied()
    }

    /// Canonical label such as `public static hide`: access level first,
    /// then the remaining modifiers in declaration-canonical order, then
    /// the `hide` marker.
    pub fn label(&self, hide: bool) -> String {
        let mut parts: Vec<&str> = self.0.iter().map(|m| m.as_str()).collect();
        if hide {
            parts.push("hide");
        }
        parts.join(" ")
    }
}

/// Signature-level identity of a method across releases.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodIdentity {
    pub qualified_class: String,
    pub method_name: String,
    pub param_types: Vec<String>,
    /// Empty for constructors.
    pub return_type: String,
}

impl MethodIdentity {
    pub fn arity(&self) -> usize {
        self.param_types.len()
    }

    pub fn simple_class_name(&self) -> &str {
        self.qualified_class
            .rsplit('.')
            .next()
            .unwrap_or(&self.qualified_class)
    }

    pub fn is_constructor(&self) -> bool {
        self.return_type.is_empty()
    }
}

/// Renders as `pkg.Class: ret name(T1,T2)`.
impl fmt::Display for MethodIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.qualified_class)?;
        if !self.return_type.is_empty() {
            write!(f, "{} ", self.return_type)?;
        }
        write!(f, "{}({})", self.method_name, self.param_types.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: u32,
    pub end: u32,
}

/// One method or constructor extracted from a source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub identity: MethodIdentity,
    pub modifiers: ModifierSet,
    pub hide_annotation: bool,
    /// Whitespace-insensitive comment text; empty iff `raw_doc_comment` is.
    pub doc_comment: String,
    pub raw_doc_comment: String,
    /// Comment-free token sequence of the body; `None` for declarations
    /// without a body (abstract, native, interface methods).
    pub body: Option<Vec<String>>,
    pub raw_body: Option<String>,
    pub file: String,
    pub line_span: LineSpan,
}

impl MethodRecord {
    pub fn access(&self) -> AccessLevel {
        self.modifiers.access()
    }

    pub fn has_doc(&self) -> bool {
        !self.raw_doc_comment.is_empty()
    }
}

/// One release tree as named in the snapshot manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotDescriptor {
    pub label: String,
    pub api_level: Option<u32>,
    pub root: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub message: String,
}

/// All methods extracted from one release, keyed by identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiSnapshot {
    pub descriptor: SnapshotDescriptor,
    pub methods: BTreeMap<MethodIdentity, MethodRecord>,
    pub parse_diagnostics: Vec<Diagnostic>,
}

impl ApiSnapshot {
    pub fn new(descriptor: SnapshotDescriptor) -> Self {
        ApiSnapshot {
            descriptor,
            methods: BTreeMap::new(),
            parse_diagnostics: Vec::new(),
        }
    }

    pub fn label(&self) -> &str {
        &self.descriptor.label
    }

    pub fn get(&self, id: &MethodIdentity) -> Option<&MethodRecord> {
        self.methods.get(id)
    }

    /// Adds records from one file. Files must be merged in sorted path
    /// order; a repeated identity keeps the first record and is reported.
    pub fn merge_file(&mut self, records: Vec<MethodRecord>) {
        for rec in records {
            if let Some(existing) = self.methods.get(&rec.identity) {
                self.parse_diagnostics.push(Diagnostic {
                    file: rec.file.clone(),
                    message: format!(
                        "duplicate method identity `{}` (first declared in {}:{})",
                        rec.identity, existing.file, existing.line_span.start
                    ),
                });
                continue;
            }
            self.methods.insert(rec.identity.clone(), rec);
        }
    }
}
