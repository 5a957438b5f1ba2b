//! Release tree ingestion: whitelists, snapshot manifests and source
//! enumeration.
//!
//! Paths are always compared as relative, `/`-separated strings so the same
//! whitelist selects the same files on every host. Symbolic links are never
//! followed. Generated sources that happen to live under a whitelisted
//! prefix are treated like any other file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::model::{Diagnostic, SnapshotDescriptor};

pub const DEFAULT_SUFFIX: &str = ".java";

/// Built-in whitelist for Android framework checkouts.
pub const DEFAULT_WHITELIST: &str = "\
# Public framework sources of an Android platform/frameworks/base tree.
core/java/
graphics/java/
keystore/java/
location/java/
media/java/
opengl/java/
rs/java/
sax/java/
telecomm/java/
telephony/java/
wifi/java/
";

/// Ordered list of relative path prefixes selecting API sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Whitelist {
    entries: Vec<String>,
}

impl Whitelist {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let text = entries
            .into_iter()
            .map(|s| s.as_ref().to_owned())
            .collect::<Vec<_>>()
            .join("\n");
        parse_whitelist(&text)
    }

    pub fn builtin() -> Self {
        parse_whitelist(DEFAULT_WHITELIST).expect("built-in whitelist is valid")
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn matches(&self, rel_path: &str) -> bool {
        self.entries
            .iter()
            .any(|p| rel_path.starts_with(p.as_str()))
    }

    /// Union keeping first-seen order.
    pub fn union(&self, other: &Whitelist) -> Whitelist {
        let mut entries = self.entries.clone();
        for e in &other.entries {
            if !entries.contains(e) {
                entries.push(e.clone());
            }
        }
        Whitelist { entries }
    }
}

pub fn parse_whitelist(text: &str) -> Result<Whitelist> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let entry = normalize_rel(line);
        let entry = entry.strip_prefix("./").unwrap_or(&entry).to_owned();
        if entry.is_empty() {
            return Err(Error::MalformedWhitelistEntry {
                line: lineno,
                reason: "empty prefix".into(),
            });
        }
        if entry.starts_with('/') {
            return Err(Error::MalformedWhitelistEntry {
                line: lineno,
                reason: "prefix must be relative".into(),
            });
        }
        if entry.split('/').any(|seg| seg == "..") {
            return Err(Error::MalformedWhitelistEntry {
                line: lineno,
                reason: "`..` segments are not allowed".into(),
            });
        }
        if !seen.insert(entry.clone()) {
            return Err(Error::DuplicateWhitelistEntry { line: lineno });
        }
        entries.push(entry);
    }
    if entries.is_empty() {
        return Err(Error::EmptyWhitelist);
    }
    Ok(Whitelist { entries })
}

pub fn load_whitelist(path: &Path) -> Result<Whitelist> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_whitelist(&text)
}

fn normalize_rel(p: &str) -> String {
    p.replace('\\', "/")
}

/// Source files selected from one release tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceListing {
    /// Relative `/`-separated paths, sorted.
    pub files: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn enumerate_sources(
    descriptor: &SnapshotDescriptor,
    wl: &Whitelist,
    suffix: &str,
) -> Result<SourceListing> {
    enumerate_filtered(&descriptor.root, suffix, |rel| wl.matches(rel))
}

/// Every file under `root` ending in `suffix`, without whitelist filtering.
pub fn enumerate_all(root: &Path, suffix: &str) -> Result<SourceListing> {
    enumerate_filtered(root, suffix, |_| true)
}

fn enumerate_filtered(
    root: &Path,
    suffix: &str,
    keep: impl Fn(&str) -> bool,
) -> Result<SourceListing> {
    let meta = fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        ));
    }
    fs::read_dir(root).map_err(|e| Error::io(root, e))?;

    let mut listing = SourceListing::default();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(err) => {
                let path = err.path().map(Path::to_path_buf).unwrap_or_default();
                if err.depth() == 0 {
                    return Err(Error::io(
                        root,
                        err.into_io_error()
                            .unwrap_or_else(|| std::io::Error::other("walk failed")),
                    ));
                }
                listing.diagnostics.push(Diagnostic {
                    file: relative(root, &path),
                    message: err.to_string(),
                });
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = relative(root, entry.path());
        if rel.ends_with(suffix) && keep(&rel) {
            listing.files.push(rel);
        }
    }
    listing.files.sort();
    Ok(listing)
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Parses a `label<TAB>api_level<TAB>root` manifest. Relative roots are
/// resolved against `base`. An empty or `-` api level means "unknown".
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<SnapshotDescriptor>> {
    let mut out: Vec<SnapshotDescriptor> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Manifest {
                line: lineno,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let label = fields[0].trim();
        if label.is_empty() {
            return Err(Error::Manifest {
                line: lineno,
                reason: "empty label".into(),
            });
        }
        if out.iter().any(|d| d.label == label) {
            return Err(Error::Manifest {
                line: lineno,
                reason: format!("duplicate label `{label}`"),
            });
        }
        let level = fields[1].trim();
        let api_level = if level.is_empty() || level == "-" {
            None
        } else {
            match level.parse::<u32>() {
                Ok(v) if v >= 1 => Some(v),
                _ => {
                    return Err(Error::Manifest {
                        line: lineno,
                        reason: format!("invalid api level `{level}`"),
                    })
                }
            }
        };
        let root = PathBuf::from(fields[2].trim());
        let root = if root.is_absolute() {
            root
        } else {
            base.join(root)
        };
        out.push(SnapshotDescriptor {
            label: label.to_owned(),
            api_level,
            root,
        });
    }
    if out.iter().all(|d| d.api_level.is_some()) {
        for w in out.windows(2) {
            if w[0].api_level >= w[1].api_level {
                return Err(Error::Manifest {
                    line: 0,
                    reason: format!(
                        "snapshots `{}` and `{}` are not strictly ordered by api level",
                        w[0].label, w[1].label
                    ),
                });
            }
        }
    }
    Ok(out)
}

pub fn load_manifest(path: &Path) -> Result<Vec<SnapshotDescriptor>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&text, base)
}
