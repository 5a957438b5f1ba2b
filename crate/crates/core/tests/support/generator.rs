//! Seeded synthetic corpus: ground-truth method records for two releases,
//! rendered to Java source, plus a naive reference detector that works on
//! the ground truth alone.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "returns", "the", "value", "of", "given", "index", "or", "null", "when", "absent", "sets",
    "current", "state", "for", "this", "view", "listener", "called", "after", "update",
];
const TYPES: &[&str] = &[
    "int", "long", "String", "boolean", "Object", "byte[]", "List",
];
const ACCESS: &[&str] = &["public", "protected", "private", ""];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthMethod {
    pub class: String,
    pub name: String,
    pub params: Vec<String>,
    pub ret: String,
    pub access: &'static str,
    pub is_static: bool,
    pub is_final: bool,
    /// Logical doc text: a word list, empty when undocumented.
    pub doc: Vec<String>,
    pub hide: bool,
    /// Statements; `None` for native methods.
    pub body: Option<Vec<String>>,
}

impl TruthMethod {
    pub fn key(&self) -> String {
        format!(
            "edge.gen.{}: {} {}({})",
            self.class,
            self.ret,
            self.name,
            self.params.join(",")
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub methods: usize,
    /// Whitespace-only rewrites of docs and bodies. Must be off when the
    /// detector runs in strict mode, where such rewrites are real changes.
    pub reformat: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            methods: 240,
            reformat: true,
        }
    }
}

pub struct Release {
    pub methods: Vec<TruthMethod>,
    /// Rendering style per method key: (doc indentation, body layout seed).
    pub style: BTreeMap<String, (usize, u64)>,
}

pub struct Corpus {
    pub old: Release,
    pub new: Release,
}

fn words(rng: &mut ChaCha8Rng) -> Vec<String> {
    let n = rng.gen_range(3..12);
    (0..n)
        .map(|_| WORDS.choose(rng).unwrap().to_string())
        .collect()
}

fn statement(rng: &mut ChaCha8Rng) -> String {
    let v = rng.gen_range(0..50);
    match rng.gen_range(0..4) {
        0 => format!(
            "x{v} = compute{}(x{});",
            rng.gen_range(0..9),
            rng.gen_range(0..9)
        ),
        1 => format!("if (x{v} > {}) {{ x{v} = 0; }}", rng.gen_range(0..100)),
        2 => format!("log(\"step {v} {{\");"),
        _ => format!("x{v} += {};", rng.gen_range(1..9)),
    }
}

fn body(rng: &mut ChaCha8Rng) -> Vec<String> {
    (0..rng.gen_range(1..5)).map(|_| statement(rng)).collect()
}

fn method(rng: &mut ChaCha8Rng, idx: usize) -> TruthMethod {
    let native = rng.gen_bool(0.05);
    let doc = if rng.gen_bool(0.85) {
        words(rng)
    } else {
        Vec::new()
    };
    TruthMethod {
        class: format!("C{}", idx % 12),
        name: format!("m{idx}"),
        params: (0..rng.gen_range(0..4))
            .map(|_| TYPES.choose(rng).unwrap().to_string())
            .collect(),
        ret: if rng.gen_bool(0.5) {
            "void".into()
        } else {
            TYPES.choose(rng).unwrap().to_string()
        },
        access: ACCESS.choose(rng).unwrap(),
        is_static: rng.gen_bool(0.3),
        is_final: rng.gen_bool(0.1),
        hide: !doc.is_empty() && rng.gen_bool(0.1),
        doc,
        body: if native { None } else { Some(body(rng)) },
    }
}

fn mutate(rng: &mut ChaCha8Rng, m: &TruthMethod) -> Option<TruthMethod> {
    if rng.gen_bool(0.05) {
        return None;
    }
    let mut n = m.clone();
    if rng.gen_bool(0.35) {
        match &mut n.body {
            Some(stmts) if rng.gen_bool(0.9) => {
                let at = rng.gen_range(0..=stmts.len());
                stmts.insert(at, statement(rng));
            }
            Some(_) => n.body = None,
            None => n.body = Some(body(rng)),
        }
    }
    if rng.gen_bool(0.2) {
        n.doc = words(rng);
    } else if rng.gen_bool(0.05) {
        n.doc.clear();
    }
    if n.doc.is_empty() {
        n.hide = false;
    }
    if rng.gen_bool(0.1) {
        n.access = ACCESS.choose(rng).unwrap();
        n.is_static = rng.gen_bool(0.3);
    }
    Some(n)
}

pub fn generate(seed: u64, cfg: GenConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let old: Vec<TruthMethod> = (0..cfg.methods).map(|i| method(&mut rng, i)).collect();
    let mut new: Vec<TruthMethod> = old.iter().filter_map(|m| mutate(&mut rng, m)).collect();
    for i in 0..cfg.methods / 20 {
        new.push(method(&mut rng, cfg.methods + i));
    }
    let style = |ms: &[TruthMethod], rng: &mut ChaCha8Rng, base: Option<&Release>| {
        ms.iter()
            .map(|m| {
                let key = m.key();
                let fixed = base.and_then(|b| b.style.get(&key)).copied();
                let s = match fixed {
                    Some(s) if !(cfg.reformat && rng.gen_bool(0.3)) => s,
                    _ => (rng.gen_range(2..6), rng.gen()),
                };
                (key, s)
            })
            .collect::<BTreeMap<_, _>>()
    };
    let old_style = style(&old, &mut rng, None);
    let old = Release {
        methods: old,
        style: old_style,
    };
    let new_style = style(&new, &mut rng, Some(&old));
    let new = Release {
        methods: new,
        style: new_style,
    };
    Corpus { old, new }
}

fn render_doc(m: &TruthMethod, indent: usize, out: &mut String) {
    if m.doc.is_empty() {
        return;
    }
    // line breaks are part of the text; only horizontal spacing varies
    let pad = " ".repeat(indent);
    let sep = if indent.is_multiple_of(2) { " " } else { "  " };
    out.push_str("    /**\n");
    for chunk in m.doc.chunks(4) {
        out.push_str(&format!("{pad}*{sep}{}\t\n", chunk.join(sep)));
    }
    if m.hide {
        out.push_str(&format!("{pad}* @hide\n"));
    }
    out.push_str("     */\n");
}

fn render_body(stmts: &[String], layout: u64, out: &mut String) {
    out.push_str(" {");
    for (i, s) in stmts.iter().enumerate() {
        // layout bits pick one of several equivalent whitespace forms
        match (layout >> (i % 32)) & 3 {
            0 => out.push_str("\n        "),
            1 => out.push(' '),
            2 => out.push_str("\n\n            "),
            _ => out.push_str("\n\t"),
        }
        out.push_str(s);
    }
    out.push_str("\n    }\n");
}

fn render_method(m: &TruthMethod, style: (usize, u64), out: &mut String) {
    render_doc(m, style.0, out);
    out.push_str("    ");
    for kw in [
        m.access,
        if m.is_static { "static" } else { "" },
        if m.is_final { "final" } else { "" },
    ] {
        if !kw.is_empty() {
            out.push_str(kw);
            out.push(' ');
        }
    }
    if m.body.is_none() {
        out.push_str("native ");
    }
    let params: Vec<String> = m
        .params
        .iter()
        .enumerate()
        .map(|(i, t)| format!("{t} p{i}"))
        .collect();
    out.push_str(&format!("{} {}({})", m.ret, m.name, params.join(", ")));
    match &m.body {
        Some(stmts) => render_body(stmts, style.1, out),
        None => out.push_str(";\n"),
    }
    out.push('\n');
}

/// Source files of one release: relative path → text.
pub fn render(rel: &Release) -> BTreeMap<String, String> {
    let mut by_class: BTreeMap<&str, Vec<&TruthMethod>> = BTreeMap::new();
    for m in &rel.methods {
        by_class.entry(&m.class).or_default().push(m);
    }
    by_class
        .into_iter()
        .map(|(class, ms)| {
            let mut text =
                format!("package edge.gen;\n\nimport java.util.List;\n\npublic class {class} {{\n");
            for m in ms {
                render_method(m, rel.style[&m.key()], &mut text);
            }
            text.push_str("}\n");
            (format!("core/java/edge/gen/{class}.java"), text)
        })
        .collect()
}

/// Reference detector over ground truth: a method is flagged when it is
/// present in both releases, documented with the same words, and its
/// statement list (or native status) changed. Returns key → new access is
/// public.
pub fn naive_sems(c: &Corpus) -> BTreeMap<String, bool> {
    let new: BTreeMap<String, &TruthMethod> = c.new.methods.iter().map(|m| (m.key(), m)).collect();
    let mut out = BTreeMap::new();
    for o in &c.old.methods {
        let Some(n) = new.get(&o.key()) else { continue };
        let same_doc = !o.doc.is_empty() && o.doc == n.doc && o.hide == n.hide;
        if same_doc && o.body != n.body {
            out.insert(o.key(), n.access == "public");
        }
    }
    out
}
