use proptest::prelude::*;

use semaudit_core::extract::{extract_methods, normalize_comment};
use semaudit_core::lexer::{tokenize_source, TokenKind};

#[derive(Debug, Clone)]
struct GenMethod {
    name: String,
    /// (declared type text, expected erased type)
    params: Vec<(String, String)>,
    literal: String,
    comment: String,
    anonymous: bool,
    lambda: bool,
}

fn type_strategy() -> impl Strategy<Value = (String, String)> {
    let leaf =
        prop::sample::select(vec!["String", "Integer", "Object", "T"]).prop_map(str::to_owned);
    let generic = leaf.prop_recursive(3, 8, 2, |inner| {
        (
            prop::sample::select(vec!["List", "Map", "Set"]),
            prop::collection::vec(inner, 1..3),
        )
            .prop_map(|(head, args)| format!("{head}<{}>", args.join(", ")))
    });
    (generic, any::<bool>(), 0..3usize).prop_map(|(t, varargs, dims)| {
        let erased_head = t.split('<').next().unwrap().to_owned();
        let arrays = "[]".repeat(dims);
        if varargs {
            (
                format!("{t}{arrays}..."),
                format!("{erased_head}{arrays}[]"),
            )
        } else {
            (format!("{t}{arrays}"), format!("{erased_head}{arrays}"))
        }
    })
}

fn method_strategy() -> impl Strategy<Value = Vec<GenMethod>> {
    let noise = "[a-z{}() ;]{0,12}";
    prop::collection::vec(
        (
            prop::collection::vec(type_strategy(), 0..4),
            noise,
            noise,
            any::<bool>(),
            any::<bool>(),
        ),
        1..8,
    )
    .prop_map(|ms| {
        ms.into_iter()
            .enumerate()
            .map(
                |(i, (params, literal, comment, anonymous, lambda))| GenMethod {
                    name: format!("m{i}"),
                    params,
                    literal,
                    comment,
                    anonymous,
                    lambda,
                },
            )
            .collect()
    })
}

fn render(methods: &[GenMethod]) -> String {
    let mut src = String::from("package p;\nimport java.util.*;\nclass Gen<T> {\n");
    for m in methods {
        let params: Vec<String> = m
            .params
            .iter()
            .enumerate()
            .map(|(i, (t, _))| format!("{t} a{i}"))
            .collect();
        src.push_str(&format!("    /** Doc for {}. */\n", m.name));
        src.push_str(&format!(
            "    public void {}({}) {{\n",
            m.name,
            params.join(", ")
        ));
        src.push_str(&format!("        String s = \"{}\";\n", m.literal));
        src.push_str(&format!("        /* {} */ char c = '{{';\n", m.comment));
        src.push_str(&format!("        // {}\n", m.comment));
        if m.anonymous {
            src.push_str("        Runnable r = new Runnable() {\n            public void anonRun() { }\n        };\n");
        }
        if m.lambda {
            src.push_str("        java.util.function.Supplier<Object> f = () -> { return new Object() { void lambdaInner() {} }; };\n");
        }
        src.push_str("    }\n");
    }
    src.push_str("}\n");
    src
}

fn brace_balance(body: &str) -> (usize, usize) {
    let toks = tokenize_source(body).unwrap();
    let count = |t: &str| {
        toks.iter()
            .filter(|k| k.kind == TokenKind::Punctuation && k.text == t)
            .count()
    };
    (count("{"), count("}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn extractor_properties(methods in method_strategy()) {
        let src = render(&methods);
        let recs = extract_methods("p/Gen.java", &src).unwrap();

        // determinism
        prop_assert_eq!(&recs, &extract_methods("p/Gen.java", &src).unwrap());

        // one record per named method: anonymous and lambda members excluded
        let names: Vec<&str> = recs.iter().map(|r| r.identity.method_name.as_str()).collect();
        let want: Vec<&str> = methods.iter().map(|m| m.name.as_str()).collect();
        prop_assert_eq!(names, want);

        for (rec, m) in recs.iter().zip(&methods) {
            let raw = rec.raw_body.as_deref().unwrap();
            let (open, close) = brace_balance(raw);
            prop_assert_eq!(open, close);
            // literal opacity: the literal and comment text survive intact
            let literal = format!("\"{}\"", m.literal);
            let comment = format!("/* {} */", m.comment);
            prop_assert!(raw.contains(&literal));
            prop_assert!(raw.contains(&comment));
            // generic erasure
            let erased: Vec<String> = m.params.iter().map(|(_, e)| e.clone()).collect();
            prop_assert_eq!(&rec.identity.param_types, &erased);
            prop_assert!(rec.identity.param_types.iter().all(|t| !t.contains('<')));
            prop_assert!(rec.has_doc());
        }
    }

    #[test]
    fn comment_normalization_is_idempotent(inner in "[a-z@ \t\n*/.]{0,60}", strict in any::<bool>()) {
        prop_assume!(!inner.contains("*/"));
        let raw = format!("/**{inner}*/");
        let once = normalize_comment(&raw, strict);
        prop_assert_eq!(normalize_comment(&once, strict), once.clone());
        prop_assert_eq!(normalize_comment(&raw, strict), once);
    }

    #[test]
    fn loose_comments_ignore_horizontal_whitespace(
        lines in prop::collection::vec("[a-z]{1,6}( [a-z]{1,6}){0,3}", 1..5),
        pad in 0..6usize,
    ) {
        let a = format!("/**\n * {}\n */", lines.join("\n * "));
        let gutter = format!("\n{}*  ", " ".repeat(pad));
        let b = format!("/**{gutter}{}\t\n{}*/", lines.join(&gutter).replace(' ', "  "), " ".repeat(pad));
        prop_assert_eq!(normalize_comment(&a, false), normalize_comment(&b, false));
    }
}

#[test]
fn erased_generic_matches_raw_type() {
    let recs = extract_methods(
        "A.java",
        "class A {\n void f(List<Map<String,Integer>> x) {}\n}\nclass B {\n void f(List y) {}\n}\n",
    )
    .unwrap();
    assert_eq!(recs[0].identity.param_types, recs[1].identity.param_types);
}
