//! Properties of selective compilation over fuzzed documents and inputs:
//! token conservation against the structural savings estimate, idempotence,
//! and determinism.

mod common;

use proptest::prelude::*;

use ucl_core::compiler::{compile, savings_estimate, InputContext, SwitchSelection};
use ucl_core::syntax::{parse, Node, UclDocument};

fn doc_and_ctx() -> impl Strategy<Value = (UclDocument, InputContext)> {
    (
        common::arb_nodes(),
        prop::collection::vec("[a-z]{1,8}", 0..5),
        any::<u64>(),
    )
        .prop_map(|(nodes, mut words, seed)| {
            let doc = UclDocument::from_nodes(nodes);
            // Mix some of the document's own keywords into the input so a
            // realistic share of the indicators fire.
            let mut keywords = Vec::new();
            doc.walk(&mut |node, _| {
                if let Node::Conditional(c) = node {
                    keywords.extend(c.condition.keywords.iter().cloned());
                }
            });
            for (i, kw) in keywords.into_iter().enumerate() {
                if (seed >> (i % 64)) & 1 == 1 {
                    words.push(kw);
                }
            }
            (doc, InputContext::from_text(words.join(" ")))
        })
}

/// Selects the first case of roughly half the switches in the document.
fn some_selection(doc: &UclDocument, seed: u64) -> Option<SwitchSelection> {
    let mut selection = SwitchSelection::new();
    let mut i = 0;
    doc.walk(&mut |node, _| {
        if let Node::Switch(s) = node {
            if let Some(first) = s.cases.first() {
                if (seed >> (i % 64)) & 1 == 1 {
                    selection.insert(s.selector.id.clone(), first.label.id.clone());
                }
                i += 1;
            }
        }
    });
    if selection.is_empty() {
        None
    } else {
        Some(selection)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn savings_equal_the_token_difference((doc, ctx) in doc_and_ctx(), seed in any::<u64>()) {
        let selection = some_selection(&doc, seed);
        let compiled = compile(&doc, &ctx, selection.as_ref()).expect("selection is valid");
        prop_assert_eq!(
            compiled.tokens_compiled + compiled.estimated_savings,
            compiled.tokens_full,
            "token conservation violated"
        );
        prop_assert_eq!(
            savings_estimate(&doc, &ctx, selection.as_ref()),
            compiled.estimated_savings,
            "structural savings estimate disagrees with compile arithmetic"
        );
    }

    #[test]
    fn compilation_is_idempotent((doc, ctx) in doc_and_ctx()) {
        let first = compile(&doc, &ctx, None).unwrap();
        let reparsed = parse(&first.emitted).expect("compiled output must re-parse");
        let second = compile(&reparsed, &ctx, None).unwrap();
        prop_assert_eq!(second.emitted, first.emitted);
        prop_assert_eq!(second.estimated_savings, 0);
    }

    #[test]
    fn compilation_is_deterministic((doc, ctx) in doc_and_ctx()) {
        let a = compile(&doc, &ctx, None).unwrap();
        let b = compile(&doc, &ctx, None).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn activation_fraction_stays_in_range((doc, ctx) in doc_and_ctx()) {
        let compiled = compile(&doc, &ctx, None).unwrap();
        match compiled.activation_fraction {
            Some(f) => prop_assert!((0.0..=1.0).contains(&f)),
            None => prop_assert_eq!(compiled.domain_count, 0),
        }
    }
}
