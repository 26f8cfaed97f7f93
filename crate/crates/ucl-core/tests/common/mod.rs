//! Proptest strategies shared by the integration test files.

use proptest::prelude::*;

use ucl_core::syntax::{
    ConceptRef, ConditionalBlock, Directive, KeywordCondition, Node, SwitchBlock, TaggedContent,
    TextRun,
};

pub fn arb_ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,7}"
}

pub fn arb_concept_ref() -> impl Strategy<Value = ConceptRef> {
    (arb_ident(), prop::option::of(arb_ident())).prop_map(|(id, domain)| match domain {
        Some(d) => ConceptRef::scoped(id, d),
        None => ConceptRef::new(id),
    })
}

pub fn arb_keywords() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-z][a-z0-9]{0,7}", 1..5)
}

pub fn arb_text_run() -> impl Strategy<Value = Node> {
    "[a-zA-Z0-9 \\n.,!?()'-]{1,40}".prop_map(|t| Node::Text(TextRun::new(t)))
}

pub fn arb_directive() -> impl Strategy<Value = Node> {
    let name = prop_oneof![
        Just("LLM".to_string()),
        Just("REQUIRE".to_string()),
        Just("TRANSFORM".to_string()),
        Just("APPLY".to_string()),
        Just("VALIDATE".to_string()),
        Just("ENFORCE".to_string()),
        Just("CRITICAL".to_string()),
        "[A-Z]{2,6}",
    ];
    (name, "[a-zA-Z0-9 .,()'-]{0,24}")
        .prop_map(|(name, payload)| Node::Directive(Directive::new(name, payload)))
}

/// Adjacent text runs merge in source, so a constructed tree must not
/// contain any or it will not re-parse to an equal shape.
pub fn merge_adjacent_text(nodes: Vec<Node>) -> Vec<Node> {
    let mut merged: Vec<Node> = Vec::with_capacity(nodes.len());
    for node in nodes {
        match (merged.last_mut(), node) {
            (Some(Node::Text(prev)), Node::Text(next)) => {
                prev.content.push_str(&next.content);
            }
            (_, node) => merged.push(node),
        }
    }
    merged
}

pub fn arb_nodes() -> impl Strategy<Value = Vec<Node>> {
    let leaf = prop_oneof![3 => arb_text_run(), 2 => arb_directive()];
    let node = leaf.prop_recursive(3, 48, 6, |inner| {
        let children = prop::collection::vec(inner, 0..5).prop_map(merge_adjacent_text);
        prop_oneof![
            3 => (arb_concept_ref(), arb_keywords(), children.clone(), any::<bool>()).prop_map(
                |(subject, keywords, children, contains)| {
                    let condition = if contains {
                        KeywordCondition::contains(subject, keywords)
                    } else {
                        KeywordCondition::equals(subject, keywords)
                    };
                    Node::Conditional(ConditionalBlock::new(condition, children))
                }
            ),
            2 => ("[a-z_]{1,8}", children.clone())
                .prop_map(|(name, children)| Node::Tagged(TaggedContent::new(name, children))),
            1 => (
                arb_concept_ref(),
                prop::collection::vec((arb_concept_ref(), children), 1..4)
            )
                .prop_map(|(selector, cases)| Node::Switch(SwitchBlock::new(selector, cases))),
        ]
    });
    prop::collection::vec(node, 0..8).prop_map(merge_adjacent_text)
}
