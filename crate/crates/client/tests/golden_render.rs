//! Rendered prompts against golden files.

use std::collections::BTreeMap;

use judgekit_client::{render_prompt, TemplateId};

#[test]
fn pointwise_nocot_k9_matches_golden_file() {
    let mut fields = BTreeMap::new();
    fields.insert("k_max".to_string(), "9".to_string());
    fields.insert(
        "user_prompt".to_string(),
        "What is the capital of France?".to_string(),
    );
    fields.insert("answer".to_string(), "Paris.".to_string());
    let messages = render_prompt(TemplateId::PointwiseScore { cot: false }, &fields).unwrap();
    let rendered = format!(
        "SYSTEM\n{}\nUSER\n{}\n",
        messages[0].content, messages[1].content
    );
    let golden = include_str!("golden/pointwise_nocot_k9.txt");
    assert_eq!(rendered, golden);
}

#[test]
fn swapped_pairwise_prompts_differ_only_in_answer_blocks() {
    let base: BTreeMap<String, String> = [
        ("user_prompt", "Q?"),
        ("answer_a", "alpha"),
        ("answer_b", "beta"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    let mut swapped = base.clone();
    swapped.insert("answer_a".into(), "beta".into());
    swapped.insert("answer_b".into(), "alpha".into());

    let template = TemplateId::PairwiseRank { likert: 3, cot: false };
    let fwd = render_prompt(template, &base).unwrap();
    let bwd = render_prompt(template, &swapped).unwrap();
    assert_eq!(fwd[0].content, bwd[0].content);
    let neutralize = |text: &str| text.replace("alpha", "X").replace("beta", "X");
    assert_eq!(neutralize(&fwd[1].content), neutralize(&bwd[1].content));
    assert_ne!(fwd[1].content, bwd[1].content);
}
