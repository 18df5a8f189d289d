//! Prompt templates for the judge settings, shipped as text assets.
//!
//! Placeholders use `{{name}}`; literal single braces (the verdict format
//! strings shown to the judge) pass through untouched. Listwise user
//! prompts are assembled from a per-model block template plus an optional
//! pairwise evaluation order section.

use std::collections::BTreeMap;

use crate::ClientError;

macro_rules! asset {
    ($name:literal) => {
        include_str!(concat!("../assets/", $name, ".txt"))
    };
}

/// Which prompt pair a request renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "template")]
pub enum TemplateId {
    PointwiseScore { cot: bool },
    PairwiseScore { cot: bool },
    PairwiseRank { likert: usize, cot: bool },
    Listwise { interm: bool },
}

/// One chat message.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Self {
            role: "system".into(),
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: "user".into(),
            content: content.into(),
        }
    }
}

fn fill(template: &str, fields: &BTreeMap<String, String>) -> Result<String, ClientError> {
    let mut out = template.to_string();
    for (key, value) in fields {
        out = out.replace(&format!("{{{{{key}}}}}"), value);
    }
    if let Some(start) = out.find("{{") {
        let end = out[start..].find("}}").map(|e| start + e + 2).unwrap_or(out.len());
        return Err(ClientError::MissingField {
            field: out[start + 2..end.saturating_sub(2)].to_string(),
        });
    }
    Ok(out)
}

fn required<'a>(
    fields: &'a BTreeMap<String, String>,
    key: &str,
) -> Result<&'a String, ClientError> {
    fields.get(key).ok_or_else(|| ClientError::MissingField {
        field: key.to_string(),
    })
}

fn listwise_user(
    fields: &BTreeMap<String, String>,
    interm: bool,
    n: usize,
) -> Result<String, ClientError> {
    let mut blocks = Vec::with_capacity(n);
    for index in 0..n {
        let letter = char::from(b'A' + index as u8).to_string();
        let response = required(fields, &format!("response_{}", letter.to_lowercase()))?;
        let mut block_fields = BTreeMap::new();
        block_fields.insert("letter".to_string(), letter);
        block_fields.insert("response".to_string(), response.clone());
        blocks.push(fill(asset!("listwise_model_block"), &block_fields)?);
    }
    let mut user_fields = BTreeMap::new();
    user_fields.insert(
        "conversation".to_string(),
        required(fields, "conversation")?.clone(),
    );
    user_fields.insert("model_blocks".to_string(), blocks.join("\n\n"));
    let mut out = fill(asset!("listwise_user"), &user_fields)?;
    if interm {
        let order = required(fields, "pairwise_order")?;
        out.push_str("\n\nPAIRWISE EVALUATION ORDER: ");
        out.push_str(order);
    }
    Ok(out)
}

/// Renders the system and user messages for a template. Every placeholder
/// must be covered by `fields`; scoring templates also take `k_max` and
/// listwise templates take `n` with per-letter responses.
pub fn render_prompt(
    template: TemplateId,
    fields: &BTreeMap<String, String>,
) -> Result<Vec<Message>, ClientError> {
    let messages = match template {
        TemplateId::PointwiseScore { cot } => {
            let system = if cot {
                asset!("pointwise_system_cot")
            } else {
                asset!("pointwise_system_nocot")
            };
            vec![
                Message::system(fill(system, fields)?),
                Message::user(fill(asset!("pointwise_user"), fields)?),
            ]
        }
        TemplateId::PairwiseScore { cot } => {
            let system = if cot {
                asset!("pairwise_score_system_cot")
            } else {
                asset!("pairwise_score_system_nocot")
            };
            vec![
                Message::system(fill(system, fields)?),
                Message::user(fill(asset!("pairwise_user"), fields)?),
            ]
        }
        TemplateId::PairwiseRank { likert, cot } => {
            let system = match (likert, cot) {
                (2, true) => asset!("pairwise_rank_system_likert2_cot"),
                (2, false) => asset!("pairwise_rank_system_likert2_nocot"),
                (3, true) => asset!("pairwise_rank_system_likert3_cot"),
                (3, false) => asset!("pairwise_rank_system_likert3_nocot"),
                (5, true) => asset!("pairwise_rank_system_likert5_cot"),
                (5, false) => asset!("pairwise_rank_system_likert5_nocot"),
                _ => {
                    return Err(ClientError::BadRequest {
                        reason: format!("likert granularity {likert} must be 2, 3, or 5"),
                    })
                }
            };
            vec![
                Message::system(fill(system, fields)?),
                Message::user(fill(asset!("pairwise_user"), fields)?),
            ]
        }
        TemplateId::Listwise { interm } => {
            let n: usize = required(fields, "n")?
                .parse()
                .map_err(|_| ClientError::BadRequest {
                    reason: "field n must be an integer".into(),
                })?;
            if !(2..=26).contains(&n) {
                return Err(ClientError::BadRequest {
                    reason: format!("listwise length {n} outside 2..=26"),
                });
            }
            let slots = vec!["_"; n].join(", ");
            let mut system_fields = fields.clone();
            system_fields.insert("slots".to_string(), slots);
            let system = if interm {
                asset!("listwise_system_interm")
            } else {
                asset!("listwise_system_direct")
            };
            vec![
                Message::system(fill(system, &system_fields)?),
                Message::user(listwise_user(fields, interm, n)?),
            ]
        }
    };
    Ok(messages)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn pointwise_render() {
        let out = render_prompt(
            TemplateId::PointwiseScore { cot: false },
            &fields(&[("k_max", "9"), ("user_prompt", "Q?"), ("answer", "A.")]),
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[0].content.contains("from 1 to 9"));
        assert!(!out[0].content.contains("short explanation"));
        assert!(out[1].content.contains("[Start of Assistant's Answer]\nA."));

        let cot = render_prompt(
            TemplateId::PointwiseScore { cot: true },
            &fields(&[("k_max", "9"), ("user_prompt", "Q?"), ("answer", "A.")]),
        )
        .unwrap();
        assert!(cot[0].content.contains("short explanation"));
    }

    #[test]
    fn missing_field_is_an_error() {
        let err = render_prompt(
            TemplateId::PointwiseScore { cot: false },
            &fields(&[("user_prompt", "Q?"), ("answer", "A.")]),
        )
        .unwrap_err();
        assert!(matches!(err, ClientError::MissingField { field } if field == "k_max"));
    }

    #[test]
    fn pairwise_score_keeps_literal_format_braces() {
        let out = render_prompt(
            TemplateId::PairwiseScore { cot: true },
            &fields(&[
                ("k_max", "9"),
                ("user_prompt", "Q?"),
                ("answer_a", "first"),
                ("answer_b", "second"),
            ]),
        )
        .unwrap();
        assert!(out[0]
            .content
            .contains(r#""Rating A: {rating_a}. Rating B: {rating_b}.""#));
        let user = &out[1].content;
        let a = user.find("first").unwrap();
        let b = user.find("second").unwrap();
        assert!(a < b);
    }

    #[test]
    fn pairwise_rank_variants() {
        let f = fields(&[("user_prompt", "Q?"), ("answer_a", "x"), ("answer_b", "y")]);
        let l5 = render_prompt(TemplateId::PairwiseRank { likert: 5, cot: true }, &f).unwrap();
        assert!(l5[0].content.contains("[[>>]]"));
        assert!(l5[0].content.contains("significantly better"));
        let l2 = render_prompt(TemplateId::PairwiseRank { likert: 2, cot: false }, &f).unwrap();
        assert!(l2[0].content.contains("[[>]]"));
        assert!(!l2[0].content.contains("[[=]]"));
        assert!(render_prompt(TemplateId::PairwiseRank { likert: 4, cot: true }, &f).is_err());
    }

    #[test]
    fn listwise_direct_omits_pairwise_order_section() {
        let mut f = fields(&[("n", "3"), ("conversation", "hello")]);
        for (letter, text) in [("a", "ra"), ("b", "rb"), ("c", "rc")] {
            f.insert(format!("response_{letter}"), text.to_string());
        }
        let direct = render_prompt(TemplateId::Listwise { interm: false }, &f).unwrap();
        assert!(direct[0].content.contains("the 3 AI assistants"));
        assert!(direct[0].content.contains("[[_, _, _]]"));
        assert!(!direct[0].content.contains("PAIRWISE EVALUATION ORDER"));
        assert!(!direct[1].content.contains("PAIRWISE EVALUATION ORDER"));
        assert!(direct[1].content.contains("[MODEL B RESPONSE START]\nrb"));

        f.insert("pairwise_order".to_string(), "[(B, A), (C, B), (A, C)]".to_string());
        let interm = render_prompt(TemplateId::Listwise { interm: true }, &f).unwrap();
        assert!(interm[0].content.contains("PAIRWISE EVALUATION ORDER"));
        assert!(interm[1]
            .content
            .ends_with("PAIRWISE EVALUATION ORDER: [(B, A), (C, B), (A, C)]"));
    }
}
