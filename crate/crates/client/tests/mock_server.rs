//! Client behavior against a scripted local HTTP server: parsing, retry
//! with backoff, distinct error classes, caching, and both-order runs.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use judgekit_client::{ClientError, EndpointConfig, JudgeClient, JudgeRequest, TemplateId};
use judgekit_core::extract::Setting;
use judgekit_core::pairwise::PresentationOrder;

/// Serves the scripted `(status, body)` responses in order, then repeats
/// the last one. Returns the endpoint URL and a hit counter.
fn spawn_server(responses: Vec<(u16, String)>) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
    let port = listener.local_addr().unwrap().port();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { break };
            let hit = counter.fetch_add(1, Ordering::SeqCst);
            let (status, body) = responses
                .get(hit.min(responses.len() - 1))
                .cloned()
                .unwrap_or((500, String::new()));
            let mut reader = BufReader::new(stream);
            let mut content_length = 0usize;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).is_err() || line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(rest) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    content_length = rest.trim().parse().unwrap_or(0);
                }
            }
            let mut payload = vec![0u8; content_length];
            let _ = reader.read_exact(&mut payload);
            let reason = match status {
                200 => "OK",
                401 => "Unauthorized",
                429 => "Too Many Requests",
                _ => "Error",
            };
            let response = format!(
                "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let mut stream = reader.into_inner();
            let _ = stream.write_all(response.as_bytes());
        }
    });
    (format!("http://127.0.0.1:{port}/v1"), hits)
}

type CannedToken<'a> = (&'a str, f64, &'a [(&'a str, f64)]);

fn canned_response(content: &str, tokens: &[CannedToken]) -> String {
    let positions: Vec<serde_json::Value> = tokens
        .iter()
        .map(|(token, lp, top)| {
            serde_json::json!({
                "token": token,
                "logprob": lp,
                "top_logprobs": top
                    .iter()
                    .map(|(t, l)| serde_json::json!({"token": t, "logprob": l}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({
        "choices": [{
            "message": {"role": "assistant", "content": content},
            "logprobs": {"content": positions},
        }]
    })
    .to_string()
}

fn pointwise_request(id: &str) -> JudgeRequest {
    JudgeRequest::new(id, TemplateId::PointwiseScore { cot: false }, "test-model")
        .field("k_max", "9")
        .field("user_prompt", "Which answer?")
        .field("answer", "This one.")
}

fn fast_config(url: &str) -> EndpointConfig {
    let mut config = EndpointConfig::new(url);
    config.backoff = Duration::from_millis(1);
    config
}

#[test]
fn fetch_parses_record() {
    let body = canned_response("7", &[("7", -0.1, &[("7", -0.1), ("6", -2.4)])]);
    let (url, hits) = spawn_server(vec![(200, body)]);
    let client = JudgeClient::new(fast_config(&url));
    let outcome = client.fetch(&pointwise_request("p0")).unwrap();
    assert_eq!(outcome.attempts, 1);
    assert!(!outcome.from_cache);
    let rec = &outcome.record;
    assert_eq!(rec.id, "p0");
    assert_eq!(rec.setting, Setting::PointwiseScore);
    assert_eq!(rec.text, "7");
    assert_eq!(rec.positions.len(), 1);
    assert_eq!(rec.positions[0].candidates.len(), 2);
    assert_eq!(rec.positions[0].candidates[0], ("7".to_string(), -0.1));
    rec.validate().unwrap();
    assert_eq!(hits.load(Ordering::SeqCst), 1);
}

#[test]
fn transient_failures_retry_then_succeed() {
    let body = canned_response("5", &[("5", -0.2, &[("5", -0.2)])]);
    let (url, hits) = spawn_server(vec![
        (429, "{}".into()),
        (429, "{}".into()),
        (200, body),
    ]);
    let client = JudgeClient::new(fast_config(&url));
    let outcome = client.fetch(&pointwise_request("p1")).unwrap();
    assert_eq!(outcome.attempts, 3);
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn retries_exhaust_after_max() {
    let (url, hits) = spawn_server(vec![(503, "{}".into())]);
    let mut config = fast_config(&url);
    config.max_retries = 2;
    let client = JudgeClient::new(config);
    let err = client.fetch(&pointwise_request("p2")).unwrap_err();
    match err {
        ClientError::RetriesExhausted { attempts, .. } => assert_eq!(attempts, 3),
        other => panic!("expected retries exhausted, got {other}"),
    }
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn auth_failure_is_not_retried() {
    let (url, hits) = spawn_server(vec![(401, "{}".into())]);
    let client = JudgeClient::new(fast_config(&url));
    let err = client.fetch(&pointwise_request("p3")).unwrap_err();
    assert!(matches!(err, ClientError::Auth { status: 401 }));
    assert_eq!(hits.load(Ordering::SeqCst), 1);
}

#[test]
fn missing_logprobs_is_malformed() {
    let body = serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": "7"}}]
    })
    .to_string();
    let (url, _) = spawn_server(vec![(200, body)]);
    let client = JudgeClient::new(fast_config(&url));
    let err = client.fetch(&pointwise_request("p4")).unwrap_err();
    assert!(matches!(err, ClientError::Malformed { .. }), "{err}");
}

#[test]
fn identical_requests_hit_network_once() {
    let body = canned_response("7", &[("7", -0.1, &[("7", -0.1)])]);
    let (url, hits) = spawn_server(vec![(200, body)]);
    let client = JudgeClient::new(fast_config(&url));
    let first = client.fetch(&pointwise_request("p5")).unwrap();
    let second = client.fetch(&pointwise_request("p5-again")).unwrap();
    assert!(!first.from_cache);
    assert!(second.from_cache);
    assert_eq!(second.attempts, 0);
    assert_eq!(hits.load(Ordering::SeqCst), 1);
    // Metadata still comes from the request, not the cache entry.
    assert_eq!(second.record.id, "p5-again");
}

#[test]
fn disk_cache_replays_without_network() {
    let dir = tempfile::tempdir().unwrap();
    let body = canned_response("7", &[("7", -0.1, &[("7", -0.1)])]);
    let (url, hits) = spawn_server(vec![(200, body)]);

    let mut config = fast_config(&url);
    config.cache_dir = Some(dir.path().to_path_buf());
    let client = JudgeClient::new(config);
    let first = client.fetch(&pointwise_request("p6")).unwrap();
    assert!(!first.from_cache);
    assert_eq!(hits.load(Ordering::SeqCst), 1);

    // Fresh client, dead endpoint: the record must replay from disk.
    let mut offline = EndpointConfig::new("http://127.0.0.1:1/v1");
    offline.cache_dir = Some(dir.path().to_path_buf());
    offline.backoff = Duration::from_millis(1);
    offline.max_retries = 0;
    let replayer = JudgeClient::new(offline);
    let replay = replayer.fetch(&pointwise_request("p6")).unwrap();
    assert!(replay.from_cache);
    assert_eq!(replay.record.text, "7");

    // Round trip through the JSONL schema is lossless.
    let line = serde_json::to_string(&replay.record).unwrap();
    let back: judgekit_core::extract::LogprobRecord = serde_json::from_str(&line).unwrap();
    assert_eq!(back, replay.record);
}

#[test]
fn run_both_orders_swaps_answers() {
    let body = canned_response("[[>]]", &[("[[>]]", -0.1, &[("[[>]]", -0.1)])]);
    let (url, hits) = spawn_server(vec![(200, body)]);
    let client = JudgeClient::new(fast_config(&url));
    let base = JudgeRequest::new("pair0", TemplateId::PairwiseRank { likert: 3, cot: false }, "m")
        .field("user_prompt", "Q?")
        .field("answer_a", "alpha")
        .field("answer_b", "beta");
    let (first, second) = client.run_both_orders(&base);
    let first = first.unwrap();
    let second = second.unwrap();
    assert_eq!(first.record.order, Some(PresentationOrder::FirstSecond));
    assert_eq!(second.record.order, Some(PresentationOrder::SecondFirst));
    assert_eq!(first.record.id, "pair0#o12");
    assert_eq!(second.record.id, "pair0#o21");
    // Different prompts, so both really went out.
    assert_eq!(hits.load(Ordering::SeqCst), 2);
}

#[test]
fn forced_prefix_requires_endpoint_support() {
    let (url, hits) = spawn_server(vec![(200, "{}".into())]);
    let client = JudgeClient::new(fast_config(&url));
    let mut req = pointwise_request("p7");
    req.forced_prefix = Some("Rating: ".into());
    let err = client.fetch(&req).unwrap_err();
    assert!(matches!(err, ClientError::PrefixUnsupported));
    assert_eq!(hits.load(Ordering::SeqCst), 0);
}

#[test]
fn fetch_many_preserves_order() {
    let body = canned_response("3", &[("3", -0.3, &[("3", -0.3)])]);
    let (url, _) = spawn_server(vec![(200, body)]);
    let mut config = fast_config(&url);
    config.concurrency = 3;
    let client = JudgeClient::new(config);
    let reqs: Vec<JudgeRequest> = (0..8)
        .map(|i| {
            pointwise_request(&format!("many{i}")).field("user_prompt", format!("Q{i}"))
        })
        .collect();
    let outcomes = client.fetch_many(&reqs);
    assert_eq!(outcomes.len(), 8);
    for (i, outcome) in outcomes.iter().enumerate() {
        assert_eq!(outcome.as_ref().unwrap().record.id, format!("many{i}"));
    }
}
