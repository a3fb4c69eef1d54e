//! Remote NLI backend tests against a minimal in-process HTTP stub.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread::JoinHandle;

use rationale_core::oracle::{
    build_oracle, OracleBackend, OracleConfig, OracleError, RemoteNliOracle, TextOracle,
};

enum StubReply {
    Json(&'static str),
    Status(u16),
    Garbage,
}

/// Serves `replies.len()` requests on an ephemeral port, one reply per
/// request, then shuts down.
fn spawn_stub(replies: Vec<StubReply>) -> (String, JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub listener");
    let url = format!("http://{}", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        let mut bodies = Vec::new();
        for reply in replies {
            let (stream, _) = listener.accept().expect("accept");
            bodies.push(handle_connection(stream, reply));
        }
        bodies
    });
    (url, handle)
}

fn handle_connection(mut stream: TcpStream, reply: StubReply) -> String {
    let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).expect("read header");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            break;
        }
        if let Some(value) = trimmed
            .to_ascii_lowercase()
            .strip_prefix("content-length:")
            .map(str::trim)
            .map(str::to_owned)
        {
            content_length = value.parse().unwrap_or(0);
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body).expect("read body");

    let response = match reply {
        StubReply::Json(json) => format!(
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
            json.len(),
            json
        ),
        StubReply::Status(code) => format!(
            "HTTP/1.1 {code} Service Unavailable\r\nContent-Length: 0\r\nConnection: close\r\n\r\n"
        ),
        StubReply::Garbage => {
            let body = "this is not json";
            format!(
                "HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                body.len(),
                body
            )
        }
    };
    stream.write_all(response.as_bytes()).expect("write response");
    stream.flush().ok();
    String::from_utf8_lossy(&body).into_owned()
}

fn remote_config(url: &str) -> OracleConfig {
    OracleConfig {
        backend: OracleBackend::Remote,
        remote_url: Some(url.to_owned()),
        cache_enabled: false,
        ..OracleConfig::default()
    }
}

#[test]
fn contradiction_label_maps_onto_judgement() {
    let (url, handle) = spawn_stub(vec![StubReply::Json(
        r#"{"label": "CONTRADICTION", "scores": {"CONTRADICTION": 0.98, "ENTAILMENT": 0.01, "NEUTRAL": 0.01}}"#,
    )]);
    let oracle = RemoteNliOracle::new(remote_config(&url)).unwrap();
    let judgement = oracle.remote_judge("the premise", "the hypothesis").unwrap();
    assert!(judgement.contradiction);
    assert!(!judgement.implication);
    assert_eq!(judgement.contradiction_score, 0.98);
    assert_eq!(judgement.backend, "remote");

    let bodies = handle.join().unwrap();
    assert!(bodies[0].contains("\"premise\":\"the premise\""));
    assert!(bodies[0].contains("\"hypothesis\":\"the hypothesis\""));
}

#[test]
fn neutral_label_yields_neither_relation() {
    let (url, handle) = spawn_stub(vec![StubReply::Json(
        r#"{"label": "NEUTRAL", "scores": {"NEUTRAL": 0.9}}"#,
    )]);
    let oracle = RemoteNliOracle::new(remote_config(&url)).unwrap();
    let judgement = oracle.contradicts("a", "b").unwrap();
    assert!(!judgement.contradiction);
    assert!(!judgement.implication);
    handle.join().unwrap();
}

#[test]
fn entailment_label_maps_onto_implication() {
    let (url, handle) = spawn_stub(vec![StubReply::Json(
        r#"{"label": "ENTAILMENT", "scores": {"ENTAILMENT": 0.85}}"#,
    )]);
    let oracle = RemoteNliOracle::new(remote_config(&url)).unwrap();
    let judgement = oracle.implies("a", "b").unwrap();
    assert!(judgement.implication);
    assert_eq!(judgement.implication_score, 0.85);
    handle.join().unwrap();
}

#[test]
fn http_error_surfaces_as_remote_unavailable() {
    let (url, handle) = spawn_stub(vec![StubReply::Status(503)]);
    let oracle = RemoteNliOracle::new(remote_config(&url)).unwrap();
    let error = oracle.contradicts("a", "b").unwrap_err();
    assert!(matches!(error, OracleError::RemoteUnavailable(_)), "{error}");
    handle.join().unwrap();
}

#[test]
fn unparseable_body_surfaces_as_malformed_response() {
    let (url, handle) = spawn_stub(vec![StubReply::Garbage]);
    let oracle = RemoteNliOracle::new(remote_config(&url)).unwrap();
    let error = oracle.contradicts("a", "b").unwrap_err();
    assert!(matches!(error, OracleError::MalformedResponse(_)), "{error}");
    handle.join().unwrap();
}

#[test]
fn unreachable_endpoint_is_remote_unavailable() {
    // Nothing listens on this port.
    let oracle = RemoteNliOracle::new(remote_config("http://127.0.0.1:1")).unwrap();
    let error = oracle.contradicts("a", "b").unwrap_err();
    assert!(matches!(error, OracleError::RemoteUnavailable(_)), "{error}");
}

#[test]
fn missing_url_is_rejected_at_construction() {
    let config = OracleConfig {
        backend: OracleBackend::Remote,
        remote_url: None,
        ..OracleConfig::default()
    };
    assert!(matches!(
        RemoteNliOracle::new(config),
        Err(OracleError::MissingRemoteUrl)
    ));
}

#[test]
fn environment_variable_overrides_configured_url() {
    let (url, handle) = spawn_stub(vec![StubReply::Json(
        r#"{"label": "NEUTRAL", "scores": {}}"#,
    )]);
    // The configured URL points nowhere; the environment wins.
    std::env::set_var("RATIONALE_NLI_URL", &url);
    let config = OracleConfig {
        backend: OracleBackend::Remote,
        remote_url: Some("http://127.0.0.1:1".to_owned()),
        cache_enabled: false,
        ..OracleConfig::default()
    };
    let oracle = build_oracle(&config).unwrap();
    let judgement = oracle.contradicts("a", "b").unwrap();
    std::env::remove_var("RATIONALE_NLI_URL");
    assert!(!judgement.contradiction);
    handle.join().unwrap();
}
