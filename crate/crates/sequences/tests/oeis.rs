use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;

use combx_core::BigCount;
use combx_sequences::oeis::{parse_response, Lookup, OeisClient, OeisError};

const A127632: &str = include_str!("data/oeis_a127632.json");
const FUSS_CATALAN: &str = include_str!("data/oeis_fuss_catalan_wrapped.json");
const NO_MATCH: &str = include_str!("data/oeis_no_match.json");

fn terms(v: &[u64]) -> Vec<BigCount> {
    v.iter().map(|&x| BigCount::from(x)).collect()
}

#[test]
fn observed_231_sequence_matches_a127632() {
    let m = parse_response(A127632, &terms(&[3, 11, 44, 185, 804])).unwrap();
    assert_eq!(m.len(), 1);
    assert_eq!(m[0].sequence_id, "A127632");
    assert_eq!(m[0].matched_offset, 2);
}

#[test]
fn wrapped_layout_keeps_server_order() {
    let m = parse_response(FUSS_CATALAN, &terms(&[1, 3, 12, 55, 273, 1428])).unwrap();
    let ids: Vec<&str> = m.iter().map(|x| x.sequence_id.as_str()).collect();
    assert_eq!(ids, ["A001764", "A006013"]);
    assert_eq!(m[0].matched_offset, 1);
    assert!(m.iter().all(
        |x| x.sequence_id.len() == 7 && x.sequence_id[1..].bytes().all(|b| b.is_ascii_digit())
    ));
}

#[test]
fn null_results_mean_no_match() {
    assert!(parse_response(NO_MATCH, &terms(&[8, 91, 1210, 17799]))
        .unwrap()
        .is_empty());
}

/// Serves one canned HTTP response and reports the request line.
fn serve_once(status: &'static str, body: &'static str) -> (String, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut request_line = String::new();
        reader.read_line(&mut request_line).unwrap();
        let mut line = String::new();
        while reader.read_line(&mut line).unwrap() > 2 {
            line.clear();
        }
        write!(
            stream,
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        request_line
    });
    (base, handle)
}

#[test]
fn lookup_against_local_server() {
    let (base, handle) = serve_once("200 OK", A127632);
    let client = OeisClient::new(base, false);
    let found = client.lookup(&terms(&[3, 11, 44, 185, 804])).unwrap();
    let request = handle.join().unwrap();
    assert!(
        request.starts_with("GET /search?q=3,11,44,185,804&fmt=json "),
        "{request}"
    );
    match found {
        Lookup::Found(m) => assert_eq!(m[0].sequence_id, "A127632"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn server_errors_are_retriable() {
    let (base, handle) = serve_once("503 Service Unavailable", "busy");
    let err = OeisClient::new(base, false)
        .lookup(&terms(&[1, 2, 3, 4]))
        .unwrap_err();
    handle.join().unwrap();
    assert!(err.is_retriable(), "{err}");
}

#[test]
fn garbage_body_is_a_parse_error() {
    let (base, handle) = serve_once("200 OK", "<html>not json</html>");
    let err = OeisClient::new(base, false)
        .lookup(&terms(&[1, 2, 3, 4]))
        .unwrap_err();
    handle.join().unwrap();
    assert!(matches!(err, OeisError::Parse(_)), "{err}");
    assert!(!err.is_retriable());
}
