mod common;

use abstractmeta::ingest::OpenMlClient;
use abstractmeta::Error;
use std::time::Duration;

use common::{iris_like_arff, MockServer};

fn description(base: &str, id: u64) -> Vec<u8> {
    serde_json::json!({
        "data_set_description": {
            "id": id.to_string(),
            "name": "iris",
            "url": format!("{base}/data/v1/download/{id}"),
            "default_target_attribute": "class",
        }
    })
    .to_string()
    .into_bytes()
}

fn client(endpoint: &str, cache: &std::path::Path) -> OpenMlClient {
    let mut c = OpenMlClient::new(endpoint, cache);
    c.initial_backoff = Duration::from_millis(5);
    c.timeout = Duration::from_secs(10);
    c
}

#[test]
fn fetch_then_serve_from_cache() {
    let server = MockServer::start(|base, path| match path {
        "/api/v1/json/data/61" => (200, description(base, 61)),
        "/data/v1/download/61" => (200, iris_like_arff().into_bytes()),
        _ => (404, b"{}".to_vec()),
    });
    let dir = tempfile::tempdir().unwrap();
    let c = client(&server.endpoint, dir.path());
    let first = c.fetch(61).unwrap();
    assert_eq!((first.n_instances(), first.n_features(), first.n_classes()), (150, 4, 3));
    assert_eq!(first.name, "iris");
    assert_eq!(server.hits(), 2);
    assert!(dir.path().join("openml/61.arff").exists());
    let second = c.fetch(61).unwrap();
    assert_eq!(server.hits(), 2, "warm cache must not touch the network");
    assert_eq!(first, second);
}

#[test]
fn unknown_id_is_terminal() {
    let server = MockServer::start(|_, _| {
        (412, br#"{"error":{"code":"111","message":"Unknown dataset"}}"#.to_vec())
    });
    let dir = tempfile::tempdir().unwrap();
    match client(&server.endpoint, dir.path()).fetch(0) {
        Err(Error::UnknownDataset { id: 0, status: 412, message }) => assert_eq!(message, "Unknown dataset"),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(server.hits(), 1);
}

#[test]
fn server_errors_are_retried() {
    let server = MockServer::start(|_, _| (503, b"busy".to_vec()));
    let dir = tempfile::tempdir().unwrap();
    match client(&server.endpoint, dir.path()).fetch(5) {
        Err(Error::Network { attempts: 3, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(server.hits(), 3);
}

#[test]
fn unreachable_endpoint_exhausts_retries() {
    // bind then drop to get a port nobody listens on
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let dir = tempfile::tempdir().unwrap();
    let err = client(&format!("http://127.0.0.1:{port}"), dir.path()).fetch(1).unwrap_err();
    assert!(matches!(err, Error::Network { attempts: 3, .. }), "{err:?}");
}

#[test]
fn malformed_description_is_terminal() {
    let server = MockServer::start(|_, _| (200, b"{\"nope\": 1}".to_vec()));
    let dir = tempfile::tempdir().unwrap();
    let err = client(&server.endpoint, dir.path()).fetch(2).unwrap_err();
    assert!(matches!(err, Error::MalformedPayload(_)), "{err:?}");
    assert_eq!(server.hits(), 1);
}

#[test]
#[ignore = "needs network access to openml.org"]
fn live_iris() {
    let dir = tempfile::tempdir().unwrap();
    let ds = OpenMlClient::new(abstractmeta::ingest::openml::DEFAULT_ENDPOINT, dir.path())
        .fetch(61)
        .unwrap();
    assert_eq!((ds.n_instances(), ds.n_features(), ds.n_classes()), (150, 4, 3));
}
