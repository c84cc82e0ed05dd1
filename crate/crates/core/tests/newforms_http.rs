//! Newform client against a local HTTP server.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use ceresa_core::newforms::cache;
use ceresa_core::newforms::config::NewformConfig;
use ceresa_core::newforms::{Mode, NewformClient, NewformError, Source};

#[derive(Clone)]
struct Reply {
    status: u16,
    body: String,
    delay: Duration,
}

impl Reply {
    fn ok(body: &str) -> Self {
        Self { status: 200, body: body.to_string(), delay: Duration::ZERO }
    }
}

struct Server {
    url: String,
    hits: Arc<AtomicUsize>,
    paths: Arc<Mutex<Vec<(Instant, String)>>>,
}

fn serve(reply: impl Fn(&str) -> Reply + Send + Sync + 'static) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/api/mf_newforms/", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let paths = Arc::new(Mutex::new(Vec::new()));
    let reply = Arc::new(reply);
    let (h, p) = (hits.clone(), paths.clone());
    thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let (h, p, reply) = (h.clone(), p.clone(), reply.clone());
            thread::spawn(move || handle(stream, &h, &p, &*reply));
        }
    });
    Server { url, hits, paths }
}

fn handle(mut stream: TcpStream, hits: &AtomicUsize, paths: &Mutex<Vec<(Instant, String)>>, reply: &dyn Fn(&str) -> Reply) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).map_or(true, |n| n == 0) || line == "\r\n" {
            break;
        }
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("").to_string();
    hits.fetch_add(1, Ordering::SeqCst);
    paths.lock().unwrap().push((Instant::now(), path.clone()));
    let r = reply(&path);
    thread::sleep(r.delay);
    let head = format!(
        "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        r.status,
        r.body.len()
    );
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(r.body.as_bytes());
}

fn level_of(path: &str) -> u64 {
    path.split(['?', '&']).find_map(|kv| kv.strip_prefix("level=")).and_then(|v| v.parse().ok()).unwrap_or(0)
}

fn records_for(level: u64) -> String {
    format!(
        r#"{{"data": [
            {{"label": "{level}.2.a.b", "level": {level}, "weight": 2, "char_orbit_index": 1, "dim": 1, "fricke_eigenval": -1, "analytic_rank": 0}},
            {{"label": "{level}.2.a.a", "level": {level}, "weight": 2, "char_orbit_index": 1, "dim": 1, "fricke_eigenval": 1, "analytic_rank": 1}},
            {{"label": "{level}.2.c.a", "level": {level}, "weight": 2, "char_orbit_index": 3, "dim": 2, "fricke_eigenval": 1, "analytic_rank": 0}}
        ]}}"#
    )
}

fn client(url: &str, cache_dir: &Path, configure: impl FnOnce(&mut NewformConfig)) -> NewformClient {
    let mut cfg = NewformConfig { base_url: url.to_string(), cache_dir: cache_dir.to_path_buf(), requests_per_second: 0.0, ..Default::default() };
    configure(&mut cfg);
    NewformClient::new(cfg, Mode::Online)
}

#[test]
fn parses_normalizes_and_caches() {
    let server = serve(|p| Reply::ok(&records_for(level_of(p))));
    let dir = tempfile::tempdir().unwrap();
    let snap = client(&server.url, dir.path(), |_| {}).fetch_newforms(37).unwrap();
    let labels: Vec<_> = snap.records.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["37.2.a.a", "37.2.a.b"], "sorted, nontrivial character dropped");
    assert_eq!(snap.records[0].fricke_sign, -1);
    assert_eq!(snap.records[0].analytic_rank, Some(1));
    assert!(snap.records.iter().all(|r| r.source == Source::Online));
    assert!(snap.complete);

    let path = &server.paths.lock().unwrap()[0].1;
    for q in ["level=37", "weight=2", "char_orbit_index=1"] {
        assert!(path.contains(q), "{path}");
    }

    assert!(cache::path_for(dir.path(), 37).ends_with("level_37.json"));
    let offline = NewformClient::new(NewformConfig { cache_dir: dir.path().to_path_buf(), ..Default::default() }, Mode::Offline);
    let cached = offline.fetch_newforms(37).unwrap();
    assert!(cached.records.iter().all(|r| r.source == Source::Cache));
    assert_eq!(cached.records.len(), 2);
}

#[test]
fn repeated_fetches_are_byte_identical() {
    let server = serve(|p| Reply::ok(&records_for(level_of(p))));
    let dir = tempfile::tempdir().unwrap();
    client(&server.url, dir.path(), |_| {}).fetch_newforms(43).unwrap();
    let first = std::fs::read(cache::path_for(dir.path(), 43)).unwrap();
    client(&server.url, dir.path(), |_| {}).fetch_newforms(43).unwrap();
    let second = std::fs::read(cache::path_for(dir.path(), 43)).unwrap();
    assert_eq!(first, second);

    let read = |_: ()| {
        let c = NewformClient::new(NewformConfig { cache_dir: dir.path().to_path_buf(), ..Default::default() }, Mode::Offline);
        serde_json::to_vec(&c.fetch_newforms(43).unwrap()).unwrap()
    };
    assert_eq!(read(()), read(()));
}

#[test]
fn rate_limit_spaces_requests() {
    let server = serve(|p| Reply::ok(&records_for(level_of(p))));
    let dir = tempfile::tempdir().unwrap();
    let c = Arc::new(client(&server.url, dir.path(), |cfg| cfg.requests_per_second = 5.0));
    let handles: Vec<_> = [11u64, 14, 15, 17].into_iter().map(|l| {
        let c = c.clone();
        thread::spawn(move || c.fetch_newforms(l).unwrap())
    }).collect();
    for h in handles {
        h.join().unwrap();
    }
    let mut times: Vec<_> = server.paths.lock().unwrap().iter().map(|(t, _)| *t).collect();
    times.sort();
    assert_eq!(times.len(), 4);
    for w in times.windows(2) {
        // 200 ms interval, with slack for scheduling between the limiter and the server.
        assert!(w[1] - w[0] >= Duration::from_millis(150), "{:?}", w[1] - w[0]);
    }
}

#[test]
fn concurrent_requests_for_one_level_are_deduplicated() {
    let server = serve(|p| Reply { delay: Duration::from_millis(200), ..Reply::ok(&records_for(level_of(p))) });
    let dir = tempfile::tempdir().unwrap();
    let c = Arc::new(client(&server.url, dir.path(), |_| {}));
    let handles: Vec<_> = (0..6).map(|_| {
        let c = c.clone();
        thread::spawn(move || c.fetch_newforms(53).unwrap())
    }).collect();
    let snaps: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert_eq!(server.hits.load(Ordering::SeqCst), 1);
    assert!(snaps.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn malformed_record_reports_its_index() {
    let body = r#"[
        {"label": "61.2.a.a", "level": 61, "weight": 2, "char_orbit_index": 1, "fricke_eigenval": 1},
        {"label": "61.2.a.b", "level": 61, "weight": 2, "char_orbit_index": 1}
    ]"#;
    let server = serve(move |_| Reply::ok(body));
    let dir = tempfile::tempdir().unwrap();
    match client(&server.url, dir.path(), |_| {}).fetch_newforms(61) {
        Err(NewformError::Parse { index: Some(1), .. }) => {}
        other => panic!("expected a parse error at record 1, got {other:?}"),
    }
    assert!(!cache::path_for(dir.path(), 61).exists(), "nothing cached on failure");

    let server = serve(|_| Reply::ok("not json"));
    assert!(matches!(client(&server.url, dir.path(), |_| {}).fetch_newforms(61), Err(NewformError::Parse { index: None, .. })));
}

#[test]
fn timeouts_and_server_errors_are_transient() {
    let server = serve(|_| Reply { delay: Duration::from_secs(3), ..Reply::ok("[]") });
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let err = client(&server.url, dir.path(), |cfg| cfg.timeout_ms = 200).fetch_newforms(67).unwrap_err();
    assert!(err.is_transient(), "{err:?}");
    assert!(start.elapsed() < Duration::from_secs(2));

    let server = serve(|_| Reply { status: 503, ..Reply::ok("{}") });
    assert!(client(&server.url, dir.path(), |_| {}).fetch_newforms(67).unwrap_err().is_transient());

    let server = serve(|_| Reply { status: 404, ..Reply::ok("{}") });
    assert_eq!(client(&server.url, dir.path(), |_| {}).fetch_newforms(67).unwrap_err(), NewformError::Http { status: 404 });
}

#[test]
fn corrupt_cache_is_quarantined() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(cache::path_for(dir.path(), 37), b"{ truncated").unwrap();
    let c = NewformClient::new(NewformConfig { cache_dir: dir.path().to_path_buf(), ..Default::default() }, Mode::Offline);
    let snap = c.fetch_newforms(37).unwrap();
    assert!(snap.records.iter().all(|r| r.source == Source::Fixture));
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().any(|n| n.starts_with("level_37.json.corrupt-")), "{names:?}");
}

#[test]
fn offline_without_data_is_unavailable() {
    let dir = tempfile::tempdir().unwrap();
    let c = NewformClient::new(NewformConfig { cache_dir: dir.path().to_path_buf(), ..Default::default() }, Mode::Offline);
    assert_eq!(c.fetch_newforms(1_000_003).unwrap_err(), NewformError::Unavailable { level: 1_000_003 });
}
