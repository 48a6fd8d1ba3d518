//! Shared test helpers: a stub chat-completions server and a toy dataset
//! writer.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

pub type ResponseFn = dyn Fn(usize, &str) -> (u16, String) + Send + Sync;

pub struct StubServer {
    pub endpoint: String,
    requests: Arc<AtomicUsize>,
    shutdown: Arc<AtomicBool>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl StubServer {
    pub fn start(respond: Arc<ResponseFn>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        listener.set_nonblocking(true).unwrap();
        let endpoint = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let requests = Arc::new(AtomicUsize::new(0));
        let shutdown = Arc::new(AtomicBool::new(false));

        let handle = {
            let requests = requests.clone();
            let shutdown = shutdown.clone();
            std::thread::spawn(move || {
                while !shutdown.load(Ordering::Relaxed) {
                    match listener.accept() {
                        Ok((mut stream, _)) => {
                            stream.set_nonblocking(false).unwrap();
                            stream
                                .set_read_timeout(Some(Duration::from_secs(5)))
                                .unwrap();
                            let body = read_request(&mut stream);
                            let n = requests.fetch_add(1, Ordering::SeqCst);
                            let (status, payload) = respond(n, &body);
                            let reason = if status == 200 { "OK" } else { "Error" };
                            let response = format!(
                                "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
                                payload.len()
                            );
                            let _ = stream.write_all(response.as_bytes());
                        }
                        Err(ref e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                            std::thread::sleep(Duration::from_millis(5));
                        }
                        Err(_) => break,
                    }
                }
            })
        };

        Self {
            endpoint,
            requests,
            shutdown,
            handle: Some(handle),
        }
    }

    pub fn count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn read_request(stream: &mut std::net::TcpStream) -> String {
    let mut buffer = Vec::new();
    let mut chunk = [0u8; 1024];
    let header_end;
    loop {
        let n = stream.read(&mut chunk).unwrap_or(0);
        if n == 0 {
            return String::new();
        }
        buffer.extend_from_slice(&chunk[..n]);
        if let Some(pos) = buffer.windows(4).position(|w| w == b"\r\n\r\n") {
            header_end = pos;
            break;
        }
    }
    let headers = String::from_utf8_lossy(&buffer[..header_end]).to_string();
    let content_length: usize = headers
        .lines()
        .find_map(|l| {
            let (name, value) = l.split_once(':')?;
            name.eq_ignore_ascii_case("content-length")
                .then(|| value.trim().parse().ok())?
        })
        .unwrap_or(0);
    let mut body = buffer[header_end + 4..].to_vec();
    while body.len() < content_length {
        let n = stream.read(&mut chunk).unwrap_or(0);
        if n == 0 {
            break;
        }
        body.extend_from_slice(&chunk[..n]);
    }
    String::from_utf8_lossy(&body).to_string()
}

pub fn chat_payload(content: &str) -> (u16, String) {
    (
        200,
        format!(r#"{{"choices":[{{"message":{{"role":"assistant","content":"{content}"}}}}]}}"#),
    )
}

/// Write a deterministic keyword-labeled toy dataset (nodes/edges/labels) to
/// `dir/data`, mirroring the generator used across the test suites.
pub fn write_toy_dataset(dir: &Path, n: usize, seed: u64) {
    use tagbench_core::synth;

    let graph = synth::keyword_graph(&synth::KeywordGraphConfig {
        n_nodes: n,
        n_labels: 3,
        degree: 4,
        homophily: (0.6, 0.95),
        junk_tokens: 0,
        seed,
    });
    let data = dir.join("data");
    std::fs::create_dir_all(&data).unwrap();

    let mut nodes = std::fs::File::create(data.join("nodes.jsonl")).unwrap();
    for node in graph.nodes() {
        let label = node.label.map(|l| graph.label_vocab()[l].clone());
        writeln!(
            nodes,
            "{}",
            serde_json::json!({
                "id": node.id,
                "title": node.title,
                "body": format!("An extended discussion of {}.", node.title),
                "label": label,
                "year": node.year,
            })
        )
        .unwrap();
    }
    let mut edges = std::fs::File::create(data.join("edges.tsv")).unwrap();
    for (s, d) in graph.edge_ids() {
        writeln!(edges, "{s}\t{d}").unwrap();
    }
    std::fs::write(
        data.join("labels.txt"),
        graph.label_vocab().join("\n") + "\n",
    )
    .unwrap();
}
