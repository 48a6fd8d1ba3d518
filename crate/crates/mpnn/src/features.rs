use ndarray::Array2;
use sha2::{Digest, Sha256};
use tagbench_core::TextAttributedGraph;

/// Hashed bag-of-words title features.
///
/// Tokens are the lowercased maximal alphanumeric runs of the title. Each
/// token is hashed (SHA-256 over the seed and the token, so rows are stable
/// across platforms) into one of `d` buckets with a sign bit for bucket
/// balance; the accumulated row is L2-normalized. Titles without tokens
/// produce the zero row.
pub fn featurize(graph: &TextAttributedGraph, d: usize, seed: u64) -> Array2<f64> {
    assert!(d >= 1, "feature dimension must be at least 1");
    let mut features = Array2::<f64>::zeros((graph.node_count(), d));
    for (row, node) in graph.nodes().iter().enumerate() {
        let lower = node.title.to_lowercase();
        for token in lower.split(|c: char| !c.is_alphanumeric()) {
            if token.is_empty() {
                continue;
            }
            let mut hasher = Sha256::new();
            hasher.update(seed.to_le_bytes());
            hasher.update(token.as_bytes());
            let digest = hasher.finalize();
            let bucket = u64::from_le_bytes(digest[..8].try_into().unwrap()) as usize % d;
            let sign = if digest[8] & 1 == 0 { 1.0 } else { -1.0 };
            features[(row, bucket)] += sign;
        }
        let norm = features.row(row).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            features.row_mut(row).mapv_inplace(|v| v / norm);
        }
    }
    features
}
