//! graph6 ingestion (short form only, at most 62 vertices).
//!
//! Decoded graphs get an unprotected loop on every vertex so the standard
//! "stay put" move becomes an ordinary loop traversal.

use thiserror::Error;

use super::{Protection, PursuitGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("malformed graph6: {0}")]
    Malformed(String),
    #[error("unsupported graph6 size: only graphs with at most 62 vertices are accepted")]
    UnsupportedSize,
}

/// Decodes one graph6 record. Trailing whitespace is ignored.
pub fn parse_graph6(bytes: &[u8]) -> Result<PursuitGraph, Graph6Error> {
    let end = bytes
        .iter()
        .rposition(|b| !b.is_ascii_whitespace())
        .map_or(0, |i| i + 1);
    let bytes = &bytes[..end];
    let (&first, data) = bytes
        .split_first()
        .ok_or_else(|| Graph6Error::Malformed("empty input".into()))?;
    if first == b'>' {
        return Err(Graph6Error::Malformed("header variant is not supported".into()));
    }
    if first == 126 {
        return Err(Graph6Error::UnsupportedSize);
    }
    if !(63..=125).contains(&first) {
        return Err(Graph6Error::Malformed(format!("invalid size byte {first}")));
    }
    let n = (first - 63) as usize;
    let bit_count = n * n.saturating_sub(1) / 2;
    let expected = bit_count.div_ceil(6);
    if data.len() != expected {
        return Err(Graph6Error::Malformed(format!(
            "expected {expected} data bytes for {n} vertices, found {}",
            data.len()
        )));
    }
    if let Some(&bad) = data.iter().find(|b| !(63..=126).contains(*b)) {
        return Err(Graph6Error::Malformed(format!("invalid data byte {bad}")));
    }

    let bit = |k: usize| (data[k / 6] - 63) >> (5 - k % 6) & 1 == 1;

    let mut graph = PursuitGraph::undirected(n);
    for v in 0..n {
        graph
            .add_edge(v, v, Protection::Unprotected)
            .expect("fresh loop");
    }
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                graph
                    .add_edge(i, j, Protection::Unprotected)
                    .expect("fresh edge");
            }
            k += 1;
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Test-only encoder written straight from the format description.
    fn encode(n: usize, edges: &[(usize, usize)]) -> Vec<u8> {
        let mut bits = Vec::new();
        for j in 1..n {
            for i in 0..j {
                bits.push(edges.contains(&(i, j)) || edges.contains(&(j, i)));
            }
        }
        while bits.len() % 6 != 0 {
            bits.push(false);
        }
        let mut out = vec![n as u8 + 63];
        for chunk in bits.chunks(6) {
            let v = chunk.iter().fold(0u8, |acc, &b| acc << 1 | b as u8);
            out.push(v + 63);
        }
        out
    }

    #[test]
    fn complete_graph_on_two_vertices() {
        let code = encode(2, &[(0, 1)]);
        assert_eq!(code, b"A_");
        let g = parse_graph6(&code).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.arc_count(), 4);
        assert_eq!(g.arc(0, 1), Some(Protection::Unprotected));
        assert_eq!(g.loop_at(0), Some(Protection::Unprotected));
        assert_eq!(g.loop_at(1), Some(Protection::Unprotected));
    }

    #[test]
    fn single_vertex() {
        let g = parse_graph6(b"@\n").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.arc_count(), 1);
        assert_eq!(g.loop_at(0), Some(Protection::Unprotected));
    }

    #[test]
    fn known_encoding() {
        // Path a-c, a-e, b-d, d-e on five vertices.
        let g = parse_graph6(b"DQc").unwrap();
        let mut edges: Vec<_> = g
            .arcs()
            .filter(|a| a.tail < a.head)
            .map(|a| (a.tail, a.head))
            .collect();
        edges.sort();
        assert_eq!(edges, vec![(0, 2), (0, 4), (1, 3), (3, 4)]);
    }

    #[test]
    fn truncated_and_oversized() {
        assert!(matches!(parse_graph6(b"D"), Err(Graph6Error::Malformed(_))));
        assert!(matches!(parse_graph6(b""), Err(Graph6Error::Malformed(_))));
        assert!(matches!(
            parse_graph6(b"~?@?"),
            Err(Graph6Error::UnsupportedSize)
        ));
    }

    #[test]
    fn encoder_round_trip_over_all_four_vertex_graphs() {
        let pairs: Vec<(usize, usize)> = (0..4)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = parse_graph6(&encode(4, &edges)).unwrap();
            assert_eq!(g.arc_count(), 4 + 2 * edges.len());
            for &(i, j) in &edges {
                assert!(g.has_arc(i, j) && g.has_arc(j, i));
            }
        }
    }
}
