//! Edge-list CSV in and out: `source,target,weight`.

use std::fs;
use std::path::Path;

use trendlens_core::graphx::UserGraph;
use trendlens_core::mining::{GraphEdge, SemanticGraph};

use crate::error::Error;
use crate::io::csvx;

pub const HEADER: &str = "source,target,weight";

/// Serializes any (source, target, weight) triples.
pub fn render<'a, I>(edges: I) -> String
where
    I: IntoIterator<Item = (&'a str, &'a str, f64)>,
{
    let mut out = String::from(HEADER);
    out.push('\n');
    for (source, target, weight) in edges {
        out.push_str(&format!(
            "{},{},{}\n",
            csvx::escape(source),
            csvx::escape(target),
            weight
        ));
    }
    out
}

pub fn write_semantic_graph(path: &Path, graph: &SemanticGraph) -> Result<(), Error> {
    let body = render(
        graph
            .edges
            .iter()
            .map(|e| (e.source.as_str(), e.target.as_str(), e.weight)),
    );
    fs::write(path, body)?;
    Ok(())
}

pub fn write_user_graph(path: &Path, graph: &UserGraph) -> Result<(), Error> {
    let body = render(
        graph
            .directed_edges()
            .map(|(s, d, w)| (graph.vertex_name(s), graph.vertex_name(d), w as f64)),
    );
    fs::write(path, body)?;
    Ok(())
}

/// Parses an edge-list CSV back into a semantic graph.
pub fn read_semantic_graph(path: &Path) -> Result<SemanticGraph, Error> {
    let content = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read edge list {}: {e}", path.display())))?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == HEADER => {}
        _ => {
            return Err(Error::input(
                "edge list must start with 'source,target,weight'",
            ))
        }
    }
    let mut edges = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields = csvx::split(line);
        if fields.len() != 3 {
            return Err(Error::input(format!(
                "line {}: expected 3 fields, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let weight: f64 = fields[2]
            .parse()
            .map_err(|e| Error::input(format!("line {}: bad weight: {e}", idx + 1)))?;
        edges.push(GraphEdge {
            source: fields[0].clone(),
            target: fields[1].clone(),
            weight,
        });
    }
    Ok(SemanticGraph { edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use trendlens_core::mining::{itemset_graph, FrequentItemset};

    #[test]
    fn semantic_graph_round_trip_is_isomorphic() {
        let itemsets = vec![
            FrequentItemset {
                items: vec!["bird".into(), "virus".into()],
                support: 0.25,
            },
            FrequentItemset {
                items: vec!["lab".into()],
                support: 0.5,
            },
        ];
        let graph = itemset_graph(&itemsets);
        let file = tempfile::NamedTempFile::new().unwrap();
        write_semantic_graph(file.path(), &graph).unwrap();
        let reread = read_semantic_graph(file.path()).unwrap();
        assert_eq!(graph, reread);
        assert_eq!(graph.vertices(), reread.vertices());
    }

    #[test]
    fn user_graph_export_lists_directed_edges() {
        let graph = UserGraph::from_edges([("fan", "star", 3), ("star", "fan", 1)]);
        let file = tempfile::NamedTempFile::new().unwrap();
        write_user_graph(file.path(), &graph).unwrap();
        let content = fs::read_to_string(file.path()).unwrap();
        assert!(content.starts_with("source,target,weight\n"));
        assert!(content.contains("fan,star,3"));
        assert!(content.contains("star,fan,1"));
    }
}
