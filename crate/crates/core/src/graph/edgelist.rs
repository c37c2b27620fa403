//! Whitespace-separated edge-list files.
//!
//! Reading remaps arbitrary non-negative ids to `0..n` by first appearance.
//! Writing emits a `# nodes <n>` comment followed by one canonical `u v` line
//! per edge, so [`read_edgelist_dense`] can restore isolated nodes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::Graph;
use crate::error::{Result, ShsError};

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `original_ids[new_id]` is the id used in the file.
    pub original_ids: Vec<u64>,
}

fn parse_lines(path: &Path) -> Result<(Vec<(u64, u64)>, Option<usize>)> {
    let text = fs::read_to_string(path).map_err(|e| ShsError::io(path, e))?;
    let mut pairs = Vec::new();
    let mut declared = None;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if let (Some("nodes"), Some(count), None) = (words.next(), words.next(), words.next()) {
                declared = count.parse().ok();
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let parse_err = |message: String| ShsError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(format!("expected 2 node ids, found {} tokens", tokens.len())));
        }
        let u = tokens[0]
            .parse::<u64>()
            .map_err(|e| parse_err(format!("bad node id {:?}: {e}", tokens[0])))?;
        let v = tokens[1]
            .parse::<u64>()
            .map_err(|e| parse_err(format!("bad node id {:?}: {e}", tokens[1])))?;
        pairs.push((u, v));
    }
    Ok((pairs, declared))
}

pub fn read_edgelist(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let (pairs, _) = parse_lines(path.as_ref())?;
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut intern = |id: u64| {
        *index.entry(id).or_insert_with(|| {
            original_ids.push(id);
            original_ids.len() - 1
        })
    };
    let edges: Vec<(usize, usize)> = pairs.into_iter().map(|(u, v)| (intern(u), intern(v))).collect();
    Ok(LoadedGraph {
        graph: Graph::from_edges_unchecked(original_ids.len(), edges),
        original_ids,
    })
}

/// Reads a file whose ids are already dense (`0..n`), keeping them as-is.
///
/// The node count is the larger of the `# nodes` header and `max id + 1`.
pub fn read_edgelist_dense(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let (pairs, declared) = parse_lines(path)?;
    let max_id = pairs.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(0).max(max_id);
    let edges: Vec<(usize, usize)> = pairs.into_iter().map(|(u, v)| (u as usize, v as usize)).collect();
    Graph::from_edges(n, &edges)
}

pub fn edgelist_text(g: &Graph) -> String {
    let mut out = String::with_capacity(g.edge_count() * 12 + 16);
    let _ = writeln!(out, "# nodes {}", g.node_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_edgelist(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, edgelist_text(g)).map_err(|e| ShsError::io(path, e))
}

/// Writes `original_id new_id` lines to `<edgelist path>.idmap`.
pub fn write_idmap(original_ids: &[u64], edgelist_path: impl AsRef<Path>) -> Result<PathBuf> {
    let mut path = edgelist_path.as_ref().as_os_str().to_owned();
    path.push(".idmap");
    let path = PathBuf::from(path);
    let mut out = String::new();
    for (new, old) in original_ids.iter().enumerate() {
        let _ = writeln!(out, "{old} {new}");
    }
    fs::write(&path, out).map_err(|e| ShsError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn reads_path() {
        let dir = tempfile::tempdir().unwrap();
        let loaded = read_edgelist(write(&dir, "p.txt", "0 1\n1 2\n")).unwrap();
        assert_eq!(loaded.graph.node_count(), 3);
        assert_eq!(loaded.graph.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn comments_and_sparse_ids() {
        let dir = tempfile::tempdir().unwrap();
        let loaded = read_edgelist(write(&dir, "c.txt", "# header\n100 7\n7 42\n")).unwrap();
        assert_eq!(loaded.original_ids, vec![100, 7, 42]);
        assert_eq!(loaded.graph.edge_count(), 2);
        let idmap = write_idmap(&loaded.original_ids, dir.path().join("c.txt")).unwrap();
        assert_eq!(fs::read_to_string(idmap).unwrap(), "100 0\n7 1\n42 2\n");
    }

    #[test]
    fn three_tokens_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_edgelist(write(&dir, "bad.txt", "0 1 2\n")).unwrap_err();
        match err {
            ShsError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn write_format_is_exact() {
        let g = Graph::from_edges(4, &[(2, 1), (0, 1)]).unwrap();
        assert_eq!(edgelist_text(&g), "# nodes 4\n0 1\n1 2\n");
    }

    #[test]
    fn dense_read_keeps_isolates() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::from_edges(5, &[(3, 1), (0, 1)]).unwrap();
        let path = dir.path().join("g.edges");
        write_edgelist(&g, &path).unwrap();
        assert_eq!(read_edgelist_dense(&path).unwrap(), g);
    }
}
