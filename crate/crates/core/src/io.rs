//! Plain-text edge lists and label files.
//!
//! Edge list: one undirected edge per line, `u v` or `u v w`, whitespace
//! separated; blank lines and lines starting with `#` are skipped. Label
//! file: one integer per line in node-id order.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::graph::{EdgeRecord, Graph};

/// A parsed edge list.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    /// Original id of each node when the input ids were not `0..n`
    /// contiguous; `None` means ids were used as is.
    pub original_ids: Option<Vec<u64>>,
}

impl EdgeList {
    pub fn original_id(&self, node: usize) -> u64 {
        match &self.original_ids {
            Some(ids) => ids[node],
            None => node as u64,
        }
    }
}

fn line_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        message: message.into(),
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList, ParseError> {
    let mut raw: Vec<(u64, u64, Option<f64>)> = Vec::new();
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(line_err(
                lineno,
                format!("expected `u v` or `u v w`, found {} fields", fields.len()),
            ));
        }
        let parse_id = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| line_err(lineno, format!("invalid node id `{s}`")))
        };
        let u = parse_id(fields[0])?;
        let v = parse_id(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => {
                let w: f64 = s
                    .parse()
                    .map_err(|_| line_err(lineno, format!("invalid weight `{s}`")))?;
                if !w.is_finite() || w <= 0.0 {
                    return Err(line_err(lineno, format!("weight {w} must be positive and finite")));
                }
                Some(w)
            }
            None => None,
        };
        if u == v {
            return Err(line_err(lineno, format!("self-loop on node {u}")));
        }
        let key = (u.min(v), u.max(v));
        if let Some(first) = seen.insert(key, lineno) {
            return Err(line_err(
                lineno,
                format!("duplicate edge ({}, {}), first listed on line {first}", key.0, key.1),
            ));
        }
        raw.push((u, v, w));
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let contiguous = ids.last().is_none_or(|&max| max + 1 == ids.len() as u64);
    let (records, original_ids) = if contiguous {
        let records: Vec<EdgeRecord> = raw
            .iter()
            .map(|&(u, v, w)| EdgeRecord { u: u as usize, v: v as usize, w })
            .collect();
        (records, None)
    } else {
        let index: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let records = raw
            .iter()
            .map(|&(u, v, w)| EdgeRecord { u: index[&u], v: index[&v], w })
            .collect();
        (records, Some(ids.clone()))
    };
    let graph = Graph::build(records, Some(ids.len()))?;
    Ok(EdgeList { graph, original_ids })
}

/// Writes `u v` lines, or `u v w` for weighted graphs.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for e in g.edges() {
        if g.is_weighted() {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
        } else {
            let _ = writeln!(out, "{} {}", e.u, e.v);
        }
    }
    out
}

pub fn parse_labels(text: &str) -> Result<Vec<usize>, ParseError> {
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let label = trimmed
            .parse::<usize>()
            .map_err(|_| line_err(idx + 1, format!("invalid label `{trimmed}`")))?;
        labels.push(label);
    }
    Ok(labels)
}

pub fn format_labels(labels: &[usize]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        let _ = writeln!(out, "{l}");
    }
    out
}
