//! Edge-list and model file formats.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use graphlet::{CliqueBasis, Model, Rates, WeightedNetwork};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Parsed `u <TAB> v <TAB> w` lines before node indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList<W> {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, W)>,
}

/// Node labels in index order: numeric order when every label is a nonnegative
/// integer, first appearance otherwise.
fn index_labels(raw: &[(String, String)]) -> (Vec<String>, HashMap<String, usize>) {
    let mut labels: Vec<String> = Vec::new();
    let mut seen = HashMap::new();
    for (u, v) in raw {
        for l in [u, v] {
            if !seen.contains_key(l) {
                seen.insert(l.clone(), labels.len());
                labels.push(l.clone());
            }
        }
    }
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<u64>().unwrap());
        seen = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    }
    (labels, seen)
}

fn parse_lines<W>(
    text: &str,
    parse_weight: impl Fn(&str) -> Option<W>,
    expected: &str,
) -> Result<EdgeList<W>, CliError> {
    let mut raw = Vec::new();
    let mut weights = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CliError::Data(format!("line {line_no}: expected 3 tab-separated fields, found {}", fields.len())));
        }
        let (u, v) = (fields[0], fields[1]);
        if u.is_empty() || v.is_empty() {
            return Err(CliError::Data(format!("line {line_no}: empty node label")));
        }
        if u == v {
            return Err(CliError::Data(format!("line {line_no}: self-loop on node '{u}'")));
        }
        let w = parse_weight(fields[2])
            .ok_or_else(|| CliError::Data(format!("line {line_no}: weight '{}' is not {expected}", fields[2])))?;
        raw.push((u.to_string(), v.to_string()));
        weights.push(w);
    }
    let (labels, index) = index_labels(&raw);
    let edges = raw.iter().zip(weights).map(|((u, v), w)| (index[u], index[v], w)).collect();
    Ok(EdgeList { labels, edges })
}

/// Integer edge list; duplicates and reversed pairs are summed.
pub fn parse_network(text: &str) -> Result<WeightedNetwork, CliError> {
    let list = parse_lines(text, |s| s.parse::<u64>().ok().filter(|&w| w > 0), "a positive integer")?;
    WeightedNetwork::with_labels(list.labels, list.edges).map_err(|e| CliError::Data(e.to_string()))
}

/// Real-valued edge list, used for noise-free rate matrices.
pub fn parse_rates(text: &str) -> Result<(Vec<String>, Rates), CliError> {
    let list = parse_lines(
        text,
        |s| s.parse::<f64>().ok().filter(|w| w.is_finite() && *w > 0.0),
        "a positive number",
    )?;
    let rates = Rates::from_entries(list.labels.len(), list.edges).map_err(|e| CliError::Data(e.to_string()))?;
    Ok((list.labels, rates))
}

pub fn read_network(path: &Path) -> Result<WeightedNetwork, CliError> {
    parse_network(&read(path)?)
}

pub fn read_rates(path: &Path) -> Result<(Vec<String>, Rates), CliError> {
    parse_rates(&read(path)?)
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn format_network(y: &WeightedNetwork, header: &str) -> String {
    let mut out = format!("# {header}\n");
    for &(u, v, w) in y.edges() {
        let _ = writeln!(out, "{}\t{}\t{w}", y.labels()[u], y.labels()[v]);
    }
    out
}

pub fn format_rates(labels: &[String], rates: &Rates, header: &str) -> String {
    let mut out = format!("# {header}\n");
    for (u, v, w) in rates.positive_entries() {
        let _ = writeln!(out, "{}\t{}\t{w}", labels[u], labels[v]);
    }
    out
}

/// JSON model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub nodes: Vec<String>,
    pub cliques: Vec<Vec<usize>>,
    pub mu: Vec<f64>,
    #[serde(default)]
    pub meta: serde_json::Value,
}

impl ModelFile {
    pub fn new(nodes: Vec<String>, model: &Model, meta: serde_json::Value) -> Self {
        Self { nodes, cliques: model.basis().cliques().to_vec(), mu: model.mu().to_vec(), meta }
    }

    pub fn to_model(&self) -> Result<Model, CliError> {
        let invalid = |e: graphlet::GraphletError| CliError::Data(format!("invalid model: {e}"));
        for c in &self.cliques {
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Data(format!("invalid model: clique {c:?} is not sorted ascending")));
            }
        }
        let basis = CliqueBasis::new(self.cliques.clone()).map_err(invalid)?;
        Model::new(self.nodes.len(), basis, self.mu.clone()).map_err(invalid)
    }

    /// The same model with node indices expressed in `universe`.
    pub fn reindexed(&self, universe: &[String]) -> Result<Model, CliError> {
        let position: HashMap<&str, usize> = universe.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let map = self
            .nodes
            .iter()
            .map(|l| {
                position
                    .get(l.as_str())
                    .copied()
                    .ok_or_else(|| CliError::Data(format!("node '{l}' is not in the reference node set")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.to_model()?;
        let cliques = self.cliques.iter().map(|c| c.iter().map(|&v| map[v]).collect()).collect();
        let basis = CliqueBasis::new(cliques).map_err(|e| CliError::Data(e.to_string()))?;
        Model::new(universe.len(), basis, self.mu.clone()).map_err(|e| CliError::Data(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        write(path, &text)
    }
}
