//! Graphs, labels, Laplacians, and the file formats that carry them.
//!
//! A [`Graph`] is a node-id list plus a dense symmetric nonnegative weight
//! matrix with a zero diagonal. Weights generalize 0/1 adjacency so the same
//! Laplacian machinery serves both plain adjacency matrices and blended
//! similarity matrices.
//!
//! File formats:
//!
//! * dense matrix — CSV or TSV numeric grid, optionally with a leading header
//!   row and/or leading id column (detected by a non-numeric first cell);
//! * edge list — lines `id_a id_b [weight]`, whitespace- or tab-separated,
//!   `#` comment lines skipped, missing weight meaning 1;
//! * label file — lines `node_id label` with label in `{1, 2, ?}`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use thiserror::Error;

use crate::rng::SeededRng;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("weight matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("weight matrix is not symmetric at ({i}, {j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("negative weight {value} at ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, value: f64 },
    #[error("non-finite weight at ({i}, {j})")]
    NonFiniteWeight { i: usize, j: usize },
    #[error("self-loop weight {value} at node {i}")]
    SelfLoop { i: usize, value: f64 },
    #[error("duplicate node id {id:?}")]
    DuplicateNodeId { id: String },
    #[error("node id count {ids} does not match matrix size {n}")]
    IdCountMismatch { ids: usize, n: usize },
    #[error("graph is empty")]
    Empty,
    #[error("all nodes are isolated; nothing left after pruning")]
    AllIsolated,
    #[error("node id sets differ between blended graphs")]
    NodeSetMismatch,
    #[error("blend weights are all zero")]
    AllZeroWeights,
    #[error("blend weight {value} is invalid (must be nonnegative and finite)")]
    InvalidBlendWeight { value: f64 },
    #[error("block {index} has size zero")]
    EmptyBlock { index: usize },
    #[error("probability {value} outside [0, 1]")]
    InvalidProbability { value: f64 },
}

/// Undirected weighted graph over string node ids.
///
/// Invariants enforced at construction: the matrix is square and exactly
/// symmetric, entries are finite and nonnegative, the diagonal is zero, and
/// node ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_ids: Vec<String>,
    weights: Array2<f64>,
}

impl Graph {
    pub fn new(node_ids: Vec<String>, weights: Array2<f64>) -> Result<Self, GraphError> {
        let (rows, cols) = weights.dim();
        if rows != cols {
            return Err(GraphError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(GraphError::Empty);
        }
        if node_ids.len() != rows {
            return Err(GraphError::IdCountMismatch { ids: node_ids.len(), n: rows });
        }
        let mut seen = HashMap::with_capacity(node_ids.len());
        for (i, id) in node_ids.iter().enumerate() {
            if seen.insert(id.as_str(), i).is_some() {
                return Err(GraphError::DuplicateNodeId { id: id.clone() });
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                let w = weights[[i, j]];
                if !w.is_finite() {
                    return Err(GraphError::NonFiniteWeight { i, j });
                }
                if w < 0.0 {
                    return Err(GraphError::NegativeWeight { i, j, value: w });
                }
                if i == j && w != 0.0 {
                    return Err(GraphError::SelfLoop { i, value: w });
                }
                if weights[[i, j]] != weights[[j, i]] {
                    return Err(GraphError::NotSymmetric { i, j, a: weights[[i, j]], b: weights[[j, i]] });
                }
            }
        }
        Ok(Self { node_ids, weights })
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// Weighted degree of node `i`: the row sum of the weight matrix.
    pub fn degree(&self, i: usize) -> f64 {
        self.weights.row(i).sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|x| x == id)
    }
}

/// Per-node class label; `Unknown` marks the nodes to be scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Class1,
    Class2,
    Unknown,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Class1 => write!(f, "1"),
            Label::Class2 => write!(f, "2"),
            Label::Unknown => write!(f, "?"),
        }
    }
}

/// Labels for every node of a graph, in node order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<Label>,
}

impl LabelSet {
    pub fn new(labels: Vec<Label>) -> Self {
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Count of observed class-1 nodes.
    pub fn n1(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Class1).count()
    }

    /// Count of observed class-2 nodes.
    pub fn n2(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Class2).count()
    }

    /// Indices with a known label, ascending.
    pub fn obs_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] != Label::Unknown).collect()
    }

    /// Indices with an unknown label, ascending.
    pub fn miss_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == Label::Unknown).collect()
    }

    pub fn class_indices(&self, class: Label) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// Keep labels only at `keep` indices; everything else becomes `Unknown`.
    pub fn masked_to(&self, keep: &[usize]) -> LabelSet {
        let mut labels = vec![Label::Unknown; self.len()];
        for &i in keep {
            labels[i] = self.labels[i];
        }
        LabelSet::new(labels)
    }
}

/// Graph Laplacian `L = D - W`: diagonal holds weighted degrees, off-diagonal
/// entries are negated weights. Row sums are zero and `L` is positive
/// semidefinite for nonnegative `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    matrix: Array2<f64>,
}

impl LaplacianMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn laplacian(graph: &Graph) -> LaplacianMatrix {
    let n = graph.n();
    let w = graph.weights();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let mut degree = 0.0;
        for j in 0..n {
            if i != j {
                degree += w[[i, j]];
                l[[i, j]] = -w[[i, j]];
            }
        }
        l[[i, i]] = degree;
    }
    LaplacianMatrix { matrix: l }
}

/// Remove all degree-zero nodes. Returns the pruned graph and the removed ids
/// in node order. Idempotent; errors when every node is isolated.
pub fn drop_isolated(graph: &Graph) -> Result<(Graph, Vec<String>), GraphError> {
    let keep: Vec<usize> = (0..graph.n()).filter(|&i| graph.degree(i) > 0.0).collect();
    if keep.is_empty() {
        return Err(GraphError::AllIsolated);
    }
    let removed: Vec<String> = (0..graph.n())
        .filter(|&i| graph.degree(i) == 0.0)
        .map(|i| graph.node_ids[i].clone())
        .collect();
    if removed.is_empty() {
        return Ok((graph.clone(), removed));
    }
    let ids: Vec<String> = keep.iter().map(|&i| graph.node_ids[i].clone()).collect();
    let m = keep.len();
    let mut w = Array2::<f64>::zeros((m, m));
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            w[[a, b]] = graph.weights[[i, j]];
        }
    }
    Ok((Graph::new(ids, w)?, removed))
}

/// Entrywise weighted sum of similarity matrices sharing one node ordering.
pub fn blend_similarity(parts: &[(&Graph, f64)]) -> Result<Graph, GraphError> {
    let (first, _) = parts.first().ok_or(GraphError::Empty)?;
    for (g, weight) in parts {
        if g.node_ids != first.node_ids {
            return Err(GraphError::NodeSetMismatch);
        }
        if !weight.is_finite() || *weight < 0.0 {
            return Err(GraphError::InvalidBlendWeight { value: *weight });
        }
    }
    if parts.iter().all(|(_, w)| *w == 0.0) {
        return Err(GraphError::AllZeroWeights);
    }
    let n = first.n();
    let mut w = Array2::<f64>::zeros((n, n));
    for (g, weight) in parts {
        w.scaled_add(*weight, g.weights());
    }
    Graph::new(first.node_ids.clone(), w)
}

/// Two-block stochastic block model with Bernoulli edges.
///
/// Node ids are `"0"` through `"n-1"`; the first block maps to class 1. One
/// uniform draw per unordered pair, taken in lexicographic order `(i, j)`
/// with `i < j`, decides each edge, so output is bit-identical for a fixed
/// seed. Isolated nodes are possible; callers decide whether to prune.
pub fn generate_sbm(
    sizes: (usize, usize),
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, LabelSet), GraphError> {
    if sizes.0 == 0 {
        return Err(GraphError::EmptyBlock { index: 0 });
    }
    if sizes.1 == 0 {
        return Err(GraphError::EmptyBlock { index: 1 });
    }
    for p in [p_in, p_out] {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidProbability { value: p });
        }
    }
    let n = sizes.0 + sizes.1;
    let block = |i: usize| usize::from(i >= sizes.0);
    let mut rng = SeededRng::new(seed);
    let mut w = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block(i) == block(j) { p_in } else { p_out };
            if rng.unit_f64() < p {
                w[[i, j]] = 1.0;
                w[[j, i]] = 1.0;
            }
        }
    }
    let ids = (0..n).map(|i| i.to_string()).collect();
    let labels = (0..n)
        .map(|i| if block(i) == 0 { Label::Class1 } else { Label::Class2 })
        .collect();
    Ok((Graph::new(ids, w)?, LabelSet::new(labels)))
}

// ---------------------------------------------------------------------------
// File ingestion
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("file is empty")]
    EmptyFile,
    #[error("line {line}: cannot parse cell in column {column}: {cell:?}")]
    BadCell { line: usize, column: usize, cell: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    BadRowLength { line: usize, expected: usize, found: usize },
    #[error("grid is not square: {rows} rows, {cols} columns")]
    NotSquareGrid { rows: usize, cols: usize },
    #[error("negative entry {value} at row {row}, column {column}")]
    NegativeEntry { row: usize, column: usize, value: f64 },
    #[error("header ids and id-column ids disagree at position {index}: {header:?} vs {column:?}")]
    HeaderIdMismatch { index: usize, header: String, column: String },
    #[error("line {line}: malformed edge {text:?} (expected \"id_a id_b [weight]\")")]
    MalformedEdge { line: usize, text: String },
    #[error("line {line}: self-loop on {id:?}")]
    SelfLoopLine { line: usize, id: String },
    #[error("line {line}: negative weight {value}")]
    NegativeEdgeWeight { line: usize, value: f64 },
    #[error("n_hint {hint} requires numeric node ids, but {id:?} is not")]
    HintNeedsNumericIds { hint: usize, id: String },
    #[error("line {line}: malformed label line {text:?} (expected \"node_id label\")")]
    MalformedLabel { line: usize, text: String },
    #[error("line {line}: unknown label {token:?} (expected 1, 2 or ?)")]
    BadLabel { line: usize, token: String },
    #[error("line {line}: node id {id:?} is not in the graph")]
    UnknownNode { line: usize, id: String },
    #[error("line {line}: contradictory label for node {id:?}")]
    ContradictoryLabel { line: usize, id: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenseFormat {
    Csv,
    Tsv,
}

impl DenseFormat {
    fn separator(self) -> char {
        match self {
            DenseFormat::Csv => ',',
            DenseFormat::Tsv => '\t',
        }
    }
}

/// Result of a dense-matrix load: the symmetrized graph plus a flag recording
/// whether symmetrization moved any entry by more than 1e-9.
#[derive(Debug)]
pub struct DenseLoad {
    pub graph: Graph,
    pub asymmetry_adjusted: bool,
    pub diagonal_zeroed: bool,
}

pub fn load_dense_matrix(path: &Path, fmt: DenseFormat) -> Result<DenseLoad, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dense_matrix(&text, fmt)
}

pub fn parse_dense_matrix(text: &str, fmt: DenseFormat) -> Result<DenseLoad, LoadError> {
    let sep = fmt.separator();
    let rows: Vec<(usize, Vec<String>)> = text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(idx, line)| (idx + 1, line.split(sep).map(|c| c.trim().to_string()).collect()))
        .collect();
    if rows.is_empty() {
        return Err(LoadError::EmptyFile);
    }

    let numeric = |cell: &str| cell.parse::<f64>().is_ok();
    let has_header = !numeric(&rows[0].1[0]);
    let data_rows = if has_header { &rows[1..] } else { &rows[..] };
    if data_rows.is_empty() {
        return Err(LoadError::EmptyFile);
    }
    let has_id_column = has_header && !numeric(&data_rows[0].1[0]);
    let n = data_rows.len();

    let mut ids: Vec<String> = Vec::with_capacity(n);
    if has_id_column {
        for (_, cells) in data_rows {
            ids.push(cells[0].clone());
        }
        // Cross-check against the header ids when both are present. The header
        // may or may not carry a corner cell before the ids.
        let (line, header) = &rows[0];
        let header_ids: Option<&[String]> = if header.len() == n + 1 {
            Some(&header[1..])
        } else if header.len() == n {
            Some(&header[..])
        } else {
            return Err(LoadError::BadRowLength { line: *line, expected: n + 1, found: header.len() });
        };
        if let Some(hids) = header_ids {
            for (k, (h, c)) in hids.iter().zip(ids.iter()).enumerate() {
                if !h.is_empty() && h != c {
                    return Err(LoadError::HeaderIdMismatch {
                        index: k,
                        header: h.clone(),
                        column: c.clone(),
                    });
                }
            }
        }
    } else if has_header {
        let (line, header) = &rows[0];
        if header.len() != n {
            return Err(LoadError::BadRowLength { line: *line, expected: n, found: header.len() });
        }
        ids = header.clone();
    } else {
        ids = (0..n).map(|i| i.to_string()).collect();
    }

    let skip = usize::from(has_id_column);
    let mut m = Array2::<f64>::zeros((n, n));
    for (r, (line, cells)) in data_rows.iter().enumerate() {
        let expected = n + skip;
        if cells.len() != expected {
            if cells.len() - skip != n && r == 0 {
                // a non-square grid gives a clearer error than a row-length one
                return Err(LoadError::NotSquareGrid { rows: n, cols: cells.len() - skip });
            }
            return Err(LoadError::BadRowLength { line: *line, expected, found: cells.len() });
        }
        for (c, cell) in cells.iter().skip(skip).enumerate() {
            let value: f64 = cell.parse().map_err(|_| LoadError::BadCell {
                line: *line,
                column: c + skip + 1,
                cell: cell.clone(),
            })?;
            if value < 0.0 {
                return Err(LoadError::NegativeEntry { row: r, column: c, value });
            }
            m[[r, c]] = value;
        }
    }

    let mut asymmetry_adjusted = false;
    let mut diagonal_zeroed = false;
    let mut w = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        if m[[i, i]] != 0.0 {
            diagonal_zeroed = true;
        }
        for j in (i + 1)..n {
            let v = (m[[i, j]] + m[[j, i]]) / 2.0;
            if (m[[i, j]] - v).abs() > 1e-9 {
                asymmetry_adjusted = true;
            }
            w[[i, j]] = v;
            w[[j, i]] = v;
        }
    }
    Ok(DenseLoad { graph: Graph::new(ids, w)?, asymmetry_adjusted, diagonal_zeroed })
}

/// Load an edge list. Later duplicates of an edge overwrite earlier ones.
///
/// Node order is numeric when every id parses as an unsigned integer,
/// lexicographic otherwise. When `n_hint` exceeds the number of mentioned ids,
/// the missing decimal ids in `0..n_hint` are added as isolated nodes (this
/// requires numeric ids and makes `generate` output round-trip exactly).
pub fn load_edge_list(path: &Path, n_hint: Option<usize>) -> Result<Graph, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_edge_list(&text, n_hint)
}

pub fn parse_edge_list(text: &str, n_hint: Option<usize>) -> Result<Graph, LoadError> {
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    let mut mentioned: Vec<String> = Vec::new();
    let mut seen = HashMap::new();
    let mut note = |id: &str, mentioned: &mut Vec<String>| {
        if !seen.contains_key(id) {
            seen.insert(id.to_string(), ());
            mentioned.push(id.to_string());
        }
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(LoadError::MalformedEdge { line, text: trimmed.to_string() });
        }
        let (a, b) = (tokens[0], tokens[1]);
        if a == b {
            return Err(LoadError::SelfLoopLine { line, id: a.to_string() });
        }
        let weight: f64 = match tokens.get(2) {
            Some(tok) => tok.parse().map_err(|_| LoadError::MalformedEdge {
                line,
                text: trimmed.to_string(),
            })?,
            None => 1.0,
        };
        if !weight.is_finite() {
            return Err(LoadError::MalformedEdge { line, text: trimmed.to_string() });
        }
        if weight < 0.0 {
            return Err(LoadError::NegativeEdgeWeight { line, value: weight });
        }
        note(a, &mut mentioned);
        note(b, &mut mentioned);
        edges.push((a.to_string(), b.to_string(), weight));
    }

    let mut ids = mentioned;
    if let Some(hint) = n_hint {
        if hint > ids.len() {
            if let Some(bad) = ids.iter().find(|id| id.parse::<u64>().is_err()) {
                return Err(LoadError::HintNeedsNumericIds { hint, id: bad.clone() });
            }
            for k in 0..hint {
                let id = k.to_string();
                if !seen.contains_key(id.as_str()) {
                    seen.insert(id.clone(), ());
                    ids.push(id);
                }
            }
        }
    }
    if ids.is_empty() {
        return Err(LoadError::EmptyFile);
    }
    let all_numeric = ids.iter().all(|id| id.parse::<u64>().is_ok());
    if all_numeric {
        ids.sort_by(|a, b| {
            let (na, nb) = (a.parse::<u64>().unwrap(), b.parse::<u64>().unwrap());
            na.cmp(&nb).then_with(|| a.cmp(b))
        });
    } else {
        ids.sort();
    }

    let index: HashMap<&str, usize> =
        ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let n = ids.len();
    let mut w = Array2::<f64>::zeros((n, n));
    for (a, b, weight) in &edges {
        let (i, j) = (index[a.as_str()], index[b.as_str()]);
        w[[i, j]] = *weight;
        w[[j, i]] = *weight;
    }
    Ok(Graph::new(ids, w)?)
}

/// Load a label file against a graph's node ids. Nodes absent from the file
/// are `Unknown`; duplicate ids are rejected.
pub fn load_labels(path: &Path, graph: &Graph) -> Result<LabelSet, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_labels(&text, graph)
}

pub fn parse_labels(text: &str, graph: &Graph) -> Result<LabelSet, LoadError> {
    let index: HashMap<&str, usize> =
        graph.node_ids().iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut labels = vec![Label::Unknown; graph.n()];
    let mut assigned = vec![false; graph.n()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(LoadError::MalformedLabel { line, text: trimmed.to_string() });
        }
        let label = match tokens[1] {
            "1" => Label::Class1,
            "2" => Label::Class2,
            "?" => Label::Unknown,
            other => return Err(LoadError::BadLabel { line, token: other.to_string() }),
        };
        let &i = index
            .get(tokens[0])
            .ok_or_else(|| LoadError::UnknownNode { line, id: tokens[0].to_string() })?;
        if assigned[i] {
            return Err(LoadError::ContradictoryLabel { line, id: tokens[0].to_string() });
        }
        assigned[i] = true;
        labels[i] = label;
    }
    Ok(LabelSet::new(labels))
}

/// Write the `id_a id_b weight` edge list for a graph (upper triangle only).
pub fn write_edge_list(path: &Path, graph: &Graph) -> Result<(), LoadError> {
    let mut out = String::new();
    for i in 0..graph.n() {
        for j in (i + 1)..graph.n() {
            let w = graph.weights()[[i, j]];
            if w != 0.0 {
                if w == 1.0 {
                    out.push_str(&format!("{} {}\n", graph.node_ids()[i], graph.node_ids()[j]));
                } else {
                    out.push_str(&format!(
                        "{} {} {:.16e}\n",
                        graph.node_ids()[i],
                        graph.node_ids()[j],
                        w
                    ));
                }
            }
        }
    }
    write_text(path, &out)
}

/// Write one `node_id label` line per node.
pub fn write_labels(path: &Path, ids: &[String], labels: &LabelSet) -> Result<(), LoadError> {
    let mut out = String::new();
    for (id, label) in ids.iter().zip(labels.labels()) {
        out.push_str(&format!("{id} {label}\n"));
    }
    write_text(path, &out)
}

fn write_text(path: &Path, text: &str) -> Result<(), LoadError> {
    let mut file = fs::File::create(path).map_err(|source| LoadError::Write {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(text.as_bytes()).map_err(|source| LoadError::Write {
        path: path.display().to_string(),
        source,
    })
}
