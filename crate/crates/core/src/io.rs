//! File formats: dataset/partition/linkage CSV, Newick export, dataset
//! sidecar JSON and grid-result CSV.
//!
//! The CSV dialect is deliberately plain: comma-separated, no quoting,
//! decimal-point reals, optional single header row. All parsers take the raw
//! text so they can be driven directly by the fuzz targets.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::{MixtureConfig, NoiseSpec};
use crate::dendrogram::{Dendrogram, Merge};
use crate::error::{Error, Result};
use crate::grid::GridResult;
use crate::matrix::DataMatrix;
use crate::partition::Partition;

/// How to locate the ground-truth column of a dataset CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

/// A parsed dataset: the numeric table plus the split-off ground truth, when
/// a label column was designated.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub matrix: DataMatrix,
    pub truth: Option<Partition>,
    pub truth_labels: Option<Vec<String>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let value: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("expected a real number, got {field:?}")))?;
    if !value.is_finite() {
        return Err(parse_err(line, format!("non-finite value {field:?}")));
    }
    Ok(value)
}

fn parse_usize(field: &str, line: usize) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, got {field:?}")))
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

/// Non-blank lines with their 1-based line numbers.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Parses a dataset CSV. The first row is treated as a header when any of
/// its cells fails to parse as a number (or always, when the label column is
/// designated by name). A designated label column is split off as ground
/// truth; its values may be arbitrary strings.
pub fn parse_dataset_csv(text: &str, label: Option<&LabelColumn>) -> Result<LoadedDataset> {
    let mut lines = numbered_lines(text).peekable();
    let (first_no, first) = lines.next().ok_or(Error::EmptyInput("dataset csv"))?;
    let first_fields = split_fields(first);
    let width = first_fields.len();

    let named_label = matches!(label, Some(LabelColumn::Name(_)));
    let first_is_header =
        named_label || first_fields.iter().any(|f| f.parse::<f64>().is_err());

    let header: Option<Vec<String>> = if first_is_header {
        Some(first_fields.iter().map(|f| f.to_string()).collect())
    } else {
        None
    };

    let label_index = match label {
        None => None,
        Some(LabelColumn::Index(i)) => {
            if *i >= width {
                return Err(Error::InvalidParameter(format!(
                    "label column {i} out of range for {width} columns"
                )));
            }
            Some(*i)
        }
        Some(LabelColumn::Name(name)) => {
            let header = header.as_ref().expect("named label implies header");
            let idx = header.iter().position(|h| h == name).ok_or_else(|| {
                Error::InvalidParameter(format!("label column {name:?} not found in header"))
            })?;
            Some(idx)
        }
    };

    if width == 1 && label_index.is_some() {
        return Err(Error::InvalidParameter(
            "the label column is the only column; no features remain".into(),
        ));
    }

    let feature_names: Option<Vec<String>> = header.as_ref().map(|h| {
        h.iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != label_index)
            .map(|(_, name)| name.clone())
            .collect()
    });

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut push_row = |line_no: usize, fields: &[&str]| -> Result<()> {
        if fields.len() != width {
            return Err(parse_err(
                line_no,
                format!("expected {} columns, got {}", width, fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(width - label_index.is_some() as usize);
        for (i, field) in fields.iter().enumerate() {
            if Some(i) == label_index {
                labels.push(field.to_string());
            } else {
                row.push(parse_f64(field, line_no)?);
            }
        }
        rows.push(row);
        Ok(())
    };

    if !first_is_header {
        push_row(first_no, &first_fields)?;
    }
    for (line_no, line) in lines {
        push_row(line_no, &split_fields(line))?;
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("dataset csv has no data rows"));
    }

    let mut matrix = DataMatrix::from_rows(rows)?;
    if let Some(names) = feature_names {
        matrix = matrix.with_feature_names(names)?;
    }
    let truth = if label_index.is_some() {
        Some(Partition::from_labels(&labels)?)
    } else {
        None
    };
    Ok(LoadedDataset {
        matrix,
        truth,
        truth_labels: label_index.is_some().then_some(labels),
    })
}

pub fn read_dataset_csv(path: impl AsRef<Path>, label: Option<&LabelColumn>) -> Result<LoadedDataset> {
    parse_dataset_csv(&fs::read_to_string(path)?, label)
}

pub fn format_dataset_csv(m: &DataMatrix) -> String {
    let mut out = String::new();
    if let Some(names) = m.feature_names() {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for row in m.rows() {
        let mut first = true;
        for &v in row {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{v}");
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset_csv(path: impl AsRef<Path>, m: &DataMatrix) -> Result<()> {
    fs::write(path, format_dataset_csv(m))?;
    Ok(())
}

/// Parses an `entity_id,cluster` file. The header row is optional; entity
/// ids must cover 0..N exactly once.
pub fn parse_partition_csv(text: &str) -> Result<Partition> {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new(); // (entity, cluster, line)
    for (line_no, line) in numbered_lines(text) {
        let fields = split_fields(line);
        if fields.len() != 2 {
            return Err(parse_err(
                line_no,
                format!("expected entity_id,cluster, got {} fields", fields.len()),
            ));
        }
        if fields[0].eq_ignore_ascii_case("entity_id") {
            continue;
        }
        let entity = parse_usize(fields[0], line_no)?;
        let cluster = parse_usize(fields[1], line_no)?;
        pairs.push((entity, cluster, line_no));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput("partition csv"));
    }
    let n = pairs.len();
    let mut labels = vec![usize::MAX; n];
    for (entity, cluster, line_no) in pairs {
        if entity >= n {
            return Err(parse_err(
                line_no,
                format!("entity id {entity} out of range for {n} rows"),
            ));
        }
        if labels[entity] != usize::MAX {
            return Err(parse_err(line_no, format!("duplicate entity id {entity}")));
        }
        labels[entity] = cluster;
    }
    // Already-dense ids are kept verbatim so cluster numbering survives a
    // round trip; anything else is re-encoded densely.
    let distinct = labels.iter().collect::<std::collections::HashSet<_>>().len();
    let max = *labels.iter().max().expect("non-empty");
    if max + 1 == distinct {
        if let Ok(p) = Partition::from_dense(labels.clone(), distinct) {
            return Ok(p);
        }
    }
    Partition::from_labels(&labels)
}

pub fn read_partition_csv(path: impl AsRef<Path>) -> Result<Partition> {
    parse_partition_csv(&fs::read_to_string(path)?)
}

pub fn format_partition_csv(p: &Partition) -> String {
    let mut out = String::from("entity_id,cluster\n");
    for (i, &label) in p.labels().iter().enumerate() {
        let _ = writeln!(out, "{i},{label}");
    }
    out
}

pub fn write_partition_csv(path: impl AsRef<Path>, p: &Partition) -> Result<()> {
    fs::write(path, format_partition_csv(p))?;
    Ok(())
}

/// Parses a `left,right,cost,size` linkage matrix over `n_leaves` singleton
/// leaves, re-validating the merge-tree invariants (live ids, id numbering,
/// size additivity).
pub fn parse_linkage_csv(text: &str, n_leaves: usize) -> Result<Dendrogram> {
    parse_linkage_csv_sized(text, &vec![1; n_leaves])
}

/// As [`parse_linkage_csv`], for trees whose leaves are pre-formed clusters
/// with the given cardinalities (the anomalous-pattern variants).
pub fn parse_linkage_csv_sized(text: &str, leaf_sizes: &[usize]) -> Result<Dendrogram> {
    let mut merges: Vec<(Merge, usize)> = Vec::new();
    for (line_no, line) in numbered_lines(text) {
        let fields = split_fields(line);
        if fields.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected left,right,cost,size, got {} fields", fields.len()),
            ));
        }
        if fields[0].eq_ignore_ascii_case("left") {
            continue;
        }
        merges.push((
            Merge {
                left: parse_usize(fields[0], line_no)?,
                right: parse_usize(fields[1], line_no)?,
                cost: parse_f64(fields[2], line_no)?,
                size: parse_usize(fields[3], line_no)?,
            },
            line_no,
        ));
    }
    let mut d = Dendrogram::with_leaf_sizes(leaf_sizes.to_vec())?;
    for (merge, line_no) in merges {
        let id = d
            .record(merge.left, merge.right, merge.cost)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        let recorded = d.merges().last().expect("just recorded").size;
        if recorded != merge.size {
            return Err(parse_err(
                line_no,
                format!(
                    "size column says {} but cluster {} has {} members",
                    merge.size, id, recorded
                ),
            ));
        }
    }
    Ok(d)
}

pub fn read_linkage_csv(path: impl AsRef<Path>, n_leaves: usize) -> Result<Dendrogram> {
    parse_linkage_csv(&fs::read_to_string(path)?, n_leaves)
}

pub fn format_linkage_csv(d: &Dendrogram) -> String {
    let mut out = String::from("left,right,cost,size\n");
    for m in d.merges() {
        let _ = writeln!(out, "{},{},{},{}", m.left, m.right, m.cost, m.size);
    }
    out
}

pub fn write_linkage_csv(path: impl AsRef<Path>, d: &Dendrogram) -> Result<()> {
    fs::write(path, format_linkage_csv(d))?;
    Ok(())
}

fn sanitize_newick_name(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_whitespace() || matches!(c, ',' | '(' | ')' | ':' | ';' | '\'' | '"') {
                '_'
            } else {
                c
            }
        })
        .collect()
}

/// Renders the merge tree as Newick text, one tree per live root, with each
/// child branch annotated by the parent's merge cost. Leaf names default to
/// the leaf indices.
pub fn to_newick(d: &Dendrogram, leaf_names: Option<&[String]>) -> Result<String> {
    let n = d.n_leaves();
    if let Some(names) = leaf_names {
        if names.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} leaf names for {} leaves",
                names.len(),
                n
            )));
        }
    }
    let mut rendered: Vec<String> = (0..n)
        .map(|i| match leaf_names {
            Some(names) => sanitize_newick_name(&names[i]),
            None => i.to_string(),
        })
        .collect();
    let mut consumed = vec![false; n + d.merges().len()];
    for m in d.merges() {
        let node = format!(
            "({}:{},{}:{})",
            rendered[m.left], m.cost, rendered[m.right], m.cost
        );
        consumed[m.left] = true;
        consumed[m.right] = true;
        rendered.push(node);
    }
    let roots: Vec<String> = consumed
        .iter()
        .enumerate()
        .filter(|&(_, &c)| !c)
        .map(|(id, _)| format!("{};", rendered[id]))
        .collect();
    Ok(roots.join("\n"))
}

pub fn write_newick(path: impl AsRef<Path>, d: &Dendrogram, leaf_names: Option<&[String]>) -> Result<()> {
    fs::write(path, to_newick(d, leaf_names)?)?;
    Ok(())
}

/// One applied noise operation and the sub-seed it drew from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedNoise {
    pub spec: NoiseSpec,
    pub seed: u64,
}

/// The JSON sidecar persisted next to every generated dataset CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub name: String,
    pub seed: u64,
    pub mixture: Option<MixtureConfig>,
    #[serde(default)]
    pub noise: Vec<AppliedNoise>,
    pub truth_labels: Option<Vec<usize>>,
    #[serde(default)]
    pub n_noise_features: usize,
    #[serde(default)]
    pub substituted_entities: Vec<usize>,
}

pub fn parse_sidecar_json(text: &str) -> Result<DatasetSidecar> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_sidecar_json(path: impl AsRef<Path>) -> Result<DatasetSidecar> {
    parse_sidecar_json(&fs::read_to_string(path)?)
}

pub fn write_sidecar_json(path: impl AsRef<Path>, sidecar: &DatasetSidecar) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(sidecar)?)?;
    Ok(())
}

/// Grid cells as CSV: `p,beta,silhouette,ari_vs_truth,runtime_ms,error`.
pub fn format_grid_csv(r: &GridResult) -> String {
    let mut out = String::from("p,beta,silhouette,ari_vs_truth,runtime_ms,error\n");
    for cell in &r.cells {
        let beta = cell.beta.map(|b| b.to_string()).unwrap_or_default();
        let sil = cell.silhouette.map(|s| s.to_string()).unwrap_or_default();
        let ari = cell
            .ari_vs_truth
            .map(|a| a.to_string())
            .unwrap_or_default();
        let err = cell
            .error
            .as_deref()
            .map(|e| e.replace(',', ";"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            cell.p, beta, sil, ari, cell.runtime_ms, err
        );
    }
    out
}

pub fn write_grid_csv(path: impl AsRef<Path>, r: &GridResult) -> Result<()> {
    fs::write(path, format_grid_csv(r))?;
    Ok(())
}
