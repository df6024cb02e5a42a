//! JSON and CSV file formats. Vertex labels in files are 1-based.

use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use graph_wishart::cone::{IncompleteMatrix, SparsePrecision};
use graph_wishart::graph::DecomposableGraph;
use graph_wishart::shape::{canonical_shape, CanonicalKind, ShapeParam};
use graph_wishart::Error;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

/// `{"n": 4, "edges": [[1, 2], [2, 3]]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn of(g: &DecomposableGraph) -> Self {
        GraphFile { n: g.n(), edges: g.labeled_edges().into_iter().map(|(a, b)| [a, b]).collect() }
    }

    pub fn build(&self) -> Result<Arc<DecomposableGraph>, CliError> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(Arc::new(DecomposableGraph::new(self.n, &edges)?))
    }
}

/// `{"graph": {...}, "matrix": [[...]]}` with `null` off the edge set. The
/// graph may be omitted when it is supplied separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphFile>,
    pub matrix: Vec<Vec<Option<f64>>>,
}

/// `{"alpha": [...], "beta": [...]}` in the canonical clique and separator
/// order, or `{"hyper": p}` / `{"gwishart": δ}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeFile {
    Explicit { alpha: Vec<f64>, beta: Vec<f64> },
    Hyper { hyper: f64 },
    GWishart { gwishart: f64 },
}

impl ShapeFile {
    pub fn build(&self, g: &DecomposableGraph) -> Result<ShapeParam, CliError> {
        Ok(match self {
            ShapeFile::Explicit { alpha, beta } => ShapeParam::new(g, alpha.clone(), beta.clone())?,
            ShapeFile::Hyper { hyper } => canonical_shape(g, CanonicalKind::Hyper(*hyper))?,
            ShapeFile::GWishart { gwishart } => canonical_shape(g, CanonicalKind::GWishart(*gwishart))?,
        })
    }
}

/// `{"shape": <shape>, "scale": <matrix>}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorFile {
    pub shape: ShapeFile,
    pub scale: MatrixFile,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::new("MalformedInput", format!("{}: {e}", path.display()), json!({ "path": path.display().to_string() }))
    })
}

/// Resolves the graph of a matrix file against an optional separate graph.
pub fn matrix_graph(m: &MatrixFile, graph: Option<&Arc<DecomposableGraph>>) -> Result<Arc<DecomposableGraph>, CliError> {
    match (&m.graph, graph) {
        (Some(own), Some(g)) => {
            let own = own.build()?;
            if *own != **g {
                return Err(Error::GraphMismatch.into());
            }
            Ok(g.clone())
        }
        (Some(own), None) => own.build(),
        (None, Some(g)) => Ok(g.clone()),
        (None, None) => Err(CliError::usage("the matrix file has no graph; pass --graph")),
    }
}

fn dense(m: &MatrixFile, g: &DecomposableGraph) -> Result<DMatrix<f64>, CliError> {
    let n = g.n();
    if m.matrix.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.matrix.len() }.into());
    }
    let mut out = DMatrix::zeros(n, n);
    for (i, row) in m.matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() }.into());
        }
        for (j, v) in row.iter().enumerate() {
            match (g.adjacent(i, j), v) {
                (true, Some(v)) => out[(i, j)] = *v,
                (true, None) => {
                    return Err(Error::MalformedInput(format!("entry ({}, {}) on the edge set is null", i + 1, j + 1)).into())
                }
                (false, None) => {}
                (false, Some(_)) => {
                    return Err(Error::MalformedInput(format!("entry ({}, {}) off the edge set must be null", i + 1, j + 1)).into())
                }
            }
        }
    }
    Ok(out)
}

pub fn load_incomplete(m: &MatrixFile, graph: Option<&Arc<DecomposableGraph>>) -> Result<IncompleteMatrix, CliError> {
    let g = matrix_graph(m, graph)?;
    let d = dense(m, &g)?;
    Ok(IncompleteMatrix::from_dense(g, &d)?)
}

pub fn load_sparse(m: &MatrixFile, graph: Option<&Arc<DecomposableGraph>>) -> Result<SparsePrecision, CliError> {
    let g = matrix_graph(m, graph)?;
    let d = dense(m, &g)?;
    Ok(SparsePrecision::from_dense(g, &d)?)
}

/// Entries on the edge set, `null` elsewhere.
pub fn masked_rows(g: &DecomposableGraph, m: &DMatrix<f64>) -> Vec<Vec<Option<f64>>> {
    (0..g.n()).map(|i| (0..g.n()).map(|j| g.adjacent(i, j).then(|| m[(i, j)])).collect()).collect()
}

pub fn dense_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn matrix_json(g: &DecomposableGraph, m: &DMatrix<f64>) -> Value {
    json!({ "graph": GraphFile::of(g), "matrix": masked_rows(g, m) })
}

pub fn shape_json(s: &ShapeParam) -> Value {
    json!({ "alpha": s.alpha, "beta": s.beta })
}

fn labels(vs: &[usize]) -> Vec<usize> {
    vs.iter().map(|v| v + 1).collect()
}

/// The vertex sets that `alpha` and `beta` are indexed by.
pub fn shape_labels(g: &DecomposableGraph) -> Value {
    let ord = g.canonical();
    json!({
        "alpha": ord.cliques().iter().map(|c| labels(c)).collect::<Vec<_>>(),
        "beta": ord.distinct_separators().iter().map(|d| labels(&d.vertices)).collect::<Vec<_>>(),
    })
}

pub fn vertex_labels(vs: &[usize]) -> Vec<usize> {
    labels(vs)
}

/// Reads observations, one per row. A first row that is entirely
/// non-numeric is taken as a header.
pub fn read_csv(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::new("Io", format!("{}: {e}", path.display()), json!({ "path": path.display().to_string() })))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::new("MalformedInput", e.to_string(), json!({ "row": i })))?;
        let parsed: Vec<Option<f64>> = rec.iter().map(|f| f.parse::<f64>().ok()).collect();
        if i == 0 && parsed.iter().all(Option::is_none) {
            continue;
        }
        let row = rows.len();
        let values = parsed
            .iter()
            .enumerate()
            .map(|(col, v)| v.ok_or(Error::NonNumeric { row, col }))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(values);
    }
    Ok(rows)
}

/// Writes floats with 17 significant digits so output is reproducible
/// byte for byte.
struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    v.serialize(&mut ser).expect("serialising a JSON value");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        assert_eq!(to_string(&json!({ "x": 0.1 })), r#"{"x":1.0000000000000001e-1}"#);
        let back: Value = serde_json::from_str(&to_string(&json!([1.0 / 3.0]))).unwrap();
        assert_eq!(back[0].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn matrix_files_round_trip() {
        let g = Arc::new(DecomposableGraph::path(3).unwrap());
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 9.0, 0.5, 2.0, 0.3, 9.0, 0.3, 2.0]);
        let text = to_string(&matrix_json(&g, &m));
        let file: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file.matrix[0][2], None);
        let x = load_incomplete(&file, None).unwrap();
        assert_eq!(x.values()[(0, 1)], 0.5);
        assert_eq!(x.get(0, 2), None);
    }

    #[test]
    fn values_off_the_edge_set_are_rejected() {
        let file: MatrixFile = serde_json::from_str(
            r#"{"graph": {"n": 3, "edges": [[1, 2], [2, 3]]}, "matrix": [[2, 0.5, 0], [0.5, 2, 0.3], [0, 0.3, 2]]}"#,
        )
        .unwrap();
        assert!(load_incomplete(&file, None).is_err());
    }
}
