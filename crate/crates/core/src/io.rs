//! JSON instance and walk formats.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::fraction_string;
use crate::hypergraph::{GraphSystem, KGraph, OneKGraph, PerturbedDegreeReport, Point};
use crate::sequential::SeqWalk;
use crate::vicinity::Vicinity;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Core(#[from] crate::Error),
}

/// On-disk form: `{"n", "k", "graphs": [[edge, ...] per color], "meta"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub graphs: Vec<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

impl Instance {
    pub fn from_system(sys: &GraphSystem, meta: Option<Value>) -> Self {
        Self {
            n: sys.n(),
            k: sys.k(),
            graphs: sys.graphs().iter().map(|g| g.edges().to_vec()).collect(),
            meta,
        }
    }

    pub fn from_onek(g: &OneKGraph, meta: Option<Value>) -> Self {
        let mut graphs = vec![Vec::new(); g.colors()];
        for (c, e) in g.edges() {
            graphs[c].push(e.to_vec());
        }
        for list in &mut graphs {
            list.sort();
        }
        Self { n: g.n(), k: g.k(), graphs, meta }
    }

    /// Requires one graph per point.
    pub fn to_system(&self) -> crate::Result<GraphSystem> {
        let graphs = self
            .graphs
            .iter()
            .map(|edges| KGraph::new(self.n, self.k, edges.iter().cloned()))
            .collect::<crate::Result<Vec<_>>>()?;
        if graphs.len() != self.n {
            return Err(crate::Error::Instance(format!(
                "a graph system needs {} graphs, found {}",
                self.n,
                graphs.len()
            )));
        }
        GraphSystem::new(graphs)
    }

    /// Any number of colors; each list of edges becomes one color class.
    pub fn to_onek(&self) -> crate::Result<OneKGraph> {
        let edges = self
            .graphs
            .iter()
            .enumerate()
            .flat_map(|(c, list)| list.iter().map(move |e| (c, e.clone())));
        OneKGraph::new(self.graphs.len(), self.n, self.k, edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances always serialize")
    }
}

/// Offset of the `edge`-th array inside the `color`-th array under the
/// top-level `"graphs"` key, if the text is laid out as expected.
fn locate_edge(text: &str, color: usize, edge: usize) -> Option<usize> {
    let key = text.find("\"graphs\"")?;
    let bytes = text.as_bytes();
    let mut i = key + "\"graphs\"".len();
    while i < bytes.len() && bytes[i] != b'[' {
        i += 1;
    }
    // depth 1: list of colors, depth 2: edges of a color
    let (mut depth, mut c, mut e) = (0usize, 0usize, 0usize);
    let mut in_string = false;
    while i < bytes.len() {
        let b = bytes[i];
        if in_string {
            if b == b'\\' {
                i += 1;
            } else if b == b'"' {
                in_string = false;
            }
        } else {
            match b {
                b'"' => in_string = true,
                b'[' => {
                    depth += 1;
                    if depth == 3 && c == color && e == edge {
                        return Some(i);
                    }
                }
                b']' => {
                    depth -= 1;
                    if depth == 0 {
                        return None;
                    }
                }
                b',' if depth == 1 => {
                    c += 1;
                    e = 0;
                }
                b',' if depth == 2 => e += 1,
                _ => {}
            }
        }
        i += 1;
    }
    None
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

/// Parses and validates an instance; errors carry a line and column.
pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let inst: Instance = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if inst.k == 0 || inst.k > inst.n {
        let (line, column) = text.find("\"k\"").map_or((1, 1), |o| line_column(text, o));
        return Err(IoError::Parse { line, column, message: format!("k = {} must lie in [1, n = {}]", inst.k, inst.n) });
    }
    for (c, list) in inst.graphs.iter().enumerate() {
        for (j, e) in list.iter().enumerate() {
            let problem = if e.len() != inst.k {
                Some(format!("color {c}, edge {j}: expected {} points, got {}", inst.k, e.len()))
            } else if let Some(&v) = e.iter().find(|&&v| v >= inst.n) {
                Some(format!("color {c}, edge {j}: vertex {v} out of range (n = {})", inst.n))
            } else if e.windows(2).any(|w| w[0] >= w[1]) {
                Some(format!("color {c}, edge {j}: points must be strictly increasing"))
            } else {
                None
            };
            if let Some(message) = problem {
                let (line, column) = locate_edge(text, c, j).map_or((1, 1), |o| line_column(text, o));
                return Err(IoError::Parse { line, column, message });
            }
        }
    }
    Ok(inst)
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_path_buf(), source })
}

pub fn load_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read(path)?)
}

pub fn parse_walk(text: &str) -> Result<SeqWalk, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_walk(path: &Path) -> Result<SeqWalk, IoError> {
    parse_walk(&read(path)?)
}

/// Generic typed JSON document from disk.
pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write { path: path.to_path_buf(), source })
}

pub fn perturbed_report_json(r: &PerturbedDegreeReport) -> Value {
    let tuples = |v: &[(usize, Vec<Point>, crate::arith::Ratio)]| -> Vec<Value> {
        v.iter()
            .map(|(c, s, d)| json!({"color": c, "set": s, "relative": fraction_string(d)}))
            .collect()
    };
    json!({
        "alpha": fraction_string(&r.alpha),
        "delta": fraction_string(&r.delta),
        "colors": r.colors,
        "holds": r.holds(),
        "levels": r.levels.iter().map(|l| json!({
            "j": l.j,
            "p1Violations": tuples(&l.p1_violations),
            "p2Density": fraction_string(&l.p2_density),
            "p2Holds": l.p2_holds,
            "p3Violations": tuples(&l.p3_violations),
        })).collect::<Vec<_>>(),
    })
}

pub fn vicinity_json(v: &Vicinity) -> Value {
    json!({
        "color": v.color(),
        "sets": v.iter().map(|(s, c)| json!({"set": s, "edges": c.edges()})).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let sys = GraphSystem::new(vec![KGraph::complete(4, 3); 4]).unwrap();
        let inst = Instance::from_system(&sys, Some(json!({"generator": "complete"})));
        let back = parse_instance(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_system().unwrap(), sys);
    }

    #[test]
    fn diagnostics_point_at_the_edge() {
        let text = "{\n  \"n\": 4,\n  \"k\": 3,\n  \"graphs\": [\n    [[0, 1, 2]],\n    [[0, 1], [1, 2, 3]]\n  ]\n}";
        match parse_instance(text) {
            Err(IoError::Parse { line, column, message }) => {
                assert_eq!((line, column), (6, 6));
                assert!(message.contains("expected 3 points"));
            }
            other => panic!("{other:?}"),
        }
        let text = "{\"n\": 4, \"k\": 3, \"graphs\": [[[0, 1, 7]]]}";
        assert!(matches!(parse_instance(text), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_instance("{\"n\": 4,\n \"k\": }") {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
