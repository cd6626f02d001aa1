//! Edge-list ingestion and CSV output.
//!
//! Input is the SNAP edge-list format: one `u v` pair of nonnegative integer
//! node IDs per line, `#` comments, blank lines ignored. IDs are mapped to
//! `[1, n]` in order of first appearance and the original IDs are kept as
//! labels.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectra::Spectrum;

/// A graph together with the external identifier of each node.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    graph: Graph,
    labels: Vec<String>,
}

impl LabeledGraph {
    /// `labels[i]` names internal node `i + 1`; labels must be distinct.
    pub fn new(graph: Graph, labels: Vec<String>) -> Result<Self> {
        if labels.len() != graph.node_count() {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} nodes",
                labels.len(),
                graph.node_count()
            )));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidGraph("node labels are not distinct".into()));
        }
        Ok(LabeledGraph { graph, labels })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// External label of the 1-based internal node `i`.
    pub fn label(&self, i: usize) -> &str {
        &self.labels[i - 1]
    }

    /// Same labels, different edges; used to attach input labels to a
    /// mechanism output.
    pub fn with_graph(&self, graph: Graph) -> Result<Self> {
        LabeledGraph::new(graph, self.labels.clone())
    }

    /// Edge set in terms of external labels, each pair in sorted order.
    /// Two labeled graphs describe the same network iff these sets match.
    pub fn labeled_edges(&self) -> BTreeSet<(String, String)> {
        self.graph
            .edges()
            .map(|(i, j)| {
                let (a, b) = (self.label(i).to_owned(), self.label(j).to_owned());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }
}

/// Post-parse validation against known dataset sizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub expect_nodes: Option<usize>,
    pub expect_edges: Option<usize>,
}

pub fn parse_edge_list<R: BufRead>(reader: R, opts: &ParseOptions) -> Result<LabeledGraph> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut intern = |id: u64| {
        *index.entry(id).or_insert_with(|| {
            labels.push(id.to_string());
            labels.len()
        })
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 2 node ids, found {}", tokens.len()),
            });
        }
        let mut ids = [0u64; 2];
        for (slot, tok) in ids.iter_mut().zip(&tokens) {
            *slot = tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("node id {tok:?} is not a nonnegative integer"),
            })?;
        }
        let (a, b) = (intern(ids[0]), intern(ids[1]));
        if a != b {
            edges.push((a, b));
        }
    }

    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let graph = Graph::from_edges(labels.len(), edges)?;
    if let Some(n) = opts.expect_nodes {
        if graph.node_count() != n {
            return Err(Error::Validation(format!(
                "expected {n} nodes, parsed {}",
                graph.node_count()
            )));
        }
    }
    if let Some(m) = opts.expect_edges {
        if graph.edge_count() != m {
            return Err(Error::Validation(format!(
                "expected {m} edges, parsed {}",
                graph.edge_count()
            )));
        }
    }
    LabeledGraph::new(graph, labels)
}

pub fn read_edge_list(path: &Path, opts: &ParseOptions) -> Result<LabeledGraph> {
    let file = File::open(path)?;
    parse_edge_list(BufReader::new(file), opts)
}

/// Writes one `label label` line per edge in internal lexicographic order,
/// after a comment header. Isolated nodes are not representable in this
/// format and do not survive a round trip.
pub fn write_graph<W: Write>(g: &LabeledGraph, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# nodes: {} edges: {}",
        g.graph.node_count(),
        g.graph.edge_count()
    )?;
    for (i, j) in g.graph.edges() {
        writeln!(out, "{} {}", g.label(i), g.label(j))?;
    }
    out.flush()?;
    Ok(())
}

/// Mechanism that produced a private spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismTag {
    /// Private graph from the edge-wise sampler, then its Laplacian spectrum.
    ModifiedEr,
    /// Bounded Laplace noise on each eigenvalue.
    BoundedLaplace,
}

impl MechanismTag {
    pub const ALL: [MechanismTag; 2] = [MechanismTag::ModifiedEr, MechanismTag::BoundedLaplace];

    pub fn as_str(self) -> &'static str {
        match self {
            MechanismTag::ModifiedEr => "modified-er",
            MechanismTag::BoundedLaplace => "bounded-laplace",
        }
    }
}

impl fmt::Display for MechanismTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MechanismTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modified-er" => Ok(MechanismTag::ModifiedEr),
            "bounded-laplace" => Ok(MechanismTag::BoundedLaplace),
            other => Err(Error::Domain(format!(
                "unknown mechanism {other:?} (expected modified-er or bounded-laplace)"
            ))),
        }
    }
}

/// One private spectrum drawn in the accuracy sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub mechanism: MechanismTag,
    pub epsilon: f64,
    pub adjacency_a: u32,
    pub trial: usize,
    pub seed: u64,
    pub mean_rel_err: f64,
    /// Privatized eigenvalues, kept only when requested; not written to CSV.
    pub spectrum_digest: Option<Vec<f64>>,
}

pub const RESULTS_HEADER: [&str; 6] = [
    "mechanism",
    "epsilon",
    "adjacency_a",
    "trial",
    "seed",
    "mean_rel_err",
];

pub const SUMMARY_HEADER: [&str; 4] = [
    "mechanism",
    "epsilon",
    "mean_of_mean_rel_err",
    "mean_variance",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_field<T: FromStr>(record: &csv::StringRecord, idx: usize, line: usize) -> Result<T> {
    let raw = record.get(idx).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing column {idx}"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {raw:?} in column {idx}"),
    })
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", expected.join(",")),
        });
    }
    Ok(())
}

/// Writes per-trial records sorted by `(mechanism, epsilon, trial)`.
pub fn write_results<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.mechanism
            .cmp(&b.mechanism)
            .then(a.epsilon.total_cmp(&b.epsilon))
            .then(a.trial.cmp(&b.trial))
    });
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in sorted {
        w.write_record([
            r.mechanism.as_str().to_owned(),
            format_f64(r.epsilon),
            r.adjacency_a.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            format_f64(r.mean_rel_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &RESULTS_HEADER)?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        out.push(ExperimentRecord {
            mechanism: parse_field(&row, 0, line)?,
            epsilon: parse_field(&row, 1, line)?,
            adjacency_a: parse_field(&row, 2, line)?,
            trial: parse_field(&row, 3, line)?,
            seed: parse_field(&row, 4, line)?,
            mean_rel_err: parse_field(&row, 5, line)?,
            spectrum_digest: None,
        });
    }
    Ok(out)
}

/// Cross-trial aggregate for one `(mechanism, ε)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub mechanism: MechanismTag,
    pub epsilon: f64,
    pub mean_of_mean_rel_err: f64,
    /// Absent when fewer than two trials were run.
    pub mean_variance: Option<f64>,
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.mechanism.as_str().to_owned(),
            format_f64(r.epsilon),
            format_f64(r.mean_of_mean_rel_err),
            r.mean_variance.map(format_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &SUMMARY_HEADER)?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let variance = match row.get(3) {
            Some("") | None => None,
            Some(_) => Some(parse_field(&row, 3, line)?),
        };
        out.push(SummaryRow {
            mechanism: parse_field(&row, 0, line)?,
            epsilon: parse_field(&row, 1, line)?,
            mean_of_mean_rel_err: parse_field(&row, 2, line)?,
            mean_variance: variance,
        });
    }
    Ok(out)
}

/// `index,eigenvalue` rows with 1-based indices.
pub fn write_spectrum<W: Write>(spectrum: &Spectrum, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "eigenvalue"])?;
    for (i, v) in spectrum.values().iter().enumerate() {
        w.write_record([(i + 1).to_string(), format_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LabeledGraph> {
        parse_edge_list(text.as_bytes(), &ParseOptions::default())
    }

    #[test]
    fn two_edge_path() {
        let g = parse("0 1\n1 2\n").unwrap();
        assert_eq!(g.graph().node_count(), 3);
        assert_eq!(g.graph().edges().collect::<Vec<_>>(), vec![(1, 2), (2, 3)]);
        assert_eq!(g.labels(), ["0", "1", "2"]);
    }

    #[test]
    fn duplicates_collapse() {
        let g = parse("0 1\n1 0\n0 1\n").unwrap();
        assert_eq!(g.graph().edge_count(), 1);
        assert_eq!(g.graph().node_count(), 2);
    }

    #[test]
    fn comments_blank_lines_and_self_loops() {
        let g = parse("# header\n\n 5\t9 \n9 9\n# 1 2\n9 12\n").unwrap();
        assert_eq!(g.labels(), ["5", "9", "12"]);
        assert_eq!(g.graph().edge_count(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse("0 1\n1 x\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("0 1 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse("-1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse(""), Err(Error::EmptyGraph)));
        assert!(matches!(
            parse("# only a comment\n"),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn expected_counts_are_enforced() {
        let text = "1 2\n2 3\n";
        let ok = ParseOptions {
            expect_nodes: Some(3),
            expect_edges: Some(2),
        };
        assert!(parse_edge_list(text.as_bytes(), &ok).is_ok());
        let bad = ParseOptions {
            expect_edges: Some(3),
            ..ok
        };
        assert!(matches!(
            parse_edge_list(text.as_bytes(), &bad),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn write_graph_cases() {
        let single = parse("7 3\n").unwrap();
        let mut buf = Vec::new();
        write_graph(&single, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
        assert!(text.contains("7 3\n"));

        let empty = LabeledGraph::new(Graph::empty(2), vec!["a".into(), "b".into()]).unwrap();
        let mut buf = Vec::new();
        write_graph(&empty, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.starts_with('#')));
    }

    #[test]
    fn labeled_graph_validation() {
        assert!(LabeledGraph::new(Graph::empty(2), vec!["a".into()]).is_err());
        assert!(LabeledGraph::new(Graph::empty(2), vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn mechanism_tags() {
        for tag in MechanismTag::ALL {
            assert_eq!(tag.as_str().parse::<MechanismTag>().unwrap(), tag);
        }
        assert!("laplace".parse::<MechanismTag>().is_err());
    }

    fn record(trial: usize, err: f64) -> ExperimentRecord {
        ExperimentRecord {
            mechanism: MechanismTag::ModifiedEr,
            epsilon: 2.505,
            adjacency_a: 1,
            trial,
            seed: 12_345_678_901_234,
            mean_rel_err: err,
            spectrum_digest: None,
        }
    }

    #[test]
    fn results_csv() {
        let mut buf = Vec::new();
        write_results(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "mechanism,epsilon,adjacency_a,trial,seed,mean_rel_err\n"
        );

        let r = record(0, 1.0 / 3.0);
        let mut buf = Vec::new();
        write_results(std::slice::from_ref(&r), &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 2);
        assert_eq!(read_results(buf.as_slice()).unwrap(), vec![r]);
    }

    #[test]
    fn results_are_sorted() {
        let mut b = record(0, 0.5);
        b.mechanism = MechanismTag::BoundedLaplace;
        let recs = vec![record(2, 0.1), b, record(1, 0.2)];
        let mut buf = Vec::new();
        write_results(&recs, &mut buf).unwrap();
        let back = read_results(buf.as_slice()).unwrap();
        let order: Vec<_> = back.iter().map(|r| (r.mechanism, r.trial)).collect();
        assert_eq!(
            order,
            vec![
                (MechanismTag::ModifiedEr, 1),
                (MechanismTag::ModifiedEr, 2),
                (MechanismTag::BoundedLaplace, 0)
            ]
        );
    }

    #[test]
    fn summary_csv_with_missing_variance() {
        let rows = vec![
            SummaryRow {
                mechanism: MechanismTag::ModifiedEr,
                epsilon: 0.835,
                mean_of_mean_rel_err: 7.1,
                mean_variance: None,
            },
            SummaryRow {
                mechanism: MechanismTag::BoundedLaplace,
                epsilon: 0.835,
                mean_of_mean_rel_err: 3.8,
                mean_variance: Some(28.2),
            },
        ];
        let mut buf = Vec::new();
        write_summary(&rows, &mut buf).unwrap();
        assert_eq!(read_summary(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn spectrum_csv() {
        let mut buf = Vec::new();
        write_spectrum(&Spectrum::raw(vec![0.0, 3.0, 3.0]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<_> = text.lines().collect();
        assert_eq!(rows[0], "index,eigenvalue");
        assert_eq!(rows.len(), 4);
        assert!(rows[2].starts_with("2,3.0000000000000000e0"));
    }
}
