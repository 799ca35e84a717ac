//! Plain-text file formats. Node labels in files are 1-based; everything in
//! memory is 0-based. Lines starting with `#` are comments.
//!
//! * Edge list: `n=<N>` then one `l k` line per edge with `l < k`.
//! * Matrix: `n=<N> rho=<rho>` then `l k value` for every stored entry
//!   (diagonal included), values written with 17 significant digits.
//! * Correlations: `source=<analytic|empirical> samples=<T> size=<m>`,
//!   `nodes=<labels>`, then an `r0` block and an `r1` block of `m` rows each.
//! * Estimate: `kind=<name> source=<...> samples=<T> size=<m> condition=<c|none>`,
//!   `nodes=<labels>`, then `m` rows.
//! * Decision: an edge list over the probed set (local labels) preceded by
//!   `# nodes=`, `# threshold=` and `# degenerate=` comment lines.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use graphtomo_core::dynamics::{CorrelationPair, Origin};
use graphtomo_core::{CombinationMatrix, EstimatedSubmatrix, EstimatorKind, Graph, ObservationSet};
use nalgebra::DMatrix;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(reader: impl BufRead) -> Result<Vec<(usize, String)>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_string()));
    }
    Ok(out)
}

fn header_fields(line: usize, text: &str) -> Result<HashMap<String, String>, FormatError> {
    text.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| parse_err(line, format!("expected key=value, found `{tok}`")))
        })
        .collect()
}

fn field<T: std::str::FromStr>(fields: &HashMap<String, String>, key: &str, line: usize) -> Result<T, FormatError> {
    let raw = fields.get(key).ok_or_else(|| parse_err(line, format!("missing `{key}=`")))?;
    raw.parse().map_err(|_| parse_err(line, format!("bad value for `{key}`: `{raw}`")))
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, FormatError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what}: `{tok}`")))
}

fn label(tok: Option<&str>, n: usize, line: usize) -> Result<usize, FormatError> {
    let l: usize = number(tok, line, "node label")?;
    if l == 0 || l > n {
        return Err(parse_err(line, format!("node label {l} outside 1..={n}")));
    }
    Ok(l - 1)
}

/// Parses `1,2,5-9` (1-based, inclusive ranges) into an observation set over `n` nodes.
pub fn parse_node_list(text: &str, n: usize) -> Result<ObservationSet, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (part, part),
        };
        let lo: usize = lo.parse().map_err(|_| format!("bad node label `{lo}`"))?;
        let hi: usize = hi.parse().map_err(|_| format!("bad node label `{hi}`"))?;
        if lo == 0 || hi < lo {
            return Err(format!("bad node range `{part}`"));
        }
        out.extend(lo - 1..hi);
    }
    ObservationSet::new(out, n).map_err(|e| e.to_string())
}

pub fn format_node_list(s: &ObservationSet) -> String {
    s.to_string()
}

pub fn write_edge_list(mut w: impl Write, g: &Graph) -> std::io::Result<()> {
    writeln!(w, "n={}", g.n())?;
    for (l, k) in g.edges() {
        writeln!(w, "{} {}", l + 1, k + 1)?;
    }
    Ok(())
}

pub fn read_edge_list(reader: impl BufRead) -> Result<Graph, FormatError> {
    let lines = content_lines(reader)?;
    let Some((hline, header)) = lines.first() else {
        return Err(parse_err(0, "empty edge list"));
    };
    let n: usize = field(&header_fields(*hline, header)?, "n", *hline)?;
    let mut g = Graph::empty(n);
    for (line, text) in &lines[1..] {
        let mut toks = text.split_whitespace();
        let l = label(toks.next(), n, *line)?;
        let k = label(toks.next(), n, *line)?;
        if toks.next().is_some() {
            return Err(parse_err(*line, "expected two labels"));
        }
        if l == k {
            return Err(parse_err(*line, "self-loops are not allowed"));
        }
        g.add_edge(l, k).map_err(|e| parse_err(*line, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_matrix(mut w: impl Write, a: &CombinationMatrix) -> std::io::Result<()> {
    writeln!(w, "n={} rho={:.16e}", a.n(), a.rho())?;
    for (l, k, v) in a.triplets() {
        writeln!(w, "{} {} {:.16e}", l + 1, k + 1, v)?;
    }
    Ok(())
}

pub fn read_matrix(reader: impl BufRead) -> Result<CombinationMatrix, FormatError> {
    let lines = content_lines(reader)?;
    let Some((hline, header)) = lines.first() else {
        return Err(parse_err(0, "empty matrix file"));
    };
    let fields = header_fields(*hline, header)?;
    let n: usize = field(&fields, "n", *hline)?;
    let rho: f64 = field(&fields, "rho", *hline)?;
    let mut dense = DMatrix::zeros(n, n);
    for (line, text) in &lines[1..] {
        let mut toks = text.split_whitespace();
        let l = label(toks.next(), n, *line)?;
        let k = label(toks.next(), n, *line)?;
        let v: f64 = number(toks.next(), *line, "value")?;
        dense[(l, k)] = v;
    }
    CombinationMatrix::from_dense_with_rho(&dense, rho).map_err(|e| parse_err(*hline, format!("{e} (header rho={rho})")))
}

fn origin_fields(origin: Origin) -> String {
    match origin {
        Origin::Analytic => "source=analytic samples=0".to_string(),
        Origin::Empirical { samples } => format!("source=empirical samples={samples}"),
    }
}

fn parse_origin(fields: &HashMap<String, String>, line: usize) -> Result<Origin, FormatError> {
    match fields.get("source").map(String::as_str) {
        Some("analytic") => Ok(Origin::Analytic),
        Some("empirical") => Ok(Origin::Empirical { samples: field(fields, "samples", line)? }),
        other => Err(parse_err(line, format!("unknown source {other:?}"))),
    }
}

fn write_rows(out: &mut String, m: &DMatrix<f64>) {
    for l in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|k| format!("{:.16e}", m[(l, k)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

fn read_rows(lines: &[(usize, String)], m: usize) -> Result<DMatrix<f64>, FormatError> {
    if lines.len() < m {
        let line = lines.last().map_or(0, |l| l.0);
        return Err(parse_err(line, format!("expected {m} matrix rows")));
    }
    let mut out = DMatrix::zeros(m, m);
    for (l, (line, text)) in lines[..m].iter().enumerate() {
        let vals: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(*line, format!("bad value `{t}`"))))
            .collect::<Result<_, _>>()?;
        if vals.len() != m {
            return Err(parse_err(*line, format!("expected {m} values, found {}", vals.len())));
        }
        for (k, v) in vals.into_iter().enumerate() {
            out[(l, k)] = v;
        }
    }
    Ok(out)
}

/// Node labels are global; `n` bounds them when reading back.
pub fn write_correlations(mut w: impl Write, pair: &CorrelationPair) -> std::io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{} size={}", origin_fields(pair.origin), pair.nodes.len());
    let _ = writeln!(out, "nodes={}", pair.nodes);
    out.push_str("r0\n");
    write_rows(&mut out, &pair.r0);
    out.push_str("r1\n");
    write_rows(&mut out, &pair.r1);
    w.write_all(out.as_bytes())
}

fn parse_nodes_line(lines: &[(usize, String)], idx: usize, size: usize) -> Result<ObservationSet, FormatError> {
    let (line, text) = lines.get(idx).ok_or_else(|| parse_err(0, "missing nodes= line"))?;
    let list = text.strip_prefix("nodes=").ok_or_else(|| parse_err(*line, "expected nodes="))?;
    let nodes = parse_node_list(list, usize::MAX).map_err(|e| parse_err(*line, e))?;
    if nodes.len() != size {
        return Err(parse_err(*line, format!("{} labels for size {size}", nodes.len())));
    }
    Ok(nodes)
}

pub fn read_correlations(reader: impl BufRead) -> Result<CorrelationPair, FormatError> {
    let lines = content_lines(reader)?;
    let (hline, header) = lines.first().ok_or_else(|| parse_err(0, "empty correlation file"))?;
    let fields = header_fields(*hline, header)?;
    let origin = parse_origin(&fields, *hline)?;
    let m: usize = field(&fields, "size", *hline)?;
    let nodes = parse_nodes_line(&lines, 1, m)?;
    let expect_tag = |idx: usize, tag: &str| -> Result<(), FormatError> {
        match lines.get(idx) {
            Some((_, t)) if t == tag => Ok(()),
            Some((line, _)) => Err(parse_err(*line, format!("expected `{tag}`"))),
            None => Err(parse_err(0, format!("missing `{tag}` block"))),
        }
    };
    expect_tag(2, "r0")?;
    let r0 = read_rows(&lines[3..], m)?;
    expect_tag(3 + m, "r1")?;
    let r1 = read_rows(&lines[4 + m..], m)?;
    Ok(CorrelationPair { r0, r1, origin, nodes })
}

pub fn write_estimate(mut w: impl Write, est: &EstimatedSubmatrix) -> std::io::Result<()> {
    let mut out = String::new();
    let condition = est.condition.map_or("none".to_string(), |c| format!("{c:.16e}"));
    let _ = writeln!(
        out,
        "kind={} {} size={} condition={condition}",
        est.kind,
        origin_fields(est.source),
        est.nodes.len()
    );
    let _ = writeln!(out, "nodes={}", est.nodes);
    write_rows(&mut out, &est.values);
    w.write_all(out.as_bytes())
}

pub fn read_estimate(reader: impl BufRead) -> Result<EstimatedSubmatrix, FormatError> {
    let lines = content_lines(reader)?;
    let (hline, header) = lines.first().ok_or_else(|| parse_err(0, "empty estimate file"))?;
    let fields = header_fields(*hline, header)?;
    let kind: EstimatorKind = field(&fields, "kind", *hline)?;
    let source = parse_origin(&fields, *hline)?;
    let m: usize = field(&fields, "size", *hline)?;
    let condition = match fields.get("condition").map(String::as_str) {
        None | Some("none") => None,
        Some(_) => Some(field(&fields, "condition", *hline)?),
    };
    let nodes = parse_nodes_line(&lines, 1, m)?;
    let values = read_rows(&lines[2..], m)?;
    if lines.len() > 2 + m {
        return Err(parse_err(lines[2 + m].0, "trailing content"));
    }
    Ok(EstimatedSubmatrix { values, kind, source, nodes, condition })
}

/// Flags attached to a decision file.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionFlags {
    pub nodes: ObservationSet,
    pub threshold: f64,
    pub degenerate: bool,
}

pub fn write_decision(mut w: impl Write, decision: &Graph, flags: &DecisionFlags) -> std::io::Result<()> {
    writeln!(w, "# nodes={}", flags.nodes)?;
    writeln!(w, "# threshold={:.16e}", flags.threshold)?;
    writeln!(w, "# degenerate={}", flags.degenerate)?;
    write_edge_list(w, decision)
}

/// Reads the edge list and the flag comments of a decision file.
pub fn read_decision(reader: impl BufRead) -> Result<(Graph, DecisionFlags), FormatError> {
    let text = std::io::read_to_string(reader)?;
    let graph = read_edge_list(text.as_bytes())?;
    let mut flags = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if let Some((k, v)) = line.strip_prefix('#').and_then(|c| c.trim().split_once('=')) {
            flags.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
    }
    let get = |key: &str| flags.get(key).ok_or_else(|| parse_err(0, format!("missing `# {key}=` flag")));
    let (line, nodes) = get("nodes")?;
    let nodes = parse_node_list(nodes, usize::MAX).map_err(|e| parse_err(*line, e))?;
    let (line, threshold) = get("threshold")?;
    let threshold = threshold.parse().map_err(|_| parse_err(*line, "bad threshold"))?;
    let (line, degenerate) = get("degenerate")?;
    let degenerate = degenerate.parse().map_err(|_| parse_err(*line, "bad degenerate flag"))?;
    Ok((graph, DecisionFlags { nodes, threshold, degenerate }))
}

/// Long-format trajectory CSV: `time,agent,value` with 1-based agent labels.
pub struct TrajectoryWriter<W: Write> {
    inner: csv::Writer<W>,
    agents: Vec<usize>,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(w: W, observed: &ObservationSet) -> Result<Self, FormatError> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(["time", "agent", "value"])?;
        Ok(TrajectoryWriter { inner, agents: observed.indices().to_vec() })
    }

    pub fn record(&mut self, time: usize, values: &[f64]) -> Result<(), FormatError> {
        for (&agent, v) in self.agents.iter().zip(values) {
            self.inner.write_record([time.to_string(), (agent + 1).to_string(), v.to_string()])?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), FormatError> {
        self.inner.flush()?;
        Ok(())
    }
}
