//! Text formats: whitespace edge lists, vertex-label sidecars and CSV points.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{build_graph_with, DuplicatePolicy, Graph, Partition};

/// Parses `u v w` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_edge_list(text: &str, policy: DuplicatePolicy) -> Result<Graph> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected `u v w`, found {} fields", fields.len())));
        }
        let u = fields[0].parse::<u64>().map_err(|e| parse_err(format!("bad vertex `{}`: {e}", fields[0])))?;
        let v = fields[1].parse::<u64>().map_err(|e| parse_err(format!("bad vertex `{}`: {e}", fields[1])))?;
        let w = fields[2].parse::<f64>().map_err(|e| parse_err(format!("bad weight `{}`: {e}", fields[2])))?;
        edges.push((u, v, w));
    }
    build_graph_with(&edges, policy)
}

pub fn read_edge_list(path: &Path, policy: DuplicatePolicy) -> Result<Graph> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::GraphLoad { path: path.display().to_string(), msg: e.to_string() })?;
    parse_edge_list(&text, policy)
}

/// One `u v w` line per edge, using the original vertex ids.
pub fn write_edge_list(g: &Graph, mut out: impl Write) -> Result<()> {
    for e in g.edges() {
        writeln!(out, "{} {} {}", g.label(e.u), g.label(e.v), e.w)?;
    }
    Ok(())
}

/// One `vertex label` line per vertex, using the original vertex ids.
pub fn write_labels(g: &Graph, part: &Partition, mut out: impl Write) -> Result<()> {
    for u in 0..g.n() {
        writeln!(out, "{} {}", g.label(u), part.label(u))?;
    }
    Ok(())
}

/// Reads `vertex label` lines back.
pub fn parse_labels(text: &str) -> Result<Vec<(u64, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parsed = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => a.parse::<u64>().ok().zip(b.parse::<usize>().ok()),
            _ => None,
        };
        out.push(parsed.ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected `vertex label`, got `{line}`") })?);
    }
    Ok(out)
}

/// Numeric CSV, one point per row. A first row that does not parse as
/// numbers is taken as a header.
pub fn parse_points_csv(input: impl Read) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        let row: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match row {
            Ok(r) => points.push(r),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Parse { line: i + 1, msg: e.to_string() }),
        }
    }
    Ok(points)
}

/// Like [`parse_points_csv`], with column `label_col` split off as a class
/// label. Distinct label strings get ids in order of first appearance.
pub fn parse_labeled_points_csv(input: impl Read, label_col: usize) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let (mut points, mut labels, mut ids) = (Vec::new(), Vec::new(), Vec::<String>::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        let label = rec.get(label_col).ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("no column {label_col} in a row of {} fields", rec.len()),
        })?;
        let row: std::result::Result<Vec<f64>, _> =
            rec.iter().enumerate().filter(|&(c, _)| c != label_col).map(|(_, x)| x.parse::<f64>()).collect();
        match row {
            Ok(r) => {
                let id = ids.iter().position(|x| x == label).unwrap_or_else(|| {
                    ids.push(label.to_string());
                    ids.len() - 1
                });
                points.push(r);
                labels.push(id);
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Parse { line: i + 1, msg: e.to_string() }),
        }
    }
    Ok((points, labels))
}

pub fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let f = fs::File::open(path).map_err(|e| Error::GraphLoad { path: path.display().to_string(), msg: e.to_string() })?;
    parse_points_csv(f)
}
