//! File formats: numeric CSV for datasets, `k j` edge lists and JSON for
//! graphs.
//!
//! CSV files are comma separated with an optional header row. The header is
//! detected by its content: a first row with any field that does not parse
//! as a number is taken as column names.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::data::{DataError, Dataset};
use crate::graph::{Dag, GraphError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: no data rows")]
    Empty { path: PathBuf },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Data {
        path: PathBuf,
        #[source]
        source: DataError,
    },
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        #[source]
        source: GraphError,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset, IoError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(io_err(path))?;
    parse_csv(file, path)
}

/// Parses CSV from any reader; `path` is only used in error messages.
pub fn parse_csv<R: Read>(reader: R, path: &Path) -> Result<Dataset, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let parse_err = |line: u64, message: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut names: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(i as u64 + 1, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse().ok()).collect();
        if names.is_none() && columns.is_empty() && parsed.iter().any(Option::is_none) {
            names = Some(record.iter().map(str::to_owned).collect());
            continue;
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); parsed.len()];
        }
        for (j, value) in parsed.into_iter().enumerate() {
            let value = value
                .ok_or_else(|| parse_err(line, format!("field {} is not a number: {:?}", j + 1, &record[j])))?;
            columns[j].push(value);
        }
    }
    if columns.is_empty() {
        return Err(IoError::Empty {
            path: path.to_path_buf(),
        });
    }
    let data = match names {
        Some(names) => Dataset::with_names(columns, names),
        None => Dataset::from_columns(columns),
    };
    data.map_err(|source| IoError::Data {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a header row of column names followed by one row per observation.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_csv_to(&mut buf, data).map_err(io_err(path))?;
    fs::write(path, buf).map_err(io_err(path))
}

pub fn write_csv_to<W: Write>(out: W, data: &Dataset) -> std::io::Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(out);
    wtr.write_record(data.names())?;
    let mut row = Vec::with_capacity(data.p());
    for i in 0..data.n() {
        row.clear();
        row.extend((0..data.p()).map(|j| data.value(i, j).to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()
}

/// One `k j` line per edge, in lexicographic order.
pub fn format_edge_list(dag: &Dag) -> String {
    dag.edges().map(|(k, j)| format!("{k} {j}\n")).collect()
}

/// Parses an edge list. Blank lines and lines starting with `#` are
/// skipped, except a `# p=<int>` line, which fixes the node count. Without
/// it the count is taken from `p`, or else from the largest index seen.
pub fn parse_edge_list(text: &str, p: Option<usize>, path: &Path) -> Result<Dag, IoError> {
    let parse_err = |line: usize, message: String| IoError::Parse {
        path: path.to_path_buf(),
        line: line as u64 + 1,
        message,
    };
    let mut declared = p;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("p=") {
                let value: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(i, format!("bad node count {:?}", value.trim())))?;
                declared = Some(value);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [k, j] = fields[..] else {
            return Err(parse_err(i, format!("expected `k j`, got {line:?}")));
        };
        let index = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(i, format!("bad node index {s:?}")))
        };
        edges.push((index(k)?, index(j)?));
    }
    let p = declared.unwrap_or_else(|| edges.iter().map(|&(k, j)| k.max(j) + 1).max().unwrap_or(0));
    Dag::from_edges(p, edges).map_err(|source| IoError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_edge_list(path: impl AsRef<Path>, dag: &Dag) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(dag)).map_err(io_err(path))
}

pub fn write_dag_json(path: impl AsRef<Path>, dag: &Dag) -> Result<(), IoError> {
    let path = path.as_ref();
    write_json(path, dag)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a graph in either format: JSON if the first non-blank character is
/// `{`, an edge list otherwise.
pub fn read_dag(path: impl AsRef<Path>) -> Result<Dag, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|source| IoError::Json {
            path: path.to_path_buf(),
            source,
        })
    } else {
        parse_edge_list(&text, None, path)
    }
}
