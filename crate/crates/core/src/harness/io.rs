//! Edge-list graph files and matrix output.
//!
//! Format: one edge per line, `u v` or `u v w`, 0-based integer vertex ids,
//! `#` starts a comment. Unweighted duplicates are idempotent; weighted
//! duplicates sum. Self-loops are rejected.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

pub fn load_graph(path: &Path, weighted: bool, n_hint: Option<usize>) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, weighted, n_hint)
}

pub fn parse_edge_list(text: &str, weighted: bool, n_hint: Option<usize>) -> Result<Array2<f64>> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_index = 0usize;

    for (line_index, raw) in text.lines().enumerate() {
        let line_number = line_index + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse {
                line: line_number,
                message: format!("expected 'u v' or 'u v w', got {} fields", tokens.len()),
            });
        }
        let u: usize = tokens[0].parse().map_err(|_| Error::Parse {
            line: line_number,
            message: format!("invalid vertex id '{}'", tokens[0]),
        })?;
        let v: usize = tokens[1].parse().map_err(|_| Error::Parse {
            line: line_number,
            message: format!("invalid vertex id '{}'", tokens[1]),
        })?;
        if u == v {
            return Err(Error::SelfLoop {
                line: line_number,
                vertex: u,
            });
        }
        let w: f64 = match tokens.get(2) {
            Some(tok) => {
                let w: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_number,
                    message: format!("invalid weight '{tok}'"),
                })?;
                if !w.is_finite() {
                    return Err(Error::Parse {
                        line: line_number,
                        message: format!("non-finite weight '{tok}'"),
                    });
                }
                w
            }
            None => 1.0,
        };
        if let Some(n) = n_hint {
            if u >= n || v >= n {
                return Err(Error::Parse {
                    line: line_number,
                    message: format!("vertex id {} exceeds declared size {n}", u.max(v)),
                });
            }
        }
        max_index = max_index.max(u).max(v);
        edges.push((u, v, w));
    }

    let n = match n_hint {
        Some(n) => n,
        None => {
            if edges.is_empty() {
                return Err(Error::EmptyInput("edge list has no edges and no size hint"));
            }
            max_index + 1
        }
    };

    let mut m = Array2::<f64>::zeros((n, n));
    for (u, v, w) in edges {
        if weighted {
            m[[u, v]] += w;
            m[[v, u]] += w;
        } else {
            m[[u, v]] = 1.0;
            m[[v, u]] = 1.0;
        }
    }
    Ok(m)
}

/// Writes the upper triangle as an edge list; zero entries are omitted.
/// Weighted output keeps the weight column.
pub fn write_edge_list(path: &Path, m: &ArrayView2<f64>, weighted: bool) -> Result<()> {
    let n = m.nrows();
    let mut out = String::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let w = m[[u, v]];
            if w != 0.0 {
                if weighted {
                    out.push_str(&format!("{u} {v} {}\n", crate::harness::csv::fmt_f64(w)));
                } else {
                    out.push_str(&format!("{u} {v}\n"));
                }
            }
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Dense comma-separated matrix, one row per line.
pub fn write_dense_csv(path: &Path, m: &ArrayView2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let fields: Vec<String> = row.iter().map(|&x| crate::harness::csv::fmt_f64(x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_graph() {
        let m = parse_edge_list("0 1\n1 2\n", false, None).unwrap();
        assert_eq!(m.nrows(), 3);
        assert_eq!(m[[0, 1]], 1.0);
        assert_eq!(m[[1, 0]], 1.0);
        assert_eq!(m[[1, 2]], 1.0);
        assert_eq!(m[[0, 2]], 0.0);
    }

    #[test]
    fn weighted_entry() {
        let m = parse_edge_list("0 1 5.0\n", true, None).unwrap();
        assert_eq!(m[[0, 1]], 5.0);
        assert_eq!(m[[1, 0]], 5.0);
    }

    #[test]
    fn unweighted_duplicates_idempotent() {
        let m = parse_edge_list("0 1\n0 1\n", false, None).unwrap();
        assert_eq!(m[[0, 1]], 1.0);
    }

    #[test]
    fn weighted_duplicates_sum() {
        let m = parse_edge_list("0 1 2.0\n1 0 3.0\n", true, None).unwrap();
        assert_eq!(m[[0, 1]], 5.0);
        assert_eq!(m[[1, 0]], 5.0);
    }

    #[test]
    fn rejects_self_loop_with_line() {
        let err = parse_edge_list("0 1\n2 2\n", false, None).unwrap_err();
        match err {
            Error::SelfLoop { line, vertex } => {
                assert_eq!(line, 2);
                assert_eq!(vertex, 2);
            }
            other => panic!("expected self-loop error, got {other}"),
        }
    }

    #[test]
    fn rejects_malformed_line() {
        let err = parse_edge_list("0 1\nnope\n", false, None).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let m = parse_edge_list("# header\n\n0 1 # inline\n", false, None).unwrap();
        assert_eq!(m[[0, 1]], 1.0);
    }

    #[test]
    fn size_hint_checked() {
        assert!(parse_edge_list("0 5\n", false, Some(4)).is_err());
        let m = parse_edge_list("0 1\n", false, Some(6)).unwrap();
        assert_eq!(m.nrows(), 6);
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        let mut m = Array2::<f64>::zeros((4, 4));
        m[[0, 2]] = 1.0;
        m[[2, 0]] = 1.0;
        m[[1, 3]] = 1.0;
        m[[3, 1]] = 1.0;
        write_edge_list(&path, &m.view(), false).unwrap();
        let back = load_graph(&path, false, Some(4)).unwrap();
        assert_eq!(m, back);
    }
}
