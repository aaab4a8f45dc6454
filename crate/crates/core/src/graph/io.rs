//! G-set (rudy) text format: a header line `N m` followed by `m` lines
//! `i j w` with 1-based vertex indices.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{Edge, Graph};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_gset(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut fields = header.split_whitespace();
    let (n, m) = match (fields.next(), fields.next(), fields.next()) {
        (Some(a), Some(b), None) => (
            a.parse::<usize>()
                .map_err(|_| parse_err(hline, format!("bad vertex count {a:?}")))?,
            b.parse::<usize>()
                .map_err(|_| parse_err(hline, format!("bad edge count {b:?}")))?,
        ),
        _ => return Err(parse_err(hline, "malformed header, expected \"N m\"")),
    };
    if n == 0 {
        return Err(parse_err(hline, "vertex count must be positive"));
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    let mut last_line = hline;
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("expected {m} edges, found {}", edges.len())))?;
        last_line = ln;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(ln, "expected \"i j w\""));
        }
        let index = |s: &str| -> Result<usize> {
            let v = s
                .parse::<usize>()
                .map_err(|_| parse_err(ln, format!("bad vertex index {s:?}")))?;
            if v == 0 || v > n {
                return Err(parse_err(ln, format!("vertex index {v} out of range [1, {n}]")));
            }
            Ok(v - 1)
        };
        let a = index(parts[0])?;
        let b = index(parts[1])?;
        let w: f64 = parts[2]
            .parse()
            .ok()
            .filter(|w: &f64| w.is_finite())
            .ok_or_else(|| parse_err(ln, format!("bad weight {:?}", parts[2])))?;
        if a == b {
            return Err(parse_err(ln, "self-loop"));
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if !seen.insert((i, j)) {
            return Err(parse_err(ln, format!("duplicate edge {} {}", i + 1, j + 1)));
        }
        edges.push(Edge { i, j, w });
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, format!("unexpected content after {m} edges")));
    }
    Ok(Graph::from_edges_unchecked(n, edges))
}

fn format_weight(out: &mut String, w: f64) {
    if w.fract() == 0.0 && w.abs() < 1e15 {
        let _ = write!(out, "{}", w as i64);
    } else {
        let _ = write!(out, "{w}");
    }
}

pub fn write_gset(graph: &Graph) -> String {
    let mut out = String::with_capacity(16 * (graph.n_edges() + 1));
    let _ = writeln!(out, "{} {}", graph.n_vertices(), graph.n_edges());
    for e in graph.edges() {
        let _ = write!(out, "{} {} ", e.i + 1, e.j + 1);
        format_weight(&mut out, e.w);
        out.push('\n');
    }
    out
}

pub fn read_gset_file(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_gset(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const K4: &str = "4 6\n1 2 1\n1 3 1\n1 4 1\n2 3 1\n2 4 1\n3 4 1\n";

    #[test]
    fn parses_k4() {
        let g = parse_gset(K4).unwrap();
        assert_eq!(g.n_vertices(), 4);
        assert_eq!(g.n_edges(), 6);
        assert_eq!(g.average_degree(), 3.0);
        assert_eq!(g.edges()[0], Edge { i: 0, j: 1, w: 1.0 });
    }

    #[test]
    fn writes_k4() {
        let g = parse_gset(K4).unwrap();
        let text = write_gset(&g);
        assert_eq!(text.lines().count(), 7);
        assert_eq!(text.lines().next(), Some("4 6"));
        assert_eq!(text, K4);
    }

    #[test]
    fn empty_graph() {
        let g = parse_gset("2 0\n").unwrap();
        assert_eq!(g.n_edges(), 0);
        assert_eq!(write_gset(&g), "2 0\n");
    }

    #[test]
    fn crlf_blank_lines_and_real_weights() {
        let g = parse_gset("\r\n3 2\r\n1 2 -1\r\n2 3 0.25\r\n\r\n\r\n").unwrap();
        assert_eq!(g.edges()[1].w, 0.25);
        assert_eq!(parse_gset(&write_gset(&g)).unwrap(), g);
    }

    #[test]
    fn header_of_a_large_instance() {
        // Only the header is checked here; edge lines are generated.
        let mut text = String::from("800 19176\n");
        let mut count = 0;
        'outer: for i in 1..=800 {
            for j in (i + 1)..=800 {
                if count == 19176 {
                    break 'outer;
                }
                text.push_str(&format!("{i} {j} 1\n"));
                count += 1;
            }
        }
        let g = parse_gset(&text).unwrap();
        assert_eq!((g.n_vertices(), g.n_edges()), (800, 19176));
    }

    fn line_of(text: &str) -> usize {
        match parse_gset(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_gset("3 1\n1 1 5").unwrap_err();
        assert_eq!(err.to_string(), "parse error at line 2: self-loop");
        assert_eq!(line_of("3\n"), 1);
        assert_eq!(line_of("x 1\n1 2 1\n"), 1);
        assert_eq!(line_of("3 1\n1 4 1\n"), 2);
        assert_eq!(line_of("3 1\n0 2 1\n"), 2);
        assert_eq!(line_of("3 2\n1 2 1\n2 1 1\n"), 3);
        assert_eq!(line_of("3 2\n1 2 1\n"), 3);
        assert_eq!(line_of("3 1\n1 2 x\n"), 2);
        assert_eq!(line_of("3 1\n1 2 1\n2 3 1\n"), 3);
    }
}
