use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::BipartiteGraph;
use crate::error::{Error, Result};

/// Maps dense vertex ids back to the identifiers used in the source file.
///
/// For libsvm input, `u` maps to the 1-based source line and `v` is the
/// identity on feature indices. For edge lists, both sides map to the
/// original node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    pub u_external: Vec<i64>,
    pub v_external: Vec<i64>,
}

impl IdMap {
    pub fn identity(num_u: usize, num_v: usize) -> Self {
        Self {
            u_external: (0..num_u as i64).collect(),
            v_external: (0..num_v as i64).collect(),
        }
    }

    /// Writes the `<side> <dense> <external>` sidecar.
    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "# parsa id map v1")?;
        for (dense, ext) in self.u_external.iter().enumerate() {
            writeln!(w, "u {dense} {ext}")?;
        }
        for (dense, ext) in self.v_external.iter().enumerate() {
            writeln!(w, "v {dense} {ext}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let reader = BufReader::new(File::open(path)?);
        let mut map = IdMap::default();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (side, dense, ext) = match (it.next(), it.next(), it.next()) {
                (Some(s), Some(d), Some(e)) => (s, d, e),
                _ => return Err(Error::parse(lineno, "expected `<side> <dense> <external>`")),
            };
            let dense: usize = dense
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad dense id `{dense}`")))?;
            let ext: i64 = ext
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad external id `{ext}`")))?;
            let target = match side {
                "u" => &mut map.u_external,
                "v" => &mut map.v_external,
                other => return Err(Error::parse(lineno, format!("unknown side `{other}`"))),
            };
            if dense != target.len() {
                return Err(Error::parse(lineno, "dense ids must be listed in order"));
            }
            target.push(ext);
        }
        Ok(map)
    }
}

/// Reads a libsvm file (`label idx:val idx:val ...`). Only the sparsity
/// pattern is kept; values are validated and discarded.
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    load_libsvm_with_ids(path).map(|(g, _)| g)
}

pub fn load_libsvm_with_ids(path: impl AsRef<Path>) -> Result<(BipartiteGraph, IdMap)> {
    parse_libsvm(BufReader::new(File::open(path)?))
}

/// Parses libsvm rows. Each non-blank line becomes one `u`, in order; a
/// feature index `j` becomes `v_j`, so `|V|` is the largest index plus one.
/// Text after `#` is ignored.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<(BipartiteGraph, IdMap)> {
    let mut adjacency: Vec<Vec<usize>> = Vec::new();
    let mut source_lines = Vec::new();
    let mut num_v = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token");
        if label.contains(':') {
            return Err(Error::parse(lineno, "missing label before features"));
        }
        let mut row = Vec::new();
        for tok in tokens {
            let (index, value) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected `idx:val`, got `{tok}`")))?;
            let index: usize = index
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature index `{index}`")))?;
            value
                .parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("bad feature value `{value}`")))?;
            row.push(index);
        }
        row.sort_unstable();
        if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::parse(lineno, format!("duplicate feature index {}", w[0])));
        }
        if let Some(&max) = row.last() {
            num_v = num_v.max(max + 1);
        }
        adjacency.push(row);
        source_lines.push(lineno as i64);
    }

    let g = BipartiteGraph::from_adjacency(num_v, &adjacency)?;
    let ids = IdMap {
        u_external: source_lines,
        v_external: (0..num_v as i64).collect(),
    };
    Ok((g, ids))
}

/// Reads a whitespace-separated `src dst` edge list into the `U' = V`
/// adjacency form: each edge becomes `(u_src, v_dst)`, plus `(u_dst, v_src)`
/// when undirected. Node ids are compacted to a dense range in ascending
/// order of the original ids.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<BipartiteGraph> {
    load_edge_list_with_ids(path, directed).map(|(g, _)| g)
}

pub fn load_edge_list_with_ids(path: impl AsRef<Path>, directed: bool) -> Result<(BipartiteGraph, IdMap)> {
    parse_edge_list(BufReader::new(File::open(path)?), directed)
}

pub fn parse_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<(BipartiteGraph, IdMap)> {
    let mut raw: Vec<(i64, i64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::parse(
                lineno,
                format!("expected `src dst`, got {} tokens", tokens.len()),
            ));
        }
        let parse = |t: &str| {
            t.parse::<i64>()
                .map_err(|_| Error::parse(lineno, format!("non-integer node id `{t}`")))
        };
        raw.push((parse(tokens[0])?, parse(tokens[1])?));
    }

    let mut dense: BTreeMap<i64, usize> = BTreeMap::new();
    for &(s, d) in &raw {
        dense.insert(s, 0);
        dense.insert(d, 0);
    }
    for (i, slot) in dense.values_mut().enumerate() {
        *slot = i;
    }
    let n = dense.len();
    let mut edges = Vec::with_capacity(raw.len() * if directed { 1 } else { 2 });
    for &(s, d) in &raw {
        let (s, d) = (dense[&s], dense[&d]);
        edges.push((s, d));
        if !directed {
            edges.push((d, s));
        }
    }
    let g = BipartiteGraph::from_edges(n, n, edges)?;
    let external: Vec<i64> = dense.keys().copied().collect();
    Ok((
        g,
        IdMap {
            u_external: external.clone(),
            v_external: external,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn libsvm(s: &str) -> Result<BipartiteGraph> {
        parse_libsvm(Cursor::new(s)).map(|(g, _)| g)
    }

    fn edges(s: &str, directed: bool) -> BipartiteGraph {
        parse_edge_list(Cursor::new(s), directed).unwrap().0
    }

    #[test]
    fn libsvm_two_lines() {
        let g = libsvm("1 0:1 1:1\n0 0:1\n").unwrap();
        assert_eq!((g.num_u(), g.num_v()), (2, 2));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn libsvm_empty_file() {
        let g = libsvm("").unwrap();
        assert_eq!((g.num_u(), g.num_v(), g.num_edges()), (0, 0, 0));
    }

    /// Straight line-by-line transcription used as the reference parser.
    fn reference_libsvm(s: &str) -> (usize, usize, Vec<(usize, usize)>) {
        let mut edges = Vec::new();
        let mut nv = 0;
        let mut nu = 0;
        for line in s.lines().filter(|l| !l.trim().is_empty()) {
            for tok in line.split_whitespace().skip(1) {
                let j: usize = tok.split(':').next().unwrap().parse().unwrap();
                nv = nv.max(j + 1);
                edges.push((nu, j));
            }
            nu += 1;
        }
        edges.sort();
        (nu, nv, edges)
    }

    #[test]
    fn libsvm_sparse_index_matches_reference() {
        let input = "1 3:0.5\n";
        let g = libsvm(input).unwrap();
        let (nu, nv, es) = reference_libsvm(input);
        assert_eq!((g.num_u(), g.num_v()), (nu, nv));
        assert_eq!((nu, nv), (1, 4));
        assert_eq!(g.edges().collect::<Vec<_>>(), es);
        assert!((0..3).all(|v| g.v_degree(v) == 0));

        let input = "+1 5:1 2:3.5 9:1e-3\n-1\n0 2:1 # trailing comment\n\n1 0:0\n";
        let g = libsvm(input).unwrap();
        let (nu, nv, es) = reference_libsvm(&input.replace(" # trailing comment", ""));
        assert_eq!((g.num_u(), g.num_v()), (nu, nv));
        assert_eq!(g.edges().collect::<Vec<_>>(), es);
    }

    #[test]
    fn libsvm_errors_carry_line_numbers() {
        match libsvm("1 0:1\n1 0:1 0:2\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("expected duplicate error on line 2, got {other:?}"),
        }
        match libsvm("1 0:1\n\n1 x:1\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("expected parse error on line 3, got {other:?}"),
        }
        assert!(matches!(libsvm("1 -1:1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(libsvm("1 4\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(libsvm("0:1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(libsvm("1 2:abc\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn libsvm_id_map_points_at_source_lines() {
        let (_, ids) = parse_libsvm(Cursor::new("1 0:1\n\n0 1:1\n")).unwrap();
        assert_eq!(ids.u_external, vec![1, 3]);
        assert_eq!(ids.v_external, vec![0, 1]);
    }

    #[test]
    fn edge_list_directed() {
        let g = edges("0 1\n1 2\n", true);
        assert_eq!((g.num_u(), g.num_v()), (3, 3));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn edge_list_undirected_symmetry() {
        let g = edges("0 1\n", false);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn edge_list_undirected_dedup() {
        let input = "# comment\n0 1\n1 0\n";
        let g = edges(input, false);
        // dedup oracle: sorted set of both orientations
        let mut expected: Vec<(usize, usize)> = vec![(0, 1), (1, 0), (1, 0), (0, 1)];
        expected.sort();
        expected.dedup();
        assert_eq!(g.edges().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn edge_list_self_loop_kept_once() {
        let g = edges("2 2\n", false);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn edge_list_compacts_sparse_ids() {
        let (g, ids) = parse_edge_list(Cursor::new("10 500\n500 -3\n"), true).unwrap();
        assert_eq!(ids.u_external, vec![-3, 10, 500]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 0)]);
    }

    #[test]
    fn edge_list_rejects_non_integer() {
        let err = parse_edge_list(Cursor::new("0 1\n1 b\n"), true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_edge_list(Cursor::new("0 1 2\n"), true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn id_map_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ids.txt");
        let ids = IdMap {
            u_external: vec![4, 9, -1],
            v_external: vec![7],
        };
        ids.write_to(&path).unwrap();
        assert_eq!(IdMap::read_from(&path).unwrap(), ids);
    }
}
