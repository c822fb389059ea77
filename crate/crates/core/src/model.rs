//! Tree-PIN sources with a linear wiretapper.
//!
//! Every edge `e` carries `n_e` i.i.d. uniform symbols of `F_q`, observed by
//! both endpoints. The concatenation of all edge symbols, in edge-list order,
//! is the base vector `X` of dimension `D = sum n_e`; each edge occupies a
//! contiguous range of coordinates. The wiretapper observes `X * W`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::falinalg::FMatrix;
use crate::gfield::{ExtFieldCtx, FieldElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: u32,
    pub u: usize,
    pub v: usize,
    pub multiplicity: usize,
}

impl Edge {
    pub fn touches(&self, node: usize) -> bool {
        self.u == node || self.v == node
    }

    pub fn other(&self, node: usize) -> usize {
        if self.u == node {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePinSource {
    vertex_count: usize,
    edges: Vec<Edge>,
    field: ExtFieldCtx,
    layout: Vec<Range<usize>>,
}

impl TreePinSource {
    pub fn new(q: u64, vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        let field = ExtFieldCtx::base(q)?;
        if vertex_count < 2 {
            return Err(Error::NotATree(format!("{vertex_count} vertices; at least one edge is required")));
        }
        if edges.len() + 1 != vertex_count {
            return Err(Error::NotATree(format!("{} edges on {vertex_count} vertices", edges.len())));
        }
        let mut ids = HashSet::new();
        for e in &edges {
            if !ids.insert(e.id) {
                return Err(Error::NotATree(format!("duplicate edge id {}", e.id)));
            }
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::NotATree(format!("edge {} has an endpoint out of range", e.id)));
            }
            if e.u == e.v {
                return Err(Error::NotATree(format!("edge {} is a loop", e.id)));
            }
            if e.multiplicity == 0 {
                return Err(Error::ZeroMultiplicity(e.id));
            }
        }
        // |E| = |V| - 1 plus connectivity
        let mut parent: Vec<usize> = (0..vertex_count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                p[r] = p[p[r]];
                r = p[r];
            }
            r
        }
        for e in &edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a == b {
                return Err(Error::NotATree(format!("edge {} closes a cycle", e.id)));
            }
            parent[a] = b;
        }
        let mut start = 0;
        let layout = edges
            .iter()
            .map(|e| {
                let r = start..start + e.multiplicity;
                start = r.end;
                r
            })
            .collect();
        Ok(TreePinSource { vertex_count, edges, field, layout })
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    /// The base field `F_q`.
    pub fn field(&self) -> &ExtFieldCtx {
        &self.field
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total base dimension `D`.
    pub fn dim(&self) -> usize {
        self.layout.last().map_or(0, |r| r.end)
    }

    /// Smallest edge multiplicity `s`.
    pub fn min_multiplicity(&self) -> usize {
        self.edges.iter().map(|e| e.multiplicity).min().unwrap_or(0)
    }

    pub fn edge_index(&self, id: u32) -> Result<usize> {
        self.edges.iter().position(|e| e.id == id).ok_or(Error::UnknownEdge(id))
    }

    pub fn edge(&self, id: u32) -> Result<&Edge> {
        Ok(&self.edges[self.edge_index(id)?])
    }

    /// Coordinate range of the edge at position `idx` in the edge list.
    pub fn range(&self, idx: usize) -> Range<usize> {
        self.layout[idx].clone()
    }

    pub fn layout(&self) -> &[Range<usize>] {
        &self.layout
    }

    /// Positions (in the edge list) of the edges incident to `node`.
    pub fn incident(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].touches(node)).collect()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.incident(node).len()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertex_count).filter(|&v| self.degree(v) == 1).collect()
    }

    /// `D x n_e` selector of an edge's coordinates.
    pub fn edge_selector(&self, idx: usize) -> FMatrix {
        selector(&self.field, self.dim(), &self.range(idx).collect::<Vec<_>>())
    }

    pub fn node_view(&self, node: usize) -> NodeView {
        let coords: Vec<usize> =
            self.incident(node).into_iter().flat_map(|i| self.range(i)).collect::<BTreeSet<_>>().into_iter().collect();
        NodeView { node, selector: selector(&self.field, self.dim(), &coords), coords }
    }

    /// Same tree with one edge's multiplicity replaced.
    pub fn with_multiplicity(&self, idx: usize, multiplicity: usize) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges[idx].multiplicity = multiplicity;
        TreePinSource::new(self.q(), self.vertex_count, edges)
    }
}

/// Standard-basis selector with one column per listed coordinate.
pub fn selector(ctx: &ExtFieldCtx, dim: usize, coords: &[usize]) -> FMatrix {
    let mut h = FMatrix::zeros(ctx, dim, coords.len());
    for (j, &c) in coords.iter().enumerate() {
        h.set(c, j, ctx.one());
    }
    h
}

/// What one terminal observes.
#[derive(Clone, Debug)]
pub struct NodeView {
    pub node: usize,
    pub coords: Vec<usize>,
    pub selector: FMatrix,
}

/// Full-column-rank observation matrix `W` (`D x n_w`) over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wiretapper {
    matrix: FMatrix,
}

impl Wiretapper {
    pub fn new(matrix: FMatrix) -> Result<Self> {
        if matrix.ctx().degree() != 1 {
            return Err(Error::InvalidArgument("wiretapper must be over the base field".into()));
        }
        let rank = matrix.rank();
        if rank != matrix.cols() {
            return Err(Error::RankDeficientWiretap { rank, cols: matrix.cols() });
        }
        Ok(Wiretapper { matrix })
    }

    /// No side information (`n_w = 0`).
    pub fn none(source: &TreePinSource) -> Self {
        Wiretapper { matrix: FMatrix::zeros(source.field(), source.dim(), 0) }
    }

    pub fn matrix(&self) -> &FMatrix {
        &self.matrix
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// `W` embedded into an extension field.
    pub fn lifted(&self, target: &ExtFieldCtx) -> Result<FMatrix> {
        self.matrix.lift(target)
    }
}

/// A validated tree-PIN source together with its wiretapper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub source: TreePinSource,
    pub wiretapper: Wiretapper,
}

impl Instance {
    pub fn new(source: TreePinSource, wiretapper: Wiretapper) -> Result<Self> {
        let w = wiretapper.matrix();
        if w.rows() != source.dim() {
            return Err(Error::Shape(format!("W has {} rows but the source has dimension {}", w.rows(), source.dim())));
        }
        if w.ctx() != source.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(Instance { source, wiretapper })
    }

    pub fn n_w(&self) -> usize {
        self.wiretapper.cols()
    }
}

pub fn load_instance(text: &str) -> Result<Instance> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next = |what: &str| {
        lines.next().ok_or_else(|| Error::Parse { line: 0, msg: format!("unexpected end of input, expected {what}") })
    };
    let perr = |line: usize, msg: String| Error::Parse { line, msg };

    let (ln, header) = next("header")?;
    let q = header
        .strip_prefix("treepin q=")
        .and_then(|v| v.trim().parse::<u64>().ok())
        .ok_or_else(|| perr(ln, format!("expected `treepin q=<prime>`, got `{header}`")))?;

    let (ln, vline) = next("vertex count")?;
    let m = vline
        .strip_prefix("vertices ")
        .and_then(|v| v.trim().parse::<usize>().ok())
        .ok_or_else(|| perr(ln, format!("expected `vertices <m>`, got `{vline}`")))?;

    let mut edges = Vec::new();
    let n_w = loop {
        let (ln, l) = next("edge or wiretap line")?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["edge", id, u, v, ne] => {
                let parse = |t: &str| t.parse::<u64>().map_err(|_| perr(ln, format!("bad integer `{t}`")));
                edges.push(Edge {
                    id: parse(id)? as u32,
                    u: parse(u)? as usize,
                    v: parse(v)? as usize,
                    multiplicity: parse(ne)? as usize,
                });
            }
            ["wiretap", cols] => {
                break cols
                    .strip_prefix("cols=")
                    .and_then(|c| c.parse::<usize>().ok())
                    .ok_or_else(|| perr(ln, format!("expected `wiretap cols=<n_w>`, got `{l}`")))?;
            }
            _ => return Err(perr(ln, format!("unexpected line `{l}`"))),
        }
    };

    let source = TreePinSource::new(q, m, edges)?;
    let field = source.field().clone();
    // a wiretapper with no columns has no rows in the file
    let row_count = if n_w == 0 { 0 } else { source.dim() };
    let mut rows = Vec::with_capacity(row_count);
    for _ in 0..row_count {
        let (ln, l) = next("wiretapper row")?;
        let row = l
            .split_whitespace()
            .map(|t| {
                let v = t.parse::<u64>().map_err(|_| perr(ln, format!("bad integer `{t}`")))?;
                if v >= q {
                    return Err(perr(ln, format!("entry {v} not in [0, {q})")));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n_w {
            return Err(perr(ln, format!("expected {n_w} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if let Some((ln, l)) = lines.next() {
        return Err(perr(ln, format!("trailing content `{l}`")));
    }
    let data = rows.iter().flatten().map(|&v| field.embed_base(v)).collect::<Result<Vec<FieldElem>>>()?;
    let w = FMatrix::from_elems(&field, source.dim(), n_w, data)?;
    Instance::new(source, Wiretapper::new(w)?)
}

pub fn save_instance(inst: &Instance) -> String {
    let src = &inst.source;
    let mut out = String::new();
    writeln!(out, "treepin q={}", src.q()).unwrap();
    writeln!(out, "vertices {}", src.vertex_count()).unwrap();
    for e in src.edges() {
        writeln!(out, "edge {} {} {} {}", e.id, e.u, e.v, e.multiplicity).unwrap();
    }
    let w = inst.wiretapper.matrix();
    writeln!(out, "wiretap cols={}", w.cols()).unwrap();
    let row_count = if w.cols() == 0 { 0 } else { w.rows() };
    for r in 0..row_count {
        let row: Vec<String> = w.row(r).iter().map(|e| e.raw().to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

/// Random labeled tree from a uniform Prüfer sequence, as edges `(u, v)`.
pub fn random_tree<R: Rng + ?Sized>(vertex_count: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if vertex_count == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..vertex_count - 2).map(|_| rng.gen_range(0..vertex_count)).collect();
    prufer_decode(&seq, vertex_count)
}

pub fn prufer_decode(seq: &[usize], vertex_count: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; vertex_count];
    for &v in seq {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..vertex_count).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(vertex_count - 1);
    for &v in seq {
        let leaf = *leaves.iter().next().expect("a leaf always exists");
        leaves.remove(&leaf);
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Seeded random instance: Prüfer tree, multiplicities uniform in
/// `1..=max_multiplicity`, and `n_w` random columns resampled until `W` has
/// full column rank.
pub fn random_instance(
    seed: u64,
    vertex_count: usize,
    max_multiplicity: usize,
    q: u64,
    n_w: usize,
) -> Result<Instance> {
    if vertex_count < 2 {
        return Err(Error::InvalidArgument("vertex_count must be at least 2".into()));
    }
    if max_multiplicity == 0 {
        return Err(Error::InvalidArgument("max_multiplicity must be at least 1".into()));
    }
    let field = ExtFieldCtx::base(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = random_tree(vertex_count, &mut rng);
    tree.shuffle(&mut rng);
    let edges = tree
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| Edge {
            id: i as u32,
            u: u.min(v),
            v: u.max(v),
            multiplicity: rng.gen_range(1..=max_multiplicity),
        })
        .collect();
    let source = TreePinSource::new(q, vertex_count, edges)?;
    let d = source.dim();
    if n_w > d {
        return Err(Error::InvalidArgument(format!("n_w = {n_w} exceeds the base dimension {d}")));
    }
    let w = loop {
        let w = FMatrix::random(&field, d, n_w, &mut rng);
        if w.rank() == n_w {
            break w;
        }
    };
    Instance::new(source, Wiretapper::new(w)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::fixtures::PARITY_PATH as PATH3;

    #[test]
    fn loads_the_parity_path() {
        let inst = load_instance(PATH3).unwrap();
        assert_eq!(inst.source.dim(), 3);
        assert_eq!(inst.n_w(), 1);
        assert_eq!(save_instance(&inst), PATH3);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# a comment\n\n{}", PATH3.replace("vertices 4\n", "vertices 4\n# edges\n"));
        assert_eq!(load_instance(&text).unwrap(), load_instance(PATH3).unwrap());
    }

    #[test]
    fn empty_wiretapper() {
        let inst = load_instance("treepin q=3\nvertices 2\nedge 7 0 1 2\nwiretap cols=0\n\n\n").unwrap();
        assert_eq!(inst.n_w(), 0);
        assert_eq!(inst.wiretapper.matrix().rows(), 2);
        assert_eq!(inst.source.dim(), 2);
        assert_eq!(load_instance(&save_instance(&inst)).unwrap(), inst);
        assert!(save_instance(&inst).ends_with("wiretap cols=0\n"));
    }

    #[test]
    fn validation_errors_are_distinct() {
        let rank_deficient =
            "treepin q=2\nvertices 4\nedge 0 0 1 1\nedge 1 1 2 1\nedge 2 2 3 1\nwiretap cols=2\n1 0\n1 0\n1 0\n";
        assert_eq!(load_instance(rank_deficient).unwrap_err(), Error::RankDeficientWiretap { rank: 1, cols: 2 });
        let cycle = "treepin q=2\nvertices 3\nedge 0 0 1 1\nedge 1 1 0 1\nwiretap cols=0\n";
        assert!(matches!(load_instance(cycle).unwrap_err(), Error::NotATree(_)));
        let too_many = "treepin q=2\nvertices 3\nedge 0 0 1 1\nedge 1 1 2 1\nedge 2 0 2 1\nwiretap cols=0\n";
        assert!(matches!(load_instance(too_many).unwrap_err(), Error::NotATree(_)));
        let zero = "treepin q=2\nvertices 2\nedge 5 0 1 0\nwiretap cols=0\n";
        assert_eq!(load_instance(zero).unwrap_err(), Error::ZeroMultiplicity(5));
        let nonprime = "treepin q=4\nvertices 2\nedge 0 0 1 1\nwiretap cols=0\n";
        assert_eq!(load_instance(nonprime).unwrap_err(), Error::NotPrime(4));
        let bad_entry = "treepin q=2\nvertices 2\nedge 0 0 1 1\nwiretap cols=1\n2\n";
        assert!(matches!(load_instance(bad_entry).unwrap_err(), Error::Parse { line: 5, .. }));
        let short = "treepin q=2\nvertices 2\nedge 0 0 1 2\nwiretap cols=1\n1\n";
        assert!(matches!(load_instance(short).unwrap_err(), Error::Parse { .. }));
    }

    #[test]
    fn node_views_cover_incident_edges() {
        let inst = load_instance(PATH3).unwrap();
        let src = &inst.source;
        assert_eq!(src.node_view(0).coords, vec![0]);
        assert_eq!(src.node_view(1).coords, vec![0, 1]);
        assert_eq!(src.node_view(3).coords, vec![2]);
        assert_eq!(src.leaves(), vec![0, 3]);
        for v in 0..4 {
            let view = src.node_view(v);
            assert_eq!(view.selector.rank(), view.coords.len());
        }
    }

    #[test]
    fn random_instance_edge_cases() {
        let inst = random_instance(11, 2, 1, 2, 0).unwrap();
        assert_eq!(inst.source.edge_count(), 1);
        assert_eq!(inst.n_w(), 0);
        assert_eq!(random_instance(5, 6, 3, 3, 2).unwrap(), random_instance(5, 6, 3, 3, 2).unwrap());
        assert!(random_instance(1, 3, 1, 2, 3).is_err());
        assert!(random_instance(1, 1, 1, 2, 0).is_err());
    }

    #[test]
    fn prufer_round_trip_counts_all_trees() {
        // Cayley: 5^3 sequences give 125 distinct labeled trees on 5 vertices
        let mut seen = HashSet::new();
        for code in 0..125usize {
            let seq = [code % 5, code / 5 % 5, code / 25];
            let mut edges: Vec<(usize, usize)> =
                prufer_decode(&seq, 5).into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
            edges.sort();
            seen.insert(edges);
        }
        assert_eq!(seen.len(), 125);
    }

    #[test]
    fn thousand_random_draws_are_valid() {
        for seed in 0..1000 {
            let inst = random_instance(seed, 6, 3, [2, 3, 5][seed as usize % 3], (seed % 4) as usize).unwrap();
            let src = &inst.source;
            assert_eq!(src.edge_count(), 5);
            assert_eq!(inst.wiretapper.matrix().rank(), inst.n_w());
            let mut all_coords = Vec::new();
            for v in 0..src.vertex_count() {
                let view = src.node_view(v);
                let ranges = src.incident(v).len();
                if src.degree(v) == 1 {
                    assert_eq!(ranges, 1);
                } else {
                    assert!(ranges >= 2);
                }
                assert_eq!(view.selector.rank(), view.coords.len());
            }
            for i in 0..src.edge_count() {
                all_coords.extend(src.range(i));
            }
            assert_eq!(all_coords, (0..src.dim()).collect::<Vec<_>>());
            let stacked =
                (0..src.edge_count()).map(|i| src.edge_selector(i)).reduce(|a, b| a.hcat(&b).unwrap()).unwrap();
            assert_eq!(stacked, FMatrix::identity(src.field(), src.dim()));
        }
    }
}
