//! Linear non-interactive communication for secure omniscience on a tree.
//!
//! Both constructions go through a certificate `S` (`s x D`, rank `s`) with
//! `S * lift(W) = 0`. Given `S` whose edge blocks `S_e` (first `s` columns of
//! each edge) are invertible, the per-node coefficient blocks follow as
//! `A_{i,e} = -S_e^{-1} S_{e*(i)}` and `B_e = -S_e^{-1} T_e`, which forces
//! `S * F = 0`, so the left nullspace of `F` lies inside that of `W`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::falinalg::FMatrix;
use crate::gfield::{make_ext_field, ExtFieldCtx, FieldElem};
use crate::model::{Instance, TreePinSource};
use crate::reduce::is_irreducible;

pub const DEFAULT_MAX_ATTEMPTS: usize = 64;

/// Coefficients node `node` applies to the first `s` symbols of child edge
/// `edge_id`, added to the first `s` symbols of its parent edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ABlock {
    pub node: usize,
    pub edge_id: u32,
    pub matrix: FMatrix,
}

/// `s x (n_e - s)` coefficients node `node` applies to the first `s` symbols
/// of its parent edge before adding the remaining symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBlock {
    pub node: usize,
    pub edge_id: u32,
    pub matrix: FMatrix,
}

/// Linear key `K = Y * M_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyExtractor {
    pub matrix: FMatrix,
}

impl KeyExtractor {
    pub fn symbols(&self) -> usize {
        self.matrix.cols()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommScheme {
    /// `F_{q^n}`; one symbol carries `n` realizations of a base coordinate.
    pub ctx: ExtFieldCtx,
    pub root: usize,
    pub s: usize,
    pub a: Vec<ABlock>,
    pub b: Vec<BBlock>,
    /// `D x (#messages)`; messages are `Y * F`.
    pub f: FMatrix,
    /// Transmitting node of each column of `f`.
    pub owners: Vec<usize>,
    pub certificate: Option<FMatrix>,
    pub key: KeyExtractor,
}

impl CommScheme {
    /// A scheme given only by its message matrix, e.g. entered by hand. The
    /// key extractor is the greedy completion of `f`.
    pub fn from_matrix(ctx: &ExtFieldCtx, root: usize, f: FMatrix, owners: Vec<usize>) -> Result<Self> {
        if f.ctx() != ctx {
            return Err(Error::FieldMismatch);
        }
        if owners.len() != f.cols() {
            return Err(Error::Shape(format!("{} owners for {} message columns", owners.len(), f.cols())));
        }
        let key = extract_key(&f);
        Ok(CommScheme {
            ctx: ctx.clone(),
            root,
            s: key.symbols(),
            a: Vec::new(),
            b: Vec::new(),
            f,
            owners,
            certificate: None,
            key,
        })
    }

    /// Realizations per block.
    pub fn n(&self) -> usize {
        self.ctx.degree()
    }

    pub fn dim(&self) -> usize {
        self.f.rows()
    }

    /// Message columns sent by `node`.
    pub fn columns_of(&self, node: usize) -> Vec<usize> {
        (0..self.owners.len()).filter(|&c| self.owners[c] == node).collect()
    }

    /// Checks every structural property a synthesized scheme must have.
    pub fn check_invariants(&self, inst: &Instance) -> Result<()> {
        let src = &inst.source;
        let d = src.dim();
        let bad = |msg: String| Err(Error::SchemeInvariant(msg));
        if self.ctx.q() != src.q() {
            return Err(Error::FieldMismatch);
        }
        if self.f.rows() != d || self.f.cols() + self.s != d {
            return bad(format!("F is {}x{}, expected {d}x{}", self.f.rows(), self.f.cols(), d - self.s));
        }
        if self.f.rank() != d - self.s {
            return bad(format!("rank F = {}, expected {}", self.f.rank(), d - self.s));
        }
        for c in 0..self.f.cols() {
            let view = src.node_view(self.owners[c]);
            if self.f.column_support(c).iter().any(|r| !view.coords.contains(r)) {
                return bad(format!("column {c} uses coordinates node {} does not observe", self.owners[c]));
            }
        }
        for a in &self.a {
            if a.matrix.inverse().is_err() {
                return bad(format!("A at node {} for edge {} is singular", a.node, a.edge_id));
            }
        }
        if let Some(cert) = &self.certificate {
            if cert.rows() != self.s || cert.rank() != self.s {
                return bad("certificate does not have rank s".into());
            }
            if !cert.mul(&self.f)?.is_zero() {
                return bad("S * F != 0".into());
            }
            if !cert.mul(&inst.wiretapper.lifted(&self.ctx)?)?.is_zero() {
                return bad("S * W != 0".into());
            }
        }
        if self.key.symbols() != self.s || self.f.hcat(&self.key.matrix)?.rank() != d {
            return bad("[F | M_K] is not invertible".into());
        }
        Ok(())
    }
}

/// Smallest `n` with `q^n > s * |E|`.
pub fn choose_extension_degree(source: &TreePinSource) -> usize {
    let bound = (source.min_multiplicity() * source.edge_count()) as u128;
    let q = source.q() as u128;
    let mut n = 1;
    let mut order = q;
    while order <= bound {
        order *= q;
        n += 1;
    }
    n
}

/// Lowest-numbered leaf.
pub fn default_root(source: &TreePinSource) -> usize {
    source.leaves()[0]
}

/// Parent edge (edge-list position) of every vertex, and a BFS order from
/// the root.
struct Rooting {
    parent_edge: Vec<Option<usize>>,
    order: Vec<usize>,
}

fn root_tree(source: &TreePinSource, root: usize) -> Rooting {
    let mut parent_edge = vec![None; source.vertex_count()];
    let mut seen = vec![false; source.vertex_count()];
    let mut order = Vec::with_capacity(source.vertex_count());
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for idx in source.incident(v) {
            let w = source.edges()[idx].other(v);
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some(idx);
                queue.push_back(w);
            }
        }
    }
    Rooting { parent_edge, order }
}

/// Splits a certificate into `(S_e, T_e)` per edge.
fn edge_blocks(source: &TreePinSource, s: usize, cert: &FMatrix, idx: usize) -> (FMatrix, FMatrix) {
    let r = source.range(idx);
    (cert.col_range(r.start..r.start + s), cert.col_range(r.start + s..r.end))
}

/// Assembles the scheme determined by `cert` and re-checks every invariant.
/// Fails with [`Error::Singular`] if some `S_e` is not invertible.
pub fn scheme_from_certificate(inst: &Instance, ctx: &ExtFieldCtx, root: usize, cert: FMatrix) -> Result<CommScheme> {
    let src = &inst.source;
    let d = src.dim();
    let s = src.min_multiplicity();
    if cert.rows() != s || cert.cols() != d || cert.ctx() != ctx {
        return Err(Error::Shape(format!("certificate must be {s}x{d} over the scheme field")));
    }
    if src.degree(root) != 1 {
        return Err(Error::InvalidArgument(format!("root {root} is not a leaf")));
    }
    let blocks: Vec<(FMatrix, FMatrix)> = (0..src.edge_count()).map(|i| edge_blocks(src, s, &cert, i)).collect();
    let inverses = blocks.iter().map(|(se, _)| se.inverse()).collect::<Result<Vec<_>>>()?;

    let rooting = root_tree(src, root);
    let mut columns: Vec<Vec<FieldElem>> = Vec::new();
    let mut owners = Vec::new();
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();

    // first part: one s-wide block per (internal node, child edge)
    for &i in &rooting.order {
        let Some(up) = rooting.parent_edge[i] else { continue };
        for e in src.incident(i).into_iter().filter(|&e| e != up) {
            let a = inverses[e].mul(&blocks[up].0)?.neg();
            let (ur, er) = (src.range(up).start, src.range(e).start);
            for k in 0..s {
                let mut col = vec![ctx.zero(); d];
                col[ur + k] = ctx.one();
                for r in 0..s {
                    col[er + r] = a.get(r, k);
                }
                columns.push(col);
                owners.push(i);
            }
            a_blocks.push(ABlock { node: i, edge_id: src.edges()[e].id, matrix: a });
        }
    }
    // second part: each non-root node reveals the tail of its parent edge
    for &i in &rooting.order {
        let Some(up) = rooting.parent_edge[i] else { continue };
        let range = src.range(up);
        let tail = range.len() - s;
        if tail == 0 {
            continue;
        }
        let b = inverses[up].mul(&blocks[up].1)?.neg();
        for k in 0..tail {
            let mut col = vec![ctx.zero(); d];
            for r in 0..s {
                col[range.start + r] = b.get(r, k);
            }
            col[range.start + s + k] = ctx.one();
            columns.push(col);
            owners.push(i);
        }
        b_blocks.push(BBlock { node: i, edge_id: src.edges()[up].id, matrix: b });
    }

    let mut f = FMatrix::zeros(ctx, d, columns.len());
    for (c, col) in columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            f.set(r, c, v);
        }
    }
    let key = extract_key(&f);
    let scheme =
        CommScheme { ctx: ctx.clone(), root, s, a: a_blocks, b: b_blocks, f, owners, certificate: Some(cert), key };
    scheme.check_invariants(inst)?;
    Ok(scheme)
}

/// Draws certificates `S = C * N` with `C` uniform and `N` a basis of the
/// left nullspace of `lift(W)`.
pub struct CertificateSampler {
    ctx: ExtFieldCtx,
    nullspace: FMatrix,
    s: usize,
}

impl CertificateSampler {
    pub fn new(inst: &Instance, ctx: &ExtFieldCtx) -> Result<Self> {
        let s = inst.source.min_multiplicity();
        let nullspace = inst.wiretapper.lifted(ctx)?.left_nullspace_basis();
        if nullspace.rows() < s {
            return Err(Error::Reducible);
        }
        Ok(CertificateSampler { ctx: ctx.clone(), nullspace, s })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FMatrix {
        let c = FMatrix::random(&self.ctx, self.s, self.nullspace.rows(), rng);
        c.mul(&self.nullspace).expect("shapes agree")
    }
}

/// True iff every edge block `S_e` of `cert` is invertible.
pub fn edge_blocks_invertible(source: &TreePinSource, cert: &FMatrix) -> bool {
    let s = source.min_multiplicity();
    (0..source.edge_count()).all(|i| !edge_blocks(source, s, cert, i).0.det().map_or(true, |d| d.is_zero()))
}

/// Randomized construction for any irreducible instance.
pub fn synth_random(inst: &Instance, seed: u64, max_attempts: usize) -> Result<CommScheme> {
    if !is_irreducible(inst) {
        return Err(Error::Reducible);
    }
    let ctx = make_ext_field(inst.source.q(), choose_extension_degree(&inst.source))?;
    let root = default_root(&inst.source);
    let sampler = CertificateSampler::new(inst, &ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let cert = sampler.sample(&mut rng);
        if edge_blocks_invertible(&inst.source, &cert) {
            return scheme_from_certificate(inst, &ctx, root, cert);
        }
    }
    Err(Error::AttemptsExhausted(max_attempts))
}

/// Deterministic construction for unit multiplicities over `F_{q^k}`,
/// `k = |E| - n_w`. Writing `col(W)` in reduced form with pivot coordinates
/// `p_i` and free coordinates `f_j`, the certificate is `S[f_j] = x^j` and
/// `S[p_i] = -sum_j a_ij x^j`, which is nonzero whenever the instance is
/// irreducible.
pub fn synth_explicit_unit(inst: &Instance) -> Result<CommScheme> {
    let src = &inst.source;
    if src.edges().iter().any(|e| e.multiplicity != 1) {
        return Err(Error::Precondition("explicit construction needs every n_e = 1; use the random method".into()));
    }
    if !is_irreducible(inst) {
        return Err(Error::Reducible);
    }
    let n_w = inst.n_w();
    let d = src.dim();
    if n_w == 0 || n_w >= d {
        return Err(Error::Precondition(format!(
            "explicit construction needs 1 <= n_w < |E| (n_w = {n_w}, |E| = {d}); use the random method"
        )));
    }
    let k = d - n_w;
    let ctx = make_ext_field(src.q(), k)?;
    let ech = inst.wiretapper.matrix().transpose().rref();
    let free: Vec<usize> = (0..d).filter(|c| !ech.pivots.contains(c)).collect();
    let basis: Vec<FieldElem> = (0..k).map(|j| ctx.pow(ctx.x(), j as u64)).collect();

    let mut cert = FMatrix::zeros(&ctx, 1, d);
    for (j, &c) in free.iter().enumerate() {
        cert.set(0, c, basis[j]);
    }
    for (i, &p) in ech.pivots.iter().enumerate() {
        let mut acc = ctx.zero();
        for (j, &c) in free.iter().enumerate() {
            let a = ctx.embed_base(src.field().as_base(ech.reduced.get(i, c)).expect("base field entry"))?;
            acc = ctx.add(acc, ctx.mul(a, basis[j]));
        }
        if acc.is_zero() {
            return Err(Error::SchemeInvariant(format!("certificate entry {p} vanished")));
        }
        cert.set(0, p, ctx.neg(acc));
    }
    scheme_from_certificate(inst, &ctx, default_root(src), cert)
}

/// Greedy completion: standard basis columns, in ascending coordinate order,
/// that raise the rank of `[F | M_K]` until it reaches `D`.
pub fn extract_key(f: &FMatrix) -> KeyExtractor {
    let ctx = f.ctx();
    let d = f.rows();
    let mut acc = f.clone();
    let mut rank = acc.rank();
    let mut picked = Vec::new();
    for c in 0..d {
        if rank == d {
            break;
        }
        let mut e = FMatrix::zeros(ctx, d, 1);
        e.set(c, 0, ctx.one());
        let trial = acc.hcat(&e).expect("same row count");
        let r = trial.rank();
        if r > rank {
            acc = trial;
            rank = r;
            picked.push(c);
        }
    }
    KeyExtractor { matrix: crate::model::selector(ctx, d, &picked) }
}

fn write_matrix(out: &mut String, header: &str, m: &FMatrix) {
    writeln!(out, "{header} rows={} cols={}", m.rows(), m.cols()).unwrap();
    if m.cols() == 0 {
        return;
    }
    for r in 0..m.rows() {
        let cells: Vec<String> = m.row(r).iter().map(|&e| m.ctx().format_elem(e)).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
}

pub fn save_scheme(scheme: &CommScheme) -> String {
    let ctx = &scheme.ctx;
    let mut out = String::new();
    writeln!(out, "treepin-scheme q={} n={}", ctx.q(), ctx.degree()).unwrap();
    let modulus: Vec<String> = ctx.modulus().iter().map(u64::to_string).collect();
    writeln!(out, "modulus {}", modulus.join(" ")).unwrap();
    writeln!(out, "root {}", scheme.root).unwrap();
    writeln!(out, "s {}", scheme.s).unwrap();
    for a in &scheme.a {
        write_matrix(&mut out, &format!("a node={} edge={}", a.node, a.edge_id), &a.matrix);
    }
    for b in &scheme.b {
        write_matrix(&mut out, &format!("b node={} edge={}", b.node, b.edge_id), &b.matrix);
    }
    write_matrix(&mut out, "f", &scheme.f);
    let owners: Vec<String> = scheme.owners.iter().map(usize::to_string).collect();
    writeln!(out, "owners {}", owners.join(" ")).unwrap();
    if let Some(cert) = &scheme.certificate {
        write_matrix(&mut out, "certificate", cert);
    }
    write_matrix(&mut out, "key", &scheme.key.matrix);
    out
}

struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        Lines { inner: Box::new(inner) }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next()
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Value of `key=value` among whitespace-separated tokens.
fn attr<T: std::str::FromStr>(tokens: &[&str], key: &str, line: usize) -> Result<T> {
    let prefix = format!("{key}=");
    tokens
        .iter()
        .find_map(|t| t.strip_prefix(prefix.as_str()))
        .ok_or_else(|| perr(line, format!("missing `{key}=`")))?
        .parse()
        .map_err(|_| perr(line, format!("bad value for `{key}`")))
}

fn read_matrix(lines: &mut Lines<'_>, ctx: &ExtFieldCtx, tokens: &[&str], line: usize) -> Result<FMatrix> {
    let rows: usize = attr(tokens, "rows", line)?;
    let cols: usize = attr(tokens, "cols", line)?;
    let mut m = FMatrix::zeros(ctx, rows, cols);
    if cols == 0 {
        return Ok(m);
    }
    for r in 0..rows {
        let (ln, l) = lines.next().ok_or_else(|| perr(line, "matrix ended early"))?;
        let cells: Vec<&str> = l.split_whitespace().collect();
        if cells.len() != cols {
            return Err(perr(ln, format!("expected {cols} entries, found {}", cells.len())));
        }
        for (c, cell) in cells.iter().enumerate() {
            let v = ctx.parse_elem(cell).map_err(|e| perr(ln, e.to_string()))?;
            m.set(r, c, v);
        }
    }
    Ok(m)
}

/// Parses a scheme. Only the header, `root`, `f` and `owners` are required;
/// a missing key is recomputed, a missing modulus takes the default one.
pub fn load_scheme(text: &str) -> Result<CommScheme> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty scheme"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"treepin-scheme") {
        return Err(perr(ln, "expected `treepin-scheme q=<q> n=<n>`"));
    }
    let q: u64 = attr(&tokens, "q", ln)?;
    let n: usize = attr(&tokens, "n", ln)?;
    let mut ctx = make_ext_field(q, n)?;
    let mut root = None;
    let mut s = None;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut f = None;
    let mut owners = None;
    let mut certificate = None;
    let mut key = None;
    while let Some((ln, l)) = lines.next() {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| perr(ln, format!("bad integer `{t}`")));
        match tokens[0] {
            "modulus" => {
                let coeffs = tokens[1..]
                    .iter()
                    .map(|t| t.parse::<u64>().map_err(|_| perr(ln, format!("bad coefficient `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                if coeffs.len() != n + 1 {
                    return Err(perr(ln, format!("modulus must have degree {n}")));
                }
                ctx = ExtFieldCtx::with_modulus(q, coeffs)?;
            }
            "root" if tokens.len() == 2 => root = Some(num(tokens[1])?),
            "s" if tokens.len() == 2 => s = Some(num(tokens[1])?),
            "a" | "b" => {
                let node: usize = attr(&tokens, "node", ln)?;
                let edge_id: u32 = attr(&tokens, "edge", ln)?;
                let matrix = read_matrix(&mut lines, &ctx, &tokens, ln)?;
                if tokens[0] == "a" {
                    a.push(ABlock { node, edge_id, matrix });
                } else {
                    b.push(BBlock { node, edge_id, matrix });
                }
            }
            "f" => f = Some(read_matrix(&mut lines, &ctx, &tokens, ln)?),
            "owners" => owners = Some(tokens[1..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?),
            "certificate" => certificate = Some(read_matrix(&mut lines, &ctx, &tokens, ln)?),
            "key" => key = Some(read_matrix(&mut lines, &ctx, &tokens, ln)?),
            _ => return Err(perr(ln, format!("unexpected line `{l}`"))),
        }
    }
    let f = f.ok_or_else(|| perr(0, "missing `f` block"))?;
    let root = root.ok_or_else(|| perr(0, "missing `root`"))?;
    let owners = owners.unwrap_or_default();
    let mut scheme = CommScheme::from_matrix(&ctx, root, f, owners)?;
    if let Some(m) = key {
        if m.rows() != scheme.dim() {
            return Err(Error::Shape(format!("key has {} rows, F has {}", m.rows(), scheme.dim())));
        }
        scheme.key = KeyExtractor { matrix: m };
    }
    scheme.s = s.unwrap_or(scheme.key.symbols());
    scheme.a = a;
    scheme.b = b;
    scheme.certificate = certificate;
    Ok(scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{parity_path, shared_parity_path};
    use crate::model::{load_instance, random_instance, Edge, Wiretapper};

    fn star(q: u64) -> Instance {
        let edges = (0..3).map(|i| Edge { id: i, u: 0, v: i as usize + 1, multiplicity: 1 }).collect();
        let src = TreePinSource::new(q, 4, edges).unwrap();
        let w = Wiretapper::none(&src);
        Instance::new(src, w).unwrap()
    }

    #[test]
    fn extension_degree_examples() {
        let path = parity_path();
        assert_eq!(choose_extension_degree(&path.source), 2);
        let four = TreePinSource::new(
            5,
            5,
            (0..4).map(|i| Edge { id: i, u: i as usize, v: i as usize + 1, multiplicity: 1 }).collect(),
        )
        .unwrap();
        assert_eq!(choose_extension_degree(&four), 1);
        let eight = TreePinSource::new(
            2,
            9,
            (0..8).map(|i| Edge { id: i, u: i as usize, v: i as usize + 1, multiplicity: 2 }).collect(),
        )
        .unwrap();
        assert_eq!(choose_extension_degree(&eight), 5);
    }

    #[test]
    fn random_scheme_on_the_parity_path() {
        let inst = parity_path();
        for seed in 0..20 {
            let sch = synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
            assert_eq!(sch.n(), 2);
            assert_eq!(sch.f.rank(), 2);
            assert_eq!(sch.columns_of(1).len(), 1);
            assert_eq!(sch.columns_of(2).len(), 1);
            assert!(sch.columns_of(0).is_empty() && sch.columns_of(3).is_empty());
            let w = inst.wiretapper.lifted(&sch.ctx).unwrap();
            assert!(sch.certificate.as_ref().unwrap().mul(&w).unwrap().is_zero());
            assert_eq!(sch.key.symbols(), 1);
        }
    }

    #[test]
    fn star_without_wiretapper() {
        let inst = star(2);
        let sch = synth_random(&inst, 5, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert_eq!((sch.f.rows(), sch.f.cols()), (3, 2));
        assert_eq!(sch.columns_of(0).len(), 2);
        assert_eq!(sch.root, 1);
    }

    #[test]
    fn explicit_parity_path_certificate() {
        let inst = parity_path();
        let sch = synth_explicit_unit(&inst).unwrap();
        let ctx = &sch.ctx;
        assert_eq!(sch.n(), 2);
        let x = ctx.x();
        let expect = vec![ctx.add(ctx.one(), x), ctx.one(), x];
        assert_eq!(sch.certificate.as_ref().unwrap().row(0), expect.as_slice());
        assert_eq!(synth_explicit_unit(&inst).unwrap(), sch);
    }

    #[test]
    fn explicit_preconditions() {
        let full = "treepin q=2\nvertices 3\nedge 0 0 1 1\nedge 1 1 2 1\nwiretap cols=2\n1 0\n0 1\n";
        assert!(synth_explicit_unit(&load_instance(full).unwrap()).is_err());
        assert!(matches!(synth_explicit_unit(&star(3)).unwrap_err(), Error::Precondition(_)));
        assert_eq!(
            synth_explicit_unit(&shared_parity_path()).unwrap_err(),
            Error::Precondition("explicit construction needs every n_e = 1; use the random method".into())
        );
        assert_eq!(synth_random(&shared_parity_path(), 0, 8).unwrap_err(), Error::Reducible);
    }

    #[test]
    fn explicit_on_random_paths() {
        let mut done = 0;
        for seed in 0..200u64 {
            let src = TreePinSource::new(
                2,
                5,
                (0..4).map(|i| Edge { id: i, u: i as usize, v: i as usize + 1, multiplicity: 1 }).collect(),
            )
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = FMatrix::random(src.field(), 4, 2, &mut rng);
            let Ok(wt) = Wiretapper::new(w) else { continue };
            let inst = Instance::new(src, wt).unwrap();
            if !is_irreducible(&inst) {
                continue;
            }
            let sch = synth_explicit_unit(&inst).unwrap();
            assert_eq!(sch.n(), 2);
            assert!(sch.certificate.as_ref().unwrap().row(0).iter().all(|e| !e.is_zero()));
            done += 1;
        }
        assert!(done > 10);
    }

    #[test]
    fn random_instances_satisfy_invariants() {
        for seed in 0..150u64 {
            let q = [2, 3, 5][seed as usize % 3];
            let Ok(inst) = random_instance(seed, 2 + seed as usize % 5, 3, q, seed as usize % 3) else { continue };
            if !is_irreducible(&inst) {
                continue;
            }
            let sch = synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
            sch.check_invariants(&inst).unwrap();
            let d = inst.source.dim();
            assert_eq!(sch.f.hcat(&sch.key.matrix).unwrap().rank() - sch.f.rank(), sch.s);
            assert_eq!(sch.f.cols(), d - inst.source.min_multiplicity());
        }
    }

    #[test]
    fn round_trip() {
        for seed in 0..40u64 {
            let Ok(inst) = random_instance(seed, 3 + seed as usize % 4, 3, [2, 3][seed as usize % 2], 1) else {
                continue;
            };
            if !is_irreducible(&inst) {
                continue;
            }
            let sch = synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
            let text = save_scheme(&sch);
            assert_eq!(load_scheme(&text).unwrap(), sch, "{text}");
        }
        let empty = synth_random(
            &Instance::new(
                TreePinSource::new(2, 2, vec![Edge { id: 0, u: 0, v: 1, multiplicity: 2 }]).unwrap(),
                Wiretapper::new(FMatrix::zeros(&make_ext_field(2, 1).unwrap(), 2, 0)).unwrap(),
            )
            .unwrap(),
            0,
            4,
        )
        .unwrap();
        assert_eq!(empty.f.cols(), 0);
        assert_eq!(load_scheme(&save_scheme(&empty)).unwrap(), empty);
    }

    #[test]
    fn hand_written_scheme_loads() {
        let text = "treepin-scheme q=2 n=2\nroot 0\nf rows=3 cols=2\n1 0\n0:1 1:1\n0 1\nowners 1 2\n";
        let sch = load_scheme(text).unwrap();
        assert_eq!(sch.ctx.modulus(), &[1, 1, 1]);
        assert_eq!(sch.key.symbols(), 1);
        assert_eq!(sch.s, 1);
        assert!(matches!(
            load_scheme("treepin-scheme q=2 n=2\nroot 0\nf rows=1 cols=1\n0:2\nowners 0\n").unwrap_err(),
            Error::Parse { line: 4, .. }
        ));
        assert!(load_scheme("treepin-scheme q=2 n=2\nf rows=1 cols=1\n1\nowners 0 1\n").is_err());
    }

    #[test]
    fn singular_blocks_are_rejected() {
        let inst = parity_path();
        let ctx = make_ext_field(2, 2).unwrap();
        let cert = FMatrix::from_elems(&ctx, 1, 3, vec![ctx.one(), ctx.one(), ctx.zero()]).unwrap();
        assert!(!edge_blocks_invertible(&inst.source, &cert));
        assert_eq!(scheme_from_certificate(&inst, &ctx, 0, cert).unwrap_err(), Error::Singular);
    }
}
