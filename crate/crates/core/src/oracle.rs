//! Brute-force ground truth on tiny sources. Every quantity is obtained by
//! enumerating the uniform base vector, with probabilities held as integer
//! counts; only the final entropy is a float. Sizes beyond the cap are an
//! error rather than a reason to sample.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::falinalg::FMatrix;
use crate::gfield::{make_ext_field, ExtFieldCtx, FieldElem};
use crate::mcf::mcf_linear;
use crate::model::{selector, Instance};
use crate::report::Report;
use crate::scheme::CommScheme;
use crate::verify::{check_key_secrecy, check_perfect_omniscience, leakage_symbols};

pub const ENTROPY_LOG2_CAP: u32 = 18;
pub const MCF_LOG2_CAP: u32 = 14;

/// Number of base vectors, or an error if it exceeds `2^log2_cap`.
fn enumeration_size(ctx: &ExtFieldCtx, rows: usize, log2_cap: u32) -> Result<u64> {
    let mut points: u128 = 1;
    for _ in 0..rows {
        points *= ctx.order() as u128;
        if points > 1u128 << log2_cap {
            return Err(Error::OracleBudget { points: (ctx.order() as u128).saturating_pow(rows as u32), log2_cap });
        }
    }
    Ok(points as u64)
}

/// Calls `visit` with every vector of `ctx^len`.
fn for_each_vector(ctx: &ExtFieldCtx, len: usize, count: u64, mut visit: impl FnMut(&[FieldElem])) {
    let order = ctx.order();
    let mut x = vec![ctx.zero(); len];
    for idx in 0..count {
        let mut v = idx;
        for xi in x.iter_mut() {
            *xi = ctx.from_raw(v % order).expect("digit below order");
            v /= order;
        }
        visit(&x);
    }
}

/// Distribution of a function of the base vector, as exact counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub total: u64,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn from_map<K>(total: u64, map: HashMap<K, u64>) -> Self {
        let mut counts: Vec<u64> = map.into_values().collect();
        counts.sort_unstable();
        Histogram { total, counts }
    }

    pub fn support(&self) -> usize {
        self.counts.len()
    }

    pub fn entropy_bits(&self) -> f64 {
        let total = self.total as f64;
        self.counts
            .iter()
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.log2()
            })
            .sum()
    }

    /// `k` when the distribution is uniform on exactly `order^k` values, so
    /// that the entropy is exactly `k log2 order`.
    pub fn uniform_exponent(&self, order: u64) -> Option<usize> {
        let first = *self.counts.first()?;
        if self.counts.iter().any(|&c| c != first) {
            return None;
        }
        let mut size = 1usize;
        let mut k = 0;
        while size < self.support() {
            size = size.checked_mul(order as usize)?;
            k += 1;
        }
        (size == self.support()).then_some(k)
    }
}

/// Distribution of `X * M` for uniform `X` over `M`'s field.
pub fn entropy_exhaustive(m: &FMatrix) -> Result<Histogram> {
    entropy_exhaustive_capped(m, ENTROPY_LOG2_CAP)
}

pub fn entropy_exhaustive_capped(m: &FMatrix, log2_cap: u32) -> Result<Histogram> {
    let ctx = m.ctx();
    let count = enumeration_size(ctx, m.rows(), log2_cap)?;
    let mut map: HashMap<Vec<FieldElem>, u64> = HashMap::new();
    for_each_vector(ctx, m.rows(), count, |x| {
        *map.entry(m.left_apply(x).expect("length matches")).or_default() += 1;
    });
    Ok(Histogram::from_map(count, map))
}

/// Gács–Körner common part of `X * M1` and `X * M2`: connected components of
/// the bipartite graph joining values that occur together.
#[derive(Clone, Debug)]
pub struct McfOracle {
    /// Component label of each value of `X * M1`.
    pub labels1: HashMap<Vec<FieldElem>, usize>,
    pub labels2: HashMap<Vec<FieldElem>, usize>,
    pub label_distribution: Histogram,
}

impl McfOracle {
    pub fn entropy_bits(&self) -> f64 {
        self.label_distribution.entropy_bits()
    }
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

pub fn mcf_exhaustive(m1: &FMatrix, m2: &FMatrix) -> Result<McfOracle> {
    mcf_exhaustive_capped(m1, m2, MCF_LOG2_CAP)
}

pub fn mcf_exhaustive_capped(m1: &FMatrix, m2: &FMatrix, log2_cap: u32) -> Result<McfOracle> {
    if m1.rows() != m2.rows() || m1.ctx() != m2.ctx() {
        return Err(Error::Shape("functionals of different base vectors".into()));
    }
    let ctx = m1.ctx();
    let count = enumeration_size(ctx, m1.rows(), log2_cap)?;
    let mut ids1: HashMap<Vec<FieldElem>, usize> = HashMap::new();
    let mut ids2: HashMap<Vec<FieldElem>, usize> = HashMap::new();
    let mut pairs = Vec::with_capacity(count as usize);
    for_each_vector(ctx, m1.rows(), count, |x| {
        let a = m1.left_apply(x).expect("length matches");
        let b = m2.left_apply(x).expect("length matches");
        let n1 = ids1.len();
        let i = *ids1.entry(a).or_insert(n1);
        let n2 = ids2.len();
        let j = *ids2.entry(b).or_insert(n2);
        pairs.push((i, j));
    });
    // nodes 0..|ids1| are values of X*M1, the rest values of X*M2
    let offset = ids1.len();
    let mut parent: Vec<usize> = (0..offset + ids2.len()).collect();
    for &(i, j) in &pairs {
        let (a, b) = (find(&mut parent, i), find(&mut parent, offset + j));
        if a != b {
            parent[a] = b;
        }
    }
    let mut label_of_root: HashMap<usize, usize> = HashMap::new();
    let mut label = |parent: &mut Vec<usize>, node: usize| {
        let root = find(parent, node);
        let next = label_of_root.len();
        *label_of_root.entry(root).or_insert(next)
    };
    let labels1 = ids1.into_iter().map(|(k, i)| (k, label(&mut parent, i))).collect::<HashMap<_, _>>();
    let labels2 = ids2.into_iter().map(|(k, j)| (k, label(&mut parent, offset + j))).collect::<HashMap<_, _>>();
    let mut dist: HashMap<usize, u64> = HashMap::new();
    for &(i, _) in &pairs {
        *dist.entry(find(&mut parent, i)).or_default() += 1;
    }
    Ok(McfOracle { labels1, labels2, label_distribution: Histogram::from_map(count, dist) })
}

/// The four joint distributions behind `I(X*A ; X*B | X*C)
/// = H(A,C) + H(B,C) - H(A,B,C) - H(C)`.
#[derive(Clone, Debug)]
pub struct CondMutualInfo {
    pub ac: Histogram,
    pub bc: Histogram,
    pub abc: Histogram,
    pub c: Histogram,
}

impl CondMutualInfo {
    pub fn bits(&self) -> f64 {
        self.ac.entropy_bits() + self.bc.entropy_bits() - self.abc.entropy_bits() - self.c.entropy_bits()
    }

    /// The information in symbols of a field of size `order`, when all four
    /// distributions are uniform on powers of `order`.
    pub fn symbols(&self, order: u64) -> Option<usize> {
        let e = |h: &Histogram| h.uniform_exponent(order);
        (e(&self.ac)? + e(&self.bc)?).checked_sub(e(&self.abc)? + e(&self.c)?)
    }
}

pub fn cond_mutual_info_exhaustive(ma: &FMatrix, mb: &FMatrix, mc: &FMatrix) -> Result<CondMutualInfo> {
    let ac = ma.hcat(mc)?;
    let bc = mb.hcat(mc)?;
    let abc = ma.hcat(&bc)?;
    Ok(CondMutualInfo {
        ac: entropy_exhaustive(&ac)?,
        bc: entropy_exhaustive(&bc)?,
        abc: entropy_exhaustive(&abc)?,
        c: entropy_exhaustive(mc)?,
    })
}

/// Rank formula for the same quantity, in symbols.
pub fn cond_mutual_info_rank(ma: &FMatrix, mb: &FMatrix, mc: &FMatrix) -> Result<usize> {
    let r = |m: &FMatrix| m.rank();
    Ok(r(&ma.hcat(mc)?) + r(&mb.hcat(mc)?) - r(&ma.hcat(mb)?.hcat(mc)?) - r(mc))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub trials: usize,
    /// Trials on which the special case of interest occurred (a vanishing
    /// determinant, a degenerate triple).
    pub special: usize,
    pub counterexamples: usize,
}

impl PropertyOutcome {
    pub fn holds(&self) -> bool {
        self.counterexamples == 0
    }
}

/// For `M = X * A` with `X` an `s x m` matrix of indeterminates and `A` an
/// `m x s` matrix over `F_q`: `det M` vanishes identically iff `A * l = 0`
/// for some nonzero `l` in `F_q^s`.
///
/// Each indeterminate appears in one row of `M`, so `det M` has degree at
/// most one in every variable; such a polynomial is zero iff it vanishes at
/// every point of `F_q^(s m)`, which is what gets enumerated.
pub fn detform_holds(a: &FMatrix, s: usize) -> Result<bool> {
    Ok(det_vanishes_identically(a, s)? == has_kernel_vector(a, s)?)
}

pub fn det_vanishes_identically(a: &FMatrix, s: usize) -> Result<bool> {
    let ctx = a.ctx();
    let m = a.rows();
    if a.cols() != s {
        return Err(Error::Shape(format!("A must be m x {s}")));
    }
    let count = enumeration_size(ctx, s * m, ENTROPY_LOG2_CAP)?;
    let mut vanishes = true;
    for_each_vector(ctx, s * m, count, |x| {
        if vanishes {
            let xm = FMatrix::from_elems(ctx, s, m, x.to_vec()).expect("s*m entries");
            if !xm.mul(a).expect("shapes agree").det().expect("square").is_zero() {
                vanishes = false;
            }
        }
    });
    Ok(vanishes)
}

pub fn has_kernel_vector(a: &FMatrix, s: usize) -> Result<bool> {
    let ctx = a.ctx();
    let count = enumeration_size(ctx, s, ENTROPY_LOG2_CAP)?;
    let mut found = false;
    for_each_vector(ctx, s, count, |l| {
        if !found && l.iter().any(|e| !e.is_zero()) {
            let col = FMatrix::column_vector(ctx, l.to_vec()).expect("column");
            found = a.mul(&col).expect("shapes agree").is_zero();
        }
    });
    Ok(found)
}

pub fn detform_property_check(q: u64, s: usize, m: usize, trials: usize, seed: u64) -> Result<PropertyOutcome> {
    let ctx = make_ext_field(q, 1)?;
    enumeration_size(&ctx, s * m, ENTROPY_LOG2_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome { trials, ..Default::default() };
    for _ in 0..trials {
        let mut a = FMatrix::random(&ctx, m, s, &mut rng);
        // bias half the trials toward dependent columns so both sides occur
        if s >= 2 && rng.gen_bool(0.5) {
            let c: FMatrix = a.col_range(0..1).scale(ctx.random(&mut rng));
            for r in 0..m {
                a.set(r, s - 1, c.get(r, 0));
            }
        }
        let vanishes = det_vanishes_identically(&a, s)?;
        out.special += usize::from(vanishes);
        if vanishes != has_kernel_vector(&a, s)? {
            out.counterexamples += 1;
        }
    }
    Ok(out)
}

/// Sizes of the random triples: `(X, Y)` are functions of the first
/// `base_xy` coordinates, `Z` of the next `base_z`.
#[derive(Clone, Copy, Debug)]
pub struct TripleDims {
    pub base_xy: usize,
    pub base_z: usize,
    pub max_cols: usize,
}

/// For `(X, Y)` independent of `Z`, checks
/// `mcf(X, (Y, Z)) = mcf(X, Y)` and `mcf((X, Z), (Y, Z)) = mcf(X, Y) + H(Z)`
/// by exhaustive m.c.f. computations.
pub fn lemma2_property_check(q: u64, dims: TripleDims, trials: usize, seed: u64) -> Result<PropertyOutcome> {
    let ctx = make_ext_field(q, 1)?;
    let d = dims.base_xy + dims.base_z;
    enumeration_size(&ctx, d, MCF_LOG2_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome { trials, ..Default::default() };
    let embed = |m: &FMatrix, top: bool| -> FMatrix {
        let zeros = FMatrix::zeros(&ctx, if top { dims.base_z } else { dims.base_xy }, m.cols());
        if top {
            m.vcat(&zeros).expect("same width")
        } else {
            zeros.vcat(m).expect("same width")
        }
    };
    for _ in 0..trials {
        let mut cols = || rng.gen_range(1..=dims.max_cols);
        let (cx, cy, cz) = (cols(), cols(), cols());
        let mx = embed(&FMatrix::random(&ctx, dims.base_xy, cx, &mut rng), true);
        let mut my = embed(&FMatrix::random(&ctx, dims.base_xy, cy, &mut rng), true);
        if rng.gen_bool(0.3) {
            my = mx.clone();
        }
        let mut mz = embed(&FMatrix::random(&ctx, dims.base_z, cz, &mut rng), false);
        if rng.gen_bool(0.2) {
            mz = FMatrix::zeros(&ctx, d, cz);
        }
        let base = mcf_exhaustive(&mx, &my)?.label_distribution;
        let left = mcf_exhaustive(&mx, &my.hcat(&mz)?)?.label_distribution;
        let both = mcf_exhaustive(&mx.hcat(&mz)?, &my.hcat(&mz)?)?.label_distribution;
        let hz = entropy_exhaustive(&mz)?;
        out.special += usize::from(hz.support() == 1);
        let first = left.support() == base.support() && left.uniform_exponent(q) == base.uniform_exponent(q);
        let second = both.support() == base.support() * hz.support()
            && both.uniform_exponent(q).is_some()
            && base.uniform_exponent(q).is_some();
        if !(first && second) {
            out.counterexamples += 1;
        }
    }
    Ok(out)
}

/// Compares every rank-based quantity of an instance (and optionally a
/// scheme for it) with enumeration. `agree` is false on any mismatch.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub report: Report,
    pub agree: bool,
}

pub fn cross_check(inst: &Instance, scheme: Option<&CommScheme>, log2_cap: u32) -> Result<CrossCheck> {
    let src = &inst.source;
    let q = src.q();
    let w = inst.wiretapper.matrix();
    let mut report = Report::new();
    let mut agree = true;
    let mut compare = |report: &mut Report, key: String, oracle: Option<usize>, rank: usize| {
        let ok = oracle == Some(rank);
        agree &= ok;
        report.push(format!("{key}.oracle"), oracle.map_or("non-uniform".to_string(), |k| k.to_string()));
        report.push(format!("{key}.rank"), rank);
    };

    let hw = entropy_exhaustive_capped(w, log2_cap)?;
    compare(&mut report, "wiretap_symbols".into(), hw.uniform_exponent(q), w.rank());
    for (i, e) in src.edges().iter().enumerate() {
        let sel = src.edge_selector(i);
        let oracle = mcf_exhaustive_capped(&sel, w, log2_cap)?;
        let lin = mcf_linear(&sel, w)?;
        compare(
            &mut report,
            format!("edge.{}.mcf_symbols", e.id),
            oracle.label_distribution.uniform_exponent(q),
            lin.dim(),
        );
    }

    if let Some(sch) = scheme {
        let ctx = &sch.ctx;
        let d = src.dim();
        let id = FMatrix::identity(ctx, d);
        let wl = inst.wiretapper.lifted(ctx)?;
        let order = ctx.order();
        let cap = |m: &FMatrix| entropy_exhaustive_capped(m, log2_cap);
        // I(Y ; F | Z_w) with Z_V equivalent to Y
        let info = CondMutualInfo {
            ac: cap(&id.hcat(&wl)?)?,
            bc: cap(&sch.f.hcat(&wl)?)?,
            abc: cap(&id.hcat(&sch.f)?.hcat(&wl)?)?,
            c: cap(&wl)?,
        };
        compare(&mut report, "leakage_symbols".into(), info.symbols(order), leakage_symbols(sch, &inst.wiretapper)?);
        let omni = check_perfect_omniscience(sch, src)?;
        for (v, &ok) in omni.iter().enumerate() {
            // H(Y | F, Z_v) = D - H(F, Z_v) in symbols
            let g = sch.f.hcat(&selector(ctx, d, &src.node_view(v).coords))?;
            let residual = cap(&g)?.uniform_exponent(order).map(|k| d - k);
            let expect = if ok { 0 } else { d - g.rank() };
            compare(&mut report, format!("node.{v}.residual_symbols"), residual, expect);
        }
        let keyed = cap(&sch.f.hcat(&wl)?.hcat(&sch.key.matrix)?)?;
        let fw = cap(&sch.f.hcat(&wl)?)?;
        let gain = keyed.uniform_exponent(order).zip(fw.uniform_exponent(order)).map(|(a, b)| a - b);
        compare(
            &mut report,
            "key_fresh_symbols".into(),
            gain,
            sch.key.symbols() * usize::from(check_key_secrecy(sch, &inst.wiretapper)?),
        );
    }
    report.push("agree", agree);
    Ok(CrossCheck { report, agree })
}
