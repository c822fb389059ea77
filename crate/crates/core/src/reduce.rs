//! Irreducibility and the reduction that strips, edge by edge, the part of
//! each edge's observation that the wiretapper already knows.

use crate::error::{Error, Result};
use crate::falinalg::FMatrix;
use crate::mcf::{edge_mcf_dims, mcf_edge_wiretap};
use crate::model::{Instance, Wiretapper};
use crate::report::Report;

/// One application of the reduction to a single edge.
#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub edge_id: u32,
    /// Dimension removed from the edge and from the wiretapper.
    pub ell: usize,
    /// `n_e x l`: the common function restricted to the edge block.
    pub me: FMatrix,
    /// `n_e x (n_e - l)` completion making `[me | ne]` invertible.
    pub ne: FMatrix,
    pub new_multiplicity: usize,
    pub new_wiretapper: FMatrix,
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub original: Instance,
    pub reduced: Instance,
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn removed(&self) -> usize {
        self.steps.iter().map(|s| s.ell).sum()
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("steps", self.steps.len());
        r.push("removed_dim", self.removed());
        for (i, s) in self.steps.iter().enumerate() {
            r.push(format!("step.{i}.edge"), s.edge_id);
            r.push(format!("step.{i}.ell"), s.ell);
            r.push(format!("step.{i}.new_multiplicity"), s.new_multiplicity);
        }
        r.push("original_d", self.original.source.dim());
        r.push("original_nw", self.original.n_w());
        r.push("d", self.reduced.source.dim());
        r.push("nw", self.reduced.n_w());
        r
    }
}

/// True iff no edge shares a non-constant function with the wiretapper,
/// i.e. `col(W)` contains no nonzero vector supported on one edge block.
pub fn is_irreducible(inst: &Instance) -> bool {
    edge_mcf_dims(inst).iter().all(|&l| l == 0)
}

/// Greedy completion: append standard basis columns, in index order, that
/// increase the rank of `[me | picked]` until it is square.
fn complete_basis(me: &FMatrix) -> FMatrix {
    let f = me.ctx();
    let n = me.rows();
    let mut acc = me.clone();
    let mut picked = Vec::new();
    for c in 0..n {
        if acc.cols() == n {
            break;
        }
        let mut e = FMatrix::zeros(f, n, 1);
        e.set(c, 0, f.one());
        let trial = acc.hcat(&e).expect("same row count");
        if trial.rank() > acc.rank() {
            acc = trial;
            picked.push(c);
        }
    }
    crate::model::selector(f, n, &picked)
}

pub fn reduce_once(inst: &Instance, edge_id: u32) -> Result<(Instance, ReductionStep)> {
    let src = &inst.source;
    let idx = src.edge_index(edge_id)?;
    let mcf = mcf_edge_wiretap(inst, edge_id)?;
    let ell = mcf.dim();
    if ell == 0 {
        return Err(Error::EdgeAlreadyReduced(edge_id));
    }
    let range = src.range(idx);
    let n_e = range.len();
    if ell == n_e {
        return Err(Error::EdgeAbsorbed(edge_id));
    }

    let me = mcf.basis.row_range(range.clone());
    let ne = complete_basis(&me);
    let change = me.hcat(&ne)?.inverse()?;

    // W in the coordinates (G_e, Y~_e) on the edge block
    let w = inst.wiretapper.matrix();
    let d = src.dim();
    let before = w.row_range(0..range.start);
    let block = change.mul(&w.row_range(range.clone()))?;
    let after = w.row_range(range.end..d);
    let transformed = before.vcat(&block)?.vcat(&after)?;

    // columns whose G_e rows vanish; the G_e rows have rank l since col(W)
    // contains the standard vectors of those rows after the change of basis
    let g_rows: Vec<usize> = (range.start..range.start + ell).collect();
    let kernel = transformed.select_rows(&g_rows).right_nullspace_basis();
    let cleared = transformed.mul(&kernel)?;
    let keep: Vec<usize> = (0..d).filter(|r| !g_rows.contains(r)).collect();
    let new_w = cleared.select_rows(&keep);

    let new_source = src.with_multiplicity(idx, n_e - ell)?;
    let reduced = Instance::new(new_source, Wiretapper::new(new_w.clone())?)?;
    debug_assert_eq!(reduced.n_w() + ell, inst.n_w());
    Ok((reduced, ReductionStep { edge_id, ell, me, ne, new_multiplicity: n_e - ell, new_wiretapper: new_w }))
}

/// Reduces until irreducible, scanning edges by ascending id and restarting
/// the scan after every step.
pub fn reduce_full(inst: &Instance) -> Result<ReductionTrace> {
    let mut current = inst.clone();
    let mut steps = Vec::new();
    let mut ids: Vec<u32> = inst.source.edges().iter().map(|e| e.id).collect();
    ids.sort_unstable();
    'scan: loop {
        for &id in &ids {
            if mcf_edge_wiretap(&current, id)?.dim() > 0 {
                let (next, step) = reduce_once(&current, id)?;
                current = next;
                steps.push(step);
                continue 'scan;
            }
        }
        break;
    }
    Ok(ReductionTrace { original: inst.clone(), reduced: current, steps })
}
