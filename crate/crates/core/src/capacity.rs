//! Closed-form rates for tree-PIN sources with a linear wiretapper.
//!
//! Everything is held as an exact count of `F_q` symbols per realization;
//! conversion to bits (`symbols * log2 q`) happens only when reporting.

use std::fmt;

use crate::mcf::edge_mcf_dims;
use crate::model::{Instance, TreePinSource};
use crate::report::{fmt_bits, Report};

/// A rate of `symbols` elements of `F_q` per source realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate {
    pub symbols: usize,
    pub q: u64,
}

impl Rate {
    pub fn new(symbols: usize, q: u64) -> Self {
        Rate { symbols, q }
    }

    pub fn bits(self) -> f64 {
        self.symbols as f64 * (self.q as f64).log2()
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_bits(self.bits()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCapacity {
    pub edge_id: u32,
    pub multiplicity: usize,
    /// Dimension of `mcf(Y_e, Z_w)`.
    pub mcf_dim: usize,
}

impl EdgeCapacity {
    /// `H(Y_e | mcf(Y_e, Z_w))` in symbols.
    pub fn residual(&self) -> usize {
        self.multiplicity - self.mcf_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityReport {
    pub q: u64,
    pub dim: usize,
    pub n_w: usize,
    pub cs: Rate,
    pub cw: Rate,
    pub rl: Rate,
    pub rco: Rate,
    pub edges: Vec<EdgeCapacity>,
    /// Every edge attaining the minimum in the `cw` formula.
    pub argmin: Vec<u32>,
    pub irreducible: bool,
}

impl CapacityReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("q", self.q);
        r.push("d", self.dim);
        r.push("nw", self.n_w);
        r.push("cs_bits", self.cs);
        r.push("cw_bits", self.cw);
        r.push("rl_bits", self.rl);
        r.push("rco_bits", self.rco);
        r.push("cs_symbols", self.cs.symbols);
        r.push("cw_symbols", self.cw.symbols);
        r.push("rl_symbols", self.rl.symbols);
        r.push("rco_symbols", self.rco.symbols);
        for e in &self.edges {
            r.push(format!("edge.{}.n", e.edge_id), e.multiplicity);
            r.push(format!("edge.{}.mcf_dim", e.edge_id), e.mcf_dim);
        }
        let argmin: Vec<String> = self.argmin.iter().map(u32::to_string).collect();
        r.push("argmin_edges", argmin.join(","));
        r.push("irreducible", self.irreducible);
        r
    }
}

/// Secret key capacity without side information, `min_e n_e` symbols.
pub fn cs(source: &TreePinSource) -> Rate {
    Rate::new(source.min_multiplicity(), source.q())
}

/// Wiretap secret key capacity, `min_e (n_e - l_e)` symbols.
pub fn cw(inst: &Instance) -> Rate {
    let cw = edge_capacities(inst).iter().map(EdgeCapacity::residual).min().unwrap_or(0);
    Rate::new(cw, inst.source.q())
}

/// Minimum leakage rate for omniscience, `(D - n_w) - cw` symbols.
pub fn rl(inst: &Instance) -> Rate {
    let cw = cw(inst).symbols;
    let free = inst.source.dim() - inst.n_w();
    assert!(free >= cw, "cw exceeds H(Z_V | Z_w)");
    Rate::new(free - cw, inst.source.q())
}

/// Minimum communication rate for omniscience without a wiretapper,
/// `D - s` symbols.
pub fn rco(source: &TreePinSource) -> Rate {
    Rate::new(source.dim() - source.min_multiplicity(), source.q())
}

pub fn edge_capacities(inst: &Instance) -> Vec<EdgeCapacity> {
    inst.source
        .edges()
        .iter()
        .zip(edge_mcf_dims(inst))
        .map(|(e, mcf_dim)| EdgeCapacity { edge_id: e.id, multiplicity: e.multiplicity, mcf_dim })
        .collect()
}

pub fn analyze(inst: &Instance) -> CapacityReport {
    let src = &inst.source;
    let edges = edge_capacities(inst);
    let best = edges.iter().map(EdgeCapacity::residual).min().unwrap_or(0);
    let argmin = edges.iter().filter(|e| e.residual() == best).map(|e| e.edge_id).collect();
    let irreducible = edges.iter().all(|e| e.mcf_dim == 0);
    CapacityReport {
        q: src.q(),
        dim: src.dim(),
        n_w: inst.n_w(),
        cs: cs(src),
        cw: cw(inst),
        rl: rl(inst),
        rco: rco(src),
        edges,
        argmin,
        irreducible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_instance, random_instance, Edge};
    use crate::reduce::{is_irreducible, reduce_full};

    #[test]
    fn parity_path_values() {
        let inst = load_instance(crate::fixtures::PARITY_PATH).unwrap();
        let rep = analyze(&inst);
        assert_eq!(rep.cs.symbols, 1);
        assert_eq!(rep.cw.symbols, 1);
        assert_eq!(rep.rl.symbols, 1);
        assert_eq!(rep.rco.symbols, 2);
        assert_eq!(rep.argmin, vec![0, 1, 2]);
        assert!(rep.irreducible);
        let text = rep.to_report().to_string();
        assert!(text.contains("cw_bits = 1\n"));
        assert!(text.contains("rl_bits = 1\n"));
        assert!(text.contains("irreducible = true\n"));
    }

    #[test]
    fn single_edge_values() {
        let src = TreePinSource::new(3, 2, vec![Edge { id: 0, u: 0, v: 1, multiplicity: 4 }]).unwrap();
        assert_eq!(cs(&src), Rate::new(4, 3));
        assert!((cs(&src).bits() - 4.0 * 3f64.log2()).abs() < 1e-12);
        assert_eq!(rco(&src).symbols, 0);
    }

    #[test]
    fn two_column_example() {
        let text =
            "treepin q=2\nvertices 4\nedge 0 0 1 2\nedge 1 1 2 1\nedge 2 2 3 1\nwiretap cols=2\n1 0\n1 0\n0 1\n0 1\n";
        let inst = load_instance(text).unwrap();
        assert_eq!(cw(&inst).symbols, 1);
        assert_eq!(rl(&inst).symbols, (4 - 2) - 1);
    }

    #[test]
    fn invariants_on_random_instances() {
        for seed in 0..300u64 {
            let q = [2, 3, 5][seed as usize % 3];
            let inst = random_instance(seed, 2 + seed as usize % 6, 3, q, seed as usize % 4)
                .unwrap_or_else(|_| random_instance(seed, 2 + seed as usize % 6, 3, q, 0).unwrap());
            let rep = analyze(&inst);
            assert!(rep.cw <= rep.cs);
            assert!(rep.rl <= rep.rco);
            assert_eq!(rep.rl.symbols + rep.cw.symbols, rep.dim - rep.n_w);
            if inst.n_w() == 0 {
                assert_eq!(rep.cw, rep.cs);
                assert_eq!(rep.rl, rep.rco);
            }
            if is_irreducible(&inst) {
                assert_eq!(rep.cw, rep.cs);
                assert_eq!(rep.rl.symbols, rep.dim - rep.n_w - inst.source.min_multiplicity());
            }
            if let Ok(trace) = reduce_full(&inst) {
                assert_eq!(cw(&trace.reduced), rep.cw);
                assert_eq!(rl(&trace.reduced), rep.rl);
            }
        }
    }
}
