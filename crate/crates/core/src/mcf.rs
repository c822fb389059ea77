//! Maximal common functions of finite linear sources.
//!
//! For `Z1 = X*M1` and `Z2 = X*M2` with `X` uniform, the maximal common
//! function is itself linear, `X*Mg`, with `col(Mg) = col(M1) ∩ col(M2)`.

use crate::error::{Error, Result};
use crate::falinalg::FMatrix;
use crate::model::Instance;

#[derive(Clone, Debug)]
pub struct LinearMcf {
    /// `D x l` basis of the common column space. Bases are not canonical.
    pub basis: FMatrix,
}

impl LinearMcf {
    /// `l`, the m.c.f. dimension over the field of the inputs.
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn entropy_bits(&self) -> f64 {
        self.dim() as f64 * (self.basis.ctx().order() as f64).log2()
    }
}

pub fn mcf_linear(m1: &FMatrix, m2: &FMatrix) -> Result<LinearMcf> {
    if m1.rows() != m2.rows() {
        return Err(Error::Shape(format!("functionals of dimension {} and {}", m1.rows(), m2.rows())));
    }
    Ok(LinearMcf { basis: m1.col_space_intersect(m2)? })
}

/// `mcf(Y_e, Z_w)` for the edge with the given id.
pub fn mcf_edge_wiretap(inst: &Instance, edge_id: u32) -> Result<LinearMcf> {
    let idx = inst.source.edge_index(edge_id)?;
    mcf_linear(&inst.source.edge_selector(idx), inst.wiretapper.matrix())
}

/// M.c.f. dimension of every edge, in edge-list order.
pub fn edge_mcf_dims(inst: &Instance) -> Vec<usize> {
    inst.source
        .edges()
        .iter()
        .map(|e| mcf_edge_wiretap(inst, e.id).expect("edge ids come from the source").dim())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfield::make_ext_field;
    use crate::model::{load_instance, random_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TWO_COLS: &str = "\
treepin q=2
vertices 4
edge 0 0 1 2
edge 1 1 2 1
edge 2 2 3 1
wiretap cols=2
1 0
1 0
0 1
0 1
";

    #[test]
    fn identical_observations() {
        let f = make_ext_field(3, 1).unwrap();
        let id = FMatrix::identity(&f, 4);
        assert_eq!(mcf_linear(&id, &id).unwrap().dim(), 4);
    }

    #[test]
    fn two_column_wiretapper() {
        let inst = load_instance(TWO_COLS).unwrap();
        let a = mcf_edge_wiretap(&inst, 0).unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.basis, FMatrix::from_rows(inst.source.field(), &[vec![1], vec![1], vec![0], vec![0]]).unwrap());
        assert_eq!(a.entropy_bits(), 1.0);
        assert_eq!(edge_mcf_dims(&inst), vec![1, 0, 0]);
        assert_eq!(mcf_edge_wiretap(&inst, 9).unwrap_err(), Error::UnknownEdge(9));
    }

    #[test]
    fn single_parity_wiretapper_is_irreducible() {
        let one_col = TWO_COLS.replace("wiretap cols=2\n1 0\n1 0\n0 1\n0 1\n", "wiretap cols=1\n0\n0\n1\n1\n");
        let inst = load_instance(&one_col).unwrap();
        assert_eq!(edge_mcf_dims(&inst), vec![0, 0, 0]);

        let path = load_instance(crate::fixtures::PARITY_PATH).unwrap();
        assert_eq!(edge_mcf_dims(&path), vec![0, 0, 0]);
    }

    #[test]
    fn no_wiretapper_means_no_common_function() {
        let inst = random_instance(3, 5, 3, 2, 0).unwrap();
        assert!(edge_mcf_dims(&inst).iter().all(|&l| l == 0));
    }

    #[test]
    fn shape_mismatch() {
        let f = make_ext_field(2, 1).unwrap();
        assert!(mcf_linear(&FMatrix::identity(&f, 2), &FMatrix::identity(&f, 3)).is_err());
    }

    #[test]
    fn monotone_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..200 {
            let inst = random_instance(seed, 5, 3, 2, (seed % 5) as usize).unwrap();
            let f = inst.source.field();
            let w = inst.wiretapper.matrix();
            for (i, &l) in edge_mcf_dims(&inst).iter().enumerate() {
                let sel = inst.source.edge_selector(i);
                assert!(l <= sel.rank().min(w.rank()));
                let extra = FMatrix::random(f, w.rows(), 1, &mut rng);
                let bigger = mcf_linear(&sel, &w.hcat(&extra).unwrap()).unwrap();
                assert!(bigger.dim() >= l);
            }
        }
    }
}
