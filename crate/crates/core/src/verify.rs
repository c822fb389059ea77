//! Rank-based checks of any linear scheme. Nothing here reads the
//! certificate or the coefficient blocks; only `F`, `M_K` and `W` are used.
//!
//! Dimensions over `F_{q^n}` count symbols per block of `n` realizations, so
//! a dimension `k` is `k * log2 q` bits per realization.

use crate::capacity::{cw, rco};
use crate::error::{Error, Result};
use crate::model::{selector, Instance, TreePinSource, Wiretapper};
use crate::report::{fmt_bits, Report};
use crate::scheme::CommScheme;

fn check_shape(scheme: &CommScheme, source: &TreePinSource) -> Result<()> {
    if scheme.ctx.q() != source.q() {
        return Err(Error::FieldMismatch);
    }
    if scheme.dim() != source.dim() || scheme.key.matrix.rows() != source.dim() {
        return Err(Error::Shape(format!("scheme over {} coordinates, source has {}", scheme.dim(), source.dim())));
    }
    if let Some(&o) = scheme.owners.iter().find(|&&o| o >= source.vertex_count()) {
        return Err(Error::Shape(format!("owner {o} is not a vertex")));
    }
    Ok(())
}

/// Per node: can `Y` be recovered from the messages and everything the node
/// observes, i.e. is `[F | H_i]` of rank `D`?
pub fn check_perfect_omniscience(scheme: &CommScheme, source: &TreePinSource) -> Result<Vec<bool>> {
    check_shape(scheme, source)?;
    let d = source.dim();
    (0..source.vertex_count())
        .map(|v| {
            let h = selector(&scheme.ctx, d, &source.node_view(v).coords);
            Ok(scheme.f.hcat(&h)?.rank() == d)
        })
        .collect()
}

/// Every wiretap column lies in `col(F)`.
pub fn check_perfect_alignment(scheme: &CommScheme, wiretapper: &Wiretapper) -> Result<bool> {
    let w = wiretapper.lifted(&scheme.ctx)?;
    for c in 0..w.cols() {
        if !scheme.f.in_col_span(&w.column(c))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `H(F | Z_w)` in symbols per block: `rank[F | W] - n_w`.
pub fn leakage_symbols(scheme: &CommScheme, wiretapper: &Wiretapper) -> Result<usize> {
    let w = wiretapper.lifted(&scheme.ctx)?;
    Ok(scheme.f.hcat(&w)?.rank() - w.cols())
}

pub fn leakage_bits_per_realization(scheme: &CommScheme, wiretapper: &Wiretapper) -> Result<f64> {
    Ok(leakage_symbols(scheme, wiretapper)? as f64 * (scheme.ctx.q() as f64).log2())
}

/// The key is independent of `(F, Z_w)`: appending `M_K` raises the rank of
/// `[F | W]` by its full width.
pub fn check_key_secrecy(scheme: &CommScheme, wiretapper: &Wiretapper) -> Result<bool> {
    let fw = scheme.f.hcat(&wiretapper.lifted(&scheme.ctx)?)?;
    let base = fw.rank();
    Ok(fw.hcat(&scheme.key.matrix)?.rank() == base + scheme.key.symbols())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub q: u64,
    pub n: usize,
    pub dim: usize,
    pub n_w: usize,
    pub omniscience: Vec<bool>,
    pub alignment: bool,
    pub rank_f: usize,
    pub leakage_symbols: usize,
    pub key_symbols: usize,
    pub key_secrecy: bool,
    /// `(D - n_w) - cw`, the least leakage of any omniscience scheme.
    pub leakage_lower_bound: usize,
    pub rco_symbols: usize,
}

impl VerificationReport {
    pub fn omniscience_ok(&self) -> bool {
        self.omniscience.iter().all(|&b| b)
    }

    pub fn passed(&self) -> bool {
        self.omniscience_ok() && self.alignment && self.key_secrecy
    }

    fn bits(&self, symbols: usize) -> String {
        fmt_bits(symbols as f64 * (self.q as f64).log2())
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("q", self.q);
        r.push("n", self.n);
        r.push("d", self.dim);
        r.push("nw", self.n_w);
        for (v, ok) in self.omniscience.iter().enumerate() {
            r.push(format!("omniscience.node.{v}"), ok);
        }
        r.push("omniscience", self.omniscience_ok());
        r.push("alignment", self.alignment);
        r.push("key_secrecy", self.key_secrecy);
        r.push("comm_symbols", self.rank_f);
        r.push("comm_bits", self.bits(self.rank_f));
        r.push("leakage_symbols", self.leakage_symbols);
        r.push("leakage_bits", self.bits(self.leakage_symbols));
        r.push("leakage_lower_bound_bits", self.bits(self.leakage_lower_bound));
        r.push("rco_bits", self.bits(self.rco_symbols));
        r.push("key_symbols", self.key_symbols);
        r.push("key_bits", self.bits(self.key_symbols));
        r.push("passed", self.passed());
        r
    }
}

pub fn verify(scheme: &CommScheme, inst: &Instance) -> Result<VerificationReport> {
    let omniscience = check_perfect_omniscience(scheme, &inst.source)?;
    let d = inst.source.dim();
    Ok(VerificationReport {
        q: inst.source.q(),
        n: scheme.n(),
        dim: d,
        n_w: inst.n_w(),
        omniscience,
        alignment: check_perfect_alignment(scheme, &inst.wiretapper)?,
        rank_f: scheme.f.rank(),
        leakage_symbols: leakage_symbols(scheme, &inst.wiretapper)?,
        key_symbols: scheme.key.symbols(),
        key_secrecy: check_key_secrecy(scheme, &inst.wiretapper)?,
        leakage_lower_bound: d - inst.n_w() - cw(inst).symbols,
        rco_symbols: rco(&inst.source).symbols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::falinalg::FMatrix;
    use crate::fixtures::{parity_path, published_scheme};
    use crate::gfield::make_ext_field;
    use crate::model::random_instance;
    use crate::reduce::is_irreducible;
    use crate::scheme::{synth_random, DEFAULT_MAX_ATTEMPTS};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn published_scheme_passes() {
        let inst = parity_path();
        let sch = published_scheme();
        let rep = verify(&sch, &inst).unwrap();
        assert_eq!(rep.omniscience, vec![true; 4]);
        assert!(rep.alignment);
        assert_eq!(rep.leakage_symbols, 1);
        assert_eq!(leakage_bits_per_realization(&sch, &inst.wiretapper).unwrap(), 1.0);
        assert!(rep.key_secrecy);
        assert!(rep.passed());
        assert!(rep.to_report().to_string().contains("leakage_bits = 1\n"));
    }

    #[test]
    fn singular_coefficient_breaks_the_far_leaf() {
        // node 2 sends X_b alone instead of mixing in X_c
        let inst = parity_path();
        let mut sch = published_scheme();
        let ctx = sch.ctx.clone();
        sch.f.set(1, 1, ctx.one());
        sch.f.set(2, 1, ctx.zero());
        let ok = check_perfect_omniscience(&sch, &inst.source).unwrap();
        assert_eq!(ok, vec![false, false, true, true]);
    }

    #[test]
    fn empty_scheme_on_one_edge() {
        let text = "treepin q=3\nvertices 2\nedge 0 0 1 2\nwiretap cols=0\n";
        let inst = crate::model::load_instance(text).unwrap();
        let ctx = make_ext_field(3, 1).unwrap();
        let sch = CommScheme::from_matrix(&ctx, 0, FMatrix::zeros(&ctx, 2, 0), vec![]).unwrap();
        let rep = verify(&sch, &inst).unwrap();
        assert_eq!(rep.omniscience, vec![true, true]);
        assert!(rep.alignment && rep.key_secrecy);
        assert_eq!(rep.key_symbols, 2);
    }

    #[test]
    fn wrong_wiretapper_is_not_aligned() {
        let inst = parity_path();
        let sch = synth_random(&inst, 1, DEFAULT_MAX_ATTEMPTS).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut misses = 0;
        for _ in 0..50 {
            let w = FMatrix::random(inst.source.field(), 3, 1, &mut rng);
            let Ok(wt) = Wiretapper::new(w.clone()) else { continue };
            let inside = sch.f.hcat(&w.lift(&sch.ctx).unwrap()).unwrap().rank() == sch.f.rank();
            assert_eq!(check_perfect_alignment(&sch, &wt).unwrap(), inside);
            misses += usize::from(!inside);
        }
        assert!(misses > 0);
    }

    #[test]
    fn key_inside_the_communication_is_not_secret() {
        let inst = parity_path();
        let mut sch = published_scheme();
        sch.key.matrix = sch.f.col_range(0..1);
        assert!(!check_key_secrecy(&sch, &inst.wiretapper).unwrap());
    }

    #[test]
    fn synthesized_schemes_meet_the_rates() {
        for seed in 0..120u64 {
            let q = [2, 3, 5][seed as usize % 3];
            let Ok(inst) = random_instance(seed, 2 + seed as usize % 5, 3, q, seed as usize % 4) else { continue };
            if !is_irreducible(&inst) {
                continue;
            }
            let sch = synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
            let rep = verify(&sch, &inst).unwrap();
            assert!(rep.passed());
            let s = inst.source.min_multiplicity();
            assert_eq!(rep.leakage_symbols, inst.source.dim() - inst.n_w() - s);
            assert_eq!(rep.leakage_symbols, rep.leakage_lower_bound);
            assert_eq!(rep.key_symbols, s);
            if inst.n_w() == 0 {
                assert_eq!(rep.leakage_symbols, rep.rco_symbols);
            }
        }
    }

    #[test]
    fn mismatched_shapes() {
        let inst = random_instance(0, 5, 2, 2, 0).unwrap();
        assert!(verify(&published_scheme(), &inst).is_err());
        let three = random_instance(0, 4, 1, 3, 0).unwrap();
        assert_eq!(verify(&published_scheme(), &three).unwrap_err(), Error::FieldMismatch);
    }
}
