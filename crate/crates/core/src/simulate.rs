//! Runs a scheme on sampled source blocks. Every node decodes with a generic
//! linear solver, so hand-written schemes are exercised the same way as
//! synthesized ones.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::falinalg::FMatrix;
use crate::gfield::{ExtFieldCtx, FieldElem};
use crate::model::{selector, Instance};
use crate::report::{fmt_bits, Report};
use crate::scheme::CommScheme;
use crate::verify::check_perfect_alignment;

pub const DEFAULT_TRIALS: usize = 32;

/// `d` uniform symbols of `F_{q^n}`, i.e. `n` realizations of each base
/// coordinate.
pub fn sample_block(seed: u64, d: usize, ctx: &ExtFieldCtx) -> Vec<FieldElem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..d).map(|_| ctx.random(&mut rng)).collect()
}

/// Recovers `y` from `y * G` using `D` independent columns of `G`.
struct Decoder {
    columns: Vec<usize>,
    inverse: FMatrix,
}

impl Decoder {
    fn new(g: &FMatrix) -> Option<Self> {
        let pivots = g.rref().pivots;
        if pivots.len() != g.rows() {
            return None;
        }
        let inverse = g.select_cols(&pivots).inverse().ok()?;
        Some(Decoder { columns: pivots, inverse })
    }

    fn decode(&self, observed: &[FieldElem]) -> Vec<FieldElem> {
        let picked: Vec<FieldElem> = self.columns.iter().map(|&c| observed[c]).collect();
        self.inverse.left_apply(&picked).expect("square system")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimReport {
    pub trials: usize,
    pub nodes: usize,
    /// Trials in which every node recovered the whole block.
    pub decoded: usize,
    /// Trials in which every node computed the same key as the true one.
    pub key_agreements: usize,
    /// Trials in which the wiretapper's view equaled its prediction from the
    /// messages alone; `None` when the scheme is not aligned.
    pub wiretap_from_messages: Option<usize>,
    /// `D - rank[F | W]`: symbols of the block still unknown to the
    /// wiretapper after the discussion.
    pub residual_symbols: usize,
    pub key_symbols: usize,
    /// Occurrences of each field element among all extracted key symbols.
    pub key_symbol_counts: Vec<u64>,
    pub q: u64,
    pub n: usize,
}

impl SimReport {
    pub fn decode_rate(&self) -> f64 {
        self.decoded as f64 / self.trials.max(1) as f64
    }

    pub fn key_agreement_rate(&self) -> f64 {
        self.key_agreements as f64 / self.trials.max(1) as f64
    }

    pub fn passed(&self) -> bool {
        self.decoded == self.trials
            && self.key_agreements == self.trials
            && self.wiretap_from_messages.is_none_or(|w| w == self.trials)
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("trials", self.trials);
        r.push("nodes", self.nodes);
        r.push("decode_rate", fmt_bits(self.decode_rate()));
        r.push("key_agreement_rate", fmt_bits(self.key_agreement_rate()));
        match self.wiretap_from_messages {
            Some(k) => r.push("wiretap_from_messages_rate", fmt_bits(k as f64 / self.trials.max(1) as f64)),
            None => r.push("wiretap_from_messages_rate", "n/a"),
        }
        let per_block = (self.n as f64) * (self.q as f64).log2();
        r.push("residual_bits_per_block", fmt_bits(self.residual_symbols as f64 * per_block));
        r.push("key_bits_per_block", fmt_bits(self.key_symbols as f64 * per_block));
        r.push("passed", self.passed());
        r
    }
}

pub fn run_protocol(scheme: &CommScheme, inst: &Instance, seed: u64, trials: usize) -> Result<SimReport> {
    run_protocol_traced(scheme, inst, seed, trials, None)
}

/// As [`run_protocol`], appending one line per trial to `trace` if given.
pub fn run_protocol_traced(
    scheme: &CommScheme,
    inst: &Instance,
    seed: u64,
    trials: usize,
    mut trace: Option<&mut String>,
) -> Result<SimReport> {
    let src = &inst.source;
    let ctx = &scheme.ctx;
    let d = src.dim();
    if scheme.dim() != d || ctx.q() != src.q() {
        return Err(Error::Shape("scheme does not match the instance".into()));
    }
    let f = &scheme.f;
    let views: Vec<Vec<usize>> = (0..src.vertex_count()).map(|v| src.node_view(v).coords).collect();
    let decoders = views
        .iter()
        .enumerate()
        .map(|(v, coords)| {
            let g = f.hcat(&selector(ctx, d, coords))?;
            Decoder::new(&g).ok_or_else(|| Error::Inconsistent(format!("node {v} cannot decode the block")))
        })
        .collect::<Result<Vec<_>>>()?;

    let w = inst.wiretapper.lifted(ctx)?;
    let predictor = if check_perfect_alignment(scheme, &inst.wiretapper)? { Some(f.solve_right(&w)?) } else { None };
    let residual_symbols = d - f.hcat(&w)?.rank();

    let mut decoded = 0;
    let mut key_agreements = 0;
    let mut wiretap_hits = 0;
    let mut key_symbol_counts = vec![0u64; ctx.order() as usize];
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let block = sample_block(rand::Rng::gen(&mut seeder), d, ctx);
        let messages = f.left_apply(&block)?;
        let key = scheme.key.matrix.left_apply(&block)?;
        for &k in &key {
            key_symbol_counts[k.raw() as usize] += 1;
        }
        let mut all_decoded = true;
        let mut all_agree = true;
        for (dec, coords) in decoders.iter().zip(&views) {
            let mut observed = messages.clone();
            observed.extend(coords.iter().map(|&c| block[c]));
            let guess = dec.decode(&observed);
            all_decoded &= guess == block;
            all_agree &= scheme.key.matrix.left_apply(&guess)? == key;
        }
        decoded += usize::from(all_decoded);
        key_agreements += usize::from(all_agree);
        if let Some(y) = &predictor {
            let seen = w.left_apply(&block)?;
            wiretap_hits += usize::from(y.left_apply(&messages)? == seen);
        }
        if let Some(out) = trace.as_deref_mut() {
            let fmt = |v: &[FieldElem]| v.iter().map(|&e| ctx.format_elem(e)).collect::<Vec<_>>().join(" ");
            writeln!(
                out,
                "trial {t}: block [{}] messages [{}] key [{}] decoded {all_decoded} agree {all_agree}",
                fmt(&block),
                fmt(&messages),
                fmt(&key)
            )
            .unwrap();
        }
    }
    Ok(SimReport {
        trials,
        nodes: src.vertex_count(),
        decoded,
        key_agreements,
        wiretap_from_messages: predictor.map(|_| wiretap_hits),
        residual_symbols,
        key_symbols: scheme.key.symbols(),
        key_symbol_counts,
        q: ctx.q(),
        n: ctx.degree(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{parity_path, published_scheme};
    use crate::gfield::make_ext_field;
    use crate::model::{load_instance, random_instance};
    use crate::reduce::is_irreducible;
    use crate::scheme::{synth_random, DEFAULT_MAX_ATTEMPTS};

    #[test]
    fn blocks_are_reproducible() {
        let ctx = make_ext_field(3, 2).unwrap();
        assert_eq!(sample_block(4, 10, &ctx), sample_block(4, 10, &ctx));
        assert_ne!(sample_block(4, 10, &ctx), sample_block(5, 10, &ctx));
        assert!(sample_block(4, 0, &ctx).is_empty());
    }

    #[test]
    fn block_symbols_are_uniform() {
        let ctx = make_ext_field(2, 2).unwrap();
        let draws = 100_000usize;
        let mut counts = [0f64; 4];
        for e in sample_block(11, draws, &ctx) {
            counts[e.raw() as usize] += 1.0;
        }
        let p = 0.25;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c - draws as f64 * p).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn published_scheme_runs() {
        let inst = parity_path();
        let sch = published_scheme();
        let rep = run_protocol(&sch, &inst, 3, 100).unwrap();
        assert_eq!(rep.decoded, 100);
        assert_eq!(rep.key_agreements, 100);
        assert_eq!(rep.wiretap_from_messages, Some(100));
        assert_eq!(rep.residual_symbols, 1);
        assert!(rep.passed());
    }

    #[test]
    fn keys_are_uniform() {
        let rep = run_protocol(&published_scheme(), &parity_path(), 21, 4000).unwrap();
        let total: u64 = rep.key_symbol_counts.iter().sum();
        assert_eq!(total, 4000);
        let sigma = (4000.0f64 * 0.25 * 0.75).sqrt();
        for &c in &rep.key_symbol_counts {
            assert!((c as f64 - 1000.0).abs() < 4.0 * sigma, "{:?}", rep.key_symbol_counts);
        }
    }

    #[test]
    fn the_wiretap_view_is_the_sum_of_the_messages() {
        let inst = parity_path();
        let sch = published_scheme();
        let ctx = &sch.ctx;
        for seed in 0..20 {
            let block = sample_block(seed, 3, ctx);
            let m = sch.f.left_apply(&block).unwrap();
            let z = inst.wiretapper.lifted(ctx).unwrap().left_apply(&block).unwrap();
            assert_eq!(ctx.add(m[0], m[1]), z[0]);
        }
    }

    #[test]
    fn single_edge_needs_no_messages() {
        let inst = load_instance("treepin q=2\nvertices 2\nedge 0 0 1 3\nwiretap cols=0\n").unwrap();
        let sch = synth_random(&inst, 0, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert_eq!(sch.f.cols(), 0);
        let rep = run_protocol(&sch, &inst, 0, 10).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.key_symbols, 3);
    }

    #[test]
    fn broken_scheme_is_reported() {
        let inst = parity_path();
        let mut sch = published_scheme();
        sch.f.set(2, 1, sch.ctx.zero());
        assert!(matches!(run_protocol(&sch, &inst, 0, 1).unwrap_err(), Error::Inconsistent(_)));
    }

    #[test]
    fn trace_has_one_line_per_trial() {
        let mut trace = String::new();
        run_protocol_traced(&published_scheme(), &parity_path(), 1, 5, Some(&mut trace)).unwrap();
        assert_eq!(trace.lines().count(), 5);
    }

    #[test]
    fn synthesized_schemes_agree_end_to_end() {
        let mut runs = 0;
        for seed in 0..80u64 {
            let q = [2, 3, 5][seed as usize % 3];
            let Ok(inst) = random_instance(seed, 2 + seed as usize % 6, 3, q, seed as usize % 3) else { continue };
            if !is_irreducible(&inst) {
                continue;
            }
            let sch = synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
            let rep = run_protocol(&sch, &inst, seed, 10).unwrap();
            assert!(rep.passed(), "{:?}", rep);
            assert_eq!(rep.residual_symbols, inst.source.min_multiplicity());
            runs += 1;
        }
        assert!(runs > 30);
    }
}
