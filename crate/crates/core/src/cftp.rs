//! Monotone grand coupling of the WRC edge-flip chain and coupling from the
//! past.
//!
//! A step consumes one [`RandomnessRecord`] `(ℓ, e, b, r)`. With `ℓ = 1` the
//! state proposes `X'(e) = b` and accepts iff `r < min{1, π(X')/π(X)}`. All
//! four fields are drawn for every record, so the tape is independent of the
//! states it is applied to.
//!
//! Because `b` is a fair coin, half of the non-lazy proposals are no-ops and
//! the kernel realised by `φ` is `(I + P_EF)/2`. It has the same stationary
//! law as `P_EF`.

use rayon::prelude::*;

use crate::bits::{EdgeSubset, SpinConfig};
use crate::dynamics::{accept_probability, Dynamics};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::params::{params_from_ising, WrcParams};
use crate::rng::RngStream;

/// Default abort threshold on the doubling horizon `T`.
pub const DEFAULT_MAX_STEPS: u64 = 1 << 30;

/// Sub-stream of a seed that feeds the tape.
const TAPE_STREAM: u64 = 0;
/// Sub-stream used for the final `P_{R→I}` step of the Ising sampler.
const SPIN_STREAM: u64 = 1;
/// Sub-stream for the random start states of sandwich checks.
const SANDWICH_STREAM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomnessRecord {
    /// `false` means hold.
    pub lazy_move: bool,
    pub edge: usize,
    pub bit: bool,
    pub r: f64,
}

impl RandomnessRecord {
    /// Draw `ℓ`, `e`, `b`, `r` in that order.
    pub fn draw(m: usize, rng: &mut RngStream) -> Self {
        let lazy_move = rng.bit();
        let edge = rng.below(m as u64) as usize;
        let bit = rng.bit();
        let r = rng.uniform();
        RandomnessRecord { lazy_move, edge, bit, r }
    }
}

/// Records `U_{-1}, U_{-2}, …`, generated on demand and never regenerated.
#[derive(Clone, Debug)]
pub struct RandomnessTape {
    seed: u64,
    m: usize,
    rng: RngStream,
    records: Vec<RandomnessRecord>,
}

impl RandomnessTape {
    pub fn new(seed: u64, m: usize) -> Self {
        assert!(m > 0, "a tape needs at least one edge");
        RandomnessTape { seed, m, rng: RngStream::with_stream(seed, TAPE_STREAM), records: Vec::new() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of records generated so far.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Make sure `U_{-1}, …, U_{-depth}` exist.
    pub fn extend_to(&mut self, depth: usize) {
        while self.records.len() < depth {
            let rec = RandomnessRecord::draw(self.m, &mut self.rng);
            self.records.push(rec);
        }
    }

    /// `U_{-k}` for `k ≥ 1` (must already be generated).
    pub fn at(&self, k: usize) -> &RandomnessRecord {
        &self.records[k - 1]
    }
}

/// The coupling map `φ` with reusable scratch space.
#[derive(Clone, Debug)]
pub struct Phi<'g> {
    dynamics: Dynamics<'g>,
}

impl<'g> Phi<'g> {
    pub fn new(g: &'g WeightedGraph, w: WrcParams) -> Result<Self> {
        Ok(Phi { dynamics: Dynamics::wrc(g, w)? })
    }

    /// Apply one record in place.
    pub fn apply(&mut self, x: &mut EdgeSubset, u: &RandomnessRecord) {
        if !u.lazy_move || x.get(u.edge) == u.bit {
            return;
        }
        let a = accept_probability(self.dynamics.wrc_flip_log_ratio(x, u.edge));
        if u.r < a {
            x.set(u.edge, u.bit);
        }
    }
}

/// `φ(X, U)`.
pub fn phi(g: &WeightedGraph, w: &WrcParams, x: &EdgeSubset, u: &RandomnessRecord) -> Result<EdgeSubset> {
    let mut phi = Phi::new(g, w.clone())?;
    let mut y = x.clone();
    phi.apply(&mut y, u);
    Ok(y)
}

#[derive(Clone, Debug)]
pub struct CftpOptions {
    /// Abort once the horizon `T` would exceed this.
    pub max_steps: u64,
    /// Track extra chains from random starts and verify `X^min ⪯ X ⪯ X^max`.
    pub check_sandwich: bool,
    pub sandwich_chains: usize,
}

impl Default for CftpOptions {
    fn default() -> Self {
        CftpOptions { max_steps: DEFAULT_MAX_STEPS, check_sandwich: cfg!(debug_assertions), sandwich_chains: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CftpOutcome {
    pub sample: EdgeSubset,
    /// Horizon `T` of the round that coalesced (0 for an edgeless graph).
    pub coalescence_time: u64,
    pub rounds: u32,
    /// Steps applied over all rounds and both bounding chains.
    pub total_steps: u64,
}

/// Exact sample from `π_wrc(w)` by monotone CFTP with a doubling horizon.
pub fn cftp_sample(g: &WeightedGraph, w: &WrcParams, seed: u64, opts: &CftpOptions) -> Result<CftpOutcome> {
    w.check(g)?;
    let m = g.m();
    if m == 0 {
        return Ok(CftpOutcome { sample: EdgeSubset::empty(0), coalescence_time: 0, rounds: 0, total_steps: 0 });
    }
    let mut phi = Phi::new(g, w.clone())?;
    let mut tape = RandomnessTape::new(seed, m);
    let mut sandwich_rng = RngStream::with_stream(seed, SANDWICH_STREAM);
    let mut horizon: u64 = 1;
    let mut rounds = 0;
    let mut total_steps = 0;
    loop {
        if horizon > opts.max_steps {
            return Err(Error::NonCoalescence { max_steps: opts.max_steps });
        }
        rounds += 1;
        tape.extend_to(horizon as usize);
        let mut lo = EdgeSubset::empty(m);
        let mut hi = EdgeSubset::full(m);
        let mut others: Vec<EdgeSubset> = if opts.check_sandwich {
            (0..opts.sandwich_chains).map(|_| EdgeSubset::from_indices(m, (0..m).filter(|_| sandwich_rng.bit()))).collect()
        } else {
            Vec::new()
        };
        for k in (1..=horizon as usize).rev() {
            let u = tape.at(k);
            phi.apply(&mut lo, u);
            phi.apply(&mut hi, u);
            for x in others.iter_mut() {
                phi.apply(x, u);
            }
            if opts.check_sandwich
                && (!lo.is_subset_of(&hi) || others.iter().any(|x| !lo.is_subset_of(x) || !x.is_subset_of(&hi)))
            {
                return Err(Error::OrderViolation { time: -(k as i64) + 1 });
            }
        }
        total_steps += 2 * horizon;
        if lo == hi {
            return Ok(CftpOutcome { sample: lo, coalescence_time: horizon, rounds, total_steps });
        }
        horizon *= 2;
    }
}

/// Exact Ising sample: a CFTP draw from `π_wrc` followed by one `P_{R→I}` step.
pub fn perfect_ising_sample(g: &WeightedGraph, seed: u64, opts: &CftpOptions) -> Result<(SpinConfig, CftpOutcome)> {
    let mp = params_from_ising(g)?;
    let outcome = cftp_sample(g, &mp.wrc, seed, opts)?;
    let mut d = Dynamics::wrc(g, mp.wrc)?;
    let sigma = d.r_to_i(&outcome.sample, &mut RngStream::with_stream(seed, SPIN_STREAM));
    Ok((sigma, outcome))
}

/// Independent CFTP runs, one per seed, in input order.
pub fn cftp_batch(g: &WeightedGraph, w: &WrcParams, seeds: &[u64], opts: &CftpOptions) -> Vec<Result<CftpOutcome>> {
    seeds.par_iter().map(|&s| cftp_sample(g, w, s, opts)).collect()
}

/// Independent perfect Ising samples, one per seed, in input order.
pub fn perfect_ising_batch(g: &WeightedGraph, seeds: &[u64], opts: &CftpOptions) -> Vec<Result<(SpinConfig, CftpOutcome)>> {
    seeds.par_iter().map(|&s| perfect_ising_sample(g, s, opts)).collect()
}

/// Draw `trials` comparable pairs `σ ⪯ τ` and records `U`, and count how
/// often `φ(σ, U) ⪯ φ(τ, U)` fails.
pub fn check_monotone(g: &WeightedGraph, w: &WrcParams, trials: u64, rng: &mut RngStream) -> Result<u64> {
    let m = g.m();
    if m == 0 {
        return Ok(0);
    }
    let mut phi = Phi::new(g, w.clone())?;
    let mut violations = 0;
    for _ in 0..trials {
        let mut sigma = EdgeSubset::empty(m);
        let mut tau = EdgeSubset::empty(m);
        for e in 0..m {
            // each edge: in both, only in τ, or in neither
            match rng.below(3) {
                0 => {
                    sigma.set(e, true);
                    tau.set(e, true);
                }
                1 => tau.set(e, true),
                _ => {}
            }
        }
        let u = RandomnessRecord::draw(m, rng);
        phi.apply(&mut sigma, &u);
        phi.apply(&mut tau, &u);
        if !sigma.is_subset_of(&tau) {
            violations += 1;
        }
    }
    Ok(violations)
}
