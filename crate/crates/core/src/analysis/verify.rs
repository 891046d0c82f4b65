//! Numerical certificates for the relations between the chains.

use super::matrix::{ef_sg_matrix, ef_wrc_matrix, sb_matrix, HalfSteps};
use super::spectral::{spectral, EIGEN_TOL, REVERSIBILITY_TOL};
use crate::error::Result;
use crate::exact::enumerate_wrc;
use crate::graph::WeightedGraph;
use crate::params::{params_from_ising, perturb_sg, SgParams};
use crate::report::Check;

/// Tolerance on the exact matrix identities.
pub const MATRIX_TOL: f64 = 1e-10;

/// Stationarity, detailed balance and adjointness of every chain on `g`.
pub fn verify_chain_identities(g: &WeightedGraph, cap: u128) -> Result<Vec<Check>> {
    let mp = params_from_ising(g)?;
    let ef_wrc = ef_wrc_matrix(g, &mp.wrc, cap)?;
    let ef_sg = ef_sg_matrix(g, &mp.sg, cap)?;
    let sb = sb_matrix(g, &mp.wrc, cap)?;
    let hs = HalfSteps::build(g, &mp.wrc, cap)?;
    let sw_i = hs.sw_ising();
    let sw_w = hs.sw_wrc();
    let mut checks = Vec::new();
    for (name, cm) in [("ef_wrc", &ef_wrc), ("ef_sg", &ef_sg), ("sb", &sb), ("sw_ising", &sw_i), ("sw_wrc", &sw_w)] {
        let r = cm.row_sum_residual();
        checks.push(Check::within(format!("{name}.row_sums"), r, 0.0, r, 1e-12));
        let r = cm.stationarity_residual();
        checks.push(Check::within(format!("{name}.stationarity"), r, 0.0, r, MATRIX_TOL));
        let r = cm.reversibility_residual();
        checks.push(Check::within(format!("{name}.detailed_balance"), r, 0.0, r, MATRIX_TOL));
    }
    let r = hs.forward_stationarity_residual();
    checks.push(Check::within("half_steps.ising_to_wrc", r, 0.0, r, MATRIX_TOL));
    let r = hs.backward_stationarity_residual();
    checks.push(Check::within("half_steps.wrc_to_ising", r, 0.0, r, MATRIX_TOL));
    let r = hs.adjointness_residual();
    checks.push(Check::within("half_steps.adjointness", r, 0.0, r, MATRIX_TOL));
    Ok(checks)
}

/// Spectral gaps of the four chains on one instance.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub gap_sw_ising: f64,
    pub gap_sw_wrc: f64,
    pub gap_ef: f64,
    pub gap_sb: f64,
    pub checks: Vec<Check>,
}

/// `Gap(SW^Ising) = Gap(SW^wrc)`, `Gap(SW^wrc) ≥ Gap(EF)/3`,
/// `Gap(SB) ≤ Gap(SW^wrc)`, `P_SB ≥ P_EF/3` off the diagonal, and both SW
/// matrices positive semidefinite.
pub fn verify_gap_inequalities(g: &WeightedGraph, cap: u128) -> Result<GapReport> {
    let mp = params_from_ising(g)?;
    let ef = ef_wrc_matrix(g, &mp.wrc, cap)?;
    let sb = sb_matrix(g, &mp.wrc, cap)?;
    let hs = HalfSteps::build(g, &mp.wrc, cap)?;
    let sw_i = spectral(&hs.sw_ising())?;
    let sw_w = spectral(&hs.sw_wrc())?;
    let gap_ef = spectral(&ef)?.gap;
    let gap_sb = spectral(&sb)?.gap;

    let mut entrywise_violation: f64 = 0.0;
    let mut worst = (0.0, 0.0);
    for x in 0..ef.len() {
        for y in 0..ef.len() {
            if x != y {
                let deficit = ef.p[(x, y)] / 3.0 - sb.p[(x, y)];
                if deficit > entrywise_violation {
                    entrywise_violation = deficit;
                    worst = (sb.p[(x, y)], ef.p[(x, y)] / 3.0);
                }
            }
        }
    }
    let gap_diff = (sw_i.gap - sw_w.gap).abs();
    let checks = vec![
        Check::within("gaps.sw_ising_equals_sw_wrc", sw_i.gap, sw_w.gap, gap_diff, EIGEN_TOL),
        Check::at_most("gaps.ef_over_3_le_sw_wrc", gap_ef / 3.0, sw_w.gap, EIGEN_TOL),
        Check::at_most("gaps.sb_le_sw_wrc", gap_sb, sw_w.gap, EIGEN_TOL),
        Check { check: "gaps.entrywise_sb_ge_ef_over_3".into(), lhs: worst.0, rhs: worst.1, residual: entrywise_violation, pass: entrywise_violation <= 1e-15 },
        Check::at_most("gaps.sw_ising_psd", -sw_i.eigenvalue_min, EIGEN_TOL, 0.0),
        Check::at_most("gaps.sw_wrc_psd", -sw_w.eigenvalue_min, EIGEN_TOL, 0.0),
    ];
    Ok(GapReport { gap_sw_ising: sw_i.gap, gap_sw_wrc: sw_w.gap, gap_ef, gap_sb, checks })
}

/// Extremes of the original-vs-perturbed comparison.
#[derive(Clone, Debug)]
pub struct PerturbationReport {
    pub dist_ratio_min: f64,
    pub dist_ratio_max: f64,
    pub transition_ratio_min: f64,
    pub transition_ratio_max: f64,
    pub gap: f64,
    pub gap_perturbed: f64,
    pub checks: Vec<Check>,
}

/// Compare `π_wrc` and `P_EF` for `s` with those of `perturb_sg(s, n)`:
/// `π̂/π ∈ [1/9, e)`, `P̂/P ∈ [1/2, 2]` on moves with `|Z ⊕ Z'| ≤ 1`, and
/// `Gap(P) ≥ Gap(P̂)/441`.
pub fn verify_perturbation_bounds(g: &WeightedGraph, s: &SgParams, cap: u128) -> Result<PerturbationReport> {
    s.check(g)?;
    let hat = perturb_sg(s, g.n().max(1));
    let (w, w_hat) = (s.to_wrc(), hat.to_wrc());
    let pi = enumerate_wrc(g, &w, cap)?;
    let pi_hat = enumerate_wrc(g, &w_hat, cap)?;
    let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b) in pi_hat.ln_weights.iter().zip(&pi.ln_weights) {
        let r = ((a - pi_hat.ln_z) - (b - pi.ln_z)).exp();
        dmin = dmin.min(r);
        dmax = dmax.max(r);
    }
    let p = ef_wrc_matrix(g, &w, cap)?;
    let p_hat = ef_wrc_matrix(g, &w_hat, cap)?;
    let (mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in 0..p.len() {
        let neighbours = std::iter::once(x).chain((0..g.m()).map(|e| x ^ (1 << e)));
        for y in neighbours {
            let r = p_hat.p[(x, y)] / p.p[(x, y)];
            tmin = tmin.min(r);
            tmax = tmax.max(r);
        }
    }
    let rep = spectral(&p)?;
    let rep_hat = spectral(&p_hat)?;
    let e = std::f64::consts::E;
    let checks = vec![
        Check::at_most("perturb.dist_ratio_lower", 1.0 / 9.0, dmin, 1e-12),
        Check { check: "perturb.dist_ratio_upper".into(), lhs: dmax, rhs: e, residual: (dmax - e).max(0.0), pass: dmax < e },
        Check::at_most("perturb.transition_ratio_lower", 0.5, tmin, 1e-12),
        Check::at_most("perturb.transition_ratio_upper", tmax, 2.0, 1e-12),
        Check::at_most("perturb.gap_relation", rep_hat.gap / 441.0, rep.gap, EIGEN_TOL),
        Check::within("perturb.reversible", rep.reversibility_residual.max(rep_hat.reversibility_residual), 0.0, rep.reversibility_residual.max(rep_hat.reversibility_residual), REVERSIBILITY_TOL),
    ];
    Ok(PerturbationReport {
        dist_ratio_min: dmin,
        dist_ratio_max: dmax,
        transition_ratio_min: tmin,
        transition_ratio_max: tmax,
        gap: rep.gap,
        gap_perturbed: rep_hat.gap,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::matrix::DEFAULT_MATRIX_CAP;
    use crate::generators;
    use crate::report::all_pass;
    use crate::rng::RngStream;

    #[test]
    fn k2_gaps() {
        let g = WeightedGraph::uniform(2, vec![(0, 1)], 2.0, 1.0).unwrap();
        let r = verify_gap_inequalities(&g, DEFAULT_MATRIX_CAP).unwrap();
        assert!(all_pass(&r.checks), "{:?}", r.checks);
        assert!((r.gap_sw_ising - r.gap_sw_wrc).abs() < 1e-9);
        assert!(all_pass(&verify_chain_identities(&g, DEFAULT_MATRIX_CAP).unwrap()));
    }

    #[test]
    fn perturbation_identity_when_eta_large() {
        let g = generators::path(3, 2.0, 0.1).unwrap();
        let s = params_from_ising(&g).unwrap().sg;
        assert!(s.eta().iter().all(|&h| h > 1.0 / 3.0));
        let r = verify_perturbation_bounds(&g, &s, DEFAULT_MATRIX_CAP).unwrap();
        assert!((r.dist_ratio_min - 1.0).abs() < 1e-12 && (r.dist_ratio_max - 1.0).abs() < 1e-12);
        assert!((r.transition_ratio_min - 1.0).abs() < 1e-12);
        assert!(all_pass(&r.checks));
    }

    #[test]
    fn perturbation_with_unit_fields() {
        let g = generators::complete(3, 2.0, 1.0).unwrap();
        let s = params_from_ising(&g).unwrap().sg;
        let r = verify_perturbation_bounds(&g, &s, DEFAULT_MATRIX_CAP).unwrap();
        assert!(all_pass(&r.checks), "{:?}", r.checks);
    }

    #[test]
    fn random_small_instances() {
        let mut rng = RngStream::new(21);
        let shape = generators::InstanceShape { max_vertices: 4, max_edges: 6, ..Default::default() };
        for _ in 0..10 {
            let g = generators::random_instance(&shape, &mut rng);
            assert!(all_pass(&verify_chain_identities(&g, DEFAULT_MATRIX_CAP).unwrap()));
            assert!(all_pass(&verify_gap_inequalities(&g, DEFAULT_MATRIX_CAP).unwrap().checks));
            let s = params_from_ising(&g).unwrap().sg;
            assert!(all_pass(&verify_perturbation_bounds(&g, &s, DEFAULT_MATRIX_CAP).unwrap().checks));
        }
    }
}
