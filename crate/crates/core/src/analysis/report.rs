use serde::{Deserialize, Serialize};

use super::{
    build_kernel, conductance_exact, exact_mixing_time, gibbs, gibbs_max_mass, max_matching_cut, partition_function,
    MixingOptions, StateSpace, DEFAULT_CUT_CAP,
};
use crate::chain::claimed_bounds;
use crate::enumerate::DEFAULT_STATE_CAP;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub state_cap: usize,
    pub cut_cap: usize,
    pub mixing: MixingOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { state_cap: DEFAULT_STATE_CAP, cut_cap: DEFAULT_CUT_CAP, mixing: MixingOptions::default() }
    }
}

/// Summary of the exact analysis of one graph at one fugacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    #[serde(rename = "S")]
    pub size_counts: Vec<u64>,
    pub states: usize,
    pub log2_lambda: f64,
    #[serde(rename = "log2Z")]
    pub log2_z: f64,
    pub pr_k_gibbs: f64,
    /// Absent when the mixing scan hit its step or size cap.
    pub t_mix: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_mix_error: Option<String>,
    pub eps: f64,
    /// Absent when the space exceeds the exhaustive cut cap.
    pub phi_min: Option<f64>,
    pub phi_cut: f64,
    pub phi_cut_closed_form: f64,
    pub t_relax: Option<f64>,
    pub claimed_upper: f64,
    pub claimed_lower: f64,
}

pub fn analyze(g: &Graph, log2_lambda: f64, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    if g.m() == 0 {
        return Err(Error::Param("analysis needs at least one edge".into()));
    }
    let space = StateSpace::build(g, opts.state_cap)?;
    let kernel = build_kernel(&space, log2_lambda)?;
    let pi = gibbs(&space, log2_lambda);
    let sc = space.size_counts();

    let (t_mix, t_mix_error) = match exact_mixing_time(&kernel, &pi, &opts.mixing) {
        Ok(r) => (Some(r.t_mix), None),
        Err(e @ (Error::Timeout { .. } | Error::Capacity { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let phi_min =
        if space.len() <= opts.cut_cap { Some(conductance_exact(&kernel, &pi, opts.cut_cap)?.phi) } else { None };
    let cut = max_matching_cut(&space, &kernel, &pi, log2_lambda)?;
    let bounds = claimed_bounds(g.n(), g.m(), sc.k)?;

    Ok(AnalysisReport {
        n: g.n(),
        m: g.m(),
        k: sc.k,
        size_counts: sc.counts.clone(),
        states: space.len(),
        log2_lambda,
        log2_z: partition_function(&space, log2_lambda),
        pr_k_gibbs: gibbs_max_mass(&space, log2_lambda),
        t_mix,
        t_mix_error,
        eps: opts.mixing.eps,
        phi_min,
        phi_cut: cut.phi_direct,
        phi_cut_closed_form: cut.phi_closed_form,
        t_relax: phi_min.map(|p| 1.0 / p),
        claimed_upper: bounds.t_mix_upper,
        claimed_lower: bounds.t_mix_lower,
    })
}
