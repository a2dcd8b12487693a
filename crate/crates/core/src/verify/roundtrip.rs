use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SCHEMA_VERSION;
use crate::aut::AutElement;
use crate::cocycle::{
    decompose, discrete_cohomologous, extract_multiplicity_cocycles, include, multiplicity_cocycle_residual, AutGroup,
    CocycleReport, ComponentAutGroup, EdgeCocycle,
};
use crate::error::Result;
use crate::io::{matrix_to_json, MatrixJson};
use crate::model::CanonicalModel;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringSummary {
    /// Base translation of every edge label.
    pub discrete: Vec<usize>,
    pub vertices: usize,
    pub components: usize,
    /// Holonomies of the discrete part around the fundamental cycles.
    pub holonomies: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub schema_version: u32,
    pub seed: u64,
    pub charts: usize,
    pub edges: usize,
    pub validation: CocycleReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringSummary>,
    /// `c` with `c_α⁻¹ · d_αβ · c_β = d'_αβ` between the discrete parts before
    /// and after the round trip.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrete_witness: Option<Vec<usize>>,
    /// Max distance between the input and `include(decompose(input))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_residual: Option<f64>,
    /// One `GL(m_k)` label per edge of the covering, per factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity_cocycles: Option<Vec<Vec<MatrixJson>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity_residual: Option<f64>,
    pub pass: bool,
}

/// Validates `Aut_G(X_ρ)`-valued data, decomposes it into a covering and
/// per-factor data, includes it back, and extracts the multiplicity
/// cocycles on the covering.
pub fn cocycle_round_trip(
    model: &Arc<CanonicalModel>,
    cocycle: &EdgeCocycle<AutElement>,
    seed: u64,
    tol: f64,
) -> Result<RoundTripReport> {
    let aut = AutGroup { model: model.clone() };
    let validation = cocycle.validate(&aut, tol);
    let mut report = RoundTripReport {
        schema_version: SCHEMA_VERSION,
        seed,
        charts: cocycle.complex.charts(),
        edges: cocycle.complex.edges().len(),
        validation,
        covering: None,
        discrete_witness: None,
        include_residual: None,
        multiplicity_cocycles: None,
        multiplicity_residual: None,
        pass: false,
    };
    if !report.validation.valid {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g0 = model.base_group();
    let d = decompose(model, cocycle)?;
    report.covering = Some(CoveringSummary {
        discrete: d.discrete.labels.clone(),
        vertices: d.covering.complex.charts(),
        components: d.covering.components,
        holonomies: d.discrete.holonomies(g0),
    });
    let group = ComponentAutGroup::new(model.clone());
    let (back, _) = include(&group, &d.vect, &mut rng)?;
    let include_residual = back.distance(&aut, cocycle);
    let witness = discrete_cohomologous(g0, &d.discrete, &back.map(AutElement::a));
    let cocycles = extract_multiplicity_cocycles(&group, &d.vect, &d.covering)?;
    let multiplicity_residual = multiplicity_cocycle_residual(&group, &cocycles);
    let accept = 10.0 * tol;
    report.pass = witness.is_some() && include_residual <= accept && multiplicity_residual <= accept;
    report.discrete_witness = witness;
    report.include_residual = Some(include_residual);
    report.multiplicity_cocycles =
        Some(cocycles.iter().map(|c| c.labels.iter().map(matrix_to_json).collect()).collect());
    report.multiplicity_residual = Some(multiplicity_residual);
    Ok(report)
}
