//! Path-pair comparisons between the closed forms and their independent
//! references.
//!
//! Every pair reports the largest entrywise deviation
//! `|a - b| / max(1, |b|)` over a `dim x dim` block.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hlpoly::SERIES_CAP;
use crate::matrix::ComplexMatrix;
use crate::numeric::scaled_deviation;
use crate::oracle;
use crate::state::{self, StateDerived, StateParams};
use crate::unitary::{self, derive_ordering, OrderingParams};

pub const UNITARY_VS_FACTORED: &str = "unitary_vs_factored";
pub const UNITARY_VS_BRUTE: &str = "unitary_vs_brute";
pub const STATE_VS_SERIES: &str = "state_vs_series";
pub const STATE_VS_BRUTE: &str = "state_vs_brute";
pub const SERIES_VS_BRUTE: &str = "series_vs_brute";
pub const LAGUERRE_VS_STATE: &str = "laguerre_vs_state";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub unitary_vs_factored: f64,
    pub unitary_vs_brute: f64,
    pub state_vs_series: f64,
    pub state_vs_brute: f64,
    pub series_vs_brute: f64,
    pub laguerre_vs_state: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitary_vs_factored: 1e-10,
            unitary_vs_brute: 1e-9,
            state_vs_series: 1e-8,
            state_vs_brute: 1e-8,
            series_vs_brute: 1e-8,
            laguerre_vs_state: 1e-10,
        }
    }
}

impl Tolerances {
    /// The same tolerance for every pair.
    pub fn uniform(tol: f64) -> Self {
        Self {
            unitary_vs_factored: tol,
            unitary_vs_brute: tol,
            state_vs_series: tol,
            state_vs_brute: tol,
            series_vs_brute: tol,
            laguerre_vs_state: tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub dim: usize,
    /// Last thermal index of the series path; chosen from `N̄` when `None`.
    pub jmax: Option<usize>,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { dim: 15, jmax: None, tolerances: Tolerances::default() }
    }
}

/// Smallest `jmax` with `Y^{jmax+1} ≤ 1e-13`, capped at the series limit.
pub fn default_jmax(nbar: f64) -> usize {
    let y = nbar / (nbar + 1.0);
    if y == 0.0 {
        return 0;
    }
    let needed = (-13.0 * std::f64::consts::LN_10 / y.ln()).ceil() as usize;
    needed.saturating_sub(1).min(SERIES_CAP)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Reason the pair was not evaluated; skipped pairs count as passed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub alpha: [f64; 2],
    pub phi: f64,
    pub r: f64,
    pub theta: f64,
    pub nbar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ReportParams,
    pub dim: usize,
    pub jmax: usize,
    pub pad_dim: usize,
    pub thermal_truncation_deficit: f64,
    pub pairs: Vec<PairReport>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn pair(&self, name: &str) -> Option<&PairReport> {
        self.pairs.iter().find(|p| p.name == name)
    }
}

/// Runs every path pair for the state `params` and the unitary with the
/// same `(α, z)` and rotation angle `phi`.
pub fn run(params: &StateParams, phi: f64, config: &VerifyConfig) -> Result<VerifyReport> {
    let ordering = derive_ordering(&params.bosonic(phi));
    let derived = state::derive_state(params)?;
    run_with(params, phi, config, &ordering, &derived)
}

/// As [`run`], with the closed forms evaluated from the supplied (possibly
/// altered) constants while every reference path uses `params` directly.
pub fn run_with(
    params: &StateParams,
    phi: f64,
    config: &VerifyConfig,
    ordering: &OrderingParams,
    derived: &StateDerived,
) -> Result<VerifyReport> {
    let dim = config.dim;
    let tol = &config.tolerances;
    let jmax = config.jmax.unwrap_or_else(|| default_jmax(params.nbar()));
    let mut pairs = Vec::new();

    let closed_u = unitary::unitary_matrix_from_ordering(ordering, dim)?;
    let factored = ComplexMatrix::from_fn_result(dim, dim, |m, n| unitary::appendix_a_coeff(m, n, ordering))?;
    pairs.push(compare(UNITARY_VS_FACTORED, &closed_u, &factored, tol.unitary_vs_factored));
    let u_brute = oracle::unitary_brute(&params.bosonic(phi), dim)?;
    pairs.push(compare(UNITARY_VS_BRUTE, &closed_u, &u_brute.matrix, tol.unitary_vs_brute));

    let closed = state::rho_matrix_from_derived(derived, dim)?;
    let series = state::rho_series_matrix(params, dim, jmax)?;
    let rho_brute = oracle::rho_brute(params, dim)?;
    pairs.push(compare(STATE_VS_SERIES, &closed, &series, tol.state_vs_series));
    pairs.push(compare(STATE_VS_BRUTE, &closed, &rho_brute.matrix, tol.state_vs_brute));
    pairs.push(compare(SERIES_VS_BRUTE, &series, &rho_brute.matrix, tol.series_vs_brute));

    if params.r() == 0.0 && params.nbar() > 0.0 {
        let laguerre = ComplexMatrix::from_fn_result(dim, dim, |m, n| {
            state::displaced_helstrom_coeff(m, n, params.alpha(), params.nbar())
        })?;
        pairs.push(compare(LAGUERRE_VS_STATE, &laguerre, &closed, tol.laguerre_vs_state));
    } else {
        pairs.push(PairReport {
            name: LAGUERRE_VS_STATE.into(),
            max_deviation: 0.0,
            tolerance: tol.laguerre_vs_state,
            passed: true,
            skipped: Some("needs r = 0 and N̄ > 0".into()),
        });
    }

    let all_passed = pairs.iter().all(|p| p.passed);
    let alpha: Complex64 = params.alpha();
    Ok(VerifyReport {
        params: ReportParams {
            alpha: [alpha.re, alpha.im],
            phi: unitary::reduce_angle(phi),
            r: params.r(),
            theta: params.theta(),
            nbar: params.nbar(),
        },
        dim,
        jmax,
        pad_dim: rho_brute.pad_dim,
        thermal_truncation_deficit: oracle::thermal_truncation_deficit(params.nbar(), rho_brute.pad_dim),
        pairs,
        all_passed,
    })
}

/// Largest `|a - b| / max(1, |b|)` over matching entries.
pub fn max_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| {
            let d = scaled_deviation(*x, *y);
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

fn compare(name: &str, a: &ComplexMatrix, b: &ComplexMatrix, tolerance: f64) -> PairReport {
    let max_deviation = max_deviation(a, b);
    PairReport { name: name.into(), max_deviation, tolerance, passed: max_deviation <= tolerance, skipped: None }
}

/// Outcome of [`mehler_grid_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MehlerCheck {
    pub points: usize,
    pub terms: usize,
    pub bound: f64,
    pub seed: u64,
    pub max_deviation: f64,
    /// `|4 y t² v|` at the worst point.
    pub worst_ratio: f64,
    /// Deviation at each point, in sampling order, with its `|4 y t² v|`.
    pub deviations: Vec<[f64; 2]>,
}

/// Compares the closed Mehler kernel with its `terms`-term series at
/// `points` random arguments. `x`, `z`, `y`, `v`, `t` are drawn from the
/// square `|Re|, |Im| < 1` and rejected unless `|4 y t² v| ≤ bound`.
pub fn mehler_grid_check(points: usize, terms: usize, bound: f64, seed: u64) -> Result<MehlerCheck> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = move || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut deviations = Vec::with_capacity(points);
    while deviations.len() < points {
        let (x, y, z, v, t) = (draw(), draw(), draw(), draw(), draw());
        let ratio = (y * t * t * v * 4.0).norm();
        if ratio > bound {
            continue;
        }
        let closed = crate::hlpoly::mehler_closed(x, y, z, v, t)?;
        let series = crate::hlpoly::mehler_series(x, y, z, v, t, terms - 1)?.value;
        deviations.push([scaled_deviation(series, closed), ratio]);
    }
    let worst = deviations.iter().copied().fold([0.0, 0.0], |acc, d| if d[0] > acc[0] { d } else { acc });
    Ok(MehlerCheck { points, terms, bound, seed, max_deviation: worst[0], worst_ratio: worst[1], deviations })
}
