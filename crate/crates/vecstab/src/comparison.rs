//! Comparison matrices over vector Lyapunov functions.
//!
//! Given per-subsystem Lyapunov functions `V_i` with invariant levels
//! `gamma_i0`, this module synthesizes a Metzler matrix `A` such that the
//! vector of Lyapunov values satisfies `v' <= A v` along trajectories in the
//! product sublevel domain. Two constructions are implemented:
//!
//! * the direct route: one SOS program per subsystem yields a row of `A`
//!   with the row sum minimized, all decision objects entering linearly;
//! * the traditional route: certified norm bounds (`eta_i1 |x|^2 <= V_i <=
//!   eta_i2 |x|^2`, decay `eta_i3`, coupling gains `zeta_ij`) assembled into
//!   a matrix `At` acting on `sqrt(V_i)` values, with an exact row-sum
//!   doubling transform back to `V` coordinates.
//!
//! A certificate is the matrix together with its Hurwitz, diagonal-dominance
//! and level-invariance verdicts plus optional attraction-region weights.

use crate::linalg::{self, LinalgError, Mat};
use crate::lyap::{sum_squares, LyapunovFunction};
use crate::network::Network;
use crate::poly::{lie_derivative, Monomial, Polynomial, VarId};
use crate::sdp::{SdpSettings, SdpStatus};
use crate::sosprog::{Sign, SosError, SosExpression, SosProgram};
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

/// Slack for every strict sign test on matrix entries: the invariance check
/// demands `(A w)_i <= -STRICT_SLACK` and emitted off-diagonals may not fall
/// below `-STRICT_SLACK`.
pub const STRICT_SLACK: f64 = 1e-9;

/// Degree of the domain multipliers in the row and eta programs.
const SIGMA_DEGREE: usize = 2;

/// Relative tolerance of the coupling-gain bisection.
const ZETA_REL_TOL: f64 = 1e-3;

/// Initial upper bracket for the gain: this factor times the coefficient
/// 1-norm of `grad(V_i)' g_ij`. Crude but safe; widened further if needed.
const ZETA_BRACKET_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum ComparisonError {
    #[error("gamma0[{index}] = {value} is outside (0, 1)")]
    BadLevel { index: usize, value: f64 },
    #[error("lyapunov functions must be normalized and indexed by subsystem id")]
    BadLyapunov,
    #[error("subsystem {id}: traditional bounds need a purely quadratic Lyapunov function")]
    NotQuadratic { id: usize },
    #[error("matrix entry ({i}, {j}) = {value:e} breaks the Metzler sign pattern")]
    NotMetzler { i: usize, j: usize, value: f64 },
    #[error("row {i} sums to {sum:e}, not negative; the squared transform does not apply")]
    RowSumNotNegative { i: usize, sum: f64 },
    #[error("squared transform needs a complete sqrt-coordinate certificate")]
    IncompleteCertificate,
    #[error("attraction-region weights invalid: {0}")]
    BadWeights(String),
    #[error(transparent)]
    Sos(#[from] SosError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Approach {
    Direct,
    Traditional,
    TraditionalSquared,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::Direct => "direct",
            Approach::Traditional => "traditional",
            Approach::TraditionalSquared => "traditional-squared",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Optimal,
    /// The row SDP (or a bound behind it) has no certificate at this level
    /// vector. A verdict, not an error: other rows may still be fine.
    Uncertifiable,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Optimal => "optimal",
            RowStatus::Uncertifiable => "uncertifiable",
        })
    }
}

/// One row of the comparison matrix, produced at subsystem level.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub id: usize,
    /// Pairs `(j, a_ij)` over the neighborhood, ascending in `j`; entries
    /// outside the neighborhood are zero by construction. NaN when
    /// uncertifiable.
    pub entries: Vec<(usize, f64)>,
    /// Achieved row sum `sum_j a_ij`.
    pub objective: f64,
    /// Domain multipliers `(j, sigma_ij)` recovered from the solved program.
    pub multipliers: Vec<(usize, Polynomial)>,
    pub status: RowStatus,
}

impl ComparisonRow {
    /// Decay inequality body `sum_j a_ij V_j - Vdot_i` over the neighborhood
    /// variables; the row certifies its nonnegativity on the product
    /// sublevel domain. Only meaningful for an optimal row.
    pub fn decay_body(&self, net: &Network, lyap: &[LyapunovFunction]) -> Polynomial {
        let sub = net.subsystem(self.id);
        let coupling = net.coupling(self.id);
        let field: Vec<Polynomial> = sub.f.iter().zip(&coupling).map(|(f, g)| f + g).collect();
        let vdot = lie_derivative(&lyap[self.id].v, &sub.vars, &field);
        let mut body = vdot.scale(-1.0);
        for &(j, a) in &self.entries {
            body = &body + &lyap[j].v.scale(a);
        }
        body
    }
}

/// Per-row summary carried into reports.
#[derive(Clone, Debug)]
pub struct RowSummary {
    pub id: usize,
    pub status: RowStatus,
    /// Degrees of the multipliers the row's programs used, in program order.
    pub sigma_degrees: Vec<usize>,
    /// Row sum in the matrix's own coordinates; NaN when uncertifiable.
    pub objective: f64,
}

/// A comparison matrix with its stability and invariance verdicts.
#[derive(Clone, Debug)]
pub struct ComparisonCertificate {
    pub approach: Approach,
    pub gamma0: Vec<f64>,
    /// Rows of uncertifiable subsystems are NaN, never dropped.
    pub a: Mat,
    /// NaN unless every row is certified.
    pub max_re_lambda: f64,
    pub diag_dominant: bool,
    pub hurwitz: bool,
    /// Strict componentwise negativity of `A w` for the approach's level
    /// weights, with slack [`STRICT_SLACK`].
    pub invariant: bool,
    /// `p = -A^{-1} 1`, present when the matrix is complete and Hurwitz and
    /// the verification `p > 0`, `A p < 0` passed.
    pub roa_weights: Option<Vec<f64>>,
    pub rows: Vec<RowSummary>,
    pub complete: bool,
}

impl ComparisonCertificate {
    /// Level weights the invariance test multiplies against: the levels
    /// themselves in `V` coordinates, their square roots for the
    /// sqrt-coordinate matrix.
    pub fn invariance_weights(&self) -> Vec<f64> {
        match self.approach {
            Approach::Direct | Approach::TraditionalSquared => self.gamma0.clone(),
            Approach::Traditional => self.gamma0.iter().map(|g| g.sqrt()).collect(),
        }
    }

    /// Exponential stability of the level set is certified: every row
    /// solved, the matrix is Hurwitz and the level vector is invariant.
    pub fn certified(&self) -> bool {
        self.complete && self.hurwitz && self.invariant
    }

    /// Largest row sum over certified rows; NaN when incomplete.
    pub fn max_row_sum(&self) -> f64 {
        if !self.complete {
            return f64::NAN;
        }
        let m = self.a.rows();
        (0..m)
            .map(|i| self.a.row(i).iter().sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn validate_inputs(
    net: &Network,
    lyap: &[LyapunovFunction],
    gamma0: &[f64],
) -> Result<(), ComparisonError> {
    if lyap.len() != net.len() || lyap.iter().enumerate().any(|(i, l)| l.id != i || !l.normalized)
    {
        return Err(ComparisonError::BadLyapunov);
    }
    if gamma0.len() != net.len() {
        return Err(ComparisonError::BadLyapunov);
    }
    for (index, &value) in gamma0.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(ComparisonError::BadLevel { index, value });
        }
    }
    Ok(())
}

/// Minimizes the row sum `sum_{j in N_i} a_ij` subject to
/// `-grad(V_i)'(f_i + g_i) + sum_j (a_ij V_j - sigma_ij (gamma_j0 - V_j))`
/// being SOS over the neighborhood variables, with `a_ij >= 0` off the
/// diagonal and degree-2 multipliers vanishing at the origin. A single SDP:
/// every decision object enters linearly.
pub fn direct_row(
    i: usize,
    net: &Network,
    lyap: &[LyapunovFunction],
    gamma0: &[f64],
) -> Result<ComparisonRow, ComparisonError> {
    validate_inputs(net, lyap, gamma0)?;
    let sub = net.subsystem(i);
    let nbrs = net.neighborhood(i);
    let xbar = net.neighborhood_vars(i);
    let coupling = net.coupling(i);
    let field: Vec<Polynomial> = sub.f.iter().zip(&coupling).map(|(f, g)| f + g).collect();
    let vdot = lie_derivative(&lyap[i].v, &sub.vars, &field);

    let mut prog = SosProgram::new();
    let mut a_vars = Vec::with_capacity(nbrs.len());
    let mut sig_vars = Vec::with_capacity(nbrs.len());
    for &j in &nbrs {
        let sign = if j == i { Sign::Free } else { Sign::Nonnegative };
        a_vars.push(prog.scalar(&format!("a_{i}_{j}"), sign));
        sig_vars.push(prog.sos_multiplier(&format!("sigma_{i}_{j}"), &xbar, SIGMA_DEGREE)?);
    }
    let mut e = SosExpression::new(vdot.scale(-1.0));
    for (k, &j) in nbrs.iter().enumerate() {
        e.add_scalar(a_vars[k], &lyap[j].v);
        e.add_sos(sig_vars[k], &(&lyap[j].v - &Polynomial::constant(gamma0[j])));
    }
    prog.require_sos(e);
    let objective: Vec<(crate::sosprog::ScalarVar, f64)> =
        a_vars.iter().map(|&a| (a, 1.0)).collect();
    prog.minimize(&objective);

    let compiled = prog.compile()?;
    let sol = compiled.solve(&SdpSettings::default())?;
    if sol.status != SdpStatus::Optimal {
        return Ok(ComparisonRow {
            id: i,
            entries: nbrs.iter().map(|&j| (j, f64::NAN)).collect(),
            objective: f64::NAN,
            multipliers: Vec::new(),
            status: RowStatus::Uncertifiable,
        });
    }
    let entries: Vec<(usize, f64)> = nbrs
        .iter()
        .zip(&a_vars)
        .map(|(&j, &a)| (j, compiled.scalar_value(&sol.sdp, a)))
        .collect();
    let multipliers: Vec<(usize, Polynomial)> = nbrs
        .iter()
        .zip(&sig_vars)
        .map(|(&j, &s)| (j, compiled.sos_value(&sol.sdp, s)))
        .collect();
    Ok(ComparisonRow {
        id: i,
        entries,
        objective: sol.objective,
        multipliers,
        status: RowStatus::Optimal,
    })
}

/// Full direct construction: rows solved independently, then assembled.
#[derive(Clone, Debug)]
pub struct DirectOutcome {
    pub rows: Vec<ComparisonRow>,
    pub certificate: ComparisonCertificate,
}

pub fn direct_matrix(
    net: &Network,
    lyap: &[LyapunovFunction],
    gamma0: &[f64],
) -> Result<DirectOutcome, ComparisonError> {
    validate_inputs(net, lyap, gamma0)?;
    let m = net.len();
    let rows: Vec<ComparisonRow> = (0..m)
        .into_par_iter()
        .map(|i| direct_row(i, net, lyap, gamma0))
        .collect::<Result<_, _>>()?;
    let row_entries: Vec<Option<Vec<(usize, f64)>>> = rows
        .iter()
        .map(|r| (r.status == RowStatus::Optimal).then(|| r.entries.clone()))
        .collect();
    let summaries: Vec<RowSummary> = rows
        .iter()
        .map(|r| RowSummary {
            id: r.id,
            status: r.status,
            sigma_degrees: vec![SIGMA_DEGREE; net.neighborhood(r.id).len()],
            objective: r.objective,
        })
        .collect();
    let certificate = assemble_certificate(
        Approach::Direct,
        gamma0,
        &gamma0.to_vec(),
        m,
        &row_entries,
        summaries,
    )?;
    Ok(DirectOutcome { rows, certificate })
}

fn invariance_ok(a: &Mat, w: &[f64]) -> bool {
    (0..a.rows()).all(|i| {
        let s: f64 = (0..a.cols()).map(|j| a.get(i, j) * w[j]).sum();
        s <= -STRICT_SLACK
    })
}

fn assemble_certificate(
    approach: Approach,
    gamma0: &[f64],
    weights: &[f64],
    m: usize,
    row_entries: &[Option<Vec<(usize, f64)>>],
    rows: Vec<RowSummary>,
) -> Result<ComparisonCertificate, ComparisonError> {
    let mut a = Mat::zeros(m, m);
    let mut complete = true;
    for (i, entry) in row_entries.iter().enumerate() {
        match entry {
            Some(pairs) => {
                for &(j, value) in pairs {
                    if i != j && value < -STRICT_SLACK {
                        return Err(ComparisonError::NotMetzler { i, j, value });
                    }
                    a.set(i, j, value);
                }
            }
            None => {
                complete = false;
                for j in 0..m {
                    a.set(i, j, f64::NAN);
                }
            }
        }
    }
    let (max_re_lambda, diag_dominant, hurwitz, invariant, roa) = if complete {
        let max_re = linalg::max_re(&linalg::eigenvalues(&a)?);
        let dd = (0..m).all(|i| {
            let off: f64 = (0..m).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum();
            a.get(i, i) < 0.0 && -a.get(i, i) > off
        });
        let hw = max_re < 0.0;
        // Gershgorin: strict dominance with a negative diagonal keeps every
        // disc in the open left half plane.
        assert!(!dd || hw, "diagonally dominant matrix reported non-Hurwitz");
        let inv = invariance_ok(&a, weights);
        let roa = if hw { roa_weights(&a).ok() } else { None };
        (max_re, dd, hw, inv, roa)
    } else {
        (f64::NAN, false, false, false, None)
    };
    Ok(ComparisonCertificate {
        approach,
        gamma0: gamma0.to_vec(),
        a,
        max_re_lambda,
        diag_dominant,
        hurwitz,
        invariant,
        roa_weights: roa,
        rows,
        complete,
    })
}

/// Certified norm bounds of one subsystem and its incoming couplings.
#[derive(Clone, Debug)]
pub struct SubsystemBounds {
    pub id: usize,
    /// `eta1 |x|^2 <= V <= eta2 |x|^2` on the level set.
    pub eta1: f64,
    pub eta2: f64,
    /// `-grad(V)' f >= eta3 |x|^2` on the level set.
    pub eta3: f64,
    /// Certified coupling gains `(source j, zeta_ij)`, ascending in `j`:
    /// `|grad(V_i)' g_ij| <= zeta_ij |x_i| |x_j|` on the product level set.
    pub zeta: Vec<(usize, f64)>,
    pub available: bool,
}

impl SubsystemBounds {
    /// Bounds for `v = sqrt(V)`: `eta1t |x| <= v <= eta2t |x|`.
    pub fn eta1_tilde(&self) -> f64 {
        self.eta1.sqrt()
    }

    pub fn eta2_tilde(&self) -> f64 {
        self.eta2.sqrt()
    }

    /// Decay rate of `v`: `eta3t = eta3 / (2 sqrt(eta2))`.
    pub fn eta3_tilde(&self) -> f64 {
        self.eta3 / (2.0 * self.eta2.sqrt())
    }

    /// Gain on `v`: `zetat = zeta / (2 sqrt(eta1))`.
    pub fn zeta_tilde(&self, zeta: f64) -> f64 {
        zeta / (2.0 * self.eta1.sqrt())
    }

    fn unavailable(id: usize) -> SubsystemBounds {
        SubsystemBounds {
            id,
            eta1: f64::NAN,
            eta2: f64::NAN,
            eta3: f64::NAN,
            zeta: Vec::new(),
            available: false,
        }
    }
}

/// Bounds for the whole network, indexed by subsystem id.
#[derive(Clone, Debug)]
pub struct TraditionalBounds {
    pub per_subsystem: Vec<SubsystemBounds>,
}

impl TraditionalBounds {
    pub fn available(&self) -> bool {
        self.per_subsystem.iter().all(|b| b.available)
    }
}

/// Optimizes `eta >= 0` such that `known + eta * eta_mult + sigma (V - gamma)`
/// is SOS. Returns the optimum, or None when the program has no certificate.
fn eta_bound(
    known: Polynomial,
    eta_mult: &Polynomial,
    v: &Polynomial,
    gamma: f64,
    vars: &[VarId],
    maximize: bool,
) -> Result<Option<f64>, ComparisonError> {
    let mut prog = SosProgram::new();
    let eta = prog.scalar("eta", Sign::Nonnegative);
    let sigma = prog.sos_multiplier("sigma", vars, SIGMA_DEGREE)?;
    let mut e = SosExpression::new(known);
    e.add_scalar(eta, eta_mult);
    e.add_sos(sigma, &(v - &Polynomial::constant(gamma)));
    prog.require_sos(e);
    if maximize {
        prog.maximize(&[(eta, 1.0)]);
    } else {
        prog.minimize(&[(eta, 1.0)]);
    }
    let sol = prog.compile()?.solve(&SdpSettings::default())?;
    Ok((sol.status == SdpStatus::Optimal).then_some(sol.objective))
}

/// Bidegrees `(degree in vars_i, remaining degree)` present in `p`.
fn bidegrees(p: &Polynomial, vars_i: &[VarId]) -> std::collections::BTreeSet<(usize, usize)> {
    p.terms()
        .map(|(m, _)| {
            let di: usize = m
                .exps()
                .iter()
                .filter(|(v, _)| vars_i.contains(v))
                .map(|&(_, e)| e as usize)
                .sum();
            (di, m.degree() - di)
        })
        .collect()
}

/// All products of a degree-`p` monomial over `vars_i` with a degree-`q`
/// monomial over `vars_j`.
fn mixed_monomials(vars_i: &[VarId], vars_j: &[VarId], p: usize, q: usize) -> Vec<Monomial> {
    let left = crate::poly::monomials_in_degree_range(vars_i, p, p);
    let right = crate::poly::monomials_in_degree_range(vars_j, q, q);
    left.iter()
        .flat_map(|a| right.iter().map(move |b| a.mul(b)))
        .collect()
}

/// Smallest certified gain: bisects `zeta` on feasibility of
/// `zeta^2 |x_i|^2 |x_j|^2 - (grad(V_i)' g_ij)^2 - sigma_1 (gamma_i0 - V_i)
/// - sigma_2 (gamma_j0 - V_j)` being SOS.
///
/// Every monomial this constraint can contain has positive degree in both
/// variable blocks: `grad(V_i)' g_ij` mixes the blocks because `V_i` is
/// quadratic in `x_i` and every coupling term contains a source variable.
/// The Gram bases are therefore restricted to block-mixing monomials whose
/// squares the constraint supports; pure-block monomials would carry Gram
/// diagonals that are zero at every feasible point and break strict
/// feasibility. For the same reason the multipliers are quartic forms over
/// the bilinear monomials `x_i x_j` rather than generic degree-2 SOS.
#[allow(clippy::too_many_arguments)]
fn zeta_min(
    dvg: &Polynomial,
    vars_i: &[VarId],
    vars_j: &[VarId],
    vi: &Polynomial,
    vj: &Polynomial,
    gamma_i: f64,
    gamma_j: f64,
) -> Result<Option<f64>, ComparisonError> {
    if dvg.is_zero() {
        return Ok(Some(0.0));
    }
    let dvg_sq = dvg * dvg;
    let prod_norm = &sum_squares(vars_i) * &sum_squares(vars_j);
    let sigma_basis = mixed_monomials(vars_i, vars_j, 1, 1);

    // Achievable bidegrees: the gain and multiplier terms contribute
    // (2,2), (4,2) and (2,4); the squared coupling derivative its own.
    let mut achievable = bidegrees(&dvg_sq, vars_i);
    achievable.extend([(2, 2), (4, 2), (2, 4)]);
    let pmax = achievable.iter().map(|&(a, _)| a).max().unwrap() / 2;
    let qmax = achievable.iter().map(|&(_, b)| b).max().unwrap() / 2;
    let mut gram_basis = Vec::new();
    for p in 1..=pmax {
        for q in 1..=qmax {
            if achievable.contains(&(2 * p, 2 * q)) {
                gram_basis.extend(mixed_monomials(vars_i, vars_j, p, q));
            }
        }
    }

    let feasible = |zeta: f64| -> Result<bool, ComparisonError> {
        let mut prog = SosProgram::new();
        let s1 = prog.sos_with_basis("sigma_i", sigma_basis.clone());
        let s2 = prog.sos_with_basis("sigma_j", sigma_basis.clone());
        let mut e = SosExpression::new(&prod_norm.scale(zeta * zeta) - &dvg_sq);
        e.add_sos(s1, &(vi - &Polynomial::constant(gamma_i)));
        e.add_sos(s2, &(vj - &Polynomial::constant(gamma_j)));
        prog.require_sos_with_basis(e, gram_basis.clone());
        let sol = prog.compile()?.solve(&SdpSettings::default())?;
        Ok(sol.status == SdpStatus::Optimal)
    };

    let mut hi = ZETA_BRACKET_FACTOR * dvg.coeff_l1();
    let mut widened = 0;
    while !feasible(hi)? {
        if widened == 6 {
            return Ok(None);
        }
        hi *= 2.0;
        widened += 1;
    }
    let mut lo = 0.0;
    while hi - lo > ZETA_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // The returned gain is the smallest value observed feasible, so the
    // bound it certifies is conservative.
    Ok(Some(hi))
}

/// Norm and coupling bounds for subsystem `i` on its level set. Each eta is
/// one SDP; each incoming coupling gain is a bisection over feasibility
/// SDPs. Any failed sub-problem makes the whole entry unavailable.
pub fn traditional_bounds(
    i: usize,
    net: &Network,
    lyap: &[LyapunovFunction],
    gamma0: &[f64],
) -> Result<SubsystemBounds, ComparisonError> {
    validate_inputs(net, lyap, gamma0)?;
    let sub = net.subsystem(i);
    let vi = &lyap[i].v;
    if vi.degree() != 2 || vi.min_degree() != 2 {
        return Err(ComparisonError::NotQuadratic { id: i });
    }
    let gamma_i = gamma0[i];
    let norm2 = sum_squares(&sub.vars);

    let eta1 = eta_bound(
        vi.clone(),
        &norm2.scale(-1.0),
        vi,
        gamma_i,
        &sub.vars,
        true,
    )?;
    let eta2 = eta_bound(vi.scale(-1.0), &norm2, vi, gamma_i, &sub.vars, false)?;
    let vdot = lie_derivative(vi, &sub.vars, &sub.f);
    let eta3 = eta_bound(
        vdot.scale(-1.0),
        &norm2.scale(-1.0),
        vi,
        gamma_i,
        &sub.vars,
        true,
    )?;
    let (eta1, eta2, eta3) = match (eta1, eta2, eta3) {
        (Some(a), Some(b), Some(c)) if a > 0.0 && b > 0.0 && c > 0.0 => (a, b, c),
        _ => return Ok(SubsystemBounds::unavailable(i)),
    };
    debug_assert!(eta1 <= eta2 * (1.0 + 1e-9));

    let mut zeta = Vec::new();
    for &j in net.neighborhood(i).iter().filter(|&&j| j != i) {
        let inter = net
            .interactions_into(i)
            .find(|e| e.source == j)
            .expect("neighborhood lists only actual sources");
        let dvg = lie_derivative(vi, &sub.vars, &inter.g);
        if lyap[j].v.degree() != 2 || lyap[j].v.min_degree() != 2 {
            return Err(ComparisonError::NotQuadratic { id: j });
        }
        match zeta_min(
            &dvg,
            &sub.vars,
            &net.subsystem(j).vars,
            vi,
            &lyap[j].v,
            gamma_i,
            gamma0[j],
        )? {
            Some(z) => zeta.push((j, z)),
            None => return Ok(SubsystemBounds::unavailable(i)),
        }
    }
    Ok(SubsystemBounds {
        id: i,
        eta1,
        eta2,
        eta3,
        zeta,
        available: true,
    })
}

/// Assembles the sqrt-coordinate matrix `At` from per-subsystem bounds:
/// `at_ii = -eta3t_i / eta2t_i`, `at_ij = zetat_ij / eta1t_j` for sources.
/// The invariance test multiplies against `sqrt(gamma0)`.
pub fn traditional_matrix(
    net: &Network,
    lyap: &[LyapunovFunction],
    gamma0: &[f64],
) -> Result<(TraditionalBounds, ComparisonCertificate), ComparisonError> {
    validate_inputs(net, lyap, gamma0)?;
    let m = net.len();
    let per_subsystem: Vec<SubsystemBounds> = (0..m)
        .into_par_iter()
        .map(|i| traditional_bounds(i, net, lyap, gamma0))
        .collect::<Result<_, _>>()?;
    let mut row_entries: Vec<Option<Vec<(usize, f64)>>> = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for b in &per_subsystem {
        // A row also needs eta1 of each source to scale its gains.
        let usable = b.available && b.zeta.iter().all(|&(j, _)| per_subsystem[j].available);
        let (entry, status, objective) = if usable {
            let mut pairs = vec![(b.id, -b.eta3_tilde() / b.eta2_tilde())];
            for &(j, z) in &b.zeta {
                pairs.push((j, b.zeta_tilde(z) / per_subsystem[j].eta1_tilde()));
            }
            pairs.sort_by_key(|&(j, _)| j);
            let sum: f64 = pairs.iter().map(|&(_, v)| v).sum();
            (Some(pairs), RowStatus::Optimal, sum)
        } else {
            (None, RowStatus::Uncertifiable, f64::NAN)
        };
        let mut sigma_degrees = vec![SIGMA_DEGREE; 3];
        sigma_degrees.extend(std::iter::repeat(4).take(2 * b.zeta.len()));
        rows.push(RowSummary {
            id: b.id,
            status,
            sigma_degrees,
            objective,
        });
        row_entries.push(entry);
    }
    let weights: Vec<f64> = gamma0.iter().map(|g| g.sqrt()).collect();
    let certificate = assemble_certificate(
        Approach::Traditional,
        gamma0,
        &weights,
        m,
        &row_entries,
        rows,
    )?;
    Ok((TraditionalBounds { per_subsystem }, certificate))
}

/// Transforms a sqrt-coordinate matrix into `V` coordinates:
/// `a_ii = at_ii + sum_j at_ij`, off-diagonals unchanged. Requires the input
/// Metzler with every row sum negative; each output row sum is then exactly
/// twice the input row sum, so stability verdicts carry over.
pub fn squared_transform(at: &Mat) -> Result<Mat, ComparisonError> {
    let m = at.rows();
    assert!(at.is_square(), "comparison matrices are square");
    for i in 0..m {
        for j in 0..m {
            if i != j && at.get(i, j) < -STRICT_SLACK {
                return Err(ComparisonError::NotMetzler {
                    i,
                    j,
                    value: at.get(i, j),
                });
            }
        }
    }
    let mut a = at.clone();
    for i in 0..m {
        let sum: f64 = at.row(i).iter().sum();
        if !(sum < 0.0) {
            return Err(ComparisonError::RowSumNotNegative { i, sum });
        }
        a.set(i, i, at.get(i, i) + sum);
    }
    Ok(a)
}

/// Applies [`squared_transform`] to a complete sqrt-coordinate certificate
/// and re-derives every verdict in `V` coordinates.
pub fn squared_certificate(
    traditional: &ComparisonCertificate,
) -> Result<ComparisonCertificate, ComparisonError> {
    if traditional.approach != Approach::Traditional || !traditional.complete {
        return Err(ComparisonError::IncompleteCertificate);
    }
    let a = squared_transform(&traditional.a)?;
    let m = a.rows();
    let row_entries: Vec<Option<Vec<(usize, f64)>>> = (0..m)
        .map(|i| Some((0..m).map(|j| (j, a.get(i, j))).collect()))
        .collect();
    let rows: Vec<RowSummary> = traditional
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| RowSummary {
            id: r.id,
            status: r.status,
            sigma_degrees: r.sigma_degrees.clone(),
            objective: a.row(i).iter().sum(),
        })
        .collect();
    assemble_certificate(
        Approach::TraditionalSquared,
        &traditional.gamma0,
        &traditional.gamma0.clone(),
        m,
        &row_entries,
        rows,
    )
}

/// Attraction-region weights `p = -A^{-1} 1` for a Hurwitz Metzler matrix;
/// `-A^{-1}` is entrywise nonnegative there, so `p > 0` and `A p = -1 < 0`.
/// Both properties are verified on the computed vector.
pub fn roa_weights(a: &Mat) -> Result<Vec<f64>, ComparisonError> {
    let m = a.rows();
    let p = linalg::solve_linear(a, &vec![-1.0; m])?;
    for (i, &pi) in p.iter().enumerate() {
        if !(pi > 0.0) {
            return Err(ComparisonError::BadWeights(format!("p[{i}] = {pi:e}")));
        }
    }
    let ap = a.matvec(&p);
    for (i, &v) in ap.iter().enumerate() {
        if !(v < 0.0) {
            return Err(ComparisonError::BadWeights(format!("(A p)[{i}] = {v:e}")));
        }
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepStatus {
    /// Complete, Hurwitz and invariant.
    Certified,
    /// Complete but failing a stability or invariance test.
    Uncertified,
    /// At least one row had no certificate.
    Partial,
}

impl fmt::Display for SweepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepStatus::Certified => "certified",
            SweepStatus::Uncertified => "uncertified",
            SweepStatus::Partial => "partial",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub gamma_star: f64,
    pub approach: Approach,
    /// Largest row sum of the emitted matrix: `A` for direct, `At` for
    /// traditional. Under a uniform level this is the sharpest invariance
    /// indicator; it crosses zero no later than the spectral abscissa.
    pub max_row_sum: f64,
    pub max_re_lambda: f64,
    pub status: SweepStatus,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// CSV with nine significant digits, NaN cells spelled `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma_star,approach,max_row_sum,max_re_lambda,status\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.8e},{},{:.8e},{:.8e},{}\n",
                r.gamma_star, r.approach, r.max_row_sum, r.max_re_lambda, r.status
            ));
        }
        out
    }
}

fn sweep_row(gamma_star: f64, cert: &ComparisonCertificate) -> SweepRow {
    let status = if !cert.complete {
        SweepStatus::Partial
    } else if cert.certified() {
        SweepStatus::Certified
    } else {
        SweepStatus::Uncertified
    };
    SweepRow {
        gamma_star,
        approach: cert.approach,
        max_row_sum: cert.max_row_sum(),
        max_re_lambda: cert.max_re_lambda,
        status,
    }
}

/// Runs both constructions over a grid of uniform levels
/// `gamma_i0 = gamma_star` and tabulates their stability indicators.
pub fn gamma_sweep(
    net: &Network,
    lyap: &[LyapunovFunction],
    grid: &[f64],
) -> Result<SweepTable, ComparisonError> {
    let mut rows = Vec::with_capacity(2 * grid.len());
    for &gamma_star in grid {
        let gamma0 = vec![gamma_star; net.len()];
        let direct = direct_matrix(net, lyap, &gamma0)?;
        rows.push(sweep_row(gamma_star, &direct.certificate));
        let (_, traditional) = traditional_matrix(net, lyap, &gamma0)?;
        rows.push(sweep_row(gamma_star, &traditional));
    }
    Ok(SweepTable { rows })
}
