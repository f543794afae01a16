//! Per-subsystem Lyapunov analysis of the isolated dynamics: quadratic
//! Lyapunov synthesis from the linearization, certified sublevel-set
//! maximization with normalization, and self-decay rates.
//!
//! All certification goes through sum-of-squares relaxations over the
//! sublevel set `{V <= gamma}`, encoded with one degree-2 domain multiplier.
//! Feasibility-style constraints carry an `EPS_MARGIN * ||x||^2` term so the
//! certified inequalities are strict away from the origin.

use thiserror::Error;

use crate::linalg::{self, LinalgError, Mat};
use crate::network::Subsystem;
use crate::poly::{lie_derivative, Monomial, PolyVector, Polynomial, VarId};
use crate::sdp::{SdpSettings, SdpStatus};
use crate::sosprog::{SosError, SosExpression, SosProgram};

/// Strictness margin for feasibility-style decay constraints.
pub const EPS_MARGIN: f64 = 1e-6;

/// Level above which a sublevel certificate is reported as global.
pub const GAMMA_CAP: f64 = 1e6;

/// Relative tolerance of the level bisection.
pub const LEVEL_REL_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum LyapError {
    #[error("subsystem {id}: linearization is not Hurwitz (max Re lambda = {max_re:.3e})")]
    NotHurwitz { id: usize, max_re: f64 },
    #[error("subsystem {id}: no sublevel set certifiable, even near zero")]
    UncertifiableLevel { id: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Sos(#[from] SosError),
}

/// A positive definite polynomial Lyapunov function for one subsystem. When
/// `normalized` is set, `{v <= 1}` is the certified attraction estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovFunction {
    pub id: usize,
    pub v: Polynomial,
    pub normalized: bool,
}

/// Result of maximizing the certified sublevel of an unnormalized V.
#[derive(Clone, Copy, Debug)]
pub struct LevelCertification {
    pub gamma_max: f64,
    /// Set when the doubling bracket reached [`GAMMA_CAP`] without losing
    /// feasibility.
    pub global: bool,
}

/// Self-decay rate on a sublevel set: the largest alpha with
/// `Vdot <= -alpha V` on `{V <= gamma0}`.
#[derive(Clone, Debug)]
pub struct SelfDecay {
    pub alpha: f64,
    pub certified: bool,
    pub multiplier: Option<Polynomial>,
}

/// Sum of squared variables, the comparison norm used throughout.
pub fn sum_squares(vars: &[VarId]) -> Polynomial {
    let mut p = Polynomial::zero();
    for &v in vars {
        p.add_term(Monomial::from_exps(&[(v, 2)]), 1.0);
    }
    p
}

/// Jacobian of a polynomial field at the origin, rows over components and
/// columns over `vars`.
/// Coefficient matrix of the quadratic part of `v`: symmetric `P` with
/// `x' P x` matching every degree-2 term.
pub fn quadratic_form_matrix(v: &Polynomial, vars: &[VarId]) -> Mat {
    let n = vars.len();
    let mut p = Mat::zeros(n, n);
    for (r, &a) in vars.iter().enumerate() {
        for (c, &b) in vars.iter().enumerate().skip(r) {
            let m = if r == c {
                Monomial::from_exps(&[(a, 2)])
            } else {
                Monomial::from_exps(&[(a, 1), (b, 1)])
            };
            let coeff = v.coeff(&m);
            if r == c {
                p.set(r, c, coeff);
            } else {
                p.set(r, c, 0.5 * coeff);
                p.set(c, r, 0.5 * coeff);
            }
        }
    }
    p
}

pub fn jacobian_at_origin(field: &PolyVector, vars: &[VarId]) -> Mat {
    let n = field.len();
    let mut j = Mat::zeros(n, vars.len());
    for (r, p) in field.iter().enumerate() {
        for (c, &v) in vars.iter().enumerate() {
            j.set(r, c, p.differentiate(v).coeff(&Monomial::one()));
        }
    }
    j
}

/// Quadratic Lyapunov candidate `x^T P x` from the linearization, with
/// `J^T P + P J = -I`.
pub fn quadratic_lyapunov(sub: &Subsystem) -> Result<Polynomial, LyapError> {
    let n = sub.dim();
    let j = jacobian_at_origin(&sub.f, &sub.vars);
    let eigs = linalg::eigenvalues(&j)?;
    let max_re = linalg::max_re(&eigs);
    if max_re >= 0.0 {
        return Err(LyapError::NotHurwitz { id: sub.id, max_re });
    }
    let p = linalg::solve_lyapunov(&j, &Mat::identity(n))?;
    let mut v = Polynomial::zero();
    for r in 0..n {
        for c in 0..n {
            let m = Monomial::var(sub.vars[r]).mul(&Monomial::var(sub.vars[c]));
            v.add_term(m, p.get(r, c));
        }
    }
    Ok(v)
}

/// Whether `Vdot < 0` is certifiable on `{v <= gamma} \ {0}` with a degree-2
/// multiplier: `-grad(v).f - sigma (gamma - v) - eps ||x||^2` must be SOS.
fn level_certified(
    v: &Polynomial,
    f: &PolyVector,
    vars: &[VarId],
    gamma: f64,
) -> Result<bool, SosError> {
    let mut prog = SosProgram::new();
    let sigma = prog.sos_multiplier("sigma", vars, 2)?;
    let vdot = lie_derivative(v, vars, f);
    let body = &vdot.scale(-1.0) - &sum_squares(vars).scale(EPS_MARGIN);
    // - sigma (gamma - v) enters as sigma * (v - gamma)
    let mut e = SosExpression::new(body);
    e.add_sos(sigma, &(v - &Polynomial::constant(gamma)));
    prog.require_sos(e);
    let sol = prog.compile()?.solve(&SdpSettings::default())?;
    Ok(sol.status == SdpStatus::Optimal)
}

/// Largest certifiable sublevel of an unnormalized Lyapunov candidate:
/// doubling bracket from 1 up to [`GAMMA_CAP`], halving down to 1e-9, then
/// bisection to relative tolerance [`LEVEL_REL_TOL`]. The returned level is
/// always one that passed certification.
pub fn max_certified_level(
    id: usize,
    v: &Polynomial,
    f: &PolyVector,
    vars: &[VarId],
) -> Result<LevelCertification, LyapError> {
    let mut lo = 0.0f64; // largest known-certified level, 0 = none yet
    let mut hi = f64::INFINITY; // smallest known-failed level
    let mut gamma = 1.0f64;
    loop {
        if level_certified(v, f, vars, gamma)? {
            lo = gamma;
            if gamma >= GAMMA_CAP {
                return Ok(LevelCertification {
                    gamma_max: GAMMA_CAP,
                    global: true,
                });
            }
            if hi.is_finite() {
                break;
            }
            gamma = (gamma * 2.0).min(GAMMA_CAP);
        } else {
            hi = gamma;
            if lo > 0.0 {
                break;
            }
            gamma /= 2.0;
            if gamma < 1e-9 {
                return Err(LyapError::UncertifiableLevel { id });
            }
        }
    }
    while hi - lo > LEVEL_REL_TOL * lo {
        let mid = 0.5 * (lo + hi);
        if level_certified(v, f, vars, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(LevelCertification {
        gamma_max: lo,
        global: false,
    })
}

/// Scales V so the certified region becomes the unit sublevel set.
pub fn normalize(id: usize, v: &Polynomial, gamma_max: f64) -> LyapunovFunction {
    LyapunovFunction {
        id,
        v: v.scale(1.0 / gamma_max),
        normalized: true,
    }
}

/// Maximal alpha with `-grad(V).f - alpha V - sigma (gamma0 - V)` SOS; a
/// single SDP since alpha enters linearly. Infeasibility is a verdict
/// (alpha = 0, uncertified), not an error.
pub fn self_decay(
    v: &LyapunovFunction,
    f: &PolyVector,
    vars: &[VarId],
    gamma0: f64,
) -> Result<SelfDecay, LyapError> {
    let mut prog = SosProgram::new();
    let alpha = prog.scalar("alpha", crate::sosprog::Sign::Free);
    let sigma = prog.sos_multiplier("sigma", vars, 2)?;
    let vdot = lie_derivative(&v.v, vars, f);
    let mut e = SosExpression::new(vdot.scale(-1.0));
    e.add_scalar(alpha, &v.v.scale(-1.0));
    e.add_sos(sigma, &(&v.v - &Polynomial::constant(gamma0)));
    prog.require_sos(e);
    prog.maximize(&[(alpha, 1.0)]);
    let compiled = prog.compile()?;
    let sol = compiled.solve(&SdpSettings::default())?;
    if sol.status == SdpStatus::Optimal {
        Ok(SelfDecay {
            alpha: sol.objective,
            certified: true,
            multiplier: Some(compiled.sos_value(&sol.sdp, sigma)),
        })
    } else {
        Ok(SelfDecay {
            alpha: 0.0,
            certified: false,
            multiplier: None,
        })
    }
}

/// Full isolated analysis of one subsystem: quadratic candidate, maximal
/// certified level, then normalization.
#[derive(Clone, Debug)]
pub struct SubsystemAnalysis {
    pub lyapunov: LyapunovFunction,
    /// Certified level of the unnormalized candidate.
    pub gamma_max: f64,
    pub global: bool,
}

pub fn analyze_subsystem(sub: &Subsystem) -> Result<SubsystemAnalysis, LyapError> {
    let vt = quadratic_lyapunov(sub)?;
    let level = max_certified_level(sub.id, &vt, &sub.f, &sub.vars)?;
    Ok(SubsystemAnalysis {
        lyapunov: normalize(sub.id, &vt, level.gamma_max),
        gamma_max: level.gamma_max,
        global: level.global,
    })
}
