//! Trajectory integration and domination checks.
//!
//! The certificates produced elsewhere promise `V_i(x_i(t)) <= w_i(t)` with
//! `w' = A w, w(0) = gamma0` for trajectories starting in the product
//! sublevel domain. This module integrates both systems with classical
//! fixed-step fourth-order Runge-Kutta and compares the sampled level sets
//! pointwise. Fixed steps keep the two time grids aligned, so the check
//! needs no interpolation.

use crate::linalg::Mat;
use crate::lyap::{quadratic_form_matrix, LyapunovFunction};
use crate::network::Network;
use rand::Rng;
use thiserror::Error;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_HORIZON: f64 = 20.0;

/// Slack absorbing integration error in the domination comparison.
pub const DOMINATION_TOL: f64 = 1e-6;

/// States larger than this are treated as divergence.
const BLOWUP: f64 = 1e12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("step and horizon must satisfy 0 < h <= T")]
    BadGrid,
    #[error("dimension mismatch: expected {expected} states, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("x0 outside the certified domain: V_{i}(x0) = {value:e} > {gamma:e}")]
    OutsideDomain { i: usize, value: f64, gamma: f64 },
}

/// A fixed-step solution sample; also used for comparison-system states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub h: f64,
    /// Set when integration hit a non-finite or blown-up state; the stored
    /// samples then end at the last finite one.
    pub diverged: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds at least x0")
    }

    /// CSV with nine significant digits: `t` then one column per label.
    pub fn to_csv(&self, labels: &[String]) -> String {
        let mut out = String::from("t");
        for l in labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t:.8e}"));
            for v in x {
                out.push_str(&format!(",{v:.8e}"));
            }
            out.push('\n');
        }
        out
    }
}

fn check_grid(t_end: f64, h: f64) -> Result<usize, SimError> {
    if !(h > 0.0 && t_end >= h && h.is_finite() && t_end.is_finite()) {
        return Err(SimError::BadGrid);
    }
    Ok((t_end / h).round().max(1.0) as usize)
}

fn rk4<F: Fn(&[f64], &mut [f64])>(x0: &[f64], steps: usize, h: f64, deriv: F) -> Trajectory {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x.clone());
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut diverged = false;
    for step in 1..=steps {
        deriv(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        deriv(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        deriv(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        deriv(&tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP) {
            diverged = true;
            break;
        }
        times.push(step as f64 * h);
        states.push(x.clone());
    }
    Trajectory {
        times,
        states,
        h,
        diverged,
    }
}

/// Integrates the interconnected dynamics from `x0` over the full state.
pub fn integrate_network(
    net: &Network,
    x0: &[f64],
    t_end: f64,
    h: f64,
) -> Result<Trajectory, SimError> {
    let steps = check_grid(t_end, h)?;
    if x0.len() != net.total_dim() {
        return Err(SimError::Dimension {
            expected: net.total_dim(),
            got: x0.len(),
        });
    }
    let (_, field) = net.assemble_full();
    Ok(rk4(x0, steps, h, |x, dx| {
        for (d, p) in dx.iter_mut().zip(&field) {
            *d = p.eval_dense(x);
        }
    }))
}

/// Integrates the linear comparison system `w' = A w`.
pub fn integrate_comparison(
    a: &Mat,
    w0: &[f64],
    t_end: f64,
    h: f64,
) -> Result<Trajectory, SimError> {
    let steps = check_grid(t_end, h)?;
    if w0.len() != a.rows() {
        return Err(SimError::Dimension {
            expected: a.rows(),
            got: w0.len(),
        });
    }
    Ok(rk4(w0, steps, h, |w, dw| {
        dw.copy_from_slice(&a.matvec(w));
    }))
}

/// Sampled Lyapunov levels along a trajectory, optionally with the
/// comparison bound on the same grid.
#[derive(Clone, Debug)]
pub struct LevelTrace {
    pub times: Vec<f64>,
    /// Per time, `V_i(x_i(t))` for each subsystem.
    pub levels: Vec<Vec<f64>>,
    /// Per time, `w_i(t)`, when a comparison trajectory was supplied.
    pub comparison: Option<Vec<Vec<f64>>>,
}

impl LevelTrace {
    /// CSV columns `t,V_0,...` plus `w_0,...` when the bound is present.
    pub fn to_csv(&self) -> String {
        let m = self.levels.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 0..m {
            out.push_str(&format!(",V_{i}"));
        }
        if self.comparison.is_some() {
            for i in 0..m {
                out.push_str(&format!(",w_{i}"));
            }
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{t:.8e}"));
            for v in &self.levels[k] {
                out.push_str(&format!(",{v:.8e}"));
            }
            if let Some(w) = &self.comparison {
                for v in &w[k] {
                    out.push_str(&format!(",{v:.8e}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates every `V_i` along the trajectory; when a comparison trajectory
/// is given both series are truncated to the shorter grid.
pub fn level_trace(
    net: &Network,
    lyap: &[LyapunovFunction],
    traj: &Trajectory,
    comparison: Option<&Trajectory>,
) -> LevelTrace {
    let len = comparison.map_or(traj.len(), |c| traj.len().min(c.len()));
    let _ = net;
    let times = traj.times[..len].to_vec();
    let levels: Vec<Vec<f64>> = traj.states[..len]
        .iter()
        .map(|x| lyap.iter().map(|l| l.v.eval_dense(x)).collect())
        .collect();
    let comparison = comparison.map(|c| c.states[..len].to_vec());
    LevelTrace {
        times,
        levels,
        comparison,
    }
}

/// Outcome of a domination check along one trajectory.
#[derive(Clone, Debug)]
pub struct DominationReport {
    /// No sampled level exceeded its bound by more than [`DOMINATION_TOL`]
    /// and neither integration diverged.
    pub ok: bool,
    /// Largest sampled `V_i(x_i(t)) - w_i(t)`; negative when the bound
    /// never came close.
    pub max_excess: f64,
    /// Time and subsystem of the first tolerance crossing.
    pub first_violation: Option<(f64, usize)>,
    pub diverged: bool,
    pub trace: LevelTrace,
}

/// Integrates the network from `x0` and the comparison system from
/// `w0 = gamma0`, then compares levels pointwise on the shared grid.
/// Rejects initial states outside the certified domain.
pub fn verify_domination(
    net: &Network,
    lyap: &[LyapunovFunction],
    a: &Mat,
    gamma0: &[f64],
    x0: &[f64],
    t_end: f64,
    h: f64,
) -> Result<DominationReport, SimError> {
    for (i, l) in lyap.iter().enumerate() {
        let value = l.v.eval_dense(x0);
        if value > gamma0[i] * (1.0 + 1e-12) {
            return Err(SimError::OutsideDomain {
                i,
                value,
                gamma: gamma0[i],
            });
        }
    }
    let traj = integrate_network(net, x0, t_end, h)?;
    let bound = integrate_comparison(a, gamma0, t_end, h)?;
    let diverged = traj.diverged || bound.diverged;
    let trace = level_trace(net, lyap, &traj, Some(&bound));
    let mut max_excess = f64::NEG_INFINITY;
    let mut first_violation = None;
    let w = trace.comparison.as_ref().expect("bound series present");
    for (k, t) in trace.times.iter().enumerate() {
        for (i, (&v, &wi)) in trace.levels[k].iter().zip(&w[k]).enumerate() {
            let excess = v - wi;
            max_excess = max_excess.max(excess);
            if excess > DOMINATION_TOL && first_violation.is_none() {
                first_violation = Some((*t, i));
            }
        }
    }
    Ok(DominationReport {
        ok: first_violation.is_none() && !diverged,
        max_excess,
        first_violation,
        diverged,
        trace,
    })
}

/// Uniform sample from the product domain `{V_i(x_i) <= gamma_i0 for all i}`
/// by per-subsystem rejection from a bounding box. Requires each `V_i`
/// positive definite quadratic (plus higher-order terms only tighten the
/// box through their own level checks at acceptance time).
pub fn sample_in_domain<R: Rng + ?Sized>(
    net: &Network,
    lyap: &[LyapunovFunction],
    gamma0: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let mut x0 = vec![0.0; net.total_dim()];
    let mut offset = 0;
    for (i, sub) in net.subsystems().iter().enumerate() {
        let n = sub.dim();
        let p = quadratic_form_matrix(&lyap[i].v, &sub.vars);
        let (eigs, _) = crate::linalg::sym_eigen(&p);
        let lam_min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(lam_min > 0.0, "V_{i} is not positive definite");
        let r = (gamma0[i] / lam_min).sqrt();
        // V >= lam_min |x|^2, so the level set fits in this box.
        let mut local = vec![0.0; net.total_dim()];
        loop {
            for &v in &sub.vars {
                local[v.0 as usize] = rng.gen_range(-r..r);
            }
            if lyap[i].v.eval_dense(&local) <= gamma0[i] {
                break;
            }
        }
        for (k, &v) in sub.vars.iter().enumerate() {
            x0[offset + k] = local[v.0 as usize];
        }
        offset += n;
    }
    x0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::network::{Interaction, Subsystem};
    use crate::poly::{Monomial, Polynomial, VarId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(n: u32) -> VarId {
        VarId(n)
    }

    fn lin(c: f64, x: VarId) -> Polynomial {
        Polynomial::term(c, Monomial::from_exps(&[(x, 1)]))
    }

    fn square(x: VarId) -> Polynomial {
        Polynomial::term(1.0, Monomial::from_exps(&[(x, 2)]))
    }

    fn unit_lyap(id: usize, x: VarId) -> LyapunovFunction {
        LyapunovFunction {
            id,
            v: square(x),
            normalized: true,
        }
    }

    fn scalar_net(rate: f64) -> Network {
        Network::new(
            vec![Subsystem {
                id: 0,
                vars: vec![v(0)],
                f: vec![lin(rate, v(0))],
            }],
            vec![],
        )
        .unwrap()
    }

    /// Truncated-series matrix exponential with scaling and squaring; the
    /// independent oracle for the linear comparison integrator.
    fn expm(a: &Mat, t: f64) -> Mat {
        let n = a.rows();
        let scaled = a.scale(t);
        let norm = scaled.max_abs() * n as f64;
        let k = norm.log2().ceil().max(0.0) as u32 + 4;
        let b = scaled.scale(0.5f64.powi(k as i32));
        let mut sum = Mat::identity(n);
        let mut term = Mat::identity(n);
        for j in 1..30 {
            term = term.matmul(&b).scale(1.0 / j as f64);
            sum = sum.add(&term);
        }
        for _ in 0..k {
            sum = sum.matmul(&sum);
        }
        sum
    }

    #[test]
    fn pure_decay_hits_the_exponential() {
        let net = scalar_net(-1.0);
        let traj = integrate_network(&net, &[1.0], 1.0, 1e-3).unwrap();
        assert!(!traj.diverged);
        assert_eq!(traj.len(), 1001);
        assert!((traj.last_state()[0] - (-1.0f64).exp()).abs() <= 1e-9);
        assert_eq!(traj.times[0], 0.0);
        let dt = traj.times[1] - traj.times[0];
        assert!((dt - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let net = Network::new(
            vec![Subsystem {
                id: 0,
                vars: vec![v(0), v(1)],
                f: vec![lin(1.0, v(1)), lin(-1.0, v(0))],
            }],
            vec![],
        )
        .unwrap();
        let traj = integrate_network(&net, &[1.0, 0.0], 10.0, 1e-3).unwrap();
        let energy = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let e0 = energy(&traj.states[0]);
        let drift = traj
            .states
            .iter()
            .map(|x| (energy(x) - e0).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-8, "energy drift {drift}");
    }

    #[test]
    fn divergence_is_flagged_and_truncated() {
        // x' = x^2 from x0 = 1 blows up at t = 1.
        let net = Network::new(
            vec![Subsystem {
                id: 0,
                vars: vec![v(0)],
                f: vec![Polynomial::term(1.0, Monomial::from_exps(&[(v(0), 2)]))],
            }],
            vec![],
        )
        .unwrap();
        let traj = integrate_network(&net, &[1.0], 2.0, 1e-3).unwrap();
        assert!(traj.diverged);
        assert!(traj.len() < 2001);
        assert!(traj.states.iter().all(|x| x[0].is_finite()));
    }

    #[test]
    fn comparison_matches_closed_form_and_expm() {
        let a = Mat::identity(3).scale(-1.0);
        let w = integrate_comparison(&a, &[1.0, 1.0, 1.0], 2.0, 1e-3).unwrap();
        for (k, t) in w.times.iter().enumerate() {
            let exact = (-t).exp();
            for i in 0..3 {
                assert!((w.states[k][i] - exact).abs() <= 1e-9);
            }
        }

        let b = Mat::from_rows(&[
            vec![-1.0, 0.4, 0.0],
            vec![0.2, -1.5, 0.3],
            vec![0.0, 0.5, -2.0],
        ])
        .unwrap();
        let w0 = [0.3, 0.7, 0.5];
        let w = integrate_comparison(&b, &w0, 1.0, 1e-3).unwrap();
        let exact = expm(&b, 1.0).matvec(&w0);
        for i in 0..3 {
            assert!(
                (w.last_state()[i] - exact[i]).abs() <= 1e-8,
                "component {i}: {} vs {}",
                w.last_state()[i],
                exact[i]
            );
        }
    }

    #[test]
    fn metzler_comparison_stays_nonnegative() {
        let a = Mat::from_rows(&[vec![-2.0, 1.5], vec![1.8, -2.2]]).unwrap();
        let w = integrate_comparison(&a, &[0.9, 0.01], 10.0, 1e-3).unwrap();
        for x in &w.states {
            assert!(x.iter().all(|&c| c >= -1e-9), "negative component in {x:?}");
        }
    }

    #[test]
    fn hurwitz_comparison_decays_at_half_the_spectral_rate() {
        let a = Mat::from_rows(&[vec![-1.0, 0.3], vec![0.2, -1.5]]).unwrap();
        let max_re = linalg::max_re(&linalg::eigenvalues(&a).unwrap());
        assert!(max_re < 0.0);
        let b = max_re.abs() / 2.0;
        let t_end = 20.0;
        let w = integrate_comparison(&a, &[1.0, 1.0], t_end, 1e-3).unwrap();
        let norm = |x: &[f64]| x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let half = w.len() / 2;
        let rate = (norm(w.last_state()) / norm(&w.states[half])).ln()
            / (w.times[w.len() - 1] - w.times[half]);
        assert!(rate <= -b, "measured rate {rate}, required {}", -b);
    }

    #[test]
    fn rk4_order_is_at_least_three_and_a_half() {
        // Van der Pol style subsystem, smooth trajectory over T = 5.
        let f2 = &(&lin(-2.0, v(1)) - &lin(1.0, v(0)))
            + &Polynomial::term(2.0, Monomial::from_exps(&[(v(0), 2), (v(1), 1)]));
        let net = Network::new(
            vec![Subsystem {
                id: 0,
                vars: vec![v(0), v(1)],
                f: vec![lin(1.0, v(1)), f2],
            }],
            vec![],
        )
        .unwrap();
        let x0 = [0.5, 0.4];
        let v_end = |h: f64| {
            let traj = integrate_network(&net, &x0, 5.0, h).unwrap();
            let x = traj.last_state();
            x[0] * x[0] + x[1] * x[1]
        };
        let c = v_end(0.05);
        let m = v_end(0.025);
        let f = v_end(0.0125);
        let order = ((c - m).abs() / (m - f).abs()).log2();
        assert!(order >= 3.5, "empirical order {order}");
    }

    #[test]
    fn isolated_domination_follows_the_diagonal_bound() {
        let subs = vec![
            Subsystem {
                id: 0,
                vars: vec![v(0)],
                f: vec![lin(-1.0, v(0))],
            },
            Subsystem {
                id: 1,
                vars: vec![v(1)],
                f: vec![lin(-2.5, v(1))],
            },
        ];
        let net = Network::new(subs, vec![]).unwrap();
        let lyap = vec![unit_lyap(0, v(0)), unit_lyap(1, v(1))];
        let a = Mat::from_rows(&[vec![-2.0, 0.0], vec![0.0, -5.0]]).unwrap();
        let gamma0 = [0.5, 0.5];
        let x0 = [0.6, -0.5];
        let rep = verify_domination(&net, &lyap, &a, &gamma0, &x0, 5.0, 1e-3).unwrap();
        assert!(rep.ok, "excess {}", rep.max_excess);
        // The comparison solution is the per-subsystem Groenwall bound.
        let w = rep.trace.comparison.as_ref().unwrap();
        for (k, t) in rep.trace.times.iter().enumerate() {
            assert!((w[k][0] - 0.5 * (-2.0 * t).exp()).abs() <= 1e-9);
            assert!((w[k][1] - 0.5 * (-5.0 * t).exp()).abs() <= 1e-9);
        }
    }

    #[test]
    fn domination_checker_rejects_outside_starts_and_catches_bad_bounds() {
        // x' = -x + 0.5 y, y' = -y with the hand matrix from completing the
        // square; a valid certificate for V = squares at gamma = 0.5.
        let subs = vec![
            Subsystem {
                id: 0,
                vars: vec![v(0)],
                f: vec![lin(-1.0, v(0))],
            },
            Subsystem {
                id: 1,
                vars: vec![v(1)],
                f: vec![lin(-1.0, v(1))],
            },
        ];
        let inters = vec![Interaction {
            target: 0,
            source: 1,
            g: vec![lin(0.5, v(1))],
        }];
        let net = Network::new(subs, inters).unwrap();
        let lyap = vec![unit_lyap(0, v(0)), unit_lyap(1, v(1))];
        let a = Mat::from_rows(&[vec![-1.5, 0.5], vec![0.0, -2.0]]).unwrap();
        let gamma0 = [0.5, 0.5];
        let x0 = [0.6, 0.6];

        let rep = verify_domination(&net, &lyap, &a, &gamma0, &x0, 20.0, 1e-3).unwrap();
        assert!(rep.ok, "excess {}", rep.max_excess);
        assert!(rep.first_violation.is_none());

        assert!(matches!(
            verify_domination(&net, &lyap, &a, &gamma0, &[0.9, 0.0], 20.0, 1e-3),
            Err(SimError::OutsideDomain { i: 0, .. })
        ));

        // Corrupting the self term upward keeps domination (the bound only
        // grows); downward makes the bound decay faster than the level can.
        let mut up = a.clone();
        up.set(0, 0, a.get(0, 0) + 1.0);
        let rep_up = verify_domination(&net, &lyap, &up, &gamma0, &x0, 20.0, 1e-3).unwrap();
        assert!(rep_up.ok);

        let mut down = a.clone();
        down.set(0, 0, a.get(0, 0) - 10.0);
        let rep_down = verify_domination(&net, &lyap, &down, &gamma0, &x0, 20.0, 1e-3).unwrap();
        assert!(!rep_down.ok);
        let (t, i) = rep_down.first_violation.unwrap();
        assert_eq!(i, 0);
        assert!(t > 0.0 && rep_down.max_excess > DOMINATION_TOL);
    }

    #[test]
    fn domain_samples_land_inside_their_level_sets() {
        let subs = vec![
            Subsystem {
                id: 0,
                vars: vec![v(0), v(1)],
                f: vec![lin(-1.0, v(0)), lin(-1.0, v(1))],
            },
            Subsystem {
                id: 1,
                vars: vec![v(2)],
                f: vec![lin(-1.0, v(2))],
            },
        ];
        let net = Network::new(subs, vec![]).unwrap();
        let mut vq = Polynomial::term(2.0, Monomial::from_exps(&[(v(0), 2)]));
        vq = &vq + &Polynomial::term(0.5, Monomial::from_exps(&[(v(1), 2)]));
        vq = &vq + &Polynomial::term(0.6, Monomial::from_exps(&[(v(0), 1), (v(1), 1)]));
        let lyap = vec![
            LyapunovFunction {
                id: 0,
                v: vq.clone(),
                normalized: true,
            },
            unit_lyap(1, v(2)),
        ];
        let gamma0 = [0.7, 0.3];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut touched_edge = false;
        for _ in 0..500 {
            let x = sample_in_domain(&net, &lyap, &gamma0, &mut rng);
            assert_eq!(x.len(), 3);
            let v0 = vq.eval_dense(&x);
            assert!(v0 <= gamma0[0] * (1.0 + 1e-12));
            assert!(x[2] * x[2] <= gamma0[1] * (1.0 + 1e-12));
            if v0 > 0.9 * gamma0[0] {
                touched_edge = true;
            }
        }
        assert!(touched_edge, "sampler never reached the outer shell");
    }

    #[test]
    fn csv_emission_has_aligned_headers_and_rows() {
        let net = scalar_net(-1.0);
        let lyap = vec![unit_lyap(0, v(0))];
        let traj = integrate_network(&net, &[0.5], 0.01, 1e-3).unwrap();
        let csv = traj.to_csv(&["x0".to_string()]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x0");
        assert_eq!(csv.lines().count(), 12);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 2);
        row.iter().for_each(|c| {
            c.parse::<f64>().unwrap();
        });

        let a = Mat::from_rows(&[vec![-2.0]]).unwrap();
        let w = integrate_comparison(&a, &[0.25], 0.01, 1e-3).unwrap();
        let trace = level_trace(&net, &lyap, &traj, Some(&w));
        let csv = trace.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "t,V_0,w_0");
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 3);
        assert!((row[1].parse::<f64>().unwrap() - 0.25).abs() <= 1e-9);
    }

    #[test]
    fn grid_validation_rejects_nonsense() {
        let net = scalar_net(-1.0);
        assert!(matches!(
            integrate_network(&net, &[1.0], 1.0, 0.0),
            Err(SimError::BadGrid)
        ));
        assert!(matches!(
            integrate_network(&net, &[1.0], 0.5, 1.0),
            Err(SimError::BadGrid)
        ));
        assert!(matches!(
            integrate_network(&net, &[1.0, 2.0], 1.0, 1e-3),
            Err(SimError::Dimension { expected: 1, got: 2 })
        ));
    }
}
