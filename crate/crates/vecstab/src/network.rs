//! Interconnected system model: subsystems with isolated polynomial dynamics
//! plus directed pairwise interaction terms, and the seeded Van der Pol
//! oscillator benchmark.
//!
//! The state of subsystem `i` is a block of globally unique variables; its
//! dynamics split as `xdot_i = f_i(x_i) + sum_j g_ij(x_i, x_j)`. Every term of
//! an interaction contains at least one source variable, so all coupling
//! vanishes when the neighbors rest at the origin.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Monomial, PolyVector, Polynomial, VarId};

#[derive(Debug, Error)]
pub enum NetworkError {
    /// Invariant or schema violation; the string starts with a
    /// JSON-pointer-style path into the network document.
    #[error("{0}")]
    Structure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn bad(path: String, what: impl AsRef<str>) -> NetworkError {
    NetworkError::Structure(format!("{path}: {}", what.as_ref()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subsystem {
    pub id: usize,
    pub vars: Vec<VarId>,
    /// Isolated dynamics over `vars`, one component per state variable.
    pub f: PolyVector,
}

impl Subsystem {
    pub fn dim(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interaction {
    pub target: usize,
    pub source: usize,
    /// Coupling added to the target's dynamics, one component per target
    /// state variable, over the target and source variables.
    pub g: PolyVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    subsystems: Vec<Subsystem>,
    interactions: Vec<Interaction>,
}

impl Network {
    pub fn new(
        subsystems: Vec<Subsystem>,
        interactions: Vec<Interaction>,
    ) -> Result<Network, NetworkError> {
        let mut seen: BTreeSet<VarId> = BTreeSet::new();
        for (i, sub) in subsystems.iter().enumerate() {
            if sub.id != i {
                return Err(bad(
                    format!("/subsystems/{i}/id"),
                    format!("id {} does not match position {i}", sub.id),
                ));
            }
            if sub.vars.is_empty() {
                return Err(bad(format!("/subsystems/{i}/vars"), "subsystem has no state"));
            }
            for v in &sub.vars {
                if !seen.insert(*v) {
                    return Err(bad(
                        format!("/subsystems/{i}/vars"),
                        format!("variable {v} belongs to more than one subsystem"),
                    ));
                }
            }
            if sub.f.len() != sub.vars.len() {
                return Err(bad(
                    format!("/subsystems/{i}/f"),
                    format!(
                        "dynamics has {} components for {} states",
                        sub.f.len(),
                        sub.vars.len()
                    ),
                ));
            }
            let own: BTreeSet<VarId> = sub.vars.iter().copied().collect();
            for (c, p) in sub.f.iter().enumerate() {
                if p.coeff(&Monomial::one()) != 0.0 {
                    return Err(bad(format!("/subsystems/{i}/f/{c}"), "f(0) != 0"));
                }
                if let Some(v) = p.support().iter().find(|v| !own.contains(v)) {
                    return Err(bad(
                        format!("/subsystems/{i}/f/{c}"),
                        format!("isolated dynamics uses foreign variable {v}"),
                    ));
                }
            }
        }
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (k, e) in interactions.iter().enumerate() {
            let path = format!("/interactions/{k}");
            if e.target >= subsystems.len() || e.source >= subsystems.len() {
                return Err(bad(path, "endpoint references a missing subsystem"));
            }
            if e.target == e.source {
                return Err(bad(path, "self-interaction is not allowed"));
            }
            if !pairs.insert((e.target, e.source)) {
                return Err(bad(path, "duplicate target/source pair"));
            }
            let tdim = subsystems[e.target].dim();
            if e.g.len() != tdim {
                return Err(bad(
                    format!("{path}/g"),
                    format!("{} components for a {tdim}-state target", e.g.len()),
                ));
            }
            let allowed: BTreeSet<VarId> = subsystems[e.target]
                .vars
                .iter()
                .chain(&subsystems[e.source].vars)
                .copied()
                .collect();
            let src: BTreeSet<VarId> = subsystems[e.source].vars.iter().copied().collect();
            for (c, p) in e.g.iter().enumerate() {
                if let Some(v) = p.support().iter().find(|v| !allowed.contains(v)) {
                    return Err(bad(
                        format!("{path}/g/{c}"),
                        format!("coupling uses variable {v} outside the subsystem pair"),
                    ));
                }
                for (m, _) in p.terms() {
                    if !m.vars().any(|v| src.contains(&v)) {
                        return Err(bad(
                            format!("{path}/g/{c}"),
                            format!("term {m} does not vanish when the source is zero"),
                        ));
                    }
                }
            }
        }
        Ok(Network {
            subsystems,
            interactions,
        })
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(Subsystem::dim).sum()
    }

    pub fn subsystem(&self, i: usize) -> &Subsystem {
        &self.subsystems[i]
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn interactions_into(&self, target: usize) -> impl Iterator<Item = &Interaction> {
        self.interactions.iter().filter(move |e| e.target == target)
    }

    /// Neighborhood of subsystem `i`: itself plus every source with a nonzero
    /// coupling into it, sorted.
    pub fn neighborhood(&self, i: usize) -> Vec<usize> {
        let mut n: BTreeSet<usize> = BTreeSet::new();
        n.insert(i);
        for e in self.interactions_into(i) {
            if e.g.iter().any(|p| !p.is_zero()) {
                n.insert(e.source);
            }
        }
        n.into_iter().collect()
    }

    /// Variables of the neighborhood of `i`, in subsystem-then-declaration
    /// order.
    pub fn neighborhood_vars(&self, i: usize) -> Vec<VarId> {
        self.neighborhood(i)
            .into_iter()
            .flat_map(|j| self.subsystems[j].vars.iter().copied())
            .collect()
    }

    /// Total coupling into subsystem `i`: the componentwise sum of all
    /// interactions targeting it.
    pub fn coupling(&self, i: usize) -> PolyVector {
        let mut g: PolyVector = vec![Polynomial::zero(); self.subsystems[i].dim()];
        for e in self.interactions_into(i) {
            for (acc, p) in g.iter_mut().zip(&e.g) {
                *acc = &*acc + p;
            }
        }
        g
    }

    /// The assembled global field: variables in subsystem-then-declaration
    /// order, component block `i` equal to `f_i + sum_j g_ij`.
    pub fn assemble_full(&self) -> (Vec<VarId>, PolyVector) {
        let mut vars = Vec::with_capacity(self.total_dim());
        let mut field = Vec::with_capacity(self.total_dim());
        for (i, sub) in self.subsystems.iter().enumerate() {
            vars.extend(sub.vars.iter().copied());
            let g = self.coupling(i);
            for (fc, gc) in sub.f.iter().zip(&g) {
                field.push(fc + gc);
            }
        }
        (vars, field)
    }

    pub fn to_json(&self) -> String {
        let file = NetworkFile::from_network(self);
        let mut s = serde_json::to_string_pretty(&file).expect("network serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Network, NetworkError> {
        let file: NetworkFile = serde_json::from_str(text)?;
        file.into_network()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NetworkError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Network, NetworkError> {
        let text = std::fs::read_to_string(path)?;
        Network::from_json(&text)
    }
}

/// One polynomial term with exponents indexed into a local variable list.
#[derive(Serialize, Deserialize)]
struct TermRec {
    coeff: f64,
    exps: Vec<(usize, u32)>,
}

#[derive(Serialize, Deserialize)]
struct SubsystemRec {
    id: usize,
    vars: Vec<String>,
    f: Vec<Vec<TermRec>>,
}

#[derive(Serialize, Deserialize)]
struct InteractionRec {
    target: usize,
    source: usize,
    g: Vec<Vec<TermRec>>,
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    subsystems: Vec<SubsystemRec>,
    interactions: Vec<InteractionRec>,
}

fn poly_to_recs(p: &Polynomial, local: &[VarId]) -> Vec<TermRec> {
    let terms = p
        .to_local_terms(local)
        .expect("network invariants confine every polynomial to its local variables");
    terms
        .into_iter()
        .map(|(coeff, exps)| TermRec { coeff, exps })
        .collect()
}

fn recs_to_poly(recs: &[TermRec], local: &[VarId], path: &str) -> Result<Polynomial, NetworkError> {
    for (t, rec) in recs.iter().enumerate() {
        if !rec.coeff.is_finite() {
            return Err(bad(format!("{path}/{t}/coeff"), "non-finite coefficient"));
        }
        for &(idx, _) in &rec.exps {
            if idx >= local.len() {
                return Err(bad(
                    format!("{path}/{t}/exps"),
                    format!("variable index {idx} out of range for {} locals", local.len()),
                ));
            }
        }
    }
    let terms: Vec<(f64, Vec<(usize, u32)>)> = recs
        .iter()
        .map(|r| (r.coeff, r.exps.clone()))
        .collect();
    Ok(Polynomial::from_local_terms(local, &terms))
}

impl NetworkFile {
    fn from_network(net: &Network) -> NetworkFile {
        let subsystems = net
            .subsystems
            .iter()
            .map(|s| SubsystemRec {
                id: s.id,
                vars: s.vars.iter().map(|v| v.to_string()).collect(),
                f: s.f.iter().map(|p| poly_to_recs(p, &s.vars)).collect(),
            })
            .collect();
        let interactions = net
            .interactions
            .iter()
            .map(|e| {
                let local: Vec<VarId> = net.subsystems[e.target]
                    .vars
                    .iter()
                    .chain(&net.subsystems[e.source].vars)
                    .copied()
                    .collect();
                InteractionRec {
                    target: e.target,
                    source: e.source,
                    g: e.g.iter().map(|p| poly_to_recs(p, &local)).collect(),
                }
            })
            .collect();
        NetworkFile {
            subsystems,
            interactions,
        }
    }

    fn into_network(self) -> Result<Network, NetworkError> {
        // variables are positional: the k-th declared label anywhere in the
        // file becomes global id k
        let mut next = 0u32;
        let mut subsystems = Vec::with_capacity(self.subsystems.len());
        for (i, rec) in self.subsystems.iter().enumerate() {
            let vars: Vec<VarId> = rec
                .vars
                .iter()
                .map(|_| {
                    let v = VarId(next);
                    next += 1;
                    v
                })
                .collect();
            let mut labels: Vec<&String> = rec.vars.iter().collect();
            labels.sort();
            labels.dedup();
            if labels.len() != rec.vars.len() {
                return Err(bad(
                    format!("/subsystems/{i}/vars"),
                    "duplicate variable label",
                ));
            }
            let f = rec
                .f
                .iter()
                .enumerate()
                .map(|(c, recs)| recs_to_poly(recs, &vars, &format!("/subsystems/{i}/f/{c}")))
                .collect::<Result<PolyVector, _>>()?;
            subsystems.push(Subsystem {
                id: rec.id,
                vars,
                f,
            });
        }
        // labels must be globally unique too
        {
            let mut all: Vec<&String> = self
                .subsystems
                .iter()
                .flat_map(|r| r.vars.iter())
                .collect();
            let total = all.len();
            all.sort();
            all.dedup();
            if all.len() != total {
                return Err(bad(
                    "/subsystems".to_string(),
                    "variable label shared between subsystems",
                ));
            }
        }
        let mut interactions = Vec::with_capacity(self.interactions.len());
        for (k, rec) in self.interactions.iter().enumerate() {
            let path = format!("/interactions/{k}");
            if rec.target >= subsystems.len() || rec.source >= subsystems.len() {
                return Err(bad(path, "endpoint references a missing subsystem"));
            }
            let local: Vec<VarId> = subsystems[rec.target]
                .vars
                .iter()
                .chain(&subsystems[rec.source].vars)
                .copied()
                .collect();
            let g = rec
                .g
                .iter()
                .enumerate()
                .map(|(c, recs)| recs_to_poly(recs, &local, &format!("{path}/g/{c}")))
                .collect::<Result<PolyVector, _>>()?;
            interactions.push(Interaction {
                target: rec.target,
                source: rec.source,
                g,
            });
        }
        Network::new(subsystems, interactions)
    }
}

/// Parameters drawn for the Van der Pol benchmark; exposed so reports can
/// list the sampled system.
#[derive(Clone, Debug, Serialize)]
pub struct VdpParams {
    /// Damping mu_j for the nine oscillators, each in (-3, -1).
    pub mu: Vec<f64>,
    /// Coupling strengths (target, source, beta) with beta in (-0.4, 0.4),
    /// one per directed edge of the fixed topology.
    pub beta: Vec<(usize, usize, f64)>,
}

/// Directed edges of the benchmark topology, 0-based (target, source).
pub const VDP_EDGES: [(usize, usize); 20] = [
    (0, 1),
    (0, 4),
    (0, 8),
    (1, 0),
    (1, 2),
    (2, 1),
    (2, 7),
    (3, 5),
    (3, 6),
    (4, 0),
    (4, 5),
    (5, 3),
    (5, 4),
    (6, 3),
    (6, 7),
    (6, 8),
    (7, 2),
    (7, 6),
    (8, 0),
    (8, 6),
];

/// Uniform draw from the open interval `(lo, hi)`: one dedicated generator
/// stream per parameter, so any single value is reproducible without drawing
/// the others.
fn draw_open(seed: u64, stream: u64, lo: f64, hi: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return lo + u * (hi - lo);
        }
    }
}

pub fn vdp_params(seed: u64) -> VdpParams {
    let mu = (1..=9u64)
        .map(|j| draw_open(seed, j, -3.0, -1.0))
        .collect();
    let beta = VDP_EDGES
        .iter()
        .map(|&(t, s)| {
            let stream = 100 + 10 * (t as u64 + 1) + (s as u64 + 1);
            (t, s, draw_open(seed, stream, -0.4, 0.4))
        })
        .collect();
    VdpParams { mu, beta }
}

/// Nine coupled Van der Pol oscillators in reversed time, so the origin is
/// asymptotically stable:
///
/// ```text
///   xdot_{j,1} = x_{j,2}
///   xdot_{j,2} = mu_j x_{j,2} (1 - x_{j,1}^2) - x_{j,1} + x_{j,1} sum_k beta_{jk} x_{k,2}
/// ```
///
/// over the fixed 18-edge topology, with parameters drawn per [`vdp_params`].
pub fn vdp_benchmark(seed: u64) -> Network {
    let params = vdp_params(seed);
    let mut subsystems = Vec::with_capacity(9);
    for j in 0..9 {
        let x1 = VarId(2 * j as u32);
        let x2 = VarId(2 * j as u32 + 1);
        let mu = params.mu[j];
        // mu x2 (1 - x1^2) - x1
        let mut f2 = Polynomial::term(mu, Monomial::var(x2));
        f2.add_term(Monomial::from_exps(&[(x1, 2), (x2, 1)]), -mu);
        f2.add_term(Monomial::var(x1), -1.0);
        subsystems.push(Subsystem {
            id: j,
            vars: vec![x1, x2],
            f: vec![Polynomial::var(x2), f2],
        });
    }
    let interactions = params
        .beta
        .iter()
        .map(|&(t, s, beta)| {
            let xt1 = VarId(2 * t as u32);
            let xs2 = VarId(2 * s as u32 + 1);
            let coupling = Polynomial::term(beta, Monomial::from_exps(&[(xt1, 1), (xs2, 1)]));
            Interaction {
                target: t,
                source: s,
                g: vec![Polynomial::zero(), coupling],
            }
        })
        .collect();
    Network::new(subsystems, interactions).expect("benchmark construction is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn benchmark_is_deterministic() {
        assert_eq!(vdp_benchmark(7), vdp_benchmark(7));
        assert_ne!(vdp_benchmark(7), vdp_benchmark(8));
    }

    #[test]
    fn benchmark_parameters_stay_in_their_open_ranges() {
        for seed in [0, 1, 42, 123456789] {
            let p = vdp_params(seed);
            assert_eq!(p.mu.len(), 9);
            assert_eq!(p.beta.len(), 20);
            for &m in &p.mu {
                assert!(-3.0 < m && m < -1.0, "mu {m}");
            }
            for &(_, _, b) in &p.beta {
                assert!(-0.4 < b && b < 0.4, "beta {b}");
            }
        }
    }

    #[test]
    fn benchmark_topology_matches_the_neighborhood_table() {
        let net = vdp_benchmark(42);
        let expect: [&[usize]; 9] = [
            &[0, 1, 4, 8],
            &[0, 1, 2],
            &[1, 2, 7],
            &[3, 5, 6],
            &[0, 4, 5],
            &[3, 4, 5],
            &[3, 6, 7, 8],
            &[2, 6, 7],
            &[0, 6, 8],
        ];
        for (i, want) in expect.iter().enumerate() {
            assert_eq!(net.neighborhood(i), *want, "neighborhood of {i}");
        }
    }

    #[test]
    fn benchmark_isolated_jacobians_are_hurwitz() {
        let net = vdp_benchmark(42);
        for sub in net.subsystems() {
            let n = sub.dim();
            let zero = vec![0.0; 2 * net.len()];
            let mut j = linalg::Mat::zeros(n, n);
            for (r, p) in sub.f.iter().enumerate() {
                for (c, v) in sub.vars.iter().enumerate() {
                    let d = p.differentiate(*v);
                    j.set(r, c, d.eval_dense(&zero));
                }
            }
            let eigs = linalg::eigenvalues(&j).unwrap();
            assert!(
                linalg::max_re(&eigs) < 0.0,
                "subsystem {} not locally stable",
                sub.id
            );
        }
    }

    #[test]
    fn coupling_vanishes_when_sources_rest() {
        let net = vdp_benchmark(9);
        let nvars = net.total_dim();
        for e in net.interactions() {
            // symbolic: substitute zero for the source block only
            let mut point = vec![0.7; nvars];
            for v in &net.subsystem(e.source).vars {
                point[v.0 as usize] = 0.0;
            }
            for p in &e.g {
                assert_eq!(p.eval_dense(&point), 0.0);
            }
        }
    }

    #[test]
    fn neighborhoods_ignore_interaction_order_and_zero_couplings() {
        let sub = |id: usize| Subsystem {
            id,
            vars: vec![VarId(id as u32)],
            f: vec![Polynomial::term(-1.0, Monomial::var(VarId(id as u32)))],
        };
        let edge = |t: usize, s: usize| Interaction {
            target: t,
            source: s,
            g: vec![Polynomial::term(0.1, Monomial::var(VarId(s as u32)))],
        };
        let a = Network::new(vec![sub(0), sub(1), sub(2)], vec![edge(0, 1), edge(0, 2)]).unwrap();
        let b = Network::new(vec![sub(0), sub(1), sub(2)], vec![edge(0, 2), edge(0, 1)]).unwrap();
        assert_eq!(a.neighborhood(0), b.neighborhood(0));
        assert_eq!(a.neighborhood(0), vec![0, 1, 2]);
        assert_eq!(a.neighborhood(1), vec![1]);

        // an interaction entry whose polynomials are all zero adds no neighbor
        let zero_edge = Interaction {
            target: 1,
            source: 2,
            g: vec![Polynomial::zero()],
        };
        let c = Network::new(vec![sub(0), sub(1), sub(2)], vec![zero_edge]).unwrap();
        assert_eq!(c.neighborhood(1), vec![1]);
    }

    #[test]
    fn single_directed_edge_neighborhoods() {
        let sub = |id: usize| Subsystem {
            id,
            vars: vec![VarId(id as u32)],
            f: vec![Polynomial::term(-2.0, Monomial::var(VarId(id as u32)))],
        };
        let e = Interaction {
            target: 0,
            source: 1,
            g: vec![Polynomial::term(0.3, Monomial::var(VarId(1)))],
        };
        let net = Network::new(vec![sub(0), sub(1)], vec![e]).unwrap();
        assert_eq!(net.neighborhood(0), vec![0, 1]);
        assert_eq!(net.neighborhood(1), vec![1]);
        assert_eq!(net.neighborhood_vars(0), vec![VarId(0), VarId(1)]);
    }

    #[test]
    fn assembled_field_evaluates_as_sum_of_parts() {
        let net = vdp_benchmark(3);
        let (vars, field) = net.assemble_full();
        assert_eq!(vars.len(), 18);
        assert_eq!(field.len(), 18);
        let point: Vec<f64> = (0..18).map(|k| 0.1 + 0.03 * k as f64).collect();
        let mut row = 0;
        for i in 0..net.len() {
            let sub = net.subsystem(i);
            let g = net.coupling(i);
            for c in 0..sub.dim() {
                let parts = sub.f[c].eval_dense(&point) + g[c].eval_dense(&point);
                let whole = field[row].eval_dense(&point);
                assert!((whole - parts).abs() < 1e-12);
                row += 1;
            }
        }
    }

    #[test]
    fn json_round_trip_is_identity() {
        let net = vdp_benchmark(42);
        let text = net.to_json();
        let back = Network::from_json(&text).unwrap();
        assert_eq!(net, back);
        // byte-identical re-serialization
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn file_round_trip_via_disk() {
        let net = vdp_benchmark(5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.json");
        net.save(&path).unwrap();
        assert_eq!(Network::load(&path).unwrap(), net);
    }

    #[test]
    fn load_rejects_constant_term_in_dynamics() {
        let text = r#"{
            "subsystems": [
                {"id": 0, "vars": ["x0"], "f": [[{"coeff": 1e-3, "exps": []}]]}
            ],
            "interactions": []
        }"#;
        let err = Network::from_json(text).unwrap_err().to_string();
        assert!(err.contains("/subsystems/0/f/0"), "{err}");
        assert!(err.contains("f(0)"), "{err}");
    }

    #[test]
    fn load_rejects_bad_interactions_and_indices() {
        let base = |inter: &str| {
            format!(
                r#"{{
                "subsystems": [
                    {{"id": 0, "vars": ["a"], "f": [[{{"coeff": -1.0, "exps": [[0, 1]]}}]]}},
                    {{"id": 1, "vars": ["b"], "f": [[{{"coeff": -1.0, "exps": [[0, 1]]}}]]}}
                ],
                "interactions": [{inter}]
            }}"#
            )
        };
        // term without any source variable: exps [[0,1]] is the target var
        let t = base(r#"{"target": 0, "source": 1, "g": [[{"coeff": 0.5, "exps": [[0, 1]]}]]}"#);
        let err = Network::from_json(&t).unwrap_err().to_string();
        assert!(err.contains("/interactions/0/g/0"), "{err}");
        assert!(err.contains("vanish"), "{err}");

        let t = base(r#"{"target": 0, "source": 0, "g": [[{"coeff": 0.5, "exps": [[1, 1]]}]]}"#);
        let err = Network::from_json(&t).unwrap_err().to_string();
        assert!(err.contains("self-interaction"), "{err}");

        let t = base(r#"{"target": 0, "source": 5, "g": [[]]}"#);
        let err = Network::from_json(&t).unwrap_err().to_string();
        assert!(err.contains("missing subsystem"), "{err}");

        let t = base(r#"{"target": 0, "source": 1, "g": [[{"coeff": 0.5, "exps": [[7, 1]]}]]}"#);
        let err = Network::from_json(&t).unwrap_err().to_string();
        assert!(err.contains("out of range"), "{err}");
    }

    #[test]
    fn load_rejects_duplicate_labels() {
        let text = r#"{
            "subsystems": [
                {"id": 0, "vars": ["x"], "f": [[{"coeff": -1.0, "exps": [[0, 1]]}]]},
                {"id": 1, "vars": ["x"], "f": [[{"coeff": -1.0, "exps": [[0, 1]]}]]}
            ],
            "interactions": []
        }"#;
        let err = Network::from_json(text).unwrap_err().to_string();
        assert!(err.contains("shared between subsystems"), "{err}");
    }

    #[test]
    fn duplicate_interaction_pairs_are_rejected() {
        let sub = |id: usize| Subsystem {
            id,
            vars: vec![VarId(id as u32)],
            f: vec![Polynomial::term(-1.0, Monomial::var(VarId(id as u32)))],
        };
        let edge = || Interaction {
            target: 0,
            source: 1,
            g: vec![Polynomial::term(0.1, Monomial::var(VarId(1)))],
        };
        let err = Network::new(vec![sub(0), sub(1)], vec![edge(), edge()]).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }
}
