//! Sum-of-squares programs compiled to semidefinite programs.
//!
//! A program holds scalar decision variables, SOS polynomial variables
//! (multipliers with a fixed Gram basis), and constraints of the form
//!
//! ```text
//!   known(x) + sum_k s_k p_k(x) + sum_l sigma_l(x) q_l(x)  is SOS
//! ```
//!
//! where every decision enters affinely. Compilation assigns each constraint
//! a Gram matrix over the monomials of total degree between
//! `floor(mindeg/2)` and `ceil(maxdeg/2)` of the expression, then matches
//! coefficients monomial by monomial. Each Gram entry touches exactly one
//! monomial equality, so one entry per equality can be eliminated by
//! substitution (the pivot) and no cascading occurs; the remaining unknowns
//! become the SDP variables. Multiplier bases that exclude the constant
//! monomial keep the compiled SDP strictly feasible when the expression must
//! vanish at the origin.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg;
use crate::poly::{monomials_in_degree_range, Monomial, Polynomial, VarId};
use crate::sdp::{self, SdpError, SdpProblem, SdpSettings, SdpSolution, SdpStatus};

#[derive(Debug, Error)]
pub enum SosError {
    #[error("monomial {monomial} in constraint {constraint} has no Gram producer")]
    UnmatchedMonomial { constraint: usize, monomial: String },
    #[error("scalar variable '{0}' appears in no constraint")]
    UnusedScalar(String),
    #[error("linear equality has no eliminable variable")]
    DegenerateLinear,
    #[error("multiplier degree must be a positive even number, got {0}")]
    BadMultiplierDegree(usize),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error("certificate extraction failed: {0}")]
    Certificate(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ScalarVar(usize);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SosVar(usize);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Free,
    Nonnegative,
}

#[derive(Clone, Debug)]
struct ScalarDecl {
    label: String,
    sign: Sign,
}

#[derive(Clone, Debug)]
struct SosDecl {
    label: String,
    basis: Vec<Monomial>,
}

/// One SOS constraint body. Scalar and multiplier contributions accumulate;
/// adding the same variable twice merges the attached polynomials.
#[derive(Clone, Debug, Default)]
pub struct SosExpression {
    known: Polynomial,
    scalar_terms: BTreeMap<usize, Polynomial>,
    sos_terms: BTreeMap<usize, Polynomial>,
}

impl SosExpression {
    pub fn new(known: Polynomial) -> SosExpression {
        SosExpression {
            known,
            ..Default::default()
        }
    }

    /// Adds `s * p` to the expression.
    pub fn add_scalar(&mut self, s: ScalarVar, p: &Polynomial) {
        if p.is_zero() {
            return;
        }
        let slot = self.scalar_terms.entry(s.0).or_default();
        *slot = &*slot + p;
    }

    /// Adds `sigma * q` to the expression.
    pub fn add_sos(&mut self, v: SosVar, q: &Polynomial) {
        if q.is_zero() {
            return;
        }
        let slot = self.sos_terms.entry(v.0).or_default();
        *slot = &*slot + q;
    }
}

#[derive(Clone, Debug, Default)]
pub struct SosProgram {
    scalars: Vec<ScalarDecl>,
    sos_vars: Vec<SosDecl>,
    constraints: Vec<SosExpression>,
    /// Per-constraint Gram basis override, parallel to `constraints`.
    constraint_basis: Vec<Option<Vec<Monomial>>>,
    linear_eqs: Vec<(Vec<(usize, f64)>, f64)>,
    linear_ges: Vec<(Vec<(usize, f64)>, f64)>,
    objective: Vec<(usize, f64)>,
    maximize: bool,
}

impl SosProgram {
    pub fn new() -> SosProgram {
        SosProgram::default()
    }

    pub fn scalar(&mut self, label: &str, sign: Sign) -> ScalarVar {
        self.scalars.push(ScalarDecl {
            label: label.to_string(),
            sign,
        });
        ScalarVar(self.scalars.len() - 1)
    }

    /// SOS polynomial variable of the given even degree, Gram basis over all
    /// monomials of degree up to `degree / 2`.
    pub fn sos_poly(&mut self, label: &str, vars: &[VarId], degree: usize) -> Result<SosVar, SosError> {
        if degree % 2 != 0 {
            return Err(SosError::BadMultiplierDegree(degree));
        }
        let basis = monomials_in_degree_range(vars, 0, degree / 2);
        self.sos_vars.push(SosDecl {
            label: label.to_string(),
            basis,
        });
        Ok(SosVar(self.sos_vars.len() - 1))
    }

    /// SOS multiplier vanishing at the origin: the Gram basis starts at
    /// degree one. This is what domain multipliers in the stability pipeline
    /// use; it also keeps those compiled SDPs strictly feasible.
    pub fn sos_multiplier(&mut self, label: &str, vars: &[VarId], degree: usize) -> Result<SosVar, SosError> {
        if degree == 0 || degree % 2 != 0 {
            return Err(SosError::BadMultiplierDegree(degree));
        }
        let basis = monomials_in_degree_range(vars, 1, degree / 2);
        self.sos_vars.push(SosDecl {
            label: label.to_string(),
            basis,
        });
        Ok(SosVar(self.sos_vars.len() - 1))
    }

    /// SOS variable over an explicit Gram basis, for programs whose
    /// constraint structure pins part of a degree-range basis to zero. A
    /// monomial whose square cannot appear in the constraint gets a Gram
    /// diagonal that is zero at every feasible point, which destroys strict
    /// feasibility; callers avoid that by passing only supported monomials.
    pub fn sos_with_basis(&mut self, label: &str, mut basis: Vec<Monomial>) -> SosVar {
        assert!(!basis.is_empty(), "empty Gram basis");
        basis.sort();
        basis.dedup();
        self.sos_vars.push(SosDecl {
            label: label.to_string(),
            basis,
        });
        SosVar(self.sos_vars.len() - 1)
    }

    /// Requires the expression to be a sum of squares; returns its index for
    /// certificate extraction.
    pub fn require_sos(&mut self, e: SosExpression) -> usize {
        self.constraints.push(e);
        self.constraint_basis.push(None);
        self.constraints.len() - 1
    }

    /// Like [`SosProgram::require_sos`] but with an explicit Gram basis for
    /// the constraint instead of the derived degree-interval one. Same
    /// rationale as [`SosProgram::sos_with_basis`].
    pub fn require_sos_with_basis(&mut self, e: SosExpression, mut basis: Vec<Monomial>) -> usize {
        assert!(!basis.is_empty(), "empty Gram basis");
        basis.sort();
        basis.dedup();
        self.constraints.push(e);
        self.constraint_basis.push(Some(basis));
        self.constraints.len() - 1
    }

    pub fn linear_eq(&mut self, terms: &[(ScalarVar, f64)], rhs: f64) {
        self.linear_eqs
            .push((terms.iter().map(|&(s, c)| (s.0, c)).collect(), rhs));
    }

    pub fn linear_ge(&mut self, terms: &[(ScalarVar, f64)], rhs: f64) {
        self.linear_ges
            .push((terms.iter().map(|&(s, c)| (s.0, c)).collect(), rhs));
    }

    pub fn minimize(&mut self, terms: &[(ScalarVar, f64)]) {
        self.objective = terms.iter().map(|&(s, c)| (s.0, c)).collect();
        self.maximize = false;
    }

    pub fn maximize(&mut self, terms: &[(ScalarVar, f64)]) {
        self.objective = terms.iter().map(|&(s, c)| (s.0, c)).collect();
        self.maximize = true;
    }

    pub fn compile(&self) -> Result<CompiledSos, SosError> {
        compile(self)
    }
}

#[derive(Clone, Copy, Debug)]
enum Unknown {
    Scalar(usize),
    SosEntry { var: usize, a: usize, b: usize },
    GramEntry { cons: usize, i: usize, j: usize },
}

#[derive(Clone, Debug)]
struct ElimRecord {
    scalar: usize,
    constant: f64,
    terms: Vec<(usize, f64)>,
}

struct Equality {
    rhs: f64,
    /// (unknown id, coefficient); the equality reads
    /// `sum_producers mult * Q + sum terms coef * u = rhs`
    terms: Vec<(usize, f64)>,
    producers: Vec<(usize, f64)>,
}

pub struct CompiledSos {
    sdp: SdpProblem,
    cons_basis: Vec<Vec<Monomial>>,
    sos_basis: Vec<Vec<Monomial>>,
    sos_block: Vec<usize>,
    scalar_param: Vec<Option<usize>>,
    scalar_labels: Vec<String>,
    sos_labels: Vec<String>,
    elims: Vec<ElimRecord>,
    constraints: Vec<SosExpression>,
    obj_negated: bool,
}

/// Outcome of compiling and solving a program.
pub struct SosSolution {
    pub status: SdpStatus,
    /// Objective in the program's own sense; NaN unless Optimal.
    pub objective: f64,
    pub sdp: SdpSolution,
}

/// Merges duplicate variables in a linear term list and drops zeros.
fn coalesce_terms(terms: &mut Vec<(usize, f64)>) {
    terms.sort_by_key(|&(s, _)| s);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    for &(s, c) in terms.iter() {
        match merged.last_mut() {
            Some(last) if last.0 == s => last.1 += c,
            _ => merged.push((s, c)),
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    *terms = merged;
}

fn compile(prog: &SosProgram) -> Result<CompiledSos, SosError> {
    // eliminate linear equalities by substitution up front
    let mut constraints = prog.constraints.clone();
    let mut ges = prog.linear_ges.clone();
    let mut objective = prog.objective.clone();
    let mut eliminated = vec![false; prog.scalars.len()];
    let mut elims: Vec<ElimRecord> = Vec::new();
    let mut pending_eqs = prog.linear_eqs.clone();
    while let Some((mut terms, rhs)) = pending_eqs.pop() {
        coalesce_terms(&mut terms);
        let Some(&(pivot, cp)) = terms.first() else {
            if rhs.abs() > 1e-12 {
                return Err(SosError::DegenerateLinear);
            }
            continue;
        };
        // pivot = (rhs - sum others) / cp
        let constant = rhs / cp;
        let sub: Vec<(usize, f64)> = terms[1..]
            .iter()
            .map(|&(s, c)| (s, -c / cp))
            .collect();
        let apply_linear = |list: &mut Vec<(usize, f64)>, rhs: &mut f64| {
            coalesce_terms(list);
            if let Some(pos) = list.iter().position(|&(s, _)| s == pivot) {
                let w = list.remove(pos).1;
                *rhs -= w * constant;
                for &(s, c) in &sub {
                    list.push((s, w * c));
                }
            }
        };
        for (terms, r) in pending_eqs.iter_mut() {
            apply_linear(terms, r);
        }
        for (terms, r) in ges.iter_mut() {
            apply_linear(terms, r);
        }
        {
            let mut dummy = 0.0;
            if let Some(pos) = objective.iter().position(|&(s, _)| s == pivot) {
                let w = objective.remove(pos).1;
                dummy += w * constant; // constant offset, reapplied after solve
                for &(s, c) in &sub {
                    objective.push((s, w * c));
                }
                // fold the constant into the record so reported objectives stay exact
                elims.push(ElimRecord {
                    scalar: usize::MAX, // sentinel: objective offset
                    constant: dummy,
                    terms: Vec::new(),
                });
            }
        }
        for e in constraints.iter_mut() {
            if let Some(p) = e.scalar_terms.remove(&pivot) {
                e.known = &e.known + &p.scale(constant);
                for &(s, c) in &sub {
                    let slot = e.scalar_terms.entry(s).or_default();
                    *slot = &*slot + &p.scale(c);
                }
                // cancellation can empty a slot; a zero attachment would
                // needlessly widen the Gram basis degree interval
                e.scalar_terms.retain(|_, p| !p.is_zero());
            }
        }
        // nonnegative pivots keep their sign constraint as an inequality
        if prog.scalars[pivot].sign == Sign::Nonnegative {
            ges.push((sub.clone(), -constant));
        }
        eliminated[pivot] = true;
        elims.push(ElimRecord {
            scalar: pivot,
            constant,
            terms: sub,
        });
    }

    // enumerate unknowns: live scalars, multiplier Gram entries, constraint
    // Gram entries
    let mut unknowns: Vec<Unknown> = Vec::new();
    let mut scalar_uid = vec![None; prog.scalars.len()];
    for k in 0..prog.scalars.len() {
        if !eliminated[k] {
            scalar_uid[k] = Some(unknowns.len());
            unknowns.push(Unknown::Scalar(k));
        }
    }
    let mut sos_entry_uid: Vec<BTreeMap<(usize, usize), usize>> = Vec::new();
    for (l, decl) in prog.sos_vars.iter().enumerate() {
        let mut map = BTreeMap::new();
        let nb = decl.basis.len();
        for a in 0..nb {
            for b in a..nb {
                map.insert((a, b), unknowns.len());
                unknowns.push(Unknown::SosEntry { var: l, a, b });
            }
        }
        sos_entry_uid.push(map);
    }
    let cons_basis: Vec<Vec<Monomial>> = constraints
        .iter()
        .enumerate()
        .map(|(c, e)| match &prog.constraint_basis[c] {
            Some(basis) => basis.clone(),
            None => expression_basis(e, &prog.sos_vars),
        })
        .collect();
    let mut gram_uid: Vec<BTreeMap<(usize, usize), usize>> = Vec::new();
    for (c, basis) in cons_basis.iter().enumerate() {
        let mut map = BTreeMap::new();
        let nb = basis.len();
        for i in 0..nb {
            for j in i..nb {
                map.insert((i, j), unknowns.len());
                unknowns.push(Unknown::GramEntry { cons: c, i, j });
            }
        }
        gram_uid.push(map);
    }

    // coefficient-matching equalities, one per monomial per constraint
    let mut equalities: Vec<Equality> = Vec::new();
    for (c, e) in constraints.iter().enumerate() {
        let basis = &cons_basis[c];
        let mut eqs: BTreeMap<Monomial, Equality> = BTreeMap::new();
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let m = basis[i].mul(&basis[j]);
                let mult = if i == j { 1.0 } else { 2.0 };
                let uid = gram_uid[c][&(i, j)];
                eqs.entry(m)
                    .or_insert_with(|| Equality {
                        rhs: 0.0,
                        terms: Vec::new(),
                        producers: Vec::new(),
                    })
                    .producers
                    .push((uid, mult));
            }
        }
        let touch = |m: Monomial, uid: usize, coef: f64, eqs: &mut BTreeMap<Monomial, Equality>| -> Result<(), SosError> {
            match eqs.get_mut(&m) {
                Some(eq) => {
                    eq.terms.push((uid, coef));
                    Ok(())
                }
                None => Err(SosError::UnmatchedMonomial {
                    constraint: c,
                    monomial: format!("{m}"),
                }),
            }
        };
        for (m, coef) in e.known.terms() {
            match eqs.get_mut(m) {
                Some(eq) => eq.rhs += coef,
                None => {
                    return Err(SosError::UnmatchedMonomial {
                        constraint: c,
                        monomial: format!("{m}"),
                    })
                }
            }
        }
        for (&s, p) in &e.scalar_terms {
            let uid = scalar_uid[s].expect("eliminated scalars were substituted out");
            for (m, coef) in p.terms() {
                touch(m.clone(), uid, -coef, &mut eqs)?;
            }
        }
        for (&l, q) in &e.sos_terms {
            let basis_l = &prog.sos_vars[l].basis;
            for a in 0..basis_l.len() {
                for b in a..basis_l.len() {
                    let mult = if a == b { 1.0 } else { 2.0 };
                    let base = basis_l[a].mul(&basis_l[b]);
                    let uid = sos_entry_uid[l][&(a, b)];
                    for (mq, cq) in q.terms() {
                        touch(base.mul(mq), uid, -mult * cq, &mut eqs)?;
                    }
                }
            }
        }
        for (_, mut eq) in eqs {
            coalesce_terms(&mut eq.terms);
            equalities.push(eq);
        }
    }

    // pivots: the first producer of each equality is substituted out; the
    // remaining producers join the term list with their multiplicities
    let mut is_pivot = vec![false; unknowns.len()];
    let mut pivot_info: Vec<(usize, f64)> = Vec::with_capacity(equalities.len()); // (uid, mult)
    for eq in &mut equalities {
        let (uid, mult) = *eq
            .producers
            .first()
            .expect("every monomial equality comes from at least one Gram product");
        is_pivot[uid] = true;
        pivot_info.push((uid, mult));
        for &(u2, m2) in &eq.producers[1..] {
            eq.terms.push((u2, m2));
        }
    }

    // parameters: non-pivot unknowns, in unknown order
    let mut param_of: Vec<Option<usize>> = vec![None; unknowns.len()];
    let mut num_params = 0;
    for (uid, _) in unknowns.iter().enumerate() {
        if !is_pivot[uid] {
            param_of[uid] = Some(num_params);
            num_params += 1;
        }
    }

    // block layout: constraint Grams, multiplier Grams, nonnegative scalars,
    // linear inequality slacks
    let ncons = constraints.len();
    let mut block_sizes: Vec<usize> = cons_basis.iter().map(Vec::len).collect();
    let sos_block: Vec<usize> = (0..prog.sos_vars.len())
        .map(|l| {
            block_sizes.push(prog.sos_vars[l].basis.len());
            ncons + l
        })
        .collect();
    let mut scalar_block = vec![None; prog.scalars.len()];
    for (k, decl) in prog.scalars.iter().enumerate() {
        if !eliminated[k] && decl.sign == Sign::Nonnegative {
            scalar_block[k] = Some(block_sizes.len());
            block_sizes.push(1);
        }
    }
    let ge_block_start = block_sizes.len();
    for _ in &ges {
        block_sizes.push(1);
    }

    let gram_pos = |uid: usize| -> (usize, usize, usize) {
        match unknowns[uid] {
            Unknown::SosEntry { var, a, b } => (sos_block[var], a, b),
            Unknown::GramEntry { cons, i, j } => (cons, i, j),
            Unknown::Scalar(_) => unreachable!("scalars are never Gram entries"),
        }
    };

    let mut sdp = SdpProblem::new(block_sizes, num_params);
    let mut scalar_used = vec![false; prog.scalars.len()];

    // own-position entries for gram parameters and nonnegative scalars
    for (uid, u) in unknowns.iter().enumerate() {
        let Some(p) = param_of[uid] else { continue };
        match *u {
            Unknown::Scalar(k) => {
                if let Some(b) = scalar_block[k] {
                    sdp.add_constraint_entry(p, b, 0, 0, 1.0);
                }
            }
            _ => {
                let (b, i, j) = gram_pos(uid);
                sdp.add_constraint_entry(p, b, i, j, 1.0);
            }
        }
    }
    // substituted pivot entries: Q_piv = (rhs - sum coef * u) / mult
    for (eq, &(piv_uid, piv_mult)) in equalities.iter().zip(&pivot_info) {
        let (b, i, j) = gram_pos(piv_uid);
        if eq.rhs != 0.0 {
            sdp.add_offset_entry(b, i, j, -eq.rhs / piv_mult);
        }
        for &(uid, coef) in &eq.terms {
            if let Unknown::Scalar(k) = unknowns[uid] {
                scalar_used[k] = true;
            }
            let p = param_of[uid].expect("equality terms reference parameters only");
            sdp.add_constraint_entry(p, b, i, j, -coef / piv_mult);
        }
    }
    for (g, (terms, rhs)) in ges.iter_mut().enumerate() {
        coalesce_terms(terms);
        let b = ge_block_start + g;
        for &(s, cf) in terms.iter() {
            scalar_used[s] = true;
            let uid = scalar_uid[s].expect("inequalities reference live scalars");
            let p = param_of[uid].expect("scalars are always parameters");
            sdp.add_constraint_entry(p, b, 0, 0, cf);
        }
        if *rhs != 0.0 {
            sdp.add_offset_entry(b, 0, 0, *rhs);
        }
    }
    for &(s, cf) in &objective {
        let uid = scalar_uid[s].expect("objective references live scalars");
        let p = param_of[uid].expect("scalars are always parameters");
        let signed = if prog.maximize { -cf } else { cf };
        sdp.set_objective(p, sdp.objective()[p] + signed);
    }
    for (k, decl) in prog.scalars.iter().enumerate() {
        if eliminated[k] {
            continue;
        }
        let used = scalar_used[k] || scalar_block[k].is_some();
        if !used {
            return Err(SosError::UnusedScalar(decl.label.clone()));
        }
    }

    Ok(CompiledSos {
        sdp,
        cons_basis,
        sos_basis: prog.sos_vars.iter().map(|d| d.basis.clone()).collect(),
        sos_block,
        scalar_param: scalar_uid
            .iter()
            .map(|u| u.and_then(|uid| param_of[uid]))
            .collect(),
        scalar_labels: prog.scalars.iter().map(|d| d.label.clone()).collect(),
        sos_labels: prog.sos_vars.iter().map(|d| d.label.clone()).collect(),
        elims,
        constraints,
        obj_negated: prog.maximize,
    })
}

/// Gram basis for one constraint: all monomials over the expression's
/// variables with total degree between `floor(mindeg/2)` and
/// `ceil(maxdeg/2)`.
fn expression_basis(e: &SosExpression, sos_vars: &[SosDecl]) -> Vec<Monomial> {
    use std::collections::BTreeSet;
    let mut vars: BTreeSet<VarId> = e.known.support();
    let mut maxdeg = 0usize;
    let mut mindeg = usize::MAX;
    let mut consider = |lo: usize, hi: usize| {
        maxdeg = maxdeg.max(hi);
        mindeg = mindeg.min(lo);
    };
    if !e.known.is_zero() {
        consider(e.known.min_degree(), e.known.degree());
    }
    for p in e.scalar_terms.values() {
        vars.extend(p.support());
        consider(p.min_degree(), p.degree());
    }
    for (&l, q) in &e.sos_terms {
        vars.extend(q.support());
        let basis = &sos_vars[l].basis;
        let bmax = basis.iter().map(Monomial::degree).max().unwrap_or(0);
        let bmin = basis.iter().map(Monomial::degree).min().unwrap_or(0);
        for m in basis {
            vars.extend(m.vars());
        }
        consider(2 * bmin + q.min_degree(), 2 * bmax + q.degree());
    }
    if mindeg == usize::MAX {
        mindeg = 0;
    }
    let vars: Vec<VarId> = vars.into_iter().collect();
    monomials_in_degree_range(&vars, mindeg / 2, maxdeg.div_ceil(2))
}

impl CompiledSos {
    pub fn sdp(&self) -> &SdpProblem {
        &self.sdp
    }

    pub fn num_params(&self) -> usize {
        self.sdp.num_vars()
    }

    pub fn gram_basis(&self, constraint: usize) -> &[Monomial] {
        &self.cons_basis[constraint]
    }

    pub fn scalar_label(&self, s: ScalarVar) -> &str {
        &self.scalar_labels[s.0]
    }

    pub fn sos_label(&self, v: SosVar) -> &str {
        &self.sos_labels[v.0]
    }

    pub fn solve(&self, settings: &SdpSettings) -> Result<SosSolution, SosError> {
        let sol = sdp::solve(&self.sdp, settings)?;
        let objective = if sol.status == SdpStatus::Optimal {
            let mut v = sol.objective_value;
            if self.obj_negated {
                v = -v;
            }
            // reapply constant offsets from eliminated objective terms
            for rec in &self.elims {
                if rec.scalar == usize::MAX {
                    v += rec.constant;
                }
            }
            v
        } else {
            f64::NAN
        };
        Ok(SosSolution {
            status: sol.status,
            objective,
            sdp: sol,
        })
    }

    /// Value of a scalar variable at the solved point, resolving linear
    /// eliminations.
    pub fn scalar_value(&self, sol: &SdpSolution, s: ScalarVar) -> f64 {
        let mut values: Vec<Option<f64>> = self
            .scalar_param
            .iter()
            .map(|p| p.map(|idx| sol.x[idx]))
            .collect();
        for rec in self.elims.iter().rev() {
            if rec.scalar == usize::MAX {
                continue;
            }
            let mut v = rec.constant;
            for &(o, c) in &rec.terms {
                v += c * values[o].expect("substitution references resolved scalars");
            }
            values[rec.scalar] = Some(v);
        }
        values[s.0].unwrap_or(f64::NAN)
    }

    /// The multiplier polynomial realized at the solved point, read from its
    /// Gram block in the slack.
    pub fn sos_value(&self, sol: &SdpSolution, v: SosVar) -> Polynomial {
        let block = self.sos_block[v.0];
        let basis = &self.sos_basis[v.0];
        gram_to_poly(basis, sol.slack.block(block), basis.len())
    }

    /// Gram matrix of a constraint at the solved point.
    pub fn gram(&self, sol: &SdpSolution, constraint: usize) -> linalg::Mat {
        let n = self.cons_basis[constraint].len();
        let blk = sol.slack.block(constraint);
        let mut m = linalg::Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, blk[i * n + j]);
            }
        }
        m
    }

    /// The constraint expression with all decisions substituted at the solved
    /// point.
    pub fn realized(&self, sol: &SdpSolution, constraint: usize) -> Polynomial {
        let e = &self.constraints[constraint];
        let mut p = e.known.clone();
        for (&s, pk) in &e.scalar_terms {
            p = &p + &pk.scale(self.scalar_value(sol, ScalarVar(s)));
        }
        for (&l, q) in &e.sos_terms {
            p = &p + &(&self.sos_value(sol, SosVar(l)) * q);
        }
        p
    }

    /// Extracts an explicit square decomposition `h_1^2 + ... + h_r^2` of a
    /// constraint from the Gram eigendecomposition. Fails if the Gram has an
    /// eigenvalue below `-1e-7` or the reconstruction misses the realized
    /// expression by more than `1e-6` in any coefficient.
    pub fn extract_certificate(
        &self,
        sol: &SdpSolution,
        constraint: usize,
    ) -> Result<Vec<Polynomial>, SosError> {
        let basis = &self.cons_basis[constraint];
        let gram = self.gram(sol, constraint);
        let (vals, vecs) = linalg::sym_eigen(&gram);
        if let Some(&worst) = vals.last() {
            if worst < -1e-7 {
                return Err(SosError::Certificate(format!(
                    "Gram matrix has eigenvalue {worst:.3e}"
                )));
            }
        }
        let mut hs = Vec::new();
        for (r, &lam) in vals.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let w = lam.sqrt();
            let mut h = Polynomial::zero();
            for (i, m) in basis.iter().enumerate() {
                h.add_term(m.clone(), w * vecs.get(i, r));
            }
            if !h.is_zero() {
                hs.push(h);
            }
        }
        let mut recon = Polynomial::zero();
        for h in &hs {
            recon = &recon + &(h * h);
        }
        let target = self.realized(sol, constraint);
        let diff = recon.max_coeff_diff(&target);
        if diff > 1e-6 {
            return Err(SosError::Certificate(format!(
                "reconstruction misses the expression by {diff:.3e}"
            )));
        }
        Ok(hs)
    }
}

/// Expands a Gram block over `basis` into the polynomial it represents.
fn gram_to_poly(basis: &[Monomial], block: &[f64], n: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for i in 0..n {
        for j in 0..n {
            let v = block[i * n + j];
            if v != 0.0 {
                p.add_term(basis[i].mul(&basis[j]), v);
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn x() -> VarId {
        VarId(0)
    }
    fn y() -> VarId {
        VarId(1)
    }

    fn settings() -> SdpSettings {
        SdpSettings::default()
    }

    #[test]
    fn perfect_square_has_two_element_basis_and_certificate() {
        // (x + y)^2: homogeneous quadratic, so the constant monomial is
        // excluded by the degree interval rule
        let s = &Polynomial::var(x()) + &Polynomial::var(y());
        let sq = &s * &s;
        let mut prog = SosProgram::new();
        let c = prog.require_sos(SosExpression::new(sq.clone()));
        let compiled = prog.compile().unwrap();
        assert_eq!(compiled.gram_basis(c).len(), 2);
        let sol = compiled.solve(&settings()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let hs = compiled.extract_certificate(&sol.sdp, c).unwrap();
        let mut recon = Polynomial::zero();
        for h in &hs {
            recon = &recon + &(h * h);
        }
        assert!(recon.approx_eq(&sq, 1e-6), "got {recon}");
    }

    #[test]
    fn diagonal_gram_for_sum_of_pure_squares() {
        // x^2 + y^2 forces the off-diagonal Gram entry to zero
        let e = &(&Polynomial::var(x()) * &Polynomial::var(x()))
            + &(&Polynomial::var(y()) * &Polynomial::var(y()));
        let mut prog = SosProgram::new();
        let c = prog.require_sos(SosExpression::new(e.clone()));
        let compiled = prog.compile().unwrap();
        let sol = compiled.solve(&settings()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let g = compiled.gram(&sol.sdp, c);
        assert!((g.get(0, 0) - 1.0).abs() < 1e-6);
        assert!((g.get(1, 1) - 1.0).abs() < 1e-6);
        assert!(g.get(0, 1).abs() < 1e-6);
        let hs = compiled.extract_certificate(&sol.sdp, c).unwrap();
        assert_eq!(hs.len(), 2);
    }

    #[test]
    fn motzkin_polynomial_is_not_sos() {
        // x^4 y^2 + x^2 y^4 - 3 x^2 y^2 + 1 is nonnegative yet not SOS
        let xm = |ex: u32, ey: u32, c: f64| {
            Polynomial::term(c, Monomial::from_exps(&[(x(), ex), (y(), ey)]))
        };
        let motzkin = &(&(&xm(4, 2, 1.0) + &xm(2, 4, 1.0)) + &xm(2, 2, -3.0)) + &xm(0, 0, 1.0);
        let mut prog = SosProgram::new();
        prog.require_sos(SosExpression::new(motzkin));
        let compiled = prog.compile().unwrap();
        let start = std::time::Instant::now();
        let sol = compiled.solve(&settings()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        assert!(sol.sdp.farkas.is_some());
        assert!(start.elapsed().as_secs_f64() < 5.0);
    }

    #[test]
    fn decay_rate_of_linear_system_is_two() {
        // max alpha with 2x^2 - alpha x^2 - sigma (gamma - x^2) SOS;
        // for xdot = -x, V = x^2 the answer is 2 at any level gamma
        for gamma in [0.2, 0.5, 0.9] {
            let v = &Polynomial::var(x()) * &Polynomial::var(x());
            let mut prog = SosProgram::new();
            let alpha = prog.scalar("alpha", Sign::Free);
            let sigma = prog.sos_multiplier("sigma", &[x()], 2).unwrap();
            let mut e = SosExpression::new(v.scale(2.0));
            e.add_scalar(alpha, &v.scale(-1.0));
            e.add_sos(sigma, &(&v - &Polynomial::constant(gamma)));
            prog.require_sos(e);
            prog.maximize(&[(alpha, 1.0)]);
            let compiled = prog.compile().unwrap();
            let sol = compiled.solve(&settings()).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!((sol.objective - 2.0).abs() < 1e-6, "alpha* = {}", sol.objective);
            assert!((compiled.scalar_value(&sol.sdp, alpha) - 2.0).abs() < 1e-6);
            // the multiplier degenerates to zero here
            assert!(compiled.sos_value(&sol.sdp, sigma).coeff_linf() < 1e-5);
        }
    }

    #[test]
    fn random_sums_of_squares_round_trip() {
        let mut rng = StdRng::seed_from_u64(17);
        for _case in 0..6 {
            let nv = rng.gen_range(1..=3usize);
            let vars: Vec<VarId> = (0..nv as u32).map(VarId).collect();
            let deg = rng.gen_range(1..=2usize);
            let basis = monomials_in_degree_range(&vars, 0, deg);
            let mut target = Polynomial::zero();
            for _ in 0..rng.gen_range(1..=3) {
                let h = Polynomial::from_terms(basis.iter().map(|m| {
                    (rng.gen_range(-1.0..1.0), m.clone())
                }));
                target = &target + &(&h * &h);
            }
            let mut prog = SosProgram::new();
            let c = prog.require_sos(SosExpression::new(target.clone()));
            let compiled = prog.compile().unwrap();
            let sol = compiled.solve(&settings()).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            let hs = compiled.extract_certificate(&sol.sdp, c).unwrap();
            let mut recon = Polynomial::zero();
            for h in &hs {
                recon = &recon + &(h * h);
            }
            assert!(
                recon.max_coeff_diff(&target) <= 1e-6,
                "difference {:.3e}",
                recon.max_coeff_diff(&target)
            );
        }
    }

    #[test]
    fn unused_multiplier_changes_nothing() {
        let v = &Polynomial::var(x()) * &Polynomial::var(x());
        let build = |extra: bool| {
            let mut prog = SosProgram::new();
            let alpha = prog.scalar("alpha", Sign::Free);
            let sigma = prog.sos_multiplier("sigma", &[x()], 2).unwrap();
            if extra {
                prog.sos_multiplier("unused", &[x(), y()], 4).unwrap();
            }
            let mut e = SosExpression::new(v.scale(2.0));
            e.add_scalar(alpha, &v.scale(-1.0));
            e.add_sos(sigma, &(&v - &Polynomial::constant(0.5)));
            prog.require_sos(e);
            prog.maximize(&[(alpha, 1.0)]);
            prog.compile().unwrap().solve(&settings()).unwrap()
        };
        let base = build(false);
        let with_extra = build(true);
        assert_eq!(base.status, with_extra.status);
        assert!((base.objective - with_extra.objective).abs() < 1e-6);
    }

    #[test]
    fn unused_free_scalar_is_rejected() {
        let mut prog = SosProgram::new();
        let _orphan = prog.scalar("orphan", Sign::Free);
        let e = SosExpression::new(&Polynomial::var(x()) * &Polynomial::var(x()));
        prog.require_sos(e);
        assert!(matches!(
            prog.compile(),
            Err(SosError::UnusedScalar(label)) if label == "orphan"
        ));
    }

    #[test]
    fn constraint_scaling_leaves_optimum_alone() {
        let solve_scaled = |lambda: f64| {
            let v = &Polynomial::var(x()) * &Polynomial::var(x());
            let mut prog = SosProgram::new();
            let alpha = prog.scalar("alpha", Sign::Free);
            let sigma = prog.sos_multiplier("sigma", &[x()], 2).unwrap();
            let mut e = SosExpression::new(v.scale(2.0 * lambda));
            e.add_scalar(alpha, &v.scale(-lambda));
            e.add_sos(sigma, &(&v.scale(lambda) - &Polynomial::constant(0.4 * lambda)));
            prog.require_sos(e);
            prog.maximize(&[(alpha, 1.0)]);
            prog.compile().unwrap().solve(&settings()).unwrap().objective
        };
        let a = solve_scaled(1.0);
        let b = solve_scaled(3.7);
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }

    #[test]
    fn linear_inequalities_and_equalities() {
        // t x^2 SOS forces t >= 0; cap with t <= 3 and maximize
        let v = &Polynomial::var(x()) * &Polynomial::var(x());
        let mut prog = SosProgram::new();
        let t = prog.scalar("t", Sign::Free);
        let mut e = SosExpression::new(Polynomial::zero());
        e.add_scalar(t, &v);
        prog.require_sos(e);
        prog.linear_ge(&[(t, -1.0)], -3.0);
        prog.maximize(&[(t, 1.0)]);
        let sol = prog.compile().unwrap().solve(&settings()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-6);

        // equality elimination: u + w = 5 with w free, minimize u with u, w
        // both entering an SOS constraint
        let mut prog2 = SosProgram::new();
        let u = prog2.scalar("u", Sign::Free);
        let w = prog2.scalar("w", Sign::Free);
        let mut e2 = SosExpression::new(Polynomial::zero());
        e2.add_scalar(u, &v);
        e2.add_scalar(w, &v);
        prog2.require_sos(e2); // (u + w) x^2 SOS: u + w >= 0, tight anyway
        prog2.linear_eq(&[(u, 1.0), (w, 1.0)], 5.0);
        prog2.minimize(&[(u, 1.0)]);
        prog2.linear_ge(&[(u, 1.0)], 1.0); // keep it bounded
        let compiled = prog2.compile().unwrap();
        let sol2 = compiled.solve(&settings()).unwrap();
        assert_eq!(sol2.status, SdpStatus::Optimal);
        assert!((sol2.objective - 1.0).abs() < 1e-5);
        let uv = compiled.scalar_value(&sol2.sdp, u);
        let wv = compiled.scalar_value(&sol2.sdp, w);
        assert!((uv + wv - 5.0).abs() < 1e-5, "u={uv} w={wv}");
    }

    #[test]
    fn nonnegative_scalar_reaches_its_bound() {
        // max t with (1 - t) x^2 SOS and t >= 0: t* = 1
        let v = &Polynomial::var(x()) * &Polynomial::var(x());
        let mut prog = SosProgram::new();
        let t = prog.scalar("t", Sign::Nonnegative);
        let mut e = SosExpression::new(v.clone());
        e.add_scalar(t, &v.scale(-1.0));
        prog.require_sos(e);
        prog.maximize(&[(t, 1.0)]);
        let sol = prog.compile().unwrap().solve(&settings()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-6);
    }

    #[test]
    fn multiplier_degree_validation() {
        let mut prog = SosProgram::new();
        assert!(matches!(
            prog.sos_multiplier("bad", &[x()], 3),
            Err(SosError::BadMultiplierDegree(3))
        ));
        assert!(matches!(
            prog.sos_multiplier("bad", &[x()], 0),
            Err(SosError::BadMultiplierDegree(0))
        ));
        assert!(prog.sos_poly("ok", &[x()], 0).is_ok());
    }

    #[test]
    fn mixed_degree_basis_follows_interval_rule() {
        // known has degrees 2..4, multiplier contributes 2..4 as well:
        // basis must span degrees 1..2 exactly
        let vx = Polynomial::var(x());
        let v = &vx * &vx;
        let quartic = &v * &v;
        let mut prog = SosProgram::new();
        let sigma = prog.sos_multiplier("s", &[x(), y()], 2).unwrap();
        let mut e = SosExpression::new(&v + &quartic);
        e.add_sos(sigma, &Polynomial::constant(1.0));
        let c = prog.require_sos(e);
        let compiled = prog.compile().unwrap();
        let basis = compiled.gram_basis(c);
        assert!(basis.iter().all(|m| (1..=2).contains(&m.degree())));
        // two variables: 2 linear + 3 quadratic monomials
        assert_eq!(basis.len(), 5);
    }
}
