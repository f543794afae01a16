//! Sparse multivariate polynomials over `f64`.
//!
//! A [`Monomial`] is a sorted list of `(variable, exponent)` pairs with all
//! exponents positive; a [`Polynomial`] maps monomials to coefficients and is
//! kept canonical at all times: terms ordered by graded lexicographic order,
//! coefficients with magnitude at most [`COEFF_EPS`] dropped. Two equal
//! polynomials therefore have identical term lists, which is what makes the
//! serialized formats byte-reproducible.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coefficients at or below this magnitude are treated as zero.
pub const COEFF_EPS: f64 = 1e-14;

/// Identifier of a scalar variable. Networks assign these densely from zero
/// in subsystem declaration order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("no value assigned to variable {0}")]
    MissingAssignment(VarId),
    #[error("variable {0} is not in the local variable list")]
    ForeignVariable(VarId),
}

/// A power product of variables. The exponent list is sorted by variable id
/// and never contains zero exponents; the empty list is the constant 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: Vec<(VarId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(v: VarId) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    /// Builds a monomial from arbitrary pairs: duplicates are merged and zero
    /// exponents dropped.
    pub fn from_exps(pairs: &[(VarId, u32)]) -> Self {
        let mut map: BTreeMap<VarId, u32> = BTreeMap::new();
        for &(v, e) in pairs {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial {
            exps: map.into_iter().collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.exps.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.exps
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn exps(&self) -> &[(VarId, u32)] {
        &self.exps
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.exps.iter().map(|&(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (va, ea) = self.exps[i];
            let (vb, eb) = other.exps[j];
            match va.cmp(&vb) {
                Ordering::Less => {
                    exps.push((va, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push((vb, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[j..]);
        Monomial { exps }
    }

    /// Exact division: `self / other`, or `None` if some exponent would go
    /// negative.
    pub fn divide(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut j = 0;
        for &(v, e) in &self.exps {
            let mut rem = e;
            while j < other.exps.len() && other.exps[j].0 < v {
                return None; // divisor has a variable self lacks
            }
            if j < other.exps.len() && other.exps[j].0 == v {
                let d = other.exps[j].1;
                if d > e {
                    return None;
                }
                rem = e - d;
                j += 1;
            }
            if rem > 0 {
                exps.push((v, rem));
            }
        }
        if j < other.exps.len() {
            return None;
        }
        Some(Monomial { exps })
    }

    pub fn eval_dense(&self, vals: &[f64]) -> f64 {
        let mut acc = 1.0;
        for &(v, e) in &self.exps {
            acc *= vals[v.0 as usize].powi(e as i32);
        }
        acc
    }
}

/// Graded lexicographic order: lower total degree sorts first; among equal
/// degrees the monomial with the larger exponent on the smallest differing
/// variable sorts last (so iteration ascending ends at the leading term).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (va, ea) = self.exps[i];
            let (vb, eb) = other.exps[j];
            match va.cmp(&vb) {
                Ordering::Less => return Ordering::Greater, // self has power on a smaller var
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(&eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        debug_assert!(i == self.exps.len() && j == other.exps.len());
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in canonical form.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: VarId) -> Self {
        Polynomial::term(1.0, Monomial::var(v))
    }

    pub fn term(c: f64, m: Monomial) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (f64, Monomial)>>(iter: I) -> Self {
        let mut p = Polynomial::zero();
        for (c, m) in iter {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m`, keeping the canonical form.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        use std::collections::btree_map::Entry;
        if !c.is_finite() {
            // keep NaN/inf visible instead of silently dropping it
            self.terms.insert(m, c);
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().abs() <= COEFF_EPS {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c.abs() > COEFF_EPS {
                    e.insert(c);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    /// Smallest total degree among terms; zero for the zero polynomial.
    pub fn min_degree(&self) -> usize {
        self.terms.keys().next().map_or(0, Monomial::degree)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Terms in descending graded-lex order (leading term first).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().rev().map(|(m, &c)| (m, c))
    }

    pub fn support(&self) -> BTreeSet<VarId> {
        let mut vars = BTreeSet::new();
        for m in self.terms.keys() {
            vars.extend(m.vars());
        }
        vars
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in self.terms() {
            p.add_term(m.clone(), c * s);
        }
        p
    }

    pub fn differentiate(&self, v: VarId) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in self.terms() {
            let e = m.degree_in(v);
            if e == 0 {
                continue;
            }
            let reduced = m
                .divide(&Monomial::var(v))
                .expect("positive exponent divides");
            p.add_term(reduced, c * e as f64);
        }
        p
    }

    pub fn gradient(&self, vars: &[VarId]) -> Vec<Polynomial> {
        vars.iter().map(|&v| self.differentiate(v)).collect()
    }

    /// Evaluates with an explicit assignment map; every variable in the
    /// support must be assigned.
    pub fn evaluate(&self, assignment: &BTreeMap<VarId, f64>) -> Result<f64, PolyError> {
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut t = c;
            for &(v, e) in m.exps() {
                let x = assignment
                    .get(&v)
                    .copied()
                    .ok_or(PolyError::MissingAssignment(v))?;
                t *= x.powi(e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluates against a dense state vector indexed by `VarId`. Panics if a
    /// variable is out of range; network states are always dense.
    pub fn eval_dense(&self, vals: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            acc += c * m.eval_dense(vals);
        }
        acc
    }

    /// Sum of coefficient magnitudes.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Largest coefficient magnitude.
    pub fn coeff_linf(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Coefficient-wise comparison; true when the largest coefficient
    /// difference over the union of supports is at most `tol`.
    pub fn approx_eq(&self, other: &Polynomial, tol: f64) -> bool {
        self.max_coeff_diff(other) <= tol
    }

    pub fn max_coeff_diff(&self, other: &Polynomial) -> f64 {
        let mut worst = 0.0f64;
        for (m, c) in self.terms() {
            worst = worst.max((c - other.coeff(m)).abs());
        }
        for (m, c) in other.terms() {
            worst = worst.max((c - self.coeff(m)).abs());
        }
        worst
    }

    /// Rewrites terms against a local variable list, as `(coeff, [(local
    /// index, exponent)])` pairs in descending term order. Fails if the
    /// polynomial mentions a variable outside `vars`.
    pub fn to_local_terms(&self, vars: &[VarId]) -> Result<Vec<(f64, Vec<(usize, u32)>)>, PolyError> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms_desc() {
            let mut exps = Vec::with_capacity(m.exps().len());
            for &(v, e) in m.exps() {
                let local = vars
                    .iter()
                    .position(|&w| w == v)
                    .ok_or(PolyError::ForeignVariable(v))?;
                exps.push((local, e));
            }
            out.push((c, exps));
        }
        Ok(out)
    }

    /// Inverse of [`Polynomial::to_local_terms`].
    pub fn from_local_terms(vars: &[VarId], terms: &[(f64, Vec<(usize, u32)>)]) -> Polynomial {
        let mut p = Polynomial::zero();
        for (c, exps) in terms {
            let pairs: Vec<(VarId, u32)> = exps.iter().map(|&(i, e)| (vars[i], e)).collect();
            p.add_term(Monomial::from_exps(&pairs), *c);
        }
        p
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (m, c) in rhs.terms() {
            p.add_term(m.clone(), c);
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (m, c) in rhs.terms() {
            p.add_term(m.clone(), -c);
        }
        p
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut p = Polynomial::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                p.add_term(ma.mul(mb), ca * cb);
            }
        }
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(v, e) in &self.exps {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms_desc() {
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if (mag - 1.0).abs() <= COEFF_EPS {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// A vector of polynomials, used for dynamics and gradients.
pub type PolyVector = Vec<Polynomial>;

/// Directional derivative of `v` along the vector field `field`, with
/// `field[k]` governing `vars[k]`.
pub fn lie_derivative(v: &Polynomial, vars: &[VarId], field: &[Polynomial]) -> Polynomial {
    assert_eq!(
        vars.len(),
        field.len(),
        "one field component per differentiation variable"
    );
    let mut acc = Polynomial::zero();
    for (&var, f) in vars.iter().zip(field) {
        acc = &acc + &(&v.differentiate(var) * f);
    }
    acc
}

/// All monomials over `vars` with total degree in `[min_degree, max_degree]`,
/// in ascending graded-lex order.
pub fn monomials_in_degree_range(vars: &[VarId], min_degree: usize, max_degree: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current: Vec<(VarId, u32)> = Vec::new();
    fn rec(
        vars: &[VarId],
        idx: usize,
        remaining: usize,
        min_total: usize,
        spent: usize,
        current: &mut Vec<(VarId, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if idx == vars.len() {
            if spent >= min_total {
                out.push(Monomial::from_exps(current));
            }
            return;
        }
        for e in 0..=remaining {
            if e > 0 {
                current.push((vars[idx], e as u32));
            }
            rec(vars, idx + 1, remaining - e, min_total, spent + e, current, out);
            if e > 0 {
                current.pop();
            }
        }
    }
    rec(vars, 0, max_degree, min_degree, 0, &mut current, &mut out);
    out.sort();
    out
}
