use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{AlgebraError, Result};
use crate::scalar::PRat;

/// How a variable may be exponentiated.
///
/// `Ordinary` variables carry exponents >= 0. At most one `Laurent` variable
/// (t) exists per ring; its exponents are bounded below by the ring floor.
/// `Invertible` variables (the v's) may go negative without a floor: they are
/// units of the Morava coefficient ring, and quotients produced by
/// `laurent_divide` can carry inverse powers of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Ordinary,
    Laurent,
    Invertible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Var {
    pub name: String,
    pub degree: i64,
    pub kind: VarKind,
}

/// Ambient ring of a series: prime, ordered variables, truncation window.
///
/// `trunc` bounds the total degree in positive-degree variables (v-variables
/// have negative degree and never trigger truncation); `floor` bounds the
/// exponent of the Laurent variable from below. Both are windowing bounds:
/// operations drop monomials outside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    prime: u32,
    vars: Vec<Var>,
    trunc: i64,
    floor: i64,
}

impl Ring {
    pub fn new(prime: u32, trunc: i64) -> Ring {
        Ring { prime, vars: Vec::new(), trunc, floor: 0 }
    }

    pub fn var(mut self, name: &str, degree: i64) -> Ring {
        self.push(name, degree, VarKind::Ordinary);
        self
    }

    pub fn invertible(mut self, name: &str, degree: i64) -> Ring {
        self.push(name, degree, VarKind::Invertible);
        self
    }

    pub fn laurent(mut self, name: &str, degree: i64, floor: i64) -> Ring {
        assert!(
            !self.vars.iter().any(|v| v.kind == VarKind::Laurent),
            "at most one Laurent variable per ring"
        );
        self.push(name, degree, VarKind::Laurent);
        self.floor = floor;
        self
    }

    fn push(&mut self, name: &str, degree: i64, kind: VarKind) {
        assert!(
            !self.vars.iter().any(|v| v.name == name),
            "duplicate variable {name}"
        );
        self.vars.push(Var { name: name.to_string(), degree, kind });
    }

    pub fn arc(self) -> Arc<Ring> {
        Arc::new(self)
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn idx(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| AlgebraError::Structural(format!("no variable {name} in ring")))
    }

    pub fn laurent_idx(&self) -> Option<usize> {
        self.vars.iter().position(|v| v.kind == VarKind::Laurent)
    }

    /// Total degree contributed by positive-degree variables (truncation measure).
    fn measure(&self, mono: &[i64]) -> i64 {
        mono.iter()
            .zip(&self.vars)
            .filter(|(_, v)| v.degree > 0)
            .map(|(e, v)| e * v.degree)
            .sum()
    }

    /// Measure over positive-degree variables other than the Laurent one
    /// (pivot selection order for laurent_divide).
    fn aux_measure(&self, mono: &[i64]) -> i64 {
        mono.iter()
            .zip(&self.vars)
            .filter(|(_, v)| v.degree > 0 && v.kind != VarKind::Laurent)
            .map(|(e, v)| e * v.degree)
            .sum()
    }

    /// Degree of a monomial with every variable counted (v's negatively).
    pub fn graded_degree(&self, mono: &[i64]) -> i64 {
        mono.iter().zip(&self.vars).map(|(e, v)| e * v.degree).sum()
    }

    fn t_exp(&self, mono: &[i64]) -> i64 {
        self.laurent_idx().map(|i| mono[i]).unwrap_or(0)
    }

    fn in_window(&self, mono: &[i64]) -> bool {
        self.measure(mono) <= self.trunc && self.t_exp(mono) >= self.floor
    }
}

/// Sparse truncated multivariate series over `PRat`, Laurent in at most one
/// variable. Immutable value semantics; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSeries {
    ring: Arc<Ring>,
    terms: BTreeMap<Vec<i64>, PRat>,
}

impl GradedSeries {
    pub fn zero(ring: &Arc<Ring>) -> GradedSeries {
        GradedSeries { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<Ring>, c: PRat) -> GradedSeries {
        let mut s = GradedSeries::zero(ring);
        if !c.is_zero() {
            s.terms.insert(vec![0; ring.vars.len()], c);
        }
        s
    }

    pub fn int(ring: &Arc<Ring>, n: i64) -> GradedSeries {
        GradedSeries::constant(ring, PRat::from_int(ring.prime, n))
    }

    pub fn one(ring: &Arc<Ring>) -> GradedSeries {
        GradedSeries::int(ring, 1)
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<GradedSeries> {
        GradedSeries::monomial(ring, &[(name, 1)], PRat::one(ring.prime))
    }

    pub fn monomial(ring: &Arc<Ring>, powers: &[(&str, i64)], coeff: PRat) -> Result<GradedSeries> {
        let mut mono = vec![0i64; ring.vars.len()];
        for (name, e) in powers {
            let i = ring.idx(name)?;
            mono[i] += e;
        }
        for (i, &e) in mono.iter().enumerate() {
            if e < 0 && ring.vars[i].kind == VarKind::Ordinary {
                return Err(AlgebraError::Domain(format!(
                    "negative exponent on ordinary variable {}",
                    ring.vars[i].name
                )));
            }
        }
        let mut s = GradedSeries::zero(ring);
        if !coeff.is_zero() && ring.in_window(&mono) {
            s.terms.insert(mono, coeff);
        }
        Ok(s)
    }

    pub fn from_terms(
        ring: &Arc<Ring>,
        terms: impl IntoIterator<Item = (Vec<i64>, PRat)>,
    ) -> Result<GradedSeries> {
        let mut s = GradedSeries::zero(ring);
        for (mono, c) in terms {
            if mono.len() != ring.vars.len() {
                return Err(AlgebraError::Structural("exponent vector length mismatch".into()));
            }
            s.add_term(mono, c);
        }
        Ok(s)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn prime(&self) -> u32 {
        self.ring.prime
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &PRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &[i64]) -> PRat {
        self.terms.get(mono).cloned().unwrap_or_else(|| PRat::zero(self.ring.prime))
    }

    pub fn coeff_named(&self, powers: &[(&str, i64)]) -> Result<PRat> {
        let mut mono = vec![0i64; self.ring.vars.len()];
        for (name, e) in powers {
            mono[self.ring.idx(name)?] += e;
        }
        Ok(self.coeff(&mono))
    }

    fn add_term(&mut self, mono: Vec<i64>, c: PRat) {
        if c.is_zero() || !self.ring.in_window(&mono) {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn same_ring(&self, other: &GradedSeries) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(AlgebraError::Structural(
                "series live in different rings (prime, variables, or window differ)".into(),
            ))
        }
    }

    pub fn add(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedSeries {
        let mut out = GradedSeries::zero(&self.ring);
        for (mono, c) in &self.terms {
            out.terms.insert(mono.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &PRat) -> GradedSeries {
        if c.is_zero() {
            return GradedSeries::zero(&self.ring);
        }
        let mut out = GradedSeries::zero(&self.ring);
        for (mono, a) in &self.terms {
            out.terms.insert(mono.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.same_ring(other)?;
        let mut out = GradedSeries::zero(&self.ring);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        let mut rhs: Vec<(&Vec<i64>, &PRat, i64, i64)> = other
            .terms
            .iter()
            .map(|(m, c)| (m, c, self.ring.measure(m), self.ring.t_exp(m)))
            .collect();
        rhs.sort_by_key(|(_, _, meas, _)| *meas);
        let laurent = self.ring.laurent_idx().is_some();
        for (ma, ca) in &self.terms {
            let meas_a = self.ring.measure(ma);
            let t_a = self.ring.t_exp(ma);
            for &(mb, cb, meas_b, t_b) in &rhs {
                if meas_a + meas_b > self.ring.trunc {
                    break;
                }
                if laurent && t_a + t_b < self.ring.floor {
                    continue;
                }
                let mono: Vec<i64> = ma.iter().zip(mb.iter()).map(|(x, y)| x + y).collect();
                out.add_term(mono, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<GradedSeries> {
        let mut acc = GradedSeries::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiply by a single monomial (exponent shifts), e.g. division by t.
    pub fn mul_monomial(&self, powers: &[(&str, i64)], coeff: &PRat) -> Result<GradedSeries> {
        let mut shift = vec![0i64; self.ring.vars.len()];
        for (name, e) in powers {
            shift[self.ring.idx(name)?] += e;
        }
        let mut out = GradedSeries::zero(&self.ring);
        for (mono, c) in &self.terms {
            let m: Vec<i64> = mono.iter().zip(&shift).map(|(a, b)| a + b).collect();
            for (i, &e) in m.iter().enumerate() {
                if e < 0 && self.ring.vars[i].kind == VarKind::Ordinary {
                    return Err(AlgebraError::Domain(format!(
                        "monomial shift drives ordinary variable {} negative",
                        self.ring.vars[i].name
                    )));
                }
            }
            out.add_term(m, c * coeff);
        }
        Ok(out)
    }

    /// The coefficient of var^k, as a series with that variable's exponent zeroed.
    pub fn coeff_of_power(&self, name: &str, k: i64) -> Result<GradedSeries> {
        let i = self.ring.idx(name)?;
        let mut out = GradedSeries::zero(&self.ring);
        for (mono, c) in &self.terms {
            if mono[i] == k {
                let mut m = mono.clone();
                m[i] = 0;
                out.add_term(m, c.clone());
            }
        }
        Ok(out)
    }

    /// Formal composition: replace bound variables by series in a (possibly
    /// different) target ring; unbound variables must exist there by name and
    /// degree. Bindings into non-Laurent slots need zero constant term.
    pub fn substitute(&self, bindings: &[(&str, &GradedSeries)]) -> Result<GradedSeries> {
        let target: Arc<Ring> = match bindings.first() {
            Some((_, s)) => s.ring.clone(),
            None => self.ring.clone(),
        };
        for (_, s) in bindings {
            if s.ring != target {
                return Err(AlgebraError::Structural(
                    "substitution bindings live in different rings".into(),
                ));
            }
        }
        let mut bound: Vec<Option<&GradedSeries>> = vec![None; self.ring.vars.len()];
        for (name, s) in bindings {
            let i = self.ring.idx(name)?;
            if bound[i].is_some() {
                return Err(AlgebraError::Structural(format!("variable {name} bound twice")));
            }
            if self.ring.vars[i].kind != VarKind::Laurent {
                let const_mono = vec![0i64; target.vars.len()];
                if !s.coeff(&const_mono).is_zero() {
                    return Err(AlgebraError::Domain(format!(
                        "composition undefined: nonzero constant term substituted for {name}"
                    )));
                }
            }
            bound[i] = Some(s);
        }
        // Map unbound variables by name into the target ring; variables that
        // never occur with a nonzero exponent need no counterpart there.
        let mut carry: Vec<Option<usize>> = vec![None; self.ring.vars.len()];
        for (i, v) in self.ring.vars.iter().enumerate() {
            if bound[i].is_none() {
                if self.terms.keys().all(|m| m[i] == 0) {
                    continue;
                }
                let j = target.idx(&v.name).map_err(|_| {
                    AlgebraError::Structural(format!(
                        "unbound variable {} missing from target ring",
                        v.name
                    ))
                })?;
                if target.vars[j].degree != v.degree {
                    return Err(AlgebraError::Structural(format!(
                        "variable {} changes degree across substitution",
                        v.name
                    )));
                }
                carry[i] = Some(j);
            }
        }
        let mut pow_cache: BTreeMap<(usize, i64), GradedSeries> = BTreeMap::new();
        let mut inv_cache: BTreeMap<usize, GradedSeries> = BTreeMap::new();
        let mut acc = GradedSeries::zero(&target);
        for (mono, c) in &self.terms {
            let mut prod = GradedSeries::constant(&target, c.clone());
            for (i, &e) in mono.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Some(s) = bound[i] {
                    let factor = if e > 0 {
                        powered(&mut pow_cache, i, e, s)?
                    } else {
                        let inv = inv_cache.entry(i);
                        let inv = match inv {
                            std::collections::btree_map::Entry::Occupied(o) => o.into_mut(),
                            std::collections::btree_map::Entry::Vacant(v) => {
                                v.insert(laurent_divide(&GradedSeries::one(&target), s)?)
                            }
                        };
                        inv.pow((-e) as u32)?
                    };
                    prod = prod.mul(&factor)?;
                } else {
                    let j = carry[i].unwrap();
                    let name = target.vars[j].name.clone();
                    prod = prod.mul_monomial(&[(&name, e)], &PRat::one(target.prime))?;
                }
                if prod.is_zero() {
                    break;
                }
            }
            acc = acc.add(&prod)?;
        }
        Ok(acc)
    }

    /// Keep only terms whose positive-degree content is at most `bound`.
    pub fn truncate_measure(&self, bound: i64) -> GradedSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| self.ring.measure(m) <= bound)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        GradedSeries { ring: self.ring.clone(), terms }
    }

    /// Evaluate one variable at a scalar; the variable stays in the ring with
    /// exponent zero everywhere.
    pub fn evaluate_var(&self, name: &str, value: &PRat) -> Result<GradedSeries> {
        let i = self.ring.idx(name)?;
        let mut out = GradedSeries::zero(&self.ring);
        for (mono, c) in &self.terms {
            let e = mono[i];
            let mut m = mono.clone();
            m[i] = 0;
            if e == 0 {
                out.add_term(m, c.clone());
            } else if value.is_zero() {
                if e < 0 {
                    return Err(AlgebraError::Domain(format!(
                        "evaluating {name} at 0 with negative exponent"
                    )));
                }
            } else {
                out.add_term(m, c * &value.pow(e)?);
            }
        }
        Ok(out)
    }

    /// Reinterpret the series in another ring, matching variables by name and
    /// degree. Terms outside the new window are dropped.
    pub fn into_ring(&self, target: &Arc<Ring>) -> Result<GradedSeries> {
        let mut map: Vec<Option<usize>> = Vec::with_capacity(self.ring.vars.len());
        for v in &self.ring.vars {
            let j = target.idx(&v.name).ok();
            if let Some(j) = j {
                if target.vars[j].degree != v.degree {
                    return Err(AlgebraError::Structural(format!(
                        "variable {} changes degree across rings",
                        v.name
                    )));
                }
            }
            map.push(j);
        }
        let mut out = GradedSeries::zero(target);
        for (mono, c) in &self.terms {
            let mut m = vec![0i64; target.vars.len()];
            for (i, &e) in mono.iter().enumerate() {
                if e != 0 {
                    let j = map[i].ok_or_else(|| {
                        AlgebraError::Structural(format!(
                            "variable {} missing from target ring",
                            self.ring.vars[i].name
                        ))
                    })?;
                    m[j] = e;
                    if e < 0 && target.vars[j].kind == VarKind::Ordinary {
                        return Err(AlgebraError::Domain(format!(
                            "negative exponent on ordinary variable {}",
                            target.vars[j].name
                        )));
                    }
                }
            }
            out.add_term(m, c.clone());
        }
        Ok(out)
    }

    /// d/d(name), exponent-times-coefficient rule.
    pub fn derivative(&self, name: &str) -> Result<GradedSeries> {
        let i = self.ring.idx(name)?;
        let mut out = GradedSeries::zero(&self.ring);
        for (mono, c) in &self.terms {
            let e = mono[i];
            if e == 0 {
                continue;
            }
            let mut m = mono.clone();
            m[i] = e - 1;
            if m[i] < 0 && self.ring.vars[i].kind == VarKind::Ordinary {
                continue;
            }
            out.add_term(m, c * &PRat::from_int(self.ring.prime, e));
        }
        Ok(out)
    }

    /// Compositional inverse in `name`: g with f(g(t)) = t up to the window.
    /// Requires f = t + (higher in t), coefficient of t exactly 1.
    pub fn compositional_inverse(&self, name: &str) -> Result<GradedSeries> {
        let lin = self.coeff_of_power(name, 1)?;
        if lin != GradedSeries::one(&self.ring) {
            return Err(AlgebraError::Domain(format!(
                "compositional inverse needs coefficient 1 at {name}^1"
            )));
        }
        if !self.coeff_of_power(name, 0)?.is_zero() {
            return Err(AlgebraError::Domain(
                "compositional inverse needs zero constant term".into(),
            ));
        }
        let i = self.ring.idx(name)?;
        if self.terms.keys().any(|m| m[i] < 0) {
            return Err(AlgebraError::Domain(
                "compositional inverse of a Laurent series".into(),
            ));
        }
        let mut g = GradedSeries::var(&self.ring, name)?;
        let t = g.clone();
        for k in 2..=self.ring.trunc {
            let r = self.substitute(&[(name, &g)])?.sub(&t)?;
            let slice = r.coeff_of_power(name, k)?;
            if !slice.is_zero() {
                let correction = slice.neg().mul_monomial(&[(name, k)], &PRat::one(self.prime()))?;
                g = g.add(&correction)?;
            }
        }
        Ok(g)
    }

    /// Coefficients reduced mod m (least nonnegative, skipped when m = 0) and
    /// monomial multiples of the ideal generators dropped.
    pub fn reduce_mod_ideal(&self, m: u64, monomials: &[(&str, i64)]) -> Result<GradedSeries> {
        let gens: Vec<(usize, i64)> = monomials
            .iter()
            .map(|(name, e)| {
                if *e <= 0 {
                    return Err(AlgebraError::Domain(format!(
                        "ideal monomial {name}^{e} must have positive exponent"
                    )));
                }
                Ok((self.ring.idx(name)?, *e))
            })
            .collect::<Result<_>>()?;
        let modulus = BigInt::from(m);
        let mut out = GradedSeries::zero(&self.ring);
        'terms: for (mono, c) in &self.terms {
            for (i, e) in &gens {
                if mono[*i] >= *e {
                    continue 'terms;
                }
            }
            let c = if m == 0 {
                c.clone()
            } else {
                PRat::from_bigint(self.ring.prime, c.reduce_mod(&modulus)?)
            };
            out.add_term(mono.clone(), c);
        }
        Ok(out)
    }

    /// Coefficient of t^{-1} in f*omega, as a series with zero t-exponent.
    pub fn residue(&self, form: &GradedSeries) -> Result<GradedSeries> {
        let t = self
            .ring
            .laurent_idx()
            .ok_or_else(|| AlgebraError::Domain("residue needs a Laurent variable".into()))?;
        let name = self.ring.vars[t].name.clone();
        self.mul(form)?.coeff_of_power(&name, -1)
    }

    /// Largest graded degree d such that every term has degree d, when the
    /// series is homogeneous; None otherwise (zero counts as homogeneous of
    /// any degree and returns None).
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let d = self.ring.graded_degree(it.next()?);
        for m in it {
            if self.ring.graded_degree(m) != d {
                return None;
            }
        }
        Some(d)
    }
}

fn powered(
    cache: &mut BTreeMap<(usize, i64), GradedSeries>,
    var: usize,
    e: i64,
    base: &GradedSeries,
) -> Result<GradedSeries> {
    if e == 1 {
        return Ok(base.clone());
    }
    if let Some(s) = cache.get(&(var, e)) {
        return Ok(s.clone());
    }
    let prev = powered(cache, var, e - 1, base)?;
    let s = prev.mul(base)?;
    cache.insert((var, e), s.clone());
    Ok(s)
}

/// Laurent division num/den.
///
/// The pivot is the term of den minimal in (measure away from t, t-exponent,
/// exponent vector); it must have a Z_(p)-unit coefficient and involve only
/// the Laurent and invertible variables. Every other term of den then either
/// raises the truncation measure or raises the t-exponent, so the geometric
/// expansion num * pivot^{-1} * sum((1 - den/pivot)^j) stabilizes inside the
/// window.
pub fn laurent_divide(num: &GradedSeries, den: &GradedSeries) -> Result<GradedSeries> {
    num.same_ring(den)?;
    let ring = num.ring().clone();
    if den.is_zero() {
        return Err(AlgebraError::NonUnitDivision("division by zero series".into()));
    }
    let pivot = den
        .terms()
        .min_by_key(|(m, _)| (ring.aux_measure(m), ring.t_exp(m), (*m).clone()))
        .map(|(m, c)| (m.clone(), c.clone()))
        .unwrap();
    let (pmono, pcoeff) = pivot;
    if !pcoeff.is_p_unit() {
        return Err(AlgebraError::NonUnitDivision(format!(
            "lowest coefficient {pcoeff} of denominator is not a unit of Z_({})",
            ring.prime()
        )));
    }
    for (i, &e) in pmono.iter().enumerate() {
        if e != 0 && ring.vars()[i].kind == VarKind::Ordinary {
            return Err(AlgebraError::NonUnitDivision(format!(
                "lowest term of denominator involves non-invertible variable {}",
                ring.vars()[i].name
            )));
        }
    }
    let inv_mono: Vec<i64> = pmono.iter().map(|e| -e).collect();
    let inv_coeff = pcoeff.inverse()?;
    let inv_pivot = GradedSeries::from_terms(&ring, [(inv_mono, inv_coeff)])?;
    let ratio = den.mul(&inv_pivot)?;
    let minus_r = GradedSeries::one(&ring).sub(&ratio)?;
    let mut acc = num.mul(&inv_pivot)?;
    let mut cur = acc.clone();
    let span = (ring.trunc() - ring.floor()).max(1) as usize;
    let cap = span * span + 16;
    for _ in 0..cap {
        cur = cur.mul(&minus_r)?;
        if cur.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&cur)?;
    }
    if cur.is_zero() {
        Ok(acc)
    } else {
        Err(AlgebraError::NonUnitDivision(
            "division does not stabilize inside the truncation window".into(),
        ))
    }
}

impl fmt::Display for GradedSeries {
    /// Canonical rendering: monomials sorted by total degree in the
    /// positive-degree variables, ties broken by exponent vectors in ring
    /// order (descending), coefficients as reduced fractions: "1/2*t^2".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut entries: Vec<(&Vec<i64>, &PRat)> = self.terms.iter().collect();
        entries.sort_by(|(ma, _), (mb, _)| {
            self.ring
                .measure(ma)
                .cmp(&self.ring.measure(mb))
                .then_with(|| mb.cmp(ma))
        });
        for (k, (mono, c)) in entries.into_iter().enumerate() {
            let neg = c < &PRat::zero(self.ring.prime);
            let mag = if neg { -c } else { (*c).clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            for (i, &e) in mono.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &self.ring.vars[i].name;
                if e == 1 {
                    parts.push(name.clone());
                } else {
                    parts.push(format!("{name}^{e}"));
                }
            }
            if parts.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", parts.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, parts.join("*"))?;
            }
        }
        Ok(())
    }
}
