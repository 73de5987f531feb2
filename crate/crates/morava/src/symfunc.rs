use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::scalar::PRat;
use crate::series::{GradedSeries, Ring};

/// A weakly decreasing list of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<i64>,
}

impl Partition {
    pub fn new(parts: Vec<i64>) -> Result<Partition> {
        if parts.iter().any(|&p| p < 1) {
            return Err(AlgebraError::Domain("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(AlgebraError::Domain("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Partition {
        Partition { parts: vec![] }
    }

    pub fn weight(&self) -> i64 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    fn padded(&self, r: usize) -> Vec<i64> {
        let mut v = self.parts.clone();
        v.resize(r, 0);
        v
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Symmetric polynomial in a fixed number of variables, stored on the basis of
/// monomial symmetric functions (orbit sums), keyed by partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricPoly {
    prime: u32,
    nvars: usize,
    terms: BTreeMap<Vec<i64>, PRat>,
}

impl SymmetricPoly {
    pub fn zero(prime: u32, nvars: usize) -> SymmetricPoly {
        SymmetricPoly { prime, nvars, terms: BTreeMap::new() }
    }

    pub fn one(prime: u32, nvars: usize) -> SymmetricPoly {
        let mut s = SymmetricPoly::zero(prime, nvars);
        s.terms.insert(vec![], PRat::one(prime));
        s
    }

    /// The orbit sum m_J: the sum of all distinct monomials whose exponent
    /// vector sorts to J.
    pub fn orbit_sum(prime: u32, nvars: usize, j: &Partition) -> Result<SymmetricPoly> {
        if j.len() > nvars {
            return Err(AlgebraError::Domain(format!(
                "partition has {} parts but only {} variables are available",
                j.len(),
                nvars
            )));
        }
        let mut s = SymmetricPoly::zero(prime, nvars);
        s.terms.insert(j.parts.clone(), PRat::one(prime));
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, j: &Partition) -> PRat {
        self.terms.get(&j.parts).cloned().unwrap_or_else(|| PRat::zero(self.prime))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &PRat)> {
        self.terms.iter()
    }

    fn same_shape(&self, other: &SymmetricPoly) -> Result<()> {
        if self.prime != other.prime || self.nvars != other.nvars {
            return Err(AlgebraError::Structural(
                "symmetric polynomials live over different variable sets".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &SymmetricPoly) -> Result<SymmetricPoly> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            let entry = out
                .terms
                .entry(k.clone())
                .or_insert_with(|| PRat::zero(self.prime));
            *entry = &*entry + c;
            if entry.is_zero() {
                out.terms.remove(k);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SymmetricPoly) -> Result<SymmetricPoly> {
        self.add(&other.scale(&-&PRat::one(self.prime)))
    }

    pub fn scale(&self, c: &PRat) -> SymmetricPoly {
        if c.is_zero() {
            return SymmetricPoly::zero(self.prime, self.nvars);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        SymmetricPoly { prime: self.prime, nvars: self.nvars, terms }
    }

    /// Multiply by the i-th elementary symmetric polynomial. The coefficient
    /// of m_nu in sigma_i * m_mu is the number of i-element position sets S
    /// with sort(nu - 1_S) = mu; grouping positions by value gives the count
    /// as a product of binomials over value classes.
    pub fn mul_by_elem(&self, i: usize) -> Result<SymmetricPoly> {
        if i < 1 || i > self.nvars {
            return Err(AlgebraError::Domain(format!(
                "elementary symmetric index {i} out of range 1..={}",
                self.nvars
            )));
        }
        let mut out = SymmetricPoly::zero(self.prime, self.nvars);
        for (mu, c) in &self.terms {
            // Value classes of the padded exponent vector, descending values.
            let mut classes: Vec<(i64, i64)> = Vec::new();
            for &v in mu {
                match classes.last_mut() {
                    Some((val, cnt)) if *val == v => *cnt += 1,
                    _ => classes.push((v, 1)),
                }
            }
            let zeros = self.nvars as i64 - mu.len() as i64;
            if zeros > 0 {
                classes.push((0, zeros));
            }
            // Choose how many members of each class get bumped by one.
            let mut stack: Vec<(usize, i64, Vec<i64>)> = vec![(0, i as i64, vec![])];
            while let Some((ci, remaining, picks)) = stack.pop() {
                if ci == classes.len() {
                    if remaining != 0 {
                        continue;
                    }
                    let mut nu: Vec<i64> = Vec::with_capacity(self.nvars);
                    for (k, &(val, cnt)) in classes.iter().enumerate() {
                        for _ in 0..picks[k] {
                            nu.push(val + 1);
                        }
                        for _ in 0..(cnt - picks[k]) {
                            nu.push(val);
                        }
                    }
                    nu.sort_unstable_by(|a, b| b.cmp(a));
                    while nu.last() == Some(&0) {
                        nu.pop();
                    }
                    // Count subsets from the nu side: for each value w, the
                    // positions lowered from w to w-1 are k_w = (picks at the
                    // class of value w-1); multiply C(#w-positions in nu, k_w).
                    let mut nu_classes: BTreeMap<i64, i64> = BTreeMap::new();
                    for &v in &nu {
                        *nu_classes.entry(v).or_insert(0) += 1;
                    }
                    let mut count: i64 = 1;
                    for (k, &(val, _)) in classes.iter().enumerate() {
                        if picks[k] == 0 {
                            continue;
                        }
                        let avail = nu_classes.get(&(val + 1)).copied().unwrap_or(0);
                        count *= binom(avail, picks[k]);
                    }
                    if count != 0 {
                        let add = c * &PRat::from_int(self.prime, count);
                        let entry = out
                            .terms
                            .entry(nu)
                            .or_insert_with(|| PRat::zero(self.prime));
                        *entry = &*entry + &add;
                    }
                    continue;
                }
                let (_, cnt) = classes[ci];
                let upper = remaining.min(cnt);
                for take in 0..=upper {
                    let mut next = picks.clone();
                    next.push(take);
                    stack.push((ci + 1, remaining - take, next));
                }
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Lexicographically largest partition present.
    pub fn leading(&self) -> Option<(Partition, PRat)> {
        self.terms
            .iter()
            .next_back()
            .map(|(k, c)| (Partition { parts: k.clone() }, c.clone()))
    }

    /// Evaluate at concrete points by expanding each orbit sum over the
    /// distinct permutations of its exponent vector.
    pub fn evaluate(&self, points: &[PRat]) -> Result<PRat> {
        if points.len() != self.nvars {
            return Err(AlgebraError::Domain(format!(
                "expected {} evaluation points, got {}",
                self.nvars,
                points.len()
            )));
        }
        let mut total = PRat::zero(self.prime);
        for (mu, c) in &self.terms {
            let mut expo = mu.clone();
            expo.resize(self.nvars, 0);
            expo.sort_unstable();
            let mut orbit_val = PRat::zero(self.prime);
            loop {
                let mut term = PRat::one(self.prime);
                for (x, &e) in points.iter().zip(&expo) {
                    term = &term * &x.pow(e)?;
                }
                orbit_val = &orbit_val + &term;
                if !next_permutation(&mut expo) {
                    break;
                }
            }
            total = &total + &(c * &orbit_val);
        }
        Ok(total)
    }
}

fn next_permutation(v: &mut [i64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Ring Z_(p)[s1..sr] with deg s_i = i, truncated at total weighted degree T.
pub fn elementary_ring(prime: u32, nvars: usize, trunc: i64) -> Arc<Ring> {
    let mut r = Ring::new(prime, trunc);
    for i in 1..=nvars {
        r = r.var(&format!("s{i}"), i as i64);
    }
    r.arc()
}

/// The product sigma_1^(a_1) ... sigma_r^(a_r) expanded on the orbit-sum basis.
pub fn elementary_product(prime: u32, nvars: usize, exponents: &[i64]) -> Result<SymmetricPoly> {
    if exponents.len() > nvars {
        return Err(AlgebraError::Domain("more exponents than variables".into()));
    }
    let mut acc = SymmetricPoly::one(prime, nvars);
    for (idx, &a) in exponents.iter().enumerate() {
        if a < 0 {
            return Err(AlgebraError::Domain("negative elementary exponent".into()));
        }
        for _ in 0..a {
            acc = acc.mul_by_elem(idx + 1)?;
        }
    }
    Ok(acc)
}

/// Rewrite a symmetric polynomial on the elementary basis by leading-term
/// subtraction: repeatedly cancel the lex-largest orbit term lambda against
/// sigma_1^(l1-l2) sigma_2^(l2-l3) ... , whose lex-leading monomial is
/// x^lambda with coefficient 1.
pub fn in_elementary_basis(f: &SymmetricPoly) -> Result<GradedSeries> {
    let p = f.prime();
    let nvars = f.nvars();
    let weight = f
        .terms
        .keys()
        .map(|k| k.iter().sum::<i64>())
        .max()
        .unwrap_or(0);
    let ring = elementary_ring(p, nvars, weight);
    let mut q = GradedSeries::zero(&ring);
    let mut work = f.clone();
    let mut guard = 0usize;
    while let Some((lambda, c)) = work.leading() {
        guard += 1;
        if guard > 100_000 {
            return Err(AlgebraError::Inconsistent(
                "leading-term subtraction failed to terminate".into(),
            ));
        }
        let padded = lambda.padded(nvars);
        let mut expo = vec![0i64; nvars];
        for i in 0..nvars {
            let next = if i + 1 < nvars { padded[i + 1] } else { 0 };
            expo[i] = padded[i] - next;
        }
        let basis = elementary_product(p, nvars, &expo)?;
        work = work.sub(&basis.scale(&c))?;
        let named: Vec<(String, i64)> = expo
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| (format!("s{}", i + 1), e))
            .collect();
        let named_ref: Vec<(&str, i64)> = named.iter().map(|(n, e)| (n.as_str(), *e)).collect();
        q = q.add(&GradedSeries::monomial(&ring, &named_ref, c)?)?;
    }
    Ok(q)
}

/// (P_J, Q_J): the orbit sum containing x^J with the minimal number of
/// monomials, and its expression in elementary symmetric polynomials.
pub fn smallest_symmetric(
    prime: u32,
    j: &Partition,
    nvars: usize,
) -> Result<(SymmetricPoly, GradedSeries)> {
    crate::scalar::require_prime(prime)?;
    let p_j = SymmetricPoly::orbit_sum(prime, nvars, j)?;
    let q_j = in_elementary_basis(&p_j)?;
    Ok((p_j, q_j))
}

/// Power sum p_k on the elementary basis via the Newton recursion
/// p_k = s1 p_(k-1) - s2 p_(k-2) + ... + (-1)^(k-1) k s_k, with s_i = 0 for
/// i beyond the variable count. Independent of the subtraction algorithm.
pub fn power_sum_in_elementary(prime: u32, nvars: usize, k: i64) -> Result<GradedSeries> {
    if k < 1 {
        return Err(AlgebraError::Domain("power sum index must be >= 1".into()));
    }
    let ring = elementary_ring(prime, nvars, k);
    let mut sums: Vec<GradedSeries> = vec![GradedSeries::int(&ring, nvars as i64)];
    for m in 1..=k {
        let mut acc = GradedSeries::zero(&ring);
        for i in 1..m {
            if i as usize <= nvars {
                let name = format!("s{i}");
                let sign = if i % 2 == 1 { 1 } else { -1 };
                let prev = &sums[(m - i) as usize];
                acc = acc.add(
                    &prev.mul_monomial(&[(&name, 1)], &PRat::from_int(prime, sign))?,
                )?;
            }
        }
        if m as usize <= nvars {
            let name = format!("s{m}");
            let sign = if m % 2 == 1 { m } else { -m };
            acc = acc.add(&GradedSeries::monomial(
                &ring,
                &[(&name, 1)],
                PRat::from_int(prime, sign),
            )?)?;
        }
        sums.push(acc);
    }
    Ok(sums[k as usize].clone())
}

/// Elementary symmetric values sigma_1..sigma_r of concrete points, read off
/// the coefficients of prod (1 + x_i z).
pub fn elementary_values(prime: u32, points: &[PRat]) -> Vec<PRat> {
    let mut coeffs: Vec<PRat> = vec![PRat::one(prime)];
    for x in points {
        coeffs.push(PRat::zero(prime));
        for i in (1..coeffs.len()).rev() {
            let bump = &coeffs[i - 1] * x;
            coeffs[i] = &coeffs[i] + &bump;
        }
    }
    coeffs.remove(0);
    coeffs
}

/// Evaluate a polynomial in s1..sr at concrete sigma values.
pub fn eval_elementary(q: &GradedSeries, sigma: &[PRat]) -> Result<PRat> {
    let mut cur = q.clone();
    for (i, val) in sigma.iter().enumerate() {
        let name = format!("s{}", i + 1);
        if cur.ring().idx(&name).is_ok() {
            cur = cur.evaluate_var(&name, val)?;
        }
    }
    let mono = vec![0i64; cur.ring().vars().len()];
    let constant = cur.coeff(&mono);
    let leftovers = cur.num_terms() - usize::from(!constant.is_zero());
    if leftovers > 0 {
        return Err(AlgebraError::Domain("unevaluated elementary variables remain".into()));
    }
    Ok(constant)
}
