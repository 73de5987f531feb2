use std::collections::BTreeMap;
use std::fmt;

use crate::error::{AlgebraError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Split,
    NotSplit,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Split => write!(f, "split"),
            Verdict::NotSplit => write!(f, "not-split"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// A verdict together with the names of the rules that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuledVerdict {
    pub verdict: Verdict,
    pub citations: Vec<String>,
}

fn ruled(verdict: Verdict, citations: &[&str]) -> RuledVerdict {
    RuledVerdict { verdict, citations: citations.iter().map(|s| s.to_string()).collect() }
}

/// Write an even dimension as the alternating sum 2^(r1) - 2^(r2) + ... with
/// r1 > r2 > ... > r_(s-1) > r_s + 1 >= 2, choosing at each step the smallest
/// power of two at least the remaining dimension.
pub fn excellent_decomposition(dim: i64) -> Result<Vec<u32>> {
    if dim < 2 || dim % 2 != 0 {
        return Err(AlgebraError::Domain(format!(
            "excellent decomposition needs an even dimension >= 2, got {dim}"
        )));
    }
    let mut exponents = Vec::new();
    let mut rest = dim;
    while rest > 0 {
        let mut r = 0u32;
        while (1i64 << r) < rest {
            r += 1;
        }
        exponents.push(r);
        rest = (1i64 << r) - rest;
    }
    let s = exponents.len();
    for w in exponents.windows(2) {
        if w[0] <= w[1] {
            return Err(AlgebraError::Inconsistent(format!(
                "decomposition exponents not strictly decreasing: {exponents:?}"
            )));
        }
    }
    if s >= 2 && exponents[s - 2] <= exponents[s - 1] + 1 {
        return Err(AlgebraError::Inconsistent(format!(
            "final exponent gap too small: {exponents:?}"
        )));
    }
    if exponents[s - 1] < 1 {
        return Err(AlgebraError::Inconsistent(format!(
            "final exponent must be at least 1: {exponents:?}"
        )));
    }
    let mut rebuilt = 0i64;
    let mut sign = 1i64;
    for r in &exponents {
        rebuilt += sign * (1i64 << r);
        sign = -sign;
    }
    if rebuilt != dim {
        return Err(AlgebraError::Inconsistent(format!(
            "decomposition {exponents:?} rebuilds {rebuilt}, not {dim}"
        )));
    }
    Ok(exponents)
}

/// Whether an anisotropic excellent form of the given even dimension lies in
/// the m-th power of the fundamental ideal: true exactly when 2^m divides the
/// dimension. Checked against the decomposition route (final exponent >= m).
pub fn excellent_in_im(dim: i64, m: u32) -> Result<bool> {
    let exponents = excellent_decomposition(dim)?;
    if m >= 62 {
        return Ok(false);
    }
    let by_divisibility = dim % (1i64 << m) == 0;
    let by_decomposition = *exponents.last().unwrap() >= m;
    if by_divisibility != by_decomposition {
        return Err(AlgebraError::Inconsistent(format!(
            "divisibility and decomposition disagree for dim {dim}, m {m}"
        )));
    }
    Ok(by_divisibility)
}

/// What is known about a quadratic form when asking whether the Morava
/// motive of its projective quadric splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadFormDescriptor {
    pub dim: i64,
    /// The form (odd dimension: its even complement) lies in I^m.
    pub declared_im: Option<u32>,
    /// The declared power is known to be the largest one.
    pub membership_is_maximal: bool,
    /// Odd-dimensional form written as q + <c> with q carrying the membership.
    pub odd_part: bool,
    pub excellent: bool,
}

const IM_RULE: &str = "im-membership-splits-k-m-minus-2";
const EXCELLENT_RULE: &str = "excellent-form-maximal-membership";
const ODD_RULE: &str = "odd-form-scalar-complement";

fn split_iff_exact(n: u32, m: u32, citations: &[&str]) -> RuledVerdict {
    if n + 2 <= m {
        ruled(Verdict::Split, citations)
    } else {
        ruled(Verdict::NotSplit, citations)
    }
}

/// Decide whether the K(n)-motive of the projective quadric of the described
/// form splits.
pub fn quadric_kn_split(desc: &QuadFormDescriptor, n: u32) -> Result<RuledVerdict> {
    if desc.dim < 1 {
        return Err(AlgebraError::Domain("form dimension must be positive".into()));
    }
    let even = desc.dim % 2 == 0;
    if desc.odd_part && even {
        return Err(AlgebraError::Domain(
            "scalar-complement flag applies to odd dimensions only".into(),
        ));
    }
    if !even && !desc.odd_part && (desc.excellent || desc.declared_im.is_some()) {
        return Err(AlgebraError::Domain(
            "odd dimension carries even-form data without the scalar-complement flag".into(),
        ));
    }
    if desc.excellent && desc.declared_im.is_some() {
        return Err(AlgebraError::Domain(
            "give either the excellent flag or a declared membership, not both".into(),
        ));
    }

    if desc.excellent {
        let mut max_m = 0u32;
        while excellent_in_im(desc.dim, max_m + 1)? {
            max_m += 1;
        }
        return Ok(split_iff_exact(n, max_m, &[EXCELLENT_RULE, IM_RULE]));
    }

    let Some(m) = desc.declared_im else {
        return Ok(ruled(Verdict::Unknown, &[]));
    };

    if desc.odd_part {
        if m >= 1 && desc.dim == 1 {
            return Err(AlgebraError::Domain(
                "dimension 1 leaves no even complement".into(),
            ));
        }
        if n + 2 <= m {
            return Ok(ruled(Verdict::Split, &[ODD_RULE, IM_RULE]));
        }
        return Ok(ruled(Verdict::Unknown, &[]));
    }

    if m < 62 && desc.dim < (1i64 << m) {
        return Err(AlgebraError::Domain(format!(
            "an anisotropic form of I^{m} has dimension at least 2^{m}, got {}",
            desc.dim
        )));
    }
    if desc.membership_is_maximal {
        return Ok(split_iff_exact(n, m, &[IM_RULE]));
    }
    if n + 2 <= m {
        return Ok(ruled(Verdict::Split, &[IM_RULE]));
    }
    Ok(ruled(Verdict::Unknown, &[]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynkinType {
    A,
    B,
    C,
    D,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DynkinType::A => "A",
            DynkinType::B => "B",
            DynkinType::C => "C",
            DynkinType::D => "D",
            DynkinType::E6 => "E6",
            DynkinType::E7 => "E7",
            DynkinType::E8 => "E8",
            DynkinType::F4 => "F4",
            DynkinType::G2 => "G2",
        };
        write!(f, "{s}")
    }
}

/// What is known about a semisimple group when asking whether the Morava
/// motive of its variety of Borel subgroups splits at p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub dynkin_type: DynkinType,
    pub prime: u32,
    pub inner: bool,
    pub tits_algebras_p_split: bool,
    pub rost_p_trivial: bool,
    /// Only meaningful for E8 at p = 2.
    pub e8_u_invariant_zero: Option<bool>,
}

const K0_RULE: &str = "k0-splits-iff-inner";
const K1_RULE: &str = "k1-splits-iff-tits-algebras-split";
const K2_RULE: &str = "k2-splits-iff-rost-invariant-trivial";
const E8_RULE: &str = "e8-high-heights-split-iff-u-invariant-zero";
const MONOTONE_RULE: &str = "kn-split-descends";

/// Decide whether the K(n)-motive of the described group's full flag variety
/// splits, from the declared invariants plus height monotonicity.
pub fn group_kn_split(desc: &GroupDescriptor, n: u32) -> Result<RuledVerdict> {
    crate::scalar::require_prime(desc.prime)?;
    if desc.e8_u_invariant_zero.is_some()
        && !(desc.dynkin_type == DynkinType::E8 && desc.prime == 2)
    {
        return Err(AlgebraError::Domain(
            "the u-invariant flag applies to E8 at p = 2 only".into(),
        ));
    }
    if desc.rost_p_trivial && !(desc.inner && desc.tits_algebras_p_split) {
        return Err(AlgebraError::Domain(
            "a trivial Rost invariant presumes an inner group with split Tits algebras".into(),
        ));
    }

    if n == 0 {
        let verdict = if desc.inner { Verdict::Split } else { Verdict::NotSplit };
        return Ok(ruled(verdict, &[K0_RULE]));
    }

    let mut table: BTreeMap<u32, (Verdict, &str)> = BTreeMap::new();
    let tits = if desc.tits_algebras_p_split { Verdict::Split } else { Verdict::NotSplit };
    table.insert(1, (tits, K1_RULE));
    if desc.inner && desc.tits_algebras_p_split {
        let rost = if desc.rost_p_trivial { Verdict::Split } else { Verdict::NotSplit };
        table.insert(2, (rost, K2_RULE));
    }
    if let Some(u_zero) = desc.e8_u_invariant_zero {
        let high = if u_zero { Verdict::Split } else { Verdict::NotSplit };
        table.insert(4, (high, E8_RULE));
    }

    let split_up_to = table
        .iter()
        .filter(|(_, (v, _))| *v == Verdict::Split)
        .map(|(k, _)| *k)
        .max();
    let not_split_from = table
        .iter()
        .filter(|(_, (v, _))| *v == Verdict::NotSplit)
        .map(|(k, _)| *k)
        .min();
    if let (Some(su), Some(nsf)) = (split_up_to, not_split_from) {
        if su >= nsf {
            return Err(AlgebraError::Inconsistent(format!(
                "declared invariants force split at height {su} and non-split at height {nsf}"
            )));
        }
    }

    if let Some((verdict, rule)) = table.get(&n) {
        return Ok(ruled(*verdict, &[rule]));
    }
    if let Some(su) = split_up_to {
        if n <= su {
            let (_, witness) = table[&su];
            return Ok(ruled(Verdict::Split, &[witness, MONOTONE_RULE]));
        }
    }
    if let Some(nsf) = not_split_from {
        if n >= nsf {
            let (_, witness) = table[&nsf];
            return Ok(ruled(Verdict::NotSplit, &[witness, MONOTONE_RULE]));
        }
    }
    Ok(ruled(Verdict::Unknown, &[]))
}

/// Close a set of height verdicts under monotonicity: split descends to all
/// lower heights, non-split ascends to all higher ones. The result covers
/// heights 1..=max declared key.
pub fn monotonic_closure(verdicts: &BTreeMap<u32, Verdict>) -> Result<BTreeMap<u32, Verdict>> {
    if verdicts.keys().any(|k| *k == 0) {
        return Err(AlgebraError::Domain("closure applies to heights n >= 1".into()));
    }
    let split_up_to = verdicts
        .iter()
        .filter(|(_, v)| **v == Verdict::Split)
        .map(|(k, _)| *k)
        .max();
    let not_split_from = verdicts
        .iter()
        .filter(|(_, v)| **v == Verdict::NotSplit)
        .map(|(k, _)| *k)
        .min();
    if let (Some(su), Some(nsf)) = (split_up_to, not_split_from) {
        if su >= nsf {
            return Err(AlgebraError::Inconsistent(format!(
                "split at height {su} contradicts non-split at height {nsf}"
            )));
        }
    }
    let Some(max_key) = verdicts.keys().max().copied() else {
        return Ok(BTreeMap::new());
    };
    let mut out = BTreeMap::new();
    for n in 1..=max_key {
        if split_up_to.is_some_and(|su| n <= su) {
            out.insert(n, Verdict::Split);
        } else if not_split_from.is_some_and(|nsf| n >= nsf) {
            out.insert(n, Verdict::NotSplit);
        } else if let Some(v) = verdicts.get(&n) {
            out.insert(n, *v);
        }
    }
    Ok(out)
}
