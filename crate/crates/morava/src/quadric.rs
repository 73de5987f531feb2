use num_bigint::BigInt;

use crate::error::{AlgebraError, Result};
use crate::scalar::PRat;
use crate::snf::{smith_decompose, AbelianGroupShape};

fn two_pow(e: u32) -> Result<i64> {
    if e >= 62 {
        return Err(AlgebraError::Domain(format!("2^{e} out of range")));
    }
    Ok(1i64 << e)
}

fn nu2(x: i64) -> u32 {
    debug_assert!(x != 0);
    x.unsigned_abs().trailing_zeros()
}

/// Arithmetic type of a smooth quadric of dimension `dim` relative to the
/// height-n Morava theory: d = floor(dim/2) and the division of d - 1 by
/// 2^n - 1. The engine below applies when the offset vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadricClass {
    pub height: u32,
    pub dim: i64,
    pub half_dim: i64,
    pub offset: i64,
    pub steps: i64,
}

pub fn classify(height: u32, dim: i64) -> Result<QuadricClass> {
    if height < 1 {
        return Err(AlgebraError::Domain("height must be at least 1".into()));
    }
    let stable = two_pow(height + 2)? - 3;
    if dim < stable {
        return Err(AlgebraError::Domain(format!(
            "quadric dimension {dim} below the stable range {stable} for height {height}"
        )));
    }
    let half_dim = dim / 2;
    let period = two_pow(height)? - 1;
    let offset = (half_dim - 1) % period;
    let steps = (half_dim - 1) / period;
    if offset == 0 && steps < 2 {
        return Err(AlgebraError::Inconsistent(format!(
            "stable range should force at least two ladder steps, got {steps}"
        )));
    }
    Ok(QuadricClass { height, dim, half_dim, offset, steps })
}

/// Codimensions 1..(p^n - 1)/(p - 1) of the gamma filtration carry no
/// torsion; this returns that range's upper end.
pub fn torsion_free_range(prime: u32, height: u32) -> Result<i64> {
    crate::scalar::require_prime(prime)?;
    if height < 1 {
        return Err(AlgebraError::Domain("height must be >= 1".into()));
    }
    let mut p_pow: i64 = 1;
    for _ in 0..height {
        p_pow = p_pow
            .checked_mul(prime as i64)
            .ok_or_else(|| AlgebraError::Domain("p^n out of range".into()))?;
    }
    Ok((p_pow - 1) / (prime as i64 - 1))
}

/// Upper bound for the torsion of the gamma-filtration graded piece in
/// codimension 2^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsionBound {
    Trivial,
    Cyclic { order: u64 },
}

impl TorsionBound {
    pub fn order(&self) -> u64 {
        match self {
            TorsionBound::Trivial => 1,
            TorsionBound::Cyclic { order } => *order,
        }
    }
}

fn intermediate_exponent(steps: i64) -> u32 {
    if steps % 2 == 0 {
        1
    } else {
        nu2(steps - 1) + 2
    }
}

pub fn torsion_bound(height: u32, dim: i64) -> Result<TorsionBound> {
    let class = classify(height, dim)?;
    if class.offset != 0 {
        return Ok(TorsionBound::Trivial);
    }
    if class.dim % 2 != 0 {
        return Ok(TorsionBound::Cyclic { order: 2 });
    }
    let exponent = intermediate_exponent(class.steps).min(two_pow(height)? as u32);
    let order = 2u64
        .checked_pow(exponent)
        .ok_or_else(|| AlgebraError::Domain("torsion order overflows".into()))?;
    Ok(TorsionBound::Cyclic { order })
}

/// One declared member of the gamma filtration: a lattice vector whose
/// leading coordinate is pinned and whose lower coordinates are free tail
/// choices, known to lie in the given filtration level.
#[derive(Debug, Clone)]
pub struct GammaElement {
    pub level: i64,
    pub coords: Vec<BigInt>,
    pub leading: usize,
}

/// A concrete lattice model of the filtration around codimension 2^n: the
/// basis classes have indices 1 + i(2^n - 1) for i = 0..steps, and each
/// declared element states a level membership witnessed by the closed
/// formulas. Tail entries are deliberately arbitrary.
#[derive(Debug, Clone)]
pub struct GammaInstance {
    pub class: QuadricClass,
    pub basis_indices: Vec<i64>,
    pub elements: Vec<GammaElement>,
}

fn declared_element(
    rank: usize,
    leading: usize,
    level: i64,
    leading_coeff: &BigInt,
    tails: &mut dyn FnMut() -> BigInt,
) -> GammaElement {
    let mut coords = vec![BigInt::from(0); rank];
    for slot in coords.iter_mut().take(leading) {
        *slot = tails();
    }
    coords[leading] = leading_coeff.clone();
    GammaElement { level, coords, leading }
}

/// Build the declared-element model for a quadric whose offset vanishes.
/// Every free integer (tails, odd unit factors) is drawn from `tails`, so
/// independence of the final answer from those draws is testable.
pub fn build_instance(
    height: u32,
    dim: i64,
    tails: &mut dyn FnMut() -> BigInt,
) -> Result<GammaInstance> {
    let class = classify(height, dim)?;
    if class.offset != 0 {
        return Err(AlgebraError::Domain(format!(
            "engine not applicable: offset {} is nonzero",
            class.offset
        )));
    }
    let period = two_pow(height)? - 1;
    let rank = class.steps as usize + 1;
    let basis_indices: Vec<i64> = (0..rank as i64).map(|i| 1 + i * period).collect();
    let top = rank - 1;

    let codim_level = two_pow(height)?;
    let deep_level = two_pow(height + 1)? - 1;
    let two = BigInt::from(2);

    let mut bases: Vec<(i64, BigInt)> = Vec::new();
    bases.push((codim_level, &two * tails() + 1));
    let t_exp = intermediate_exponent(class.steps);
    bases.push((deep_level, two.pow(t_exp) * (&two * tails() + 1)));
    bases.push((deep_level, two.pow(two_pow(height)? as u32)));
    if class.dim % 2 != 0 {
        bases.push((class.half_dim, two.clone()));
    }

    let mut elements = Vec::new();
    for (level, coeff) in &bases {
        for shift in 0..=top {
            elements.push(declared_element(
                rank,
                top - shift,
                level + shift as i64 * period,
                coeff,
                &mut *tails,
            ));
        }
    }
    Ok(GammaInstance { class, basis_indices, elements })
}

fn lattice_rows(instance: &GammaInstance, min_level: i64) -> Vec<Vec<PRat>> {
    instance
        .elements
        .iter()
        .filter(|e| e.level >= min_level)
        .map(|e| {
            e.coords
                .iter()
                .map(|c| PRat::from_bigint(2, c.clone()))
                .collect()
        })
        .collect()
}

/// The torsion of the graded piece at codimension 2^n: the quotient of the
/// level-2^n sublattice by the level-(2^n + 1) sublattice. The former must
/// fill the whole lattice; the answer is the torsion of the latter's
/// cokernel.
pub fn compute_gr_torsion(instance: &GammaInstance) -> Result<AbelianGroupShape> {
    let rank = instance.basis_indices.len();
    let codim_level = two_pow(instance.class.height)?;

    let numerator = lattice_rows(instance, codim_level);
    let numerator_snf = smith_decompose(2, rank, &numerator)?;
    if !numerator_snf.spans_lattice() {
        return Err(AlgebraError::Inconsistent(
            "declared elements do not span the lattice at the codimension level".into(),
        ));
    }

    let denominator = lattice_rows(instance, codim_level + 1);
    let denominator_snf = smith_decompose(2, rank, &denominator)?;
    let quotient = denominator_snf.cokernel();
    Ok(AbelianGroupShape { free_rank: 0, torsion: quotient.torsion })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counter_tails() -> impl FnMut() -> BigInt {
        let mut k = 0i64;
        move || {
            k += 1;
            BigInt::from(3 - k % 7)
        }
    }

    #[test]
    fn classification_examples() {
        let c = classify(2, 14).unwrap();
        assert_eq!((c.half_dim, c.offset, c.steps), (7, 0, 2));
        let c = classify(2, 16).unwrap();
        assert_eq!((c.half_dim, c.offset), (8, 1));
        let c = classify(2, 21).unwrap();
        assert_eq!((c.half_dim, c.offset, c.steps), (10, 0, 3));
        let c = classify(3, 30).unwrap();
        assert_eq!((c.half_dim, c.offset, c.steps), (15, 0, 2));
        assert!(classify(2, 12).is_err());
        assert!(classify(0, 40).is_err());
    }

    #[test]
    fn closed_form_bounds() {
        assert_eq!(torsion_bound(2, 14).unwrap(), TorsionBound::Cyclic { order: 2 });
        assert_eq!(torsion_bound(2, 16).unwrap(), TorsionBound::Trivial);
        assert_eq!(torsion_bound(2, 20).unwrap(), TorsionBound::Cyclic { order: 8 });
        assert_eq!(torsion_bound(2, 21).unwrap(), TorsionBound::Cyclic { order: 2 });
        assert_eq!(torsion_bound(3, 30).unwrap(), TorsionBound::Cyclic { order: 2 });
        assert_eq!(torsion_bound(2, 32).unwrap(), TorsionBound::Cyclic { order: 16 });
        assert_eq!(torsion_bound(2, 56).unwrap(), TorsionBound::Cyclic { order: 16 });
        assert_eq!(torsion_bound(2, 15).unwrap(), TorsionBound::Cyclic { order: 2 });
    }

    #[test]
    fn torsion_free_ranges() {
        assert_eq!(torsion_free_range(2, 2).unwrap(), 3);
        assert_eq!(torsion_free_range(2, 3).unwrap(), 7);
        assert_eq!(torsion_free_range(3, 2).unwrap(), 4);
        assert_eq!(torsion_free_range(5, 2).unwrap(), 6);
        assert_eq!(torsion_free_range(3, 3).unwrap(), 13);
    }

    #[test]
    fn engine_matches_the_closed_form() {
        for (height, dim) in [(2, 14), (2, 20), (2, 21), (3, 30), (2, 56)] {
            let mut tails = counter_tails();
            let instance = build_instance(height, dim, &mut tails).unwrap();
            let shape = compute_gr_torsion(&instance).unwrap();
            assert_eq!(
                shape.torsion_order().unwrap(),
                torsion_bound(height, dim).unwrap().order(),
                "height {height} dim {dim}"
            );
        }
    }

    #[test]
    fn engine_rejects_nonzero_offset() {
        let mut tails = counter_tails();
        let err = build_instance(2, 16, &mut tails).unwrap_err();
        assert!(err.to_string().contains("engine not applicable"));
    }

    #[test]
    fn numerator_must_fill_the_lattice() {
        let mut tails = counter_tails();
        let mut instance = build_instance(2, 14, &mut tails).unwrap();
        let codim_level = 4;
        instance.elements.retain(|e| e.level > codim_level);
        assert!(compute_gr_torsion(&instance).is_err());
    }

    #[test]
    fn instance_shape() {
        let mut tails = counter_tails();
        let instance = build_instance(2, 21, &mut tails).unwrap();
        assert_eq!(instance.basis_indices, vec![1, 4, 7, 10]);
        assert_eq!(instance.elements.len(), 16);
        for e in &instance.elements {
            for c in e.coords.iter().skip(e.leading + 1) {
                assert_eq!(c, &BigInt::from(0));
            }
        }
    }
}
