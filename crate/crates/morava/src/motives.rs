use crate::error::{AlgebraError, Result};
use crate::scalar::PRat;
use crate::series::{GradedSeries, Ring};
use crate::snf::{smith_decompose, AbelianGroupShape};

/// A finitely presented module over Z_(p)[v_1..v_k]: generators with degrees
/// and relation rows with polynomial entries.
#[derive(Debug, Clone)]
pub struct ModulePresentation {
    prime: u32,
    generator_degrees: Vec<i64>,
    relations: Vec<Vec<GradedSeries>>,
}

impl ModulePresentation {
    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn num_generators(&self) -> usize {
        self.generator_degrees.len()
    }

    pub fn generator_degrees(&self) -> &[i64] {
        &self.generator_degrees
    }

    pub fn relations(&self) -> &[Vec<GradedSeries>] {
        &self.relations
    }

    /// Evaluate every relation entry at v_n = 1 and v_i = 0 for i != n,
    /// leaving a scalar matrix over Z_(p).
    pub fn specialize_to_kn(&self, n: u32) -> Result<Vec<Vec<PRat>>> {
        if n < 1 {
            return Err(AlgebraError::Domain("specialization needs n >= 1".into()));
        }
        let mut out = Vec::with_capacity(self.relations.len());
        for row in &self.relations {
            let mut scalar_row = Vec::with_capacity(row.len());
            for entry in row {
                let mut s = entry.clone();
                for v in entry.ring().vars().to_vec() {
                    let value = if v.name == format!("v{n}") {
                        PRat::one(self.prime)
                    } else {
                        PRat::zero(self.prime)
                    };
                    s = s.evaluate_var(&v.name, &value)?;
                }
                if s.num_terms() > usize::from(!s.is_zero()) {
                    return Err(AlgebraError::Inconsistent(
                        "specialized relation entry is not a scalar".into(),
                    ));
                }
                let zero_mono = vec![0i64; s.ring().vars().len()];
                scalar_row.push(s.coeff(&zero_mono));
            }
            out.push(scalar_row);
        }
        Ok(out)
    }
}

fn checked_p_pow(prime: u32, e: u32) -> Result<i64> {
    let mut acc: i64 = 1;
    for _ in 0..e {
        acc = acc
            .checked_mul(prime as i64)
            .ok_or_else(|| AlgebraError::Domain(format!("p^{e} overflows for p = {prime}")))?;
    }
    Ok(acc)
}

/// The Koszul-style presentation attached to a weight-m symbol at p:
/// generators g_0..g_(m-2) of degree -(p^i - 1) and one relation
/// v_i g_j - v_j g_i for each pair i < j, with v_0 standing for the scalar p.
pub fn koszul_ideal(prime: u32, m: usize) -> Result<ModulePresentation> {
    crate::scalar::require_prime(prime)?;
    if m < 2 {
        return Err(AlgebraError::Domain("symbol weight m must be at least 2".into()));
    }
    let mut builder = Ring::new(prime, 0);
    for i in 1..=(m - 2) {
        builder = builder.var(&format!("v{i}"), -(checked_p_pow(prime, i as u32)? - 1));
    }
    let ring = builder.arc();

    let coeff = |i: usize| -> Result<GradedSeries> {
        if i == 0 {
            Ok(GradedSeries::int(&ring, prime as i64))
        } else {
            GradedSeries::var(&ring, &format!("v{i}"))
        }
    };

    let gens = m - 1;
    let mut generator_degrees = Vec::with_capacity(gens);
    for i in 0..gens {
        generator_degrees.push(-(checked_p_pow(prime, i as u32)? - 1));
    }

    let mut relations = Vec::new();
    for i in 0..gens {
        for j in (i + 1)..gens {
            let mut row = vec![GradedSeries::zero(&ring); gens];
            row[j] = coeff(i)?;
            row[i] = coeff(j)?.neg();
            relations.push(row);
        }
    }

    Ok(ModulePresentation { prime, generator_degrees, relations })
}

/// The Morava K(n) groups of the Rost motive of a weight-m symbol at p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RostKnGroups {
    /// n < m-1: a sum of Tate twists, one free summand per listed twist.
    SplitTate { twists: Vec<i64> },
    /// n = m-1: free part plus p-torsion.
    TorsionExtension { shape: AbelianGroupShape },
    /// n > m-1: no decomposition is available.
    Indecomposable,
}

/// Compute K(n) of the Rost motive for a weight-m symbol at p, checking the
/// presentation-based route against the closed form whenever both exist.
pub fn rost_kn_groups(prime: u32, m: usize, n: u32) -> Result<RostKnGroups> {
    if n < 1 {
        return Err(AlgebraError::Domain("Morava height n must be at least 1".into()));
    }
    let presentation = koszul_ideal(prime, m)?;
    let matrix = presentation.specialize_to_kn(n)?;
    let snf = smith_decompose(prime, presentation.num_generators(), &matrix)?;
    let copy = snf.cokernel();

    let p = prime as usize;
    if (n as usize) < m - 1 {
        if copy != AbelianGroupShape::free(1) {
            return Err(AlgebraError::Inconsistent(format!(
                "expected one free summand per copy below the critical height, found {copy}"
            )));
        }
        let b = (checked_p_pow(prime, m as u32 - 1)? - 1) / (prime as i64 - 1);
        let twists = (0..p as i64)
            .map(|i| {
                b.checked_mul(i)
                    .ok_or_else(|| AlgebraError::Domain("Tate twist overflows".into()))
            })
            .collect::<Result<Vec<i64>>>()?;
        return Ok(RostKnGroups::SplitTate { twists });
    }

    if n as usize == m - 1 {
        let closed = AbelianGroupShape {
            free_rank: p - 1,
            torsion: vec![prime as u64; (m - 2) * (p - 1)],
        };
        let mut assembled = AbelianGroupShape::free(0);
        for _ in 0..(p - 1) {
            assembled.free_rank += copy.free_rank;
            assembled.torsion.extend(copy.torsion.iter().copied());
        }
        assembled.torsion.sort_unstable();
        if assembled != closed {
            return Err(AlgebraError::Inconsistent(format!(
                "presentation route gives {assembled}, closed form gives {closed}"
            )));
        }
        return Ok(RostKnGroups::TorsionExtension { shape: closed });
    }

    Ok(RostKnGroups::Indecomposable)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_presentation_shape() {
        let pres = koszul_ideal(2, 3).unwrap();
        assert_eq!(pres.num_generators(), 2);
        assert_eq!(pres.generator_degrees(), &[0, -1]);
        assert_eq!(pres.relations().len(), 1);
        assert_eq!(pres.relations()[0][0].to_string(), "-v1");
        assert_eq!(pres.relations()[0][1].to_string(), "2");

        let pres = koszul_ideal(3, 4).unwrap();
        assert_eq!(pres.num_generators(), 3);
        assert_eq!(pres.generator_degrees(), &[0, -2, -8]);
        assert_eq!(pres.relations().len(), 3);
    }

    #[test]
    fn specialization_matrices() {
        let pres = koszul_ideal(2, 3).unwrap();
        let at_height_two = pres.specialize_to_kn(2).unwrap();
        assert_eq!(at_height_two, vec![vec![PRat::zero(2), PRat::from_int(2, 2)]]);
        let at_height_one = pres.specialize_to_kn(1).unwrap();
        assert_eq!(at_height_one, vec![vec![PRat::from_int(2, -1), PRat::from_int(2, 2)]]);
    }

    #[test]
    fn rost_groups_below_the_critical_height() {
        assert_eq!(
            rost_kn_groups(2, 4, 1).unwrap(),
            RostKnGroups::SplitTate { twists: vec![0, 7] }
        );
        assert_eq!(
            rost_kn_groups(2, 3, 1).unwrap(),
            RostKnGroups::SplitTate { twists: vec![0, 3] }
        );
        assert_eq!(
            rost_kn_groups(5, 3, 1).unwrap(),
            RostKnGroups::SplitTate { twists: vec![0, 6, 12, 18, 24] }
        );
    }

    #[test]
    fn rost_groups_at_the_critical_height() {
        let RostKnGroups::TorsionExtension { shape } = rost_kn_groups(2, 3, 2).unwrap() else {
            panic!("expected the extension case");
        };
        assert_eq!(shape.to_string(), "Z + Z/2");

        let RostKnGroups::TorsionExtension { shape } = rost_kn_groups(3, 3, 2).unwrap() else {
            panic!("expected the extension case");
        };
        assert_eq!(shape, AbelianGroupShape { free_rank: 2, torsion: vec![3, 3] });

        let RostKnGroups::TorsionExtension { shape } = rost_kn_groups(2, 5, 4).unwrap() else {
            panic!("expected the extension case");
        };
        assert_eq!(shape, AbelianGroupShape { free_rank: 1, torsion: vec![2, 2, 2] });
    }

    #[test]
    fn rost_groups_above_the_critical_height() {
        assert_eq!(rost_kn_groups(2, 3, 5).unwrap(), RostKnGroups::Indecomposable);
        assert_eq!(rost_kn_groups(3, 4, 7).unwrap(), RostKnGroups::Indecomposable);
    }

    #[test]
    fn degenerate_weight_two_symbol() {
        assert_eq!(
            rost_kn_groups(3, 2, 1).unwrap(),
            RostKnGroups::TorsionExtension { shape: AbelianGroupShape::free(2) }
        );
        assert!(koszul_ideal(2, 1).is_err());
    }
}
