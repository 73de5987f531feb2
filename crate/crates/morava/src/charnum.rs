use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{AlgebraError, Result};
use crate::scalar::PRat;
use crate::symfunc::{eval_elementary, smallest_symmetric, Partition};

/// Chern data of a smooth degree-k hypersurface of dimension D in projective
/// space: the total Chern series of the virtual negative tangent bundle,
/// c(-T) = (1 + k h) * (1 + h)^-(D+2), truncated at h^D, plus the degree map
/// deg(h^D) = k.
#[derive(Debug, Clone)]
pub struct HypersurfaceChernData {
    pub dim: i64,
    pub degree: i64,
    /// c[i] is the coefficient of h^i, 0 <= i <= dim.
    pub classes: Vec<PRat>,
}

fn binom_big(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficient of h^j in (1 + h)^(-m): (-1)^j C(m + j - 1, j).
fn inverse_power_coeff(m: i64, j: i64) -> BigInt {
    let c = binom_big(m + j - 1, j);
    if j % 2 == 0 {
        c
    } else {
        -c
    }
}

pub fn hypersurface_chern_data(prime: u32, degree: i64, dim: i64) -> Result<HypersurfaceChernData> {
    crate::scalar::require_prime(prime)?;
    if dim < 1 || degree < 1 {
        return Err(AlgebraError::Domain(
            "hypersurface needs positive dimension and degree".into(),
        ));
    }
    let m = dim + 2;
    let mut classes = Vec::with_capacity(dim as usize + 1);
    for i in 0..=dim {
        let c = inverse_power_coeff(m, i) + BigInt::from(degree) * inverse_power_coeff(m, i - 1);
        classes.push(PRat::from_bigint(prime, c));
    }
    Ok(HypersurfaceChernData { dim, degree, classes })
}

/// deg S_D for the degree-k dimension-D hypersurface, in closed form:
/// k^(D+1) - (D+2) k.
pub fn power_sum_degree_closed(degree: i64, dim: i64) -> BigInt {
    BigInt::from(degree).pow(dim as u32 + 1) - BigInt::from(dim + 2) * BigInt::from(degree)
}

/// The same degree through the symmetric-function pipeline: express the
/// orbit sum m_(D) in elementary symmetric polynomials, substitute the
/// virtual Chern classes for the sigma_i, and apply the degree map.
pub fn power_sum_degree_pipeline(prime: u32, degree: i64, dim: i64) -> Result<BigInt> {
    let data = hypersurface_chern_data(prime, degree, dim)?;
    let j = Partition::new(vec![dim])?;
    let (_, q) = smallest_symmetric(prime, &j, dim as usize)?;
    let class = eval_elementary(&q, &data.classes[1..])?;
    let deg = &class * &PRat::from_int(prime, degree);
    if !deg.is_integer() {
        return Err(AlgebraError::Inconsistent(
            "characteristic number came out non-integral".into(),
        ));
    }
    Ok(deg.numerator().clone())
}

fn halve_by_p(prime: u32, deg: BigInt) -> Result<PRat> {
    PRat::from_bigint(prime, deg)
        .div_exact_p_power(1)
        .map_err(|_| AlgebraError::Domain("degree of S not divisible by p".into()))
}

/// Milnor number deg(S_D)/p from the closed form.
pub fn milnor_number(prime: u32, degree: i64, dim: i64) -> Result<PRat> {
    crate::scalar::require_prime(prime)?;
    if dim < 1 {
        return Err(AlgebraError::Domain("dimension must be >= 1".into()));
    }
    halve_by_p(prime, power_sum_degree_closed(degree, dim))
}

/// Milnor number recomputed through the symmetric-function pipeline; kept as
/// a separate route so the two derivations stay independently checkable.
pub fn milnor_number_via_pipeline(prime: u32, degree: i64, dim: i64) -> Result<PRat> {
    halve_by_p(prime, power_sum_degree_pipeline(prime, degree, dim)?)
}

/// Whether the degree-k hypersurface of dimension D witnesses height n at p:
/// D = p^n - 1 and the Milnor number is prime to p.
pub fn nu_check(degree: i64, dim: i64, prime: u32, n: u32) -> Result<bool> {
    crate::scalar::require_prime(prime)?;
    let mut target: i64 = 1;
    for _ in 0..n {
        target = target
            .checked_mul(prime as i64)
            .ok_or_else(|| AlgebraError::Domain("p^n overflows".into()))?;
    }
    if dim != target - 1 {
        return Ok(false);
    }
    let milnor = milnor_number(prime, degree, dim)?;
    Ok(!milnor.reduce_mod(&BigInt::from(prime))?.is_zero())
}

/// The Euler characteristic of a D-dimensional variety in the n-th Morava
/// theory, modulo p, up to the precision the dimension alone determines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EulerCharKn {
    /// (p^n - 1) does not divide D: the class vanishes mod p.
    Zero,
    /// D = p^n - 1: the class is v_n times a unit times the Milnor number;
    /// invertibility is decided by the supplied Milnor number when present.
    VnMultiple { invertible: Option<bool> },
    /// D is a larger multiple of p^n - 1: not determined by dimension alone.
    Unspecified,
}

pub fn euler_char_kn_mod_p(
    dim: i64,
    prime: u32,
    n: u32,
    milnor: Option<&PRat>,
) -> Result<EulerCharKn> {
    let mut pn: i64 = 1;
    for _ in 0..n {
        pn = pn
            .checked_mul(prime as i64)
            .ok_or_else(|| AlgebraError::Domain("p^n overflows".into()))?;
    }
    let period = pn - 1;
    if period < 1 {
        return Err(AlgebraError::Domain("need n >= 1".into()));
    }
    if dim % period != 0 {
        return Ok(EulerCharKn::Zero);
    }
    if dim == period {
        let invertible = match milnor {
            Some(s) => Some(!s.reduce_mod(&BigInt::from(prime))?.is_zero()),
            None => None,
        };
        return Ok(EulerCharKn::VnMultiple { invertible });
    }
    Ok(EulerCharKn::Unspecified)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chern_classes_of_small_hypersurfaces() {
        // Conic in P^2: c(-T) = (1 + 2h)(1 + h)^-3 = 1 - h + ...
        let data = hypersurface_chern_data(2, 2, 1).unwrap();
        assert_eq!(data.classes[0], PRat::from_int(2, 1));
        assert_eq!(data.classes[1], PRat::from_int(2, -1));
    }

    #[test]
    fn milnor_numbers_closed_form() {
        assert_eq!(milnor_number(2, 2, 1).unwrap(), PRat::from_int(2, -1));
        assert_eq!(milnor_number(2, 2, 3).unwrap(), PRat::from_int(2, 3));
        assert_eq!(milnor_number(2, 2, 7).unwrap(), PRat::from_int(2, 119));
    }

    #[test]
    fn milnor_number_routes_agree() {
        for degree in [2i64, 3] {
            for dim in 1..=8 {
                let closed = power_sum_degree_closed(degree, dim);
                let pipeline = power_sum_degree_pipeline(2, degree, dim).unwrap();
                assert_eq!(closed, pipeline, "k={degree}, D={dim}");
            }
        }
    }

    #[test]
    fn indivisible_degree_is_rejected() {
        // k=3, D=2: 27 - 12 = 15, odd.
        let err = milnor_number(2, 3, 2).unwrap_err();
        assert_eq!(
            err.to_string(),
            "domain error: degree of S not divisible by p"
        );
    }

    #[test]
    fn nu_checks() {
        assert!(nu_check(2, 3, 2, 2).unwrap());
        assert!(nu_check(2, 7, 2, 3).unwrap());
        assert!(!nu_check(2, 4, 2, 2).unwrap());
        for n in 1..=4u32 {
            let dim = (1i64 << n) - 1;
            assert!(nu_check(2, dim, 2, n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn euler_characteristic_cases() {
        assert_eq!(euler_char_kn_mod_p(4, 2, 2, None).unwrap(), EulerCharKn::Zero);
        let s = PRat::from_int(2, 3);
        assert_eq!(
            euler_char_kn_mod_p(3, 2, 2, Some(&s)).unwrap(),
            EulerCharKn::VnMultiple { invertible: Some(true) }
        );
        assert_eq!(
            euler_char_kn_mod_p(6, 2, 2, None).unwrap(),
            EulerCharKn::Unspecified
        );
    }
}
