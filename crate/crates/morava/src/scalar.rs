use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{AlgebraError, Result};

/// Reject a composite or unit modulus before any p-local computation.
pub fn require_prime(p: u32) -> Result<()> {
    if p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0) {
        return Ok(());
    }
    Err(AlgebraError::Domain(format!("{p} is not a prime")))
}

/// Exact rational tagged with a prime p.
///
/// The working coefficient ring is Z_(p) (denominators coprime to p), but
/// logarithms of formal group laws have p-power denominators, so the type
/// holds any rational and exposes the Z_(p) contract as checked properties:
/// `is_p_local`, `is_p_unit`, `p_valuation`. Stored reduced, denominator
/// positive, zero as 0/1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PRat {
    prime: u32,
    num: BigInt,
    den: BigInt,
}

impl PRat {
    pub fn new(prime: u32, num: BigInt, den: BigInt) -> Result<PRat> {
        if prime < 2 {
            return Err(AlgebraError::Domain(format!("prime must be >= 2, got {prime}")));
        }
        if den.is_zero() {
            return Err(AlgebraError::Domain("zero denominator".into()));
        }
        let mut r = PRat { prime, num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_int(prime: u32, n: i64) -> PRat {
        PRat { prime, num: BigInt::from(n), den: BigInt::one() }
    }

    pub fn from_bigint(prime: u32, n: BigInt) -> PRat {
        PRat { prime, num: n, den: BigInt::one() }
    }

    pub fn ratio(prime: u32, num: i64, den: i64) -> PRat {
        PRat::new(prime, BigInt::from(num), BigInt::from(den)).expect("nonzero denominator")
    }

    pub fn zero(prime: u32) -> PRat {
        PRat::from_int(prime, 0)
    }

    pub fn one(prime: u32) -> PRat {
        PRat::from_int(prime, 1)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.num = -std::mem::take(&mut self.num);
            self.den = -std::mem::take(&mut self.den);
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = &self.num / &g;
            self.den = &self.den / &g;
        }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// Denominator coprime to p, i.e. the value lies in Z_(p).
    pub fn is_p_local(&self) -> bool {
        let p = BigInt::from(self.prime);
        !(&self.den % &p).is_zero()
    }

    /// Unit of Z_(p): nonzero with both numerator and denominator coprime to p.
    pub fn is_p_unit(&self) -> bool {
        self.p_valuation() == Some(0)
    }

    /// p-adic valuation; None for zero. Negative when the denominator carries p.
    pub fn p_valuation(&self) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        let p = BigInt::from(self.prime);
        Some(val_of(&self.num, &p) - val_of(&self.den, &p))
    }

    fn check_prime(&self, other: &PRat) {
        assert_eq!(
            self.prime, other.prime,
            "scalar arithmetic across different primes ({} vs {})",
            self.prime, other.prime
        );
    }

    pub fn inverse(&self) -> Result<PRat> {
        if self.is_zero() {
            return Err(AlgebraError::NonUnitDivision("inverse of zero".into()));
        }
        PRat::new(self.prime, self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Result<PRat> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let e = u32::try_from(e)
            .map_err(|_| AlgebraError::Domain(format!("exponent {e} out of range")))?;
        PRat::new(self.prime, self.num.pow(e), self.den.pow(e))
    }

    /// Least nonnegative representative of the value mod m (m >= 2).
    /// Requires the denominator invertible mod m.
    pub fn reduce_mod(&self, m: &BigInt) -> Result<BigInt> {
        if m < &BigInt::from(2) {
            return Err(AlgebraError::Domain(format!("modulus {m} out of range")));
        }
        let inv = mod_inverse(&self.den, m).ok_or_else(|| {
            AlgebraError::NonUnitDivision(format!(
                "denominator {} not invertible mod {}",
                self.den, m
            ))
        })?;
        let r = (&self.num * inv) % m;
        Ok(if r.is_negative() { r + m } else { r })
    }

    /// Exact division by p^k (k >= 0); errors if the valuation is too small.
    pub fn div_exact_p_power(&self, k: u32) -> Result<PRat> {
        if !self.is_zero() && self.p_valuation().unwrap_or(0) < k as i64 {
            return Err(AlgebraError::NonUnitDivision(format!(
                "{self} is not divisible by {}^{k} in Z_({})",
                self.prime, self.prime
            )));
        }
        PRat::new(self.prime, self.num.clone(), self.den.clone() * BigInt::from(self.prime).pow(k))
    }
}

fn val_of(n: &BigInt, p: &BigInt) -> i64 {
    let mut v = 0i64;
    let mut n = n.clone();
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let e = BigInt::extended_gcd(&a, m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

impl Add for &PRat {
    type Output = PRat;
    fn add(self, rhs: &PRat) -> PRat {
        self.check_prime(rhs);
        let mut r = PRat {
            prime: self.prime,
            num: &self.num * &rhs.den + &rhs.num * &self.den,
            den: &self.den * &rhs.den,
        };
        r.normalize();
        r
    }
}

impl Sub for &PRat {
    type Output = PRat;
    fn sub(self, rhs: &PRat) -> PRat {
        self + &(-rhs)
    }
}

impl Mul for &PRat {
    type Output = PRat;
    fn mul(self, rhs: &PRat) -> PRat {
        self.check_prime(rhs);
        let mut r = PRat {
            prime: self.prime,
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        };
        r.normalize();
        r
    }
}

impl Div for &PRat {
    type Output = PRat;
    fn div(self, rhs: &PRat) -> PRat {
        self.check_prime(rhs);
        assert!(!rhs.is_zero(), "division by zero scalar");
        let mut r = PRat {
            prime: self.prime,
            num: &self.num * &rhs.den,
            den: &self.den * &rhs.num,
        };
        r.normalize();
        r
    }
}

impl Neg for &PRat {
    type Output = PRat;
    fn neg(self) -> PRat {
        PRat { prime: self.prime, num: -self.num.clone(), den: self.den.clone() }
    }
}

impl PartialOrd for PRat {
    fn partial_cmp(&self, other: &PRat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PRat {
    fn cmp(&self, other: &PRat) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for PRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> PRat {
        PRat::ratio(2, n, d)
    }

    #[test]
    fn reduces_on_construction() {
        assert_eq!(q(6, 4), q(3, 2));
        assert_eq!(q(-6, -4), q(3, 2));
        assert_eq!(q(6, -4), q(-3, 2));
        assert_eq!(q(0, 7), PRat::zero(2));
        assert_eq!(q(0, 7).denominator(), &BigInt::one());
    }

    #[test]
    fn arithmetic_matches_rational_oracle() {
        // (3x) + (x/3) has coefficient 3 + 1/3 = 10/3, which is 2-local.
        let s = &q(3, 1) + &q(1, 3);
        assert_eq!(s, q(10, 3));
        assert!(s.is_p_local());
        assert_eq!(&q(1, 2) * &q(2, 3), q(1, 3));
        assert_eq!(&q(1, 2) - &q(1, 2), PRat::zero(2));
        assert_eq!(&q(7, 2) / &q(7, 4), q(2, 1));
    }

    #[test]
    fn locality_and_valuation() {
        assert!(q(10, 3).is_p_local());
        assert!(!q(1, 2).is_p_local());
        assert_eq!(q(12, 1).p_valuation(), Some(2));
        assert_eq!(q(3, 4).p_valuation(), Some(-2));
        assert_eq!(PRat::zero(2).p_valuation(), None);
        assert!(q(3, 5).is_p_unit());
        assert!(!q(2, 1).is_p_unit());
        assert!(!q(0, 1).is_p_unit());
    }

    #[test]
    fn reduce_mod_small_cases() {
        let m = BigInt::from(4);
        assert_eq!(q(6, 1).reduce_mod(&m).unwrap(), BigInt::from(2));
        assert_eq!(q(-1, 1).reduce_mod(&m).unwrap(), BigInt::from(3));
        // 1/3 mod 4 = 3 since 3*3 = 9 = 1 mod 4.
        assert_eq!(q(1, 3).reduce_mod(&m).unwrap(), BigInt::from(3));
        assert!(q(1, 2).reduce_mod(&m).is_err());
    }

    #[test]
    fn powers_and_inverse() {
        assert_eq!(q(2, 3).pow(3).unwrap(), q(8, 27));
        assert_eq!(q(2, 3).pow(-2).unwrap(), q(9, 4));
        assert_eq!(q(2, 3).inverse().unwrap(), q(3, 2));
        assert!(PRat::zero(2).inverse().is_err());
    }

    #[test]
    #[should_panic(expected = "different primes")]
    fn mixed_primes_panic() {
        let _ = &PRat::from_int(2, 1) + &PRat::from_int(3, 1);
    }
}
