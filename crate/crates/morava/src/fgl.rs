use std::fmt;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::scalar::PRat;
use crate::series::{GradedSeries, Ring};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FglLabel {
    Additive,
    Multiplicative,
    Bp(usize),
    Morava(u32),
    Custom,
}

impl fmt::Display for FglLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FglLabel::Additive => write!(f, "additive"),
            FglLabel::Multiplicative => write!(f, "multiplicative"),
            FglLabel::Bp(k) => write!(f, "bp({k})"),
            FglLabel::Morava(n) => write!(f, "morava({n})"),
            FglLabel::Custom => write!(f, "custom"),
        }
    }
}

/// Height of a formal group law mod p: the k with [p](t) = unit * t^(p^k) +
/// higher, or Infinite when [p] vanishes identically mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(n) => write!(f, "{n}"),
            Height::Infinite => write!(f, "infinity"),
        }
    }
}

/// A one-dimensional commutative formal group law F(x, y) over Z_(p) with
/// v-variable coefficients, together with its logarithm and exponential when
/// they were used to build it.
#[derive(Debug, Clone)]
pub struct FormalGroupLaw {
    pub prime: u32,
    pub label: FglLabel,
    /// F(x, y) in the ring (v-variables..., x, y).
    pub series: GradedSeries,
    /// l(t) in the t-ring, when the law came from a logarithm.
    pub log: Option<GradedSeries>,
    /// e(t), the compositional inverse of the logarithm.
    pub exp: Option<GradedSeries>,
    pub trunc: i64,
    t_ring: Arc<Ring>,
}

/// Ring (v-vars..., t) used for logarithms and m-series.
fn t_ring(prime: u32, vs: &[(String, i64)], trunc: i64) -> Arc<Ring> {
    let mut r = Ring::new(prime, trunc);
    for (name, deg) in vs {
        r = r.invertible(name, *deg);
    }
    r.var("t", 1).arc()
}

/// Ring (v-vars..., x, y) housing F itself.
fn xy_ring(prime: u32, vs: &[(String, i64)], trunc: i64) -> Arc<Ring> {
    let mut r = Ring::new(prime, trunc);
    for (name, deg) in vs {
        r = r.invertible(name, *deg);
    }
    r.var("x", 1).var("y", 1).arc()
}

fn v_vars_of(ring: &Arc<Ring>) -> Vec<(String, i64)> {
    ring.vars()
        .iter()
        .filter(|v| v.degree < 0)
        .map(|v| (v.name.clone(), v.degree))
        .collect()
}

fn checked_p_pow(p: u32, e: u32) -> Result<i64> {
    let mut acc: i64 = 1;
    for _ in 0..e {
        acc = acc
            .checked_mul(p as i64)
            .ok_or_else(|| AlgebraError::Domain(format!("p^{e} overflows for p = {p}")))?;
    }
    Ok(acc)
}

/// Brown-Peterson logarithm l(t) = sum m_i t^(p^i) with m_0 = 1 and
/// m_j = (1/p)(v_j + sum_{i=1}^{j-1} m_i v_{j-i}^(p^i)), in variables
/// v1..vk of degree -(p^i - 1).
pub fn bp_log(p: u32, k: usize, trunc: i64) -> Result<GradedSeries> {
    crate::scalar::require_prime(p)?;
    if trunc < 1 {
        return Err(AlgebraError::Domain("truncation must be >= 1".into()));
    }
    let vs: Vec<(String, i64)> = (1..=k)
        .map(|i| Ok((format!("v{i}"), -(checked_p_pow(p, i as u32)? - 1))))
        .collect::<Result<_>>()?;
    let ring = t_ring(p, &vs, trunc);
    let one = PRat::one(p);
    let inv_p = PRat::ratio(p, 1, p as i64);
    // m[j] as a series with zero t-exponent.
    let mut m: Vec<GradedSeries> = vec![GradedSeries::one(&ring)];
    let mut log = GradedSeries::var(&ring, "t")?;
    for j in 1..=k {
        let pj = checked_p_pow(p, j as u32)?;
        if pj > trunc {
            break;
        }
        let mut inner = GradedSeries::monomial(&ring, &[(&format!("v{j}"), 1)], one.clone())?;
        for i in 1..j {
            let vpow = GradedSeries::monomial(
                &ring,
                &[(&format!("v{}", j - i), checked_p_pow(p, i as u32)?)],
                one.clone(),
            )?;
            inner = inner.add(&m[i].mul(&vpow)?)?;
        }
        let mj = inner.scale(&inv_p);
        log = log.add(&mj.mul_monomial(&[("t", pj)], &one)?)?;
        m.push(mj);
    }
    Ok(log)
}

/// Morava logarithm log_{K(n)}(t) = sum_{i>=0} (1/p^i) v^((p^{in}-1)/(p^n-1))
/// t^(p^{in}), with a single invertible variable v of degree -(p^n - 1).
pub fn morava_log(p: u32, n: u32, trunc: i64) -> Result<GradedSeries> {
    crate::scalar::require_prime(p)?;
    if trunc < 1 || n == 0 {
        return Err(AlgebraError::Domain("need truncation >= 1 and n >= 1".into()));
    }
    let vdeg = -(checked_p_pow(p, n)? - 1);
    let ring = t_ring(p, &[("v".to_string(), vdeg)], trunc);
    let mut log = GradedSeries::zero(&ring);
    let mut i: u32 = 0;
    loop {
        let texp = match checked_p_pow(p, i * n) {
            Ok(e) if e <= trunc => e,
            _ => break,
        };
        let vexp = (texp - 1) / (checked_p_pow(p, n)? - 1);
        let coeff = PRat::ratio(p, 1, checked_p_pow(p, i)?);
        let term = GradedSeries::monomial(&ring, &[("v", vexp), ("t", texp)], coeff)?;
        log = log.add(&term)?;
        i += 1;
    }
    Ok(log)
}

/// Build F = e(l(x) + l(y)) from a logarithm l = t + higher, with the
/// integrality gate: every coefficient of F must lie in Z_(p).
pub fn fgl_from_log(log: &GradedSeries, label: FglLabel) -> Result<FormalGroupLaw> {
    let p = log.prime();
    let trunc = log.ring().trunc();
    let vs = v_vars_of(log.ring());
    let exp = log.compositional_inverse("t")?;
    let xy = xy_ring(p, &vs, trunc);
    let x = GradedSeries::var(&xy, "x")?;
    let y = GradedSeries::var(&xy, "y")?;
    let lx = log.substitute(&[("t", &x)])?;
    let ly = log.substitute(&[("t", &y)])?;
    let f = exp.substitute(&[("t", &lx.add(&ly)?)])?;
    for (mono, c) in f.terms() {
        if !c.is_p_local() {
            let witness = GradedSeries::from_terms(f.ring(), [(mono.clone(), c.clone())])?;
            return Err(AlgebraError::NotIntegral(format!(
                "coefficient of F leaves Z_({p}): {witness}"
            )));
        }
    }
    Ok(FormalGroupLaw {
        prime: p,
        label,
        series: f,
        log: Some(log.clone()),
        exp: Some(exp),
        trunc,
        t_ring: log.ring().clone(),
    })
}

pub fn additive_fgl(p: u32, trunc: i64) -> Result<FormalGroupLaw> {
    crate::scalar::require_prime(p)?;
    let log = GradedSeries::var(&t_ring(p, &[], trunc), "t")?;
    fgl_from_log(&log, FglLabel::Additive)
}

/// Multiplicative law x + y - xy, from the truncated logarithm -ln(1-t).
pub fn multiplicative_fgl(p: u32, trunc: i64) -> Result<FormalGroupLaw> {
    crate::scalar::require_prime(p)?;
    let ring = t_ring(p, &[], trunc);
    let mut log = GradedSeries::zero(&ring);
    for i in 1..=trunc.max(1) {
        log = log.add(&GradedSeries::monomial(&ring, &[("t", i)], PRat::ratio(p, 1, i))?)?;
    }
    fgl_from_log(&log, FglLabel::Multiplicative)
}

pub fn bp_fgl(p: u32, k: usize, trunc: i64) -> Result<FormalGroupLaw> {
    fgl_from_log(&bp_log(p, k, trunc)?, FglLabel::Bp(k))
}

pub fn morava_fgl(p: u32, n: u32, trunc: i64) -> Result<FormalGroupLaw> {
    fgl_from_log(&morava_log(p, n, trunc)?, FglLabel::Morava(n))
}

/// The closed form of the Morava law mod J = (p, x^(p^n), y^(p^n)):
/// x + y - v * sum_{i=1}^{p-1} (1/p) C(p,i) x^(i p^(n-1)) y^((p-i) p^(n-1)),
/// with coefficients reduced to least nonnegative residues mod p.
pub fn morava_fgl_mod_j_closed_form(p: u32, n: u32, trunc: i64) -> Result<GradedSeries> {
    let vdeg = -(checked_p_pow(p, n)? - 1);
    let xy = xy_ring(p, &[("v".to_string(), vdeg)], trunc);
    let mut f = GradedSeries::var(&xy, "x")?.add(&GradedSeries::var(&xy, "y")?)?;
    let q = checked_p_pow(p, n - 1)?;
    let mut binom: i64 = 1; // C(p, i), exact for the small primes used here
    for i in 1..=(p as i64 - 1) {
        binom = binom * (p as i64 - i + 1) / i;
        let coeff = PRat::from_int(p, -(binom / p as i64));
        let term =
            GradedSeries::monomial(&xy, &[("v", 1), ("x", i * q), ("y", (p as i64 - i) * q)], coeff)?;
        f = f.add(&term)?;
    }
    f.reduce_mod_ideal(p as u64, &[("x", checked_p_pow(p, n)?), ("y", checked_p_pow(p, n)?)])
}

impl FormalGroupLaw {
    pub fn xy_ring(&self) -> &Arc<Ring> {
        self.series.ring()
    }

    pub fn t_ring(&self) -> &Arc<Ring> {
        &self.t_ring
    }

    pub fn v_vars(&self) -> Vec<(String, i64)> {
        v_vars_of(self.series.ring())
    }

    /// a +_F b for series a, b sharing a target ring that contains the
    /// v-variables of F.
    pub fn plus(&self, a: &GradedSeries, b: &GradedSeries) -> Result<GradedSeries> {
        self.series.substitute(&[("x", a), ("y", b)])
    }

    /// Formal inverse: the unique i(t) with F(t, i(t)) = 0, degreewise.
    pub fn formal_inverse(&self) -> Result<GradedSeries> {
        let t = GradedSeries::var(&self.t_ring, "t")?;
        let mut inv = t.neg();
        for k in 2..=self.trunc {
            let r = self.plus(&t, &inv)?;
            let slice = r.coeff_of_power("t", k)?;
            if !slice.is_zero() {
                inv = inv.sub(&slice.mul_monomial(&[("t", k)], &PRat::one(self.prime))?)?;
            }
        }
        Ok(inv)
    }

    /// [m](t) by binary addition chains; negative m through the formal inverse.
    pub fn m_series(&self, m: i64) -> Result<GradedSeries> {
        let t = GradedSeries::var(&self.t_ring, "t")?;
        if m < 0 {
            let pos = self.m_series(-m)?;
            let inv = self.formal_inverse()?;
            return inv.substitute(&[("t", &pos)]);
        }
        let mut acc = GradedSeries::zero(&self.t_ring);
        if m == 0 {
            return Ok(acc);
        }
        let bits = 63 - (m as u64).leading_zeros();
        for b in (0..=bits).rev() {
            acc = self.plus(&acc, &acc)?;
            if (m >> b) & 1 == 1 {
                acc = self.plus(&acc, &t)?;
            }
        }
        Ok(acc)
    }

    /// Height mod p: reduce [p](t) mod (p, all v-variables set to 1) and
    /// locate the lowest surviving power of t.
    pub fn height_mod_p(&self) -> Result<Height> {
        let mut ps = self.m_series(self.prime as i64)?;
        for (name, _) in self.v_vars() {
            ps = ps.evaluate_var(&name, &PRat::one(self.prime))?;
        }
        let ps = ps.reduce_mod_ideal(self.prime as u64, &[])?;
        if ps.is_zero() {
            return Ok(Height::Infinite);
        }
        let lowest = ps
            .terms()
            .map(|(m, _)| self.t_ring.graded_degree(m))
            .min()
            .unwrap();
        let mut e = lowest;
        let mut k = 0u32;
        while e > 1 && e % self.prime as i64 == 0 {
            e /= self.prime as i64;
            k += 1;
        }
        if e != 1 || k == 0 {
            return Err(AlgebraError::Domain(format!(
                "not p-typical-compatible: [p](t) mod p has lowest term at t^{lowest}, not a power of {}",
                self.prime
            )));
        }
        Ok(Height::Finite(k))
    }

    /// The invariant 1-form omega = g(t) dt with g = 1/(dF/dy at (t, 0)).
    /// F stored through total degree T pins the derivative down only through
    /// t^(T-1), so the result is truncated there; every returned coefficient
    /// is fully determined by the stored law.
    pub fn invariant_form(&self) -> Result<GradedSeries> {
        let dy = self.series.derivative("y")?.evaluate_var("y", &PRat::zero(self.prime))?;
        let t = GradedSeries::var(&self.t_ring, "t")?;
        let at_t = dy.substitute(&[("x", &t)])?;
        let form = crate::series::laurent_divide(&GradedSeries::one(&self.t_ring), &at_t)?;
        Ok(form.truncate_measure(self.trunc - 1))
    }

    /// Unitality, commutativity, and associativity, checked exactly up to the
    /// truncation window.
    pub fn verify_axioms(&self) -> Result<()> {
        let zero = PRat::zero(self.prime);
        let x_only = self.series.evaluate_var("y", &zero)?;
        let x = GradedSeries::var(self.xy_ring(), "x")?;
        let y = GradedSeries::var(self.xy_ring(), "y")?;
        if x_only != x {
            return Err(AlgebraError::Inconsistent("F(x, 0) != x".into()));
        }
        if self.series.evaluate_var("x", &zero)? != y {
            return Err(AlgebraError::Inconsistent("F(0, y) != y".into()));
        }
        if self.plus(&y, &x)? != self.series {
            return Err(AlgebraError::Inconsistent("F(x, y) != F(y, x)".into()));
        }
        let mut r = Ring::new(self.prime, self.trunc);
        for (name, deg) in self.v_vars() {
            r = r.invertible(&name, deg);
        }
        let xyz = r.var("x", 1).var("y", 1).var("z", 1).arc();
        let xs = GradedSeries::var(&xyz, "x")?;
        let ys = GradedSeries::var(&xyz, "y")?;
        let zs = GradedSeries::var(&xyz, "z")?;
        let fxy = self.plus(&xs, &ys)?;
        let fyz = self.plus(&ys, &zs)?;
        if self.plus(&fxy, &zs)? != self.plus(&xs, &fyz)? {
            return Err(AlgebraError::Inconsistent("associativity fails".into()));
        }
        if let Some(log) = &self.log {
            let lx = log.substitute(&[("t", &x)])?;
            let ly = log.substitute(&[("t", &y)])?;
            let exp = self.exp.as_ref().expect("log implies exp");
            if exp.substitute(&[("t", &lx.add(&ly)?)])? != self.series {
                return Err(AlgebraError::Inconsistent("F != e(l(x) + l(y))".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u32, n: i64, d: i64) -> PRat {
        PRat::ratio(p, n, d)
    }

    #[test]
    fn bp_log_small_cases() {
        // p=2, k=1, T=2: t + (v1/2) t^2.
        let l = bp_log(2, 1, 2).unwrap();
        assert_eq!(l.to_string(), "t + 1/2*v1*t^2");

        // p=2, k=2, T=4: t + (v1/2) t^2 + (v2/2 + v1^3/4) t^4.
        let l = bp_log(2, 2, 4).unwrap();
        assert_eq!(l.coeff_named(&[("v1", 1), ("t", 2)]).unwrap(), q(2, 1, 2));
        assert_eq!(l.coeff_named(&[("v2", 1), ("t", 4)]).unwrap(), q(2, 1, 2));
        assert_eq!(l.coeff_named(&[("v1", 3), ("t", 4)]).unwrap(), q(2, 1, 4));
        assert_eq!(l.num_terms(), 4);

        // p=3, k=1, T=3: t + (v1/3) t^3.
        let l = bp_log(3, 1, 3).unwrap();
        assert_eq!(l.to_string(), "t + 1/3*v1*t^3");
    }

    #[test]
    fn morava_log_matches_formula() {
        let l = morava_log(2, 1, 4).unwrap();
        assert_eq!(l.to_string(), "t + 1/2*v*t^2 + 1/4*v^3*t^4");

        let l = morava_log(2, 2, 16).unwrap();
        assert_eq!(l.coeff_named(&[("t", 1)]).unwrap(), q(2, 1, 1));
        assert_eq!(l.coeff_named(&[("v", 1), ("t", 4)]).unwrap(), q(2, 1, 2));
        assert_eq!(l.coeff_named(&[("v", 5), ("t", 16)]).unwrap(), q(2, 1, 4));
        assert_eq!(l.num_terms(), 3);

        let l = morava_log(3, 1, 9).unwrap();
        assert_eq!(l.to_string(), "t + 1/3*v*t^3 + 1/9*v^4*t^9");
    }

    #[test]
    fn additive_and_multiplicative_laws() {
        let add = additive_fgl(2, 6).unwrap();
        assert_eq!(add.series.to_string(), "x + y");
        add.verify_axioms().unwrap();

        let mult = multiplicative_fgl(2, 6).unwrap();
        assert_eq!(mult.series.to_string(), "x + y - x*y");
        mult.verify_axioms().unwrap();
    }

    #[test]
    fn morava_laws_are_integral_and_lawful() {
        for (p, n, t) in [(2u32, 1u32, 8i64), (2, 2, 8), (3, 1, 9)] {
            let fgl = morava_fgl(p, n, t).unwrap();
            fgl.verify_axioms().unwrap();
        }
    }

    #[test]
    fn bp_law_is_integral_at_depth() {
        // Integrality of BP: all coefficients of e(l(x)+l(y)) land in Z_(2)
        // even though l and e have 2-power denominators.
        let fgl = bp_fgl(2, 3, 8).unwrap();
        fgl.verify_axioms().unwrap();
        assert!(fgl.series.terms().all(|(_, c)| c.is_p_local()));
    }

    #[test]
    fn morava_mod_j_closed_form_agrees() {
        for (p, n) in [(2u32, 1u32), (2, 2), (3, 1)] {
            let trunc = 2 * checked_p_pow(p, n).unwrap();
            let fgl = morava_fgl(p, n, trunc).unwrap();
            let pn = checked_p_pow(p, n).unwrap();
            let reduced = fgl
                .series
                .reduce_mod_ideal(p as u64, &[("x", pn), ("y", pn)])
                .unwrap();
            let closed = morava_fgl_mod_j_closed_form(p, n, trunc).unwrap();
            assert_eq!(reduced, closed, "mod-J mismatch at p={p}, n={n}");
        }
        let closed = morava_fgl_mod_j_closed_form(2, 1, 4).unwrap();
        assert_eq!(closed.to_string(), "x + y + v*x*y");
    }

    #[test]
    fn m_series_examples() {
        let add = additive_fgl(2, 6).unwrap();
        assert_eq!(add.m_series(5).unwrap().to_string(), "5*t");

        let mult = multiplicative_fgl(2, 6).unwrap();
        assert_eq!(mult.m_series(2).unwrap().to_string(), "2*t - t^2");

        // [a]([b](t)) = [ab](t).
        let m2 = mult.m_series(2).unwrap();
        let m3 = mult.m_series(3).unwrap();
        assert_eq!(m3.substitute(&[("t", &m2)]).unwrap(), mult.m_series(6).unwrap());

        // Formal inverse: [-1] composed under F with t gives 0.
        let inv = mult.formal_inverse().unwrap();
        let t = GradedSeries::var(mult.t_ring(), "t").unwrap();
        assert!(mult.plus(&t, &inv).unwrap().is_zero());
        assert_eq!(mult.m_series(-1).unwrap(), inv);
    }

    #[test]
    fn doubling_on_morava21_has_lowest_term_t_squared() {
        let fgl = morava_fgl(2, 1, 4).unwrap();
        let doubled = fgl
            .m_series(2)
            .unwrap()
            .evaluate_var("v", &PRat::one(2))
            .unwrap()
            .reduce_mod_ideal(2, &[])
            .unwrap();
        let lowest = doubled
            .terms()
            .map(|(m, _)| fgl.t_ring().graded_degree(m))
            .min()
            .unwrap();
        assert_eq!(lowest, 2);
        assert_eq!(doubled.coeff_named(&[("t", 2)]).unwrap(), PRat::one(2));
    }

    #[test]
    fn heights() {
        assert_eq!(additive_fgl(2, 6).unwrap().height_mod_p().unwrap(), Height::Infinite);
        assert_eq!(
            multiplicative_fgl(2, 6).unwrap().height_mod_p().unwrap(),
            Height::Finite(1)
        );
        assert_eq!(
            multiplicative_fgl(3, 9).unwrap().height_mod_p().unwrap(),
            Height::Finite(1)
        );
        for (p, n) in [(2u32, 1u32), (2, 2), (3, 1)] {
            let t = checked_p_pow(p, n).unwrap() + 1;
            let fgl = morava_fgl(p, n, t).unwrap();
            assert_eq!(fgl.height_mod_p().unwrap(), Height::Finite(n), "p={p} n={n}");
        }
    }

    #[test]
    fn invariant_forms() {
        let add = additive_fgl(2, 6).unwrap();
        assert_eq!(add.invariant_form().unwrap().to_string(), "1");

        let mult = multiplicative_fgl(2, 5).unwrap();
        assert_eq!(mult.invariant_form().unwrap().to_string(), "1 + t + t^2 + t^3 + t^4");

        // omega = l'(t) dt whenever the logarithm exists.
        for fgl in [morava_fgl(2, 1, 6).unwrap(), morava_fgl(3, 1, 9).unwrap(), bp_fgl(2, 2, 6).unwrap()] {
            let omega = fgl.invariant_form().unwrap();
            let lprime = fgl
                .log
                .as_ref()
                .unwrap()
                .derivative("t")
                .unwrap()
                .truncate_measure(fgl.trunc - 1);
            assert_eq!(omega, lprime, "{} invariant form != l'", fgl.label);
        }
    }

    #[test]
    fn non_integral_log_is_rejected() {
        // l = t + t^2/2 over p = 2 is not the logarithm of any 2-integral law.
        let ring = t_ring(2, &[], 4);
        let log = GradedSeries::from_terms(
            &ring,
            [(vec![1], PRat::one(2)), (vec![2], PRat::ratio(2, 1, 2))],
        )
        .unwrap();
        assert!(matches!(
            fgl_from_log(&log, FglLabel::Custom),
            Err(AlgebraError::NotIntegral(_))
        ));
    }
}
