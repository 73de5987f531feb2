use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::fgl::{bp_log, fgl_from_log, FglLabel, FormalGroupLaw};
use crate::scalar::PRat;
use crate::series::{laurent_divide, GradedSeries, Ring};

/// Per-arity data of a multiplicative operation on classes of regular
/// embeddings: for each arity c, the series F^c in z_1..z_c obtained by
/// dividing the operation's value on the diagonal class by z_1...z_c.
#[derive(Debug, Clone)]
pub struct OperationProfile {
    pub label: String,
    components: BTreeMap<usize, GradedSeries>,
}

impl OperationProfile {
    pub fn new(label: impl Into<String>) -> OperationProfile {
        OperationProfile { label: label.into(), components: BTreeMap::new() }
    }

    pub fn with_component(mut self, arity: usize, fc: GradedSeries) -> Result<OperationProfile> {
        if arity < 1 {
            return Err(AlgebraError::Domain("profile arity must be >= 1".into()));
        }
        for i in 1..=arity {
            let name = format!("z{i}");
            let idx = fc.ring().idx(&name).map_err(|_| {
                AlgebraError::Structural(format!("profile component lacks variable {name}"))
            })?;
            if fc.ring().vars()[idx].degree != 1 {
                return Err(AlgebraError::Structural(format!("variable {name} must have degree 1")));
            }
        }
        self.components.insert(arity, fc);
        Ok(self)
    }

    pub fn component(&self, arity: usize) -> Result<&GradedSeries> {
        self.components.get(&arity).ok_or_else(|| {
            AlgebraError::Domain(format!("profile {} has no arity-{arity} component", self.label))
        })
    }
}

/// Pushforward along a codimension-c regular embedding evaluated directly:
/// substitute z_i = t +_B mu_i into F^c * z_1...z_c, divide by t and by each
/// of the (t +_B mu_i), multiply by the invariant form, and take the
/// t-residue. The division runs in a ring whose window extends the callers
/// by c + 1 measures, which is exactly what dividing out t * prod(t +_B mu_i)
/// consumes; the residue is mapped back at the end. Roots are series in the
/// base variables and must not involve the Laurent variable.
pub fn rr_pushforward_residue(
    profile: &OperationProfile,
    roots: &[GradedSeries],
    fgl: &FormalGroupLaw,
) -> Result<GradedSeries> {
    if roots.is_empty() {
        return Err(AlgebraError::Domain("need at least one root".into()));
    }
    let caller = roots[0].ring().clone();
    for r in roots {
        if r.ring() != &caller {
            return Err(AlgebraError::Structural("roots live in different rings".into()));
        }
    }
    let t_idx = caller
        .laurent_idx()
        .ok_or_else(|| AlgebraError::Domain("root ring needs a Laurent variable".into()))?;
    let t_name = caller.vars()[t_idx].name.clone();
    for r in roots {
        if r.terms().any(|(m, _)| m[t_idx] != 0) {
            return Err(AlgebraError::Domain(format!(
                "roots must not involve the residue variable {t_name}"
            )));
        }
    }

    let c = roots.len() as i64;
    let work_trunc = caller.trunc() + c + 1;
    let work_floor = -(2 * caller.trunc() + c + 4);
    let mut builder = Ring::new(caller.prime(), work_trunc);
    for v in caller.vars() {
        builder = if v.name == t_name {
            builder.laurent(&v.name, v.degree, work_floor)
        } else if v.kind == crate::series::VarKind::Invertible {
            builder.invertible(&v.name, v.degree)
        } else {
            builder.var(&v.name, v.degree)
        };
    }
    let work = builder.arc();
    let t = GradedSeries::var(&work, &t_name)?;

    let fc = profile.component(roots.len())?;
    let mut shifted = Vec::with_capacity(roots.len());
    for mu in roots {
        shifted.push(fgl.plus(&t, &mu.into_ring(&work)?)?);
    }
    let bindings: Vec<(String, &GradedSeries)> = shifted
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("z{}", i + 1), s))
        .collect();
    let bindings_ref: Vec<(&str, &GradedSeries)> =
        bindings.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let mut numerator = fc.substitute(&bindings_ref)?;
    for s in &shifted {
        numerator = numerator.mul(s)?;
    }
    let mut quotient =
        numerator.mul_monomial(&[(&t_name, -1)], &PRat::one(caller.prime()))?;
    for s in &shifted {
        quotient = laurent_divide(&quotient, s)?;
    }
    let omega = fgl.invariant_form()?.into_ring(&work)?;
    quotient.residue(&omega)?.into_ring(&caller)
}

/// The closed form of the same pushforward: F^c with z_i replaced by mu_i.
pub fn rr_shortcut(profile: &OperationProfile, roots: &[GradedSeries]) -> Result<GradedSeries> {
    if roots.is_empty() {
        return Err(AlgebraError::Domain("need at least one root".into()));
    }
    let fc = profile.component(roots.len())?;
    let bindings: Vec<(String, &GradedSeries)> = roots
        .iter()
        .enumerate()
        .map(|(i, mu)| (format!("z{}", i + 1), mu))
        .collect();
    let bindings_ref: Vec<(&str, &GradedSeries)> =
        bindings.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    fc.substitute(&bindings_ref)
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

fn slice_monomial(
    ring: &Arc<Ring>,
    vname: &str,
    prime: u32,
    n: u32,
    k: u32,
) -> Result<GradedSeries> {
    let drop = k as i64 * (prime as i64 - 1) * (checked_p_pow(prime, n)? - 1);
    let sign = if k % 2 == 0 { 1 } else { -1 };
    GradedSeries::monomial(
        ring,
        &[(vname, k as i64), ("t", -drop)],
        PRat::from_int(prime, sign),
    )
}

/// The lowest-degree slice of the Steenrod-type operation on v^k modulo the
/// ideal (p, v_1..v_(n-1)): (-1)^k v^k t^(-k(p-1)(p^n-1)), extended from k = 1
/// by multiplicativity. Returned exactly; consumers reduce mod p.
pub fn steenrod_slice_vn(prime: u32, n: u32, k: u32, trunc: i64) -> Result<GradedSeries> {
    crate::scalar::require_prime(prime)?;
    if k < 1 || n < 1 {
        return Err(AlgebraError::Domain("need k >= 1 and n >= 1".into()));
    }
    let drop = k as i64 * (prime as i64 - 1) * (checked_p_pow(prime, n)? - 1);
    let ring = Ring::new(prime, trunc)
        .invertible("v", -(checked_p_pow(prime, n)? - 1))
        .laurent("t", 1, -drop)
        .arc();
    slice_monomial(&ring, "v", prime, n, k)
}

/// [p](t)/t for the p-typical law with v_1..v_(n-1) set to zero, reduced
/// mod p. The lowest term must be v_n t^(p^n - 1) with coefficient 1.
pub fn p_series_mod_in(prime: u32, n: u32, trunc: i64) -> Result<GradedSeries> {
    crate::scalar::require_prime(prime)?;
    if n < 1 {
        return Err(AlgebraError::Domain("need n >= 1".into()));
    }
    if trunc < checked_p_pow(prime, n)? {
        return Err(AlgebraError::Domain("truncation must reach p^n".into()));
    }
    let mut num_v = 0usize;
    while checked_p_pow(prime, num_v as u32 + 1).map(|v| v <= trunc).unwrap_or(false) {
        num_v += 1;
    }
    let mut log = bp_log(prime, num_v, trunc)?;
    for i in 1..n {
        log = log.evaluate_var(&format!("v{i}"), &PRat::zero(prime))?;
    }
    let law = fgl_from_log(&log, FglLabel::Custom)?;
    let p_series = law.m_series(prime as i64)?;
    let shifted = p_series.mul_monomial(&[("t", -1)], &PRat::one(prime))?;
    let reduced = shifted.reduce_mod_ideal(prime as u64, &[])?;
    let t_pos = reduced.ring().idx("t")?;
    let min_t = reduced
        .terms()
        .map(|(m, _)| m[t_pos])
        .min()
        .ok_or_else(|| AlgebraError::Inconsistent("p-series vanished mod p".into()))?;
    let lowest: Vec<(Vec<i64>, PRat)> = reduced
        .terms()
        .filter(|(m, _)| m[t_pos] == min_t)
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    let mut expected = vec![0i64; reduced.ring().vars().len()];
    expected[reduced.ring().idx(&format!("v{n}"))?] = 1;
    expected[t_pos] = checked_p_pow(prime, n)? - 1;
    if lowest.len() != 1 || lowest[0].0 != expected || !lowest[0].1.is_one() {
        return Err(AlgebraError::Inconsistent(format!(
            "p-series mod the ideal does not start with v{n}*t^{}",
            checked_p_pow(prime, n)? - 1
        )));
    }
    Ok(reduced)
}

/// Result of dividing alpha^p - St(alpha) by the p-series for alpha = v_n^k.
#[derive(Debug, Clone)]
pub struct SymmetricDivision {
    /// The coefficient series of t^(-k(p-1)(p^n-1)-(p^n-1)) in the quotient.
    pub slice: GradedSeries,
    /// Its scalar coefficient on v_n^(k-1).
    pub coefficient: PRat,
    /// Whether that coefficient is a unit mod p.
    pub unit_mod_p: bool,
}

/// Form alpha = v_n^k, compute (alpha^p - St(alpha)) mod (p, v_1..v_(n-1)),
/// divide by [p](t)/t, and extract the deepest Laurent slice. The quotient's
/// slice must be v_n^(k-1) times a unit mod p.
pub fn symm_division_check(prime: u32, n: u32, k: u32) -> Result<SymmetricDivision> {
    if k < 1 || n < 1 {
        return Err(AlgebraError::Domain("need k >= 1 and n >= 1".into()));
    }
    let trunc = checked_p_pow(prime, n + 1)?;
    let drop = k as i64 * (prime as i64 - 1) * (checked_p_pow(prime, n)? - 1);
    let slice_exp = -(drop + checked_p_pow(prime, n)? - 1);
    let mut num_v = 0usize;
    while checked_p_pow(prime, num_v as u32 + 1).map(|v| v <= trunc).unwrap_or(false) {
        num_v += 1;
    }
    let mut ring = Ring::new(prime, trunc);
    for i in 1..=num_v {
        ring = ring.invertible(&format!("v{i}"), -(checked_p_pow(prime, i as u32)? - 1));
    }
    let ring = ring.laurent("t", 1, slice_exp - 1).arc();

    let vname = format!("v{n}");
    let alpha_p = GradedSeries::monomial(
        &ring,
        &[(&vname, (k * prime) as i64)],
        PRat::one(prime),
    )?;
    let st = slice_monomial(&ring, &vname, prime, n, k)?;
    let numerator = alpha_p.sub(&st)?.reduce_mod_ideal(prime as u64, &[])?;
    let divisor = p_series_mod_in(prime, n, trunc)?.into_ring(&ring)?;
    let quotient = laurent_divide(&numerator, &divisor)?;
    let slice = quotient.coeff_of_power("t", slice_exp)?;

    let mut expected_mono = vec![0i64; ring.vars().len()];
    expected_mono[ring.idx(&vname)?] = k as i64 - 1;
    let coefficient = slice.coeff(&expected_mono);
    let matches_shape = slice.num_terms() == usize::from(!coefficient.is_zero());
    if !matches_shape {
        return Err(AlgebraError::Inconsistent(format!(
            "division slice is not a multiple of {vname}^{}: {slice}",
            k - 1
        )));
    }
    let unit_mod_p = coefficient.is_p_unit();
    Ok(SymmetricDivision { slice, coefficient, unit_mod_p })
}

/// Total-Chern-class combination rule: classes of a sum add through the
/// formal group law.
pub fn cartan_combine(
    cx: &GradedSeries,
    cy: &GradedSeries,
    fgl: &FormalGroupLaw,
) -> Result<GradedSeries> {
    fgl.plus(cx, cy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::{additive_fgl, morava_fgl};

    fn work_ring(prime: u32, trunc: i64, floor: i64, with_v: bool) -> Arc<Ring> {
        let mut r = Ring::new(prime, trunc);
        if with_v {
            r = r.invertible("v", -1);
        }
        r.var("h", 1).laurent("t", 1, floor).arc()
    }

    fn z_ring(prime: u32, trunc: i64, arity: usize, with_v: bool) -> Arc<Ring> {
        let mut r = Ring::new(prime, trunc);
        if with_v {
            r = r.invertible("v", -1);
        }
        for i in 1..=arity {
            r = r.var(&format!("z{i}"), 1);
        }
        r.arc()
    }

    #[test]
    fn fundamental_class_is_preserved() {
        let fgl = additive_fgl(2, 6).unwrap();
        let zr = z_ring(2, 6, 2, false);
        let profile = OperationProfile::new("identity")
            .with_component(2, GradedSeries::one(&zr))
            .unwrap();
        let work = work_ring(2, 6, -12, false);
        let h = GradedSeries::var(&work, "h").unwrap();
        let roots = vec![h.clone(), h.pow(2).unwrap()];
        let residue = rr_pushforward_residue(&profile, &roots, &fgl).unwrap();
        assert_eq!(residue, GradedSeries::one(&work));
    }

    #[test]
    fn single_root_linear_profile() {
        let fgl = additive_fgl(2, 6).unwrap();
        let zr = z_ring(2, 6, 1, false);
        let profile = OperationProfile::new("first-chern")
            .with_component(1, GradedSeries::var(&zr, "z1").unwrap())
            .unwrap();
        let work = work_ring(2, 6, -10, false);
        let mu = GradedSeries::var(&work, "h").unwrap();
        let residue = rr_pushforward_residue(&profile, &[mu.clone()], &fgl).unwrap();
        assert_eq!(residue, mu);
        assert_eq!(rr_shortcut(&profile, &[mu.clone()]).unwrap(), mu);
    }

    #[test]
    fn residue_route_matches_shortcut_on_morava_law() {
        let fgl = morava_fgl(2, 1, 6).unwrap();
        let zr = z_ring(2, 6, 2, true);
        let z1 = GradedSeries::var(&zr, "z1").unwrap();
        let z2 = GradedSeries::var(&zr, "z2").unwrap();
        let fc = GradedSeries::one(&zr)
            .add(&z1.mul(&z2).unwrap())
            .unwrap()
            .add(&z1.pow(2).unwrap())
            .unwrap();
        let profile = OperationProfile::new("mixed").with_component(2, fc).unwrap();
        let work = work_ring(2, 6, -16, true);
        let h = GradedSeries::var(&work, "h").unwrap();
        let two_h = h.scale(&PRat::from_int(2, 2));
        let roots = vec![h.clone(), two_h.add(&h.pow(3).unwrap()).unwrap()];
        let via_residue = rr_pushforward_residue(&profile, &roots, &fgl).unwrap();
        let via_shortcut = rr_shortcut(&profile, &roots).unwrap();
        assert_eq!(via_residue, via_shortcut);
    }

    #[test]
    fn steenrod_slices() {
        assert_eq!(steenrod_slice_vn(2, 1, 1, 4).unwrap().to_string(), "-v*t^-1");
        assert_eq!(steenrod_slice_vn(2, 1, 2, 4).unwrap().to_string(), "v^2*t^-2");
        assert_eq!(steenrod_slice_vn(3, 1, 1, 9).unwrap().to_string(), "-v*t^-4");
    }

    #[test]
    fn steenrod_slice_is_multiplicative() {
        for (p, n, k) in [(2u32, 1u32, 3u32), (3, 1, 2), (2, 2, 2)] {
            let single = steenrod_slice_vn(p, n, 1, 8).unwrap();
            let repeated = steenrod_slice_vn(p, n, k, 8).unwrap();
            let powered = single.into_ring(repeated.ring()).unwrap().pow(k).unwrap();
            assert_eq!(powered, repeated, "p={p} n={n} k={k}");
        }
    }

    #[test]
    fn p_series_leading_terms() {
        let s = p_series_mod_in(2, 1, 4).unwrap();
        assert_eq!(s.coeff_named(&[("v1", 1), ("t", 1)]).unwrap(), PRat::one(2));

        let s = p_series_mod_in(2, 2, 8).unwrap();
        assert_eq!(s.coeff_named(&[("v2", 1), ("t", 3)]).unwrap(), PRat::one(2));
        assert!(s.coeff_named(&[("v1", 1), ("t", 1)]).unwrap().is_zero());

        let s = p_series_mod_in(3, 1, 9).unwrap();
        assert_eq!(s.coeff_named(&[("v1", 1), ("t", 2)]).unwrap(), PRat::one(3));
    }

    #[test]
    fn symmetric_division_small_cases() {
        let out = symm_division_check(2, 1, 1).unwrap();
        assert!(out.unit_mod_p);
        assert_eq!(out.coefficient.reduce_mod(&2.into()).unwrap(), 1.into());
        assert_eq!(out.slice.to_string(), "1");

        let out = symm_division_check(2, 1, 2).unwrap();
        assert!(out.unit_mod_p);
        assert_eq!(out.slice.to_string(), "v1");

        let out = symm_division_check(3, 1, 1).unwrap();
        assert!(out.unit_mod_p);
        assert_eq!(out.slice.to_string(), "1");
    }

    #[test]
    fn cartan_combination() {
        let fgl = morava_fgl(2, 1, 4).unwrap();
        let mut r = Ring::new(2, 4);
        r = r.invertible("v", -1);
        let ring = r.var("t", 1).arc();
        let t = GradedSeries::var(&ring, "t").unwrap();

        let both = cartan_combine(&t, &t, &fgl)
            .unwrap()
            .evaluate_var("v", &PRat::one(2))
            .unwrap()
            .reduce_mod_ideal(2, &[("t", 4)])
            .unwrap();
        assert_eq!(both.to_string(), "t^2");

        let zero = GradedSeries::zero(&ring);
        assert_eq!(cartan_combine(&t, &zero, &fgl).unwrap(), t);

        let additive = additive_fgl(2, 4).unwrap();
        let t2 = t.pow(2).unwrap();
        assert_eq!(
            cartan_combine(&t, &t2, &additive).unwrap(),
            t.add(&t2).unwrap()
        );
    }
}
