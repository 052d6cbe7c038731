//! Closed-form bounds on the disagreement probabilities `ξ_k = 1 - ζ_k`.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RandError;

fn unit(x: &BigRational, what: &str) -> Result<(), RandError> {
    if *x < BigRational::zero() || *x > BigRational::one() {
        return Err(RandError::Range(format!("{what} = {x} is not in [0,1]")));
    }
    Ok(())
}

/// `1/(k₀·2^{k₀})`, a lower bound on `ζ_{k₀}` once `k₀` is Ramsey-large.
pub fn zeta_lower(k0: u32) -> Result<BigRational, RandError> {
    if k0 == 0 {
        return Err(RandError::Range("k0 must be positive".into()));
    }
    Ok(BigRational::new(BigInt::one(), BigInt::from(k0) << k0 as usize))
}

/// `ξ_k · Σ_{j ≤ ℓ-1} C(ℓ-1, j) ξ_k^j (1-ξ_k)^{ℓ-1-j} ξ_j`, the bound on
/// `ξ_{kℓ}`. `table[j]` is `ξ_j` and must cover `0..ℓ`.
pub fn xi_37(xi_k: &BigRational, l: usize, table: &[BigRational]) -> Result<BigRational, RandError> {
    if l == 0 {
        return Err(RandError::Range("ℓ must be positive".into()));
    }
    if table.len() < l {
        return Err(RandError::Range(format!("need ξ_0..ξ_{} but got {} values", l - 1, table.len())));
    }
    unit(xi_k, "ξ_k")?;
    for (j, x) in table.iter().enumerate().take(l) {
        unit(x, &format!("ξ_{j}"))?;
    }
    let one_minus = BigRational::one() - xi_k;
    let mut sum = BigRational::zero();
    for (j, xi_j) in table.iter().enumerate().take(l) {
        let c = BigRational::from_integer(binomial(BigInt::from(l - 1), BigInt::from(j)));
        sum += c * num_traits::pow(xi_k.clone(), j) * num_traits::pow(one_minus.clone(), l - 1 - j) * xi_j;
    }
    Ok(xi_k * sum)
}

/// `ξ_k (1 + ξ_{j₀}) / 2`, valid when `j₀ ≤ ℓ·ξ_k`.
pub fn xi_38(xi_k: &BigRational, l: usize, j0: usize, xi_j0: &BigRational) -> Result<BigRational, RandError> {
    unit(xi_k, "ξ_k")?;
    unit(xi_j0, "ξ_j0")?;
    if l == 0 || BigRational::from_integer(j0.into()) > xi_k * BigRational::from_integer(l.into()) {
        return Err(RandError::Range(format!("need ℓ > 0 and j0 ≤ ℓ·ξ_k, got ℓ = {l}, j0 = {j0}")));
    }
    Ok(xi_k * (BigRational::one() + xi_j0) / BigRational::from_integer(2.into()))
}

/// Largest factorial argument [`ramsey_upper`] will expand.
pub const RAMSEY_GUARD: u64 = 200_000;

/// An upper bound on the least `k₀` with `k₀ → (t)²_m` for `t = 3^{d+8}` and
/// `m = c²` colours: the multinomial coefficient `(m(t-1))! / ((t-1)!)^m`,
/// from the usual induction on the colour classes. A single colour needs
/// exactly `t` points.
pub fn ramsey_upper(c: u64, d: u32) -> Result<BigUint, RandError> {
    if c == 0 {
        return Err(RandError::Range("c must be positive".into()));
    }
    let t = 3u64.checked_pow(d + 8).ok_or_else(|| RandError::Guard("3^(d+8) overflows".into()))?;
    let m = c.checked_mul(c).ok_or_else(|| RandError::Guard("c² overflows".into()))?;
    let total = m.checked_mul(t - 1).filter(|&x| x <= RAMSEY_GUARD).ok_or_else(|| {
        RandError::Guard(format!("(c²)(3^(d+8)-1) exceeds {RAMSEY_GUARD}"))
    })?;
    if m == 1 {
        return Ok(BigUint::from(t));
    }
    // multinomial as a product of binomials C(i(t-1), t-1)
    let mut out = BigUint::one();
    for i in 2..=m {
        out *= binomial(BigUint::from(i * (t - 1)), BigUint::from(t - 1));
    }
    debug_assert!(total >= t - 1);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn zeta_lower_values() {
        assert_eq!(zeta_lower(1).unwrap(), q(1, 2));
        assert_eq!(zeta_lower(3).unwrap(), q(1, 24));
        assert!(zeta_lower(0).is_err());
    }

    #[test]
    fn xi_37_examples() {
        assert_eq!(xi_37(&q(1, 2), 2, &[q(0, 1), q(1, 1)]).unwrap(), q(1, 4));
        assert_eq!(xi_37(&q(0, 1), 3, &[q(1, 1), q(1, 1), q(1, 1)]).unwrap(), q(0, 1));
        // with every ξ_j = 1 the sum is a full binomial expansion
        assert_eq!(xi_37(&q(1, 3), 4, &vec![q(1, 1); 4]).unwrap(), q(1, 3));
        assert!(xi_37(&q(1, 2), 3, &[q(0, 1)]).is_err());
        assert!(xi_37(&q(3, 2), 1, &[q(0, 1)]).is_err());
    }

    #[test]
    fn xi_38_is_looser_than_xi_37() {
        let xi_k = q(1, 2);
        let table = [q(1, 4), q(1, 4), q(1, 3), q(1, 2)];
        let l = 4;
        let j0 = 1;
        assert_eq!(xi_38(&xi_k, l, j0, &table[j0]).unwrap(), q(5, 16));
        assert!(xi_37(&xi_k, l, &table).unwrap() <= xi_38(&xi_k, l, j0, &table[j0]).unwrap());
        assert!(xi_38(&xi_k, l, 3, &q(1, 2)).is_err());
    }

    #[test]
    fn ramsey_small_cases() {
        assert_eq!(ramsey_upper(1, 0).unwrap(), BigUint::from(6561u32));
        let r = ramsey_upper(2, 0).unwrap();
        let t = 6561u64;
        // four colours: C(2(t-1), t-1)·C(3(t-1), t-1)·C(4(t-1), t-1)
        assert!(r > binomial(BigUint::from(2 * (t - 1)), BigUint::from(t - 1)));
        assert!(ramsey_upper(100, 0).is_err());
    }
}
