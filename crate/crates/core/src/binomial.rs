//! Exact binomial and multinomial coefficients.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)` by the multiplicative formula; 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after each step.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` extended by 0 outside `0 <= k <= n`.
pub fn binomial_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

/// `total! / (parts[0]! ... parts[q-1]!)`, or 0 when the parts do not sum
/// to `total`.
pub fn multinomial(total: u64, parts: &[u64]) -> BigUint {
    if parts.iter().sum::<u64>() != total {
        return BigUint::zero();
    }
    let mut remaining = total;
    let mut acc = BigUint::one();
    for &p in parts {
        acc *= binomial(remaining, p);
        remaining -= p;
    }
    acc
}

/// Product of many factors, multiplied pairwise so large results are built
/// from balanced operands.
pub fn product(mut factors: Vec<BigUint>) -> BigUint {
    if factors.iter().any(Zero::is_zero) {
        return BigUint::zero();
    }
    factors.retain(|f| !f.is_one());
    while factors.len() > 1 {
        let mut next = Vec::with_capacity(factors.len().div_ceil(2));
        let mut it = factors.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        factors = next;
    }
    factors.pop().unwrap_or_else(BigUint::one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(rows: usize) -> Vec<Vec<BigUint>> {
        let mut t: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for n in 1..rows {
            let prev = &t[n - 1];
            let mut row = vec![BigUint::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            t.push(row);
        }
        t
    }

    #[test]
    fn matches_pascal_triangle() {
        let t = pascal(80);
        for (n, row) in t.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(&binomial(n as u64, k as u64), v, "C({n},{k})");
            }
            assert!(binomial(n as u64, n as u64 + 1).is_zero());
        }
    }

    #[test]
    fn signed_out_of_range_is_zero() {
        assert!(binomial_signed(3, -1).is_zero());
        assert!(binomial_signed(3, 4).is_zero());
        assert!(binomial_signed(-1, 0).is_zero());
        assert_eq!(binomial_signed(0, 0), BigUint::one());
        assert_eq!(binomial_signed(4, 2), BigUint::from(6u32));
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(3, &[2, 1]), BigUint::from(3u32));
        assert_eq!(multinomial(0, &[0, 0, 0]), BigUint::one());
        assert_eq!(multinomial(6, &[1, 2, 3]), BigUint::from(60u32));
        assert!(multinomial(4, &[1, 2]).is_zero());
    }

    #[test]
    fn balanced_product() {
        let f: Vec<BigUint> = (1u32..=30).map(BigUint::from).collect();
        let fact30 = (1u32..=30).fold(BigUint::one(), |a, b| a * b);
        assert_eq!(product(f), fact30);
        assert_eq!(product(vec![]), BigUint::one());
        assert!(product(vec![BigUint::from(5u32), BigUint::zero()]).is_zero());
    }
}
