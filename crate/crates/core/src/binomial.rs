//! Binomial coefficients.

/// `C(n, k)`, or `None` on overflow. Zero when `k > n`.
pub fn checked_binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// `C(n, k)` for arguments small enough not to overflow.
///
/// Panics on overflow.
pub fn binomial(n: u64, k: u64) -> u64 {
    checked_binomial(n, k).expect("binomial coefficient overflows u64")
}
