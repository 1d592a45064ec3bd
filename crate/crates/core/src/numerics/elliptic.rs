//! Jacobi elliptic functions and the complete elliptic integral K.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Below this value of k′² the hyperbolic limit (with first-order
/// corrections) replaces the Landen recursion.
const HYPERBOLIC_SWITCH: f64 = 1e-14;

/// Arithmetic–geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind K(k) = π / (2 AGM(1, k′)).
pub fn complete_elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k.abs()) {
        return Err(Error::Domain(format!("K(k) requires 0 <= k < 1, got {k}")));
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(FRAC_PI_2 / agm(1.0, kp))
}

/// (sn, cn, dn) of argument `u` and modulus `k` ∈ [0, 1].
///
/// Uses the descending Landen (AGM) scheme; for k′² < 1e−14 switches to the
/// hyperbolic expansion with O(k′²) corrections.
pub fn jacobi_elliptic(u: f64, k: f64) -> (f64, f64, f64) {
    assert!((0.0..=1.0).contains(&k), "modulus must lie in [0, 1], got {k}");
    if k == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    let kp2 = (1.0 - k) * (1.0 + k);
    if kp2 < HYPERBOLIC_SWITCH {
        let (t, s) = (u.tanh(), 1.0 / u.cosh());
        let sh_ch = u.sinh() * u.cosh();
        let q = 0.25 * kp2 * (sh_ch - u);
        let sn = t + q * s * s;
        let cn = s - q * t * s;
        let dn = s + 0.25 * kp2 * (sh_ch + u) * t * s;
        return (sn, cn, dn);
    }
    let mut a = vec![1.0];
    let mut cc = vec![k];
    let mut b = kp2.sqrt();
    let mut n = 0;
    while cc[n].abs() > 1e-16 * a[n] && n < 40 {
        let an = 0.5 * (a[n] + b);
        let cn = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        a.push(an);
        cc.push(cn);
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for m in (1..=n).rev() {
        phi = 0.5 * (phi + (cc[m] / a[m] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // dn² = k′² + k²cn² has no cancellation, unlike 1 − k²sn².
    let dn = (kp2 + k * k * cn * cn).sqrt();
    (sn, cn, dn)
}
