//! Integer-order Bessel functions of the first kind, used by the angular
//! spectral evaluation of surface Fourier transforms in the plane.

/// Returns `[J_0(x), J_1(x), ..., J_order_max(x)]` for `x >= 0`.
pub fn bessel_j_sequence(order_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and non-negative");
    let mut out = vec![0.0; order_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1e-4 {
        let q = 0.25 * x * x;
        let mut lead = 1.0;
        for (m, slot) in out.iter_mut().enumerate() {
            if m > 0 {
                lead *= 0.5 * x / m as f64;
            }
            let mf = m as f64;
            *slot = lead * (1.0 - q / (mf + 1.0) + q * q / (2.0 * (mf + 1.0) * (mf + 2.0)));
        }
        return out;
    }
    if x > 25.0 && (order_max as f64) < x {
        out[0] = hankel(0.0, x);
        if order_max >= 1 {
            out[1] = hankel(1.0, x);
        }
        for m in 1..order_max {
            out[m + 1] = 2.0 * m as f64 / x * out[m] - out[m - 1];
        }
        return out;
    }
    miller(order_max, x, &mut out);
    out
}

pub fn bessel_j(order: usize, x: f64) -> f64 {
    bessel_j_sequence(order, x)[order]
}

/// Hankel asymptotic expansion for `J_nu`, accurate to rounding for x > 25.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 {
            break;
        }
        let kk = (k + 1) as f64;
        let odd = 2.0 * kk - 1.0;
        term *= (mu - odd * odd) / (kk * 8.0 * x);
    }
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller's backward recurrence normalised with `J_0 + 2 sum J_{2k} = 1`.
fn miller(order_max: usize, x: f64, out: &mut [f64]) {
    let top = (order_max as f64).max(x);
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        let idx = k - 1;
        if idx <= order_max {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            sum += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            sum *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    sum += cur;
    for v in out.iter_mut() {
        *v /= sum;
    }
}
