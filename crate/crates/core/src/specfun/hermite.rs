//! Probabilists' Hermite polynomials.

/// `H_q(t)` from `H_{q+1} = t H_q - q H_{q-1}`.
pub fn hermite_eval(q: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..q {
        let next = t * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Writes `H_0(t), ..., H_{out.len()-1}(t)` into `out`.
pub fn hermite_all(t: f64, out: &mut [f64]) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = cur;
        let next = t * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
}

/// `H_q(t) / sqrt(q!)`, stable for large `q` where `H_q` itself overflows.
pub fn hermite_normalized(q: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..q {
        let kf = k as f64;
        let next = (t * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}
