//! Bessel functions of the first kind for integer order.
//!
//! Small arguments (`|x| ≤ 1`, which covers every physical modulation index
//! in this crate) use the power series. Larger arguments use Miller's
//! backward recurrence normalised by `J_0 + 2 Σ J_2k = 1`.

/// `J_n(x)` for any integer `n` and finite `x`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x).
    let order = n.unsigned_abs();
    let mut sign = 1.0;
    if n < 0 && order % 2 == 1 {
        sign = -sign;
    }
    if x < 0.0 && order % 2 == 1 {
        sign = -sign;
    }
    let ax = x.abs();
    let value = if ax <= 1.0 {
        series(order, ax)
    } else {
        backward_recurrence(order, ax)
    };
    sign * value
}

fn series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    // (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    let nf = n as f64;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nf + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn backward_recurrence(n: u32, x: f64) -> f64 {
    const BIG: f64 = 1e250;
    const RESCALE: f64 = 1e-250;
    let reach = (n as f64).max(x);
    let mut start = (reach + 20.0 + (40.0 * reach).sqrt()) as u32;
    start += start % 2;

    let mut above = 0.0; // J_{j+1}
    let mut current = 1.0; // J_j
    let mut even_sum = 0.0;
    let mut wanted = 0.0;
    for j in (1..=start).rev() {
        let below = 2.0 * j as f64 / x * current - above;
        above = current;
        current = below;
        if current.abs() > BIG {
            current *= RESCALE;
            above *= RESCALE;
            even_sum *= RESCALE;
            wanted *= RESCALE;
        }
        let index = j - 1;
        if index == n {
            wanted = current;
        }
        if index > 0 && index % 2 == 0 {
            even_sum += current;
        }
    }
    let norm = current + 2.0 * even_sum;
    wanted / norm
}
