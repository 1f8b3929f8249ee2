//! Fixed-node Gauss–Legendre quadrature.

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss5<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite five-point rule with `panels` equal panels.
pub fn gauss5_composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == n { b } else { lo + h };
            gauss5(lo, hi, &mut f)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_degree_nine() {
        let v = gauss5(-1.0, 2.0, |x| x.powi(9) - 3.0 * x.powi(4) + 1.0);
        let exact = (2f64.powi(10) - 1.0) / 10.0 - 3.0 * (32.0 + 1.0) / 5.0 + 3.0;
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }

    #[test]
    fn composite_exponential() {
        let v = gauss5_composite(0.0, 7.0, 20, |u| (-u).exp());
        assert!((v - (1.0 - (-7f64).exp())).abs() < 1e-14);
    }
}
