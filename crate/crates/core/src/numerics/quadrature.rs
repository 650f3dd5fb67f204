/// Composite Simpson rule on `[a, b]` with `panels` subintervals (odd counts are
/// rounded up to the next even number).
pub fn quadrature<F>(mut f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let n = even_panels(panels);
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + h * i as f64);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

fn even_panels(panels: usize) -> usize {
    let n = panels.max(2);
    n + n % 2
}

/// Nodes and weights of the composite Simpson rule on `[a, b]`, so that
/// `sum(w_i f(x_i))` reproduces [`quadrature`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimpsonRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SimpsonRule {
    pub fn new(a: f64, b: f64, panels: usize) -> Self {
        if a == b {
            return Self { nodes: Vec::new(), weights: Vec::new() };
        }
        let n = even_panels(panels);
        let h = (b - a) / n as f64;
        let nodes = (0..=n)
            .map(|i| if i == n { b } else { a + h * i as f64 })
            .collect();
        let weights = (0..=n)
            .map(|i| {
                let c = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of Simpson panels (pairs of subintervals).
    pub fn pair_count(&self) -> usize {
        self.nodes.len().saturating_sub(1) / 2
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        assert!((quadrature(|_| 1.0, 0.0, 1.0, 1) - 1.0).abs() < 1e-15);
        assert!((quadrature(|t| t * t, 0.0, 1.0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((quadrature(|t| t * t * t, -1.0, 3.0, 4) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn rule_matches_direct() {
        let rule = SimpsonRule::new(0.5, 2.0, 10);
        let values: Vec<f64> = rule.nodes.iter().map(|x| x.sin()).collect();
        let direct = quadrature(f64::sin, 0.5, 2.0, 10);
        assert!((rule.integrate(&values) - direct).abs() < 1e-15);
    }
}
