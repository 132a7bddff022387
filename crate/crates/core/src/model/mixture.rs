use crate::error::{domain, Result};

/// Relative closeness below which two component scales count as equal.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
/// Relative split applied to a degenerate pair of scales.
pub const DEGENERACY_SPLIT: f64 = 1e-6;

/// Distribution of a positively weighted sum of independent exponentials,
/// `X = Σ cᵢ·Eᵢ` with `Eᵢ ~ Exp(mean Ωᵢ)`, written as the signed
/// partial-fraction mixture `f(x) = Σ wᵢ rᵢ e^{−rᵢ x}`.
///
/// Components with zero scale are dropped. When every scale is zero the
/// mixture has no components and stands for the point mass at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpMixture {
    rates: Vec<f64>,
    weights: Vec<f64>,
}

impl ExpMixture {
    /// Builds the mixture from component means `sᵢ = cᵢ·Ωᵢ`.
    ///
    /// A pair of scales closer than [`DEGENERACY_TOLERANCE`] (relative) is
    /// split to `s(1+ε)` and `s(1−ε)` with `ε =` [`DEGENERACY_SPLIT`], which
    /// keeps the mean unchanged and perturbs the distribution at O(ε²).
    pub fn from_scales(scales: &[f64]) -> Result<Self> {
        let mut s = Vec::with_capacity(scales.len());
        for &v in scales {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(
                    "scale",
                    v,
                    "component scales must be finite and non-negative",
                ));
            }
            if v > 0.0 {
                s.push(v);
            }
        }
        split_degenerate(&mut s);

        let n = s.len();
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // rⱼ/(rⱼ − rᵢ) rewritten with sᵢ = 1/rᵢ
            weights[i] = (0..n)
                .filter(|&j| j != i)
                .map(|j| s[i] / (s[i] - s[j]))
                .product();
        }
        if n > 1 {
            let head: f64 = weights[..n - 1].iter().sum();
            weights[n - 1] = 1.0 - head;
        }
        Ok(Self {
            rates: s.iter().map(|v| 1.0 / v).collect(),
            weights,
        })
    }

    /// Builds the mixture from exponential rates (all strictly positive).
    pub fn from_rates(rates: &[f64]) -> Result<Self> {
        let scales = rates
            .iter()
            .map(|&r| {
                if r > 0.0 && r.is_finite() {
                    Ok(1.0 / r)
                } else {
                    Err(domain("rate", r, "rates must be finite and positive"))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_scales(&scales)
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    /// True for the point mass at zero.
    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rates.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.components().map(|(r, w)| w / r).sum()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.components().map(|(r, w)| w * r * (-r * x).exp()).sum()
    }

    /// `Pr[X ≤ x]`, clamped against rounding in the signed sum.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.is_empty() {
            return if x >= 0.0 { 1.0 } else { 0.0 };
        }
        if x <= 0.0 {
            return 0.0;
        }
        let survival: f64 = self.components().map(|(r, w)| w * (-r * x).exp()).sum();
        (1.0 - survival).clamp(0.0, 1.0)
    }
}

fn split_degenerate(s: &mut [f64]) {
    let n = s.len();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let scale = s[i].max(s[j]);
                if (s[i] - s[j]).abs() <= DEGENERACY_TOLERANCE * scale {
                    let mid = 0.5 * (s[i] + s[j]);
                    s[i] = mid * (1.0 + DEGENERACY_SPLIT);
                    s[j] = mid * (1.0 - DEGENERACY_SPLIT);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_rate_partial_fractions() {
        let m = ExpMixture::from_rates(&[1.0, 2.0, 3.0]).unwrap();
        let w = m.weights();
        assert!((w[0] - 3.0).abs() < 1e-12);
        assert!((w[1] + 3.0).abs() < 1e-12);
        assert!((w[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_scales_are_dropped() {
        let m = ExpMixture::from_scales(&[2.0, 0.0, 0.5]).unwrap();
        assert_eq!(m.len(), 2);
        let m = ExpMixture::from_scales(&[0.0, 0.0, 0.0]).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.mean(), 0.0);
        assert_eq!(m.cdf(0.0), 1.0);
    }

    #[test]
    fn single_component_is_exponential() {
        let m = ExpMixture::from_scales(&[2.0]).unwrap();
        assert_eq!(m.weights(), &[1.0]);
        assert!((m.cdf(2.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pair_is_split_symmetrically() {
        let m = ExpMixture::from_scales(&[1e-3, 1e-3, 5e-6]).unwrap();
        let r = m.rates();
        assert!((r[0] - r[1]).abs() > 1e-7 * r[0]);
        let sum: f64 = m.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!((m.mean() - (2e-3 + 5e-6)).abs() < 1e-9 * 2e-3);
    }

    #[test]
    fn triple_degeneracy_resolves() {
        let m = ExpMixture::from_scales(&[1.0, 1.0, 1.0]).unwrap();
        let r = m.rates();
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert!((r[i] - r[j]).abs() > DEGENERACY_TOLERANCE * r[i]);
            }
        }
        assert!((m.mean() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_components() {
        assert!(ExpMixture::from_scales(&[-1.0]).is_err());
        assert!(ExpMixture::from_scales(&[f64::NAN]).is_err());
        assert!(ExpMixture::from_rates(&[0.0]).is_err());
    }

    #[test]
    fn cdf_matches_numerical_integral_of_pdf() {
        let m = ExpMixture::from_scales(&[0.7, 0.2, 0.05]).unwrap();
        let x_end = 1.3;
        let n = 20_000;
        let h = x_end / n as f64;
        // Simpson's rule
        let mut acc = m.pdf(0.0) + m.pdf(x_end);
        for i in 1..n {
            let f = m.pdf(i as f64 * h);
            acc += if i % 2 == 1 { 4.0 * f } else { 2.0 * f };
        }
        let integral = acc * h / 3.0;
        assert!((integral - m.cdf(x_end)).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn weights_sum_to_one(a in 1e-6f64..1e3, b in 1e-6f64..1e3, c in 1e-6f64..1e3) {
            let m = ExpMixture::from_scales(&[a, b, c]).unwrap();
            let sum: f64 = m.weights().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn mean_is_sum_of_scales(a in 1e-4f64..1.0, b in 1e-4f64..1.0, c in 1e-4f64..1.0) {
            prop_assume!((a - b).abs() > 1e-3 * a.max(b));
            prop_assume!((a - c).abs() > 1e-3 * a.max(c));
            prop_assume!((b - c).abs() > 1e-3 * b.max(c));
            let m = ExpMixture::from_scales(&[a, b, c]).unwrap();
            prop_assert!(((m.mean() - (a + b + c)) / (a + b + c)).abs() < 1e-9);
        }
    }
}
