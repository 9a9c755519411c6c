//! Log-gamma based combinatorics and binomial absolute deviations.

use crate::error::{Error, Result};

/// Tail mass below which binomial pmf summation stops.
pub const TAIL_MASS: f64 = 1e-12;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// `ln C(a, b)` for `0 ≤ b ≤ a`.
pub fn ln_choose(a: u64, b: u64) -> f64 {
    assert!(b <= a, "ln_choose({a}, {b}) with b > a");
    if b == 0 || b == a {
        return 0.0;
    }
    ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b)
}

/// `ln` of the number of ways to spread `m` indistinguishable edges over
/// `cells` cells, `ln C(cells + m − 1, m)`. Zero when `m == 0`.
pub fn ln_multisets(cells: u64, m: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    assert!(cells > 0, "cannot place {m} edges in zero cells");
    ln_choose(cells + m - 1, m)
}

/// Truncated Binomial(N, p) pmf with prefix sums, for repeated evaluation of
/// `E|a − X|` at many points `a`.
#[derive(Debug, Clone)]
pub struct BinomialAbsDev {
    lo: u64,
    /// `cdf[k] = P(lo ≤ X ≤ lo + k)`
    cdf: Vec<f64>,
    /// `partial_mean[k] = E[X · 1{lo ≤ X ≤ lo + k}]`
    partial_mean: Vec<f64>,
}

impl BinomialAbsDev {
    pub fn new(trials: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        if trials == 0 || p == 0.0 {
            return Ok(Self::point_mass(0));
        }
        if p == 1.0 {
            return Ok(Self::point_mass(trials));
        }
        let nf = trials as f64;
        let mode = (((nf + 1.0) * p).floor() as u64).min(trials);
        let ln_q = (-p).ln_1p();
        let ln_peak = ln_choose(trials, mode) + mode as f64 * p.ln() + (trials - mode) as f64 * ln_q;
        let peak = ln_peak.exp();
        let odds = p / (1.0 - p);

        // Walk down from the mode.
        let mut below = Vec::new();
        let mut x = mode;
        let mut term = peak;
        while x > 0 {
            let ratio = x as f64 / ((trials - x + 1) as f64 * odds);
            term *= ratio;
            x -= 1;
            below.push(term);
            if ratio < 1.0 && term * ratio / (1.0 - ratio) < 0.5 * TAIL_MASS {
                break;
            }
        }
        let lo = x;

        // Walk up from the mode.
        let mut above = Vec::new();
        let mut x = mode;
        let mut term = peak;
        while x < trials {
            let ratio = (trials - x) as f64 * odds / (x + 1) as f64;
            term *= ratio;
            x += 1;
            above.push(term);
            if ratio < 1.0 && term * ratio / (1.0 - ratio) < 0.5 * TAIL_MASS {
                break;
            }
        }

        // Renormalize: absorbs the rounding in `peak` and the dropped tails.
        let mass: f64 = below.iter().chain(&above).sum::<f64>() + peak;
        let pmf = below
            .iter()
            .rev()
            .chain(std::iter::once(&peak))
            .chain(above.iter())
            .map(|w| w / mass);
        let mut cdf = Vec::with_capacity(below.len() + above.len() + 1);
        let mut partial_mean = Vec::with_capacity(cdf.capacity());
        let (mut c, mut s) = (0.0, 0.0);
        for (k, w) in pmf.enumerate() {
            c += w;
            s += (lo + k as u64) as f64 * w;
            cdf.push(c);
            partial_mean.push(s);
        }
        Ok(Self {
            lo,
            cdf,
            partial_mean,
        })
    }

    fn point_mass(at: u64) -> Self {
        Self {
            lo: at,
            cdf: vec![1.0],
            partial_mean: vec![at as f64],
        }
    }

    /// `E|a − X|`.
    pub fn at(&self, a: u64) -> f64 {
        let mass = *self.cdf.last().unwrap();
        let mean = *self.partial_mean.last().unwrap();
        let af = a as f64;
        if a < self.lo {
            return mean - af * mass;
        }
        let k = ((a - self.lo) as usize).min(self.cdf.len() - 1);
        let (f, s) = (self.cdf[k], self.partial_mean[k]);
        (af * f - s) + ((mean - s) - af * (mass - f))
    }
}

/// `E|a − X|` for `X ~ Binomial(trials, p)`.
pub fn binomial_abs_dev(a: u64, trials: u64, p: f64) -> Result<f64> {
    Ok(BinomialAbsDev::new(trials, p)?.at(a))
}
