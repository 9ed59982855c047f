//! Deterministic pseudo-random number generation.
//!
//! Every stochastic routine in this crate draws from [`Rng`], a SplitMix64
//! generator. The mixing function is fixed here, in source, on purpose: runs
//! must be bit-for-bit reproducible across platforms, library versions, and
//! worker counts, so we do not depend on an external RNG crate whose stream
//! could change under us.
//!
//! Parallel work never shares a generator. Each task derives its own seed
//! with [`derive_seed`] from `(master seed, role, index)` and the results are
//! merged in task-index order, which makes output independent of scheduling.

/// Golden-ratio increment of the SplitMix64 sequence (2^64 / phi).
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective avalanche mix of a 64-bit word
/// (Stafford's Mix13 variant, the one used by `splitmix64.c`).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed-derivation roles. Each independent stream of randomness hangs off a
/// distinct role so that, e.g., extension sampling and solver runs never share
/// a stream even when their indices coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Role {
    /// Base-instance generation.
    Generate = 1,
    /// Extension (resolvent subset) sampling.
    Extension = 2,
    /// An individual solver run.
    SolverRun = 3,
    /// Bootstrap replicate.
    Bootstrap = 4,
    /// Monte-Carlo simulation stream.
    Simulation = 5,
    /// Anything driven directly by a CLI `--seed`.
    Cli = 6,
}

/// Derives a task seed from a master seed, a role tag, and a task index.
///
/// The derivation is `mix64(mix64(master ^ mix64(role)) ^ mix64(index ^ GAMMA))`:
/// a composition of bijections interleaved with XORs, so distinct
/// `(role, index)` pairs under one master seed collide only with the
/// negligible probability of a 64-bit birthday event.
#[inline]
pub fn derive_seed(master: u64, role: Role, index: u64) -> u64 {
    let z = mix64(master ^ mix64(role as u64));
    mix64(z ^ mix64(index ^ GOLDEN_GAMMA))
}

/// SplitMix64 generator. State advances by the golden-ratio constant and each
/// output is the avalanche mix of the new state, so the stream is a
/// counter-mode bijection of `0, 1, 2, ...` offset by the seed.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    /// Creates a generator whose stream is fully determined by `seed`.
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Next raw 64-bit output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw from `[0, 1)` with 53 random bits (the full f64 mantissa).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `(0, 1]`; handy when a logarithm follows.
    #[inline]
    pub fn next_f64_open_left(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform integer in `[0, n)` via Lemire's multiply-shift with
    /// rejection. Panics if `n == 0`.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is meaningless");
        let mut m = (self.next_u64() as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            // 2^64 mod n; products whose low word falls below this sliver
            // would make some outputs one count more likely than others.
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = (self.next_u64() as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Bernoulli draw with success probability `p` (clamped to `[0, 1]`).
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Fisher-Yates shuffle of a slice, in place.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// Standard normal draw via the Marsaglia polar method. The second value
    /// of the generated pair is discarded so the call is stateless beyond the
    /// underlying stream.
    pub fn standard_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}

/// Exact binomial sampler for a fixed `(n, p)` pair.
///
/// The pmf is tabulated once with the stable ratio recurrence and draws are
/// made by inverse transform on the cumulative table, so sampling stays exact
/// (up to f64 rounding of the table) and cheap no matter how large `n` is.
#[derive(Debug, Clone)]
pub struct BinomialSampler {
    n: u64,
    /// Cumulative probabilities `P[X <= k]` for `k = 0..=n`; empty for the
    /// degenerate p = 0 / p = 1 cases.
    cdf: Vec<f64>,
    /// Degenerate point mass (`Some(0)` for p = 0, `Some(n)` for p = 1).
    point: Option<u64>,
}

impl BinomialSampler {
    /// Builds the sampler. Panics unless `0 <= p <= 1`.
    pub fn new(n: u64, p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "binomial p must lie in [0, 1]");
        if p == 0.0 || n == 0 {
            return BinomialSampler { n, cdf: Vec::new(), point: Some(0) };
        }
        if p == 1.0 {
            return BinomialSampler { n, cdf: Vec::new(), point: Some(n) };
        }
        // pmf(k+1) = pmf(k) * (n-k)/(k+1) * p/(1-p), started at the mode to
        // avoid underflow, then normalized.
        let nf = n as f64;
        let mode = ((nf + 1.0) * p).floor().min(nf) as u64;
        let ratio = p / (1.0 - p);
        let mut pmf = vec![0.0f64; n as usize + 1];
        pmf[mode as usize] = 1.0;
        for k in mode..n {
            let k_us = k as usize;
            pmf[k_us + 1] = pmf[k_us] * ratio * (nf - k as f64) / (k as f64 + 1.0);
        }
        for k in (0..mode).rev() {
            let k_us = k as usize;
            pmf[k_us] = pmf[k_us + 1] / (ratio * (nf - k as f64) / (k as f64 + 1.0));
        }
        let total: f64 = pmf.iter().sum();
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|&q| {
                acc += q / total;
                acc
            })
            .collect();
        BinomialSampler { n, cdf, point: None }
    }

    /// Number of trials this sampler was built for.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Draws one binomial variate.
    pub fn sample(&self, rng: &mut Rng) -> u64 {
        if let Some(k) = self.point {
            return k;
        }
        let u = rng.next_f64();
        // First index with cdf[k] > u; partition_point gives it in O(log n).
        let k = self.cdf.partition_point(|&c| c <= u);
        (k as u64).min(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn mix64_is_bijective_on_samples() {
        // Spot check: distinct inputs give distinct outputs.
        let mut seen = HashSet::new();
        for i in 0..10_000u64 {
            assert!(seen.insert(mix64(i)));
        }
    }

    #[test]
    fn derived_seeds_do_not_collide() {
        // One plan's worth of tasks must all get distinct seeds.
        let master = 0xDEAD_BEEF_u64;
        let mut seen = HashSet::with_capacity(1_000_000);
        for role in [Role::Extension, Role::SolverRun] {
            for index in 0..500_000u64 {
                assert!(
                    seen.insert(derive_seed(master, role, index)),
                    "seed collision at role {role:?} index {index}"
                );
            }
        }
    }

    #[test]
    fn same_inputs_same_stream() {
        let mut a = Rng::new(derive_seed(7, Role::Simulation, 3));
        let mut b = Rng::new(derive_seed(7, Role::Simulation, 3));
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn next_f64_is_in_unit_interval() {
        let mut rng = Rng::new(1);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
            let y = rng.next_f64_open_left();
            assert!(y > 0.0 && y <= 1.0);
        }
    }

    #[test]
    fn below_is_roughly_uniform_and_in_range() {
        let mut rng = Rng::new(42);
        let n = 7u64;
        let mut counts = [0u64; 7];
        let reps = 70_000;
        for _ in 0..reps {
            let k = rng.below(n);
            assert!(k < n);
            counts[k as usize] += 1;
        }
        let expect = reps as f64 / n as f64;
        for &c in &counts {
            assert!((c as f64 - expect).abs() < 5.0 * expect.sqrt());
        }
    }

    #[test]
    fn standard_normal_moments() {
        let mut rng = Rng::new(99);
        let n = 200_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = rng.standard_normal();
            s1 += z;
            s2 += z * z;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn binomial_sampler_matches_moments() {
        let mut rng = Rng::new(5);
        let (n, p) = (1000u64, 0.3);
        let sampler = BinomialSampler::new(n, p);
        let reps = 100_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..reps {
            let k = sampler.sample(&mut rng) as f64;
            s1 += k;
            s2 += k * k;
        }
        let mean = s1 / reps as f64;
        let var = s2 / reps as f64 - mean * mean;
        let expect_mean = n as f64 * p;
        let expect_var = n as f64 * p * (1.0 - p);
        assert!((mean - expect_mean).abs() < 4.0 * (expect_var / reps as f64).sqrt());
        assert!((var - expect_var).abs() / expect_var < 0.03);
    }

    #[test]
    fn binomial_degenerate_endpoints() {
        let mut rng = Rng::new(5);
        let all = BinomialSampler::new(50, 1.0);
        let none = BinomialSampler::new(50, 0.0);
        for _ in 0..100 {
            assert_eq!(all.sample(&mut rng), 50);
            assert_eq!(none.sample(&mut rng), 0);
        }
    }
}
