//! Central finite differences of order `2m` and the exact combinatorial
//! identities behind them.
//!
//! The difference is
//!
//! ```text
//! delta_m u(x, y) = sum_{k=-m}^{m} (-1)^k binom(2m, m-k) u(x + k y)
//! ```
//!
//! Weights are kept as exact integers. Every identity check in this module
//! runs in big-rational arithmetic, so a passing check has zero tolerance.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact factorial.
pub fn factorial_big(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Weights `w_k = (-1)^k binom(2m, m-k)` of the order-`2m` central difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stencil {
    m: u32,
    weights: Vec<BigInt>,
}

impl Stencil {
    pub fn new(m: u32) -> Result<Self> {
        if m < 1 {
            return Err(Error::Domain("stencil order m must be at least 1".into()));
        }
        let two_m = 2 * m as u64;
        let weights = (-(m as i64)..=m as i64)
            .map(|k| binomial(two_m, (m as i64 - k) as u64) * sign(k))
            .collect();
        Ok(Self { m, weights })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Exact weight for offset `k`, zero outside `-m..=m`.
    pub fn weight(&self, k: i64) -> BigInt {
        let m = self.m as i64;
        if k < -m || k > m {
            BigInt::zero()
        } else {
            self.weights[(k + m) as usize].clone()
        }
    }

    /// Exact weights ordered `k = -m..=m`.
    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    /// `(k, w_k)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        let m = self.m as i64;
        self.weights.iter().enumerate().map(move |(i, w)| (i as i64 - m, w))
    }

    /// Float weights for the quadrature side.
    pub fn float_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `w_0 = binom(2m, m)` as a float.
    pub fn center_weight(&self) -> f64 {
        self.weights[self.m as usize].to_f64().unwrap_or(f64::NAN)
    }

    /// `sum_k |w_k| = 4^m`.
    pub fn abs_sum(&self) -> f64 {
        self.weights.iter().map(|w| w.abs().to_f64().unwrap_or(f64::NAN)).sum()
    }

    /// Weights as `i64` for JSON output; `None` once they no longer fit.
    pub fn weights_i64(&self) -> Option<Vec<i64>> {
        self.weights.iter().map(|w| w.to_i64()).collect()
    }

    /// Evaluate `delta_m f(x, y)` on exact rationals.
    pub fn apply_exact<F: Fn(&BigRational) -> BigRational>(
        &self,
        f: F,
        x: &BigRational,
        y: &BigRational,
    ) -> BigRational {
        self.iter().fold(BigRational::zero(), |acc, (k, w)| {
            let point = x + y * BigRational::from_integer(BigInt::from(k));
            acc + f(&point) * BigRational::from_integer(w.clone())
        })
    }

    /// Evaluate `delta_m f(x, y)` in floating point with symmetric pairing
    /// `w_0 f(x) + sum_{k>0} w_k (f(x + k y) + f(x - k y))`.
    pub fn apply<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x: &[f64], y: &[f64]) -> f64 {
        let w = self.float_weights();
        let m = self.m as usize;
        let mut point = vec![0.0; x.len()];
        let mut acc = w[m] * f(x);
        for k in 1..=m {
            let kf = k as f64;
            for (p, (&xi, &yi)) in point.iter_mut().zip(x.iter().zip(y)) {
                *p = xi + kf * yi;
            }
            let plus = f(&point);
            for (p, (&xi, &yi)) in point.iter_mut().zip(x.iter().zip(y)) {
                *p = xi - kf * yi;
            }
            let minus = f(&point);
            acc += w[m + k] * (plus + minus);
        }
        acc
    }
}

/// `delta_m f(x, y)` for an arbitrary closure on points of `R^N`.
pub fn apply_delta<F: FnMut(&[f64]) -> f64>(f: F, x: &[f64], y: &[f64], stencil: &Stencil) -> f64 {
    stencil.apply(f, x, y)
}

/// Exact moment `sum_{k=-m}^m w_k k^p`.
pub fn moment_sum(m: u32, p: u32) -> BigInt {
    let stencil = Stencil::new(m.max(1)).expect("m >= 1");
    stencil
        .iter()
        .fold(BigInt::zero(), |acc, (k, w)| acc + w * BigInt::from(k).pow(p))
}

/// `sum_{k=1}^m (-1)^{k+1} binom(2m, m-k)`, which equals `binom(2m, m) / 2`.
pub fn one_sided_sum(m: u32) -> Result<BigRational> {
    if m < 1 {
        return Err(Error::Domain("one_sided_sum needs m >= 1".into()));
    }
    let two_m = 2 * m as u64;
    let sum = (1..=m as i64).fold(BigInt::zero(), |acc, k| {
        acc - binomial(two_m, (m as i64 - k) as u64) * sign(k)
    });
    Ok(BigRational::from_integer(sum))
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Coefficients `a_{k,n} = 2 (-1)^{k-n} k^{2n} / ((n+k)! (n-k)!)`, `k = 1..=n`,
/// of `rho^{n-1} = sum_k a_{k,n} prod_{j != k} (rho + j^2)`.
pub fn partial_fraction_a(n: u32) -> Result<Vec<BigRational>> {
    if n < 1 {
        return Err(Error::Domain("partial_fraction_a needs n >= 1".into()));
    }
    let n64 = n as u64;
    Ok((1..=n64)
        .map(|k| {
            let num = BigInt::from(2 * sign(k as i64 - n as i64)) * BigInt::from(k).pow(2 * n);
            let den = factorial_big(n64 + k) * factorial_big(n64 - k);
            BigRational::new(num, den)
        })
        .collect())
}

/// Coefficients `b_{j,k} = 1 / prod_{i in J(k), i != j} (i^2 - j^2)` of
/// `1 / prod_{j in J(k)} (rho + j^2) = sum_j b_{j,k} / (rho + j^2)`,
/// where `J(k) = J u {k}`.
pub fn partial_fraction_b(set: &[u64], k: u64) -> Result<BTreeMap<u64, BigRational>> {
    let mut all: Vec<u64> = set.to_vec();
    all.push(k);
    let mut seen = std::collections::BTreeSet::new();
    for &j in &all {
        if j == 0 {
            return Err(Error::Domain("partial fraction indices must be positive".into()));
        }
        if !seen.insert(j) {
            return Err(Error::DuplicateIndex(j));
        }
    }
    Ok(all
        .iter()
        .map(|&j| {
            let den = all
                .iter()
                .filter(|&&i| i != j)
                .fold(BigInt::one(), |acc, &i| {
                    acc * (BigInt::from(i * i) - BigInt::from(j * j))
                });
            (j, BigRational::new(BigInt::one(), den))
        })
        .collect())
}

/// Right-hand side of the `j^{2n-1}` identity for `j > n`:
/// `2 sum_{k=1}^n (-1)^{k-n-1} (j+n)! k^{2n} / ((n+k)! (n-k)! (k^2 - j^2) (j-n-1)!)`.
pub fn odd_power_expansion(n: u32, j: u64) -> Result<BigRational> {
    let n64 = n as u64;
    if n < 1 || j <= n64 {
        return Err(Error::Domain(format!("need 1 <= n < j, got n = {n}, j = {j}")));
    }
    let jn = factorial_big(j + n64);
    let jn1 = factorial_big(j - n64 - 1);
    let sum = (1..=n64).fold(BigRational::zero(), |acc, k| {
        let num = BigInt::from(sign(k as i64 - n as i64 - 1)) * &jn * BigInt::from(k).pow(2 * n);
        let den = factorial_big(n64 + k)
            * factorial_big(n64 - k)
            * (BigInt::from(k * k) - BigInt::from(j * j))
            * &jn1;
        acc + BigRational::new(num, den)
    });
    Ok(sum * BigRational::from_integer(BigInt::from(2)))
}

/// Probe points for polynomial identities in `rho`. None of them is a
/// negative integer, so no factor `rho + j^2` vanishes.
pub fn rational_probes(count: usize) -> Vec<BigRational> {
    const BASE: [(i64, i64); 12] = [
        (-1, 3),
        (5, 7),
        (7, 5),
        (1, 2),
        (-11, 13),
        (17, 19),
        (-23, 29),
        (31, 37),
        (41, 43),
        (-47, 53),
        (59, 61),
        (67, 71),
    ];
    (0..count)
        .map(|i| {
            let (n, d) = BASE[i % BASE.len()];
            // shift repeats so probes stay distinct
            rational(n, d) + BigRational::from_integer(BigInt::from((i / BASE.len()) as i64 * 3))
        })
        .collect()
}

/// Outcome of one exact identity check.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Check `sum_k a_{k,n} prod_{j != k}(rho + j^2) = rho^{n-1}` at `probes`.
pub fn check_partial_fraction_a(n: u32, probes: &[BigRational]) -> Result<bool> {
    let a = partial_fraction_a(n)?;
    Ok(probes.iter().all(|rho| {
        let lhs = a.iter().enumerate().fold(BigRational::zero(), |acc, (idx, coeff)| {
            let k = idx as u64 + 1;
            let prod = (1..=n as u64).filter(|&j| j != k).fold(BigRational::one(), |p, j| {
                p * (rho + BigRational::from_integer(BigInt::from(j * j)))
            });
            acc + coeff * prod
        });
        let rhs = num_traits::pow(rho.clone(), n as usize - 1);
        lhs == rhs
    }))
}

/// Check the `b_{j,k}` decomposition at `probes`.
pub fn check_partial_fraction_b(set: &[u64], k: u64, probes: &[BigRational]) -> Result<bool> {
    let b = partial_fraction_b(set, k)?;
    Ok(probes.iter().all(|rho| {
        let lhs = b.keys().fold(BigRational::one(), |acc, &j| {
            acc * (rho + BigRational::from_integer(BigInt::from(j * j)))
        });
        let lhs = lhs.recip();
        let rhs = b.iter().fold(BigRational::zero(), |acc, (&j, coeff)| {
            acc + coeff / (rho + BigRational::from_integer(BigInt::from(j * j)))
        });
        lhs == rhs
    }))
}

/// Exact integer-coefficient polynomial, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<BigInt>);

impl Polynomial {
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }
}

/// Seeded random polynomials with coefficients in `[-20, 20]` for the
/// annihilation and recursion checks.
pub fn sample_polynomials(degree: usize, count: usize, seed: u64) -> Vec<Polynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Polynomial((0..=degree).map(|_| BigInt::from(rng.gen_range(-20i64..=20))).collect()))
        .collect()
}

/// Run the complete exact identity suite with the given bounds:
/// moments up to `max_m`, partial fractions up to `max_n`, the odd-power
/// identity for `n <= max_hc_n`, `j <= max_hc_j`, and the difference
/// recursion up to `max_rec_m`.
pub fn identity_suite() -> Vec<IdentityCheck> {
    identity_suite_with(8, 5, 4, 8, 6)
}

pub fn identity_suite_with(
    max_m: u32,
    max_n: u32,
    max_hc_n: u32,
    max_hc_j: u64,
    max_rec_m: u32,
) -> Vec<IdentityCheck> {
    let mut out = Vec::new();

    // moment identities
    let mut ok = true;
    let mut detail = String::new();
    for m in 1..=max_m {
        for n in 0..m {
            if !moment_sum(m, 2 * n).is_zero() {
                ok = false;
                detail = format!("even moment 2n = {} nonzero for m = {m}", 2 * n);
            }
        }
        for p in (1..=2 * m + 1).step_by(2) {
            if !moment_sum(m, p).is_zero() {
                ok = false;
                detail = format!("odd moment p = {p} nonzero for m = {m}");
            }
        }
        let top = factorial_big(2 * m as u64) * sign(m as i64);
        if moment_sum(m, 2 * m) != top {
            ok = false;
            detail = format!("top moment wrong for m = {m}");
        }
    }
    out.push(IdentityCheck::new("moment_sums", ok, detail));

    // one-sided binomial sum
    let ok = (1..=max_m.max(10)).all(|m| {
        one_sided_sum(m).map_or(false, |v| {
            v == BigRational::new(binomial(2 * m as u64, m as u64), BigInt::from(2))
        })
    });
    out.push(IdentityCheck::new("one_sided_binomial_sum", ok, ""));

    // a-coefficients
    let mut ok = true;
    for n in 1..=max_n {
        let probes = rational_probes((n as usize).max(3));
        if !check_partial_fraction_a(n, &probes).unwrap_or(false) {
            ok = false;
        }
    }
    out.push(IdentityCheck::new("partial_fraction_a", ok, format!("n <= {max_n}")));

    // b-coefficients over every subset J of {1..=max_n} and k outside J
    let mut ok = true;
    let mut checked = 0usize;
    let universe: Vec<u64> = (1..=max_n as u64 + 1).collect();
    for mask in 0u32..(1 << universe.len()) {
        let set: Vec<u64> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect();
        if set.len() > max_n as usize {
            continue;
        }
        for &k in &universe {
            if set.contains(&k) {
                continue;
            }
            let probes = rational_probes((set.len() + 2).max(3));
            checked += 1;
            if !check_partial_fraction_b(&set, k, &probes).unwrap_or(false) {
                ok = false;
            }
        }
    }
    out.push(IdentityCheck::new("partial_fraction_b", ok, format!("{checked} index sets")));

    // odd-power identity
    let ok = (1..=max_hc_n).all(|n| {
        ((n as u64 + 1)..=max_hc_j).all(|j| {
            odd_power_expansion(n, j).map_or(false, |v| {
                v == BigRational::from_integer(BigInt::from(j).pow(2 * n - 1))
            })
        })
    });
    out.push(IdentityCheck::new("odd_power_expansion", ok, format!("n <= {max_hc_n}, j <= {max_hc_j}")));

    // polynomials of degree <= 2m - 1 are annihilated
    let xs = [rational(1, 3), rational(-7, 4), rational(5, 2)];
    let ys = [rational(2, 5), rational(-3, 7), rational(1, 1)];
    let ok = (1..=max_m).all(|m| {
        let stencil = Stencil::new(m).expect("m >= 1");
        sample_polynomials(2 * m as usize - 1, 4, m as u64).iter().all(|p| {
            xs.iter().zip(&ys).all(|(x, y)| stencil.apply_exact(|t| p.eval(t), x, y).is_zero())
        })
    });
    out.push(IdentityCheck::new("polynomial_annihilation", ok, format!("m <= {max_m}")));

    // delta_{m+1} u = delta_m [delta_1 u]
    let ok = (1..=max_rec_m).all(|m| {
        let outer = Stencil::new(m).expect("m >= 1");
        let inner = Stencil::new(1).expect("m >= 1");
        let next = Stencil::new(m + 1).expect("m >= 1");
        sample_polynomials(2 * m as usize + 4, 3, 100 + m as u64).iter().all(|p| {
            xs.iter().zip(&ys).all(|(x, y)| {
                let composed =
                    outer.apply_exact(|t| inner.apply_exact(|z| p.eval(z), t, y), x, y);
                composed == next.apply_exact(|t| p.eval(t), x, y)
            })
        })
    });
    out.push(IdentityCheck::new("difference_recursion", ok, format!("m <= {max_rec_m}")));

    // integer form of the leading moment: sum_k w_k k^{2m} / (2m)! = (-1)^m
    let ok = (1..=max_m.max(10)).all(|m| {
        let (q, r) = moment_sum(m, 2 * m).div_rem(&factorial_big(2 * m as u64));
        r.is_zero() && q == BigInt::from(sign(m as i64))
    });
    out.push(IdentityCheck::new("leading_moment", ok, ""));

    out
}
