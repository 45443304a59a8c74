//! The normalized determinant `Delta_x(A) = exp <(log A) x, x>` and its
//! extension to positive semidefinite operators.
//!
//! In finite dimensions `Delta_x(A) = prod_j lambda_j^{w_j}` with spectral
//! weights `w_j = |<x, v_j>|^2`, i.e. a weighted geometric mean of the
//! eigenvalues attached to the vector state `x`. On a kernel-supported state
//! the log-mean is `-inf` and `Delta_x(A) = 0`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling;
use crate::spectra::{
    eigh, geometric_mean, hadamard, log_cutoff, FunctionTag, HermitianMatrix, SpectralBounds, SpectralDecomposition,
    UnitVector, TAU_PSD,
};

/// Kernel weight above which an eigenvalue at or below the invertibility
/// cutoff forces `Delta_x(A) = 0`. Smaller weights are treated as rounding
/// noise and dropped from the sum.
pub const W_TOL: f64 = 1e-14;

/// `<(log A) x, x>` as an extended real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedLogMean {
    Finite(f64),
    NegInfinity,
}

impl ExtendedLogMean {
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(v) => v,
            Self::NegInfinity => f64::NEG_INFINITY,
        }
    }

    /// `exp` with `exp(-inf) = 0`.
    pub fn exp(self) -> f64 {
        match self {
            Self::Finite(v) => v.exp(),
            Self::NegInfinity => 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

/// A PSD operator with its eigen-system cached, for evaluating many vector
/// states against the same `A`.
#[derive(Clone, Debug)]
pub struct DeltaEvaluator {
    decomp: SpectralDecomposition,
    cutoff: f64,
}

impl DeltaEvaluator {
    pub fn new(a: &HermitianMatrix) -> Result<Self> {
        Self::from_decomposition(eigh(a)?)
    }

    pub fn from_decomposition(decomp: SpectralDecomposition) -> Result<Self> {
        let scale = decomp.spectral_norm().max(1.0);
        if decomp.min() < -TAU_PSD * scale {
            return Err(Error::NotPositive {
                lambda_min: decomp.min(),
            });
        }
        let cutoff = log_cutoff(decomp.spectral_norm());
        Ok(Self { decomp, cutoff })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    pub fn dim(&self) -> usize {
        self.decomp.dim()
    }

    /// Invertibility cutoff `EPS_LOG * max(1, ||A||)`.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.decomp.min() > self.cutoff
    }

    fn weights(&self, x: &UnitVector) -> Result<Vec<f64>> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(self.decomp.weights(x.as_vector()))
    }

    pub fn log_mean(&self, x: &UnitVector) -> Result<ExtendedLogMean> {
        let w = self.weights(x)?;
        let mut acc = 0.0;
        for (&lambda, &wj) in self.decomp.eigenvalues.iter().zip(&w) {
            if lambda <= self.cutoff {
                if wj > W_TOL {
                    return Ok(ExtendedLogMean::NegInfinity);
                }
                continue;
            }
            acc += wj * lambda.ln();
        }
        Ok(ExtendedLogMean::Finite(acc))
    }

    pub fn delta(&self, x: &UnitVector) -> Result<f64> {
        Ok(self.log_mean(x)?.exp())
    }

    /// `<A x, x>` through the spectral weights.
    pub fn arithmetic_mean(&self, x: &UnitVector) -> Result<f64> {
        let w = self.weights(x)?;
        Ok(self.decomp.eigenvalues.iter().zip(&w).map(|(l, w)| l.max(0.0) * w).sum())
    }

    /// `<A^p x, x>^{1/p}`.
    pub fn p_mean(&self, x: &UnitVector, p: f64) -> Result<f64> {
        if p == 0.0 || !p.is_finite() {
            return Err(Error::Domain(format!("p must be a nonzero finite real, got {p}")));
        }
        if p < 0.0 && !self.is_strictly_positive() {
            return Err(Error::NotInvertible {
                lambda_min: self.decomp.min(),
                cutoff: self.cutoff,
            });
        }
        let w = self.weights(x)?;
        let s: f64 = self
            .decomp
            .eigenvalues
            .iter()
            .zip(&w)
            .map(|(l, w)| w * l.max(0.0).powf(p))
            .sum();
        Ok(s.powf(1.0 / p))
    }
}

pub fn log_mean(a: &HermitianMatrix, x: &UnitVector) -> Result<ExtendedLogMean> {
    DeltaEvaluator::new(a)?.log_mean(x)
}

/// The normalized determinant `Delta_x(A)`; lies in `[0, ||A||]`.
pub fn delta(a: &HermitianMatrix, x: &UnitVector) -> Result<f64> {
    DeltaEvaluator::new(a)?.delta(x)
}

pub fn p_mean(a: &HermitianMatrix, x: &UnitVector, p: f64) -> Result<f64> {
    DeltaEvaluator::new(a)?.p_mean(x, p)
}

/// `inf_x Delta_x(A) = inf sigma(A)`.
pub fn delta_inf(a: &HermitianMatrix) -> Result<f64> {
    let ev = DeltaEvaluator::new(a)?;
    Ok(ev.decomp.min().max(0.0))
}

/// `sup_x Delta_x(A) = sup sigma(A)`.
pub fn delta_sup(a: &HermitianMatrix) -> Result<f64> {
    let ev = DeltaEvaluator::new(a)?;
    Ok(ev.decomp.max().max(0.0))
}

/// Monte-Carlo certificate for the spectral-endpoint identities.
#[derive(Clone, Debug)]
pub struct EndpointCertificate {
    pub closed_inf: f64,
    pub closed_sup: f64,
    pub sampled_inf: f64,
    pub sampled_sup: f64,
    pub samples: usize,
    pub tolerance: f64,
}

impl EndpointCertificate {
    /// Sampled values may never beat the closed-form endpoints.
    pub fn brackets(&self) -> bool {
        self.sampled_inf >= self.closed_inf - self.tolerance
            && self.sampled_sup <= self.closed_sup + self.tolerance
    }
}

pub fn endpoint_certificate<R: Rng + ?Sized>(
    a: &HermitianMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<EndpointCertificate> {
    let ev = DeltaEvaluator::new(a)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = sampling::random_unit_vector(a.dim(), rng);
        let d = ev.delta(&x)?;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(EndpointCertificate {
        closed_inf: ev.decomp.min().max(0.0),
        closed_sup: ev.decomp.max().max(0.0),
        sampled_inf: lo,
        sampled_sup: hi,
        samples,
        tolerance: 1e-10 * ev.decomp.spectral_norm().max(1.0),
    })
}

/// The six equivalent degeneracy conditions, each evaluated numerically.
#[derive(Clone, Debug)]
pub struct DegeneracyReport {
    /// (1) `inf_x Delta_x(A)`, evaluated at the minimizing eigenvector.
    pub inf_delta: f64,
    /// (2) `inf_x <Ax, x>`.
    pub inf_rayleigh: f64,
    /// (3) `<A v, v>` along the minimizing eigenvector `v`.
    pub witness_rayleigh: f64,
    /// (4) `||A v||` along the same witness.
    pub witness_image_norm: f64,
    /// (5) smallest eigenvalue at or below the cutoff.
    pub zero_in_spectrum: bool,
    /// (6) the bounded inverse could not be formed.
    pub not_invertible: bool,
    pub cutoff: f64,
    /// Per-condition verdicts, in order (1)..(6); `true` means "degenerate".
    pub conditions: [bool; 6],
}

impl DegeneracyReport {
    pub fn consistent(&self) -> bool {
        self.conditions.iter().all(|&c| c == self.conditions[0])
    }

    pub fn degenerate(&self) -> bool {
        self.conditions[0]
    }
}

pub fn degeneracy_report(a: &HermitianMatrix) -> Result<DegeneracyReport> {
    let ev = DeltaEvaluator::new(a)?;
    let cutoff = ev.cutoff;
    let d = ev.decomposition();
    let v = d.min_vector();
    let inf_delta = ev.delta(&v)?;
    let inf_rayleigh = d.min();
    let witness_rayleigh = a.quad_form(v.as_vector());
    let witness_image_norm = a.apply(v.as_vector()).norm();
    let zero_in_spectrum = d.eigenvalues.iter().any(|&l| l <= cutoff);
    let not_invertible = crate::spectra::fun_calc_decomposed(d, FunctionTag::Power(-1.0)).is_err();
    let conditions = [
        inf_delta <= cutoff,
        inf_rayleigh <= cutoff,
        witness_rayleigh <= cutoff,
        witness_image_norm <= cutoff,
        zero_in_spectrum,
        not_invertible,
    ];
    Ok(DegeneracyReport {
        inf_delta,
        inf_rayleigh,
        witness_rayleigh,
        witness_image_norm,
        zero_in_spectrum,
        not_invertible,
        cutoff,
        conditions,
    })
}

/// Variational characterization over the commutant: sampled infimum of
/// `<ABx, x>` over `B >= 0` commuting with `A`, normalized to `Delta_x(B) = 1`.
#[derive(Clone, Debug)]
pub struct CommutantReport {
    pub delta: f64,
    pub sampled_inf: f64,
    pub trials: usize,
    /// Closed-form minimizer `B* = Delta_x(A) A^{-1}`.
    pub witness: HermitianMatrix,
    /// `<A B* x, x>`, computed by explicit matrix products.
    pub witness_value: f64,
    /// `Delta_x(B*)`, which should be 1.
    pub witness_delta: f64,
}

impl CommutantReport {
    pub fn lower_bound_holds(&self, tol: f64) -> bool {
        self.sampled_inf >= self.delta - tol
    }
}

pub fn commutant_variational<R: Rng + ?Sized>(
    a: &HermitianMatrix,
    x: &UnitVector,
    trials: usize,
    rng: &mut R,
) -> Result<CommutantReport> {
    let ev = DeltaEvaluator::new(a)?;
    if !ev.is_strictly_positive() {
        return Err(Error::NotInvertible {
            lambda_min: ev.decomp.min(),
            cutoff: ev.cutoff,
        });
    }
    let delta = ev.delta(x)?;
    let d = ev.decomposition();
    let w = d.weights(x.as_vector());
    let logs: Vec<f64> = d.eigenvalues.iter().map(|l| l.ln()).collect();
    let (lo, hi) = (logs[0], logs[logs.len() - 1]);
    let span = (hi - lo).max(1e-12);

    let mut sampled_inf = f64::INFINITY;
    for _ in 0..trials {
        // B = g(A) with log g a random cubic in the normalized log-spectrum,
        // so B is a function of A even on repeated eigenvalues.
        let coeffs: Vec<f64> = (0..4).map(|k| sampling::uniform(-2.0, 2.0, rng) / (1 + k) as f64).collect();
        // bias towards the optimum g(l) = 1/l half of the time
        let toward_inverse = rng.random::<bool>();
        let log_b: Vec<f64> = logs
            .iter()
            .map(|&l| {
                let s = 2.0 * (l - lo) / span - 1.0;
                let poly = coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c);
                if toward_inverse {
                    -l + 0.1 * poly
                } else {
                    poly
                }
            })
            .collect();
        let norm: f64 = log_b.iter().zip(&w).map(|(b, w)| b * w).sum();
        let value: f64 = d
            .eigenvalues
            .iter()
            .zip(&log_b)
            .zip(&w)
            .map(|((l, b), w)| w * l * (b - norm).exp())
            .sum();
        sampled_inf = sampled_inf.min(value);
    }

    let witness = d.map(|l| delta / l);
    let prod = a.matmul(&witness)?;
    let xv = x.as_vector();
    let witness_value = xv.dotc(&(prod * xv)).re;
    let witness_delta = DeltaEvaluator::new(&witness)?.delta(x)?;
    Ok(CommutantReport {
        delta,
        sampled_inf: sampled_inf.min(witness_value),
        trials,
        witness,
        witness_value,
        witness_delta,
    })
}

/// `lower <= value <= upper` for one instance of a two-sided bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl Sandwich {
    /// Both sides hold within `rel_tol` relative to the value.
    pub fn holds(&self, rel_tol: f64) -> bool {
        let tol = rel_tol * self.value.abs().max(1.0);
        self.lower <= self.value + tol && self.value <= self.upper + tol
    }

    /// Smallest of `value - lower` and `upper - value`.
    pub fn margin(&self) -> f64 {
        (self.value - self.lower).min(self.upper - self.value)
    }
}

/// The chain `1 <= K^{1/2 - t} <= Delta_x(A) / (m^{(M-a)/(M-m)} M^{(a-m)/(M-m)}) <= K^{1/2 + t} <= K`
/// with `a = <Ax, x>`, `t = <|A - (m+M)/2|x, x> / (M - m)` and `K = K(M/m)`,
/// returned as its five terms.
pub fn dragomir_chain(a: &HermitianMatrix, x: &UnitVector) -> Result<[f64; 5]> {
    let ev = DeltaEvaluator::new(a)?;
    let d = ev.decomposition();
    let (m, big_m) = (d.min(), d.max());
    if !(m > ev.cutoff) {
        return Err(Error::NotInvertible { lambda_min: m, cutoff: ev.cutoff });
    }
    if big_m - m <= 1e-12 * big_m {
        return Ok([1.0; 5]);
    }
    let w = ev.weights(x)?;
    let mid = 0.5 * (m + big_m);
    let rayleigh: f64 = d.eigenvalues.iter().zip(&w).map(|(l, w)| l * w).sum();
    let abs_dev: f64 = d.eigenvalues.iter().zip(&w).map(|(l, w)| (l - mid).abs() * w).sum();
    let t = abs_dev / (big_m - m);
    let k = crate::orders::kantorovich(big_m / m)?;
    let s = (rayleigh - m) / (big_m - m);
    let log_interp = (1.0 - s) * m.ln() + s * big_m.ln();
    let ratio = (ev.log_mean(x)?.value() - log_interp).exp();
    Ok([1.0, k.powf(0.5 - t), ratio, k.powf(0.5 + t), k])
}

/// `Delta_x(A o I) Delta_x(B o I) / (S(h1) S(h2)) <= Delta_x(A o B) <= S(h1 h2) Delta_x(A o I) Delta_x(B o I)`
/// with `h1`, `h2` the condition numbers of `A` and `B`.
pub fn oppenheim_bounds(a: &HermitianMatrix, b: &HermitianMatrix, x: &UnitVector) -> Result<Sandwich> {
    use crate::orders::specht;
    let h1 = SpectralBounds::of(a)?.ratio();
    let h2 = SpectralBounds::of(b)?.ratio();
    let eye = HermitianMatrix::identity(a.dim());
    let base = delta(&hadamard(a, &eye)?, x)? * delta(&hadamard(b, &eye)?, x)?;
    Ok(Sandwich {
        lower: base / (specht(h1)? * specht(h2)?),
        value: delta(&hadamard(a, b)?, x)?,
        upper: specht(h1 * h2)? * base,
    })
}

/// `K(h^2, alpha) / S(h) <= Delta_x(A #_alpha B) / (Delta_x(A)^{1-alpha} Delta_x(B)^alpha) <= S(h)`
/// with `h = M/m` for common bounds `mI <= A, B <= MI`.
pub fn geometric_mean_bounds(a: &HermitianMatrix, b: &HermitianMatrix, alpha: f64, x: &UnitVector) -> Result<Sandwich> {
    use crate::orders::{gen_kantorovich, specht};
    let ba = SpectralBounds::of(a)?;
    let bb = SpectralBounds::of(b)?;
    let h = ba.upper().max(bb.upper()) / ba.lower().min(bb.lower());
    let g = geometric_mean(a, b, alpha)?;
    let log_ratio = log_mean(&g, x)?.value() - (1.0 - alpha) * log_mean(a, x)?.value() - alpha * log_mean(b, x)?.value();
    let s = specht(h)?;
    Ok(Sandwich {
        lower: gen_kantorovich(h * h, alpha)? / s,
        value: log_ratio.exp(),
        upper: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_positive, random_unit_vector, seeded};

    fn half() -> UnitVector {
        UnitVector::from_real(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn log_mean_examples() {
        let mut rng = seeded(1);
        let x = random_unit_vector(4, &mut rng);
        let lm = log_mean(&HermitianMatrix::identity(4), &x).unwrap();
        assert!(lm.value().abs() < 1e-15);
        let e1 = UnitVector::basis(2, 0);
        assert_eq!(log_mean(&HermitianMatrix::diag(&[0.0, 4.0]), &e1).unwrap(), ExtendedLogMean::NegInfinity);
        let lm = log_mean(&HermitianMatrix::diag(&[1.0, 4.0]), &half()).unwrap();
        assert!((lm.value() - 4f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        let mut rng = seeded(2);
        for _ in 0..10 {
            let x = random_unit_vector(3, &mut rng);
            assert!((delta(&HermitianMatrix::scaled_identity(3, 3.0), &x).unwrap() - 3.0).abs() < 1e-12);
        }
        let a = HermitianMatrix::diag(&[1.0, 4.0]);
        assert!((delta(&a, &UnitVector::basis(2, 0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((delta(&a, &half()).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(delta(&HermitianMatrix::diag(&[0.0, 4.0]), &half()).unwrap(), 0.0);
    }

    #[test]
    fn kernel_weight_rule() {
        // weight on the kernel below W_TOL is dropped, above it forces zero
        let a = HermitianMatrix::diag(&[0.0, 4.0]);
        let tiny = UnitVector::from_real(&[1e-8, 1.0]).unwrap();
        assert!((delta(&a, &tiny).unwrap() - 4.0).abs() < 1e-12);
        let small = UnitVector::from_real(&[1e-6, 1.0]).unwrap();
        assert_eq!(delta(&a, &small).unwrap(), 0.0);
    }

    #[test]
    fn rejects_indefinite() {
        let a = HermitianMatrix::diag(&[-1.0, 1.0]);
        assert!(matches!(delta(&a, &half()), Err(Error::NotPositive { .. })));
        assert!(matches!(
            delta(&HermitianMatrix::identity(3), &half()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn p_mean_examples() {
        let a = HermitianMatrix::diag(&[1.0, 4.0]);
        assert!((p_mean(&a, &half(), 1.0).unwrap() - 2.5).abs() < 1e-14);
        // <A^{-1} x, x> = 5/8
        assert!((p_mean(&a, &half(), -1.0).unwrap() - 1.6).abs() < 1e-14);
        assert!((p_mean(&HermitianMatrix::identity(2), &half(), 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(p_mean(&a, &half(), 0.0).is_err());
        assert!(p_mean(&HermitianMatrix::diag(&[0.0, 1.0]), &half(), -1.0).is_err());
    }

    #[test]
    fn endpoints() {
        let a = HermitianMatrix::diag(&[1.0, 0.5, 1.0 / 3.0, 0.25, 0.2]);
        assert!((delta_inf(&a).unwrap() - 0.2).abs() < 1e-15);
        assert!((delta_sup(&a).unwrap() - 1.0).abs() < 1e-15);
        let i = HermitianMatrix::identity(3);
        assert!((delta_inf(&i).unwrap() - 1.0).abs() < 1e-15);
        assert!((delta_sup(&i).unwrap() - 1.0).abs() < 1e-15);
        let k = HermitianMatrix::diag(&[0.0, 4.0]);
        assert_eq!(delta_inf(&k).unwrap(), 0.0);
        assert_eq!(delta_sup(&k).unwrap(), 4.0);
        let mut rng = seeded(4);
        for m in [a, i, k] {
            assert!(endpoint_certificate(&m, 500, &mut rng).unwrap().brackets());
        }
    }

    #[test]
    fn degeneracy_examples() {
        let r = degeneracy_report(&HermitianMatrix::diag(&[0.0, 1.0])).unwrap();
        assert!(r.consistent() && r.degenerate());
        let r = degeneracy_report(&HermitianMatrix::identity(3)).unwrap();
        assert!(r.consistent() && !r.degenerate());
        let r = degeneracy_report(&HermitianMatrix::diag(&[1e-13, 1.0])).unwrap();
        assert!(r.consistent() && r.degenerate());
        let r = degeneracy_report(&HermitianMatrix::diag(&[1e-6, 1.0])).unwrap();
        assert!(r.consistent() && !r.degenerate());
    }

    #[test]
    fn commutant_examples() {
        let mut rng = seeded(5);
        let i = HermitianMatrix::identity(3);
        let x = random_unit_vector(3, &mut rng);
        let r = commutant_variational(&i, &x, 50, &mut rng).unwrap();
        assert!((r.sampled_inf - 1.0).abs() < 1e-12);
        for _ in 0..10 {
            let a = crate::sampling::random_positive_diagonal(5, 1e3, &mut rng);
            let x = random_unit_vector(5, &mut rng);
            let r = commutant_variational(&a, &x, 500, &mut rng).unwrap();
            let scale = a.scale_hint();
            assert!(r.lower_bound_holds(1e-9 * scale));
            assert!((r.witness_value - r.delta).abs() < 1e-10 * scale);
            assert!((r.witness_delta - 1.0).abs() < 1e-10);
        }
        let a = random_positive(4, 1e2, &mut rng);
        let x = random_unit_vector(4, &mut rng);
        let r = commutant_variational(&a, &x, 200, &mut rng).unwrap();
        assert!(r.lower_bound_holds(1e-9 * a.scale_hint()));
        assert!(commutant_variational(&HermitianMatrix::diag(&[0.0, 1.0]), &half(), 5, &mut rng).is_err());
    }

    #[test]
    fn bound_helpers_on_examples() {
        let a = HermitianMatrix::diag(&[1.0, 4.0]);
        let chain = dragomir_chain(&a, &half()).unwrap();
        assert!(chain.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        // x = (1,1)/sqrt 2: <Ax,x> = 5/2 is the midpoint, so t = 1/2 and the ratio is 2/(1^{1/2} 4^{1/2}) = 1
        assert!((chain[2] - 1.0).abs() < 1e-14);
        assert!((chain[1] - 1.0).abs() < 1e-14);
        assert!((chain[3] - 25.0 / 16.0).abs() < 1e-14);
        let i = HermitianMatrix::identity(3);
        let x = UnitVector::basis(3, 1);
        assert_eq!(dragomir_chain(&i, &x).unwrap(), [1.0; 5]);
        let opp = oppenheim_bounds(&i, &i, &x).unwrap();
        assert!((opp.value - 1.0).abs() < 1e-14 && opp.holds(1e-12));
        let b = HermitianMatrix::diag(&[4.0, 1.0]);
        let gm = geometric_mean_bounds(&a, &b, 0.5, &half()).unwrap();
        assert!((gm.value - 1.0).abs() < 1e-12 && gm.holds(1e-12));
    }
}
