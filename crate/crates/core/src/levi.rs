//! Plurisubharmonic test functions on truncated sequence spaces, their Levi
//! forms `D'D''u(z)`, a finite-difference oracle for those forms, and the
//! determinant density `FSD(u)(z) = inf sigma(D'D''u(z))`.
//!
//! The Levi form is normalized so that `<L h, h> = (D^2 u(h, h) + D^2 u(ih, ih)) / 4`;
//! with this convention `D'D''||z||^2 = I`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fsdet::DeltaEvaluator;
use crate::sampling::{self, seeded};
use crate::spectra::{c, eigh, CVector, HermitianMatrix, SpectralBounds, UnitVector, C64, TAU_PSD};

/// Scalar profile `Phi` for `u(z) = Phi(<Az, z>)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiProfile {
    Linear,
    Log1p,
    Square,
    Exp,
    Arctan,
}

impl PhiProfile {
    pub fn value(self, t: f64) -> f64 {
        match self {
            Self::Linear => t,
            Self::Log1p => t.ln_1p(),
            Self::Square => t * t,
            Self::Exp => t.exp(),
            Self::Arctan => t.atan(),
        }
    }

    pub fn d1(self, t: f64) -> f64 {
        match self {
            Self::Linear => 1.0,
            Self::Log1p => 1.0 / (1.0 + t),
            Self::Square => 2.0 * t,
            Self::Exp => t.exp(),
            Self::Arctan => 1.0 / (1.0 + t * t),
        }
    }

    pub fn d2(self, t: f64) -> f64 {
        match self {
            Self::Linear => 0.0,
            Self::Log1p => -1.0 / (1.0 + t).powi(2),
            Self::Square => 2.0,
            Self::Exp => t.exp(),
            Self::Arctan => -2.0 * t / (1.0 + t * t).powi(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Log1p => "log1p",
            Self::Square => "square",
            Self::Exp => "exp",
            Self::Arctan => "arctan",
        }
    }
}

const PHI_GRID: usize = 1000;

fn grid(hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| hi * k as f64 / n as f64)
}

/// Smoothstep `s(x) = 6x^5 - 15x^4 + 10x^3` shifted to `[1, 2]`.
pub fn eta(t: f64) -> f64 {
    let x = (t - 1.0).clamp(0.0, 1.0);
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

pub fn eta_prime(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        return 0.0;
    }
    let x = t - 1.0;
    30.0 * x * x * (x - 1.0) * (x - 1.0)
}

/// `chi(t) = int_0^t eta`.
pub fn chi(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else if t >= 2.0 {
        t - 1.5
    } else {
        let x = t - 1.0;
        x.powi(4) * (2.5 + x * (-3.0 + x))
    }
}

/// Diagonal Levi entry `a(t) = eta(t) + t eta'(t)` of `sum_j chi(|z_j|^2)`.
pub fn moving_a(t: f64) -> f64 {
    eta(t) + t * eta_prime(t)
}

/// `sup_t a(t)`, attained inside `(1, 2)`.
pub fn moving_a_max() -> f64 {
    let n = 2000;
    let (mut best_t, mut best) = (1.0, 0.0);
    for k in 0..=n {
        let t = 1.0 + k as f64 / n as f64;
        if moving_a(t) > best {
            best = moving_a(t);
            best_t = t;
        }
    }
    // golden-section refinement around the grid maximum
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = ((best_t - 1.0 / n as f64).max(1.0), (best_t + 1.0 / n as f64).min(2.0));
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if moving_a(x1) < moving_a(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    moving_a(0.5 * (lo + hi)).max(best)
}

/// Weights `1, 1, 1/2, 1, 1/3, 1, ...` of the interleaved example.
pub fn interleaved_weights(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| if j % 2 == 1 { 2.0 / (j + 1) as f64 } else { 1.0 })
        .collect()
}

/// Midpoint grid `t_j = (j - 1/2)/n` of the discretized multiplication operator.
pub fn midpoint_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|j| (j as f64 - 0.5) / n as f64).collect()
}

/// Midpoint samples of `h(t) = t^{-1/2} |log t|^{-1}` on `(0, 1/e)`, normalized.
/// In `L^2(0,1)` this state has `Delta_h(M_t) = 0`; its discretizations
/// have positive values that shrink slowly with `n`.
pub fn l2_log_state(n: usize) -> Result<UnitVector> {
    check_dim(n)?;
    let cut = (-1.0f64).exp();
    let v: Vec<f64> = midpoint_grid(n)
        .into_iter()
        .map(|t| if t < cut { 1.0 / (t.sqrt() * t.ln().abs()) } else { 0.0 })
        .collect();
    UnitVector::from_real(&v)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    WeightedQuadratic(Vec<f64>),
    HarmonicQuadratic,
    GeneralQuadratic(HermitianMatrix),
    Quartic,
    PhiQuadratic {
        a: HermitianMatrix,
        phi: PhiProfile,
        /// Points are expected in `B(0, radius)`; fixes the working range of `Phi`.
        radius: f64,
    },
    MultiplicationL2,
    FiniteRankMoving,
    Interleaved,
}

/// One catalog entry, truncated to `dim` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    kind: Kind,
    dim: usize,
    /// Compression of an operator on an infinite-dimensional space.
    truncated: bool,
}

pub const CATALOG_IDS: [&str; 8] = [
    "weighted",
    "harmonic-quadratic",
    "general-quadratic",
    "quartic",
    "phi-log",
    "multiplication-l2",
    "moving-rank",
    "interleaved",
];

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::BadShape { rows: 0, cols: 0 });
    }
    Ok(())
}

impl TestFunction {
    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        check_dim(weights.len())?;
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Domain("weights must be finite and nonnegative".into()));
        }
        Ok(Self {
            dim: weights.len(),
            kind: Kind::WeightedQuadratic(weights),
            truncated: false,
        })
    }

    /// `sum_j |z_j|^2 / j`.
    pub fn harmonic(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            kind: Kind::HarmonicQuadratic,
            dim: n,
            truncated: true,
        })
    }

    /// `<Az, z>` for a PSD matrix `A`.
    pub fn general_quadratic(a: HermitianMatrix) -> Result<Self> {
        require_psd(&a)?;
        Ok(Self {
            dim: a.dim(),
            kind: Kind::GeneralQuadratic(a),
            truncated: false,
        })
    }

    /// `sum_j |z_j|^4`.
    pub fn quartic(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            kind: Kind::Quartic,
            dim: n,
            truncated: true,
        })
    }

    /// `Phi(<Az, z>)`; requires `Phi' >= 0` and `Phi' + t Phi'' >= 0` on
    /// `[0, ||A|| radius^2]`.
    pub fn phi_quadratic(a: HermitianMatrix, phi: PhiProfile, radius: f64) -> Result<Self> {
        require_psd(&a)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("working radius must be positive, got {radius}")));
        }
        let hi = a.spectral_norm() * radius * radius;
        for t in grid(hi, PHI_GRID) {
            let (d1, d2) = (phi.d1(t), phi.d2(t));
            if d1 < -1e-12 || d1 + t * d2 < -1e-12 {
                return Err(Error::Domain(format!(
                    "profile {} violates Phi' >= 0, Phi' + t Phi'' >= 0 at t = {t:.4}",
                    phi.name()
                )));
            }
        }
        Ok(Self {
            dim: a.dim(),
            kind: Kind::PhiQuadratic { a, phi, radius },
            truncated: false,
        })
    }

    /// `int_0^1 t |h(t)|^2 dt` on `n` midpoint cells.
    pub fn multiplication_l2(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            kind: Kind::MultiplicationL2,
            dim: n,
            truncated: true,
        })
    }

    /// `sum_j chi(|z_j|^2)`.
    pub fn moving_rank(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            kind: Kind::FiniteRankMoving,
            dim: n,
            truncated: true,
        })
    }

    /// `sum_j w_j |z_j|^2 + sum_j |z_j|^4` with interleaved weights.
    pub fn interleaved(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            kind: Kind::Interleaved,
            dim: n,
            truncated: true,
        })
    }

    /// Catalog entry by identifier with default parameters.
    ///
    /// `weighted` uses `w_j = (1 + 1/j)/2`, bounded below by 1/2;
    /// `general-quadratic` uses the Hilbert matrix `1/(j + k - 1)`;
    /// `phi-log` is `log(1 + sum_j |z_j|^2 / j)` on the ball of radius 2.
    pub fn from_id(id: &str, n: usize) -> Result<Self> {
        check_dim(n)?;
        match id {
            "weighted" => Self::weighted((1..=n).map(|j| 0.5 + 0.5 / j as f64).collect()),
            "harmonic-quadratic" => Self::harmonic(n),
            "general-quadratic" => {
                let a = HermitianMatrix::from_real(nalgebra::DMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64))?;
                Ok(Self {
                    truncated: true,
                    ..Self::general_quadratic(a)?
                })
            }
            "quartic" => Self::quartic(n),
            "phi-log" => {
                let a = HermitianMatrix::diag(&harmonic_weights(n));
                Ok(Self {
                    truncated: true,
                    ..Self::phi_quadratic(a, PhiProfile::Log1p, 2.0)?
                })
            }
            "multiplication-l2" => Self::multiplication_l2(n),
            "moving-rank" => Self::moving_rank(n),
            "interleaved" => Self::interleaved(n),
            other => Err(Error::Domain(format!(
                "unknown catalog id {other:?}; known: {}",
                CATALOG_IDS.join(", ")
            ))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            Kind::WeightedQuadratic(_) => "weighted",
            Kind::HarmonicQuadratic => "harmonic-quadratic",
            Kind::GeneralQuadratic(_) => "general-quadratic",
            Kind::Quartic => "quartic",
            Kind::PhiQuadratic { .. } => "phi-log",
            Kind::MultiplicationL2 => "multiplication-l2",
            Kind::FiniteRankMoving => "moving-rank",
            Kind::Interleaved => "interleaved",
        }
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the Levi form is the same at every point.
    pub fn has_constant_levi(&self) -> bool {
        match &self.kind {
            Kind::WeightedQuadratic(_) | Kind::HarmonicQuadratic | Kind::GeneralQuadratic(_) | Kind::MultiplicationL2 => {
                true
            }
            Kind::PhiQuadratic { phi, .. } => *phi == PhiProfile::Linear,
            _ => false,
        }
    }

    /// Note attached to reports on truncations of infinite-dimensional examples.
    pub fn truncation_caveat(&self) -> Option<String> {
        if !self.truncated {
            return None;
        }
        Some(format!(
            "{} is a {}-coordinate truncation; FSD values are truncation values, the untruncated Levi forms have inf sigma = 0",
            self.id(),
            self.dim
        ))
    }

    fn check_point(&self, z: &CVector) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        Ok(())
    }

    /// `u(z)`.
    pub fn eval(&self, z: &CVector) -> Result<f64> {
        self.check_point(z)?;
        let sq: Vec<f64> = z.iter().map(|v| v.norm_sqr()).collect();
        let weighted = |w: &[f64]| -> f64 { w.iter().zip(&sq).map(|(w, s)| w * s).sum() };
        Ok(match &self.kind {
            Kind::WeightedQuadratic(w) => weighted(w),
            Kind::HarmonicQuadratic => weighted(&harmonic_weights(self.dim)),
            Kind::GeneralQuadratic(a) => a.quad_form(z),
            Kind::Quartic => sq.iter().map(|s| s * s).sum(),
            Kind::PhiQuadratic { a, phi, .. } => phi.value(a.quad_form(z)),
            Kind::MultiplicationL2 => weighted(&midpoint_grid(self.dim)),
            Kind::FiniteRankMoving => sq.iter().map(|&s| chi(s)).sum(),
            Kind::Interleaved => weighted(&interleaved_weights(self.dim)) + sq.iter().map(|s| s * s).sum::<f64>(),
        })
    }

    /// Closed-form Levi matrix `D'D''u(z)`.
    pub fn levi_analytic(&self, z: &CVector) -> Result<HermitianMatrix> {
        self.check_point(z)?;
        let sq = || z.iter().map(|v| v.norm_sqr());
        Ok(match &self.kind {
            Kind::WeightedQuadratic(w) => HermitianMatrix::diag(w),
            Kind::HarmonicQuadratic => HermitianMatrix::diag(&harmonic_weights(self.dim)),
            Kind::GeneralQuadratic(a) => a.clone(),
            Kind::Quartic => HermitianMatrix::diag(&sq().map(|s| 4.0 * s).collect::<Vec<_>>()),
            Kind::PhiQuadratic { a, phi, .. } => {
                let az = a.apply(z);
                let q = a.quad_form(z);
                a.scale(phi.d1(q)).add(&HermitianMatrix::outer(&az).scale(phi.d2(q)))?
            }
            Kind::MultiplicationL2 => HermitianMatrix::diag(&midpoint_grid(self.dim)),
            Kind::FiniteRankMoving => HermitianMatrix::diag(&sq().map(moving_a).collect::<Vec<_>>()),
            Kind::Interleaved => HermitianMatrix::diag(
                &interleaved_weights(self.dim)
                    .iter()
                    .zip(sq())
                    .map(|(w, s)| w + 4.0 * s)
                    .collect::<Vec<_>>(),
            ),
        })
    }

    /// `(Phi'(q) + q Phi''(q)) <Ah, h>`, the Cauchy-Schwarz lower bound for
    /// `<L(z) h, h>`; `None` unless this is a profile with `Phi''(q) < 0`.
    pub fn phi_lower_bound(&self, z: &CVector, h: &CVector) -> Result<Option<f64>> {
        self.check_point(z)?;
        self.check_point(h)?;
        if let Kind::PhiQuadratic { a, phi, .. } = &self.kind {
            let q = a.quad_form(z);
            if phi.d2(q) < 0.0 {
                return Ok(Some((phi.d1(q) + q * phi.d2(q)) * a.quad_form(h)));
            }
        }
        Ok(None)
    }

    /// `C_G = sup (Phi'(t) + t |Phi''(t)|)` over the working range, on a grid.
    pub fn majorant_constant(&self) -> Option<f64> {
        if let Kind::PhiQuadratic { a, phi, radius } = &self.kind {
            let hi = a.spectral_norm() * radius * radius;
            return Some(
                grid(hi, PHI_GRID)
                    .map(|t| phi.d1(t) + t * phi.d2(t).abs())
                    .fold(0.0, f64::max),
            );
        }
        None
    }

    /// `lambda_min(C_G A - L(z))`; `None` for kinds other than the Phi factory.
    pub fn majorant_margin(&self, z: &CVector) -> Result<Option<f64>> {
        let (Kind::PhiQuadratic { a, .. }, Some(cg)) = (&self.kind, self.majorant_constant()) else {
            return Ok(None);
        };
        let l = self.levi_analytic(z)?;
        Ok(Some(eigh(&a.scale(cg).sub(&l)?)?.min()))
    }
}

fn harmonic_weights(n: usize) -> Vec<f64> {
    (1..=n).map(|j| 1.0 / j as f64).collect()
}

fn require_psd(a: &HermitianMatrix) -> Result<()> {
    let d = eigh(a)?;
    if d.min() < -TAU_PSD * a.scale_hint() {
        return Err(Error::NotPositive { lambda_min: d.min() });
    }
    Ok(())
}

/// `(D^2 u(h, h) + D^2 u(ih, ih)) / 4` by central second differences.
fn levi_quadratic(f: &TestFunction, z: &CVector, h: &CVector, step: f64) -> Result<f64> {
    let f0 = f.eval(z)?;
    let mut acc = 0.0;
    for dir in [h.clone(), h * C64::i()] {
        let fp = f.eval(&(z + &dir * c(step)))?;
        let fm = f.eval(&(z - &dir * c(step)))?;
        acc += (fp - 2.0 * f0 + fm) / (step * step);
    }
    Ok(acc / 4.0)
}

/// Levi matrix reconstructed from second differences along `e_j`,
/// `e_j + e_k` and `e_j + i e_k` by polarization.
pub fn levi_fd(f: &TestFunction, z: &CVector, step: f64) -> Result<HermitianMatrix> {
    if !(1e-6..=1e-2).contains(&step) {
        return Err(Error::Domain(format!("step must lie in [1e-6, 1e-2], got {step}")));
    }
    f.check_point(z)?;
    let n = f.dim();
    let e = |j: usize| {
        let mut v = CVector::zeros(n);
        v[j] = c(1.0);
        v
    };
    let diag: Vec<f64> = (0..n).map(|j| levi_quadratic(f, z, &e(j), step)).collect::<Result<_>>()?;
    let mut m = nalgebra::DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = c(diag[j]);
        for k in j + 1..n {
            let re = (levi_quadratic(f, z, &(e(j) + e(k)), step)? - diag[j] - diag[k]) / 2.0;
            let im = -(levi_quadratic(f, z, &(e(j) + e(k) * C64::i()), step)? - diag[j] - diag[k]) / 2.0;
            m[(j, k)] = C64::new(re, im);
            m[(k, j)] = C64::new(re, -im);
        }
    }
    HermitianMatrix::symmetrize(m)
}

/// Richardson extrapolation `(4 L(step/2) - L(step)) / 3`.
pub fn levi_fd_richardson(f: &TestFunction, z: &CVector, step: f64) -> Result<HermitianMatrix> {
    let coarse = levi_fd(f, z, step)?;
    let fine = levi_fd(f, z, (step / 2.0).max(1e-6))?;
    Ok(fine.scale(4.0).sub(&coarse)?.scale(1.0 / 3.0))
}

/// `FSD(u)(z) = inf sigma(D'D''u(z))`, clamped at zero against rounding.
pub fn fsd(f: &TestFunction, z: &CVector) -> Result<f64> {
    Ok(eigh(&f.levi_analytic(z)?)?.min().max(0.0))
}

/// [`fsd`] together with the infimum of `Delta_x(L(z))` over random unit
/// vectors and the minimizing eigenvector.
#[derive(Clone, Debug)]
pub struct FsdCertificate {
    pub fsd: f64,
    pub sampled_inf: f64,
    pub witness: UnitVector,
    pub samples: usize,
    pub caveat: Option<String>,
}

impl FsdCertificate {
    /// Sampled infimum is never below the FSD and reaches it at the witness.
    pub fn consistent(&self, tol: f64) -> bool {
        self.sampled_inf >= self.fsd - tol && (self.sampled_inf - self.fsd).abs() <= tol
    }
}

pub fn fsd_certificate<R: Rng + ?Sized>(
    f: &TestFunction,
    z: &CVector,
    samples: usize,
    rng: &mut R,
) -> Result<FsdCertificate> {
    let l = f.levi_analytic(z)?;
    let ev = DeltaEvaluator::new(&l)?;
    let d = ev.decomposition();
    let fsd = d.min().max(0.0);
    let witness = d.min_vector();
    let mut sampled_inf = ev.delta(&witness)?;
    for _ in 0..samples {
        let x = sampling::random_unit_vector(f.dim(), rng);
        sampled_inf = sampled_inf.min(ev.delta(&x)?);
    }
    Ok(FsdCertificate {
        fsd,
        sampled_inf,
        witness,
        samples,
        caveat: f.truncation_caveat(),
    })
}

/// A sampled ball `B(center, radius)`; with `support = Some(k)` the sampled
/// displacements live in the first `k` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub center: CVector,
    pub radius: f64,
    pub n_interior: usize,
    pub n_boundary: usize,
    pub seed: u64,
    pub support: Option<usize>,
}

impl Region {
    pub fn ball(center: CVector, radius: f64) -> Self {
        Self {
            center,
            radius,
            n_interior: 64,
            n_boundary: 256,
            seed: 0,
            support: None,
        }
    }

    pub fn centered(dim: usize, radius: f64) -> Self {
        Self::ball(CVector::zeros(dim), radius)
    }

    pub fn with_counts(mut self, n_interior: usize, n_boundary: usize) -> Self {
        self.n_interior = n_interior;
        self.n_boundary = n_boundary;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_support(mut self, k: usize) -> Self {
        self.support = Some(k);
        self
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim())?;
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Domain(format!("radius must be positive, got {}", self.radius)));
        }
        if self.n_interior == 0 || self.n_boundary == 0 {
            return Err(Error::Domain("sample counts must be at least 1".into()));
        }
        if let Some(k) = self.support {
            if k == 0 || k > self.dim() {
                return Err(Error::Domain(format!("support {k} must lie in 1..={}", self.dim())));
            }
        }
        Ok(())
    }

    /// `sup ||z||` over the closed ball.
    pub fn outer_radius(&self) -> f64 {
        self.center.norm() + self.radius
    }

    /// `inf ||z||` over the closed ball.
    pub fn inner_radius(&self) -> f64 {
        (self.center.norm() - self.radius).max(0.0)
    }

    fn embed(&self, v: CVector) -> CVector {
        let mut out = self.center.clone();
        for (j, x) in v.iter().enumerate() {
            out[j] += x;
        }
        out
    }

    /// Interior points followed by boundary points.
    pub fn sample_points(&self) -> Result<Vec<(CVector, bool)>> {
        self.validate()?;
        let k = self.support.unwrap_or(self.dim());
        let origin = CVector::zeros(k);
        let mut rng = seeded(self.seed);
        let mut pts = Vec::with_capacity(self.n_interior + self.n_boundary);
        for _ in 0..self.n_interior {
            pts.push((self.embed(sampling::random_ball_point(&origin, self.radius, &mut rng)), false));
        }
        for _ in 0..self.n_boundary {
            pts.push((self.embed(sampling::random_sphere_point(&origin, self.radius, &mut rng)), true));
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug)]
pub struct LeviSample {
    pub point: CVector,
    pub levi: HermitianMatrix,
    pub on_boundary: bool,
}

/// The map `z -> D'D''u(z)` sampled over a region.
#[derive(Clone, Debug)]
pub struct LeviFamily {
    pub function_id: String,
    pub dim: usize,
    pub samples: Vec<LeviSample>,
    pub caveat: Option<String>,
}

impl LeviFamily {
    /// Family over explicit points, all treated as interior.
    pub fn from_points(f: &TestFunction, points: &[CVector]) -> Result<Self> {
        let tagged: Vec<(CVector, bool)> = points.iter().map(|p| (p.clone(), false)).collect();
        Self::build(f, tagged)
    }

    fn build(f: &TestFunction, points: Vec<(CVector, bool)>) -> Result<Self> {
        let mut samples = Vec::with_capacity(points.len());
        for (point, on_boundary) in points {
            let levi = f.levi_analytic(&point)?;
            require_psd(&levi)?;
            samples.push(LeviSample {
                point,
                levi,
                on_boundary,
            });
        }
        Ok(Self {
            function_id: f.id().to_string(),
            dim: f.dim(),
            samples,
            caveat: f.truncation_caveat(),
        })
    }

    /// Family from explicit Levi matrices, for synthetic tests.
    pub fn from_matrices(id: &str, matrices: Vec<HermitianMatrix>) -> Result<Self> {
        let dim = matrices.first().map(|m| m.dim()).ok_or(Error::Domain("empty family".into()))?;
        let mut samples = Vec::with_capacity(matrices.len());
        for levi in matrices {
            if levi.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: levi.dim() });
            }
            require_psd(&levi)?;
            samples.push(LeviSample {
                point: CVector::zeros(dim),
                levi,
                on_boundary: false,
            });
        }
        Ok(Self {
            function_id: id.to_string(),
            dim,
            samples,
            caveat: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn matrices(&self) -> impl Iterator<Item = &HermitianMatrix> {
        self.samples.iter().map(|s| &s.levi)
    }

    /// `sup_z <L(z) x, x>` over the samples.
    pub fn sup_quad(&self, x: &CVector) -> f64 {
        self.matrices().map(|l| l.quad_form(x)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Samples the Levi form of `f` over `region`; every matrix must be PSD.
pub fn sample_family(f: &TestFunction, region: &Region) -> Result<LeviFamily> {
    if region.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: region.dim(),
        });
    }
    LeviFamily::build(f, region.sample_points()?)
}

/// Bounds attached to a constant Levi form, when it is strictly positive.
pub fn constant_levi_bounds(f: &TestFunction) -> Result<Option<SpectralBounds>> {
    if !f.has_constant_levi() {
        return Ok(None);
    }
    let l = f.levi_analytic(&CVector::zeros(f.dim()))?;
    Ok(SpectralBounds::of(&l).ok())
}
