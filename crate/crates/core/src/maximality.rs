//! Checkers for the sufficient and necessary maximality criteria and for the
//! comparison principles, evaluated on sampled Levi families.
//!
//! Every verdict here is about the finite sample: a passing certificate says
//! the sufficient condition was verified on the sampled region of the
//! truncation, never that the infinite-dimensional function is maximal.

use crate::error::{Error, Result};
use crate::levi::{LeviFamily, Region, TestFunction};
use crate::orders::{additive_constant, delta_order_sampled, specht};
use crate::spectra::{c, eigh, op_norm, CMatrix, CVector, HermitianMatrix, SpectralBounds, UnitVector, TAU_PSD};

/// Default relative decay a null certificate has to reach.
pub const DECAY_FACTOR: f64 = 1e-2;
/// Absolute floor below which a sup value counts as an exact null.
pub const NULL_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NecessaryOutcome {
    /// Some sample has `FSD > tol`: the function is not maximal.
    Excluded,
    /// As above, but on a truncation whose untruncated Levi forms have `inf sigma = 0`.
    ExcludedOnTruncation,
    NotExcluded,
}

#[derive(Clone, Debug)]
pub struct FsdNecessaryReport {
    pub max_fsd: f64,
    pub min_fsd: f64,
    /// Index of the sample attaining `max_fsd`.
    pub argmax: usize,
    pub tol: f64,
    pub outcome: NecessaryOutcome,
    pub caveat: Option<String>,
}

impl FsdNecessaryReport {
    pub fn excluded(&self) -> bool {
        self.outcome != NecessaryOutcome::NotExcluded
    }
}

/// Contrapositive of "maximal implies FSD = 0": one sample with `FSD > tol`
/// excludes maximality.
pub fn fsd_necessary_check(family: &LeviFamily, tol: f64) -> Result<FsdNecessaryReport> {
    if family.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    let mut max_fsd = f64::NEG_INFINITY;
    let mut min_fsd = f64::INFINITY;
    let mut argmax = 0;
    for (i, l) in family.matrices().enumerate() {
        let v = eigh(l)?.min().max(0.0);
        if v > max_fsd {
            max_fsd = v;
            argmax = i;
        }
        min_fsd = min_fsd.min(v);
    }
    let outcome = match (max_fsd > tol, family.caveat.is_some()) {
        (false, _) => NecessaryOutcome::NotExcluded,
        (true, false) => NecessaryOutcome::Excluded,
        (true, true) => NecessaryOutcome::ExcludedOnTruncation,
    };
    Ok(FsdNecessaryReport {
        max_fsd,
        min_fsd,
        argmax,
        tol,
        outcome,
        caveat: family.caveat.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AveragingSets {
    /// `I_i = {1, ..., i}`.
    Prefix,
    /// `I_i = {1, 3, ..., 2i - 1}`.
    OddPrefix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    FixedVector(UnitVector),
    AveragingSets(AveragingSets),
    /// Constant sequence: the minimizing eigenvector of the entrywise
    /// max-modulus aggregate of the family.
    MinEigOfSup,
    /// The last `k` basis vectors `e_{n-k+1}, ..., e_n`.
    BasisTail,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FixedVector(_) => "fixed-vector",
            Self::AveragingSets(_) => "averaging-sets",
            Self::MinEigOfSup => "min-eig-of-sup",
            Self::BasisTail => "basis-tail",
        }
    }
}

/// Candidate approximate null sequence with `sup_z <L(z) x_i, x_i>` per step.
#[derive(Clone, Debug)]
pub struct NullCertificate {
    pub strategy: Strategy,
    pub vectors: Vec<UnitVector>,
    pub sup_values: Vec<f64>,
    pub target: f64,
}

impl NullCertificate {
    /// The last sup value reaches `max(DECAY_FACTOR * first, NULL_FLOOR)`.
    pub fn passes(&self) -> bool {
        match self.sup_values.last() {
            Some(&last) => last <= self.target,
            None => false,
        }
    }

    /// Recomputes every sup value from `family`; largest discrepancy.
    pub fn replay_error(&self, family: &LeviFamily) -> f64 {
        self.vectors
            .iter()
            .zip(&self.sup_values)
            .map(|(x, v)| (family.sup_quad(x.as_vector()) - v).abs())
            .fold(0.0, f64::max)
    }
}

fn is_diagonal_family(family: &LeviFamily) -> bool {
    family.matrices().all(|l| l.is_diagonal(1e-12 * l.scale_hint()))
}

pub fn null_certificate(family: &LeviFamily, strategy: Strategy, k: usize) -> Result<NullCertificate> {
    if family.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    if k == 0 {
        return Err(Error::Domain("certificate length must be at least 1".into()));
    }
    let n = family.dim;
    let vectors: Vec<UnitVector> = match &strategy {
        Strategy::FixedVector(x) => {
            if x.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: x.dim() });
            }
            vec![x.clone(); k]
        }
        Strategy::AveragingSets(sets) => {
            if !is_diagonal_family(family) {
                return Err(Error::StrategyMismatch(format!(
                    "averaging sets need diagonal Levi forms; {} is not diagonal",
                    family.function_id
                )));
            }
            let needed = match sets {
                AveragingSets::Prefix => k,
                AveragingSets::OddPrefix => 2 * k - 1,
            };
            if needed > n {
                return Err(Error::Domain(format!("k = {k} needs {needed} coordinates, have {n}")));
            }
            (1..=k)
                .map(|i| {
                    let idx: Vec<usize> = match sets {
                        AveragingSets::Prefix => (0..i).collect(),
                        AveragingSets::OddPrefix => (0..i).map(|t| 2 * t).collect(),
                    };
                    UnitVector::averaging(n, &idx)
                })
                .collect::<Result<_>>()?
        }
        Strategy::MinEigOfSup => {
            let mut agg = nalgebra::DMatrix::<f64>::zeros(n, n);
            for l in family.matrices() {
                for i in 0..n {
                    for j in 0..n {
                        agg[(i, j)] = agg[(i, j)].max(l.get(i, j).norm());
                    }
                }
            }
            let x = eigh(&HermitianMatrix::from_real(agg)?)?.min_vector();
            vec![x; k]
        }
        Strategy::BasisTail => {
            if k > n {
                return Err(Error::Domain(format!("k = {k} exceeds dimension {n}")));
            }
            (n - k..n).map(|j| UnitVector::basis(n, j)).collect()
        }
    };
    let sup_values: Vec<f64> = vectors.iter().map(|x| family.sup_quad(x.as_vector())).collect();
    let target = (DECAY_FACTOR * sup_values[0]).max(NULL_FLOOR);
    Ok(NullCertificate {
        strategy,
        vectors,
        sup_values,
        target,
    })
}

/// Orthonormal basis of the span of `vectors` (rank-revealing via SVD).
fn orthonormalize(vectors: &[CVector], n: usize) -> Result<CMatrix> {
    if vectors.is_empty() {
        return Ok(CMatrix::zeros(n, 0));
    }
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
    }
    let m = CMatrix::from_columns(vectors);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested");
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(1.0)).count();
    Ok(u.columns(0, rank).into_owned())
}

/// Orthonormal basis of the complement of the column span of `q`.
fn complement(q: &CMatrix, n: usize) -> CMatrix {
    let p = q * q.adjoint();
    let resid = CMatrix::identity(n, n) - p;
    let svd = resid.svd(true, false);
    let u = svd.u.expect("requested");
    let cols: Vec<usize> = (0..n).filter(|&j| svd.singular_values[j] > 0.5).collect();
    CMatrix::from_columns(&cols.iter().map(|&j| u.column(j).into_owned()).collect::<Vec<_>>())
}

fn residual_norm(q: &CMatrix, l: &HermitianMatrix) -> f64 {
    let lm = l.as_matrix();
    op_norm(&(lm - q * (q.adjoint() * lm)))
}

#[derive(Clone, Debug)]
pub struct CommonRangeReport {
    pub holds: bool,
    /// `max_z ||(I - P_E) L(z)||`.
    pub worst_residual: f64,
    pub tol: f64,
    /// Unit vector of `E^perp`, null for every sampled Levi form when `holds`.
    pub witness: UnitVector,
    pub witness_sup: f64,
}

/// `Ran L(z) in E` for every sample, with `E` the span of `basis` (proper).
pub fn common_range_check(family: &LeviFamily, basis: &[CVector]) -> Result<CommonRangeReport> {
    let n = family.dim;
    let q = orthonormalize(basis, n)?;
    if q.ncols() >= n {
        return Err(Error::Precondition("subspace must be proper, got the full space".into()));
    }
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for l in family.matrices() {
        worst = worst.max(residual_norm(&q, l));
        scale = scale.max(l.spectral_norm());
    }
    let tol = 1e-10 * scale;
    let perp = complement(&q, n);
    let witness = UnitVector::normalized(perp.column(0).into_owned())?;
    let witness_sup = family.sup_quad(witness.as_vector());
    Ok(CommonRangeReport {
        holds: worst <= tol,
        worst_residual: worst,
        tol,
        witness,
        witness_sup,
    })
}

#[derive(Clone, Debug)]
pub struct ApproxRangeReport {
    pub eps: f64,
    /// Smallest dimension found; `n` on failure.
    pub dim: usize,
    pub basis: Vec<CVector>,
    pub residual: f64,
    /// A proper subspace works.
    pub success: bool,
}

/// Smallest `E` spanned by leading left singular vectors of the stacked
/// Levi matrices with `max_z ||(I - P_E) L(z)|| <= eps`.
pub fn approx_common_range(family: &LeviFamily, eps: f64) -> Result<ApproxRangeReport> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if family.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    let n = family.dim;
    let cols: Vec<CVector> = family
        .matrices()
        .flat_map(|l| (0..n).map(move |j| l.as_matrix().column(j).into_owned()))
        .collect();
    let stacked = CMatrix::from_columns(&cols);
    let svd = stacked.svd(true, false);
    let u = svd.u.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let leading = |k: usize| CMatrix::from_columns(&order[..k].iter().map(|&j| u.column(j).into_owned()).collect::<Vec<_>>());
    let residual_at = |k: usize| -> f64 {
        let q = if k == 0 { CMatrix::zeros(n, 0) } else { leading(k) };
        family.matrices().map(|l| residual_norm(&q, l)).fold(0.0, f64::max)
    };
    let accept = eps * (1.0 + 1e-12);
    // residuals are nonincreasing along the nested subspaces
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if residual_at(mid) <= accept {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let dim = lo;
    let basis = if dim == 0 { Vec::new() } else { leading(dim).column_iter().map(|c| c.into_owned()).collect() };
    Ok(ApproxRangeReport {
        eps,
        dim,
        residual: residual_at(dim),
        basis,
        success: dim < n,
    })
}

#[derive(Clone, Debug)]
pub struct CompactnessReport {
    pub passes: bool,
    pub range: ApproxRangeReport,
    /// Largest `||(I - P_E) L(z) h||` over random probes `||h|| <= 1`.
    pub probe_residual: f64,
    pub probes: usize,
}

/// Finite proxy for collective compactness: an `eps`-approximate common
/// range of dimension at most `n / 2`.
pub fn collectively_compact_check(family: &LeviFamily, eps: f64, probes: usize, seed: u64) -> Result<CompactnessReport> {
    let range = approx_common_range(family, eps)?;
    let n = family.dim;
    let q = if range.basis.is_empty() { CMatrix::zeros(n, 0) } else { CMatrix::from_columns(&range.basis) };
    let mut rng = crate::sampling::seeded(seed);
    let mut probe_residual = 0.0f64;
    for i in 0..probes {
        let l = &family.samples[i % family.len()].levi;
        let h = crate::sampling::random_ball_point(&CVector::zeros(n), 1.0, &mut rng);
        let lh = l.apply(&h);
        let r = &lh - &q * (q.adjoint() * &lh);
        probe_residual = probe_residual.max(r.norm());
    }
    Ok(CompactnessReport {
        passes: range.success && 2 * range.dim <= n,
        range,
        probe_residual,
        probes,
    })
}

#[derive(Clone, Debug)]
pub struct MajorantReport {
    /// `L(z) <= T` at every sample.
    pub dominated: bool,
    /// `min_z lambda_min(T - L(z))`.
    pub worst_margin: f64,
    pub t_min_eig: f64,
    /// Domination holds and `inf sigma(T)` is within tolerance of zero.
    pub criterion: bool,
    pub tol: f64,
}

pub fn model_majorant_check(family: &LeviFamily, t: &HermitianMatrix) -> Result<MajorantReport> {
    if t.dim() != family.dim {
        return Err(Error::DimensionMismatch { expected: family.dim, got: t.dim() });
    }
    let dt = eigh(t)?;
    let scale = t.scale_hint();
    if dt.min() < -TAU_PSD * scale {
        return Err(Error::NotPositive { lambda_min: dt.min() });
    }
    let mut worst = f64::INFINITY;
    let mut big = scale;
    for l in family.matrices() {
        worst = worst.min(eigh(&t.sub(l)?)?.min());
        big = big.max(l.scale_hint());
    }
    let tol = TAU_PSD * big;
    let dominated = worst >= -tol;
    Ok(MajorantReport {
        dominated,
        worst_margin: worst,
        t_min_eig: dt.min(),
        criterion: dominated && dt.min() <= tol,
        tol,
    })
}

#[derive(Clone, Debug)]
pub struct ConstantLeviReport {
    pub constant: bool,
    /// `max_z ||L(z) - L(z_0)||`.
    pub deviation: f64,
    /// `inf sigma(A)` of the common Levi form, when constant.
    pub inf_sigma: Option<f64>,
    /// For a constant family: maximal iff FSD = 0 iff `inf sigma(A) = 0`,
    /// evaluated on the truncation.
    pub maximal_on_truncation: Option<bool>,
    pub caveat: Option<String>,
}

pub fn constant_levi_classify(family: &LeviFamily, tol: f64) -> Result<ConstantLeviReport> {
    if family.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    let l0 = &family.samples[0].levi;
    let deviation = family
        .matrices()
        .map(|l| op_norm(&(l.as_matrix() - l0.as_matrix())))
        .fold(0.0, f64::max);
    let constant = deviation <= tol;
    let (inf_sigma, maximal) = if constant {
        let m = eigh(l0)?.min().max(0.0);
        (Some(m), Some(m <= tol))
    } else {
        (None, None)
    };
    Ok(ConstantLeviReport {
        constant,
        deviation,
        inf_sigma,
        maximal_on_truncation: maximal,
        caveat: family.caveat.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct BoundaryInfReport {
    pub boundary_inf: f64,
    /// `R^2 lambda_min(A)` with `R` the outer radius of the region.
    pub bound: f64,
    pub holds: bool,
    pub witness: CVector,
}

/// `inf` of `<Az, z>` over boundary samples, including the boundary point on
/// the ray through the minimizing eigenvector.
pub fn boundary_inf_check(a: &HermitianMatrix, region: &Region) -> Result<BoundaryInfReport> {
    region.validate()?;
    if region.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: region.dim() });
    }
    if region.center.norm() >= region.radius {
        return Err(Error::Precondition("region must contain the origin".into()));
    }
    let d = eigh(a)?;
    let v = d.min_vector().into_vector();
    // t > 0 with ||t v - center|| = radius
    let cv = region.center.dotc(&v).re;
    let t = cv + (cv * cv - region.center.norm_squared() + region.radius * region.radius).sqrt();
    let mut best = (a.quad_form(&(&v * c(t))), &v * c(t));
    for (p, on_boundary) in region.sample_points()? {
        if on_boundary {
            let val = a.quad_form(&p);
            if val < best.0 {
                best = (val, p);
            }
        }
    }
    let r = region.outer_radius();
    let bound = r * r * d.min();
    let tol = TAU_PSD * r * r * a.scale_hint();
    Ok(BoundaryInfReport {
        boundary_inf: best.0,
        bound,
        holds: best.0 <= bound + tol,
        witness: best.1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparisonKind {
    Cp1,
    Cp2,
    Cp3,
    Cp4,
    Bounds,
    IncreasingLimitDemo { j: usize },
}

impl ComparisonKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Cp1 => "cp1",
            Self::Cp2 => "cp2",
            Self::Cp3 => "cp3",
            Self::Cp4 => "cp4",
            Self::Bounds => "bounds",
            Self::IncreasingLimitDemo { .. } => "increasing-limit-demo",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonScenario {
    pub u: TestFunction,
    pub v: Option<TestFunction>,
    pub region: Region,
    /// Bounds on the Levi form of `v` (of `u` for the two-sided bounds);
    /// derived from the sampled spectra when absent.
    pub bounds: Option<SpectralBounds>,
    /// Replaces the Specht constant in cp1 by a larger one.
    pub s_override: Option<f64>,
}

impl ComparisonScenario {
    pub fn new(u: TestFunction, v: Option<TestFunction>, region: Region) -> Self {
        Self {
            u,
            v,
            region,
            bounds: None,
            s_override: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparisonStatus {
    Pass,
    Fail,
    HypothesisViolated,
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub kind: ComparisonKind,
    pub status: ComparisonStatus,
    /// Worst conclusion margin (`-max w` over interior samples, or the
    /// sandwich gap); `NaN` when a hypothesis failed.
    pub margin: f64,
    /// Smallest eigenvalue of the Levi form of the conclusion function.
    pub levi_margin: f64,
    /// Interior max of `w` does not exceed its boundary max.
    pub max_principle: bool,
    pub constant: f64,
    pub diagnostics: Vec<String>,
    pub witness: Option<CVector>,
}

struct Samples {
    interior: Vec<CVector>,
    boundary: Vec<CVector>,
}

fn split_samples(region: &Region) -> Result<Samples> {
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (p, b) in region.sample_points()? {
        if b {
            boundary.push(p);
        } else {
            interior.push(p);
        }
    }
    Ok(Samples { interior, boundary })
}

fn violated(kind: ComparisonKind, diagnostics: Vec<String>, witness: Option<CVector>) -> ComparisonReport {
    ComparisonReport {
        kind,
        status: ComparisonStatus::HypothesisViolated,
        margin: f64::NAN,
        levi_margin: f64::NAN,
        max_principle: true,
        constant: f64::NAN,
        diagnostics,
        witness,
    }
}

/// Levi bounds over all samples, checked against the given bounds or derived.
fn levi_bounds(
    f: &TestFunction,
    pts: &[CVector],
    given: Option<SpectralBounds>,
) -> Result<std::result::Result<SpectralBounds, (String, CVector)>> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut lo_at = pts[0].clone();
    for p in pts {
        let d = eigh(&f.levi_analytic(p)?)?;
        if d.min() < lo {
            lo = d.min();
            lo_at = p.clone();
        }
        hi = hi.max(d.max());
    }
    match given {
        Some(b) => {
            let tol = TAU_PSD * b.upper().max(1.0);
            if lo < b.lower() - tol || hi > b.upper() + tol {
                return Ok(Err((
                    format!("Levi spectrum [{lo:.6e}, {hi:.6e}] leaves [{}, {}]", b.lower(), b.upper()),
                    lo_at,
                )));
            }
            Ok(Ok(b))
        }
        None => match SpectralBounds::new(lo, hi) {
            Ok(b) => Ok(Ok(b)),
            Err(_) => Ok(Err((format!("Levi form not bounded below by m > 0: lambda_min = {lo:.6e}"), lo_at))),
        },
    }
}

fn norm2(z: &CVector) -> f64 {
    z.norm_squared()
}

pub fn comparison_check(scenario: &ComparisonScenario, kind: ComparisonKind) -> Result<ComparisonReport> {
    let n = scenario.u.dim();
    if scenario.region.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: scenario.region.dim() });
    }
    if let Some(v) = &scenario.v {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
        }
    }
    let s = split_samples(&scenario.region)?;
    let all: Vec<CVector> = s.interior.iter().chain(&s.boundary).cloned().collect();
    let u = &scenario.u;
    match kind {
        ComparisonKind::Cp1 | ComparisonKind::Cp2 => {
            let Some(v) = &scenario.v else {
                return Err(Error::Precondition(format!("{} needs a second function v", kind.name())));
            };
            let bounds = match levi_bounds(v, &all, scenario.bounds)? {
                Ok(b) => b,
                Err((msg, at)) => return Ok(violated(kind, vec![format!("v: {msg}")], Some(at))),
            };
            // Delta_x(L_v(z)) <= Delta_x(L_u(z)) for all unit x, i.e. L_u >> L_v
            for (i, p) in all.iter().enumerate() {
                let lu = u.levi_analytic(p)?;
                let lv = v.levi_analytic(p)?;
                match delta_order_sampled(&lu, &lv, 32, i as u64) {
                    Ok(ord) if ord.holds => {}
                    Ok(ord) => {
                        return Ok(violated(
                            kind,
                            vec![format!("determinant order fails: worst log gap {:.3e}", ord.margin)],
                            Some(p.clone()),
                        ))
                    }
                    Err(e) => return Ok(violated(kind, vec![format!("determinant order undefined: {e}")], Some(p.clone()))),
                }
            }
            let (m, big_m) = (bounds.lower(), bounds.upper());
            let (constant, w, lw): (f64, Box<dyn Fn(&CVector) -> Result<f64>>, Box<dyn Fn(&CVector) -> Result<HermitianMatrix>>) =
                if kind == ComparisonKind::Cp1 {
                    let sv = specht(big_m / m)?;
                    let sc = match scenario.s_override {
                        Some(o) if o >= sv => o,
                        Some(o) => return Err(Error::Domain(format!("override {o} is below S = {sv}"))),
                        None => sv,
                    };
                    (
                        sc,
                        Box::new(move |z| Ok(sc * u.eval(z)? - v.eval(z)?)),
                        Box::new(move |z| u.levi_analytic(z)?.scale(sc).sub(&v.levi_analytic(z)?)),
                    )
                } else {
                    let cc = additive_constant(m, big_m, 1.0)?;
                    (
                        cc,
                        Box::new(move |z| Ok(u.eval(z)? + cc * norm2(z) - v.eval(z)?)),
                        Box::new(move |z| u.levi_analytic(z)?.shift(cc).sub(&v.levi_analytic(z)?)),
                    )
                };
            conclude(kind, &s, constant, &*w, &*lw)
        }
        ComparisonKind::Cp3 | ComparisonKind::Cp4 => {
            let upper = kind == ComparisonKind::Cp3;
            for p in &all {
                let d = eigh(&u.levi_analytic(p)?)?;
                let bad = if upper { d.min() < 1.0 - TAU_PSD } else { d.max() > 1.0 + TAU_PSD };
                if bad {
                    let msg = if upper {
                        format!("Delta_x(L_u) >= 1 fails: lambda_min = {:.6e}", d.min())
                    } else {
                        format!("Delta_x(L_u) <= 1 fails: lambda_max = {:.6e}", d.max())
                    };
                    return Ok(violated(kind, vec![msg], Some(p.clone())));
                }
            }
            let sign = if upper { 1.0 } else { -1.0 };
            let w = move |z: &CVector| -> Result<f64> { Ok(sign * (u.eval(z)? - norm2(z))) };
            let lw = move |z: &CVector| -> Result<HermitianMatrix> { Ok(u.levi_analytic(z)?.shift(-1.0).scale(sign)) };
            conclude(kind, &s, 1.0, &w, &lw)
        }
        ComparisonKind::Bounds => {
            let bounds = match levi_bounds(u, &all, scenario.bounds)? {
                Ok(b) => b,
                Err((msg, at)) => return Ok(violated(kind, vec![format!("u: {msg}")], Some(at))),
            };
            let bvals: Vec<f64> = s.boundary.iter().map(|p| u.eval(p)).collect::<Result<_>>()?;
            let bnorms: Vec<f64> = s.boundary.iter().map(norm2).collect();
            let big_r2 = bnorms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let r2 = bnorms.iter().cloned().fold(f64::INFINITY, f64::min);
            let inf_u = bvals.iter().cloned().fold(f64::INFINITY, f64::min);
            let sup_u = bvals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let (m, big_m) = (bounds.lower(), bounds.upper());
            let mut margin = f64::INFINITY;
            let mut witness = None;
            let mut scale = 1.0f64;
            for p in &s.interior {
                let val = u.eval(p)?;
                let lower = big_m * (norm2(p) - big_r2) + inf_u;
                let upper = m * (norm2(p) - r2) + sup_u;
                scale = scale.max(val.abs()).max(lower.abs()).max(upper.abs());
                let gap = (val - lower).min(upper - val);
                if gap < margin {
                    margin = gap;
                    witness = Some(p.clone());
                }
            }
            let tol = 1e-10 * scale;
            Ok(ComparisonReport {
                kind,
                status: if margin >= -tol { ComparisonStatus::Pass } else { ComparisonStatus::Fail },
                margin,
                levi_margin: m,
                max_principle: true,
                constant: big_m,
                diagnostics: vec![format!("m = {m}, M = {big_m}, R^2 = {big_r2}, r^2 = {r2}")],
                witness,
            })
        }
        ComparisonKind::IncreasingLimitDemo { j } => increasing_limit_demo(scenario, j, &s),
    }
}

fn conclude(
    kind: ComparisonKind,
    s: &Samples,
    constant: f64,
    w: &dyn Fn(&CVector) -> Result<f64>,
    lw: &dyn Fn(&CVector) -> Result<HermitianMatrix>,
) -> Result<ComparisonReport> {
    let mut scale = 1.0f64;
    let mut bmax = f64::NEG_INFINITY;
    let mut bmax_at = None;
    for p in &s.boundary {
        let val = w(p)?;
        scale = scale.max(val.abs());
        if val > bmax {
            bmax = val;
            bmax_at = Some(p.clone());
        }
    }
    let tol = 1e-10 * scale.max(1.0);
    if bmax > tol {
        return Ok(violated(
            kind,
            vec![format!("boundary hypothesis fails: max of w on the boundary is {bmax:.6e}")],
            bmax_at,
        ));
    }
    let mut imax = f64::NEG_INFINITY;
    let mut witness = None;
    let mut levi_margin = f64::INFINITY;
    for p in s.interior.iter().chain(&s.boundary) {
        levi_margin = levi_margin.min(eigh(&lw(p)?)?.min());
    }
    for p in &s.interior {
        let val = w(p)?;
        scale = scale.max(val.abs());
        if val > imax {
            imax = val;
            witness = Some(p.clone());
        }
    }
    let tol = 1e-10 * scale.max(1.0);
    let psh = levi_margin >= -TAU_PSD * scale.max(1.0);
    let max_principle = imax <= bmax + tol;
    let margin = -imax;
    let mut diagnostics = vec![format!("constant = {constant}")];
    if !psh {
        diagnostics.push(format!("conclusion Levi form not PSD: lambda_min = {levi_margin:.6e}"));
    }
    if !max_principle {
        diagnostics.push(format!("interior max {imax:.6e} exceeds boundary max {bmax:.6e}"));
    }
    let ok = margin >= -tol && psh && max_principle;
    Ok(ComparisonReport {
        kind,
        status: if ok { ComparisonStatus::Pass } else { ComparisonStatus::Fail },
        margin,
        levi_margin,
        max_principle,
        constant,
        diagnostics,
        witness,
    })
}

/// `u_j = sum_{k <= j} |z_k|^2` increases to `||z||^2` while `v = r^2`
/// dominates the limit strictly inside `B(0, r)` with equal boundary values.
fn increasing_limit_demo(scenario: &ComparisonScenario, j: usize, s: &Samples) -> Result<ComparisonReport> {
    let kind = ComparisonKind::IncreasingLimitDemo { j };
    let region = &scenario.region;
    let n = region.dim();
    if region.center.norm() != 0.0 {
        return Err(Error::Precondition("the demo needs a ball centered at the origin".into()));
    }
    if j == 0 || j >= n {
        return Err(Error::Domain(format!("need 1 <= j < n = {n}, got {j}")));
    }
    let r2 = region.radius * region.radius;
    let partial = |z: &CVector, k: usize| -> f64 { z.iter().take(k).map(|v| v.norm_sqr()).sum() };
    let mut diagnostics = Vec::new();
    let tol = 1e-12 * r2.max(1.0);
    // monotone in the index and bounded by the limit
    let monotone = s.interior.iter().chain(&s.boundary).all(|z| {
        (1..n).all(|k| partial(z, k) <= partial(z, k + 1) + tol) && (partial(z, n) - norm2(z)).abs() <= tol
    });
    if !monotone {
        diagnostics.push("partial sums are not increasing to ||z||^2".into());
    }
    let boundary_equal = s.boundary.iter().all(|z| (norm2(z) - r2).abs() <= 1e-10 * r2.max(1.0));
    if !boundary_equal {
        diagnostics.push("v = r^2 does not match ||z||^2 on the boundary".into());
    }
    // e_{j+1} is a common null direction of D'D''u_j = diag(1,..,1,0,..)
    let mut lj = vec![0.0; n];
    lj[..j].iter_mut().for_each(|w| *w = 1.0);
    let u_j = TestFunction::weighted(lj)?;
    let null = s
        .interior
        .iter()
        .all(|z| u_j.levi_analytic(z).map(|l| l.quad_form(UnitVector::basis(n, j).as_vector()) == 0.0).unwrap_or(false));
    if !null {
        diagnostics.push(format!("e_{} is not null for u_j", j + 1));
    }
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for z in &s.interior {
        let gap = r2 - norm2(z);
        if gap < margin {
            margin = gap;
            witness = Some(z.clone());
        }
    }
    let ok = monotone && boundary_equal && null && margin > 0.0;
    diagnostics.push(format!("min over interior of r^2 - ||z||^2 = {margin:.6e}"));
    Ok(ComparisonReport {
        kind,
        status: if ok { ComparisonStatus::Pass } else { ComparisonStatus::Fail },
        margin,
        levi_margin: 0.0,
        max_principle: true,
        constant: r2,
        diagnostics,
        witness,
    })
}
