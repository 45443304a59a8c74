//! Loewner and chaotic order, the Specht/Kantorovich family of constants,
//! and checkers for the inequalities that characterize `A >> B`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fsdet::DeltaEvaluator;
use crate::sampling::{self, seeded};
use crate::spectra::{
    eigh, fun_calc, fun_calc_decomposed, FunctionTag, HermitianMatrix, SpectralBounds, UnitVector, TAU_PSD,
};

/// Below `1 + SPECHT_SWITCH` the Specht ratio is evaluated from its series.
pub const SPECHT_SWITCH: f64 = 1e-8;

fn check_ratio(h: f64) -> Result<()> {
    if !(h >= 1.0) || !h.is_finite() {
        return Err(Error::Domain(format!("ratio h must be a finite real >= 1, got {h}")));
    }
    Ok(())
}

/// Specht's ratio `S(h) = (h-1) h^{1/(h-1)} / (e log h)`, with `S(1) = 1`.
pub fn specht(h: f64) -> Result<f64> {
    check_ratio(h)?;
    if h - 1.0 <= SPECHT_SWITCH {
        // log S(e^L) = L^2/8 - L^4/576 + O(L^6)
        let l = h.ln();
        let l2 = l * l;
        return Ok((l2 / 8.0 - l2 * l2 / 576.0).exp());
    }
    let lh = h.ln();
    let log_s = (h - 1.0).ln() + lh / (h - 1.0) - 1.0 - lh.ln();
    Ok(log_s.exp())
}

/// `S(h, p) = S(h^p)`.
pub fn specht_p(h: f64, p: f64) -> Result<f64> {
    check_ratio(h)?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must be a positive real, got {p}")));
    }
    specht(h.powf(p))
}

/// Kantorovich constant `K(h) = (h+1)^2 / (4h)`.
pub fn kantorovich(h: f64) -> Result<f64> {
    check_ratio(h)?;
    Ok((h + 1.0).powi(2) / (4.0 * h))
}

/// Generalized Kantorovich constant
/// `K(h, a) = (h^a - h) / ((a-1)(h-1)) * ((a-1)/a * (h^a - 1)/(h^a - h))^a`.
pub fn gen_kantorovich(h: f64, alpha: f64) -> Result<f64> {
    check_ratio(h)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    // the deviation from 1 is second order in h - 1
    if alpha == 0.0 || alpha == 1.0 || h - 1.0 <= SPECHT_SWITCH {
        return Ok(1.0);
    }
    let ha = h.powf(alpha);
    let first = (ha - h) / ((alpha - 1.0) * (h - 1.0));
    let second = ((alpha - 1.0) / alpha) * (ha - 1.0) / (ha - h);
    Ok(first * second.powf(alpha))
}

/// Additive constant `C_p(m, M) = (M^p - m^p) / (p log(M/m)) * log S(h^p)`,
/// zero when `m = M`.
pub fn additive_constant(m: f64, big_m: f64, p: f64) -> Result<f64> {
    let bounds = SpectralBounds::new(m, big_m)?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must be a positive real, got {p}")));
    }
    if m == big_m {
        return Ok(0.0);
    }
    let pl = p * (big_m / m).ln();
    // logarithmic mean of m^p and M^p without cancellation
    let log_mean = m.powf(p) * pl.exp_m1() / pl;
    Ok(log_mean * specht_p(bounds.ratio(), p)?.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Loewner,
    Chaotic,
    DeltaSampled,
}

/// Outcome of an order test. `holds` iff `margin >= -TAU_PSD * scale`.
#[derive(Clone, Debug)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub holds: bool,
    /// Smallest eigenvalue of the defining difference, or the worst sampled gap.
    pub margin: f64,
    pub scale: f64,
    /// Vector attaining the margin.
    pub witness: UnitVector,
}

impl OrderVerdict {
    fn new(relation: Relation, margin: f64, scale: f64, witness: UnitVector) -> Self {
        Self {
            relation,
            holds: margin >= -TAU_PSD * scale,
            margin,
            scale,
            witness,
        }
    }
}

fn same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// `A <= B`, i.e. `B - A` positive semidefinite.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<OrderVerdict> {
    same_dim(a, b)?;
    let d = eigh(&b.sub(a)?)?;
    let scale = a.scale_hint().max(b.scale_hint());
    Ok(OrderVerdict::new(Relation::Loewner, d.min(), scale, d.min_vector()))
}

/// Logs of a strictly positive pair and the scale used for their comparison.
fn log_pair(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<(HermitianMatrix, HermitianMatrix, f64)> {
    same_dim(a, b)?;
    let la = fun_calc(a, FunctionTag::Log)?;
    let lb = fun_calc(b, FunctionTag::Log)?;
    let scale = la.scale_hint().max(lb.scale_hint());
    Ok((la, lb, scale))
}

/// `A << B`, i.e. `log A <= log B`.
pub fn chaotic_leq(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<OrderVerdict> {
    let (la, lb, scale) = log_pair(a, b)?;
    let d = eigh(&lb.sub(&la)?)?;
    Ok(OrderVerdict::new(Relation::Chaotic, d.min(), scale, d.min_vector()))
}

/// Tests `A >> B` through `Delta_x(A) >= Delta_x(B)` over `samples` random
/// unit vectors together with the eigenvectors of `log A - log B`.
/// The margin is the worst log-space gap `log Delta_x(A) - log Delta_x(B)`.
pub fn delta_order_sampled(a: &HermitianMatrix, b: &HermitianMatrix, samples: usize, seed: u64) -> Result<OrderVerdict> {
    let (la, lb, scale) = log_pair(a, b)?;
    let ea = DeltaEvaluator::new(a)?;
    let eb = DeltaEvaluator::new(b)?;
    let diff = eigh(&la.sub(&lb)?)?;
    let mut rng = seeded(seed);
    let n = a.dim();
    let candidates = (0..n)
        .map(|j| UnitVector::normalized(diff.vector(j)).expect("eigenvector has unit norm"))
        .chain((0..samples).map(|_| sampling::random_unit_vector(n, &mut rng)));
    let mut worst: Option<(f64, UnitVector)> = None;
    for x in candidates {
        let gap = ea.log_mean(&x)?.value() - eb.log_mean(&x)?.value();
        if worst.as_ref().is_none_or(|(g, _)| gap < *g) {
            worst = Some((gap, x));
        }
    }
    let (margin, witness) = worst.expect("at least one eigenvector");
    Ok(OrderVerdict::new(Relation::DeltaSampled, margin, scale, witness))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KtiVariant {
    Weak,
    Strong,
    Additive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MarginVariant {
    Kti(KtiVariant),
    Mixed { c: f64 },
    Furuta { r: f64 },
}

/// `lambda_min(LHS - RHS)` for one inequality instance, recorded whether or
/// not the inequality holds.
#[derive(Clone, Debug)]
pub struct InequalityMargin {
    pub variant: MarginVariant,
    pub p: f64,
    /// Multiplicative constant, additive constant, or exponent, per variant.
    pub constant_used: f64,
    pub margin: f64,
    pub scale: f64,
    pub holds: bool,
    pub witness: UnitVector,
}

fn margin_of(
    variant: MarginVariant,
    p: f64,
    constant_used: f64,
    lhs: &HermitianMatrix,
    rhs: &HermitianMatrix,
) -> Result<InequalityMargin> {
    let d = eigh(&lhs.sub(rhs)?)?;
    let scale = lhs.scale_hint().max(rhs.scale_hint());
    Ok(InequalityMargin {
        variant,
        p,
        constant_used,
        margin: d.min(),
        scale,
        holds: d.min() >= -TAU_PSD * scale,
        witness: d.min_vector(),
    })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must be a positive real, got {p}")));
    }
    Ok(())
}

/// Validates `A >> B` and the bounds on `B`; defaults to the spectral endpoints of `B`.
fn kti_setup(a: &HermitianMatrix, b: &HermitianMatrix, bounds: Option<SpectralBounds>) -> Result<SpectralBounds> {
    let order = chaotic_leq(b, a)?;
    if !order.holds {
        return Err(Error::Precondition(format!(
            "A >> B fails: lambda_min(log A - log B) = {:.3e}",
            order.margin
        )));
    }
    let bounds = match bounds {
        Some(bd) => bd,
        None => SpectralBounds::of(b)?,
    };
    if !bounds.contains(b)? {
        return Err(Error::Precondition(format!(
            "bounds [{}, {}] do not contain the spectrum of B",
            bounds.lower(),
            bounds.upper()
        )));
    }
    Ok(bounds)
}

fn kti_constant(bounds: SpectralBounds, p: f64, variant: KtiVariant) -> Result<f64> {
    let h = bounds.ratio();
    match variant {
        KtiVariant::Weak => kantorovich(h.powf(p)),
        KtiVariant::Strong => specht_p(h, p),
        KtiVariant::Additive => additive_constant(bounds.lower(), bounds.upper(), p),
    }
}

fn kti_margin(
    ap: &HermitianMatrix,
    bp: &HermitianMatrix,
    bounds: SpectralBounds,
    p: f64,
    variant: KtiVariant,
) -> Result<InequalityMargin> {
    let k = kti_constant(bounds, p, variant)?;
    let lhs = match variant {
        KtiVariant::Weak | KtiVariant::Strong => ap.scale(k),
        KtiVariant::Additive => ap.shift(k),
    };
    margin_of(MarginVariant::Kti(variant), p, k, &lhs, bp)
}

/// Margin of the weak (`K(h^p) A^p >= B^p`), strong (`S(h^p) A^p >= B^p`) or
/// additive (`A^p + C_p(m, M) >= B^p`) inequality under `A >> B`, `mI <= B <= MI`.
pub fn verify_kti(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    bounds: Option<SpectralBounds>,
    p: f64,
    variant: KtiVariant,
) -> Result<InequalityMargin> {
    check_p(p)?;
    let bounds = kti_setup(a, b, bounds)?;
    let ap = fun_calc(a, FunctionTag::Power(p))?;
    let bp = fun_calc(b, FunctionTag::Power(p))?;
    kti_margin(&ap, &bp, bounds, p, variant)
}

/// `c A^p + (S - c)/(S - 1) C_add I >= B^p` for `c` in `[1, S(h^p)]`.
pub fn mixed_bound(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    bounds: Option<SpectralBounds>,
    p: f64,
    c: f64,
) -> Result<InequalityMargin> {
    check_p(p)?;
    let bounds = kti_setup(a, b, bounds)?;
    let s = specht_p(bounds.ratio(), p)?;
    let slack = 1e-12 * s;
    if !(c >= 1.0 - slack && c <= s + slack) {
        return Err(Error::Domain(format!("c must lie in [1, {s}], got {c}")));
    }
    let add = additive_constant(bounds.lower(), bounds.upper(), p)?;
    let weight = if s - 1.0 > f64::EPSILON { ((s - c) / (s - 1.0)).clamp(0.0, 1.0) } else { 0.0 };
    let ap = fun_calc(a, FunctionTag::Power(p))?;
    let bp = fun_calc(b, FunctionTag::Power(p))?;
    let lhs = ap.scale(c).shift(weight * add);
    margin_of(MarginVariant::Mixed { c }, p, weight * add, &lhs, &bp)
}

/// `A^r >= (A^{r/2} B^p A^{r/2})^{r/(p+r)}` under `A >> B`.
pub fn furuta_check(a: &HermitianMatrix, b: &HermitianMatrix, p: f64, r: f64) -> Result<InequalityMargin> {
    if !(p >= 0.0 && r >= 0.0 && p + r > 0.0) || !(p + r).is_finite() {
        return Err(Error::Domain(format!("need p, r >= 0 with p + r > 0, got p = {p}, r = {r}")));
    }
    let order = chaotic_leq(b, a)?;
    if !order.holds {
        return Err(Error::Precondition(format!(
            "A >> B fails: lambda_min(log A - log B) = {:.3e}",
            order.margin
        )));
    }
    let da = eigh(a)?;
    let ar = fun_calc_decomposed(&da, FunctionTag::Power(r))?;
    let ar2 = fun_calc_decomposed(&da, FunctionTag::Power(r / 2.0))?;
    let bp = fun_calc(b, FunctionTag::Power(p))?;
    let inner = HermitianMatrix::symmetrize(ar2.as_matrix() * bp.as_matrix() * ar2.as_matrix())?;
    let rhs = fun_calc(&inner, FunctionTag::Power(r / (p + r)))?;
    margin_of(MarginVariant::Furuta { r }, p, r / (p + r), &ar, &rhs)
}

/// Knobs for [`random_chaotic_pair`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairParams {
    /// Entry scale of the common Hermitian part `K`.
    pub k_scale: f64,
    /// Scale of the PSD gap `P`; zero gives `A = B`.
    pub gap_scale: f64,
    /// Rank of the gap; ignored for diagonal pairs.
    pub gap_rank: usize,
    /// Draw `K` and `P` diagonal (a commuting pair).
    pub diagonal: bool,
    /// Conjugate the pair by a random unitary.
    pub rotate: bool,
}

impl Default for PairParams {
    fn default() -> Self {
        Self {
            k_scale: 0.5,
            gap_scale: 0.5,
            gap_rank: 1,
            diagonal: false,
            rotate: false,
        }
    }
}

/// `A = exp(K + P)`, `B = exp(K)` with `P >= 0`, so `A >> B`.
pub fn random_chaotic_pair(dim: usize, seed: u64, params: PairParams) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let mut rng = seeded(seed);
    random_chaotic_pair_with(dim, params, &mut rng)
}

pub fn random_chaotic_pair_with<R: Rng + ?Sized>(
    dim: usize,
    params: PairParams,
    rng: &mut R,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    if dim == 0 {
        return Err(Error::BadShape { rows: 0, cols: 0 });
    }
    let (k, gap) = if params.diagonal {
        let k: Vec<f64> = (0..dim).map(|_| params.k_scale * sampling::uniform(-1.0, 1.0, rng)).collect();
        let g: Vec<f64> = (0..dim).map(|_| params.gap_scale * rng.random::<f64>()).collect();
        (HermitianMatrix::diag(&k), HermitianMatrix::diag(&g))
    } else {
        (
            sampling::random_hermitian(dim, params.k_scale, rng),
            sampling::random_psd(dim, params.gap_rank, params.gap_scale, rng),
        )
    };
    let a = fun_calc(&k.add(&gap)?, FunctionTag::Exp)?;
    let b = fun_calc(&k, FunctionTag::Exp)?;
    if params.rotate {
        let u = sampling::random_unitary(dim, rng);
        return Ok((a.conjugate_by(&u)?, b.conjugate_by(&u)?));
    }
    Ok((a, b))
}

/// The 2x2 pair with `diag(1,4) << N` but not `diag(1,4) <= N`.
pub fn classic_pair() -> (HermitianMatrix, HermitianMatrix) {
    let lower = HermitianMatrix::diag(&[1.0, 4.0]);
    let upper = HermitianMatrix::from_real_rows(&[&[5.0, 5.0], &[5.0, 10.0]]).expect("symmetric");
    (lower, upper)
}

/// A pair `lower << upper` whose Loewner order fails.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub lower: HermitianMatrix,
    pub upper: HermitianMatrix,
    pub chaotic_margin: f64,
    pub loewner_margin: f64,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    /// The hardcoded pair first, then every verified hit.
    pub pairs: Vec<Counterexample>,
    pub trials: usize,
    pub hits: usize,
}

impl SearchReport {
    pub fn hit_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }
}

fn verified_counterexample(lower: HermitianMatrix, upper: HermitianMatrix) -> Result<Option<Counterexample>> {
    let chaotic = chaotic_leq(&lower, &upper)?;
    let loewner = loewner_leq(&lower, &upper)?;
    if chaotic.holds && !loewner.holds {
        return Ok(Some(Counterexample {
            lower,
            upper,
            chaotic_margin: chaotic.margin,
            loewner_margin: loewner.margin,
        }));
    }
    Ok(None)
}

/// Random search for chaotically but not Loewner ordered pairs.
pub fn counterexample_search(dim: usize, trials: usize, seed: u64) -> Result<SearchReport> {
    if dim < 2 {
        return Err(Error::Precondition(format!(
            "scalars are totally ordered, need dim >= 2, got {dim}"
        )));
    }
    let (lo, hi) = classic_pair();
    let mut pairs = vec![verified_counterexample(lo, hi)?.expect("hardcoded pair is a counterexample")];
    let mut rng = seeded(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let params = PairParams {
            k_scale: sampling::uniform(0.2, 2.0, &mut rng) / (dim as f64).sqrt(),
            gap_scale: sampling::uniform(0.05, 1.5, &mut rng) / dim as f64,
            gap_rank: rng.random_range(1..=dim),
            diagonal: false,
            rotate: true,
        };
        let (a, b) = random_chaotic_pair_with(dim, params, &mut rng)?;
        if let Some(hit) = verified_counterexample(b, a)? {
            hits += 1;
            pairs.push(hit);
        }
    }
    Ok(SearchReport { pairs, trials, hits })
}

#[derive(Clone, Debug)]
pub struct ConverseProbe {
    /// `lambda_min(log A - log B)`; negative when `A >> B` fails.
    pub chaotic_margin: f64,
    /// Strong-inequality margin at each grid value of `p`.
    pub margins: Vec<(f64, f64)>,
    pub scale: Vec<f64>,
    /// First `p` on the grid where the strong inequality fails.
    pub witness_p: Option<f64>,
}

/// Evaluates the strong inequality on a `p`-grid without requiring `A >> B`.
pub fn kti_converse_probe(a: &HermitianMatrix, b: &HermitianMatrix, p_grid: &[f64]) -> Result<ConverseProbe> {
    let (la, lb, _) = log_pair(a, b)?;
    let chaotic_margin = eigh(&la.sub(&lb)?)?.min();
    let bounds = SpectralBounds::of(b)?;
    let da = eigh(a)?;
    let db = eigh(b)?;
    let mut margins = Vec::with_capacity(p_grid.len());
    let mut scale = Vec::with_capacity(p_grid.len());
    let mut witness_p = None;
    for &p in p_grid {
        check_p(p)?;
        let ap = fun_calc_decomposed(&da, FunctionTag::Power(p))?;
        let bp = fun_calc_decomposed(&db, FunctionTag::Power(p))?;
        let m = kti_margin(&ap, &bp, bounds, p, KtiVariant::Strong)?;
        if !m.holds && witness_p.is_none() {
            witness_p = Some(p);
        }
        margins.push((p, m.margin));
        scale.push(m.scale);
    }
    Ok(ConverseProbe {
        chaotic_margin,
        margins,
        scale,
        witness_p,
    })
}

/// A 2x2 pair with `A >> B` failing by a clear margin, for the converse probe.
pub fn converse_probe_pair() -> (HermitianMatrix, HermitianMatrix) {
    let (lower, upper) = classic_pair();
    (lower, upper)
}
