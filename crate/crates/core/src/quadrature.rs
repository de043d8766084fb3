//! Simultaneous Gaussian quadrature rules.
//!
//! For the eigenvalue `x_j` of `H_N` with right eigenvector `v` (first
//! component 1) and left eigenvector `u`,
//!
//! ```text
//! λ1_j = D11 u(1) / ⟨u, v⟩
//! λ2_j = (D21 u(1) + D22 u(2)) / ⟨u, v⟩
//! ```
//!
//! Both formulas are invariant under rescaling `u`.

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::hessenberg::{dot, BandedHessenberg, EigenPair};
use crate::precision::{cos_fn, exp_neg, format_sci, rel_err, ExtReal, PrecisionContext};
use crate::roots::eigen_pairs;
use crate::systems::{NormalizationMatrix, Param, SystemDescriptor, WeightSystem};
use crate::vandermonde::solve_moment_system;

/// Per-node certificates carried along with a rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    pub right: Vec<ExtReal>,
    pub left: Vec<ExtReal>,
    pub newton: Vec<ExtReal>,
}

/// `N` ascending nodes with one weight vector per measure.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub system: SystemDescriptor,
    pub n: usize,
    pub digits: u32,
    pub nodes: Vec<ExtReal>,
    pub weights1: Vec<ExtReal>,
    pub weights2: Vec<ExtReal>,
    pub residuals: Residuals,
}

/// Weights for one eigenpair. With `N = 1` there is no `u(2)` and it is taken as 0.
pub fn pair_weights(
    left: &[ExtReal],
    right: &[ExtReal],
    node: &ExtReal,
    dm: &NormalizationMatrix,
    ctx: &PrecisionContext,
) -> Result<(ExtReal, ExtReal)> {
    let ip = dot(left, right);
    let scale = left
        .iter()
        .zip(right)
        .fold(ctx.zero(), |acc, (u, v)| acc + ctx.lift(u * v).abs());
    if ip.is_zero() || ctx.lift(&ip).abs() <= ctx.working_tol(5) * scale {
        return Err(Error::InnerProductCollapse {
            node: format_sci(node, 20),
        });
    }
    let u1 = &left[0];
    let w1 = ctx.lift(&dm.d11) * u1 / &ip;
    let mut num2 = ctx.lift(&dm.d21) * u1;
    if let Some(u2) = left.get(1) {
        num2 += Float::with_val(ctx.bits(), &dm.d22 * u2);
    }
    Ok((w1, num2 / ip))
}

/// Weights for every eigenpair.
pub fn weights_from_pairs(
    pairs: &[EigenPair],
    dm: &NormalizationMatrix,
    ctx: &PrecisionContext,
) -> Result<(Vec<ExtReal>, Vec<ExtReal>)> {
    let mut w1 = Vec::with_capacity(pairs.len());
    let mut w2 = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (a, b) = pair_weights(&p.left, &p.right, &p.node, dm, ctx)?;
        w1.push(a);
        w2.push(b);
    }
    Ok((w1, w2))
}

/// Eigenpairs of `H_N` for `system`.
pub fn solve_pairs(
    system: &WeightSystem,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<EigenPair>> {
    let h = BandedHessenberg::build(system, n, ctx)?;
    eigen_pairs(&h, ctx)
}

/// Guard digits beyond which a residual failure is reported.
pub const MAX_GUARD: u32 = 640;

/// Eigenpairs of `H_N` whose residual certificates all hold, together with
/// the context they were computed in.
///
/// The left-eigenvector residual is `|P_N|` at the rounded node, which grows
/// with `N` faster than the vectors do. When it misses its bound the whole
/// computation is repeated with the guard doubled, up to [`MAX_GUARD`].
pub fn certified_pairs(
    system: &WeightSystem,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<(Vec<EigenPair>, PrecisionContext)> {
    let mut work = *ctx;
    loop {
        match solve_pairs(system, n, &work) {
            Err(Error::Residual { .. }) if work.guard() < MAX_GUARD => {
                work = work
                    .regarded((work.guard() * 2).clamp(PrecisionContext::DEFAULT_GUARD, MAX_GUARD));
            }
            Ok(pairs) => return Ok((pairs, work)),
            Err(e) => return Err(e),
        }
    }
}

/// Builds the `N`-point rule for `system`.
pub fn make_rule(
    system: &WeightSystem,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<QuadratureRule> {
    let (pairs, work) = certified_pairs(system, n, ctx)?;
    let dm = system.normalization(&work)?;
    rule_from_pairs(system, &pairs, &dm, &work)
}

pub fn rule_from_pairs(
    system: &WeightSystem,
    pairs: &[EigenPair],
    dm: &NormalizationMatrix,
    ctx: &PrecisionContext,
) -> Result<QuadratureRule> {
    let (weights1, weights2) = weights_from_pairs(pairs, dm, ctx)?;
    Ok(QuadratureRule {
        system: system.descriptor(),
        n: pairs.len(),
        digits: ctx.digits(),
        nodes: pairs.iter().map(|p| p.node.clone()).collect(),
        weights1,
        weights2,
        residuals: Residuals {
            right: pairs.iter().map(|p| p.right_residual.clone()).collect(),
            left: pairs.iter().map(|p| p.left_residual.clone()).collect(),
            newton: pairs.iter().map(|p| p.newton_residual.clone()).collect(),
        },
    })
}

/// `(Σ λ1_k f(x_k), Σ λ2_k f(x_k))`, summed in ascending node order.
pub fn integrate<F>(rule: &QuadratureRule, mut f: F) -> Result<(ExtReal, ExtReal)>
where
    F: FnMut(&ExtReal) -> std::result::Result<ExtReal, String>,
{
    let bits = rule.nodes.first().map_or(64, |x| x.prec());
    let mut s1 = Float::new(bits);
    let mut s2 = Float::new(bits);
    for ((x, w1), w2) in rule.nodes.iter().zip(&rule.weights1).zip(&rule.weights2) {
        let fx = f(x).map_err(|reason| Error::Integrand {
            node: format_sci(x, 20),
            reason,
        })?;
        if !fx.is_finite() {
            return Err(Error::Integrand {
                node: format_sci(x, 20),
                reason: "non-finite value".into(),
            });
        }
        s1 += Float::with_val(bits, w1 * &fx);
        s2 += Float::with_val(bits, w2 * &fx);
    }
    Ok((s1, s2))
}

/// Named integrands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integrand {
    One,
    ExpNeg,
    Cos,
    Power(u32),
    /// `Σ a_k x^k`, coefficients from degree 0 upward.
    Poly(Vec<Param>),
}

impl Integrand {
    /// `one`, `exp_neg`, `cos`, `power:k` or `polycoeffs:a0,a1,…`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "one" => return Ok(Self::One),
            "exp_neg" => return Ok(Self::ExpNeg),
            "cos" => return Ok(Self::Cos),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("power:") {
            return k
                .trim()
                .parse::<u32>()
                .map(Self::Power)
                .map_err(|_| Error::Parse(format!("bad power exponent {k:?}")));
        }
        if let Some(list) = s.strip_prefix("polycoeffs:") {
            let coeffs = list
                .split(',')
                .map(Param::new)
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self::Poly(coeffs));
        }
        Err(Error::Parse(format!(
            "unknown integrand {s:?} (expected one, exp_neg, cos, power:k, polycoeffs:list)"
        )))
    }

    pub fn eval(&self, x: &ExtReal, ctx: &PrecisionContext) -> ExtReal {
        match self {
            Self::One => ctx.one(),
            Self::ExpNeg => exp_neg(x, ctx),
            Self::Cos => cos_fn(x, ctx),
            Self::Power(k) => ctx.lift(x).pow(*k),
            Self::Poly(coeffs) => coeffs
                .iter()
                .rev()
                .fold(ctx.zero(), |acc, a| acc * x + a.value(ctx)),
        }
    }
}

/// Integrates a named integrand.
pub fn integrate_named(
    rule: &QuadratureRule,
    f: &Integrand,
    ctx: &PrecisionContext,
) -> Result<(ExtReal, ExtReal)> {
    integrate(rule, |x| Ok(f.eval(x, ctx)))
}

/// Independent weights from the moment equations `Σ_k λ_k x_k^m = m_j(m)`, `m < N`.
pub fn weights_oracle(
    nodes: &[ExtReal],
    system: &WeightSystem,
    ctx: &PrecisionContext,
) -> Result<(Vec<ExtReal>, Vec<ExtReal>)> {
    let n = nodes.len();
    let nodes: Vec<ExtReal> = nodes.iter().map(|x| ctx.lift(x)).collect();
    let mut out = Vec::with_capacity(2);
    for j in 1..=2 {
        let rhs = (0..n)
            .map(|m| system.moment(j, m, ctx))
            .collect::<Result<Vec<_>>>()?;
        out.push(solve_moment_system(&nodes, &rhs)?);
    }
    let w2 = out.pop().expect("two measures");
    let w1 = out.pop().expect("two measures");
    Ok((w1, w2))
}

/// Highest polynomial degree integrated exactly by the `N`-point rule, per measure.
///
/// `N = 2n` (multi-index `(n, n)`): `3n - 1` for both measures.
/// `N = 2n + 1` (multi-index `(n+1, n)`): `3n + 1` for `μ1` and `3n` for `μ2`.
pub fn exactness_degrees(n: usize) -> (usize, usize) {
    let half = n / 2;
    if n.is_multiple_of(2) {
        (3 * half - 1, 3 * half - 1)
    } else {
        (3 * half + 1, 3 * half)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeCheck {
    pub degree: usize,
    pub rel_error: ExtReal,
    pub tolerance: ExtReal,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureReport {
    pub measure: usize,
    pub claimed_degree: usize,
    pub checks: Vec<DegreeCheck>,
}

impl MeasureReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessReport {
    pub n: usize,
    pub measures: Vec<MeasureReport>,
}

impl ExactnessReport {
    pub fn pass(&self) -> bool {
        self.measures.iter().all(MeasureReport::pass)
    }
}

/// Compares `Σ λ_k x_k^m` with the m-th moment for every claimed degree.
///
/// The tolerance `10^(-digits + 25 + m)` grows with the degree. Failures are
/// reported, not raised; only a missing moment oracle is an error.
pub fn verify_exactness(
    rule: &QuadratureRule,
    system: &WeightSystem,
    ctx: &PrecisionContext,
) -> Result<ExactnessReport> {
    let (deg1, deg2) = exactness_degrees(rule.n);
    let mut measures = Vec::with_capacity(2);
    for (j, claimed, weights) in [(1usize, deg1, &rule.weights1), (2, deg2, &rule.weights2)] {
        if !system.has_moments(j) {
            return Err(Error::UnsupportedOracle { measure: j });
        }
        let mut checks = Vec::with_capacity(claimed + 1);
        // powers x_k^m built incrementally
        let mut powers: Vec<ExtReal> = rule.nodes.iter().map(|_| ctx.one()).collect();
        for m in 0..=claimed {
            let sum = powers
                .iter()
                .zip(weights.iter())
                .fold(ctx.zero(), |acc, (p, w)| {
                    acc + Float::with_val(ctx.bits(), p * w)
                });
            let exact = system.moment(j, m, ctx)?;
            let rel_error = rel_err(&sum, &exact);
            let tolerance = ctx.tol(25 + m as i64);
            let pass = rel_error <= tolerance;
            checks.push(DegreeCheck {
                degree: m,
                rel_error,
                tolerance,
                pass,
            });
            for (p, x) in powers.iter_mut().zip(&rule.nodes) {
                *p *= x;
            }
        }
        measures.push(MeasureReport {
            measure: j,
            claimed_degree: claimed,
            checks,
        });
    }
    Ok(ExactnessReport {
        n: rule.n,
        measures,
    })
}

/// Sign counts of the weights of one measure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SignCount {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Observed weight signs and magnitudes. Positivity is reported, never assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightReport {
    pub signs: [SignCount; 2],
    pub largest_node: ExtReal,
    pub smallest_weight: [ExtReal; 2],
}

impl WeightReport {
    pub fn all_positive(&self) -> bool {
        self.signs.iter().all(|s| s.negative == 0 && s.zero == 0)
    }
}

pub fn weight_report(rule: &QuadratureRule) -> WeightReport {
    let count = |ws: &[ExtReal]| {
        let mut c = SignCount::default();
        for w in ws {
            if w.is_zero() {
                c.zero += 1;
            } else if w.is_sign_negative() {
                c.negative += 1;
            } else {
                c.positive += 1;
            }
        }
        c
    };
    let smallest = |ws: &[ExtReal]| {
        ws.iter()
            .map(|w| w.clone().abs())
            .min_by(|a, b| a.partial_cmp(b).expect("finite weights"))
            .unwrap_or_else(|| Float::new(64))
    };
    WeightReport {
        signs: [count(&rule.weights1), count(&rule.weights2)],
        largest_node: rule.nodes.last().cloned().unwrap_or_else(|| Float::new(64)),
        smallest_weight: [smallest(&rule.weights1), smallest(&rule.weights2)],
    }
}
