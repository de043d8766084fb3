//! Weight systems: pairs of measures described by their stepline recurrence
//! coefficients, the normalization matrix `D`, and a moment oracle.
//!
//! Two systems ship built in:
//!
//! * [`SystemKind::BesselK`]: `(w1, w2) = x^α (ρ_ν, ρ_{ν+1})` with
//!   `ρ_ν(x) = 2 x^{ν/2} K_ν(2√x)` on `(0, ∞)`, `α > -1`, `ν ≥ 0`.
//! * [`SystemKind::BesselI`]: `(w1, w2) = (ω_{ν,c}, ω_{ν+1,c})` with
//!   `ω_{ν,c}(x) = x^{ν/2} I_ν(2√x) e^{-cx}`, `ν > -1`, `c > 0`.
//!
//! Custom systems are read from a JSON coefficient table.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{gamma, is_decimal_literal, ExtReal, PrecisionContext};

/// A decimal literal kept verbatim until it is converted at some working precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Param(String);

impl Param {
    pub fn new(s: &str) -> Result<Self> {
        let t = s.trim();
        if is_decimal_literal(t) {
            Ok(Self(t.to_owned()))
        } else {
            Err(Error::Parse(format!("not a decimal number: {s:?}")))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn value(&self, ctx: &PrecisionContext) -> ExtReal {
        ctx.parse(&self.0).expect("validated at construction")
    }

    /// Value at a precision high enough that comparisons against small
    /// integers are exact.
    fn exact_cmp_value(&self) -> Float {
        let bits = 64 + 4 * self.0.len() as u32;
        Float::with_val(
            bits,
            Float::parse(&self.0).expect("validated at construction"),
        )
    }
}

impl TryFrom<String> for Param {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Param::new(&s)
    }
}

impl From<Param> for String {
    fn from(p: Param) -> String {
        p.0
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One row of the four-term recurrence `x P_n = P_{n+1} + b_n P_n + c_n P_{n-1} + d_n P_{n-2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteplineTerm {
    pub b: ExtReal,
    pub c: ExtReal,
    pub d: ExtReal,
}

/// Materialized stepline coefficients `b_0..=b_n`, `c_1..=c_n`, `d_2..=d_n`.
///
/// Stored with zero padding so that `c[k]` is `c_k` for every `k`; the
/// padded `c_0`, `d_0`, `d_1` never enter a recurrence with a nonzero factor.
#[derive(Clone, Debug, PartialEq)]
pub struct SteplineCoefficients {
    b: Vec<ExtReal>,
    c: Vec<ExtReal>,
    d: Vec<ExtReal>,
}

impl SteplineCoefficients {
    pub fn from_terms(terms: Vec<SteplineTerm>) -> Self {
        let mut b = Vec::with_capacity(terms.len());
        let mut c = Vec::with_capacity(terms.len());
        let mut d = Vec::with_capacity(terms.len());
        for t in terms {
            b.push(t.b);
            c.push(t.c);
            d.push(t.d);
        }
        Self { b, c, d }
    }

    /// Number of indices held (`b_0..b_{len-1}`).
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn b(&self, n: usize) -> &ExtReal {
        &self.b[n]
    }

    pub fn c(&self, n: usize) -> &ExtReal {
        &self.c[n]
    }

    pub fn d(&self, n: usize) -> &ExtReal {
        &self.d[n]
    }

    pub fn term(&self, n: usize) -> SteplineTerm {
        SteplineTerm {
            b: self.b[n].clone(),
            c: self.c[n].clone(),
            d: self.d[n].clone(),
        }
    }
}

/// Nearest-neighbour recurrence coefficients on the multi-index grid:
///
/// ```text
/// x P_{n,m} = P_{n+1,m} + c_{n,m} P_{n,m} + a_{n,m} P_{n-1,m} + b_{n,m} P_{n,m-1}
/// x P_{n,m} = P_{n,m+1} + d_{n,m} P_{n,m} + a_{n,m} P_{n-1,m} + b_{n,m} P_{n,m-1}
/// ```
#[derive(Clone, Debug, Default)]
pub struct NNCoefficients {
    pub a: BTreeMap<(usize, usize), ExtReal>,
    pub b: BTreeMap<(usize, usize), ExtReal>,
    pub c: BTreeMap<(usize, usize), ExtReal>,
    pub d: BTreeMap<(usize, usize), ExtReal>,
}

impl NNCoefficients {
    pub fn new() -> Self {
        Self::default()
    }

    fn get<'a>(
        map: &'a BTreeMap<(usize, usize), ExtReal>,
        name: &str,
        n: usize,
        m: usize,
    ) -> Result<&'a ExtReal> {
        map.get(&(n, m))
            .ok_or_else(|| Error::IncompleteInput(format!("{name}[{n},{m}]")))
    }
}

/// Converts nearest-neighbour coefficients to stepline coefficients for the
/// indices `0..=upto`.
///
/// With `P_{2k} = P_{k,k}` and `P_{2k+1} = P_{k+1,k}`:
///
/// ```text
/// b_{2k} = c_{k,k}                          b_{2k+1} = d_{k+1,k}
/// c_{2k} = a_{k,k} + b_{k,k}                c_{2k+1} = a_{k+1,k} + b_{k+1,k}
/// d_{2k} = a_{k,k} (c_{k-1,k-1} - d_{k-1,k-1})
/// d_{2k+1} = b_{k+1,k} (d_{k,k-1} - c_{k,k-1})
/// ```
pub fn nn_to_stepline(
    nn: &NNCoefficients,
    upto: usize,
    ctx: &PrecisionContext,
) -> Result<SteplineCoefficients> {
    use NNCoefficients as G;
    let mut terms = Vec::with_capacity(upto + 1);
    for n in 0..=upto {
        let k = n / 2;
        let term = if n % 2 == 0 {
            let b = ctx.lift(G::get(&nn.c, "c", k, k)?);
            let (c, d) = if k == 0 {
                (ctx.zero(), ctx.zero())
            } else {
                let a = G::get(&nn.a, "a", k, k)?;
                let c = ctx.lift(a) + G::get(&nn.b, "b", k, k)?;
                let gap =
                    ctx.lift(G::get(&nn.c, "c", k - 1, k - 1)?) - G::get(&nn.d, "d", k - 1, k - 1)?;
                (c, gap * a)
            };
            SteplineTerm { b, c, d }
        } else {
            let b = ctx.lift(G::get(&nn.d, "d", k + 1, k)?);
            let bb = G::get(&nn.b, "b", k + 1, k)?;
            let c = ctx.lift(G::get(&nn.a, "a", k + 1, k)?) + bb;
            let d = if k == 0 {
                ctx.zero()
            } else {
                let gap = ctx.lift(G::get(&nn.d, "d", k, k - 1)?) - G::get(&nn.c, "c", k, k - 1)?;
                gap * bb
            };
            SteplineTerm { b, c, d }
        };
        terms.push(term);
    }
    Ok(SteplineCoefficients::from_terms(terms))
}

/// Lower-triangular `D = [[D11, 0], [D21, D22]]`, the inverse of the matrix of
/// degree-zero type I constants `[[A1, 0], [A2, B2]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationMatrix {
    pub d11: ExtReal,
    pub d21: ExtReal,
    pub d22: ExtReal,
}

impl NormalizationMatrix {
    pub fn new(d11: ExtReal, d21: ExtReal, d22: ExtReal) -> Result<Self> {
        if d11.is_zero() || d22.is_zero() {
            return Err(Error::Domain("D11 and D22 must be nonzero".into()));
        }
        Ok(Self { d11, d21, d22 })
    }

    /// Inverts `[[a1, 0], [a2, b2]]`.
    pub fn from_type_one(a1: &ExtReal, a2: &ExtReal, b2: &ExtReal) -> Result<Self> {
        if a1.is_zero() || b2.is_zero() {
            return Err(Error::Singular("type I constant matrix is singular".into()));
        }
        let d11 = Float::with_val(a1.prec(), 1) / a1;
        let d22 = Float::with_val(b2.prec(), 1) / b2;
        let d21 = -Float::with_val(a2.prec(), a2 * &d11) * &d22;
        Self::new(d11, d21, d22)
    }

    /// `D · A` for a lower-triangular `A = [[a1, 0], [a2, b2]]`, as `[[m11, m12], [m21, m22]]`.
    pub fn times(&self, a1: &ExtReal, a2: &ExtReal, b2: &ExtReal) -> [[ExtReal; 2]; 2] {
        let p = self.d11.prec();
        let m11 = Float::with_val(p, &self.d11 * a1);
        let m21 = Float::with_val(p, &self.d21 * a1) + Float::with_val(p, &self.d22 * a2);
        let m22 = Float::with_val(p, &self.d22 * b2);
        [[m11, Float::new(p)], [m21, m22]]
    }
}

/// `(A1, A2, B2)` for the Bessel K system:
/// `A1 = 1/(Γ(α+ν+1)Γ(α+1))`, `A2 = -(α+ν+1)/(Γ(α+ν+2)Γ(α+2))`, `B2 = 1/(Γ(α+ν+2)Γ(α+2))`.
pub fn bessel_k_type_one(
    alpha: &ExtReal,
    nu: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<(ExtReal, ExtReal, ExtReal)> {
    check_bessel_k(alpha, nu)?;
    let one = ctx.one();
    let an1 = ctx.lift(alpha) + nu + 1u32;
    let a1p = ctx.lift(alpha) + 1u32;
    let g1 = gamma(&an1, ctx)? * gamma(&a1p, ctx)?;
    let an2 = ctx.lift(&an1) + 1u32;
    let a2p = ctx.lift(&a1p) + 1u32;
    let g2 = gamma(&an2, ctx)? * gamma(&a2p, ctx)?;
    let a1 = ctx.lift(&one) / &g1;
    let b2 = one / &g2;
    let a2 = -(an1 * &b2);
    Ok((a1, a2, b2))
}

/// `(A1, A2, B2) = e^{-1/c} (c^{ν+1}, -c^{ν+2}, c^{ν+3})` for the Bessel I system.
pub fn bessel_i_type_one(
    nu: &ExtReal,
    rate: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<(ExtReal, ExtReal, ExtReal)> {
    check_bessel_i(nu, rate)?;
    let scale = (-(ctx.one() / rate)).exp();
    let p = |shift: u32| -> ExtReal {
        let e = ctx.lift(nu) + shift;
        ctx.lift(rate).pow(&e) * &scale
    };
    Ok((p(1), -p(2), p(3)))
}

pub fn bessel_k_normalization(
    alpha: &ExtReal,
    nu: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<NormalizationMatrix> {
    let (a1, a2, b2) = bessel_k_type_one(alpha, nu, ctx)?;
    NormalizationMatrix::from_type_one(&a1, &a2, &b2)
}

pub fn bessel_i_normalization(
    nu: &ExtReal,
    rate: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<NormalizationMatrix> {
    let (a1, a2, b2) = bessel_i_type_one(nu, rate, ctx)?;
    NormalizationMatrix::from_type_one(&a1, &a2, &b2)
}

fn check_bessel_k(alpha: &ExtReal, nu: &ExtReal) -> Result<()> {
    if !(alpha.is_finite() && *alpha > -1) {
        return Err(Error::Domain("Bessel K system requires alpha > -1".into()));
    }
    if !(nu.is_finite() && *nu >= 0) {
        return Err(Error::Domain("Bessel K system requires nu >= 0".into()));
    }
    Ok(())
}

fn check_bessel_i(nu: &ExtReal, rate: &ExtReal) -> Result<()> {
    if !(nu.is_finite() && *nu > -1) {
        return Err(Error::Domain("Bessel I system requires nu > -1".into()));
    }
    if !(rate.is_finite() && *rate > 0) {
        return Err(Error::Domain("Bessel I system requires c > 0".into()));
    }
    Ok(())
}

/// Stepline coefficients of the Bessel K system at index `n`:
///
/// ```text
/// b_n = (n+α+1)(3n+α+2ν) - (α+1)(ν-1)
/// c_n = n (n+α)(n+α+ν)(3n+2α+ν)
/// d_n = n (n-1)(n+α)(n+α-1)(n+α+ν)(n+α+ν-1)
/// ```
pub fn bessel_k_coeffs(
    alpha: &ExtReal,
    nu: &ExtReal,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<SteplineTerm> {
    check_bessel_k(alpha, nu)?;
    let n = ctx.int(n as i64);
    let a = ctx.lift(alpha);
    let v = ctx.lift(nu);
    let na = ctx.lift(&n) + &a;
    let nav = ctx.lift(&na) + &v;

    let b = (ctx.lift(&na) + 1u32) * (ctx.lift(&n) * 3u32 + &a + ctx.lift(&v) * 2u32)
        - (ctx.lift(&a) + 1u32) * (ctx.lift(&v) - 1u32);
    let c = ctx.lift(&n) * &na * &nav * (ctx.lift(&n) * 3u32 + ctx.lift(&a) * 2u32 + &v);
    let d = ctx.lift(&n)
        * (ctx.lift(&n) - 1u32)
        * &na
        * (ctx.lift(&na) - 1u32)
        * &nav
        * (ctx.lift(&nav) - 1u32);
    Ok(SteplineTerm { b, c, d })
}

/// Stepline coefficients of the Bessel I system at index `n`:
///
/// ```text
/// b_n = (1 + c(ν+2n+1)) / c²
/// c_n = n (2 + c(ν+n)) / c³
/// d_n = n (n-1) / c⁴
/// ```
pub fn bessel_i_coeffs(
    nu: &ExtReal,
    rate: &ExtReal,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<SteplineTerm> {
    check_bessel_i(nu, rate)?;
    let n = ctx.int(n as i64);
    let c = ctx.lift(rate);
    let c2 = ctx.lift(&c).square();
    let c3 = ctx.lift(&c2) * &c;
    let c4 = ctx.lift(&c2).square();

    let b = (ctx.lift(&c) * (ctx.lift(nu) + ctx.lift(&n) * 2u32 + 1u32) + 1u32) / c2;
    let cc = ctx.lift(&n) * (ctx.lift(&c) * (ctx.lift(nu) + &n) + 2u32) / c3;
    let d = ctx.lift(&n) * (ctx.lift(&n) - 1u32) / c4;
    Ok(SteplineTerm { b, c: cc, d })
}

/// n-th moment `Γ(n+α+ν_j+1) Γ(n+α+1)` of `x^α ρ_{ν_j}`.
fn bessel_k_moment(
    alpha: &ExtReal,
    nu_j: &ExtReal,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<ExtReal> {
    let na = ctx.lift(alpha) + (n as u64) + 1u32;
    let nav = ctx.lift(&na) + nu_j;
    Ok(gamma(&nav, ctx)? * gamma(&na, ctx)?)
}

/// n-th moment of `ω_{ν_j,c}` from the series
/// `Σ_k Γ(n+k+ν_j+1) / (k! Γ(k+ν_j+1) c^{n+k+ν_j+1})`, integrated term by term.
fn bessel_i_moment(
    nu_j: &ExtReal,
    rate: &ExtReal,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<ExtReal> {
    let (sum, _) = bessel_i_moment_series(nu_j, rate, n, ctx, None)?;
    Ok(sum)
}

/// Returns the partial sum and the number of terms used. With `terms = Some(k)`
/// exactly `k` terms are summed; otherwise summation stops once the terms
/// are decreasing quickly and fall below `10^-(digits+guard)` of the sum.
pub(crate) fn bessel_i_moment_series(
    nu_j: &ExtReal,
    rate: &ExtReal,
    n: usize,
    ctx: &PrecisionContext,
    terms: Option<usize>,
) -> Result<(ExtReal, usize)> {
    let nn = n as u64;
    let base = ctx.lift(nu_j) + nn + 1u32;
    let mut term =
        gamma(&base, ctx)? / gamma(&(ctx.lift(nu_j) + 1u32), ctx)? / ctx.lift(rate).pow(&base);
    let tol = ctx.working_tol(0);
    let mut sum = ctx.zero();
    let mut k: u64 = 0;
    loop {
        sum += &term;
        k += 1;
        // term_{k} / term_{k-1} = (n+k+ν_j) / (k (k+ν_j) c)
        let ratio = (ctx.lift(nu_j) + nn + k) / ((ctx.lift(nu_j) + k) * k) / rate;
        term *= &ratio;
        match terms {
            Some(limit) => {
                if k as usize >= limit {
                    break;
                }
            }
            None => {
                let small = ctx.lift(&sum).abs() * &tol;
                if ratio < 0.5 && ctx.lift(&term).abs() < small {
                    break;
                }
                if k > 1_000_000 {
                    return Err(Error::NoConvergence("moment series".into()));
                }
            }
        }
    }
    Ok((sum, k as usize))
}

/// User-supplied stepline table, optionally with `D` and moment tables.
///
/// On disk this is a JSON object whose numbers are all decimal strings; `c`
/// starts at index 1 and `d` at index 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomStepline {
    pub b: Vec<Param>,
    pub c: Vec<Param>,
    pub d: Vec<Param>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<[[Param; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments1: Option<Vec<Param>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments2: Option<Vec<Param>>,
}

impl CustomStepline {
    pub fn from_json(text: &str) -> Result<Self> {
        let table: CustomStepline = serde_json::from_str(text)?;
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if let Some(dm) = &self.normalization {
            if !dm[0][1].exact_cmp_value().is_zero() {
                return Err(Error::Domain("D must be lower triangular (D12 = 0)".into()));
            }
            if dm[0][0].exact_cmp_value().is_zero() || dm[1][1].exact_cmp_value().is_zero() {
                return Err(Error::Domain("D11 and D22 must be nonzero".into()));
            }
        }
        Ok(())
    }

    fn term(&self, n: usize, ctx: &PrecisionContext) -> Result<SteplineTerm> {
        let b = self
            .b
            .get(n)
            .ok_or_else(|| Error::IncompleteInput(format!("b[{n}]")))?
            .value(ctx);
        let c = if n >= 1 {
            self.c
                .get(n - 1)
                .ok_or_else(|| Error::IncompleteInput(format!("c[{n}]")))?
                .value(ctx)
        } else {
            ctx.zero()
        };
        let d = if n >= 2 {
            self.d
                .get(n - 2)
                .ok_or_else(|| Error::IncompleteInput(format!("d[{n}]")))?
                .value(ctx)
        } else {
            ctx.zero()
        };
        Ok(SteplineTerm { b, c, d })
    }
}

/// Which family a [`WeightSystem`] belongs to, with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemKind {
    BesselK { alpha: Param, nu: Param },
    BesselI { nu: Param, rate: Param },
    CustomStepline(Box<CustomStepline>),
}

/// Serializable description of a system, as embedded in rule files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SystemDescriptor {
    #[serde(rename = "besselK")]
    BesselK { alpha: Param, nu: Param },
    #[serde(rename = "besselI")]
    BesselI { nu: Param, c: Param },
    #[serde(rename = "custom")]
    Custom(CustomStepline),
}

/// A pair of measures `(μ1, μ2)` known through its stepline recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    kind: SystemKind,
}

impl WeightSystem {
    pub fn bessel_k(alpha: &str, nu: &str) -> Result<Self> {
        let alpha = Param::new(alpha)?;
        let nu = Param::new(nu)?;
        check_bessel_k(&alpha.exact_cmp_value(), &nu.exact_cmp_value())?;
        Ok(Self {
            kind: SystemKind::BesselK { alpha, nu },
        })
    }

    pub fn bessel_i(nu: &str, c: &str) -> Result<Self> {
        let nu = Param::new(nu)?;
        let rate = Param::new(c)?;
        check_bessel_i(&nu.exact_cmp_value(), &rate.exact_cmp_value())?;
        Ok(Self {
            kind: SystemKind::BesselI { nu, rate },
        })
    }

    pub fn custom(table: CustomStepline) -> Result<Self> {
        table.validate()?;
        Ok(Self {
            kind: SystemKind::CustomStepline(Box::new(table)),
        })
    }

    pub fn from_custom_json(text: &str) -> Result<Self> {
        Self::custom(CustomStepline::from_json(text)?)
    }

    pub fn from_descriptor(desc: &SystemDescriptor) -> Result<Self> {
        match desc {
            SystemDescriptor::BesselK { alpha, nu } => Self::bessel_k(alpha.as_str(), nu.as_str()),
            SystemDescriptor::BesselI { nu, c } => Self::bessel_i(nu.as_str(), c.as_str()),
            SystemDescriptor::Custom(t) => Self::custom(t.clone()),
        }
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn descriptor(&self) -> SystemDescriptor {
        match &self.kind {
            SystemKind::BesselK { alpha, nu } => SystemDescriptor::BesselK {
                alpha: alpha.clone(),
                nu: nu.clone(),
            },
            SystemKind::BesselI { nu, rate } => SystemDescriptor::BesselI {
                nu: nu.clone(),
                c: rate.clone(),
            },
            SystemKind::CustomStepline(t) => SystemDescriptor::Custom((**t).clone()),
        }
    }

    /// `(b_n, c_n, d_n)`.
    pub fn coefficients(&self, n: usize, ctx: &PrecisionContext) -> Result<SteplineTerm> {
        match &self.kind {
            SystemKind::BesselK { alpha, nu } => {
                bessel_k_coeffs(&alpha.value(ctx), &nu.value(ctx), n, ctx)
            }
            SystemKind::BesselI { nu, rate } => {
                bessel_i_coeffs(&nu.value(ctx), &rate.value(ctx), n, ctx)
            }
            SystemKind::CustomStepline(t) => t.term(n, ctx),
        }
    }

    /// Coefficients for the indices `0..len`.
    pub fn stepline(&self, len: usize, ctx: &PrecisionContext) -> Result<SteplineCoefficients> {
        let terms = (0..len)
            .map(|n| self.coefficients(n, ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(SteplineCoefficients::from_terms(terms))
    }

    pub fn normalization(&self, ctx: &PrecisionContext) -> Result<NormalizationMatrix> {
        match &self.kind {
            SystemKind::BesselK { alpha, nu } => {
                bessel_k_normalization(&alpha.value(ctx), &nu.value(ctx), ctx)
            }
            SystemKind::BesselI { nu, rate } => {
                bessel_i_normalization(&nu.value(ctx), &rate.value(ctx), ctx)
            }
            SystemKind::CustomStepline(t) => match &t.normalization {
                Some(dm) => NormalizationMatrix::new(
                    dm[0][0].value(ctx),
                    dm[1][0].value(ctx),
                    dm[1][1].value(ctx),
                ),
                None => Err(Error::IncompleteInput("normalization matrix D".into())),
            },
        }
    }

    /// The type I constant matrix `[[A1, 0], [A2, B2]]` for the built-in systems.
    pub fn type_one_constants(
        &self,
        ctx: &PrecisionContext,
    ) -> Option<Result<(ExtReal, ExtReal, ExtReal)>> {
        match &self.kind {
            SystemKind::BesselK { alpha, nu } => {
                Some(bessel_k_type_one(&alpha.value(ctx), &nu.value(ctx), ctx))
            }
            SystemKind::BesselI { nu, rate } => {
                Some(bessel_i_type_one(&nu.value(ctx), &rate.value(ctx), ctx))
            }
            SystemKind::CustomStepline(_) => None,
        }
    }

    /// Whether `moment(measure, ..)` can be answered. `measure` is 1 or 2.
    pub fn has_moments(&self, measure: usize) -> bool {
        match &self.kind {
            SystemKind::BesselK { .. } | SystemKind::BesselI { .. } => true,
            SystemKind::CustomStepline(t) => match measure {
                1 => t.moments1.is_some(),
                2 => t.moments2.is_some(),
                _ => false,
            },
        }
    }

    /// `∫ x^n dμ_j`, `j ∈ {1, 2}`.
    pub fn moment(&self, measure: usize, n: usize, ctx: &PrecisionContext) -> Result<ExtReal> {
        if measure != 1 && measure != 2 {
            return Err(Error::Domain(format!(
                "measure index must be 1 or 2, got {measure}"
            )));
        }
        let shift = (measure - 1) as u32;
        match &self.kind {
            SystemKind::BesselK { alpha, nu } => {
                let nu_j = nu.value(ctx) + shift;
                bessel_k_moment(&alpha.value(ctx), &nu_j, n, ctx)
            }
            SystemKind::BesselI { nu, rate } => {
                let nu_j = nu.value(ctx) + shift;
                bessel_i_moment(&nu_j, &rate.value(ctx), n, ctx)
            }
            SystemKind::CustomStepline(t) => {
                let table = if measure == 1 {
                    &t.moments1
                } else {
                    &t.moments2
                };
                let table = table.as_ref().ok_or(Error::UnsupportedOracle { measure })?;
                table
                    .get(n)
                    .map(|p| p.value(ctx))
                    .ok_or_else(|| Error::IncompleteInput(format!("moments{measure}[{n}]")))
            }
        }
    }
}
