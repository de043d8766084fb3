//! Eigenvalues of `H_N` as the zeros of `P_N`.
//!
//! Seeds come from a double-precision eigen decomposition of a balanced copy
//! of `H_N`; each seed is polished by Newton's method on the forward
//! recurrence at working precision. When the seeds are not all real and
//! distinct, all zeros are refined together by Aberth–Ehrlich iteration in
//! complex arithmetic and then polished again on the real line.

use nalgebra::{DMatrix, Schur};
use rug::Float;

use crate::error::{Error, Result};
use crate::hessenberg::{BandedHessenberg, EigenPair};
use crate::precision::{format_sci, ExtReal, PrecisionContext};
use crate::systems::WeightSystem;

const NEWTON_MAX_ITER: usize = 200;
const ABERTH_MAX_SWEEPS: usize = 2000;

/// A polished zero of `P_N` with its Newton step at acceptance.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedNode {
    pub x: ExtReal,
    pub newton_residual: ExtReal,
}

/// How the nodes were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedRoute {
    /// Real double-precision seeds polished by Newton.
    Newton,
    /// Aberth–Ehrlich refinement after the real seeds were rejected.
    Aberth,
}

/// Sorted zeros of `P_N` for `system`.
pub fn eigen_nodes(
    system: &WeightSystem,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<ExtReal>> {
    let h = BandedHessenberg::build(system, n, ctx)?;
    Ok(find_nodes(&h, ctx)?.0.into_iter().map(|c| c.x).collect())
}

/// Nodes with right and left eigenvectors, ascending.
pub fn eigen_pairs(h: &BandedHessenberg, ctx: &PrecisionContext) -> Result<Vec<EigenPair>> {
    let (nodes, _) = find_nodes(h, ctx)?;
    nodes
        .into_iter()
        .map(|c| EigenPair::new(h, c.x, c.newton_residual, ctx))
        .collect()
}

/// All `N` zeros of `P_N`, strictly ascending and certified.
pub fn find_nodes(
    h: &BandedHessenberg,
    ctx: &PrecisionContext,
) -> Result<(Vec<CertifiedNode>, SeedRoute)> {
    let seeds = double_seeds(h);
    if let Some(real) = real_seeds(&seeds) {
        if let Ok(nodes) = polish_all(h, &real, ctx) {
            return Ok((nodes, SeedRoute::Newton));
        }
    }
    let refined = aberth(h, &seeds, ctx)?;
    let scale_tol = ctx.tol(0).sqrt();
    let mut real = Vec::with_capacity(refined.len());
    for z in &refined {
        let mag = ctx.lift(&z.re).abs().max(&ctx.one());
        if ctx.lift(&z.im).abs() > ctx.lift(&scale_tol) * mag {
            return Err(Error::RealityFailure {
                near: format_sci(&z.re, 20),
                imag: format_sci(&z.im, 6),
            });
        }
        real.push(ctx.lift(&z.re));
    }
    Ok((polish_all(h, &real, ctx)?, SeedRoute::Aberth))
}

/// Newton-polishes every seed, sorts, and checks certificates and separation.
fn polish_all(
    h: &BandedHessenberg,
    seeds: &[ExtReal],
    ctx: &PrecisionContext,
) -> Result<Vec<CertifiedNode>> {
    let mut nodes = seeds
        .iter()
        .map(|s| newton_polish(h, s, ctx))
        .collect::<Result<Vec<_>>>()?;
    nodes.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite nodes"));
    let sep = ctx.tol(0).sqrt();
    for w in nodes.windows(2) {
        let scale = ctx.lift(&w[1].x).abs().max(&ctx.one());
        let gap = ctx.lift(&w[1].x) - &w[0].x;
        if gap <= ctx.lift(&sep) * scale {
            return Err(Error::Multiplicity {
                near: format_sci(&w[0].x, 20),
                gap: format_sci(&gap, 6),
            });
        }
    }
    Ok(nodes)
}

/// Newton on `P_N` from `seed` until the step stalls at working precision.
pub fn newton_polish(
    h: &BandedHessenberg,
    seed: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<CertifiedNode> {
    let mut x = ctx.lift(seed);
    let floor = ctx.working_tol(3);
    let mut last_step: Option<ExtReal> = None;
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = h.char_poly(&x);
        if dp.is_zero() {
            if p.is_zero() {
                break;
            }
            return Err(Error::NoConvergence(format!(
                "vanishing derivative at {}",
                format_sci(&x, 20)
            )));
        }
        let step = p / dp;
        let mag = ctx.lift(&x).abs().max(&ctx.one());
        let size = ctx.lift(&step).abs();
        x -= &step;
        if size <= ctx.lift(&floor) * &mag {
            break;
        }
        // quadratic convergence has ended once the step stops shrinking
        if let Some(prev) = &last_step {
            if size >= *prev && size <= ctx.tol(0) * &mag {
                break;
            }
        }
        last_step = Some(size);
    }
    let (p, dp) = h.char_poly(&x);
    let residual = if dp.is_zero() {
        if p.is_zero() {
            ctx.zero()
        } else {
            return Err(Error::NoConvergence(format!(
                "vanishing derivative at {}",
                format_sci(&x, 20)
            )));
        }
    } else {
        (p / dp).abs()
    };
    let bound = ctx.tol(5) * ctx.lift(&x).abs().max(&ctx.one());
    if residual >= bound || !x.is_finite() {
        return Err(Error::NoConvergence(format!(
            "Newton step {} at {} exceeds {}",
            format_sci(&residual, 6),
            format_sci(&x, 20),
            format_sci(&bound, 6)
        )));
    }
    Ok(CertifiedNode {
        x,
        newton_residual: residual,
    })
}

/// Eigenvalues of a balanced double-precision copy of `H_N`.
pub fn double_seeds(h: &BandedHessenberg) -> Vec<(f64, f64)> {
    let n = h.dim();
    if n == 1 {
        return vec![(h.b(0).to_f64(), 0.0)];
    }
    let mut m = h.to_f64();
    balance(&mut m);
    match Schur::try_new(m, f64::EPSILON, 10_000) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect(),
        None => {
            // Fall back to points spread over the Gershgorin span.
            let (lo, hi) = gershgorin(h);
            (0..n)
                .map(|k| {
                    let t = (k as f64 + 0.5) / n as f64;
                    (lo + (hi - lo) * t, (hi - lo) * 1e-3)
                })
                .collect()
        }
    }
}

fn gershgorin(h: &BandedHessenberg) -> (f64, f64) {
    let n = h.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let centre = h.b(i).to_f64();
        let mut r = 0.0;
        for j in 0..n {
            if j != i {
                r += h.entry(i, j).to_f64().abs();
            }
        }
        lo = lo.min(centre - r);
        hi = hi.max(centre + r);
    }
    (lo, hi)
}

/// Parlett–Reinsch diagonal similarity scaling by powers of two.
pub fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c >= g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn real_seeds(seeds: &[(f64, f64)]) -> Option<Vec<ExtReal>> {
    let mut out = Vec::with_capacity(seeds.len());
    for &(re, im) in seeds {
        if !re.is_finite() || im.abs() > 1e-8 * re.abs().max(1.0) {
            return None;
        }
        out.push(Float::with_val(64, re));
    }
    Some(out)
}

/// Complex number with extended-precision parts.
#[derive(Clone, Debug)]
pub(crate) struct Cx {
    pub re: Float,
    pub im: Float,
}

impl Cx {
    fn new(bits: u32, re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(bits, re),
            im: Float::with_val(bits, im),
        }
    }

    fn zero(bits: u32) -> Self {
        Self::new(bits, 0.0, 0.0)
    }

    fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: Float::with_val(self.re.prec(), &self.re + &o.re),
            im: Float::with_val(self.re.prec(), &self.im + &o.im),
        }
    }

    fn sub(&self, o: &Cx) -> Cx {
        Cx {
            re: Float::with_val(self.re.prec(), &self.re - &o.re),
            im: Float::with_val(self.re.prec(), &self.im - &o.im),
        }
    }

    fn mul(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        Cx {
            re: Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im),
            im: Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re),
        }
    }

    fn scale(&self, s: &Float) -> Cx {
        Cx {
            re: Float::with_val(self.re.prec(), &self.re * s),
            im: Float::with_val(self.re.prec(), &self.im * s),
        }
    }

    fn norm_sqr(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn div(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        let den = o.norm_sqr();
        let re = Float::with_val(p, &self.re * &o.re) + Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.im * &o.re) - Float::with_val(p, &self.re * &o.im);
        Cx {
            re: re / &den,
            im: im / &den,
        }
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// `(P_N(z), P_N'(z))` for complex `z`.
fn char_poly_complex(h: &BandedHessenberg, z: &Cx) -> (Cx, Cx) {
    let bits = z.re.prec();
    let one = Cx::new(bits, 1.0, 0.0);
    let mut p = [Cx::zero(bits), Cx::zero(bits), one];
    let mut q = [Cx::zero(bits), Cx::zero(bits), Cx::zero(bits)];
    for k in 0..h.dim() {
        let shift = Cx {
            re: Float::with_val(bits, &z.re - h.b(k)),
            im: z.im.clone(),
        };
        let mut pn = shift.mul(&p[2]);
        let mut qn = shift.mul(&q[2]).add(&p[2]);
        if k >= 1 {
            pn = pn.sub(&p[1].scale(h.c(k)));
            qn = qn.sub(&q[1].scale(h.c(k)));
        }
        if k >= 2 {
            pn = pn.sub(&p[0].scale(h.d(k)));
            qn = qn.sub(&q[0].scale(h.d(k)));
        }
        p.rotate_left(1);
        q.rotate_left(1);
        p[2] = pn;
        q[2] = qn;
    }
    let [_, _, pn] = p;
    let [_, _, qn] = q;
    (pn, qn)
}

/// Simultaneous Aberth–Ehrlich refinement of all zeros of `P_N`.
pub(crate) fn aberth(
    h: &BandedHessenberg,
    seeds: &[(f64, f64)],
    ctx: &PrecisionContext,
) -> Result<Vec<Cx>> {
    let bits = ctx.bits();
    let n = h.dim();
    let (lo, hi) = gershgorin(h);
    let spread = (hi - lo).abs().max(1.0);
    let mut z: Vec<Cx> = Vec::with_capacity(n);
    for (k, &(re, im)) in seeds.iter().enumerate() {
        let (mut re, mut im) = if re.is_finite() && im.is_finite() {
            (re, im)
        } else {
            (lo + spread * (k as f64 + 0.5) / n as f64, 0.0)
        };
        // distinct starting points, slightly off the real axis
        let dup = |a: &Cx, re: f64, im: f64| {
            (a.re.to_f64() - re).abs() <= 1e-12 * re.abs().max(1.0)
                && (a.im.to_f64() - im).abs() <= 1e-12 * re.abs().max(1.0)
        };
        while z.iter().any(|a| dup(a, re, im)) {
            re += 1e-6 * re.abs().max(1.0);
        }
        if im == 0.0 {
            im = 1e-7 * re.abs().max(1.0) * if k % 2 == 0 { 1.0 } else { -1.0 };
        }
        z.push(Cx::new(bits, re, im));
    }

    let stop = ctx.working_tol(5);
    for _ in 0..ABERTH_MAX_SWEEPS {
        let mut worst = Float::new(bits);
        for k in 0..n {
            let (p, dp) = char_poly_complex(h, &z[k]);
            if p.is_zero() {
                continue;
            }
            if dp.is_zero() {
                return Err(Error::NoConvergence("Aberth: vanishing derivative".into()));
            }
            let w = p.div(&dp);
            let mut s = Cx::zero(bits);
            for j in 0..n {
                if j != k {
                    let diff = z[k].sub(&z[j]);
                    if diff.is_zero() {
                        return Err(Error::Multiplicity {
                            near: format_sci(&z[k].re, 20),
                            gap: "0".into(),
                        });
                    }
                    s = s.add(&Cx::new(bits, 1.0, 0.0).div(&diff));
                }
            }
            let denom = Cx::new(bits, 1.0, 0.0).sub(&w.mul(&s));
            let step = w.div(&denom);
            if !step.is_finite() {
                return Err(Error::NoConvergence("Aberth: non-finite correction".into()));
            }
            let mag = z[k].abs().max(&Float::with_val(bits, 1));
            let rel = step.abs() / mag;
            if rel > worst {
                worst = rel;
            }
            z[k] = z[k].sub(&step);
        }
        if worst <= stop {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(format!(
        "Aberth iteration did not settle within {ABERTH_MAX_SWEEPS} sweeps"
    )))
}
