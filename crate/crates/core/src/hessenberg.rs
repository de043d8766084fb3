//! The banded Hessenberg matrix of the stepline recurrence and its eigenvectors.
//!
//! ```text
//!       ⎡ b0  1                ⎤
//!       ⎢ c1  b1  1            ⎥
//! H_N = ⎢ d2  c2  b2  1        ⎥
//!       ⎢     d3  c3  b3  ⋱    ⎥
//!       ⎣         ⋱   ⋱   ⋱    ⎦
//! ```
//!
//! Every zero `x` of the type II polynomial `P_N` is an eigenvalue; the right
//! eigenvector is `(P_0(x), …, P_{N-1}(x))` and the left eigenvector follows
//! from running the type I recurrence backwards from `u_N = 1`.

use nalgebra::DMatrix;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{format_sci, ExtReal, PrecisionContext};
use crate::systems::{SteplineCoefficients, WeightSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct BandedHessenberg {
    coeffs: SteplineCoefficients,
    bits: u32,
}

impl BandedHessenberg {
    /// `H_N` for `system`; needs `b_0..b_{N-1}`, `c_1..c_{N-1}`, `d_2..d_{N-1}`.
    pub fn build(system: &WeightSystem, n: usize, ctx: &PrecisionContext) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("matrix dimension must be at least 1".into()));
        }
        Ok(Self {
            coeffs: system.stepline(n, ctx)?,
            bits: ctx.bits(),
        })
    }

    pub fn from_stepline(coeffs: SteplineCoefficients, ctx: &PrecisionContext) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("matrix dimension must be at least 1".into()));
        }
        Ok(Self {
            coeffs,
            bits: ctx.bits(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn b(&self, i: usize) -> &ExtReal {
        self.coeffs.b(i)
    }

    pub fn c(&self, i: usize) -> &ExtReal {
        self.coeffs.c(i)
    }

    pub fn d(&self, i: usize) -> &ExtReal {
        self.coeffs.d(i)
    }

    pub fn coefficients(&self) -> &SteplineCoefficients {
        &self.coeffs
    }

    fn zero(&self) -> ExtReal {
        Float::new(self.bits)
    }

    /// Entry `(i, j)`, zero-based.
    pub fn entry(&self, i: usize, j: usize) -> ExtReal {
        if j == i + 1 {
            Float::with_val(self.bits, 1)
        } else if j == i {
            Float::with_val(self.bits, self.b(i))
        } else if i == j + 1 {
            Float::with_val(self.bits, self.c(i))
        } else if i == j + 2 {
            Float::with_val(self.bits, self.d(i))
        } else {
            self.zero()
        }
    }

    /// `H v`
    pub fn mul_vec(&self, v: &[ExtReal]) -> Vec<ExtReal> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = Float::with_val(self.bits, self.b(i) * &v[i]);
                if i + 1 < n {
                    acc += &v[i + 1];
                }
                if i >= 1 {
                    acc += self.c(i) * &v[i - 1];
                }
                if i >= 2 {
                    acc += self.d(i) * &v[i - 2];
                }
                acc
            })
            .collect()
    }

    /// `uᵀ H`
    pub fn vec_mul(&self, u: &[ExtReal]) -> Vec<ExtReal> {
        let n = self.dim();
        assert_eq!(u.len(), n);
        (0..n)
            .map(|j| {
                let mut acc = Float::with_val(self.bits, self.b(j) * &u[j]);
                if j >= 1 {
                    acc += &u[j - 1];
                }
                if j + 1 < n {
                    acc += self.c(j + 1) * &u[j + 1];
                }
                if j + 2 < n {
                    acc += self.d(j + 2) * &u[j + 2];
                }
                acc
            })
            .collect()
    }

    /// `(P_0(x), …, P_N(x))` by the forward recurrence.
    pub fn type_two_values(&self, x: &ExtReal) -> Vec<ExtReal> {
        let n = self.dim();
        let mut p = Vec::with_capacity(n + 1);
        p.push(Float::with_val(self.bits, 1));
        for k in 0..n {
            let mut next = Float::with_val(self.bits, x - self.b(k)) * &p[k];
            if k >= 1 {
                next -= self.c(k) * &p[k - 1];
            }
            if k >= 2 {
                next -= self.d(k) * &p[k - 2];
            }
            p.push(next);
        }
        p
    }

    /// `(P_N(x), P_N'(x))`, the characteristic polynomial of `H_N` and its derivative.
    pub fn char_poly(&self, x: &ExtReal) -> (ExtReal, ExtReal) {
        forward_recurrence(&self.coeffs, self.dim(), x, self.bits)
    }

    /// Double-precision copy for eigenvalue seeding.
    pub fn to_f64(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j).to_f64())
    }

    /// Left eigenvector for `node` by the backward recurrence
    /// `u_{i-1} = (x - b_{i-1}) u_i - c_i u_{i+1} - d_{i+1} u_{i+2}`, `u_N = 1`.
    ///
    /// The first column equation `(b_0 - x) u_1 + c_1 u_2 + d_2 u_3 = 0` is not
    /// used and serves as the residual check.
    pub fn left_vector(&self, node: &ExtReal) -> Vec<ExtReal> {
        let n = self.dim();
        // one-based u[1..=n], with u[n+1] = u[n+2] = 0
        let mut u = vec![self.zero(); n + 3];
        u[n] = Float::with_val(self.bits, 1);
        for i in (2..=n).rev() {
            let mut prev = Float::with_val(self.bits, node - self.b(i - 1)) * &u[i];
            if i < n {
                prev -= self.c(i) * &u[i + 1];
            }
            if i + 2 <= n {
                prev -= self.d(i + 1) * &u[i + 2];
            }
            u[i - 1] = prev;
        }
        u.truncate(n + 1);
        u.remove(0);
        u
    }
}

fn forward_recurrence(
    coeffs: &SteplineCoefficients,
    n: usize,
    x: &ExtReal,
    bits: u32,
) -> (ExtReal, ExtReal) {
    // (P_{k-2}, P_{k-1}, P_k) and derivatives
    let mut p2 = Float::new(bits);
    let mut p1 = Float::new(bits);
    let mut p0 = Float::with_val(bits, 1);
    let mut q2 = Float::new(bits);
    let mut q1 = Float::new(bits);
    let mut q0 = Float::new(bits);
    for k in 0..n {
        let shift = Float::with_val(bits, x - coeffs.b(k));
        let mut p = Float::with_val(bits, &shift * &p0);
        let mut q = Float::with_val(bits, &shift * &q0) + &p0;
        if k >= 1 {
            p -= coeffs.c(k) * &p1;
            q -= coeffs.c(k) * &q1;
        }
        if k >= 2 {
            p -= coeffs.d(k) * &p2;
            q -= coeffs.d(k) * &q2;
        }
        p2 = std::mem::replace(&mut p1, std::mem::replace(&mut p0, p));
        q2 = std::mem::replace(&mut q1, std::mem::replace(&mut q0, q));
    }
    let _ = (p2, q2);
    (p0, q0)
}

/// `(P_n(x), P_n'(x))` for the type II stepline polynomial of `system`.
pub fn eval_type_two(
    system: &WeightSystem,
    n: usize,
    x: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<(ExtReal, ExtReal)> {
    let coeffs = system.stepline(n, ctx)?;
    Ok(forward_recurrence(&coeffs, n, &ctx.lift(x), ctx.bits()))
}

/// `‖w‖_∞`
pub fn max_norm(w: &[ExtReal]) -> ExtReal {
    let bits = w.first().map_or(64, |v| v.prec());
    w.iter().fold(Float::new(bits), |m, v| {
        m.max(&Float::with_val(bits, v.abs_ref()))
    })
}

/// `⟨u, v⟩`
pub fn dot(u: &[ExtReal], v: &[ExtReal]) -> ExtReal {
    let bits = u.first().map_or(64, |x| x.prec());
    u.iter()
        .zip(v)
        .fold(Float::new(bits), |acc, (a, b)| acc + a * b)
}

/// One eigenvalue of `H_N` with its right and left eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub node: ExtReal,
    /// `v_k = P_{k-1}(node)`, so `right[0] = 1`.
    pub right: Vec<ExtReal>,
    /// Normalized so that `left[N-1] = 1`.
    pub left: Vec<ExtReal>,
    /// `‖H v - x v‖_∞`
    pub right_residual: ExtReal,
    /// `‖uᵀ H - x uᵀ‖_∞`
    pub left_residual: ExtReal,
    /// `|P_N(x) / P_N'(x)|` at acceptance.
    pub newton_residual: ExtReal,
}

/// Residual bound `10^(-digits+10) · max(1, |x|) · ‖w‖_∞`.
pub fn residual_bound(node: &ExtReal, w: &[ExtReal], ctx: &PrecisionContext) -> ExtReal {
    let scale = ctx.lift(node).abs().max(&ctx.one());
    ctx.tol(10) * scale * max_norm(w)
}

fn residual(h: &BandedHessenberg, node: &ExtReal, w: &[ExtReal], product: Vec<ExtReal>) -> ExtReal {
    let diff: Vec<ExtReal> = product
        .into_iter()
        .zip(w)
        .map(|(hw, wi)| hw - Float::with_val(h.bits, node * wi))
        .collect();
    max_norm(&diff)
}

/// Right eigenvector at a certified node, with its residual.
pub fn right_eigenvector(
    h: &BandedHessenberg,
    node: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<(Vec<ExtReal>, ExtReal)> {
    let mut v = h.type_two_values(node);
    v.truncate(h.dim());
    let res = residual(h, node, &v, h.mul_vec(&v));
    let bound = residual_bound(node, &v, ctx);
    if res > bound {
        return Err(Error::Residual {
            which: "right",
            node: format_sci(node, 20),
            residual: format_sci(&res, 6),
            bound: format_sci(&bound, 6),
        });
    }
    Ok((v, res))
}

/// Left eigenvector at a certified node, with its residual.
pub fn left_eigenvector(
    h: &BandedHessenberg,
    node: &ExtReal,
    ctx: &PrecisionContext,
) -> Result<(Vec<ExtReal>, ExtReal)> {
    let u = h.left_vector(node);
    let res = residual(h, node, &u, h.vec_mul(&u));
    let bound = residual_bound(node, &u, ctx);
    if res > bound {
        return Err(Error::Residual {
            which: "left",
            node: format_sci(node, 20),
            residual: format_sci(&res, 6),
            bound: format_sci(&bound, 6),
        });
    }
    Ok((u, res))
}

impl EigenPair {
    pub fn new(
        h: &BandedHessenberg,
        node: ExtReal,
        newton_residual: ExtReal,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let (right, right_residual) = right_eigenvector(h, &node, ctx)?;
        let (left, left_residual) = left_eigenvector(h, &node, ctx)?;
        Ok(Self {
            node,
            right,
            left,
            right_residual,
            left_residual,
            newton_residual,
        })
    }
}
