//! Björck–Pereyra elimination for the moment system `Σ_k w_k x_k^m = f_m`, `m = 0..N-1`.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{format_sci, ExtReal};

/// Solves `V w = f` with `V[m][k] = x_k^m` in `O(N²)` operations.
///
/// `rhs` is overwritten step by step into the solution; the nodes must be
/// pairwise distinct.
pub fn solve_moment_system(nodes: &[ExtReal], rhs: &[ExtReal]) -> Result<Vec<ExtReal>> {
    let n = nodes.len();
    if rhs.len() != n {
        return Err(Error::Domain(format!(
            "{} nodes but {} right-hand side entries",
            n,
            rhs.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let bits = nodes[0].prec();
    let mut w: Vec<ExtReal> = rhs.iter().map(|v| Float::with_val(bits, v)).collect();
    let last = n - 1;

    for k in 0..last {
        for i in (k + 1..=last).rev() {
            let t = Float::with_val(bits, &nodes[k] * &w[i - 1]);
            w[i] -= t;
        }
    }
    for k in (0..last).rev() {
        for i in k + 1..=last {
            let den = Float::with_val(bits, &nodes[i] - &nodes[i - k - 1]);
            if den.is_zero() {
                return Err(Error::Singular(format!(
                    "coincident nodes at {}",
                    format_sci(&nodes[i], 20)
                )));
            }
            w[i] /= den;
        }
        for i in k..last {
            let t = Float::with_val(bits, &w[i + 1]);
            w[i] -= t;
        }
    }
    Ok(w)
}
