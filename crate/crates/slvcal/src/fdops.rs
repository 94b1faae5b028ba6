//! Second-order finite difference operators on non-uniform meshes.
//!
//! Interior rows use the central three-point formulas; one-sided closures
//! implement the boundary conditions:
//!
//! * in `x`, the value is treated as `C₁eˣ + C₂` beyond the outermost
//!   interior node (a linear condition in the untransformed spot), so both
//!   first- and second-derivative rows at the boundary reduce to the same
//!   two-point difference scaled by `eˣ/(eˣ − eˣ′)`;
//! * in `v` with a non-negative variance process, all second derivatives
//!   vanish at `v = 0` and the first derivative uses the one-sided forward
//!   triple; at `v = V_max` the second derivative is zero and the first
//!   derivative reduces to the two-point backward difference;
//! * in `v` on an unrestricted domain, the floor carries the linear
//!   condition and the cap carries the exponential closure.
//!
//! Every row sums to zero, so all four matrices annihilate the constant
//! vector. This is what makes the adjoint forward operators conserve the
//! total numerical integral of the density.

use crate::error::{Result, SlvError};
use crate::mesh::{Grid1D, Grid2D};

/// A three-point difference stencil: node offsets and coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilTriple {
    pub offsets: [i32; 3],
    pub coeffs: [f64; 3],
}

fn check_widths(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) {
        return Err(SlvError::InvalidInput(format!(
            "stencil widths must be positive, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// Central first-derivative triple on gaps `(dxl, dxr)`, offsets `[-1, 0, 1]`.
///
/// The center coefficient is formed as the negated sum of the wings so the
/// row sum vanishes to the last bit.
pub fn central_first(dxl: f64, dxr: f64) -> Result<StencilTriple> {
    check_widths(dxl, dxr)?;
    let lo = -dxr / (dxl * (dxl + dxr));
    let hi = dxl / (dxr * (dxl + dxr));
    Ok(StencilTriple {
        offsets: [-1, 0, 1],
        coeffs: [lo, -(lo + hi), hi],
    })
}

/// One-sided (forward) first-derivative triple on the two gaps ahead of the
/// node, offsets `[0, 1, 2]`.
pub fn forward_first(dx1: f64, dx2: f64) -> Result<StencilTriple> {
    check_widths(dx1, dx2)?;
    let mid = (dx1 + dx2) / (dx1 * dx2);
    let far = -dx1 / (dx2 * (dx1 + dx2));
    Ok(StencilTriple {
        offsets: [0, 1, 2],
        coeffs: [-(mid + far), mid, far],
    })
}

/// Central second-derivative triple on gaps `(dxl, dxr)`, offsets `[-1, 0, 1]`.
pub fn central_second(dxl: f64, dxr: f64) -> Result<StencilTriple> {
    check_widths(dxl, dxr)?;
    let lo = 2.0 / (dxl * (dxl + dxr));
    let hi = 2.0 / (dxr * (dxl + dxr));
    Ok(StencilTriple {
        offsets: [-1, 0, 1],
        coeffs: [lo, -(lo + hi), hi],
    })
}

/// Square banded matrix stored by rows, bandwidths at most 2.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    lower_bw: usize,
    upper_bw: usize,
    /// `bands[i * stride + (j - i + lower_bw)] = A[i, j]`.
    bands: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(dim: usize, lower_bw: usize, upper_bw: usize) -> BandedMatrix {
        assert!(lower_bw <= 2 && upper_bw <= 2, "bandwidths at most 2");
        BandedMatrix {
            dim,
            lower_bw,
            upper_bw,
            bands: vec![0.0; dim * (lower_bw + upper_bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower_bw(&self) -> usize {
        self.lower_bw
    }

    pub fn upper_bw(&self) -> usize {
        self.upper_bw
    }

    fn stride(&self) -> usize {
        self.lower_bw + self.upper_bw + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower_bw >= i && j <= i + self.upper_bw && i < self.dim && j < self.dim
    }

    /// Entry `A[i, j]`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.bands[i * self.stride() + (j + self.lower_bw - i)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let idx = i * self.stride() + (j + self.lower_bw - i);
        self.bands[idx] = value;
    }

    fn set_stencil(&mut self, i: usize, s: &StencilTriple) {
        for (off, c) in s.offsets.iter().zip(s.coeffs.iter()) {
            self.set(i, (i as i64 + *off as i64) as usize, *c);
        }
    }

    /// In-band entries of row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = i.saturating_sub(self.lower_bw);
        let hi = (i + self.upper_bw).min(self.dim - 1);
        (lo..=hi).map(move |j| (j, self.get(i, j)))
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.lower_bw);
            let hi = (i + self.upper_bw).min(self.dim - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
    }

    /// `y = Aᵀ x`, computed from the same stored bands.
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for j in 0..self.dim {
            let lo = j.saturating_sub(self.upper_bw);
            let hi = (j + self.lower_bw).min(self.dim - 1);
            let mut acc = 0.0;
            for i in lo..=hi {
                acc += self.get(i, j) * x[i];
            }
            y[j] = acc;
        }
    }
}

/// Exponential-closure coefficient `e^{x_b} / (e^{x_b} − e^{x_n})` with `x_b`
/// the boundary node and `x_n` its interior neighbor.
fn exp_closure(x_boundary: f64, x_neighbor: f64) -> f64 {
    x_boundary.exp() / (x_boundary.exp() - x_neighbor.exp())
}

/// First- and second-derivative matrices in the `x`-direction.
pub fn assemble_x_ops(gx: &Grid1D) -> (BandedMatrix, BandedMatrix) {
    let m = gx.len();
    let mut d_x = BandedMatrix::zeros(m, 1, 1);
    let mut d_xx = BandedMatrix::zeros(m, 1, 1);

    // Lower boundary: value behaves as C1 e^x + C2, so both derivative rows
    // reduce to c (u_1 - u_0) with c = e^{x0}/(e^{x1} - e^{x0}).
    let c_lo = exp_closure(gx.node(0), gx.node(1));
    for mat in [&mut d_x, &mut d_xx] {
        mat.set(0, 0, -c_lo);
        mat.set(0, 1, c_lo);
    }
    for i in 1..m - 1 {
        let (dxl, dxr) = (gx.dx_left(i), gx.dx_right(i));
        d_x.set_stencil(i, &central_first(dxl, dxr).expect("interior gaps positive"));
        d_xx.set_stencil(i, &central_second(dxl, dxr).expect("interior gaps positive"));
    }
    let c_hi = exp_closure(gx.node(m - 1), gx.node(m - 2));
    for mat in [&mut d_x, &mut d_xx] {
        mat.set(m - 1, m - 2, -c_hi);
        mat.set(m - 1, m - 1, c_hi);
    }
    (d_x, d_xx)
}

/// First- and second-derivative matrices in the `v`-direction.
pub fn assemble_v_ops(gv: &Grid1D, alpha: f64) -> (BandedMatrix, BandedMatrix) {
    let m = gv.len();
    let mut d_v = BandedMatrix::zeros(m, 1, 2);
    let mut d_vv = BandedMatrix::zeros(m, 1, 1);

    // Floor: one-sided first derivative; second derivative row stays zero
    // (all second derivatives vanish at v = 0 for alpha > 0, and the linear
    // condition removes it for alpha = 0).
    d_v.set_stencil(
        0,
        &forward_first(gv.dx_right(0), gv.dx_right(1)).expect("gaps positive"),
    );
    for i in 1..m - 1 {
        let (dvl, dvr) = (gv.dx_left(i), gv.dx_right(i));
        d_v.set_stencil(i, &central_first(dvl, dvr).expect("interior gaps positive"));
        d_vv.set_stencil(i, &central_second(dvl, dvr).expect("interior gaps positive"));
    }
    if alpha > 0.0 {
        // Cap: linear condition kills the second derivative and collapses the
        // first derivative to the two-point backward difference.
        let dv = gv.dx_left(m - 1);
        d_v.set(m - 1, m - 2, -1.0 / dv);
        d_v.set(m - 1, m - 1, 1.0 / dv);
    } else {
        // Unrestricted domain: exponential closure at the cap, as in x.
        let c_hi = exp_closure(gv.node(m - 1), gv.node(m - 2));
        for mat in [&mut d_v, &mut d_vv] {
            mat.set(m - 1, m - 2, -c_hi);
            mat.set(m - 1, m - 1, c_hi);
        }
    }
    (d_v, d_vv)
}

/// The four derivative matrices for a 2-D grid.
#[derive(Debug, Clone)]
pub struct DiffOps {
    pub d_x: BandedMatrix,
    pub d_xx: BandedMatrix,
    pub d_v: BandedMatrix,
    pub d_vv: BandedMatrix,
}

impl DiffOps {
    pub fn assemble(grid: &Grid2D, alpha: f64) -> DiffOps {
        let (d_x, d_xx) = assemble_x_ops(&grid.x);
        let (d_v, d_vv) = assemble_v_ops(&grid.v, alpha);
        DiffOps {
            d_x,
            d_xx,
            d_v,
            d_vv,
        }
    }
}
