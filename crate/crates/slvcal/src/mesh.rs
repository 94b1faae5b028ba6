//! Non-uniform spatial grids.
//!
//! Meshes are locally uniform inside a window around the spot coordinate and
//! sinh-stretched towards the truncation boundaries. With `Δξ` the step of the
//! underlying uniform parameter, the mesh widths satisfy the usual smoothness
//! bounds `C₀Δξ ≤ Δx_i ≤ C₁Δξ` and `|Δx_{i+1} − Δx_i| ≤ C₂(Δξ)²` with
//! constants independent of the node count, so the second-order finite
//! difference formulas keep their order. Quadrature is the trapezoidal rule:
//! `w_i = (Δx_i + Δx_{i+1})/2` with the convention `Δx_1 = Δx_{m+1} = 0`.
//!
//! The spot coordinate is always placed on the mesh exactly (bitwise), which
//! the one-hot initial density and the value read-off both rely on.

use crate::error::{Result, SlvError};

/// One-dimensional mesh with trapezoidal quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    /// `gaps[i] = nodes[i] - nodes[i-1]` for `1 <= i < m`; `gaps[0] = gaps[m] = 0`.
    gaps: Vec<f64>,
    weights: Vec<f64>,
    spot_index: usize,
    uniform_zone: (f64, f64),
    param_step: f64,
}

impl Grid1D {
    /// Builds the sinh-stretched mesh: `m` nodes on `[min, max]`, locally
    /// uniform on a window of half-width `uniform_halfwidth` around `spot`,
    /// stretched outside. `spot` is a node, exactly.
    pub fn build(
        m: usize,
        spot: f64,
        min: f64,
        max: f64,
        uniform_halfwidth: f64,
    ) -> Result<Grid1D> {
        if !(min < spot && spot < max) {
            return Err(SlvError::InvalidInput(format!(
                "grid bounds must satisfy min < spot < max, got ({min}, {spot}, {max})"
            )));
        }
        if m < 8 {
            return Err(SlvError::InvalidInput(format!(
                "grid needs at least 8 nodes, got {m}"
            )));
        }
        if !(uniform_halfwidth > 0.0) {
            return Err(SlvError::InvalidInput(
                "uniform_halfwidth must be positive".into(),
            ));
        }

        // Stretch scale: the uniform window spans 4 units of the stretch
        // parameter, the wings asinh(distance/d) more.
        let d = 0.5 * uniform_halfwidth;
        let zone_lo = spot - uniform_halfwidth;
        let zone_hi = spot + uniform_halfwidth;
        let wing_lo = zone_lo > min;
        let wing_hi = zone_hi < max;
        let s_lo = if wing_lo {
            ((zone_lo - min) / d).asinh()
        } else {
            0.0
        };
        let s_hi = if wing_hi {
            ((max - zone_hi) / d).asinh()
        } else {
            0.0
        };
        let core_lo = zone_lo.max(min);
        let core_hi = zone_hi.min(max);
        let xi_total = (core_hi - core_lo) / d + s_lo + s_hi;
        let steps = m - 1;
        let du = d * xi_total / steps as f64;

        // Integer layout: core steps below/above the spot, wing steps outside.
        let mut l_lo = if wing_lo {
            ((uniform_halfwidth / du).ceil() as usize).max(1)
        } else {
            (((spot - min) / du).round() as usize).max(1)
        };
        let mut l_hi = if wing_hi {
            ((uniform_halfwidth / du).ceil() as usize).max(1)
        } else {
            (((max - spot) / du).round() as usize).max(1)
        };
        let mut n_lo = if wing_lo {
            ((s_lo * d / du).round() as usize).max(1)
        } else {
            0
        };
        let mut n_hi = if wing_hi {
            ((s_hi * d / du).round() as usize).max(1)
        } else {
            0
        };

        // Distribute the rounding surplus/deficit, wings first.
        let mut diff = steps as isize - (l_lo + l_hi + n_lo + n_hi) as isize;
        let mut toggle = true;
        while diff != 0 {
            let inc = diff > 0;
            let bumped = if inc {
                if wing_hi && toggle || (!wing_lo && wing_hi) {
                    n_hi += 1;
                } else if wing_lo {
                    n_lo += 1;
                } else if toggle {
                    l_hi += 1;
                } else {
                    l_lo += 1;
                }
                true
            } else if wing_hi && n_hi > 1 && toggle {
                n_hi -= 1;
                true
            } else if wing_lo && n_lo > 1 {
                n_lo -= 1;
                true
            } else if wing_hi && n_hi > 1 {
                n_hi -= 1;
                true
            } else if l_hi > 1 {
                l_hi -= 1;
                true
            } else if l_lo > 1 {
                l_lo -= 1;
                true
            } else {
                false
            };
            if !bumped {
                return Err(SlvError::InvalidInput(format!(
                    "cannot place {m} nodes with uniform_halfwidth {uniform_halfwidth} on [{min}, {max}]"
                )));
            }
            diff += if inc { -1 } else { 1 };
            toggle = !toggle;
        }

        // Uniform core anchored at the spot; wings mapped through sinh and
        // ending exactly on the requested bounds.
        let a_lo = spot - l_lo as f64 * du;
        let a_hi = spot + l_hi as f64 * du;
        if wing_lo && a_lo <= min || wing_hi && a_hi >= max {
            return Err(SlvError::InvalidInput(format!(
                "uniform window [{a_lo}, {a_hi}] leaves no room for the stretched wings on [{min}, {max}]"
            )));
        }
        let mut nodes = Vec::with_capacity(m);
        if wing_lo {
            let ds = ((a_lo - min) / d).asinh() / n_lo as f64;
            for r in (1..=n_lo).rev() {
                nodes.push(a_lo - d * (r as f64 * ds).sinh());
            }
        }
        for l in 0..=(l_lo + l_hi) {
            nodes.push(spot + (l as f64 - l_lo as f64) * du);
        }
        if wing_hi {
            let ds = ((max - a_hi) / d).asinh() / n_hi as f64;
            for r in 1..=n_hi {
                nodes.push(a_hi + d * (r as f64 * ds).sinh());
            }
        }
        debug_assert_eq!(nodes.len(), m);
        if wing_lo {
            nodes[0] = min;
        }
        if wing_hi {
            nodes[m - 1] = max;
        }
        let spot_index = n_lo + l_lo;
        nodes[spot_index] = spot;

        Grid1D::from_parts(nodes, spot_index, (a_lo, a_hi), du / d)
    }

    /// Wraps an explicit node list (strictly increasing, spot on the mesh).
    /// Widths and weights are derived; used for hand-built test meshes.
    pub fn from_nodes(nodes: Vec<f64>, spot_index: usize) -> Result<Grid1D> {
        let lo = nodes.first().copied().unwrap_or(0.0);
        let hi = nodes.last().copied().unwrap_or(0.0);
        let step = if nodes.len() > 1 {
            (hi - lo) / (nodes.len() - 1) as f64
        } else {
            0.0
        };
        Grid1D::from_parts(nodes, spot_index, (lo, hi), step)
    }

    fn from_parts(
        nodes: Vec<f64>,
        spot_index: usize,
        uniform_zone: (f64, f64),
        param_step: f64,
    ) -> Result<Grid1D> {
        let m = nodes.len();
        if m < 2 {
            return Err(SlvError::InvalidInput("grid needs at least 2 nodes".into()));
        }
        if spot_index >= m {
            return Err(SlvError::InvalidInput("spot index out of range".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SlvError::InvalidInput(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        let mut gaps = vec![0.0; m + 1];
        for i in 1..m {
            gaps[i] = nodes[i] - nodes[i - 1];
        }
        let weights = (0..m).map(|i| 0.5 * (gaps[i] + gaps[i + 1])).collect();
        Ok(Grid1D {
            nodes,
            gaps,
            weights,
            spot_index,
            uniform_zone,
            param_step,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// `Δx_i` in 1-based terms: the gap to the left of node `i`; zero at `i = 0`.
    pub fn dx_left(&self, i: usize) -> f64 {
        self.gaps[i]
    }

    /// The gap to the right of node `i`; zero at the last node.
    pub fn dx_right(&self, i: usize) -> f64 {
        self.gaps[i + 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn spot_index(&self) -> usize {
        self.spot_index
    }

    pub fn spot(&self) -> f64 {
        self.nodes[self.spot_index]
    }

    /// Truncation limits, equal to the first and last node.
    pub fn bounds(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn span(&self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    /// Interval of locally uniform spacing.
    pub fn uniform_zone(&self) -> (f64, f64) {
        self.uniform_zone
    }

    /// Step of the underlying uniform stretch parameter; the reference scale
    /// for the mesh smoothness bounds.
    pub fn param_step(&self) -> f64 {
        self.param_step
    }

    /// `max_i |Δx_{i+1} − Δx_i| / (Δξ)²`, the mesh smoothness constant.
    pub fn smoothness_constant(&self) -> f64 {
        let m = self.len();
        let mut worst: f64 = 0.0;
        for i in 1..m - 1 {
            worst = worst.max((self.gaps[i + 1] - self.gaps[i]).abs());
        }
        worst / (self.param_step * self.param_step)
    }
}

/// Grid in the `x` (log-spot) direction.
pub fn build_grid_x(
    m1: usize,
    x0: f64,
    x_min: f64,
    x_max: f64,
    uniform_halfwidth: f64,
) -> Result<Grid1D> {
    Grid1D::build(m1, x0, x_min, x_max, uniform_halfwidth)
}

/// Grid in the `v` (variance) direction. For `alpha > 0` the process is
/// non-negative and the lower bound must be zero; the node `v = 0` is then
/// placed exactly.
pub fn build_grid_v(
    m2: usize,
    v0: f64,
    v_min: f64,
    v_max: f64,
    uniform_halfwidth: f64,
    alpha: f64,
) -> Result<Grid1D> {
    if alpha > 0.0 {
        if v_min != 0.0 {
            return Err(SlvError::InvalidInput(format!(
                "alpha > 0 requires v_min = 0, got {v_min}"
            )));
        }
        if v0 - uniform_halfwidth <= v_min {
            return Err(SlvError::InvalidInput(format!(
                "uniform_halfwidth {uniform_halfwidth} must leave room below the spot variance {v0}"
            )));
        }
    }
    Grid1D::build(m2, v0, v_min, v_max, uniform_halfwidth)
}

/// The two-dimensional Cartesian mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub v: Grid1D,
    /// Whether the variance-direction lower bound is the reflecting `v = 0`
    /// boundary (`alpha > 0`) rather than a truncation of the real line.
    pub alpha_positive: bool,
}

impl Grid2D {
    pub fn new(x: Grid1D, v: Grid1D, alpha_positive: bool) -> Result<Grid2D> {
        if alpha_positive && v.bounds().0 != 0.0 {
            return Err(SlvError::InvalidInput(
                "alpha > 0 requires the variance grid to start at 0".into(),
            ));
        }
        Ok(Grid2D {
            x,
            v,
            alpha_positive,
        })
    }

    pub fn m1(&self) -> usize {
        self.x.len()
    }

    pub fn m2(&self) -> usize {
        self.v.len()
    }

    /// Indices of the spot node `(i0, j0)`.
    pub fn spot_indices(&self) -> (usize, usize) {
        (self.x.spot_index(), self.v.spot_index())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn figure_like_grid_clusters_near_spot() {
        let g = build_grid_x(30, 0.0, -(30f64.ln()), 30f64.ln(), 0.5).unwrap();
        assert_eq!(g.len(), 30);
        assert_eq!(g.node(g.spot_index()), 0.0);
        assert_eq!(g.bounds(), (-(30f64.ln()), 30f64.ln()));
        // Spacing near the spot is much finer than at the boundary.
        let i0 = g.spot_index();
        assert!(g.dx_right(i0) < 0.2 * g.dx_left(1));
        // Nodes strictly increasing is checked on construction; weights
        // telescope to the span.
        let total: f64 = g.weights().iter().sum();
        assert_relative_eq!(total, g.span(), max_relative = 1e-13);
    }

    #[test]
    fn uniform_limit_when_window_covers_domain() {
        // Window spans the whole domain and the spot sits at the center with
        // an even step count per side, so the mesh degenerates to uniform.
        let g = build_grid_x(31, 0.0, -1.0, 1.0, 2.0).unwrap();
        assert_eq!(g.len(), 31);
        let h = g.dx_left(1);
        for i in 1..g.len() {
            assert_relative_eq!(g.dx_left(i), h, max_relative = 1e-12);
        }
        // Trapezoid weights: half-weights at the two ends, full inside.
        assert_relative_eq!(g.weight(0), 0.5 * h, max_relative = 1e-12);
        assert_relative_eq!(g.weight(15), h, max_relative = 1e-12);
        assert_relative_eq!(g.weight(30), 0.5 * h, max_relative = 1e-12);
        assert_eq!(g.node(g.spot_index()), 0.0);
    }

    #[test]
    fn smoothness_constant_stays_bounded_under_refinement() {
        let coarse = build_grid_x(100, 0.0, -3.0, 3.0, 0.5).unwrap();
        let fine = build_grid_x(200, 0.0, -3.0, 3.0, 0.5).unwrap();
        let c0 = coarse.smoothness_constant();
        let c1 = fine.smoothness_constant();
        assert!(c0.is_finite() && c0 > 0.0);
        assert!(
            c1 <= 1.25 * c0,
            "smoothness constant grew under refinement: {c0} -> {c1}"
        );
    }

    #[test]
    fn width_bounds_scale_with_param_step() {
        for &m in &[100usize, 200, 400] {
            let g = build_grid_x(m, 0.0, -3.0, 3.0, 0.5).unwrap();
            let dxi = g.param_step();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 1..g.len() {
                lo = lo.min(g.dx_left(i));
                hi = hi.max(g.dx_left(i));
            }
            // C0, C1 independent of m; generous envelope.
            assert!(lo >= 0.05 * dxi, "m={m}: lo={lo}, dxi={dxi}");
            assert!(hi <= 20.0 * dxi, "m={m}: hi={hi}, dxi={dxi}");
        }
    }

    #[test]
    fn variance_grid_places_zero_and_spot_exactly() {
        let g = build_grid_v(15, 0.2, 0.0, 15.0, 0.1, 0.5).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(g.spot_index()), 0.2);
        let total: f64 = g.weights().iter().sum();
        assert_relative_eq!(total, 15.0, max_relative = 1e-13);
    }

    #[test]
    fn variance_grid_rejects_nonzero_floor_for_positive_alpha() {
        let err = build_grid_v(15, 0.2, 0.01, 15.0, 0.1, 0.5).unwrap_err();
        assert!(err.to_string().contains("v_min"));
    }

    #[test]
    fn negative_floor_accepted_when_alpha_zero() {
        let g = build_grid_v(15, 0.0, -2.0, 2.0, 0.25, 0.0).unwrap();
        assert_eq!(g.node(g.spot_index()), 0.0);
        assert!(g.bounds().0 < 0.0);
    }

    #[test]
    fn bad_bounds_and_small_counts_are_rejected() {
        assert!(build_grid_x(30, 2.0, -1.0, 1.0, 0.5).is_err());
        assert!(build_grid_x(4, 0.0, -1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn weights_match_trapezoid_definition() {
        let g = build_grid_x(50, 0.0, -2.0, 2.0, 0.4).unwrap();
        for i in 0..g.len() {
            assert_relative_eq!(
                g.weight(i),
                0.5 * (g.dx_left(i) + g.dx_right(i)),
                max_relative = 1e-15
            );
        }
        assert_eq!(g.dx_left(0), 0.0);
        assert_eq!(g.dx_right(g.len() - 1), 0.0);
    }
}
