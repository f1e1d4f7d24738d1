//! Physical system definition: the coupled anharmonic potential, harmonic
//! eigenstates, and the four-mode initial superposition.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = (px^2 + py^2) / 2m + (wx^2 x^2 + wy^2 y^2) / 2
//!     - kappa * x * y + (alpha/3)(x^3 + y^3) + (beta/4)(x^4 + y^4)
//! ```
//!
//! with `kappa` coupling the two coordinates and the cubic/quartic terms
//! breaking integrability. Everything here is a pure function of its inputs.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::ModelError;

/// Physical constants of the Hamiltonian, all dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub mass: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    /// Bilinear coupling strength of the `-kappa * x * y` term.
    pub kappa: f64,
    /// Cubic coefficient; the potential carries `alpha/3 * (x^3 + y^3)`.
    pub alpha: f64,
    /// Quartic coefficient; the potential carries `beta/4 * (x^4 + y^4)`.
    pub beta: f64,
    /// Tunable Planck constant.
    pub hbar: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            mass: 1.0,
            omega_x: 1.0,
            omega_y: 1.0,
            kappa: 0.0,
            alpha: 0.0,
            beta: 0.0,
            hbar: 1.0,
        }
    }
}

impl PhysParams {
    /// Reference regime: unit mass and frequencies, `alpha/3 = 0.05`,
    /// `beta/4 = 0.04`, with the coupling and Planck constant free.
    pub fn reference(kappa: f64, hbar: f64) -> Self {
        PhysParams {
            kappa,
            alpha: 0.15,
            beta: 0.16,
            hbar,
            ..Default::default()
        }
    }

    /// Purely harmonic oscillator (no coupling, no anharmonic terms).
    pub fn harmonic(hbar: f64) -> Self {
        PhysParams {
            hbar,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = self.mass > 0.0
            && self.omega_x > 0.0
            && self.omega_y > 0.0
            && self.hbar > 0.0
            && self.beta >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(ModelError::BadParams(format!(
                "need mass, omega_x, omega_y, hbar > 0 and beta >= 0, got \
                 mass={}, omega_x={}, omega_y={}, hbar={}, beta={}",
                self.mass, self.omega_x, self.omega_y, self.hbar, self.beta
            )))
        }
    }

    /// Default half-width of the square domain: 8 at `hbar = 1`; for other
    /// `hbar` the packet scale plus a fixed margin for the anharmonic drift.
    pub fn default_half_width(&self) -> f64 {
        if self.hbar == 1.0 {
            8.0
        } else {
            (8.0 * self.hbar.sqrt()).max(6.0) + 2.0
        }
    }

    /// Default interior node count for a domain of half-width `l`: 256 per
    /// axis at `hbar = 1`, `l = 8`, scaled to keep the packet width resolved,
    /// then snapped up so `n + 1` is 5-smooth (fast sine transform).
    pub fn default_grid_n(&self, half_width: f64) -> usize {
        let raw = (256.0 * (half_width / 8.0) / self.hbar.sqrt()).ceil() as usize;
        GridSpec::fast_interior_count(raw)
    }
}

/// Uniform square grid of interior nodes on `(-L, L)^2`.
///
/// The Dirichlet condition `psi = 0` at `|x| = L` or `|y| = L` is implicit:
/// only interior nodes are stored, at `x_i = -L + (i + 1) dx` with
/// `dx = 2L / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    n: usize,
}

pub const MIN_GRID_N: usize = 16;

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> Result<Self, ModelError> {
        if half_width <= 0.0 || !half_width.is_finite() {
            return Err(ModelError::BadHalfWidth(half_width));
        }
        if n < MIN_GRID_N {
            return Err(ModelError::GridTooCoarse { n, min: MIN_GRID_N });
        }
        Ok(GridSpec { half_width, n })
    }

    /// Smallest `n >= requested` whose successor `n + 1` has no prime factor
    /// above 5. The sine transform runs on an FFT of length `2(n + 1)`;
    /// 5-smooth lengths keep it off the slow generic code paths.
    pub fn fast_interior_count(requested: usize) -> usize {
        let mut n = requested.max(MIN_GRID_N);
        loop {
            let mut m = n + 1;
            for p in [2usize, 3, 5] {
                while m % p == 0 {
                    m /= p;
                }
            }
            if m == 1 {
                return n;
            }
            n += 1;
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.n as f64 + 1.0)
    }

    /// Coordinate of interior node `i` (same for both axes).
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        -self.half_width + (i as f64 + 1.0) * self.dx()
    }

    /// All interior node coordinates along one axis.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x.abs() < self.half_width && y.abs() < self.half_width
    }
}

/// Potential energy of Eq.-style anharmonic oscillator at `(x, y)`.
pub fn potential(p: &PhysParams, x: f64, y: f64) -> f64 {
    0.5 * (p.omega_x * p.omega_x * x * x + p.omega_y * p.omega_y * y * y) - p.kappa * x * y
        + p.alpha / 3.0 * (x * x * x + y * y * y)
        + p.beta / 4.0 * (x * x * x * x + y * y * y * y)
}

/// Analytic gradient `(dV/dx, dV/dy)` of [`potential`].
pub fn grad_potential(p: &PhysParams, x: f64, y: f64) -> (f64, f64) {
    (
        p.omega_x * p.omega_x * x - p.kappa * y + p.alpha * x * x + p.beta * x * x * x,
        p.omega_y * p.omega_y * y - p.kappa * x + p.alpha * y * y + p.beta * y * y * y,
    )
}

/// Potential sampled on every grid node, `values[[ix, iy]] = V(x_ix, y_iy)`.
pub fn potential_grid(p: &PhysParams, grid: &GridSpec) -> Array2<f64> {
    let n = grid.n();
    let xs = grid.nodes();
    Array2::from_shape_fn((n, n), |(ix, iy)| potential(p, xs[ix], xs[iy]))
}

/// Physicists' Hermite polynomial `H_n(z)` by the three-term recurrence
/// `H_{k+1} = 2 z H_k - 2 k H_{k-1}`.
pub fn hermite(order: usize, z: f64) -> f64 {
    match order {
        0 => 1.0,
        1 => 2.0 * z,
        _ => {
            let mut prev = 1.0;
            let mut cur = 2.0 * z;
            for k in 1..order {
                let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Harmonic-oscillator eigenstate `psi_{nm}(x, y)` for unit mass and
/// frequency: Gaussian envelope times Hermite polynomials, normalized so the
/// continuum L2 norm is one.
pub fn eigenstate(n: usize, m: usize, hbar: f64, x: f64, y: f64) -> f64 {
    let s = hbar.sqrt();
    let norm = 1.0
        / (2f64.powi((n + m) as i32) * factorial(n) * factorial(m) * std::f64::consts::PI * hbar)
            .sqrt();
    norm * (-(x * x + y * y) / (2.0 * hbar)).exp() * hermite(n, x / s) * hermite(m, y / s)
}

/// Peak-relative boundary amplitude below which the packet counts as fully
/// contained in the domain.
pub const BOUNDARY_AMPLITUDE_LIMIT: f64 = 1e-8;

/// Initial state: the equal-weight superposition
/// `(psi_00 + psi_01 + psi_10 + psi_11) / 2` sampled on the grid.
///
/// The result is real with unit discrete norm. Fails if the grid is too
/// small to contain the packet tails.
pub fn initial_state(grid: &GridSpec, hbar: f64) -> Result<Array2<Complex64>, ModelError> {
    let n = grid.n();
    let xs = grid.nodes();
    let mut values = Array2::zeros((n, n));
    let mut peak = 0f64;
    for ix in 0..n {
        for iy in 0..n {
            let v = 0.5
                * (eigenstate(0, 0, hbar, xs[ix], xs[iy])
                    + eigenstate(0, 1, hbar, xs[ix], xs[iy])
                    + eigenstate(1, 0, hbar, xs[ix], xs[iy])
                    + eigenstate(1, 1, hbar, xs[ix], xs[iy]));
            peak = peak.max(v.abs());
            values[[ix, iy]] = Complex64::new(v, 0.0);
        }
    }
    // Containment check on the outermost interior ring.
    let mut boundary = 0f64;
    for i in 0..n {
        for &(a, b) in &[(0, i), (n - 1, i), (i, 0), (i, n - 1)] {
            boundary = boundary.max(values[[a, b]].norm());
        }
    }
    let frac = boundary / peak;
    if frac >= BOUNDARY_AMPLITUDE_LIMIT {
        return Err(ModelError::DomainTooSmall {
            boundary_frac: frac,
            limit: BOUNDARY_AMPLITUDE_LIMIT,
        });
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn paper_params() -> PhysParams {
        PhysParams::reference(1.0, 1.0)
    }

    #[test]
    fn potential_vanishes_at_origin() {
        assert_eq!(potential(&paper_params(), 0.0, 0.0), 0.0);
        assert_eq!(potential(&PhysParams::reference(0.3, 0.5), 0.0, 0.0), 0.0);
    }

    #[test]
    fn potential_reference_point() {
        // 1/2 * 2 - 1 + 0.05 * 2 + 0.04 * 2
        assert_abs_diff_eq!(potential(&paper_params(), 1.0, 1.0), 0.18, epsilon = 1e-15);
    }

    #[test]
    fn potential_degenerates_to_harmonic() {
        let p = PhysParams::harmonic(1.0);
        for &(x, y) in &[(0.3, -1.2), (2.0, 0.7), (-0.5, -0.5)] {
            assert_abs_diff_eq!(potential(&p, x, y), 0.5 * (x * x + y * y), epsilon = 1e-15);
        }
    }

    #[test]
    fn potential_symmetric_under_swap() {
        let p = paper_params();
        for &(x, y) in &[(0.3, -1.2), (2.0, 0.7), (-1.5, 0.01)] {
            assert_eq!(potential(&p, x, y), potential(&p, y, x));
        }
    }

    #[test]
    fn grad_reference_point() {
        let (gx, gy) = grad_potential(&paper_params(), 1.0, 1.0);
        assert_abs_diff_eq!(gx, 0.31, epsilon = 1e-15);
        assert_abs_diff_eq!(gy, 0.31, epsilon = 1e-15);
        assert_eq!(grad_potential(&paper_params(), 0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn grad_matches_finite_difference() {
        // Deterministic pseudo-random sample of 1000 points in [-3, 3]^2.
        let p = PhysParams::reference(0.7, 0.3);
        let h = 1e-5;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
        };
        for _ in 0..1000 {
            let (x, y) = (next(), next());
            let (gx, gy) = grad_potential(&p, x, y);
            let fdx = (potential(&p, x + h, y) - potential(&p, x - h, y)) / (2.0 * h);
            let fdy = (potential(&p, x, y + h) - potential(&p, x, y - h)) / (2.0 * h);
            let scale = gx.abs().max(gy.abs()).max(1e-3);
            assert!(
                ((gx - fdx) / scale).abs() < 1e-6 && ((gy - fdy) / scale).abs() < 1e-6,
                "gradient mismatch at ({x}, {y}): analytic ({gx}, {gy}) vs fd ({fdx}, {fdy})"
            );
        }
    }

    #[test]
    fn hermite_low_orders() {
        for &z in &[-1.7, 0.0, 0.4, 2.3] {
            assert_eq!(hermite(0, z), 1.0);
            assert_eq!(hermite(1, z), 2.0 * z);
            assert_abs_diff_eq!(hermite(2, z), 4.0 * z * z - 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(hermite(3, z), 8.0 * z * z * z - 12.0 * z, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenstate_ground_peak() {
        // psi_00(0, 0) = 1 / sqrt(pi) at hbar = 1.
        let expect = 0.5641895835477563;
        assert_relative_eq!(eigenstate(0, 0, 1.0, 0.0, 0.0), expect, epsilon = 1e-12);
    }

    #[test]
    fn eigenstate_node_line() {
        for &y in &[-2.0, -0.3, 0.0, 1.1] {
            assert_eq!(eigenstate(1, 0, 1.0, 0.0, y), 0.0);
        }
    }

    #[test]
    fn eigenstate_orthonormal_on_grid() {
        for &hbar in &[0.05, 1.0] {
            let l = (8.0 * hbar.sqrt()).max(6.0) + 2.0;
            let n = GridSpec::fast_interior_count((256.0 * (l / 8.0) / hbar.sqrt()) as usize);
            let grid = GridSpec::new(l, n).unwrap();
            let xs = grid.nodes();
            let w = grid.dx() * grid.dx();
            let orders = [(0, 0), (0, 1), (1, 0), (1, 1)];
            for &(a, b) in &orders {
                for &(c, d) in &orders {
                    let mut acc = 0.0;
                    for &x in &xs {
                        for &y in &xs {
                            acc += eigenstate(a, b, hbar, x, y) * eigenstate(c, d, hbar, x, y);
                        }
                    }
                    acc *= w;
                    let expect = if (a, b) == (c, d) { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(acc, expect, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn initial_state_norm_and_symmetry() {
        let grid = GridSpec::new(8.0, 255).unwrap();
        let f = initial_state(&grid, 1.0).unwrap();
        let w = grid.dx() * grid.dx();
        let norm: f64 = f.iter().map(|v| v.norm_sqr()).sum::<f64>() * w;
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-6);
        for v in f.iter() {
            assert_eq!(v.im, 0.0);
        }
        for ix in 0..grid.n() {
            for iy in 0..ix {
                assert_eq!(f[[ix, iy]], f[[iy, ix]]);
            }
        }
    }

    #[test]
    fn initial_state_zero_lines() {
        // The superposition factorizes; its zero set is the pair of lines
        // x = -sqrt(hbar/2) and y = -sqrt(hbar/2).
        let hbar = 1.0;
        let x0 = -(hbar / 2.0).sqrt();
        let scale = 1.0 / std::f64::consts::PI.sqrt();
        for &y in &[-1.5, -0.2, 0.9, 2.0] {
            let v = 0.5
                * (eigenstate(0, 0, hbar, x0, y)
                    + eigenstate(0, 1, hbar, x0, y)
                    + eigenstate(1, 0, hbar, x0, y)
                    + eigenstate(1, 1, hbar, x0, y));
            assert_abs_diff_eq!(v / scale, 0.0, epsilon = 1e-14);
        }
        // And nonzero elsewhere.
        assert!(eigenstate(0, 0, hbar, 0.3, 0.3) > 0.0);
    }

    #[test]
    fn initial_state_rejects_small_domain() {
        let grid = GridSpec::new(3.0, 64).unwrap();
        match initial_state(&grid, 1.0) {
            Err(ModelError::DomainTooSmall { .. }) => {}
            other => panic!("expected DomainTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn fast_interior_count_is_5_smooth() {
        for &req in &[16usize, 100, 255, 256, 300, 362, 572, 1000] {
            let n = GridSpec::fast_interior_count(req);
            assert!(n >= req);
            let mut m = n + 1;
            for p in [2usize, 3, 5] {
                while m % p == 0 {
                    m /= p;
                }
            }
            assert_eq!(m, 1, "n + 1 = {} not 5-smooth", n + 1);
        }
        assert_eq!(GridSpec::fast_interior_count(255), 255);
        assert_eq!(GridSpec::fast_interior_count(256), 269);
    }

    #[test]
    fn default_grid_scaling() {
        let p = PhysParams::reference(1.0, 1.0);
        assert_eq!(p.default_half_width(), 8.0);
        let p005 = PhysParams::reference(1.0, 0.05);
        assert_eq!(p005.default_half_width(), 8.0);
        let p08 = PhysParams::reference(1.0, 0.8);
        assert!(p08.default_half_width() > 9.0);
    }
}
