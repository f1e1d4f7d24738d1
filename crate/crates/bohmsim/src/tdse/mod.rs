//! Time-dependent Schrödinger solver on the square Dirichlet domain.
//!
//! One step is a Strang split: half-step potential phase, full kinetic step
//! applied in the sine-spectral basis (where the Dirichlet Laplacian is
//! diagonal), half-step potential phase. Every factor is a pointwise phase
//! in its own basis, so the step is unitary up to roundoff.
//!
//! [`evolve_with`]-style adaptive control compares one `dt` step against two
//! `dt/2` steps and keeps the pair, halving or doubling `dt` by factors of 2
//! between `dt_max` and `dt_max / 2^10`.

pub mod sine;

use std::collections::HashMap;
use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ModelError, TdseError};
use crate::model::{self, GridSpec, PhysParams};
use sine::SineDst;

/// Complex wavefunction samples on the interior nodes of a square grid at
/// one time instant. `values[[ix, iy]]` is the amplitude at
/// `(x_ix, y_iy)`; the Dirichlet boundary is implicit.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: GridSpec,
    pub params: PhysParams,
    pub t: f64,
    pub values: Array2<Complex64>,
}

impl WaveField {
    /// The four-mode superposition sampled at `t = 0`.
    pub fn initial(grid: GridSpec, params: PhysParams) -> Result<Self, ModelError> {
        params.validate()?;
        let values = model::initial_state(&grid, params.hbar)?;
        Ok(WaveField { grid, params, t: 0.0, values })
    }

    /// Sample an arbitrary closure on the grid (synthetic fields, tests).
    pub fn from_fn(
        grid: GridSpec,
        params: PhysParams,
        t: f64,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Self {
        let xs = grid.nodes();
        let values = Array2::from_shape_fn((grid.n(), grid.n()), |(ix, iy)| f(xs[ix], xs[iy]));
        WaveField { grid, params, t, values }
    }

    /// Largest amplitude magnitude on the grid.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest amplitude magnitude on the outermost interior ring, relative
    /// to the grid peak.
    pub fn boundary_fraction(&self) -> f64 {
        let n = self.grid.n();
        let mut b = 0f64;
        for i in 0..n {
            for &(a, c) in &[(0, i), (n - 1, i), (i, 0), (i, n - 1)] {
                b = b.max(self.values[[a, c]].norm());
            }
        }
        b / self.peak()
    }
}

/// Discrete squared L2 norm `sum |psi|^2 dx^2`; 1 for a normalized state.
pub fn norm(field: &WaveField) -> f64 {
    let w = field.grid.dx() * field.grid.dx();
    field.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w
}

/// Discrete energy `<psi|H|psi>` with the kinetic term evaluated spectrally.
/// Convenience wrapper; use [`SplitStep::energy`] in loops.
pub fn energy(field: &WaveField) -> f64 {
    SplitStep::new(field.grid, field.params).energy(field)
}

/// Advance a field by one Strang step. Convenience wrapper that replans the
/// transform; use [`SplitStep`] directly in loops.
pub fn step(field: &WaveField, dt: f64) -> WaveField {
    let mut prop = SplitStep::new(field.grid, field.params);
    let mut out = field.clone();
    prop.step_in_place(&mut out, dt);
    out
}

fn transpose_square(a: &mut Array2<Complex64>) {
    let n = a.nrows();
    let s = a.as_slice_mut().expect("contiguous field array");
    for i in 0..n {
        for j in 0..i {
            s.swap(i * n + j, j * n + i);
        }
    }
}

fn pointwise_mul(a: &mut Array2<Complex64>, phase: &Array2<Complex64>) {
    let av = a.as_slice_mut().expect("contiguous field array");
    let pv = phase.as_slice().expect("contiguous phase array");
    av.par_chunks_mut(16 * 1024)
        .zip(pv.par_chunks(16 * 1024))
        .for_each(|(ac, pc)| {
            for (x, p) in ac.iter_mut().zip(pc) {
                *x *= *p;
            }
        });
}

/// Split-operator propagator with planned transforms and per-`dt` phase
/// caches. Bound to one grid and parameter set.
pub struct SplitStep {
    grid: GridSpec,
    params: PhysParams,
    dst: SineDst,
    potential: Array2<f64>,
    /// Spectral multiplier for one application of the kinetic operator,
    /// including the inverse-transform normalization.
    kinetic_mult: Array2<f64>,
    pot_phases: HashMap<u64, Arc<Array2<Complex64>>>,
    kin_phases: HashMap<u64, Arc<Array2<Complex64>>>,
    buf_full: Array2<Complex64>,
    buf_half: Array2<Complex64>,
}

impl SplitStep {
    pub fn new(grid: GridSpec, params: PhysParams) -> Self {
        let n = grid.n();
        let dst = SineDst::new(n);
        let potential = model::potential_grid(&params, &grid);
        // Sine-mode kinetic eigenvalues: hbar^2 k^2 / 2m with
        // k_j = pi (j + 1) / (2 L).
        let eps: Vec<f64> = (0..n)
            .map(|j| {
                let k = std::f64::consts::PI * (j as f64 + 1.0) / (2.0 * grid.half_width());
                params.hbar * params.hbar * k * k / (2.0 * params.mass)
            })
            .collect();
        let scale = dst.inverse_scale() * dst.inverse_scale();
        let kinetic_mult = Array2::from_shape_fn((n, n), |(a, b)| (eps[a] + eps[b]) * scale);
        SplitStep {
            grid,
            params,
            dst,
            potential,
            kinetic_mult,
            pot_phases: HashMap::new(),
            kin_phases: HashMap::new(),
            buf_full: Array2::zeros((n, n)),
            buf_half: Array2::zeros((n, n)),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn params(&self) -> PhysParams {
        self.params
    }

    fn pot_half_phase(&mut self, dt: f64) -> Arc<Array2<Complex64>> {
        let key = dt.to_bits();
        if let Some(p) = self.pot_phases.get(&key) {
            return p.clone();
        }
        let f = -dt / (2.0 * self.params.hbar);
        let phase = Arc::new(self.potential.mapv(|v| Complex64::from_polar(1.0, f * v)));
        self.pot_phases.insert(key, phase.clone());
        phase
    }

    fn kin_phase(&mut self, dt: f64) -> Arc<Array2<Complex64>> {
        let key = dt.to_bits();
        if let Some(p) = self.kin_phases.get(&key) {
            return p.clone();
        }
        let scale = self.dst.inverse_scale() * self.dst.inverse_scale();
        let hbar = self.params.hbar;
        let phase = Arc::new(self.kinetic_mult.mapv(|eps_scaled| {
            let eps = eps_scaled / scale;
            Complex64::from_polar(scale, -eps * dt / hbar)
        }));
        self.kin_phases.insert(key, phase.clone());
        phase
    }

    /// One DST-I pass along every row (second index), in parallel.
    fn dst_rows(&self, a: &mut Array2<Complex64>) {
        let n = self.grid.n();
        let chunk = n.div_ceil(rayon::current_num_threads().max(1)).max(1);
        let dst = &self.dst;
        a.axis_chunks_iter_mut(Axis(0), chunk)
            .into_par_iter()
            .for_each(|mut block| {
                let mut scratch = dst.make_scratch();
                for mut row in block.rows_mut() {
                    dst.forward(row.as_slice_mut().expect("contiguous row"), &mut scratch);
                }
            });
    }

    /// Multiply the 2D sine spectrum of `a` by `mult` (which must already
    /// carry the inverse-transform normalization) and transform back.
    fn spectral_apply(&self, a: &mut Array2<Complex64>, mult: &Array2<Complex64>) {
        self.dst_rows(a);
        transpose_square(a);
        self.dst_rows(a);
        pointwise_mul(a, mult);
        self.dst_rows(a);
        transpose_square(a);
        self.dst_rows(a);
    }

    /// Strang step in place: `exp(-iV dt/2h) K(dt) exp(-iV dt/2h)`.
    pub fn step_in_place(&mut self, field: &mut WaveField, dt: f64) {
        debug_assert!(dt > 0.0);
        debug_assert_eq!(field.grid, self.grid);
        let pot = self.pot_half_phase(dt);
        let kin = self.kin_phase(dt);
        pointwise_mul(&mut field.values, &pot);
        self.spectral_apply(&mut field.values, &kin);
        pointwise_mul(&mut field.values, &pot);
        field.t += dt;
    }

    /// Kinetic operator `T psi` (spectral), leaving `psi` multiplied by the
    /// per-mode kinetic energy.
    fn apply_kinetic(&self, a: &mut Array2<Complex64>) {
        let mult = self.kinetic_mult.mapv(|m| Complex64::new(m, 0.0));
        self.spectral_apply(a, &mult);
    }

    /// Discrete `<psi|H|psi>`.
    pub fn energy(&self, field: &WaveField) -> f64 {
        let mut t_psi = field.values.clone();
        self.apply_kinetic(&mut t_psi);
        let w = field.grid.dx() * field.grid.dx();
        let mut acc = 0.0;
        let psi = field.values.as_slice().unwrap();
        let tp = t_psi.as_slice().unwrap();
        let vp = self.potential.as_slice().unwrap();
        for i in 0..psi.len() {
            acc += (psi[i].conj() * (tp[i] + vp[i] * psi[i])).re;
        }
        acc * w
    }

    /// Schrödinger time derivative `-(i/hbar) H psi`, used for temporal
    /// interpolation between snapshots.
    pub fn time_derivative(&self, field: &WaveField) -> Array2<Complex64> {
        let mut h_psi = field.values.clone();
        self.apply_kinetic(&mut h_psi);
        let psi = field.values.as_slice().unwrap();
        let hp = h_psi.as_slice_mut().unwrap();
        let vp = self.potential.as_slice().unwrap();
        let factor = Complex64::new(0.0, -1.0 / self.params.hbar);
        for i in 0..psi.len() {
            hp[i] = factor * (hp[i] + vp[i] * psi[i]);
        }
        h_psi
    }
}

/// Ladder depth of the adaptive controller: the step never drops below
/// `dt_max / 2^MAX_HALVINGS`.
pub const MAX_HALVINGS: u32 = 10;

/// Peak-relative amplitude allowed on the outermost interior ring before the
/// run is declared to have outgrown its domain.
pub const LEAK_LIMIT: f64 = 1e-6;

/// Allowed drift of the squared norm away from 1.
pub const NORM_BOUND: f64 = 1e-3;

/// Evolution control parameters.
#[derive(Debug, Clone, Copy)]
pub struct EvolveSettings {
    pub t_end: f64,
    /// Snapshot spacing; must be an integer multiple of the effective
    /// `dt_max` (which is shrunk to divide it if necessary).
    pub dt_snap: f64,
    pub dt_max: f64,
    /// Step-doubling local-error tolerance in the discrete L2 norm.
    pub tol_step: f64,
}

impl EvolveSettings {
    pub fn to(t_end: f64) -> Self {
        EvolveSettings { t_end, dt_snap: 1e-2, dt_max: 1e-2, tol_step: 1e-8 }
    }

    pub fn with_snap(mut self, dt_snap: f64) -> Self {
        self.dt_snap = dt_snap;
        self
    }
}

/// Counters and history resulting from one evolution.
#[derive(Debug, Clone, Default)]
pub struct EvolveStats {
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    /// Steps taken at the ladder floor with the error estimate above
    /// tolerance.
    pub forced_steps: u64,
    pub min_dt_used: f64,
    /// `(t, norm, energy)` at every snapshot.
    pub history: Vec<(f64, f64, f64)>,
}

/// A snapshot handed to the sink during evolution.
pub struct SnapshotInfo<'a> {
    pub index: u64,
    pub field: &'a WaveField,
    pub norm: f64,
    pub energy: f64,
}

/// Evolution failure: either the solver itself or the snapshot consumer.
#[derive(Debug)]
pub enum EvolveError<E> {
    Solver(TdseError),
    Sink(E),
}

impl<E> From<TdseError> for EvolveError<E> {
    fn from(e: TdseError) -> Self {
        EvolveError::Solver(e)
    }
}

/// Evolve `field` to `t_end`, calling `sink` at every snapshot time
/// `t0, t0 + dt_snap, ...` including the initial state. The field is
/// advanced in place.
///
/// Time is bookkept in integer ticks of `dt_max / 2^MAX_HALVINGS`, so
/// snapshot times tile exactly and the step ladder always lands on them.
pub fn evolve_with<E>(
    field: &mut WaveField,
    prop: &mut SplitStep,
    settings: &EvolveSettings,
    mut sink: impl FnMut(SnapshotInfo<'_>) -> Result<(), E>,
) -> Result<EvolveStats, EvolveError<E>> {
    let t0 = field.t;
    if settings.t_end < t0 {
        return Err(TdseError::BadSetup(format!(
            "t_end {} precedes field time {}",
            settings.t_end, t0
        ))
        .into());
    }
    if settings.dt_snap <= 0.0 || settings.dt_max <= 0.0 || settings.tol_step <= 0.0 {
        return Err(TdseError::BadSetup("dt_snap, dt_max, tol_step must be positive".into()).into());
    }
    let span = settings.t_end - t0;
    let n_snaps = (span / settings.dt_snap).round() as u64;
    if (n_snaps as f64 * settings.dt_snap - span).abs() > 1e-9 * settings.dt_snap.max(span) {
        return Err(TdseError::BadSetup(format!(
            "t_end - t0 = {span} is not an integer multiple of dt_snap = {}",
            settings.dt_snap
        ))
        .into());
    }

    // Shrink dt_max so it divides dt_snap, then tick out the ladder.
    let per_snap = (settings.dt_snap / settings.dt_max).ceil().max(1.0);
    let tick = settings.dt_snap / per_snap / (1u64 << MAX_HALVINGS) as f64;
    let snap_ticks = per_snap as u64 * (1u64 << MAX_HALVINGS);

    let mut stats = EvolveStats { min_dt_used: f64::INFINITY, ..Default::default() };
    let mut ticks_done: u64 = 0;
    let mut level: u32 = 0;
    let w = field.grid.dx() * field.grid.dx();

    macro_rules! emit {
        ($idx:expr) => {{
            let nrm = norm(field);
            if (nrm - 1.0).abs() > NORM_BOUND {
                return Err(
                    TdseError::NormDrift { t: field.t, norm: nrm, bound: NORM_BOUND }.into()
                );
            }
            let frac = field.boundary_fraction();
            if frac > LEAK_LIMIT {
                return Err(TdseError::BoundaryLeak { t: field.t, frac, limit: LEAK_LIMIT }.into());
            }
            let en = prop.energy(field);
            stats.history.push((field.t, nrm, en));
            sink(SnapshotInfo { index: $idx, field, norm: nrm, energy: en })
                .map_err(EvolveError::Sink)?;
        }};
    }

    emit!(0);

    for snap_idx in 1..=n_snaps {
        let target_ticks = snap_idx * snap_ticks;
        while ticks_done < target_ticks {
            let remaining = target_ticks - ticks_done;
            let ladder_ticks = 1u64 << (MAX_HALVINGS - level);
            let step_ticks = ladder_ticks.min(1u64 << (63 - remaining.leading_zeros()));
            let dt = step_ticks as f64 * tick;

            if step_ticks == 1 {
                // Ladder floor: no error estimate possible, take the step.
                prop.step_in_place(field, dt);
                stats.accepted_steps += 1;
                stats.min_dt_used = stats.min_dt_used.min(dt);
                ticks_done += 1;
                field.t = t0 + ticks_done as f64 * tick;
                continue;
            }

            prop.buf_full.assign(&field.values);
            prop.buf_half.assign(&field.values);
            let mut full = WaveField {
                grid: field.grid,
                params: field.params,
                t: field.t,
                values: std::mem::take(&mut prop.buf_full),
            };
            let mut half = WaveField {
                grid: field.grid,
                params: field.params,
                t: field.t,
                values: std::mem::take(&mut prop.buf_half),
            };
            prop.step_in_place(&mut full, dt);
            prop.step_in_place(&mut half, 0.5 * dt);
            prop.step_in_place(&mut half, 0.5 * dt);
            let est = {
                let f = full.values.as_slice().unwrap();
                let h = half.values.as_slice().unwrap();
                (f.iter().zip(h).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * w).sqrt()
            };
            prop.buf_full = full.values;

            let eff_level = MAX_HALVINGS - step_ticks.trailing_zeros();
            // A 2-tick trial cannot be halved further with error control.
            let at_floor = step_ticks == 2;
            if est <= settings.tol_step || at_floor {
                if est > settings.tol_step {
                    stats.forced_steps += 1;
                }
                // Keep the two-half-step result; recycle the old state buffer.
                prop.buf_half = std::mem::replace(&mut field.values, half.values);
                stats.accepted_steps += 1;
                stats.min_dt_used = stats.min_dt_used.min(dt);
                ticks_done += step_ticks;
                field.t = t0 + ticks_done as f64 * tick;
                if est < settings.tol_step / 16.0 && step_ticks == ladder_ticks {
                    level = level.saturating_sub(1);
                }
            } else {
                prop.buf_half = half.values;
                stats.rejected_steps += 1;
                level = (eff_level + 1).min(MAX_HALVINGS - 1);
            }
        }
        emit!(snap_idx);
    }
    Ok(stats)
}

/// Ordered snapshots at uniform spacing, with norm and energy history.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    pub params: PhysParams,
    pub grid: GridSpec,
    pub dt_snap: f64,
    pub fields: Vec<WaveField>,
    pub norms: Vec<f64>,
    pub energies: Vec<f64>,
}

impl SnapshotSeries {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.fields.first().map(|f| f.t).unwrap_or(0.0)
    }

    pub fn t_end(&self) -> f64 {
        self.fields.last().map(|f| f.t).unwrap_or(0.0)
    }

    /// Sample an analytic field `psi(t, x, y)` at uniform times. The sampled
    /// functions must be actual solutions of the Schrödinger equation for
    /// the temporal interpolation downstream to be meaningful.
    pub fn sample(
        grid: GridSpec,
        params: PhysParams,
        t0: f64,
        dt_snap: f64,
        count: usize,
        psi: impl Fn(f64, f64, f64) -> Complex64,
    ) -> Self {
        let fields: Vec<WaveField> = (0..count)
            .map(|k| {
                let t = t0 + k as f64 * dt_snap;
                WaveField::from_fn(grid, params, t, |x, y| psi(t, x, y))
            })
            .collect();
        let norms = fields.iter().map(norm).collect();
        SnapshotSeries { params, grid, dt_snap, fields, norms, energies: vec![], }
    }
}

/// Evolve and collect every snapshot in memory.
pub fn evolve(
    field: &mut WaveField,
    settings: &EvolveSettings,
) -> Result<(SnapshotSeries, EvolveStats), TdseError> {
    let mut prop = SplitStep::new(field.grid, field.params);
    let mut fields = Vec::new();
    let stats = evolve_with(field, &mut prop, settings, |snap| {
        fields.push(snap.field.clone());
        Ok::<(), std::convert::Infallible>(())
    })
    .map_err(|e| match e {
        EvolveError::Solver(e) => e,
        EvolveError::Sink(i) => match i {},
    })?;
    let series = SnapshotSeries {
        params: field.params,
        grid: field.grid,
        dt_snap: settings.dt_snap,
        fields,
        norms: stats.history.iter().map(|h| h.1).collect(),
        energies: stats.history.iter().map(|h| h.2).collect(),
    };
    Ok((series, stats))
}
