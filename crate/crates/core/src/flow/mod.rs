//! Explicit gradient flow of the total energy
//! `F_ε(u) + η ε^{-κ} (C(u) + C^c(u)) + δ F_fid(u)`.
//!
//! Each step is `u ← clamp01(u - τ ∇E(u))`. Component labeling and geodesics
//! are recomputed every `refresh` steps; in between, the penalty is evaluated
//! on the frozen component sets and paths (see
//! [`PhaseTopology`](crate::topology::PhaseTopology)), so the recorded energy
//! can only jump at refresh steps.

mod config;

use std::fmt::Write as _;

pub use config::{ExperimentConfig, InitialCondition, PenaltyMode, REQUIRED_KEYS};

use crate::energetics::{
    fidelity_energy, fidelity_gradient, mm_energy, mm_gradient, FidelityData, MMParams,
};
use crate::error::{Error, Result};
use crate::grid::{BoundaryMode, Grid2D, ScalarField};
use crate::pgm;
use crate::topology::{Phase, PhaseTopology, ProfileParams};

/// Per-term energies of one state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub mm: f64,
    pub conn: f64,
    pub conn_complement: f64,
    pub fid: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(mm: f64, conn: f64, conn_complement: f64, fid: f64, penalty_weight: f64) -> Self {
        EnergyBreakdown {
            mm,
            conn,
            conn_complement,
            fid,
            total: mm + penalty_weight * (conn + conn_complement) + fid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Stationary,
    MaxSteps,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Stationary => "stationary",
            Termination::MaxSteps => "max_steps",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub field: ScalarField,
    pub steps: usize,
    /// Energy of every iterate, the initial state included.
    pub trace: Vec<EnergyBreakdown>,
    pub reason: Termination,
    /// Steps at which the topology cache was recomputed.
    pub refresh_steps: Vec<usize>,
}

impl FlowResult {
    /// Trace as CSV with columns `step,mm,conn,conn_c,fid,total`.
    pub fn trace_csv(&self) -> String {
        trace_csv(&self.trace)
    }
}

pub fn trace_csv(trace: &[EnergyBreakdown]) -> String {
    let mut s = String::from("step,mm,conn,conn_c,fid,total\n");
    for (k, e) in trace.iter().enumerate() {
        let _ = writeln!(
            s,
            "{k},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            e.mm, e.conn, e.conn_complement, e.fid, e.total
        );
    }
    s
}

/// Cached component structure, valid for `refresh` steps.
#[derive(Debug, Clone, Default)]
pub struct TopologyCache {
    high: Option<PhaseTopology>,
    low: Option<PhaseTopology>,
    computed_at: Option<usize>,
}

impl TopologyCache {
    pub fn high(&self) -> Option<&PhaseTopology> {
        self.high.as_ref()
    }

    pub fn low(&self) -> Option<&PhaseTopology> {
        self.low.as_ref()
    }

    pub fn computed_at(&self) -> Option<usize> {
        self.computed_at
    }
}

/// Everything the time stepper needs, resolved from an [`ExperimentConfig`].
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: ExperimentConfig,
    mm: MMParams,
    profile: ProfileParams,
    fidelity: Option<FidelityData>,
    cache: TopologyCache,
}

impl Stepper {
    pub fn new(cfg: &ExperimentConfig, fidelity: Option<FidelityData>) -> Result<Self> {
        cfg.validate()?;
        let profile = ProfileParams::new(cfg.alpha)?;
        Ok(Stepper {
            cfg: cfg.clone(),
            mm: MMParams::new(cfg.epsilon, cfg.bc),
            profile,
            fidelity: fidelity.filter(|f| f.delta > 0.0),
            cache: TopologyCache::default(),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn profile(&self) -> &ProfileParams {
        &self.profile
    }

    pub fn cache(&self) -> &TopologyCache {
        &self.cache
    }

    /// Recomputes labeling and geodesics from `u`.
    pub fn refresh(&mut self, u: &ScalarField, step: usize) -> Result<()> {
        let p = &self.profile;
        let (high, low) = match self.cfg.penalty {
            PenaltyMode::None => (None, None),
            PenaltyMode::Connected => (Some(PhaseTopology::compute(u, p, Phase::High)?), None),
            PenaltyMode::SimplyConnected => (
                Some(PhaseTopology::compute(u, p, Phase::High)?),
                Some(PhaseTopology::compute(
                    u,
                    p,
                    Phase::Low {
                        merge_boundary: true,
                    },
                )?),
            ),
        };
        self.cache = TopologyCache {
            high,
            low,
            computed_at: Some(step),
        };
        Ok(())
    }

    fn refresh_if_stale(&mut self, u: &ScalarField, step: usize) -> Result<bool> {
        let stale = match self.cache.computed_at {
            None => true,
            Some(at) => step >= at + self.cfg.refresh,
        };
        if stale && self.cfg.penalty != PenaltyMode::None {
            self.refresh(u, step)?;
            return Ok(true);
        }
        Ok(false)
    }

    /// Energy of `u` using the current cache for the penalty terms.
    pub fn energy(&self, u: &ScalarField) -> Result<EnergyBreakdown> {
        let mm = mm_energy(u, &self.mm);
        let fid = match &self.fidelity {
            Some(f) => fidelity_energy(u, f)?,
            None => 0.0,
        };
        let p = &self.profile;
        let conn = self
            .cache
            .high
            .as_ref()
            .map_or(0.0, |t| t.frozen_energy(u, p));
        let conn_c = self
            .cache
            .low
            .as_ref()
            .map_or(0.0, |t| t.frozen_energy(u, p));
        Ok(EnergyBreakdown::new(
            mm,
            conn,
            conn_c,
            fid,
            self.cfg.penalty_weight(),
        ))
    }

    /// Total L² gradient at `u`; zero on pinned boundary nodes.
    pub fn gradient(&self, u: &ScalarField) -> Result<ScalarField> {
        let mut grad = mm_gradient(u, &self.mm);
        if let Some(f) = &self.fidelity {
            grad = grad.axpy(1.0, &fidelity_gradient(u, f)?);
        }
        let w = self.cfg.penalty_weight();
        let p = &self.profile;
        for topo in [&self.cache.high, &self.cache.low].into_iter().flatten() {
            grad = grad.axpy(w, &topo.frozen_gradient(u, p));
        }
        if self.cfg.bc == BoundaryMode::Dirichlet0 {
            pin_boundary(&mut grad);
        }
        Ok(grad)
    }

    /// One explicit Euler step from `u`, refreshing the cache when it is older
    /// than `refresh` steps.
    pub fn step(&mut self, u: &ScalarField, step: usize) -> Result<ScalarField> {
        self.refresh_if_stale(u, step)?;
        let grad = self.gradient(u)?;
        self.apply(u, &grad, step)
    }

    fn apply(&self, u: &ScalarField, grad: &ScalarField, step: usize) -> Result<ScalarField> {
        let mut next = u.axpy(-self.cfg.tau, grad);
        if let Some((idx, v)) = next
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || !(-1.0..=2.0).contains(*v))
        {
            return Err(Error::Divergence {
                step,
                reason: format!("node {idx} reached {v} before clamping"),
            });
        }
        next.clamp01();
        if self.cfg.bc == BoundaryMode::Dirichlet0 {
            pin_boundary(&mut next);
        }
        Ok(next)
    }
}

fn pin_boundary(f: &mut ScalarField) {
    let g = *f.grid();
    let v = f.values_mut();
    for i in 0..g.nx() {
        v[g.index(i, 0)] = 0.0;
        v[g.index(i, g.ny() - 1)] = 0.0;
    }
    for j in 0..g.ny() {
        v[g.index(0, j)] = 0.0;
        v[g.index(g.nx() - 1, j)] = 0.0;
    }
}

/// `u = 1` tapering linearly to 0 over the two outermost cells.
pub fn ones_with_boundary_taper(grid: Grid2D) -> ScalarField {
    let mut u = ScalarField::zeros(grid);
    let (nx, ny) = (grid.nx(), grid.ny());
    for j in 0..ny {
        for i in 0..nx {
            let d = i.min(j).min(nx - 1 - i).min(ny - 1 - j);
            u.set(i, j, (d as f64 / 2.0).min(1.0));
        }
    }
    u
}

/// Evaluates all configured terms at `u`, computing fresh topology.
pub fn total_energy(
    u: &ScalarField,
    cfg: &ExperimentConfig,
    fidelity: Option<&FidelityData>,
) -> Result<EnergyBreakdown> {
    let mut stepper = Stepper::new(cfg, fidelity.cloned())?;
    stepper.refresh(u, 0)?;
    stepper.energy(u)
}

/// Loads `g`, `Φ` and the initial field named by the config.
pub fn load_inputs(cfg: &ExperimentConfig) -> Result<(ScalarField, Option<FidelityData>)> {
    cfg.validate_inputs()?;
    let image = cfg.image.as_ref().map(pgm::load_pgm).transpose()?;
    let grid = match &image {
        Some(g) => *g.grid(),
        None => Grid2D::new(cfg.nx, cfg.ny)?,
    };
    if grid.nx() != cfg.nx || grid.ny() != cfg.ny {
        return Err(Error::Dimension {
            expected: format!("{}x{} (config)", cfg.nx, cfg.ny),
            found: format!("{}x{} (image)", grid.nx(), grid.ny()),
        });
    }
    let phi = match &cfg.phi {
        Some(path) => pgm::load_pgm_on(path, &grid)?,
        None => ScalarField::constant(grid, 1.0),
    };
    let fidelity = match &image {
        Some(g) if cfg.delta > 0.0 => Some(FidelityData::new(g.clone(), phi, cfg.delta)?),
        _ => None,
    };
    let initial = match cfg.init {
        InitialCondition::OnesWithBoundaryTaper => ones_with_boundary_taper(grid),
        InitialCondition::FromImage => image.clone().expect("validated"),
        InitialCondition::FromFile => {
            pgm::load_pgm_on(cfg.init_file.as_ref().expect("validated"), &grid)?
        }
    };
    Ok((initial, fidelity))
}

/// Runs the configured experiment from the files it names.
pub fn run(cfg: &ExperimentConfig) -> Result<FlowResult> {
    let (initial, fidelity) = load_inputs(cfg)?;
    run_from(cfg, initial, fidelity, |_, _, _| Ok(()))
}

/// Runs the flow from `initial`.
///
/// `observe(step, u, energy)` sees every iterate, the initial one included.
/// Iteration stops once `max|u_{k+1} - u_k| / τ` drops below the stationarity
/// threshold or after `max_steps` steps.
pub fn run_from(
    cfg: &ExperimentConfig,
    initial: ScalarField,
    fidelity: Option<FidelityData>,
    mut observe: impl FnMut(usize, &ScalarField, &EnergyBreakdown) -> Result<()>,
) -> Result<FlowResult> {
    let mut stepper = Stepper::new(cfg, fidelity)?;
    let mut u = initial.clamped01();
    if cfg.bc == BoundaryMode::Dirichlet0 {
        pin_boundary(&mut u);
    }
    let mut trace = Vec::new();
    let mut refresh_steps = Vec::new();
    let mut tol = cfg.stationary_tol;
    let mut k = 0;
    let reason = loop {
        if stepper.refresh_if_stale(&u, k)? {
            refresh_steps.push(k);
        }
        let e = stepper.energy(&u)?;
        observe(k, &u, &e)?;
        trace.push(e);
        if k == cfg.max_steps {
            break Termination::MaxSteps;
        }
        let grad = stepper.gradient(&u)?;
        let next = stepper.apply(&u, &grad, k)?;
        let rate = next.max_abs_diff(&u) / cfg.tau;
        let tol = *tol.get_or_insert(1e-2 * rate);
        u = next;
        k += 1;
        if rate <= tol {
            if stepper.refresh_if_stale(&u, k)? {
                refresh_steps.push(k);
            }
            let e = stepper.energy(&u)?;
            observe(k, &u, &e)?;
            trace.push(e);
            break Termination::Stationary;
        }
    };
    Ok(FlowResult {
        field: u,
        steps: k,
        trace,
        reason,
        refresh_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            nx: 40,
            ny: 40,
            epsilon: 0.03,
            tau: 1e-5,
            max_steps: 50,
            ..Default::default()
        }
    }

    #[test]
    fn zero_field_has_zero_energy() {
        let cfg = small_cfg();
        let g = Grid2D::new(40, 40).unwrap();
        let e = total_energy(&ScalarField::zeros(g), &cfg, None).unwrap();
        assert_eq!(e, EnergyBreakdown::default());
    }

    #[test]
    fn max_steps_zero_returns_initial() {
        let cfg = ExperimentConfig {
            max_steps: 0,
            ..small_cfg()
        };
        let g = Grid2D::new(40, 40).unwrap();
        let u0 = ones_with_boundary_taper(g);
        let res = run_from(&cfg, u0.clone(), None, |_, _, _| Ok(())).unwrap();
        assert_eq!(res.steps, 0);
        assert_eq!(res.trace.len(), 1);
        assert_eq!(res.field, u0);
        assert_eq!(res.reason, Termination::MaxSteps);
    }

    #[test]
    fn critical_point_is_fixed() {
        let cfg = ExperimentConfig {
            bc: BoundaryMode::Neumann,
            ..small_cfg()
        };
        let g = Grid2D::new(40, 40).unwrap();
        let u = ScalarField::constant(g, 0.5);
        let mut s = Stepper::new(&cfg, None).unwrap();
        assert_eq!(s.step(&u, 0).unwrap(), u);
        let res = run_from(&cfg, u.clone(), None, |_, _, _| Ok(())).unwrap();
        assert_eq!(res.reason, Termination::Stationary);
        assert_eq!(res.steps, 1);
        assert_eq!(res.trace.len(), 2);
    }

    #[test]
    fn clamp_after_one_step() {
        let cfg = ExperimentConfig {
            bc: BoundaryMode::Neumann,
            ..small_cfg()
        };
        let g = Grid2D::new(40, 40).unwrap();
        let mut u = ScalarField::constant(g, 1.0);
        u.set(20, 20, 1.2);
        let mut s = Stepper::new(&cfg, None).unwrap();
        let next = s.step(&u, 0).unwrap();
        assert!(next.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn unstable_step_diverges() {
        let cfg = ExperimentConfig {
            tau: 1e-2,
            epsilon: 5e-3,
            nx: 60,
            ny: 60,
            ..small_cfg()
        };
        let g = Grid2D::new(60, 60).unwrap();
        let err = run_from(&cfg, ones_with_boundary_taper(g), None, |_, _, _| Ok(())).unwrap_err();
        match err {
            Error::Divergence { step, .. } => assert!(step < 100),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dirichlet_boundary_stays_pinned() {
        let cfg = small_cfg();
        let g = Grid2D::new(40, 40).unwrap();
        let res = run_from(&cfg, ScalarField::constant(g, 1.0), None, |_, _, _| Ok(())).unwrap();
        for idx in 0..g.len() {
            if g.is_boundary(idx) {
                assert_eq!(res.field.values()[idx], 0.0);
            }
        }
    }

    #[test]
    fn taper_profile() {
        let g = Grid2D::new(10, 8).unwrap();
        let u = ones_with_boundary_taper(g);
        assert_eq!(u.get(0, 4), 0.0);
        assert_eq!(u.get(1, 4), 0.5);
        assert_eq!(u.get(2, 4), 1.0);
        assert_eq!(u.get(5, 4), 1.0);
    }

    #[test]
    fn energy_breakdown_total() {
        let e = EnergyBreakdown::new(1.0, 0.5, 0.25, 2.0, 300.0);
        assert!((e.total - (1.0 + 300.0 * 0.75 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn trace_csv_header() {
        let csv = trace_csv(&[EnergyBreakdown::default()]);
        assert!(csv.starts_with("step,mm,conn,conn_c,fid,total\n0,"));
    }
}
