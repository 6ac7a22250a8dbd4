//! Pseudospectral integration of the full perturbation system.
//!
//! Quadratic terms are evaluated in flux form, `u·∇u − b·∇b = ∇·(u⊗u − b⊗b)`
//! and `b·∇u − u·∇b = ∇·(u⊗b − b⊗u)`, which is exact for solenoidal fields and
//! needs only the fields themselves in physical space. Products are dealiased
//! with the 2/3 rule. Time stepping is RK4 on integrating-factor variables, so
//! the diffusion of the dissipative field is integrated exactly.

mod init;
mod snapshot;

pub(crate) use init::random_solenoidal;
pub use init::{random_state, InitialData};
pub use snapshot::{read_snapshot, write_snapshot};

use num_complex::Complex64;

use crate::diophantine::BackgroundField;
use crate::error::{Error, Result};
use crate::propagator::Case;
use crate::spectral::{
    leray_project_in_place, norm_sq, SpectralField, SpectralTransform, TorusGrid,
};

/// Time-stamped perturbation state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u_hat: SpectralField,
    pub b_hat: SpectralField,
    pub case: Case,
    pub bg: BackgroundField,
}

/// Worst-case violations of the state invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub divergence: f64,
    pub mean: f64,
    pub symmetry: f64,
}

impl SimState {
    pub fn new(
        t: f64,
        u_hat: SpectralField,
        b_hat: SpectralField,
        case: Case,
        bg: BackgroundField,
    ) -> Result<Self> {
        u_hat.check_same_shape(&b_hat)?;
        if !u_hat.is_vector() {
            return Err(Error::config("state fields must be vector fields"));
        }
        if u_hat.grid().dim() != bg.dim() {
            return Err(Error::config(format!(
                "grid dimension {} differs from background dimension {}",
                u_hat.grid().dim(),
                bg.dim()
            )));
        }
        Ok(Self {
            t,
            u_hat,
            b_hat,
            case,
            bg,
        })
    }

    pub fn zero(grid: TorusGrid, case: Case, bg: BackgroundField) -> Result<Self> {
        let z = SpectralField::zeros_vector(grid);
        Self::new(0.0, z.clone(), z, case, bg)
    }

    pub fn grid(&self) -> &TorusGrid {
        self.u_hat.grid()
    }

    /// `½(‖u‖² + ‖b‖²)` in coefficient space.
    pub fn energy(&self) -> f64 {
        let su: f64 = self.u_hat.coeffs().iter().map(|z| z.norm_sqr()).sum();
        let sb: f64 = self.b_hat.coeffs().iter().map(|z| z.norm_sqr()).sum();
        0.5 * (su + sb)
    }

    /// `μ‖∇u‖² + ν‖∇b‖²` for the given diffusion coefficients.
    pub fn dissipation_with(&self, mu: f64, nu: f64) -> f64 {
        let grid = *self.grid();
        let len = grid.len();
        let mut total = 0.0;
        for idx in 1..len {
            let q = norm_sq(&grid.wavevector(idx));
            let mut su = 0.0;
            let mut sb = 0.0;
            for c in 0..grid.dim() {
                su += self.u_hat.component(c)[idx].norm_sqr();
                sb += self.b_hat.component(c)[idx].norm_sqr();
            }
            total += q * (mu * su + nu * sb);
        }
        total
    }

    pub fn dissipation(&self) -> f64 {
        self.dissipation_with(self.case.mu(), self.case.nu())
    }

    pub fn invariants(&self) -> InvariantReport {
        InvariantReport {
            divergence: self
                .u_hat
                .divergence_residual()
                .unwrap_or(f64::NAN)
                .max(self.b_hat.divergence_residual().unwrap_or(f64::NAN)),
            mean: self.u_hat.mean_mode_magnitude().max(self.b_hat.mean_mode_magnitude()),
            symmetry: self
                .u_hat
                .conjugate_symmetry_defect()
                .max(self.b_hat.conjugate_symmetry_defect()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u_hat.is_finite() && self.b_hat.is_finite()
    }

    /// Projects, removes the mean and restores conjugate symmetry in both fields.
    pub fn enforce_invariants(&mut self, project_b: bool) {
        // infallible: both fields are vector fields by construction
        let _ = leray_project_in_place(&mut self.u_hat);
        if project_b {
            let _ = leray_project_in_place(&mut self.b_hat);
        }
        self.u_hat.zero_mean();
        self.b_hat.zero_mean();
        self.u_hat.symmetrize();
        self.b_hat.symmetrize();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    /// Horizon `T`; a run takes `round(T/dt)` steps.
    pub horizon: f64,
    /// Abort once `max|u| · dt / dx` exceeds this value.
    pub cfl_guard: f64,
    /// Project the magnetic tendency and state as well as the velocity.
    pub project_b: bool,
    /// Hooks fire every `record_stride` steps and at the final step.
    pub record_stride: usize,
    /// Test-only: drop both diffusion terms.
    pub inviscid: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 1.0,
            cfl_guard: 1.0,
            project_b: true,
            record_stride: 1,
            inviscid: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::config(format!("T must be nonnegative, got {}", self.horizon)));
        }
        if !(self.cfl_guard > 0.0) {
            return Err(Error::config(format!("cfl_guard must be positive, got {}", self.cfl_guard)));
        }
        if self.record_stride == 0 {
            return Err(Error::config("record_stride must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    fn diffusion(&self, case: Case) -> (f64, f64) {
        if self.inviscid {
            (0.0, 0.0)
        } else {
            (case.mu(), case.nu())
        }
    }
}

/// Energy and dissipation at every step of a run, for budget checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyBudget {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub dissipation: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub budget: EnergyBudget,
    pub final_state: SimState,
    pub steps: usize,
    pub max_courant: f64,
}

/// Precomputed per-mode data and scratch buffers for one grid.
#[derive(Debug)]
pub struct Solver {
    grid: TorusGrid,
    config: SolverConfig,
    transform: SpectralTransform,
    kvec: Vec<[f64; 3]>,
    q: Vec<f64>,
    retained: Vec<bool>,
    nyquist: Vec<bool>,
    // index of −k, and k with Nyquist components zeroed (used by the projection)
    neg: Vec<usize>,
    dkvec: Vec<[f64; 3]>,
    dq: Vec<f64>,
    // product slot of T_ij, and slot and sign of W_ij, indexed by i·dim + j
    sym_map: Vec<usize>,
    anti_map: Vec<(usize, f64)>,
    // integrating factors for the current case: full and half step, per field
    factors: Option<(Case, Factors)>,
    phys: Vec<Vec<Complex64>>,
    prod: Vec<Vec<Complex64>>,
    prod_hat: Vec<Vec<Complex64>>,
    work: Vec<Complex64>,
    stages: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone)]
struct Factors {
    eu: Vec<f64>,
    eu_half: Vec<f64>,
    eb: Vec<f64>,
    eb_half: Vec<f64>,
}

type IndexPairs = Vec<(usize, usize)>;

/// Symmetric pairs `(i, j)`, `i ≤ j`, followed by antisymmetric pairs `i < j`.
fn product_layout(dim: usize) -> (IndexPairs, IndexPairs) {
    let mut sym = Vec::new();
    let mut anti = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            sym.push((i, j));
            if i < j {
                anti.push((i, j));
            }
        }
    }
    (sym, anti)
}

impl Solver {
    pub fn new(grid: TorusGrid, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let len = grid.len();
        let mut kvec = Vec::with_capacity(len);
        let mut q = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        let mut nyquist = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        let mut dkvec = Vec::with_capacity(len);
        let mut dq = Vec::with_capacity(len);
        for idx in 0..len {
            let k = grid.wavevector(idx);
            kvec.push([k[0] as f64, k[1] as f64, k[2] as f64]);
            q.push(norm_sq(&k));
            retained.push(grid.is_retained(&k));
            nyquist.push(grid.is_nyquist(&k));
            neg.push(grid.negated_index(idx));
            let d = grid.derivative_wavevector(idx);
            dkvec.push([d[0] as f64, d[1] as f64, d[2] as f64]);
            dq.push(norm_sq(&d));
        }
        let dim = grid.dim();
        let (sym, anti) = product_layout(dim);
        let products = sym.len() + anti.len();
        let mut sym_map = vec![0usize; dim * dim];
        let mut anti_map = vec![(0usize, 0.0f64); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let (a, b) = (i.min(j), i.max(j));
                sym_map[i * dim + j] = sym.iter().position(|&p| p == (a, b)).unwrap_or(0);
                if i != j {
                    let sign = if i < j { 1.0 } else { -1.0 };
                    let pos = anti.iter().position(|&p| p == (a, b)).unwrap_or(0);
                    anti_map[i * dim + j] = (sym.len() + pos, sign);
                }
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            grid,
            config,
            transform: SpectralTransform::new(grid),
            kvec,
            q,
            retained,
            nyquist,
            neg,
            dkvec,
            dq,
            sym_map,
            anti_map,
            factors: None,
            phys: vec![vec![zero; len]; dim],
            prod: vec![vec![zero; len]; products.div_ceil(2)],
            prod_hat: vec![vec![zero; len]; products + 1],
            work: Vec::new(),
            stages: vec![vec![zero; dim * len]; 10],
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn check_state(&self, state: &SimState) -> Result<()> {
        if *state.grid() != self.grid {
            return Err(Error::config(format!(
                "state grid {:?} does not match solver grid {:?}",
                state.grid(),
                self.grid
            )));
        }
        Ok(())
    }

    /// Explicit tendencies `(du, db)`: quadratic terms plus the `b̃·∇` coupling,
    /// with the pressure removed by projection. Diffusion is excluded.
    pub fn nonlinear_rhs(&mut self, state: &SimState) -> Result<(SpectralField, SpectralField)> {
        self.check_state(state)?;
        let len = self.grid.len();
        let dim = self.grid.dim();
        let mut du = vec![Complex64::new(0.0, 0.0); dim * len];
        let mut db = du.clone();
        self.rhs(
            state.u_hat.coeffs(),
            state.b_hat.coeffs(),
            state.bg.b_tilde(),
            state.t,
            &mut du,
            &mut db,
        )?;
        Ok((
            SpectralField::from_coeffs(self.grid, dim, du)?,
            SpectralField::from_coeffs(self.grid, dim, db)?,
        ))
    }

    /// Writes tendencies into `du`, `db`; returns `max|u|` in physical space.
    fn rhs(
        &mut self,
        u: &[Complex64],
        b: &[Complex64],
        b_tilde: &[f64],
        t: f64,
        du: &mut [Complex64],
        db: &mut [Complex64],
    ) -> Result<f64> {
        let len = self.grid.len();
        let dim = self.grid.dim();
        let zero = Complex64::new(0.0, 0.0);

        // physical u_c + i b_c from dealiased coefficients
        for c in 0..dim {
            let buf = &mut self.phys[c];
            let (uc, bc) = (&u[c * len..(c + 1) * len], &b[c * len..(c + 1) * len]);
            for (((z, &keep), x), y) in buf.iter_mut().zip(&self.retained).zip(uc).zip(bc) {
                *z = if keep {
                    Complex64::new(x.re - y.im, x.im + y.re)
                } else {
                    zero
                };
            }
            self.transform.inverse_in_place(buf, &mut self.work);
        }

        let mut max_u2 = 0.0f64;
        for p in 0..len {
            let mut s = 0.0;
            for c in 0..dim {
                s += self.phys[c][p].re * self.phys[c][p].re;
            }
            max_u2 = max_u2.max(s);
        }
        if !max_u2.is_finite() {
            return Err(Error::Divergence {
                t,
                reason: "non-finite velocity in physical space".into(),
            });
        }

        // products packed two per complex buffer: T_ij = u_i u_j − b_i b_j, W_ij = u_i b_j − b_i u_j
        let (sym, anti) = product_layout(dim);
        let slots: Vec<(usize, usize, bool)> = sym
            .iter()
            .map(|&(i, j)| (i, j, false))
            .chain(anti.iter().map(|&(i, j)| (i, j, true)))
            .collect();
        for (slot, &(i, j, antisym)) in slots.iter().enumerate() {
            let (pi, pj) = (&self.phys[i], &self.phys[j]);
            let dst = &mut self.prod[slot / 2];
            let it = dst.iter_mut().zip(pi.iter().zip(pj));
            match (antisym, slot % 2 == 1) {
                (false, false) => it.for_each(|(d, (a, c))| *d = Complex64::new(a.re * c.re - a.im * c.im, 0.0)),
                (false, true) => it.for_each(|(d, (a, c))| d.im = a.re * c.re - a.im * c.im),
                (true, false) => it.for_each(|(d, (a, c))| *d = Complex64::new(a.re * c.im - a.im * c.re, 0.0)),
                (true, true) => it.for_each(|(d, (a, c))| d.im = a.re * c.im - a.im * c.re),
            }
        }
        let half_i = Complex64::new(0.0, -0.5);
        for pair in 0..slots.len().div_ceil(2) {
            let z = &mut self.prod[pair];
            self.transform.forward_in_place(z, &mut self.work);
            if !z.iter().all(|w| w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::Divergence {
                    t,
                    reason: "non-finite quadratic products".into(),
                });
            }
            let (lo, hi) = self.prod_hat.split_at_mut(2 * pair + 1);
            let (a, c) = (&mut lo[2 * pair], &mut hi[0]);
            // only retained modes are read back
            for idx in 0..len {
                if self.retained[idx] {
                    let zk = z[idx];
                    let zm = z[self.neg[idx]].conj();
                    a[idx] = (zk + zm) * 0.5;
                    c[idx] = (zk - zm) * half_i;
                }
            }
        }

        let mut nu_k = [zero; 3];
        let mut nb_k = [zero; 3];
        for idx in 1..len {
            let kv = self.kvec[idx];
            let beta = if self.nyquist[idx] {
                0.0
            } else {
                b_tilde.iter().zip(kv.iter()).map(|(x, y)| x * y).sum::<f64>()
            };
            let ib = Complex64::new(0.0, beta);
            for i in 0..dim {
                nu_k[i] = ib * b[i * len + idx];
                nb_k[i] = ib * u[i * len + idx];
            }
            if self.retained[idx] {
                for i in 0..dim {
                    let mut acc_u = zero;
                    let mut acc_b = zero;
                    for (j, &kj) in kv.iter().enumerate().take(dim) {
                        acc_u += self.prod_hat[self.sym_map[i * dim + j]][idx] * kj;
                        if i != j {
                            let (slot, sign) = self.anti_map[i * dim + j];
                            acc_b += self.prod_hat[slot][idx] * (sign * kj);
                        }
                    }
                    // −∂_j T_ij ↦ −i k_j T̂_ij ; ∂_j W_ij ↦ i k_j Ŵ_ij
                    nu_k[i] += Complex64::new(acc_u.im, -acc_u.re);
                    nb_k[i] += Complex64::new(-acc_b.im, acc_b.re);
                }
            }
            project_mode(&mut nu_k[..dim], &kv, self.q[idx]);
            if self.config.project_b {
                project_mode(&mut nb_k[..dim], &kv, self.q[idx]);
            }
            for i in 0..dim {
                du[i * len + idx] = nu_k[i];
                db[i * len + idx] = nb_k[i];
            }
        }
        for i in 0..dim {
            du[i * len] = zero;
            db[i * len] = zero;
        }
        Ok(max_u2.sqrt())
    }

    fn prepare_factors(&mut self, case: Case) {
        if matches!(&self.factors, Some((c, _)) if *c == case) {
            return;
        }
        let (mu, nu) = self.config.diffusion(case);
        let dt = self.config.dt;
        let make = |coef: f64, h: f64| -> Vec<f64> { self.q.iter().map(|q| (-coef * q * h).exp()).collect() };
        let f = Factors {
            eu: make(mu, dt),
            eu_half: make(mu, 0.5 * dt),
            eb: make(nu, dt),
            eb_half: make(nu, 0.5 * dt),
        };
        self.factors = Some((case, f));
    }

    /// Same operations as [`SimState::enforce_invariants`], on precomputed tables.
    fn enforce(&self, coeffs: &mut [Complex64], project: bool) {
        let len = self.grid.len();
        let dim = self.grid.dim();
        if project {
            for idx in 1..len {
                let q = self.dq[idx];
                if q == 0.0 {
                    continue;
                }
                let k = &self.dkvec[idx];
                let mut kv = Complex64::new(0.0, 0.0);
                for c in 0..dim {
                    kv += coeffs[c * len + idx] * k[c];
                }
                let factor = kv / q;
                for c in 0..dim {
                    coeffs[c * len + idx] -= factor * k[c];
                }
            }
        }
        for comp in coeffs.chunks_mut(len) {
            comp[0] = Complex64::new(0.0, 0.0);
            for idx in 0..len {
                let neg = self.neg[idx];
                if neg < idx {
                    continue;
                }
                if neg == idx {
                    comp[idx].im = 0.0;
                } else {
                    let avg = (comp[idx] + comp[neg].conj()) * 0.5;
                    comp[idx] = avg;
                    comp[neg] = avg.conj();
                }
            }
        }
    }

    /// One integrating-factor RK4 step of size `dt`.
    pub fn step(&mut self, state: &SimState) -> Result<SimState> {
        self.step_measured(state).map(|(s, _)| s)
    }

    fn step_measured(&mut self, state: &SimState) -> Result<(SimState, f64)> {
        self.check_state(state)?;
        self.prepare_factors(state.case);
        let (case, factors) = self.factors.take().expect("factors prepared above");
        let mut stages = std::mem::take(&mut self.stages);
        let out = self.advance(state, &factors, &mut stages);
        self.factors = Some((case, factors));
        self.stages = stages;
        out
    }

    fn advance(
        &mut self,
        state: &SimState,
        f: &Factors,
        stages: &mut [Vec<Complex64>],
    ) -> Result<(SimState, f64)> {
        let len = self.grid.len();
        let dim = self.grid.dim();
        let dt = self.config.dt;
        let b_tilde = state.bg.b_tilde();
        let u0 = state.u_hat.coeffs();
        let b0 = state.b_hat.coeffs();
        let [k1u, k1b, k2u, k2b, k3u, k3b, k4u, k4b, su, sb] = stages else {
            unreachable!("solver keeps ten stage buffers")
        };

        let max_u = self.rhs(u0, b0, b_tilde, state.t, k1u, k1b)?;
        let courant = max_u * dt / self.grid.spacing();
        if courant > self.config.cfl_guard {
            return Err(Error::Cfl {
                courant,
                limit: self.config.cfl_guard,
                state: Box::new(state.clone()),
            });
        }

        for c in 0..dim {
            for m in 0..len {
                let i = c * len + m;
                su[i] = (u0[i] + k1u[i] * (0.5 * dt)) * f.eu_half[m];
                sb[i] = (b0[i] + k1b[i] * (0.5 * dt)) * f.eb_half[m];
            }
        }
        self.rhs(su, sb, b_tilde, state.t + 0.5 * dt, k2u, k2b)?;

        for c in 0..dim {
            for m in 0..len {
                let i = c * len + m;
                su[i] = u0[i] * f.eu_half[m] + k2u[i] * (0.5 * dt);
                sb[i] = b0[i] * f.eb_half[m] + k2b[i] * (0.5 * dt);
            }
        }
        self.rhs(su, sb, b_tilde, state.t + 0.5 * dt, k3u, k3b)?;

        for c in 0..dim {
            for m in 0..len {
                let i = c * len + m;
                su[i] = u0[i] * f.eu[m] + k3u[i] * (dt * f.eu_half[m]);
                sb[i] = b0[i] * f.eb[m] + k3b[i] * (dt * f.eb_half[m]);
            }
        }
        self.rhs(su, sb, b_tilde, state.t + dt, k4u, k4b)?;

        let mut un = vec![Complex64::new(0.0, 0.0); dim * len];
        let mut bn = un.clone();
        let w = dt / 6.0;
        for c in 0..dim {
            for m in 0..len {
                let i = c * len + m;
                let (e, eh) = (f.eu[m], f.eu_half[m]);
                un[i] = u0[i] * e + (k1u[i] * e + (k2u[i] + k3u[i]) * (2.0 * eh) + k4u[i]) * w;
                let (e, eh) = (f.eb[m], f.eb_half[m]);
                bn[i] = b0[i] * e + (k1b[i] * e + (k2b[i] + k3b[i]) * (2.0 * eh) + k4b[i]) * w;
            }
        }
        self.enforce(&mut un, true);
        self.enforce(&mut bn, self.config.project_b);

        let next = SimState {
            t: state.t + dt,
            u_hat: SpectralField::from_coeffs(self.grid, dim, un)?,
            b_hat: SpectralField::from_coeffs(self.grid, dim, bn)?,
            case: state.case,
            bg: state.bg.clone(),
        };
        if !next.is_finite() {
            return Err(Error::Divergence {
                t: next.t,
                reason: "non-finite coefficients after step".into(),
            });
        }
        Ok((next, courant))
    }

    fn record(&self, budget: &mut EnergyBudget, state: &SimState, mu: f64, nu: f64) {
        let len = self.grid.len();
        let dim = self.grid.dim();
        let (u, b) = (state.u_hat.coeffs(), state.b_hat.coeffs());
        let mut total = 0.0;
        for idx in 1..len {
            let mut su = 0.0;
            let mut sb = 0.0;
            for c in 0..dim {
                su += u[c * len + idx].norm_sqr();
                sb += b[c * len + idx].norm_sqr();
            }
            total += self.q[idx] * (mu * su + nu * sb);
        }
        budget.times.push(state.t);
        budget.energy.push(state.energy());
        budget.dissipation.push(total);
    }

    /// Advances `state0` to `T`, calling `hook` at step 0, every
    /// `record_stride` steps and at the final step.
    pub fn run(
        &mut self,
        state0: &SimState,
        hook: &mut dyn FnMut(&SimState) -> Result<()>,
    ) -> Result<RunSummary> {
        self.check_state(state0)?;
        let steps = self.config.steps();
        let (mu, nu) = self.config.diffusion(state0.case);
        let t0 = state0.t;
        let mut budget = EnergyBudget::default();
        let mut state = state0.clone();
        self.record(&mut budget, &state, mu, nu);
        hook(&state)?;
        let mut max_courant = 0.0f64;
        for n in 1..=steps {
            let (mut next, courant) = self.step_measured(&state)?;
            // keep time free of accumulated rounding
            next.t = t0 + n as f64 * self.config.dt;
            max_courant = max_courant.max(courant);
            state = next;
            self.record(&mut budget, &state, mu, nu);
            if n % self.config.record_stride == 0 || n == steps {
                hook(&state)?;
            }
        }
        Ok(RunSummary {
            budget,
            final_state: state,
            steps,
            max_courant,
        })
    }
}

#[inline]
fn project_mode(v: &mut [Complex64], k: &[f64; 3], q: f64) {
    let mut kv = Complex64::new(0.0, 0.0);
    for (c, z) in v.iter().enumerate() {
        kv += z * k[c];
    }
    let factor = kv / q;
    for (c, z) in v.iter_mut().enumerate() {
        *z -= factor * k[c];
    }
}

/// Tendencies of `state` on a solver built for its grid.
pub fn nonlinear_rhs(state: &SimState) -> Result<(SpectralField, SpectralField)> {
    Solver::new(*state.grid(), SolverConfig::default())?.nonlinear_rhs(state)
}

pub fn step(state: &SimState, config: &SolverConfig) -> Result<SimState> {
    Solver::new(*state.grid(), config.clone())?.step(state)
}

pub fn run(
    state0: &SimState,
    config: &SolverConfig,
    hook: &mut dyn FnMut(&SimState) -> Result<()>,
) -> Result<RunSummary> {
    Solver::new(*state0.grid(), config.clone())?.run(state0, hook)
}
