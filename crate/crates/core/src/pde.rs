//! Finite-difference solvers for the smoothed and singular value-function
//! PDEs and the linearizing substitution `h = exp(beta U)`.
//!
//! All solvers march a tridiagonal implicit diffusion step (Thomas solve)
//! with the source and the squared-gradient term taken explicitly from the
//! previous time level. Neumann data enters through second-order ghost
//! nodes: the gradient prescription at the barrier is 0 for the smoothed
//! problem and -1 for the singular limit; the far field is truncated with a
//! homogeneous Neumann condition, where the solution is exponentially small.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::real::Real;
use crate::regularized::gaussian_kernel;
use crate::surface::{Grid1D, Surface};

/// Equation selector for [`residual`].
#[derive(Debug, Clone, Copy)]
pub enum PdeKind<T: Real> {
    /// `dU/dt = (sigma^2/2) U_zz + G_eps + (gamma^2/4kappa) U_z^2`.
    HjbEps(T),
    /// Same without the kernel source (the singular-limit equation).
    Singular,
}

/// Solves a tridiagonal system in place via the Thomas algorithm.
/// `sub[0]` and `sup[n-1]` are ignored.
fn thomas<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &mut [T], scratch: &mut [T]) {
    let n = diag.len();
    scratch[0] = sup[0] / diag[0];
    rhs[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = T::one() / (diag[i] - sub[i] * scratch[i - 1]);
        scratch[i] = sup[i] * m;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) * m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - scratch[i] * rhs[i + 1];
    }
}

/// Time-marches the semilinear equation
/// `U_t = (sigma^2/2) U_zz + source(z) + q U_z^2` with Neumann data
/// `U_z = left_gradient` at `z_min` and `U_z = 0` at `z_max`, zero initial
/// data, diffusion weighted `theta`-implicitly and the nonlinearity lagged
/// one level.
fn solve_semilinear<T: Real>(
    params: &ModelParams<T>,
    source: &[T],
    left_gradient: T,
    grid: &Grid1D<T>,
    theta: T,
) -> Result<Surface<T>> {
    let nz = grid.nz();
    let nt = grid.nt();
    let dz = grid.dz();
    let dt = grid.dt();
    let sigma = params.sigma();
    let q = params.gamma() * params.gamma() / (T::of(4.0) * params.kappa());
    let mu = dt * sigma * sigma / T::of(2.0);
    let lam = mu / (dz * dz);
    let one = T::one();
    let two = T::of(2.0);

    // implicit matrix I - theta*mu*D2 with ghost-node Neumann rows
    let mut sub = vec![-theta * lam; nz];
    let mut sup = vec![-theta * lam; nz];
    let diag = vec![one + two * theta * lam; nz];
    sup[0] = -two * theta * lam;
    sub[nz - 1] = -two * theta * lam;

    // constant boundary forcing: the ghost value carries -2 dz g, and both
    // the implicit and explicit D2 applications contribute, summing to
    // -2 mu g / dz on the first row regardless of theta
    let boundary_forcing = -two * mu * left_gradient / dz;

    // stability certificate for the explicit gradient term (checked per step)
    let cert_cap = two * params.kappa() * dz / params.gamma();

    let mut values = vec![T::zero(); (nt + 1) * nz];
    let mut current = vec![T::zero(); nz];
    let mut rhs = vec![T::zero(); nz];
    let mut grad = vec![T::zero(); nz];
    let mut scratch = vec![T::zero(); nz];

    for step in 0..nt {
        // lagged gradient; boundary columns use the prescribed Neumann data
        grad[0] = left_gradient;
        grad[nz - 1] = T::zero();
        for j in 1..nz - 1 {
            grad[j] = (current[j + 1] - current[j - 1]) / (two * dz);
        }
        let max_grad = grad.iter().fold(T::zero(), |m, g| m.max(g.abs()));
        if max_grad > T::zero() && dt > cert_cap / max_grad {
            return Err(Error::Unstable(format!(
                "dt = {dt} exceeds 2 kappa dz / (gamma max|U_z|) = {} at time step {step}",
                cert_cap / max_grad
            )));
        }

        let explicit = one - theta;
        for j in 0..nz {
            let d2 = if j == 0 {
                two * (current[1] - current[0])
            } else if j == nz - 1 {
                two * (current[nz - 2] - current[nz - 1])
            } else {
                current[j - 1] - two * current[j] + current[j + 1]
            } / (dz * dz);
            rhs[j] = current[j] + explicit * mu * d2 + dt * (source[j] + q * grad[j] * grad[j]);
        }
        rhs[0] = rhs[0] + boundary_forcing;

        thomas(&sub, &diag, &sup, &mut rhs, &mut scratch);
        current.copy_from_slice(&rhs);
        if let Some(bad) = current.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite value at node {bad} after time step {}",
                step + 1
            )));
        }
        values[(step + 1) * nz..(step + 2) * nz].copy_from_slice(&current);
    }
    Surface::new(*grid, values)
}

fn check_kernel_resolution<T: Real>(eps: T, grid: &Grid1D<T>) -> Result<()> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    let cap = eps.sqrt() / T::of(4.0);
    if grid.dz() > cap {
        return Err(Error::InvalidParameter(format!(
            "grid does not resolve the kernel: dz = {} exceeds sqrt(eps)/4 = {cap}",
            grid.dz()
        )));
    }
    Ok(())
}

fn kernel_source<T: Real>(params: &ModelParams<T>, eps: T, grid: &Grid1D<T>) -> Vec<T> {
    (0..grid.nz())
        .map(|j| gaussian_kernel(eps, params.barrier(), grid.z_at(j)))
        .collect()
}

/// Solves the smoothed equation
/// `U_t = (sigma^2/2) U_zz + G_eps + (gamma^2/4kappa) U_z^2` with `U(0,.) = 0`
/// and homogeneous Neumann data on both ends. Crank-Nicolson diffusion, the
/// data is compatible at `t = 0` so no damping issues arise and the time
/// error stays second order apart from the lagged nonlinearity.
pub fn solve_hjb_eps<T: Real>(
    params: &ModelParams<T>,
    eps: T,
    grid: &Grid1D<T>,
) -> Result<Surface<T>> {
    params.validate()?;
    check_kernel_resolution(eps, grid)?;
    let source = kernel_source(params, eps, grid);
    solve_semilinear(params, &source, T::zero(), grid, T::of(0.5))
}

/// Solves the singular-limit equation (zero source, barrier gradient -1)
/// with fully implicit diffusion: the Neumann data is incompatible with the
/// zero initial condition at the corner, and backward Euler damps the
/// resulting layer instead of letting it ring.
pub fn solve_singular<T: Real>(params: &ModelParams<T>, grid: &Grid1D<T>) -> Result<Surface<T>> {
    params.validate()?;
    let source = vec![T::zero(); grid.nz()];
    solve_semilinear(params, &source, -T::one(), grid, T::one())
}

/// Result of the linearized solve: `h` and its transform `U = log(h)/beta`.
#[derive(Debug, Clone)]
pub struct HopfColeSolution<T: Real> {
    pub h: Surface<T>,
    pub u: Surface<T>,
}

/// Crank-Nicolson solve of the linear equation
/// `h_t = (sigma^2/2) h_zz + beta G_eps h` with `h(0,.) = 1` and homogeneous
/// Neumann data, plus the transform back to value units.
pub fn solve_hopf_cole<T: Real>(
    params: &ModelParams<T>,
    eps: T,
    grid: &Grid1D<T>,
) -> Result<HopfColeSolution<T>> {
    params.validate()?;
    check_kernel_resolution(eps, grid)?;
    let beta = params.beta();
    let potential: Vec<T> = kernel_source(params, eps, grid)
        .into_iter()
        .map(|g| beta * g)
        .collect();
    solve_linear_with_potential(params, &potential, grid)
}

fn solve_linear_with_potential<T: Real>(
    params: &ModelParams<T>,
    potential: &[T],
    grid: &Grid1D<T>,
) -> Result<HopfColeSolution<T>> {
    let nz = grid.nz();
    let nt = grid.nt();
    let dz = grid.dz();
    let dt = grid.dt();
    let sigma = params.sigma();
    let beta = params.beta();
    let half = T::of(0.5);
    let one = T::one();
    let two = T::of(2.0);
    let lam = dt * sigma * sigma / (two * dz * dz);

    // A = (sigma^2/2) D2 + diag(potential); march (I - dt/2 A) h+ = (I + dt/2 A) h
    let mut sub = vec![-half * lam; nz];
    let mut sup = vec![-half * lam; nz];
    let mut diag = vec![T::zero(); nz];
    sup[0] = -lam;
    sub[nz - 1] = -lam;
    for j in 0..nz {
        diag[j] = one + lam - half * dt * potential[j];
    }

    let mut values = vec![one; (nt + 1) * nz];
    let mut current = vec![one; nz];
    let mut rhs = vec![T::zero(); nz];
    let mut scratch = vec![T::zero(); nz];

    for step in 0..nt {
        for j in 0..nz {
            let d2 = if j == 0 {
                two * (current[1] - current[0])
            } else if j == nz - 1 {
                two * (current[nz - 2] - current[nz - 1])
            } else {
                current[j - 1] - two * current[j] + current[j + 1]
            };
            rhs[j] = current[j] + half * lam * d2 + half * dt * potential[j] * current[j];
        }
        thomas(&sub, &diag, &sup, &mut rhs, &mut scratch);
        current.copy_from_slice(&rhs);
        if let Some(bad) = current.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite h at node {bad} after time step {}",
                step + 1
            )));
        }
        values[(step + 1) * nz..(step + 2) * nz].copy_from_slice(&current);
    }
    let h = Surface::new(*grid, values)?;
    let u_values: Vec<T> = h.values().iter().map(|&v| v.ln() / beta).collect();
    let u = Surface::new(*grid, u_values)?;
    Ok(HopfColeSolution { h, u })
}

/// Maximum absolute centered-difference residual of the named equation over
/// interior nodes; the first time row is excluded, the last row uses a
/// second-order one-sided time stencil.
pub fn residual<T: Real>(
    params: &ModelParams<T>,
    surface: &Surface<T>,
    kind: PdeKind<T>,
) -> Result<T> {
    params.validate()?;
    let grid = surface.grid();
    let nz = grid.nz();
    let nt = grid.nt();
    let dz = grid.dz();
    let dt = grid.dt();
    let sigma2 = params.sigma() * params.sigma();
    let q = params.gamma() * params.gamma() / (T::of(4.0) * params.kappa());
    let two = T::of(2.0);
    let source: Vec<T> = match kind {
        PdeKind::HjbEps(eps) => kernel_source(params, eps, grid),
        PdeKind::Singular => vec![T::zero(); nz],
    };
    let mut worst = T::zero();
    for k in 1..=nt {
        #[allow(clippy::needless_range_loop)] // j indexes a five-point stencil, not one slice
        for j in 1..nz - 1 {
            let u_t = if k < nt {
                (surface.value(k + 1, j) - surface.value(k - 1, j)) / (two * dt)
            } else if nt >= 2 {
                (T::of(3.0) * surface.value(k, j) - T::of(4.0) * surface.value(k - 1, j)
                    + surface.value(k - 2, j))
                    / (two * dt)
            } else {
                continue;
            };
            let u_z = (surface.value(k, j + 1) - surface.value(k, j - 1)) / (two * dz);
            let u_zz = (surface.value(k, j + 1) - two * surface.value(k, j)
                + surface.value(k, j - 1))
                / (dz * dz);
            let res = u_t - sigma2 / two * u_zz - q * u_z * u_z - source[j];
            worst = worst.max(res.abs());
        }
    }
    Ok(worst)
}
