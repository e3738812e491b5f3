use super::liouvillian::Liouvillian;
use crate::fock::DensityMatrix;
use crate::linalg::{unvectorize, CsrMatrix, SparseLu};
use crate::ode::{self, Tolerances};
use crate::{Error, Result, C64};

/// Relative residual `‖L ρ‖∞ / (‖L‖∞ ‖ρ‖∞)` accepted for a steady state.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;

/// How the returned steady state was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyMethod {
    Direct,
    Refined,
    TimeIntegration,
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub residual: f64,
    pub method: SteadyMethod,
}

/// Null vector of `L` with unit trace.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    steady_state_report(l).map(|s| s.rho)
}

/// Solves `L ρ = 0` with the `ρ₀₀` equation replaced by `Tr ρ = 1`.
///
/// A singular bordered system means the null space is not one-dimensional.
/// When round-off leaves a residual above [`STEADY_RESIDUAL_TOL`] the
/// solution is refined iteratively, then by integrating towards long times.
pub fn steady_state_report(l: &Liouvillian) -> Result<SteadyState> {
    if l.is_time_dependent() {
        return Err(Error::param("liouvillian", "steady state needs a time-independent generator"));
    }
    let d = l.basis().len();
    let n = d * d;
    let gen = l.generator();
    let bordered = bordered_system(gen, d);
    let lu = SparseLu::new(&bordered).map_err(|_| Error::DegenerateSteadyState)?;
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    rhs[0] = C64::new(1.0, 0.0);
    let mut x = lu.solve(&rhs);
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DegenerateSteadyState);
    }
    let scale = gen.norm_inf().max(f64::MIN_POSITIVE);
    let mut res = residual(gen, &x, scale);
    let mut method = SteadyMethod::Direct;
    for _ in 0..3 {
        if res <= STEADY_RESIDUAL_TOL {
            break;
        }
        let bx = bordered.mul_vec(&x);
        let r: Vec<C64> = rhs.iter().zip(&bx).map(|(b, y)| b - y).collect();
        let dx = lu.solve(&r);
        let cand: Vec<C64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let cres = residual(gen, &cand, scale);
        if !(cres < res) {
            break;
        }
        x = cand;
        res = cres;
        method = SteadyMethod::Refined;
    }
    if res > STEADY_RESIDUAL_TOL {
        x = relax(l, x)?;
        res = residual(gen, &x, scale);
        method = SteadyMethod::TimeIntegration;
        if res > STEADY_RESIDUAL_TOL {
            return Err(Error::NonConvergence { residual: res });
        }
    }
    let rho = normalize(l, &x)?;
    Ok(SteadyState { rho, residual: res, method })
}

fn bordered_system(gen: &CsrMatrix, d: usize) -> CsrMatrix {
    let n = d * d;
    let mut entries: Vec<(usize, usize, C64)> = gen.triplets().filter(|&(r, _, _)| r != 0).collect();
    entries.extend((0..d).map(|i| (0, i * d + i, C64::new(1.0, 0.0))));
    CsrMatrix::from_triplets(n, n, entries)
}

fn residual(gen: &CsrMatrix, x: &[C64], scale: f64) -> f64 {
    let xmax = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if xmax == 0.0 {
        return f64::INFINITY;
    }
    let lx = gen.mul_vec(x);
    lx.iter().map(|z| z.norm()).fold(0.0, f64::max) / (scale * xmax)
}

/// Integrates to long times starting from `x`; returns the final state.
fn relax(l: &Liouvillian, x: Vec<C64>) -> Result<Vec<C64>> {
    let tol = Tolerances { rtol: 1e-12, atol: 1e-16, ..Tolerances::default() };
    let mut last = x.clone();
    let span = 200.0;
    ode::integrate_visit(
        |t, y, dy| l.apply(t, y, dy),
        &[0.0, span],
        x,
        tol,
        |_, _, y| last.copy_from_slice(y),
    )?;
    Ok(last)
}

fn normalize(l: &Liouvillian, x: &[C64]) -> Result<DensityMatrix> {
    let d = l.basis().len();
    let m = unvectorize(x, d);
    let herm = (&m + &m.t().mapv(|z| z.conj())) * C64::new(0.5, 0.0);
    let tr = herm.diag().sum();
    if tr.norm() == 0.0 || !tr.re.is_finite() {
        return Err(Error::DegenerateSteadyState);
    }
    let rho = DensityMatrix::from_matrix_unchecked(l.tag(), herm / tr);
    rho.validate_hermitian_trace()?;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::liouvillian::build_liouvillian;
    use crate::dynamics::params::{BathParams, SystemParams};
    use crate::fock::{expectation, FockBasis, Mode};
    use crate::linalg::SuperopBuilder;

    #[test]
    fn pure_decay_relaxes_to_vacuum() {
        let basis = FockBasis::new(3);
        let l = build_liouvillian(&SystemParams::default(), &BathParams::default(), &basis).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!((rho.matrix()[[0, 0]] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_generator_is_degenerate() {
        let basis = FockBasis::new(2);
        assert!(matches!(steady_state(&Liouvillian::zero(&basis)), Err(Error::DegenerateSteadyState)));
    }

    #[test]
    fn pure_dephasing_is_degenerate() {
        let basis = FockBasis::new(2);
        let mut sb = SuperopBuilder::new(basis.len());
        sb.lindblad(1.0, basis.number(Mode::One).matrix());
        let l = Liouvillian::from_generator(&basis, sb.build()).unwrap();
        assert!(matches!(steady_state(&l), Err(Error::DegenerateSteadyState)));
    }

    #[test]
    fn thermal_bath_gives_detailed_balance() {
        let basis = FockBasis::new(14);
        let bath = BathParams { n_th: 0.5, ..Default::default() };
        let l = build_liouvillian(&SystemParams::default(), &bath, &basis).unwrap();
        let rho = steady_state(&l).unwrap();
        let n = expectation(&rho, &basis.number(Mode::One)).unwrap().re;
        assert!((n - 0.5).abs() < 1e-3, "{n}");
        let p0 = rho.matrix()[[basis.index_of(0, 0).unwrap(), basis.index_of(0, 0).unwrap()]].re;
        let p1 = rho.matrix()[[basis.index_of(1, 0).unwrap(), basis.index_of(1, 0).unwrap()]].re;
        let p2 = rho.matrix()[[basis.index_of(2, 0).unwrap(), basis.index_of(2, 0).unwrap()]].re;
        let ratio = 0.5 / 1.5;
        assert!((p2 / p1 - ratio).abs() < 1e-6);
        assert!((p1 / p0 - ratio).abs() < 1e-6);
    }
}
