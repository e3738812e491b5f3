use ndarray::Array2;

use super::params::{BathParams, SystemParams};
use crate::fock::{FockBasis, Mode, Operator};
use crate::{Result, C64, I};

pub(crate) fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Mode operators, optionally displaced by `αⱼ·𝟙`.
pub(crate) struct ModeOps {
    pub a: [Array2<C64>; 2],
    pub ad: [Array2<C64>; 2],
}

impl ModeOps {
    pub fn new(basis: &FockBasis, alpha: [C64; 2]) -> Self {
        let eye: Array2<C64> = Array2::eye(basis.len());
        let a = [Mode::One, Mode::Two].map(|m| {
            let mut op = basis.annihilation(m).into_matrix();
            if alpha[m.index() - 1] != C64::new(0.0, 0.0) {
                op = op + &eye * alpha[m.index() - 1];
            }
            op
        });
        let ad = [dagger(&a[0]), dagger(&a[1])];
        ModeOps { a, ad }
    }

    pub fn number(&self, j: usize) -> Array2<C64> {
        self.ad[j].dot(&self.a[j])
    }
}

/// `Σⱼ[Δⱼ âⱼ†âⱼ + Uⱼ âⱼ†²âⱼ² + Fⱼ* âⱼ + Fⱼ âⱼ†] + J(â₁†â₂ + â₂†â₁)` with the
/// substitution `âⱼ → âⱼ + αⱼ` already applied to `ops`.
pub(crate) fn hamiltonian_matrix(params: &SystemParams, ops: &ModeOps) -> Array2<C64> {
    let d = ops.a[0].nrows();
    let mut h = Array2::<C64>::zeros((d, d));
    for (j, mode) in [Mode::One, Mode::Two].into_iter().enumerate() {
        let (a, ad) = (&ops.a[j], &ops.ad[j]);
        let delta = params.delta(mode);
        if delta != 0.0 {
            h = h + ad.dot(a) * C64::new(delta, 0.0);
        }
        let u = params.u(mode);
        if u != 0.0 {
            h = h + ad.dot(ad).dot(a).dot(a) * C64::new(u, 0.0);
        }
        let f = params.drive(mode);
        if f != C64::new(0.0, 0.0) {
            h = h + a * f.conj() + ad * f;
        }
    }
    if params.j_hop != 0.0 {
        let hop = ops.ad[0].dot(&ops.a[1]) + ops.ad[1].dot(&ops.a[0]);
        h = h + hop * C64::new(params.j_hop, 0.0);
    }
    h
}

/// Hermitian system Hamiltonian on `basis`.
pub fn build_hamiltonian(params: &SystemParams, basis: &FockBasis) -> Result<Operator> {
    params.validate()?;
    let ops = ModeOps::new(basis, [C64::new(0.0, 0.0); 2]);
    Operator::new(basis.tag(), hamiltonian_matrix(params, &ops))
}

/// `H − i Σⱼ (κⱼ/2) âⱼ†âⱼ − iχ â₂†â₁`, the cascade jump term present only
/// when `bath.cascade_efficiency > 0`.
///
/// The sign of the cascade term follows from the cascaded master equation:
/// its no-jump evolution feeds mode 2 with `−χ â₁`.
pub fn build_nonhermitian(params: &SystemParams, bath: &BathParams, basis: &FockBasis) -> Result<Operator> {
    bath.validate()?;
    let h = build_hamiltonian(params, basis)?;
    let mut m = h.into_matrix();
    for mode in [Mode::One, Mode::Two] {
        let n = basis.number(mode).into_matrix();
        m = m - n * (I * 0.5 * params.kappa(mode));
    }
    let chi = bath.chi(params);
    if chi > 0.0 {
        let jump = basis.creation(Mode::Two).matrix().dot(basis.annihilation(Mode::One).matrix());
        m = m - jump * (I * chi);
    }
    Operator::new(basis.tag(), m)
}
