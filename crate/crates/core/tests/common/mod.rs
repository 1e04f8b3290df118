//! Condensed strain energies per unit reference volume, written out
//! independently of the stress code.

#![allow(dead_code)]

use klshell::material::{MaterialModel, MaterialSpec};
use klshell::tensor::Sym2;

/// `W̃(g_αβ)` on a layer with reference metric `G_αβ` and fiber structural
/// tensors `L̄^αβ`, after eliminating the thickness stretch through
/// incompressibility (`λ3² = 1/J²`).
pub fn layer_energy(m: &MaterialSpec, g: &Sym2, big_g: &Sym2, fibers: &[Sym2]) -> f64 {
    let j2 = g.det() / big_g.det();
    let i1 = big_g.inverse().dot(g);
    let i1t = i1 + 1.0 / j2;
    let i2t = j2 + i1 / j2;
    let i4: Vec<f64> = fibers.iter().map(|l| l.dot(g)).collect();
    match &m.model {
        MaterialModel::NeoHooke { c1 } => 0.5 * c1 * (i1t - 3.0),
        MaterialModel::MooneyRivlin { c1, c2 } => 0.5 * c1 * (i1t - 3.0) + 0.5 * c2 * (i2t - 3.0),
        MaterialModel::Fung { c1, c2 } => c1 / (2.0 * c2) * ((c2 * (i1t - 3.0)).exp() - 1.0),
        MaterialModel::AnisoMooneyRivlin { c1, c2, c3 } => {
            0.5 * c1 * (i1t - 3.0)
                + 0.5 * c2 * (i2t - 3.0)
                + i4.iter()
                    .zip(c3)
                    .map(|(i, c)| 0.5 * c * (i - 1.0).powi(2))
                    .sum::<f64>()
        }
        MaterialModel::Goh {
            mu,
            k1,
            k2,
            kappa,
            switch,
        } => {
            let mut w = 0.5 * mu * (i1t - 3.0);
            for (k, i) in i4.iter().enumerate() {
                if *switch && *i <= 1.0 {
                    continue;
                }
                let e = kappa[k] * i1t + (1.0 - 3.0 * kappa[k]) * i - 1.0;
                w += k1[k] / (2.0 * k2[k]) * ((k2[k] * e * e).exp() - 1.0);
            }
            w
        }
    }
}

/// Swap the two parametric directions of a symmetric tensor.
pub fn swap(x: &Sym2) -> Sym2 {
    Sym2::new(x.0[1], x.0[0], x.0[2])
}

pub fn rel_diff(a: &Sym2, b: &Sym2) -> f64 {
    (*a - *b).norm() / b.norm().max(1e-300)
}
