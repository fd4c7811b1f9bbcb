//! Residuals of the gauged identities on one slice.

use super::bundle::{wedge, GaugeBundle};
use crate::fields::{Dir, Grid};
use crate::flows::FlowParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeResiduals {
    /// `|| D_1 phi_2 - D_2 phi_1 ||`.
    pub torsion: f64,
    /// `|| curl A - phi_1 wedge phi_2 ||` over cells.
    pub commutator: f64,
    /// `|| phi_t - z (h^{ij} D_i phi_j - h^{ij} Gamma^k_ij phi_k) ||`.
    pub w_norm: f64,
    /// `|| phi_s - (h^{ij} D_i phi_j - h^{ij} Gamma^k_ij phi_k) ||`.
    pub heat_tension: f64,
    /// `max |A_t|` on the slice.
    #[serde(rename = "At_limit")]
    pub at_limit: f64,
}

/// `z = alpha - i beta`.
pub fn z_of(params: &FlowParams) -> Complex64 {
    Complex64::new(params.alpha, -params.beta)
}

fn node_weight(g: &Grid, k: usize) -> f64 {
    g.h1() * g.h2() * (-g.x2(g.coords(k).1)).exp()
}

/// Weighted L2 norm of `f` over the interior nodes.
pub fn interior_l2(bundle: &GaugeBundle, f: impl Fn(usize) -> Complex64) -> f64 {
    let g = bundle.grid;
    bundle
        .interior()
        .map(|k| node_weight(&g, k) * f(k).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn gauge_residuals(bundle: &GaugeBundle, params: &FlowParams) -> GaugeResiduals {
    let g = bundle.grid;
    let l = &bundle.links;
    let torsion = interior_l2(bundle, |k| {
        l.covariant_diff(&bundle.phi2, Dir::X1, k) - l.covariant_diff(&bundle.phi1, Dir::X2, k)
    });
    let mut comm = 0.0;
    for j in 0..g.n2 - 1 {
        for i in 0..g.n1 - 1 {
            let k = g.idx(i, j);
            let corners = [k, k + 1, k + g.n1, k + g.n1 + 1];
            let w = corners
                .iter()
                .map(|&c| wedge(bundle.phi1[c], bundle.phi2[c]))
                .sum::<f64>()
                / 4.0;
            let xm = 0.5 * (g.x2(j) + g.x2(j + 1));
            let r = l.plaquette(k) - w;
            comm += g.h1() * g.h2() * (-xm).exp() * r * r;
        }
    }
    let z = z_of(params);
    let w_norm = interior_l2(bundle, |k| bundle.phit[k] - z * bundle.divergence(k));
    let heat_tension = interior_l2(bundle, |k| bundle.phis[k] - bundle.divergence(k));
    let at_limit = bundle.at.iter().fold(0.0, |m: f64, a| m.max(a.abs()));
    GaugeResiduals {
        torsion,
        commutator: comm.sqrt(),
        w_norm,
        heat_tension,
        at_limit,
    }
}
