//! Smoothing ratios of the heat semigroup on the base and refined grids.

use super::{grid_label, RunError};
use crate::config::{ScenarioConfig, Settings};
use crate::criteria::*;
use crate::summary::{Artifacts, Property, Summary};
use hypflow::kernels::{smoothing_diagnostics, standard_bump};
use hypflow::ChartPoint;

pub(super) fn kernel_check(cfg: &ScenarioConfig, art: &mut Artifacts, sum: &mut Summary) -> Result<(), RunError> {
    let Settings::KernelCheck(st) = &cfg.settings else { unreachable!() };
    let center = ChartPoint::new(st.bump_center[0], st.bump_center[1]);
    let (lo, hi) = RATIO_S_RANGE;
    let mut peaks = Vec::new();
    for (k, grid) in [cfg.grid, cfg.grid.refined()].into_iter().enumerate() {
        let label = grid_label(k);
        let f = standard_bump(grid, center, st.bump_radius);
        let rep = smoothing_diagnostics(&f, &st.samples)?;
        art.csv(&format!("ratios_{label}.csv"), &rep.rows)?;
        let peak = rep
            .rows
            .iter()
            .filter(|r| r.s >= lo && r.s <= hi)
            .map(|r| r.ratio)
            .fold(f64::NAN, f64::max);
        sum.metric(&format!("small_s_sup_ratio_{label}"), rep.small_s_sup_ratio);
        sum.metric(&format!("partial_integral_{label}"), rep.partial_integral);
        sum.metric(&format!("max_ratio_{label}"), peak);
        sum.check(Property::at_most(8, &format!("max smoothing ratio ({label})"), peak, RATIO_CAP));
        sum.check(Property::at_most(
            8,
            &format!("squared-sup integral tail share ({label})"),
            rep.tail_fraction,
            SMOOTHING_TAIL_MAX,
        ));
        sum.check(Property::at_most(8, &format!("L1 growth per step ({label})"), rep.max_l1_growth, 1.0 + SEMIGROUP_SLACK));
        sum.check(Property::at_least(8, &format!("smallest value ({label})"), rep.min_value, -SEMIGROUP_SLACK));
        peaks.push(peak);
    }
    sum.check(Property::at_most(
        8,
        "relative change of the max ratio under refinement",
        (peaks[1] / peaks[0] - 1.0).abs(),
        RATIO_CHANGE_MAX,
    ));
    Ok(())
}
