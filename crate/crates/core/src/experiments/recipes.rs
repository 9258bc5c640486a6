//! Preset scenarios reproducing the figures of the evaluation.

use super::scenario::{ExperimentKind, Pathloss, PowerSweep, QChoice, Scenario, Schemes};
use crate::channel::CellGeometry;
use crate::error::{Error, Result};

/// A named preset and the parameters it fixes.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub name: &'static str,
    pub summary: &'static str,
    pub scenario: Scenario,
}

fn dbm(from: i32, to: i32, step: i32) -> Vec<f64> {
    (from..=to).step_by(step as usize).map(f64::from).collect()
}

const BD: Schemes = Schemes {
    bd_mrc: true,
    zf: false,
};
const BOTH: Schemes = Schemes {
    bd_mrc: true,
    zf: true,
};

pub fn recipes() -> Vec<Recipe> {
    let rates = Scenario::default();
    let symmetric = Scenario {
        pathloss: Pathloss::Unit,
        antennas: vec![1],
        schemes: BOTH,
        ..Scenario::default()
    };
    let fig3_sweep = vec![20.0, 25.0, 30.0, 35.0, 40.0, 41.0, 42.0, 43.0, 45.0, 50.0];
    vec![
        Recipe {
            name: "fig2",
            summary: "effective sum-rate vs P_tot, Macro, L=64, G=5, Q=4, M in {2,4,12}, BD-MRC and ZF with bounds",
            scenario: Scenario {
                l: 64,
                groups: 5,
                antennas: vec![2, 4, 12],
                q: QChoice::Fixed(4),
                q_base: QChoice::Fixed(4),
                power: PowerSweep::PtotDbm(dbm(10, 50, 5)),
                schemes: BOTH,
                ..rates.clone()
            },
        },
        Recipe {
            name: "fig3",
            summary: "effective sum-rate and gain vs P_tot, Macro, M=4, L=24, G=6, Q=Q'=4, BD-MRC with large-array curve",
            scenario: Scenario {
                l: 24,
                groups: 6,
                antennas: vec![4],
                q: QChoice::Fixed(4),
                q_base: QChoice::Fixed(4),
                power: PowerSweep::PtotDbm(fig3_sweep.clone()),
                schemes: BD,
                ..rates.clone()
            },
        },
        Recipe {
            name: "fig4",
            summary: "effective sum-rate and gain vs P_tot, Macro, L=32, M=4, Q=2, Q'=8, G=4, BD-MRC",
            scenario: Scenario {
                l: 32,
                groups: 4,
                antennas: vec![4],
                q: QChoice::Fixed(2),
                q_base: QChoice::Fixed(8),
                power: PowerSweep::PtotDbm(fig3_sweep),
                schemes: BD,
                ..rates.clone()
            },
        },
        Recipe {
            name: "fig5",
            summary: "optimized effective sum-rate and gain vs P_tot, Macro, L=32, G=6, M=4, Q and Q' optimized, BD-MRC and ZF",
            scenario: Scenario {
                l: 32,
                groups: 6,
                antennas: vec![4],
                power: PowerSweep::PtotDbm(dbm(20, 50, 5)),
                schemes: BOTH,
                ..rates.clone()
            },
        },
        Recipe {
            name: "fig6",
            summary: "ZF effective sum-rate and gain vs SNR, symmetric Rayleigh, L=16, M=1, G=6, perfect CSIT and CSIT error variance 0.01",
            scenario: Scenario {
                kind: ExperimentKind::ImperfectCsi,
                l: 16,
                groups: 6,
                power: PowerSweep::SnrDb(dbm(-10, 40, 5)),
                csit_variance: 0.01,
                ..symmetric.clone()
            },
        },
        Recipe {
            name: "fig7",
            summary: "optimized effective sum-rate and gain vs P_tot, Micro, L=32, M=2, G=6, Q and Q' optimized, BD-MRC and ZF",
            scenario: Scenario {
                pathloss: Pathloss::Cell(CellGeometry::micro_cell()),
                l: 32,
                groups: 6,
                antennas: vec![2],
                power: PowerSweep::PtotDbm(vec![10.0, 15.0, 20.0, 25.0, 30.0, 33.0, 35.0, 40.0]),
                schemes: BOTH,
                ..rates
            },
        },
        Recipe {
            name: "fig8",
            summary: "effective gain vs SNR of VCC, multi-server and modified multi-server schemes, symmetric Rayleigh, L=32, G=6",
            scenario: Scenario {
                kind: ExperimentKind::Msv,
                l: 32,
                groups: 6,
                power: PowerSweep::SnrDb(dbm(0, 40, 5)),
                schemes: BD,
                ..symmetric.clone()
            },
        },
        Recipe {
            name: "fig9",
            summary: "ZF effective gain vs SNR, L=16, M=1, G=6, CSIT error variance 0.01, CSIR error variance in {0.0001, 0.001, 0.01}",
            scenario: Scenario {
                kind: ExperimentKind::ImperfectCsi,
                l: 16,
                groups: 6,
                power: PowerSweep::SnrDb(dbm(-10, 40, 5)),
                csit_variance: 0.01,
                csir_variances: vec![0.0001, 0.001, 0.01],
                ..symmetric
            },
        },
    ]
}

/// Scenario of the recipe called `name`.
pub fn recipe(name: &str) -> Result<Scenario> {
    recipes()
        .into_iter()
        .find(|r| r.name == name)
        .map(|r| r.scenario)
        .ok_or_else(|| {
            let names: Vec<_> = recipes().iter().map(|r| r.name).collect();
            Error::InvalidConfiguration(format!(
                "unknown recipe `{name}` (known: {})",
                names.join(", ")
            ))
        })
}

/// One line per recipe: name and the parameters it fixes.
pub fn list_recipes() -> String {
    recipes()
        .iter()
        .map(|r| format!("{:<6}{}\n", r.name, r.summary))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_recipe_validates() {
        for r in recipes() {
            r.scenario
                .validate()
                .unwrap_or_else(|e| panic!("{}: {e}", r.name));
        }
    }

    #[test]
    fn listing() {
        let text = list_recipes();
        assert!(text.contains("fig4") && text.contains("L=32, M=4, Q=2, Q'=8, G=4"));
        assert_eq!(text.lines().count(), 8);
        assert_eq!(text, list_recipes());
        assert!(recipe("fig10").is_err());
    }
}
