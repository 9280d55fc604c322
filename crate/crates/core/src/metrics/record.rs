//! One row of functionals per shared snapshot time.
//!
//! Columns, in order (see [`COLUMNS`]): time; free energy and its parts;
//! the `D1` diagnostic, `D2`, `D3`; running integrals of the kinetic
//! dissipation rates; the fluid-gap functionals; transport distances;
//! Maxwellian and density `L1` gaps; the fluid energy ledger; left and right
//! sides of the five moment bounds; the number of violated bounds; and an
//! error column. Values are written in shortest round-trip exponent form.
//! An estimate that could not be computed is left empty and its reason is
//! appended to the error column; `NaN` is never written.

use std::fmt::Write as _;

use crate::config::ValidatedConfig;
use crate::error::Result;
use crate::fluid::FluidSnapshot;
use crate::kinetic::KineticSnapshot;
use crate::metrics::entropy::{coulomb_gap, fluid_relative_entropy, gap_dissipation_rates};
use crate::metrics::moments::{moment_gap_checks, ROW_NAMES};
use crate::metrics::phase::{free_energy_and_dissipations, l1_maxwellian_gap};
use crate::metrics::transport::{dbl_distance, w1_distance};
use crate::model::Regime;

pub const COLUMNS: [&str; 44] = [
    "time",
    "free_energy",
    "entropy",
    "kinetic_energy",
    "potential_energy",
    "interaction_energy",
    "d1_diag",
    "d2",
    "d3",
    "int_local",
    "int_d2",
    "int_d3",
    "int_weight_mass",
    "rel_entropy_e",
    "mod_kinetic_e_hat",
    "h_forward",
    "h_reverse",
    "coulomb_gap",
    "gamma_gap_rate",
    "dbl_phi_dissip",
    "gamma_gap_integral",
    "phi_gap_integral",
    "d_bl",
    "w1",
    "l1_maxwellian",
    "l1_density_gap",
    "est_l1_lhs",
    "est_l1_rhs",
    "fluid_energy",
    "fluid_residual",
    "fluid_mass",
    "i_l1_lhs",
    "i_l1_rhs",
    "i_bl_lhs",
    "i_bl_rhs",
    "ii_l1_lhs",
    "ii_l1_rhs",
    "ii_bl_lhs",
    "ii_bl_rhs",
    "iii_bl_lhs",
    "iii_bl_rhs",
    "moment_violations",
    "kinetic_step",
    "error",
];

/// Every tracked functional at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub time: f64,
    pub kinetic_step: usize,
    pub free_energy: Option<f64>,
    pub entropy: Option<f64>,
    pub kinetic_energy: f64,
    pub potential_energy: f64,
    pub interaction_energy: f64,
    pub d1_diag: Option<f64>,
    pub d2: f64,
    pub d3: f64,
    pub int_local: f64,
    pub int_d2: f64,
    pub int_d3: f64,
    pub int_weight_mass: f64,
    pub rel_entropy_e: f64,
    pub mod_kinetic_e_hat: f64,
    pub h_forward: f64,
    pub h_reverse: Option<f64>,
    pub coulomb_gap: f64,
    pub gamma_gap_rate: f64,
    pub dbl_phi_dissip: f64,
    /// Trapezoid integrals over snapshots of the two rates above; filled
    /// in by the paired run, zero for a lone record.
    pub gamma_gap_integral: f64,
    pub phi_gap_integral: f64,
    pub d_bl: f64,
    pub w1: f64,
    pub l1_maxwellian: Option<f64>,
    pub l1_density_gap: f64,
    pub est_l1_lhs: f64,
    pub est_l1_rhs: f64,
    pub fluid_energy: f64,
    pub fluid_residual: f64,
    pub fluid_mass: f64,
    /// `(lhs, rhs)` per moment bound, in [`ROW_NAMES`] order.
    pub moment_rows: Vec<(f64, f64)>,
    pub moment_violations: usize,
    pub error: String,
}

fn note(error: &mut String, what: &str, e: impl std::fmt::Display) {
    if !error.is_empty() {
        error.push_str("; ");
    }
    let _ = write!(error, "{what}: {e}");
}

impl MetricRecord {
    /// Evaluates every functional for a kinetic snapshot against the fluid
    /// snapshot at the same time.
    pub fn compute(cfg: &ValidatedConfig, kin: &KineticSnapshot, flu: &FluidSnapshot) -> Result<Self> {
        let grid = &cfg.grid;
        let c = &cfg.config;
        let p = &cfg.params;
        let rho = flu.state.density();
        let u = flu.state.velocity();
        let m = &kin.moments;
        let mut error = String::new();

        let fe = match free_energy_and_dissipations(&kin.ensemble, m, &kin.fields, &cfg.fields, p, cfg.vgrid, c.n_x_bins) {
            Ok(fe) => Some(fe),
            Err(e) => {
                note(&mut error, "free_energy", e);
                None
            }
        };
        let rates = crate::kinetic::dissipation_rates(&kin.ensemble, m, &kin.fields, grid);
        let gap = fluid_relative_entropy(grid, &m.rho, &m.u, &rho, u)?;
        let (gamma_rate, phi_rate) =
            gap_dissipation_rates(grid, |f| cfg.fields.phi_conv(f), &m.rho, &m.u, u, p.gamma, p.alpha);
        let l1_maxwellian = match cfg.regime() {
            Regime::Diffusive => match l1_maxwellian_gap(&kin.ensemble, grid, &rho, u, cfg.vgrid, c.n_x_bins) {
                Ok(v) => Some(v),
                Err(e) => {
                    note(&mut error, "l1_maxwellian", e);
                    None
                }
            },
            Regime::Diffusionless => None,
        };
        let ledger = moment_gap_checks(grid, m, &kin.ensemble, &rho, u)?;
        let interaction_energy = p.lambda * cfg.fields.interaction_energy(&m.rho);
        let potential_energy = p.lambda * cfg.fields.potential_energy(&m.rho);
        Ok(Self {
            time: kin.time,
            kinetic_step: kin.step,
            free_energy: fe.map(|f| f.free_energy),
            entropy: fe.map(|f| f.entropy),
            kinetic_energy: 0.5 * rates.d3,
            potential_energy,
            interaction_energy,
            d1_diag: fe.map(|f| f.d1_diag),
            d2: rates.d2,
            d3: rates.d3,
            int_local: kin.integrals.local,
            int_d2: kin.integrals.d2,
            int_d3: kin.integrals.d3,
            int_weight_mass: kin.integrals.weight_mass,
            rel_entropy_e: gap.e,
            mod_kinetic_e_hat: gap.e_hat,
            h_forward: gap.h_forward,
            h_reverse: gap.h_reverse,
            coulomb_gap: coulomb_gap(cfg.fields.spectral(), &m.rho, &rho, p.lambda)?,
            gamma_gap_rate: gamma_rate,
            dbl_phi_dissip: phi_rate,
            gamma_gap_integral: 0.0,
            phi_gap_integral: 0.0,
            d_bl: dbl_distance(grid, &m.rho, &rho)?,
            w1: w1_distance(grid, &m.rho, &rho)?,
            l1_maxwellian,
            l1_density_gap: gap.l1_density,
            est_l1_lhs: gap.est_l1_lhs,
            est_l1_rhs: gap.est_l1_rhs,
            fluid_energy: flu.ledger.terms.total(),
            fluid_residual: flu.ledger.residual,
            fluid_mass: flu.ledger.mass,
            moment_rows: ledger.rows.iter().map(|r| (r.lhs, r.rhs)).collect(),
            moment_violations: ledger.violations(),
            error,
        })
    }

    /// Mechanical energy `(1/2) int v^2 f + lambda (interaction + potential)`.
    pub fn mechanical_energy(&self) -> f64 {
        self.kinetic_energy + self.interaction_energy + self.potential_energy
    }

    pub fn csv_header() -> String {
        COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cells: Vec<String> = Vec::with_capacity(COLUMNS.len());
        let num = |x: f64| if x.is_finite() { format!("{x:e}") } else { String::new() };
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        cells.push(num(self.time));
        cells.push(opt(self.free_energy));
        cells.push(opt(self.entropy));
        for x in [
            self.kinetic_energy,
            self.potential_energy,
            self.interaction_energy,
        ] {
            cells.push(num(x));
        }
        cells.push(opt(self.d1_diag));
        for x in [
            self.d2,
            self.d3,
            self.int_local,
            self.int_d2,
            self.int_d3,
            self.int_weight_mass,
            self.rel_entropy_e,
            self.mod_kinetic_e_hat,
            self.h_forward,
        ] {
            cells.push(num(x));
        }
        cells.push(opt(self.h_reverse));
        for x in [
            self.coulomb_gap,
            self.gamma_gap_rate,
            self.dbl_phi_dissip,
            self.gamma_gap_integral,
            self.phi_gap_integral,
            self.d_bl,
            self.w1,
        ] {
            cells.push(num(x));
        }
        cells.push(opt(self.l1_maxwellian));
        for x in [
            self.l1_density_gap,
            self.est_l1_lhs,
            self.est_l1_rhs,
            self.fluid_energy,
            self.fluid_residual,
            self.fluid_mass,
        ] {
            cells.push(num(x));
        }
        for i in 0..ROW_NAMES.len() {
            let (l, r) = self.moment_rows.get(i).copied().unwrap_or((f64::NAN, f64::NAN));
            cells.push(num(l));
            cells.push(num(r));
        }
        cells.push(self.moment_violations.to_string());
        cells.push(self.kinetic_step.to_string());
        // the error column is free text; keep it CSV-safe
        cells.push(self.error.replace([',', '\n'], " "));
        debug_assert_eq!(cells.len(), COLUMNS.len());
        cells.join(",")
    }
}
