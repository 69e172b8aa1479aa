//! CSV rendering of the model's outputs.
//!
//! Floats are written in Rust's shortest round-trip representation (at
//! most 17 significant digits, '.' decimal separator), so identical runs
//! emit byte-identical documents. Every document begins with a
//! '#'-prefixed provenance line recording the full parameter set.

use ndarray::Array2;

use crate::config::ModelParams;
use crate::pt2::{ContractedWeights, Pt2Report};
use crate::scalar::Real;
use crate::spin::{LabeledStates, WeightTable};
use crate::sweep::{RuleId, RuleReport, SweepPoint};

/// Shortest representation that parses back to the same value.
pub fn fmt_float<T: Real>(x: T) -> String {
    format!("{}", x)
}

/// The '#'-prefixed provenance line naming all eleven parameters.
pub fn provenance_line<T: Real>(p: &ModelParams<T>) -> String {
    format!(
        "# params: k_m={} k1={} k2={} kp1={} kp2={} eps_mprime={} eps_l1={} eps_l2={} u_m={} u_l={} t={}",
        p.k_m, p.k1, p.k2, p.kp1, p.kp2, p.eps_mprime, p.eps_l1, p.eps_l2, p.u_m, p.u_l, p.t
    )
}

/// Energies and spin labels of a diagonalized block.
pub fn spectrum_csv<T: Real>(labeled: &LabeledStates<T>, p: &ModelParams<T>) -> String {
    let mut out = provenance_line(p);
    out.push_str("\nstate_index,s_total,energy\n");
    for (k, &e) in labeled.energies.iter().enumerate() {
        out.push_str(&format!("{k},{},{}\n", labeled.s_total[k], fmt_float(e)));
    }
    out
}

/// Per-eigenstate local-spin weights.
pub fn weight_csv<T: Real>(table: &WeightTable<T>, p: &ModelParams<T>) -> String {
    let mut out = provenance_line(p);
    out.push_str("\nenergy,s_total,w_000,w_011,w_101,w_110,w_111,w_211,w_sm1,w_sm0\n");
    for row in &table.rows {
        out.push_str(&fmt_float(row.energy));
        out.push_str(&format!(",{}", row.s_total));
        for w in row.weights {
            out.push_str(&format!(",{}", fmt_float(w)));
        }
        out.push_str(&format!(
            ",{},{}\n",
            fmt_float(row.w_sm1),
            fmt_float(row.w_sm0)
        ));
    }
    out
}

/// Second-order corrections with tails and model-space weights.
pub fn pt2_csv<T: Real>(
    report: &Pt2Report<T>,
    contracted: &ContractedWeights<T>,
    p: &ModelParams<T>,
) -> String {
    let mut out = provenance_line(p);
    out.push_str("\nstate_index,s_total,e0,e_pt2,tail_norm2,w_sm1,w_sm0\n");
    for (state, row) in report.states.iter().zip(&contracted.table.rows) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            state.index,
            state.s_total,
            fmt_float(state.e0),
            fmt_float(state.e_pt2),
            fmt_float(state.tail_norm_sq()),
            fmt_float(row.w_sm1),
            fmt_float(row.w_sm0),
        ));
    }
    out
}

/// Sweep output: sector-sorted energies plus the target-state weights.
pub fn sweep_csv<T: Real>(points: &[SweepPoint<T>], p: &ModelParams<T>) -> String {
    let mut out = provenance_line(p);
    out.push_str("\nparam,e_s0_a,e_s0_b,e_s1_a,e_s1_b,e_s1_c,e_s2,gs_spin,w_sm0,w_sm1\n");
    for point in points {
        out.push_str(&fmt_float(point.param));
        for e in point.energies {
            out.push_str(&format!(",{}", fmt_float(e)));
        }
        out.push_str(&format!(
            ",{},{},{}\n",
            point.gs_spin,
            fmt_float(point.w_sm0),
            fmt_float(point.w_sm1)
        ));
    }
    out
}

/// Rule residual report.
pub fn rules_csv<T: Real>(reports: &[RuleReport<T>], p: &ModelParams<T>) -> String {
    let mut out = provenance_line(p);
    out.push_str("\nrule,param_residual,weight_residual,note\n");
    for r in reports {
        let name = match r.rule {
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
        };
        out.push_str(&format!(
            "{name},{},{},{}\n",
            fmt_float(r.param_residual),
            fmt_float(r.weight_residual),
            r.note.as_deref().unwrap_or("")
        ));
    }
    out
}

/// Dense matrix dump, one row per line.
pub fn matrix_csv<T: Real>(matrix: &Array2<T>, p: &ModelParams<T>) -> String {
    let mut out = provenance_line(p);
    out.push('\n');
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols())
            .map(|j| fmt_float(matrix[(i, j)]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
