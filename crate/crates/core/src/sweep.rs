//! Parameter scans and rule verification: the Q-scan of the triplet
//! mixing, the hopping scan of the corrected spectrum, ground-state
//! crossing detection, the mixing rules and the Heisenberg-form oracle.

use thiserror::Error;

use crate::config::{validate, ModelParams, ParamError, ValidatedParams};
use crate::eigen::eigh;
use crate::hamiltonian::build_h0;
use crate::pt2::{pt2_correct, Pt2Error};
use crate::scalar::Real;
use crate::spin::{diagonalize_and_label, weight_table, SpinError, WeightRow, WeightTable};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("K₁ equals K_M; the mixing parameter Q is undefined")]
    DegenerateDenominator,
    #[error("parameters do not satisfy any rule family (need K₁=K₂ with K'₁=K'₂, or K₁=K₂=K'₁)")]
    WrongFamily,
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Pt2(#[from] Pt2Error),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// One evaluated sweep point: sector-sorted energies, the ground-state
/// spin and the weights of the point's target state.
#[derive(Clone, Debug)]
pub struct SweepPoint<T> {
    pub param: T,
    /// (e_s0_a, e_s0_b, e_s1_a, e_s1_b, e_s1_c, e_s2): the two singlets,
    /// three triplets and the quintet, each ascending.
    pub energies: [T; 6],
    pub gs_spin: u8,
    /// Per-label weights of the target state (LABELS order).
    pub weights: [T; 6],
    pub w_sm1: T,
    pub w_sm0: T,
}

fn sector_sorted<T: Real>(rows: &[WeightRow<T>]) -> [T; 6] {
    let mut by_sector: [Vec<T>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for row in rows {
        by_sector[row.s_total as usize].push(row.energy);
    }
    for v in by_sector.iter_mut() {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    assert_eq!(
        [by_sector[0].len(), by_sector[1].len(), by_sector[2].len()],
        [2, 3, 1],
        "the neutral space carries two singlets, three triplets and one quintet"
    );
    [
        by_sector[0][0],
        by_sector[0][1],
        by_sector[1][0],
        by_sector[1][1],
        by_sector[1][2],
        by_sector[2][0],
    ]
}

fn ground_spin<T: Real>(rows: &[WeightRow<T>]) -> u8 {
    rows.iter()
        .min_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap())
        .map(|r| r.s_total)
        .unwrap()
}

/// The second lowest lying triplet: energy-sorted middle state of the
/// S = 1 sector, ties broken by the larger |1,1,1⟩ weight.
pub fn second_lowest_triplet<T: Real>(table: &WeightTable<T>) -> &WeightRow<T> {
    let mut triplets: Vec<&WeightRow<T>> = table.rows.iter().filter(|r| r.s_total == 1).collect();
    assert_eq!(triplets.len(), 3);
    triplets.sort_by(|a, b| {
        a.energy
            .partial_cmp(&b.energy)
            .unwrap()
            .then(b.weights[4].partial_cmp(&a.weights[4]).unwrap())
    });
    triplets[1]
}

/// The lower eigenstate of the {|1,1,1⟩, |1,0,1⟩} mixing doublet in the
/// S = 1 sector (the |1,1,0⟩ state decouples whenever K₁=K₂ and K'₁=K'₂).
fn mixing_doublet_lower<T: Real>(table: &WeightTable<T>) -> &WeightRow<T> {
    let half = T::of(0.5);
    let mut doublet: Vec<&WeightRow<T>> = table
        .rows
        .iter()
        .filter(|r| r.s_total == 1 && r.weights[3] < half)
        .collect();
    assert_eq!(
        doublet.len(),
        2,
        "the doublet selector needs the decoupled family"
    );
    doublet.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    doublet[0]
}

fn h0_weight_table<T: Real>(params: ModelParams<T>) -> Result<WeightTable<T>, SweepError> {
    let p = validate(params)?;
    let h0 = build_h0(&p);
    let labeled = diagonalize_and_label(&h0.matrix, &h0.space).expect("H0 is symmetric");
    Ok(weight_table(&labeled)?)
}

/// Scan the dimensionless mixing parameter Q = (K'₁-K₁)/(2(K_M-K₁)) over
/// the K₁=K₂, K'₁=K'₂ family and report the mixing-doublet weights.
pub fn q_scan<T: Real>(k_m: T, k1: T, q_values: &[T]) -> Result<Vec<SweepPoint<T>>, SweepError> {
    if k_m == k1 {
        return Err(SweepError::DegenerateDenominator);
    }
    let two = T::of(2.0);
    let mut out = Vec::with_capacity(q_values.len());
    for &q in q_values {
        let kp = k1 + two * q * (k_m - k1);
        let params = ModelParams {
            k_m,
            k1,
            k2: k1,
            kp1: kp,
            kp2: kp,
            eps_mprime: T::zero(),
            eps_l1: T::zero(),
            eps_l2: T::zero(),
            u_m: T::zero(),
            u_l: T::zero(),
            t: T::zero(),
        };
        let table = h0_weight_table(params)?;
        let target = mixing_doublet_lower(&table);
        out.push(SweepPoint {
            param: q,
            energies: sector_sorted(&table.rows),
            gs_spin: ground_spin(&table.rows),
            weights: target.weights,
            w_sm1: target.w_sm1,
            w_sm0: target.w_sm0,
        });
    }
    Ok(out)
}

/// Scan the hopping amplitude: corrected energies of all six states
/// referenced to the ground state, with the ground state's weights.
pub fn t_scan<T: Real>(
    p: &ValidatedParams<T>,
    t_values: &[T],
) -> Result<Vec<SweepPoint<T>>, SweepError> {
    let mut out = Vec::with_capacity(t_values.len());
    for &t in t_values {
        out.push(t_scan_point(p, t)?);
    }
    Ok(out)
}

fn t_scan_point<T: Real>(p: &ValidatedParams<T>, t: T) -> Result<SweepPoint<T>, SweepError> {
    let params = ModelParams { t, ..*p.params() };
    let vp = validate(params)?;
    let report = pt2_correct(&vp)?;
    let cw = crate::pt2::contracted_weights(&report);
    let mut rows = cw.table.rows;
    for (row, state) in rows.iter_mut().zip(&report.states) {
        row.energy = state.e_pt2;
    }
    let gs = rows
        .iter()
        .min_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap())
        .unwrap()
        .clone();
    let mut energies = sector_sorted(&rows);
    for e in energies.iter_mut() {
        *e = *e - gs.energy;
    }
    Ok(SweepPoint {
        param: t,
        energies,
        gs_spin: gs.s_total,
        weights: gs.weights,
        w_sm1: gs.w_sm1,
        w_sm0: gs.w_sm0,
    })
}

/// Ground-state spin of the corrected spectrum at one hopping value.
pub fn ground_state_spin<T: Real>(p: &ValidatedParams<T>, t: T) -> Result<u8, SweepError> {
    Ok(t_scan_point(p, t)?.gs_spin)
}

/// A ground-state label change bracketed to |Δparam| < 1e-6.
#[derive(Clone, Copy, Debug)]
pub struct Crossing<T> {
    pub at: T,
    pub spin_before: u8,
    pub spin_after: u8,
}

/// Locate every ground-state-label change along sorted sweep points,
/// bisecting each bracket with `classify` down to 1e-6.
pub fn find_crossings<T, F>(
    points: &[SweepPoint<T>],
    mut classify: F,
) -> Result<Vec<Crossing<T>>, SweepError>
where
    T: Real,
    F: FnMut(T) -> Result<u8, SweepError>,
{
    let mut out = Vec::new();
    let tol = T::of(1e-6);
    let half = T::of(0.5);
    for w in points.windows(2) {
        if w[0].gs_spin == w[1].gs_spin {
            continue;
        }
        let (mut lo, mut hi) = (w[0].param, w[1].param);
        let spin_lo = w[0].gs_spin;
        while hi - lo > tol {
            let mid = half * (lo + hi);
            if classify(mid)? == spin_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(Crossing {
            at: half * (lo + hi),
            spin_before: w[0].gs_spin,
            spin_after: w[1].gs_spin,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleId {
    /// 2K_M = K₁ + K'₁ (K₁=K₂, K'₁=K'₂ family): λ₁₁² = λ₀₁².
    R1,
    /// 2K_M = 3K₂ + K'₂ (K₁=K₂=K'₁ family): μ₁₁² = μ₀₀².
    R2,
    /// 2K_M = 2K₂ + 2K'₂ (K₁=K₂=K'₁ family): 3μ₁₁² = μ₀₀².
    R3,
}

#[derive(Clone, Debug)]
pub struct RuleReport<T> {
    pub rule: RuleId,
    /// How far the parameters sit from the rule locus.
    pub param_residual: T,
    /// How far the target state's weights sit from the rule's relation.
    pub weight_residual: T,
    pub note: Option<String>,
}

const FAMILY_TOL: f64 = 1e-12;

/// Evaluate every mixing rule whose symmetry family the parameters
/// satisfy (within 1e-12). R1 reads the mixing-doublet triplet, R2/R3 the
/// lowest singlet.
pub fn rule_check<T: Real>(p: &ValidatedParams<T>) -> Result<Vec<RuleReport<T>>, SweepError> {
    let tol = T::of(FAMILY_TOL);
    let td_family = (p.k1 - p.k2).abs() <= tol && (p.kp1 - p.kp2).abs() <= tol;
    let k1_family = (p.k1 - p.k2).abs() <= tol && (p.k1 - p.kp1).abs() <= tol;
    if !td_family && !k1_family {
        return Err(SweepError::WrongFamily);
    }

    let h0 = build_h0(p);
    let labeled = diagonalize_and_label(&h0.matrix, &h0.space).expect("H0 is symmetric");
    let table = weight_table(&labeled)?;
    let two = T::of(2.0);
    let three = T::of(3.0);
    let note = (p.kp1 > p.k_m || p.kp2 > p.k_m).then(|| {
        "a ligand-metal exchange exceeds K_M; such couplings are hard to reach synthetically"
            .to_string()
    });

    let mut out = Vec::new();
    if td_family {
        let target = mixing_doublet_lower(&table);
        out.push(RuleReport {
            rule: RuleId::R1,
            param_residual: (two * p.k_m - (p.k1 + p.kp1)).abs(),
            weight_residual: (target.weights[4] - target.weights[2]).abs(),
            note: note.clone(),
        });
    }
    if k1_family {
        let mut singlets: Vec<&WeightRow<T>> =
            table.rows.iter().filter(|r| r.s_total == 0).collect();
        singlets.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
        let target = singlets[0];
        out.push(RuleReport {
            rule: RuleId::R2,
            param_residual: (two * p.k_m - (three * p.k2 + p.kp2)).abs(),
            weight_residual: (target.weights[1] - target.weights[0]).abs(),
            note: note.clone(),
        });
        out.push(RuleReport {
            rule: RuleId::R3,
            param_residual: (two * p.k_m - two * (p.k2 + p.kp2)).abs(),
            weight_residual: (three * target.weights[1] - target.weights[0]).abs(),
            note,
        });
    }
    Ok(out)
}

/// Spectrum of the spin-½ Heisenberg form and its elementwise deviation
/// from the determinant-built zeroth-order Hamiltonian.
#[derive(Clone, Debug)]
pub struct HeisenbergReport<T> {
    pub spectrum: Vec<T>,
    pub max_deviation: T,
}

/// Independent oracle: on the neutral space the zeroth-order Hamiltonian
/// equals E₀·I − Σ_{p<q} K(p,q)·(1/2 + 2 Ŝ_p·Ŝ_q) over four spin-½ sites.
/// Built directly from spin algebra on M_S = 0 spin configurations, with
/// no determinant or integral machinery involved.
pub fn heisenberg_oracle<T: Real>(p: &ValidatedParams<T>) -> HeisenbergReport<T> {
    // M_S = 0 configurations as up-spin masks, in the order matching the
    // lexicographic neutral determinants
    let configs: Vec<u8> = (0u8..16).filter(|m| m.count_ones() == 2).collect();
    let e0 = p.eps_mprime + p.eps_l1 + p.eps_l2;
    let mut k = [[T::zero(); 4]; 4];
    let mut set = |a: usize, b: usize, v| {
        k[a][b] = v;
        k[b][a] = v;
    };
    set(0, 1, p.k1);
    set(3, 1, p.k2);
    set(0, 2, p.kp1);
    set(3, 2, p.kp2);
    set(1, 2, p.k_m);

    let n = configs.len();
    let half = T::of(0.5);
    let quarter = T::of(0.25);
    let two = T::of(2.0);
    let mut h = ndarray::Array2::<T>::zeros((n, n));
    for (i, &a) in configs.iter().enumerate() {
        for (j, &b) in configs.iter().enumerate() {
            let mut v = T::zero();
            for pq in 0..4usize {
                for q in (pq + 1)..4 {
                    let kk = k[pq][q];
                    if kk == T::zero() {
                        continue;
                    }
                    if i == j {
                        // (S_p·S_q)_diag = ±1/4 for aligned/anti-aligned
                        let sp = if (a >> pq) & 1 == 1 {
                            T::one()
                        } else {
                            -T::one()
                        };
                        let sq = if (a >> q) & 1 == 1 {
                            T::one()
                        } else {
                            -T::one()
                        };
                        v -= kk * (half + two * quarter * sp * sq);
                    } else if a ^ b == (1 << pq) | (1 << q) {
                        // spin swap on an anti-aligned pair: (S_p·S_q) = 1/2
                        v -= kk * two * half;
                    }
                }
            }
            if i == j {
                v += e0;
            }
            h[(i, j)] = v;
        }
    }

    let h0 = build_h0(p);
    let mut max_deviation = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = (h[(i, j)] - h0.matrix[(i, j)]).abs();
            if d > max_deviation {
                max_deviation = d;
            }
        }
    }
    let spectrum = eigh(&h).expect("oracle matrix is symmetric").values;
    HeisenbergReport {
        spectrum,
        max_deviation,
    }
}
