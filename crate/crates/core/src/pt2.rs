//! Second-order energy corrections from the charge-transfer outer space
//! and first-order wavefunction tails.

use ndarray::Array2;
use thiserror::Error;

use crate::config::ValidatedParams;
use crate::hamiltonian::{build_h0, build_v_and_perturbers};
use crate::scalar::Real;
use crate::spin::{coupled_basis, decompose, diagonalize_and_label, WeightRow, WeightTable};

#[derive(Debug, Error)]
pub enum Pt2Error {
    #[error(
        "state {state} and perturber {perturber} are separated by only {gap:e}; \
         the model leaves the perturbative regime"
    )]
    SmallDenominator {
        state: usize,
        perturber: usize,
        gap: f64,
    },
}

/// Contribution of one perturber to one state's correction.
#[derive(Clone, Debug)]
pub struct PerturberTerm<T> {
    pub perturber: usize,
    pub coupling_sq: T,
    pub denominator: T,
}

/// Zeroth- and second-order energies of one eigenstate with its
/// first-order tail over the 16 perturbers.
#[derive(Clone, Debug)]
pub struct Pt2State<T> {
    pub index: usize,
    pub s_total: u8,
    pub e0: T,
    pub e_pt2: T,
    pub terms: Vec<PerturberTerm<T>>,
    /// First-order amplitudes ⟨Φ_β|V|Ψ⟩ / (E_Ψ - E_β).
    pub tail: Vec<T>,
    /// The zeroth-order eigenvector over the neutral space.
    pub model_vector: Vec<T>,
}

impl<T: Real> Pt2State<T> {
    pub fn tail_norm_sq(&self) -> T {
        self.tail.iter().map(|&a| a * a).sum()
    }
}

#[derive(Clone, Debug)]
pub struct Pt2Report<T> {
    pub states: Vec<Pt2State<T>>,
    /// E_β of each perturber, aligned with the tail entries.
    pub perturber_energies: Vec<T>,
}

/// Smallest |E_Ψ - E_β| over all zeroth-order eigenstates and perturbers.
/// The PT2-regime warning in `config::validate` compares t against this.
pub fn model_perturber_min_gap<T: Real>(p: &ValidatedParams<T>) -> T {
    let h0 = build_h0(p);
    let labeled = diagonalize_and_label(&h0.matrix, &h0.space).expect("H0 is symmetric");
    let pert = build_v_and_perturbers(p);
    let mut min = T::infinity();
    for &e in &labeled.energies {
        for &eb in &pert.energies {
            let gap = (e - eb).abs();
            if gap < min {
                min = gap;
            }
        }
    }
    min
}

/// Correct all six zeroth-order eigenstates to second order over the
/// LMCT/MLCT perturbers.
///
/// A denominator smaller than 1e-9 on a coupled perturber is an error;
/// uncoupled perturbers (zero hopping matrix element) contribute nothing
/// and are exempt.
pub fn pt2_correct<T: Real>(p: &ValidatedParams<T>) -> Result<Pt2Report<T>, Pt2Error> {
    let h0 = build_h0(p);
    let labeled = diagonalize_and_label(&h0.matrix, &h0.space).expect("H0 is symmetric");
    let pert = build_v_and_perturbers(p);
    let n_pert = pert.len();
    let gap_floor = T::of(1e-9);

    let mut states = Vec::with_capacity(6);
    for i in 0..6 {
        let e0 = labeled.energies[i];
        let model_vector: Vec<T> = labeled.vectors.column(i).to_vec();
        let mut e2 = T::zero();
        let mut terms = Vec::with_capacity(n_pert);
        let mut tail = vec![T::zero(); n_pert];
        for b in 0..n_pert {
            let mut coupling = T::zero();
            for a in 0..6 {
                coupling += pert.couplings[(b, a)] * model_vector[a];
            }
            let denominator = e0 - pert.energies[b];
            if coupling != T::zero() {
                if denominator.abs() <= gap_floor {
                    return Err(Pt2Error::SmallDenominator {
                        state: i,
                        perturber: b,
                        gap: denominator.abs().to_f64().unwrap_or(0.0),
                    });
                }
                e2 += coupling * coupling / denominator;
                tail[b] = coupling / denominator;
            }
            terms.push(PerturberTerm {
                perturber: b,
                coupling_sq: coupling * coupling,
                denominator,
            });
        }
        states.push(Pt2State {
            index: i,
            s_total: labeled.s_total[i],
            e0,
            e_pt2: e0 + e2,
            terms,
            tail,
            model_vector,
        });
    }
    Ok(Pt2Report {
        states,
        perturber_energies: pert.energies,
    })
}

/// Spin-label weights carried through the first-order contraction.
///
/// The table rows hold the weights renormalized within the model space
/// (the ratios the contraction provably leaves unchanged); `model_weight`
/// holds the per-state total model-space weight 1/(1 + ‖tail‖²) of the
/// normalized first-order vector.
#[derive(Clone, Debug)]
pub struct ContractedWeights<T> {
    pub table: WeightTable<T>,
    pub model_weight: Vec<T>,
}

pub fn contracted_weights<T: Real>(report: &Pt2Report<T>) -> ContractedWeights<T> {
    let basis = coupled_basis::<T>();
    let mut rows = Vec::with_capacity(report.states.len());
    let mut model_weight = Vec::with_capacity(report.states.len());
    for state in &report.states {
        let tail_sq = state.tail_norm_sq();
        let total_norm = (T::one() + tail_sq).sqrt();
        // model block of the normalized first-order vector, renormalized
        // back to unit length: the contraction leaves these relative
        // weights untouched
        let contracted: Vec<T> = state.model_vector.iter().map(|&c| c / total_norm).collect();
        let block_norm = contracted.iter().map(|&c| c * c).sum::<T>().sqrt();
        let renormalized: Vec<T> = contracted.iter().map(|&c| c / block_norm).collect();
        let d = decompose(&renormalized, &basis).expect("renormalized block has unit norm");
        rows.push(WeightRow {
            energy: state.e_pt2,
            s_total: state.s_total,
            weights: d.weights,
            w_sm1: d.w_sm1,
            w_sm0: d.w_sm0,
        });
        model_weight.push(T::one() / (T::one() + tail_sq));
    }
    ContractedWeights {
        table: WeightTable { rows },
        model_weight,
    }
}

/// The 22x22 Hamiltonian whose exact spectrum second-order theory
/// approximates: the neutral block, the perturber diagonal energies and
/// the one-hop couplings between them (perturber-perturber hopping
/// elements vanish identically in this space).
pub fn reference_hamiltonian<T: Real>(p: &ValidatedParams<T>) -> Array2<T> {
    let h0 = build_h0(p);
    let pert = build_v_and_perturbers(p);
    let n = 6 + pert.len();
    let mut h = Array2::<T>::zeros((n, n));
    for i in 0..6 {
        for j in 0..6 {
            h[(i, j)] = h0.matrix[(i, j)];
        }
    }
    for b in 0..pert.len() {
        h[(6 + b, 6 + b)] = pert.energies[b];
        for a in 0..6 {
            h[(6 + b, a)] = pert.couplings[(b, a)];
            h[(a, 6 + b)] = pert.couplings[(b, a)];
        }
    }
    h
}

/// How the corrected energies converge on an exact CI spectrum as the
/// hopping shrinks.
#[derive(Clone, Debug)]
pub struct StateScaling<T> {
    pub index: usize,
    pub s_total: u8,
    /// Smallest |E_Ψ - E_β| of this state (hopping-independent).
    pub min_gap: T,
    /// Largest |E_pt2 - E_ci| over the probed hoppings.
    pub max_residual: T,
    /// residual / tᵖ per probed hopping (p = 4 for the reference CI,
    /// p = 2 for the full matrix).
    pub q: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct ScalingProbe<T> {
    pub hoppings: Vec<T>,
    pub states: Vec<StateScaling<T>>,
}

/// Probe the fourth-order convergence of the corrected energies against
/// the exact spectrum of [`reference_hamiltonian`], matching eigenstates
/// by model-space overlap. `base.t` is ignored; the probe runs at each
/// given hopping.
pub fn reference_scaling<T: Real>(
    base: &ValidatedParams<T>,
    hoppings: &[T],
) -> Result<ScalingProbe<T>, Pt2Error> {
    scaling_against(base, hoppings, 4, |vp| {
        (reference_hamiltonian(vp), (0..6).collect())
    })
}

/// Residuals against the full 36-determinant matrix, with residual/t²
/// recorded in `q`. That comparison is second order in the hopping: the
/// configuration-diagonal denominators of the perturbative sum miss the
/// in-class exchange splitting of the perturbers, so only the t² law is
/// a meaningful convergence check against this matrix.
pub fn full_ci_scaling<T: Real>(
    base: &ValidatedParams<T>,
    hoppings: &[T],
) -> Result<ScalingProbe<T>, Pt2Error> {
    use crate::determinant::{enumerate_space, SpaceKind};
    scaling_against(base, hoppings, 2, |vp| {
        let full = crate::hamiltonian::build_full_h(vp);
        let embed = enumerate_space(SpaceKind::Neutral)
            .dets
            .iter()
            .map(|&det| full.space.position(det).expect("neutral ⊂ full"))
            .collect();
        (full.matrix, embed)
    })
}

fn scaling_against<T, F>(
    base: &ValidatedParams<T>,
    hoppings: &[T],
    power: i32,
    build: F,
) -> Result<ScalingProbe<T>, Pt2Error>
where
    T: Real,
    F: Fn(&ValidatedParams<T>) -> (Array2<T>, Vec<usize>),
{
    use crate::config::{validate, ModelParams};
    use crate::eigen::eigh;

    let mut states: Vec<StateScaling<T>> = Vec::new();
    for (step, &t) in hoppings.iter().enumerate() {
        let params = ModelParams {
            t,
            ..*base.params()
        };
        let vp = validate(params).expect("sign invariants are hopping-independent");
        let report = pt2_correct(&vp)?;
        let (matrix, embed) = build(&vp);
        let d = eigh(&matrix).expect("CI matrix is symmetric");
        for (i, state) in report.states.iter().enumerate() {
            if step == 0 {
                let min_gap = state
                    .terms
                    .iter()
                    .map(|term| term.denominator.abs())
                    .fold(T::infinity(), T::min);
                states.push(StateScaling {
                    index: i,
                    s_total: state.s_total,
                    min_gap,
                    max_residual: T::zero(),
                    q: Vec::new(),
                });
            }
            let mut best = (0usize, T::zero());
            for k in 0..matrix.nrows() {
                let mut ov = T::zero();
                for (a, &row) in embed.iter().enumerate() {
                    ov += state.model_vector[a] * d.vectors[(row, k)];
                }
                if ov.abs() > best.1 {
                    best = (k, ov.abs());
                }
            }
            let residual = (state.e_pt2 - d.values[best.0]).abs();
            let entry = &mut states[i];
            entry.q.push(residual / t.powi(power));
            if residual > entry.max_residual {
                entry.max_residual = residual;
            }
        }
    }
    Ok(ScalingProbe {
        hoppings: hoppings.to_vec(),
        states,
    })
}
