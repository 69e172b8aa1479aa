//! Exact diagonalization of a four-electron/four-orbital metal-diradical
//! exchange model.
//!
//! A spin-crossover metal centre (orbitals φ_M, φ_M') bound to two radical
//! ligands (φ_L1, φ_L2) is described by direct exchange integrals, orbital
//! energies, on-site repulsions and a ligand-metal hopping amplitude. The
//! crate builds the zeroth-order Hamiltonian on the six neutral
//! determinants, projects its eigenstates onto the |S, S_M, S_L⟩
//! spin-coupled basis, corrects the energies to second order over the
//! sixteen charge-transfer configurations, and drives the parameter scans
//! and mixing-rule checks on top of that machinery.
//!
//! All numerics are generic over the [`scalar::Real`] scalar; the type
//! aliases at the crate root fix f64, which the CLI and the test suites
//! use throughout.

pub mod config;
pub mod determinant;
pub mod eigen;
pub mod hamiltonian;
pub mod presets;
pub mod pt2;
pub mod report;
pub mod scalar;
pub mod spin;
pub mod sweep;

pub use scalar::Real;

pub type ModelParams = config::ModelParams<f64>;
pub type ValidatedParams = config::ValidatedParams<f64>;
pub type IntegralTable = hamiltonian::IntegralTable<f64>;
pub type HamiltonianBlock = hamiltonian::HamiltonianBlock<f64>;
pub type PerturberSet = hamiltonian::PerturberSet<f64>;
pub type EigenDecomposition = eigen::EigenDecomposition<f64>;
pub type SpinCoupledState = spin::SpinCoupledState<f64>;
pub type LabeledStates = spin::LabeledStates<f64>;
pub type WeightRow = spin::WeightRow<f64>;
pub type WeightTable = spin::WeightTable<f64>;
pub type Pt2Report = pt2::Pt2Report<f64>;
pub type ContractedWeights = pt2::ContractedWeights<f64>;
pub type SweepPoint = sweep::SweepPoint<f64>;
pub type RuleReport = sweep::RuleReport<f64>;
pub type Crossing = sweep::Crossing<f64>;
pub type HeisenbergReport = sweep::HeisenbergReport<f64>;
