//! Model parameter sets: parsing, validation, rendering.
//!
//! The file format is UTF-8 text with one `key = value` pair per line,
//! `#` comments running to end of line and blank lines ignored. Keys:
//! k_m, k1, k2, kp1, kp2, eps_mprime, eps_l1, eps_l2, u_m, u_l, t.
//! The last three are optional and default to 0.

use std::ops::Deref;

use thiserror::Error;

use crate::scalar::Real;

/// The eleven scalars defining one model instance. All energies are
/// dimensionless multiples of K_M (the model's energy unit), but k_m is stored
/// explicitly so sweeps may scan it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T> {
    /// Metal on-site exchange between φ_M and φ_M'.
    pub k_m: T,
    /// Ligand-metal exchange K(φ_L1, φ_M).
    pub k1: T,
    /// Ligand-metal exchange K(φ_L2, φ_M).
    pub k2: T,
    /// Ligand-metal exchange K(φ_L1, φ_M').
    pub kp1: T,
    /// Ligand-metal exchange K(φ_L2, φ_M').
    pub kp2: T,
    /// Orbital energy of φ_M' relative to φ_M.
    pub eps_mprime: T,
    /// Orbital energy of φ_L1 relative to φ_M.
    pub eps_l1: T,
    /// Orbital energy of φ_L2 relative to φ_M.
    pub eps_l2: T,
    /// On-site repulsion of the metal orbitals.
    pub u_m: T,
    /// On-site repulsion of the ligand orbitals.
    pub u_l: T,
    /// Ligand-metal hopping amplitude.
    pub t: T,
}

pub const PARAM_KEYS: [&str; 11] = [
    "k_m",
    "k1",
    "k2",
    "kp1",
    "kp2",
    "eps_mprime",
    "eps_l1",
    "eps_l2",
    "u_m",
    "u_l",
    "t",
];

const REQUIRED_KEYS: [&str; 8] = [
    "k_m",
    "k1",
    "k2",
    "kp1",
    "kp2",
    "eps_mprime",
    "eps_l1",
    "eps_l2",
];

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{key}`")]
    MissingKey { key: String },
    #[error("line {line}: malformed number `{text}`")]
    MalformedNumber { line: usize, text: String },
    #[error("line {line}: malformed line `{text}` (expected `key = value`)")]
    MalformedLine { line: usize, text: String },
    #[error("exchange integral `{key}` = {value} must be non-negative")]
    NegativeExchange { key: &'static str, value: f64 },
    #[error("on-site repulsion `{key}` = {value} must be non-negative")]
    NegativeRepulsion { key: &'static str, value: f64 },
}

impl<T: Real> ModelParams<T> {
    fn get(&self, key: &str) -> T {
        match key {
            "k_m" => self.k_m,
            "k1" => self.k1,
            "k2" => self.k2,
            "kp1" => self.kp1,
            "kp2" => self.kp2,
            "eps_mprime" => self.eps_mprime,
            "eps_l1" => self.eps_l1,
            "eps_l2" => self.eps_l2,
            "u_m" => self.u_m,
            "u_l" => self.u_l,
            "t" => self.t,
            _ => unreachable!("unknown key {key}"),
        }
    }

    fn set(&mut self, key: &str, value: T) {
        match key {
            "k_m" => self.k_m = value,
            "k1" => self.k1 = value,
            "k2" => self.k2 = value,
            "kp1" => self.kp1 = value,
            "kp2" => self.kp2 = value,
            "eps_mprime" => self.eps_mprime = value,
            "eps_l1" => self.eps_l1 = value,
            "eps_l2" => self.eps_l2 = value,
            "u_m" => self.u_m = value,
            "u_l" => self.u_l = value,
            "t" => self.t = value,
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Render in the parameter file format; `parse_params(render(p)) == p`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for key in PARAM_KEYS {
            out.push_str(&format!("{key} = {}\n", self.get(key)));
        }
        out
    }

    fn check_signs(&self) -> Result<(), ParamError> {
        let exchanges: [(&'static str, T); 5] = [
            ("k_m", self.k_m),
            ("k1", self.k1),
            ("k2", self.k2),
            ("kp1", self.kp1),
            ("kp2", self.kp2),
        ];
        for (key, v) in exchanges {
            if v < T::zero() {
                return Err(ParamError::NegativeExchange {
                    key,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let repulsions: [(&'static str, T); 2] = [("u_m", self.u_m), ("u_l", self.u_l)];
        for (key, v) in repulsions {
            if v < T::zero() {
                return Err(ParamError::NegativeRepulsion {
                    key,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// Parse a parameter document. The eight K/ε keys are required; u_m, u_l
/// and t default to 0. Sign invariants are enforced on the result.
pub fn parse_params<T: Real>(text: &str) -> Result<ModelParams<T>, ParamError> {
    let zero = T::zero();
    let mut params = ModelParams {
        k_m: zero,
        k1: zero,
        k2: zero,
        kp1: zero,
        kp2: zero,
        eps_mprime: zero,
        eps_l1: zero,
        eps_l2: zero,
        u_m: zero,
        u_l: zero,
        t: zero,
    };
    let mut seen: Vec<&'static str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key_part, value_part) = match content.split_once('=') {
            Some(kv) => kv,
            None => {
                return Err(ParamError::MalformedLine {
                    line: line_no,
                    text: content.to_string(),
                })
            }
        };
        let key = key_part.trim();
        let value_text = value_part.trim();
        let canonical = match PARAM_KEYS.iter().find(|&&k| k == key) {
            Some(&k) => k,
            None => {
                return Err(ParamError::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                })
            }
        };
        if seen.contains(&canonical) {
            return Err(ParamError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        let value: f64 = value_text
            .parse()
            .map_err(|_| ParamError::MalformedNumber {
                line: line_no,
                text: value_text.to_string(),
            })?;
        if !value.is_finite() {
            return Err(ParamError::MalformedNumber {
                line: line_no,
                text: value_text.to_string(),
            });
        }
        params.set(canonical, T::of(value));
        seen.push(canonical);
    }

    for key in REQUIRED_KEYS {
        if !seen.contains(&key) {
            return Err(ParamError::MissingKey {
                key: key.to_string(),
            });
        }
    }
    params.check_signs()?;
    Ok(params)
}

/// A parameter set that passed validation, together with any warnings
/// raised about the perturbative regime.
#[derive(Clone, Debug)]
pub struct ValidatedParams<T> {
    params: ModelParams<T>,
    warnings: Vec<String>,
}

impl<T> Deref for ValidatedParams<T> {
    type Target = ModelParams<T>;

    fn deref(&self) -> &ModelParams<T> {
        &self.params
    }
}

impl<T: Real> ValidatedParams<T> {
    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Hopping amplitudes beyond this fraction of the smallest model-perturber
/// gap put second-order theory on questionable ground and raise a warning.
pub const PT2_REGIME_RATIO: f64 = 0.25;

/// Check sign invariants and wrap the parameters. A non-zero hopping that
/// is large relative to the smallest |E_Ψ − E_β| gap records a warning
/// (never an error).
pub fn validate<T: Real>(params: ModelParams<T>) -> Result<ValidatedParams<T>, ParamError> {
    params.check_signs()?;
    let mut validated = ValidatedParams {
        params,
        warnings: Vec::new(),
    };
    if params.t != T::zero() {
        let gap = crate::pt2::model_perturber_min_gap(&validated);
        let threshold = T::of(PT2_REGIME_RATIO) * gap;
        if params.t.abs() > threshold {
            validated.warnings.push(format!(
                "hopping t = {} exceeds {} of the smallest model-perturber gap {}; \
                 a perturbative treatment in this regime is questionable",
                params.t, PT2_REGIME_RATIO, gap
            ));
        }
    }
    Ok(validated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "k_m = 1.0\nk1 = 0.25\nk2 = 0.25\nkp1 = 0.75\nkp2 = 0.75\n\
                           eps_mprime = 0\neps_l1 = 0\neps_l2 = 0";

    pub(crate) const FIG4: &str = "\
# hopping scan reference set (K_M unit)
u_l = 2.95
u_m = 4.0
eps_mprime = 0.80
eps_l1 = -2.80
eps_l2 = -1.50
k1 = 0.35
k2 = 0.10
kp1 = 0.58
kp2 = 0.75
k_m = 1.0
";

    #[test]
    fn minimal_file_defaults_optionals_to_zero() {
        let p: ModelParams<f64> = parse_params(MINIMAL).unwrap();
        assert_eq!(p.k_m, 1.0);
        assert_eq!(p.kp1, 0.75);
        assert_eq!(p.u_m, 0.0);
        assert_eq!(p.u_l, 0.0);
        assert_eq!(p.t, 0.0);
    }

    #[test]
    fn reference_file_accepted_verbatim() {
        let p: ModelParams<f64> = parse_params(FIG4).unwrap();
        assert_eq!(p.u_l, 2.95);
        assert_eq!(p.u_m, 4.0);
        assert_eq!(p.eps_mprime, 0.80);
        assert_eq!(p.eps_l1, -2.80);
        assert_eq!(p.eps_l2, -1.50);
        assert_eq!(p.k1, 0.35);
        assert_eq!(p.k2, 0.10);
        assert_eq!(p.kp1, 0.58);
        assert_eq!(p.kp2, 0.75);
        assert_eq!(p.k_m, 1.0);
        assert_eq!(p.t, 0.0);
    }

    #[test]
    fn negative_exchange_is_rejected() {
        let text = MINIMAL.replace("k_m = 1.0", "k_m = -1.0");
        match parse_params::<f64>(&text) {
            Err(ParamError::NegativeExchange { key: "k_m", value }) => {
                assert_eq!(value, -1.0)
            }
            other => panic!("expected NegativeExchange, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_names_the_line() {
        let text = format!("{MINIMAL}\nk3 = 0.5");
        match parse_params::<f64>(&text) {
            Err(ParamError::UnknownKey { line, key }) => {
                assert_eq!(line, 9);
                assert_eq!(key, "k3");
            }
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_names_the_line() {
        let text = format!("{MINIMAL}\nk1 = 0.3");
        match parse_params::<f64>(&text) {
            Err(ParamError::DuplicateKey { line, key }) => {
                assert_eq!(line, 9);
                assert_eq!(key, "k1");
            }
            other => panic!("expected DuplicateKey, got {other:?}"),
        }
    }

    #[test]
    fn missing_required_key_is_reported() {
        let text = MINIMAL.replace("kp2 = 0.75", "");
        match parse_params::<f64>(&text) {
            Err(ParamError::MissingKey { key }) => assert_eq!(key, "kp2"),
            other => panic!("expected MissingKey, got {other:?}"),
        }
    }

    #[test]
    fn malformed_number_names_the_line() {
        let text = MINIMAL.replace("k2 = 0.25", "k2 = zero.25");
        match parse_params::<f64>(&text) {
            Err(ParamError::MalformedNumber { line, text }) => {
                assert_eq!(line, 3);
                assert_eq!(text, "zero.25");
            }
            other => panic!("expected MalformedNumber, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let text = "  k_m=1.0 # unit\n\n# full line comment\nk1 =0.25\nk2= 0.25\n\
                    kp1 = 0.75\nkp2 = 0.75\neps_mprime=0\neps_l1=0\neps_l2=0\n";
        let p: ModelParams<f64> = parse_params(text).unwrap();
        assert_eq!(p.k_m, 1.0);
        assert_eq!(p.k1, 0.25);
    }

    #[test]
    fn all_zero_exchange_is_valid() {
        let text = "k_m = 0\nk1 = 0\nk2 = 0\nkp1 = 0\nkp2 = 0\n\
                    eps_mprime = 0\neps_l1 = 0\neps_l2 = 0";
        let p: ModelParams<f64> = parse_params(text).unwrap();
        let v = validate(p).unwrap();
        assert!(v.warnings().is_empty());
    }

    #[test]
    fn negative_repulsion_is_rejected() {
        let text = format!("{MINIMAL}\nu_m = -1");
        match parse_params::<f64>(&text) {
            Err(ParamError::NegativeRepulsion { key: "u_m", value }) => {
                assert_eq!(value, -1.0)
            }
            other => panic!("expected NegativeRepulsion, got {other:?}"),
        }
        let p: ModelParams<f64> = parse_params(MINIMAL).unwrap();
        let bad = ModelParams { u_m: -1.0, ..p };
        assert!(matches!(
            validate(bad),
            Err(ParamError::NegativeRepulsion { key: "u_m", .. })
        ));
    }

    #[test]
    fn large_hopping_records_a_regime_warning() {
        let mut p: ModelParams<f64> = parse_params(FIG4).unwrap();
        p.t = 0.52;
        let v = validate(p).unwrap();
        assert_eq!(v.warnings().len(), 1);
        assert!(v.warnings()[0].contains("questionable"));
    }

    #[test]
    fn zero_hopping_never_warns() {
        let p: ModelParams<f64> = parse_params(FIG4).unwrap();
        let v = validate(p).unwrap();
        assert!(v.warnings().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn parse_render_round_trip(
            k_m in 0.0f64..4.0,
            k1 in 0.0f64..2.0,
            k2 in 0.0f64..2.0,
            kp1 in 0.0f64..2.0,
            kp2 in 0.0f64..2.0,
            eps_mprime in -3.0f64..3.0,
            eps_l1 in -3.0f64..3.0,
            eps_l2 in -3.0f64..3.0,
            u_m in 0.0f64..5.0,
            u_l in 0.0f64..5.0,
            t in 0.0f64..1.0,
        ) {
            let p = ModelParams { k_m, k1, k2, kp1, kp2, eps_mprime, eps_l1, eps_l2, u_m, u_l, t };
            let back: ModelParams<f64> = parse_params(&p.render()).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn parsing_is_line_order_insensitive(seed in 0u64..1000) {
            let mut lines: Vec<&str> = MINIMAL.lines().collect();
            let n = lines.len();
            let (i, j) = ((seed as usize) % n, (seed as usize / n) % n);
            lines.swap(i, j);
            let p: ModelParams<f64> = parse_params(&lines.join("\n")).unwrap();
            let q: ModelParams<f64> = parse_params(MINIMAL).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
