//! Parametric entropy measures and per-pixel entropy scores.
//!
//! Six measures are provided: Shannon, Kapur, Aczél-Daróczy,
//! Havrda-Charvát, Taneja and Sharma-Mittal. Shannon and Kapur use base-2
//! logarithms, which makes their `α → 1` limits agree with the `2^(1-α) - 1`
//! normalised measures. The trigonometric measures (Aczél-Daróczy, Taneja)
//! use the natural logarithm inside `sin`/`cos`.
//!
//! Per-pixel scores are leave-one-out marginal contributions: a tuple's score
//! is `H(T) - H(T \ t)` over the set `T` of present tuples. For the sum-form
//! measures (Shannon, Havrda-Charvát, Taneja) this is exactly the tuple's
//! summand and is evaluated that way.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ingest::PixelGrid;
use crate::pixel_model::support_with_pixel_index;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Shannon,
    Kapur,
    AczelDaroczy,
    HavrdaCharvat,
    Taneja,
    SharmaMittal,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Shannon,
        Measure::Kapur,
        Measure::AczelDaroczy,
        Measure::HavrdaCharvat,
        Measure::Taneja,
        Measure::SharmaMittal,
    ];

    /// Lower-case, hyphenated name used on the command line and in manifests.
    pub fn name(self) -> &'static str {
        match self {
            Measure::Shannon => "shannon",
            Measure::Kapur => "kapur",
            Measure::AczelDaroczy => "aczel-daroczy",
            Measure::HavrdaCharvat => "havrda-charvat",
            Measure::Taneja => "taneja",
            Measure::SharmaMittal => "sharma-mittal",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Measure::Shannon => "Shannon",
            Measure::Kapur => "Kapur",
            Measure::AczelDaroczy => "Aczel-Daroczy",
            Measure::HavrdaCharvat => "Havrda-Charvat",
            Measure::Taneja => "Taneja",
            Measure::SharmaMittal => "Sharma-Mittal",
        }
    }

    pub fn uses_alpha(self) -> bool {
        self != Measure::Shannon
    }

    pub fn uses_beta(self) -> bool {
        !matches!(self, Measure::Shannon | Measure::HavrdaCharvat)
    }

    pub fn default_alpha(self) -> f64 {
        2.0
    }

    pub fn default_beta(self) -> f64 {
        match self {
            Measure::Taneja => 1.0,
            Measure::AczelDaroczy => 0.5,
            _ => 2.0,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect();
        match key.as_str() {
            "shannon" => Ok(Measure::Shannon),
            "kapur" => Ok(Measure::Kapur),
            "aczeldaroczy" => Ok(Measure::AczelDaroczy),
            "havrdacharvat" => Ok(Measure::HavrdaCharvat),
            "taneja" => Ok(Measure::Taneja),
            "sharmamittal" => Ok(Measure::SharmaMittal),
            _ => Err(format!(
                "unknown entropy measure {s:?} (expected one of shannon, kapur, aczel-daroczy, havrda-charvat, taneja, sharma-mittal)"
            )),
        }
    }
}

/// A measure together with its `α`, `β` parameters.
///
/// Parameters a measure does not use are carried but ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySpec {
    pub measure: Measure,
    pub alpha: f64,
    pub beta: f64,
}

/// A parameter constraint that does not hold for a measure.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{} entropy: constraint {constraint} violated (α = {alpha}, β = {beta})", measure.name())]
pub struct ParamViolation {
    pub measure: Measure,
    pub constraint: &'static str,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Violation(#[from] ParamViolation),
    #[error("{measure} entropy is singular: {detail}")]
    Singularity { measure: Measure, detail: String },
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
}

impl EntropySpec {
    /// Spec with the measure's default parameters (`α = 2`; `β` per measure).
    pub fn new(measure: Measure) -> Self {
        Self {
            measure,
            alpha: measure.default_alpha(),
            beta: measure.default_beta(),
        }
    }

    pub fn with_params(measure: Measure, alpha: f64, beta: f64) -> Self {
        Self {
            measure,
            alpha,
            beta,
        }
    }

    pub fn shannon() -> Self {
        Self::new(Measure::Shannon)
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    /// Check the measure's parameter domain, reporting the first failing
    /// constraint.
    pub fn validate(&self) -> Result<(), ParamViolation> {
        let (a, b) = (self.alpha, self.beta);
        let fail = |constraint| {
            Err(ParamViolation {
                measure: self.measure,
                constraint,
                alpha: a,
                beta: b,
            })
        };
        if self.measure.uses_alpha() && !a.is_finite() {
            return fail("α finite");
        }
        if self.measure.uses_beta() && !b.is_finite() {
            return fail("β finite");
        }
        match self.measure {
            Measure::Shannon => {}
            Measure::Kapur => {
                if a <= 0.0 {
                    return fail("α > 0");
                }
                if a == 1.0 {
                    return fail("α ≠ 1");
                }
                if b < 1.0 {
                    return fail("β ≥ 1");
                }
            }
            Measure::AczelDaroczy => {
                if a <= 0.0 {
                    return fail("α > 0");
                }
                if b == 0.0 {
                    return fail("β ≠ 0");
                }
            }
            Measure::HavrdaCharvat => {
                if a <= 0.0 {
                    return fail("α > 0");
                }
                if a == 1.0 {
                    return fail("α ≠ 1");
                }
            }
            Measure::Taneja => {
                if a <= 0.0 {
                    return fail("α > 0");
                }
                if b <= 0.0 {
                    return fail("β > 0");
                }
                if is_multiple_of_pi(b) {
                    return fail("β ≠ kπ");
                }
            }
            Measure::SharmaMittal => {
                if a <= 0.0 {
                    return fail("α > 0");
                }
                if a == 1.0 {
                    return fail("α ≠ 1");
                }
                if b <= 0.0 {
                    return fail("β > 0");
                }
                if b == 1.0 {
                    return fail("β ≠ 1");
                }
            }
        }
        Ok(())
    }

    /// Evaluate the measure on a probability vector.
    pub fn evaluate(&self, p: &ProbabilityVector) -> Result<f64, EntropyError> {
        match self.measure {
            Measure::Shannon => Ok(shannon(p)),
            Measure::Kapur => kapur(p, self.alpha, self.beta),
            Measure::AczelDaroczy => aczel_daroczy(p, self.alpha, self.beta),
            Measure::HavrdaCharvat => havrda_charvat(p, self.alpha),
            Measure::Taneja => taneja(p, self.alpha, self.beta),
            Measure::SharmaMittal => sharma_mittal(p, self.alpha, self.beta),
        }
    }

    /// Short label such as `Shannon`, `Havrda-Charvat(2)` or `Taneja(2,1)`.
    pub fn label(&self) -> String {
        let name = self.measure.display_name();
        match (self.measure.uses_alpha(), self.measure.uses_beta()) {
            (false, _) => name.to_string(),
            (true, false) => format!("{name}({})", self.alpha),
            (true, true) => format!("{name}({},{})", self.alpha, self.beta),
        }
    }
}

fn is_multiple_of_pi(beta: f64) -> bool {
    let k = (beta / PI).round();
    k >= 0.0 && (beta - k * PI).abs() <= 1e-12 * beta.abs().max(1.0)
}

/// Strictly positive probabilities with total mass at most one.
///
/// Zero-probability outcomes must be filtered out before construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub const MASS_SLACK: f64 = 1e-9;

    pub fn new(values: Vec<f64>) -> Result<Self, EntropyError> {
        if values.is_empty() {
            return Err(EntropyError::InvalidProbability("empty vector".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return Err(EntropyError::InvalidProbability(format!(
                "value {bad} outside (0, 1]"
            )));
        }
        let mass: f64 = values.iter().sum();
        if mass > 1.0 + Self::MASS_SLACK {
            return Err(EntropyError::InvalidProbability(format!(
                "total mass {mass} exceeds 1"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check(measure: Measure, alpha: f64, beta: f64) -> Result<(), EntropyError> {
    EntropySpec::with_params(measure, alpha, beta)
        .validate()
        .map_err(EntropyError::from)
}

fn power_sum(p: &[f64], exponent: f64) -> f64 {
    p.iter().map(|&x| x.powf(exponent)).sum()
}

/// `2^(1-α) - 1`, the normaliser shared by Havrda-Charvát and Sharma-Mittal.
fn pow2_normaliser(alpha: f64) -> f64 {
    (1.0 - alpha).exp2() - 1.0
}

/// `-Σ p log₂ p`, in bits.
pub fn shannon(p: &ProbabilityVector) -> f64 {
    p.0.iter().map(|&x| shannon_term(x)).sum()
}

fn shannon_term(p: f64) -> f64 {
    -p * p.log2()
}

/// `1/(1-α) · log₂(Σ p^(α+β-1) / Σ p^β)`.
pub fn kapur(p: &ProbabilityVector, alpha: f64, beta: f64) -> Result<f64, EntropyError> {
    check(Measure::Kapur, alpha, beta)?;
    Ok(kapur_from_sums(
        alpha,
        power_sum(&p.0, alpha + beta - 1.0),
        power_sum(&p.0, beta),
    ))
}

fn kapur_from_sums(alpha: f64, numerator: f64, denominator: f64) -> f64 {
    (numerator / denominator).log2() / (1.0 - alpha)
}

/// `(1/β) · arctan(Σ p^α sin(β ln p) / Σ p^α cos(β ln p))`; may be negative.
pub fn aczel_daroczy(p: &ProbabilityVector, alpha: f64, beta: f64) -> Result<f64, EntropyError> {
    check(Measure::AczelDaroczy, alpha, beta)?;
    let (sin_sum, cos_sum, scale) = p.0.iter().fold((0.0, 0.0, 0.0), |(s, c, m), &x| {
        let w = x.powf(alpha);
        let phase = beta * x.ln();
        (s + w * phase.sin(), c + w * phase.cos(), m + w)
    });
    aczel_daroczy_from_sums(beta, sin_sum, cos_sum, scale)
}

fn aczel_daroczy_from_sums(
    beta: f64,
    sin_sum: f64,
    cos_sum: f64,
    scale: f64,
) -> Result<f64, EntropyError> {
    if cos_sum.abs() <= 1e-15 * scale {
        return Err(EntropyError::Singularity {
            measure: Measure::AczelDaroczy,
            detail: format!("Σ p^α cos(β ln p) = {cos_sum:e} vanishes"),
        });
    }
    Ok((sin_sum / cos_sum).atan() / beta)
}

/// `(Σ p^α - 1) / (2^(1-α) - 1)`.
pub fn havrda_charvat(p: &ProbabilityVector, alpha: f64) -> Result<f64, EntropyError> {
    check(Measure::HavrdaCharvat, alpha, 0.0)?;
    Ok((power_sum(&p.0, alpha) - 1.0) / pow2_normaliser(alpha))
}

/// `-(2^(α-1) / sin β) · Σ p^α sin(β ln p)`.
pub fn taneja(p: &ProbabilityVector, alpha: f64, beta: f64) -> Result<f64, EntropyError> {
    check(Measure::Taneja, alpha, beta)?;
    Ok(p.0.iter().map(|&x| taneja_term(x, alpha, beta)).sum())
}

fn taneja_term(p: f64, alpha: f64, beta: f64) -> f64 {
    -((alpha - 1.0).exp2() / beta.sin()) * p.powf(alpha) * (beta * p.ln()).sin()
}

/// `((Σ p^β)^((α-1)/(β-1)) - 1) / (2^(1-α) - 1)`.
pub fn sharma_mittal(p: &ProbabilityVector, alpha: f64, beta: f64) -> Result<f64, EntropyError> {
    check(Measure::SharmaMittal, alpha, beta)?;
    Ok(sharma_mittal_from_sum(alpha, beta, power_sum(&p.0, beta)))
}

fn sharma_mittal_from_sum(alpha: f64, beta: f64, beta_sum: f64) -> f64 {
    (beta_sum.powf((alpha - 1.0) / (beta - 1.0)) - 1.0) / pow2_normaliser(alpha)
}

/// Sum of every term except the one at each index, without cancellation.
fn exclusive_sums(terms: &[f64]) -> Vec<f64> {
    let n = terms.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + terms[i];
    }
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + terms[i];
    }
    (0..n).map(|i| prefix[i] + suffix[i + 1]).collect()
}

/// Leave-one-out score of every probability in `probs`.
///
/// `probs` is the present-support probability set (distinct tuples). When
/// removing a term leaves nothing, the empty set's entropy is taken as 0.
pub fn leave_one_out_scores(probs: &[f64], spec: &EntropySpec) -> Result<Vec<f64>, EntropyError> {
    spec.validate()?;
    if let Some(bad) = probs.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(EntropyError::InvalidProbability(format!(
            "value {bad} outside (0, 1]"
        )));
    }
    let (alpha, beta) = (spec.alpha, spec.beta);
    let single = probs.len() == 1;
    let scores = match spec.measure {
        Measure::Shannon => probs.iter().map(|&p| shannon_term(p)).collect(),
        Measure::HavrdaCharvat => {
            let norm = pow2_normaliser(alpha);
            probs.iter().map(|&p| p.powf(alpha) / norm).collect()
        }
        Measure::Taneja => probs.iter().map(|&p| taneja_term(p, alpha, beta)).collect(),
        Measure::Kapur => {
            let num: Vec<f64> = probs.iter().map(|&p| p.powf(alpha + beta - 1.0)).collect();
            let den: Vec<f64> = probs.iter().map(|&p| p.powf(beta)).collect();
            let full = kapur_from_sums(alpha, num.iter().sum(), den.iter().sum());
            if single {
                vec![full]
            } else {
                exclusive_sums(&num)
                    .into_iter()
                    .zip(exclusive_sums(&den))
                    .map(|(n, d)| full - kapur_from_sums(alpha, n, d))
                    .collect()
            }
        }
        Measure::SharmaMittal => {
            let terms: Vec<f64> = probs.iter().map(|&p| p.powf(beta)).collect();
            let full = sharma_mittal_from_sum(alpha, beta, terms.iter().sum());
            if single {
                vec![full]
            } else {
                exclusive_sums(&terms)
                    .into_iter()
                    .map(|rest| full - sharma_mittal_from_sum(alpha, beta, rest))
                    .collect()
            }
        }
        Measure::AczelDaroczy => {
            let weights: Vec<f64> = probs.iter().map(|&p| p.powf(alpha)).collect();
            let sines: Vec<f64> = probs
                .iter()
                .zip(&weights)
                .map(|(&p, w)| w * (beta * p.ln()).sin())
                .collect();
            let cosines: Vec<f64> = probs
                .iter()
                .zip(&weights)
                .map(|(&p, w)| w * (beta * p.ln()).cos())
                .collect();
            let full = aczel_daroczy_from_sums(
                beta,
                sines.iter().sum(),
                cosines.iter().sum(),
                weights.iter().sum(),
            )?;
            if single {
                vec![full]
            } else {
                let rest_w = exclusive_sums(&weights);
                let rest_s = exclusive_sums(&sines);
                let rest_c = exclusive_sums(&cosines);
                (0..probs.len())
                    .map(|i| {
                        aczel_daroczy_from_sums(beta, rest_s[i], rest_c[i], rest_w[i])
                            .map(|rest| full - rest)
                    })
                    .collect::<Result<_, _>>()?
            }
        }
    };
    Ok(scores)
}

/// Per-pixel entropy score, in row-major pixel order.
///
/// Pixels sharing an intensity tuple share a score.
pub fn pixel_scores(grid: &PixelGrid, spec: &EntropySpec) -> Result<Vec<f64>, EntropyError> {
    let (support, pixel_entry) = support_with_pixel_index(grid);
    let tuple_scores = leave_one_out_scores(&support.probabilities(), spec)?;
    Ok(pixel_entry.into_iter().map(|i| tuple_scores[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    fn violation(spec: EntropySpec) -> &'static str {
        spec.validate().unwrap_err().constraint
    }

    #[test]
    fn validation_names_failing_constraint() {
        use Measure::*;
        assert_eq!(
            violation(EntropySpec::with_params(Kapur, 1.0, 1.0)),
            "α ≠ 1"
        );
        assert_eq!(
            violation(EntropySpec::with_params(Kapur, 0.0, 1.0)),
            "α > 0"
        );
        assert_eq!(
            violation(EntropySpec::with_params(Kapur, 2.0, 0.5)),
            "β ≥ 1"
        );
        assert_eq!(
            violation(EntropySpec::with_params(AczelDaroczy, 1.0, 0.0)),
            "β ≠ 0"
        );
        assert_eq!(
            violation(EntropySpec::with_params(HavrdaCharvat, 1.0, 0.0)),
            "α ≠ 1"
        );
        assert_eq!(
            violation(EntropySpec::with_params(Taneja, 1.0, PI)),
            "β ≠ kπ"
        );
        assert_eq!(
            violation(EntropySpec::with_params(Taneja, 1.0, 3.0 * PI)),
            "β ≠ kπ"
        );
        assert_eq!(
            violation(EntropySpec::with_params(Taneja, 1.0, 0.0)),
            "β > 0"
        );
        assert_eq!(
            violation(EntropySpec::with_params(SharmaMittal, 2.0, 1.0)),
            "β ≠ 1"
        );
        assert_eq!(
            violation(EntropySpec::with_params(Kapur, f64::NAN, 1.0)),
            "α finite"
        );
        assert!(EntropySpec::with_params(SharmaMittal, 2.0, 2.0)
            .validate()
            .is_ok());
        assert!(EntropySpec::with_params(Taneja, 2.0, 1.0)
            .validate()
            .is_ok());
        // unused parameters are not checked
        assert!(EntropySpec::with_params(Shannon, f64::NAN, f64::NAN)
            .validate()
            .is_ok());
        assert!(EntropySpec::with_params(HavrdaCharvat, 2.0, f64::NAN)
            .validate()
            .is_ok());
    }

    #[test]
    fn violation_message_is_readable() {
        let msg = EntropySpec::with_params(Measure::Kapur, 1.0, 1.0)
            .validate()
            .unwrap_err()
            .to_string();
        assert_eq!(
            msg,
            "kapur entropy: constraint α ≠ 1 violated (α = 1, β = 1)"
        );
    }

    #[test]
    fn defaults() {
        for m in Measure::ALL {
            assert!(EntropySpec::new(m).validate().is_ok(), "{m}");
        }
        assert_eq!(EntropySpec::new(Measure::Taneja).beta, 1.0);
        assert_eq!(EntropySpec::new(Measure::AczelDaroczy).beta, 0.5);
        assert_eq!(EntropySpec::new(Measure::Kapur).label(), "Kapur(2,2)");
        assert_eq!(
            EntropySpec::new(Measure::HavrdaCharvat).label(),
            "Havrda-Charvat(2)"
        );
        assert_eq!(EntropySpec::shannon().label(), "Shannon");
    }

    #[test]
    fn measure_names_parse_case_insensitively() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>(), Ok(m));
            assert_eq!(m.name().to_uppercase().parse::<Measure>(), Ok(m));
        }
        assert_eq!("Aczel_Daroczy".parse(), Ok(Measure::AczelDaroczy));
        assert!("renyi".parse::<Measure>().is_err());
    }

    #[test]
    fn probability_vector_rejects_invalid_input() {
        assert!(ProbabilityVector::new(vec![]).is_err());
        assert!(ProbabilityVector::new(vec![0.0, 1.0]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1]).is_err());
        assert!(ProbabilityVector::new(vec![0.7, 0.7]).is_err());
        assert!(ProbabilityVector::new(vec![f64::NAN]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.5 + 1e-10]).is_ok());
    }

    #[test]
    fn aczel_daroczy_reports_singularity() {
        // single outcome p with β ln p = π/2 makes the cosine sum vanish
        let p = (-PI / 2.0).exp();
        let err = aczel_daroczy(&pv(&[p]), 1.0, 1.0).unwrap_err();
        assert!(matches!(err, EntropyError::Singularity { .. }), "{err}");
    }

    /// Recompute the measure from scratch on the set with one term removed.
    fn naive_loo(probs: &[f64], spec: &EntropySpec) -> Vec<f64> {
        let full = spec.evaluate(&pv(probs)).unwrap();
        (0..probs.len())
            .map(|i| {
                let rest: Vec<f64> = probs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &p)| p)
                    .collect();
                let rest_h = if rest.is_empty() {
                    0.0
                } else {
                    spec.evaluate(&pv(&rest)).unwrap()
                };
                full - rest_h
            })
            .collect()
    }

    #[test]
    fn sum_form_scores_are_summands_up_to_constant() {
        let probs = [0.5, 0.25, 0.125, 0.0625];
        for spec in [
            EntropySpec::new(Measure::HavrdaCharvat),
            EntropySpec::new(Measure::Taneja),
            EntropySpec::shannon(),
        ] {
            let got = leave_one_out_scores(&probs, &spec).unwrap();
            let want = naive_loo(&probs, &spec);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "{spec:?}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn single_tuple_scores() {
        for m in Measure::ALL {
            let spec = EntropySpec::new(m);
            let s = leave_one_out_scores(&[1.0], &spec).unwrap();
            assert_eq!(s.len(), 1);
            // sum forms keep the summand; ratio forms score H({t}) - 0
            let want = match m {
                Measure::HavrdaCharvat => 1.0 / (2f64.powf(1.0 - spec.alpha) - 1.0),
                _ => 0.0,
            };
            assert!((s[0] - want).abs() < 1e-12, "{m}: {}", s[0]);
        }
    }

    fn arb_probs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, 1..=max_len).prop_map(|w| {
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| x / total).collect()
        })
    }

    proptest! {
        #[test]
        fn degenerate_vector_has_zero_entropy(a in 0.1f64..5.0, b in 1.0f64..3.0) {
            prop_assume!((a - 1.0).abs() > 1e-3 && (b - 1.0).abs() > 1e-3);
            let one = pv(&[1.0]);
            for m in Measure::ALL {
                let h = EntropySpec::with_params(m, a, b).evaluate(&one).unwrap();
                prop_assert!(h.abs() < 1e-12, "{} gave {}", m, h);
            }
        }

        #[test]
        fn uniform_maximises_sum_measures(p in arb_probs(8), a in prop::sample::select(vec![0.5, 2.0, 3.0])) {
            let n = p.len();
            let uniform = pv(&vec![1.0 / n as f64; n]);
            let p = pv(&p);
            prop_assert!(shannon(&p) <= shannon(&uniform) + 1e-12);
            prop_assert!(havrda_charvat(&p, a).unwrap() <= havrda_charvat(&uniform, a).unwrap() + 1e-12);
            prop_assert!(kapur(&p, a, 1.0).unwrap() <= kapur(&uniform, a, 1.0).unwrap() + 1e-12);
        }

        #[test]
        fn permutation_invariant(p in arb_probs(8), a in 0.2f64..4.0, b in 1.0f64..3.0, rot in 0usize..8) {
            prop_assume!((a - 1.0).abs() > 1e-3);
            let mut q = p.clone();
            let len = q.len();
            q.rotate_left(rot % len);
            q.reverse();
            let (p, q) = (pv(&p), pv(&q));
            prop_assert!((shannon(&p) - shannon(&q)).abs() < 1e-12);
            prop_assert!((havrda_charvat(&p, a).unwrap() - havrda_charvat(&q, a).unwrap()).abs() < 1e-9);
            prop_assert!((kapur(&p, a, b).unwrap() - kapur(&q, a, b).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn ratio_form_loo_matches_recompute(p in arb_probs(12)) {
            for spec in [
                EntropySpec::new(Measure::Kapur),
                EntropySpec::new(Measure::SharmaMittal),
                EntropySpec::new(Measure::AczelDaroczy),
            ] {
                let got = leave_one_out_scores(&p, &spec).unwrap();
                let want = naive_loo(&p, &spec);
                for (g, w) in got.iter().zip(&want) {
                    prop_assert!((g - w).abs() < 1e-9, "{:?}: {} vs {}", spec, g, w);
                }
            }
        }
    }
}
