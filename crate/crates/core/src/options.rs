//! Analysis switches shared by the stability, noise and search modules.

/// How the resonator factor G = g_fixed · g_levitated entering the
/// horizontal damping term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RocConvention {
    /// Signed ROCs in the resonator convention (−R on the convex lower
    /// face, +R/n_s through the substrate), as used for the mode.
    #[default]
    Signed,
    /// (1 − l/R_I)(1 − l/R) with the raw, positive mirror ROC R.
    PaperLiteral,
}

impl RocConvention {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "signed" => Some(RocConvention::Signed),
            "paper-literal" => Some(RocConvention::PaperLiteral),
            _ => None,
        }
    }
}

/// Form of the coating Brownian-noise bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoatingFormula {
    /// Y_s²(1+ν_c)²(1−2ν_c)² in the second term, symmetric with the
    /// substrate term.
    #[default]
    Squared,
    /// (1−2ν_c) unsquared in the second term.
    AsPrinted,
}

impl CoatingFormula {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "squared" => Some(CoatingFormula::Squared),
            "as-printed" => Some(CoatingFormula::AsPrinted),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub roc_convention: RocConvention,
    /// Gate overall stability and feasibility on the horizontal damping sign.
    pub strict_horizontal_damping: bool,
    pub coating_formula: CoatingFormula,
    /// Allowed |(F_L − F_U − mg)/mg|.
    pub force_balance_tolerance: f64,
    /// Minimum acceptable vertical trapping range (m).
    pub dz_floor: f64,
    /// Maximum acceptable temperature rise of the mirror (K).
    pub temperature_rise_limit: f64,
    /// Rescale the lower input power so that the force balance is exact.
    pub solve_balance: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            roc_convention: RocConvention::Signed,
            strict_horizontal_damping: false,
            coating_formula: CoatingFormula::Squared,
            force_balance_tolerance: 0.05,
            dz_floor: 10e-12,
            temperature_rise_limit: 20.0,
            solve_balance: false,
        }
    }
}
