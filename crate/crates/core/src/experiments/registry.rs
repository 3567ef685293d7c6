use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    BrownianSingle,
    ThethQv,
    ErgodicSin2,
    NpartIndependence,
    PeriodicExtension,
    PathDecomposition,
    QuasilinearFiniteM,
    TailBound,
    SmallAExploratory,
}

/// One row of `saccel list`.
#[derive(Debug, Clone, Serialize)]
pub struct RegistryEntry {
    pub name: &'static str,
    pub claim: &'static str,
    pub parameters: &'static [&'static str],
    pub tolerances: &'static [&'static str],
    pub exploratory: bool,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::BrownianSingle,
        ExperimentKind::ThethQv,
        ExperimentKind::ErgodicSin2,
        ExperimentKind::NpartIndependence,
        ExperimentKind::PeriodicExtension,
        ExperimentKind::PathDecomposition,
        ExperimentKind::QuasilinearFiniteM,
        ExperimentKind::TailBound,
        ExperimentKind::SmallAExploratory,
    ];

    pub fn name(self) -> &'static str {
        self.entry().name
    }

    pub fn tolerances(self) -> &'static [&'static str] {
        self.entry().tolerances
    }

    pub fn is_exploratory(self) -> bool {
        self.entry().exploratory
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn entry(self) -> RegistryEntry {
        use ExperimentKind::*;
        let (name, claim, parameters, tolerances): (_, _, &'static [&'static str], &'static [&'static str]) =
            match self {
                BrownianSingle => (
                    "brownian_single",
                    "one-period momentum increment is N(0, 2π²) for every A ≥ 0",
                    &["A", "ensemble_size", "steps_per_period", "horizon_periods", "q0", "p0"],
                    &["variance_rel", "ks_alpha"],
                ),
                ThethQv => (
                    "theth_qv",
                    "relative velocity V^n has quadratic variation t/2 as n → ∞",
                    &["n_values", "u0", "v0", "ensemble_size", "dt", "horizon_T"],
                    &["deviation_max", "monotone_slack"],
                ),
                ErgodicSin2 => (
                    "ergodic_sin2",
                    "time average of sin²X tends to 1/2; occupation of |Y| ≤ M decays",
                    &["x0", "y0", "dt", "horizon_T", "short_T", "ensemble_size", "M_threshold"],
                    &["band", "success_rate", "occupation_ratio"],
                ),
                NpartIndependence => (
                    "npart_independence",
                    "particles in one field become independent Wiener processes as A → ∞",
                    &["A", "N", "q0", "p0", "ensemble_size", "steps_per_period"],
                    &["cross_variation_max", "correlation_max", "qv_rel"],
                ),
                PeriodicExtension => (
                    "periodic_extension",
                    "consecutive periods of one particle decorrelate at large A; two-period variance 4π²",
                    &["A", "q0", "p0", "ensemble_size", "steps_per_period"],
                    &["correlation_max", "variance_rel"],
                ),
                PathDecomposition => (
                    "path_decomposition",
                    "excursion decomposition: K¹ time vanishes with M, windings average sin² to 1/2",
                    &["x0", "y0", "dt", "horizon_T", "ensemble_size", "M_values"],
                    &["monotone_slack", "residual_slack_dt", "k0_fraction_min"],
                ),
                QuasilinearFiniteM => (
                    "quasilinear_finite_m",
                    "many overlapping waves give momentum diffusion D = πA₀²",
                    &[
                        "wave_count",
                        "mass",
                        "A0",
                        "q0",
                        "qdot0",
                        "ensemble_size",
                        "steps_per_period",
                        "horizon_T",
                        "window",
                        "sample_every",
                    ],
                    &["ratio_band"],
                ),
                TailBound => (
                    "tail_bound",
                    "martingale excursions obey P(sup|M_t − M_0| ≥ b) ≤ 2exp(−b²/(2k²T))",
                    &["cases", "ensemble_size", "steps"],
                    &[],
                ),
                SmallAExploratory => (
                    "small_a_exploratory",
                    "small A keeps particles near trapping; periods stay correlated (no verdict)",
                    &["A", "q0", "p0", "ensemble_size", "steps_per_period"],
                    &[],
                ),
            };
        RegistryEntry { name, claim, parameters, tolerances, exploratory: self == SmallAExploratory }
    }
}

/// The registry as a fixed-width text table.
pub fn list_text() -> String {
    let entries: Vec<RegistryEntry> = ExperimentKind::ALL.iter().map(|k| k.entry()).collect();
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for e in &entries {
        out.push_str(&format!("{:<width$}  {}\n", e.name, e.claim));
        out.push_str(&format!("{:<width$}  params: {}\n", "", e.parameters.join(", ")));
    }
    out
}

pub fn list_json() -> String {
    let entries: Vec<RegistryEntry> = ExperimentKind::ALL.iter().map(|k| k.entry()).collect();
    serde_json::to_string_pretty(&entries).expect("registry serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_experiments_with_unique_names() {
        let names: std::collections::BTreeSet<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
        assert_eq!(names.len(), 9);
        for k in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::from_name(k.name()), Some(k));
        }
    }

    #[test]
    fn text_and_json_agree() {
        let text = list_text();
        assert_eq!(text.lines().filter(|l| !l.starts_with(' ')).count(), 9);
        let row = text.lines().find(|l| l.starts_with("theth_qv ")).unwrap();
        assert!(row.ends_with("relative velocity V^n has quadratic variation t/2 as n → ∞"), "{row}");
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&list_json()).unwrap();
        assert_eq!(parsed.len(), 9);
        for (row, k) in parsed.iter().zip(ExperimentKind::ALL) {
            assert_eq!(row["name"], k.name());
        }
    }
}
