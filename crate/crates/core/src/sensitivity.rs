//! One-at-a-time sensitivity of the slider positions to each link length.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{FingerPose, Geometry, Link, MechanismState};
use crate::optimizer::candidate_seed;
use crate::report::{fmt_f64, Record};
use crate::solver::{solve_from_extension, solve_pose, SolverSettings};

/// Parameters whose combined index exceeds this are kept in the search.
pub const RETAIN_THRESHOLD: f64 = 0.1;

/// Representative pose for the study (deg).
pub const DEFAULT_POSE_DEG: (f64, f64) = (40.0, 45.0);

/// `((S₂ − S₁)/S_av) / ((E₂ − E₁)/E_av)`
pub fn sensitivity_index(e1: f64, e2: f64, s1: f64, s2: f64) -> Result<f64> {
    let e_av = 0.5 * (e1 + e2);
    let s_av = 0.5 * (s1 + s2);
    if e2 == e1 || e_av == 0.0 {
        return Err(Error::InvalidSensitivity("input values must differ and average non-zero".into()));
    }
    if s_av == 0.0 {
        if s1 == s2 {
            return Ok(0.0);
        }
        return Err(Error::InvalidSensitivity("output average is zero".into()));
    }
    Ok(((s2 - s1) / s_av) / ((e2 - e1) / e_av))
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `sign(SI_c1)·sign(SI_c2)·√(SI_c1² + SI_c2²)`
pub fn combined_index(si_c1: f64, si_c2: f64) -> f64 {
    sign(si_c1) * sign(si_c2) * (si_c1 * si_c1 + si_c2 * si_c2).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRecord {
    pub parameter: String,
    pub e1: f64,
    pub e2: f64,
    /// `(S₁, S₂)` for `c₁` and for `c₂` (mm).
    pub s_c1: (f64, f64),
    pub s_c2: (f64, f64),
    pub si_c1: f64,
    pub si_c2: f64,
    pub si_g: f64,
}

impl SensitivityRecord {
    /// Build a record from the two perturbed evaluations `(c₁, c₂)`.
    pub fn from_samples(parameter: &str, e1: f64, e2: f64, low: (f64, f64), high: (f64, f64)) -> Result<Self> {
        let si_c1 = sensitivity_index(e1, e2, low.0, high.0)?;
        let si_c2 = sensitivity_index(e1, e2, low.1, high.1)?;
        Ok(SensitivityRecord {
            parameter: parameter.to_string(),
            e1,
            e2,
            s_c1: (low.0, high.0),
            s_c2: (low.1, high.1),
            si_c1,
            si_c2,
            si_g: combined_index(si_c1, si_c2),
        })
    }

    pub fn retained(&self) -> bool {
        self.si_g > RETAIN_THRESHOLD
    }
}

impl Record for SensitivityRecord {
    fn header() -> &'static [&'static str] {
        &["parameter", "E1", "E2", "S1_c1", "S2_c1", "S1_c2", "S2_c2", "SI_c1", "SI_c2", "SI_g", "retained"]
    }

    fn fields(&self) -> Vec<String> {
        let mut v = vec![self.parameter.clone()];
        v.extend(
            [self.e1, self.e2, self.s_c1.0, self.s_c1.1, self.s_c2.0, self.s_c2.1, self.si_c1, self.si_c2, self.si_g]
                .iter()
                .map(|x| fmt_f64(*x)),
        );
        v.push(self.retained().to_string());
        v
    }
}

/// Bar-chart row: parameter with its two slider indices.
pub struct BarRow<'a>(pub &'a SensitivityRecord);

impl Record for BarRow<'_> {
    fn header() -> &'static [&'static str] {
        &["parameter", "SI_c1", "SI_c2"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.0.parameter.clone(), fmt_f64(self.0.si_c1), fmt_f64(self.0.si_c2)]
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidSensitivity(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Generic OAT study of a two-output model around `value`.
pub fn oat_with<F>(parameter: &str, value: f64, delta: f64, model: F) -> Result<SensitivityRecord>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    check_delta(delta)?;
    let (e1, e2) = ((1.0 - delta) * value, (1.0 + delta) * value);
    let wrap = |source: Error| Error::UnsolvablePerturbation {
        parameter: parameter.to_string(),
        source: Box::new(source),
    };
    let low = model(e1).map_err(wrap)?;
    let high = model(e2).map_err(wrap)?;
    SensitivityRecord::from_samples(parameter, e1, e2, low, high)
}

/// Solve a geometry whose one length moved away from the baseline, stepping
/// the length gradually from the baseline solution.
fn solve_perturbed(
    base: &Geometry,
    link: Link,
    value: f64,
    pose: &FingerPose,
    start: &MechanismState,
    settings: &SolverSettings,
) -> Result<MechanismState> {
    let v0 = base.link(link);
    let steps = 4;
    let mut state = *start;
    for k in 1..=steps {
        let g = base.clone().with_link(link, v0 + (value - v0) * k as f64 / steps as f64);
        g.validate()?;
        state = solve_pose(pose, &g, Some(&state), settings)?;
    }
    Ok(state)
}

/// Sensitivity of `(c₁, c₂)` at `pose` to one primitive length.
pub fn oat_sensitivity(geom: &Geometry, link: Link, pose: &FingerPose, delta: f64, settings: &SolverSettings) -> Result<SensitivityRecord> {
    check_delta(delta)?;
    let baseline = solve_from_extension(geom, pose, settings)?;
    oat_at(geom, link, pose, delta, &baseline, settings)
}

fn oat_at(
    geom: &Geometry,
    link: Link,
    pose: &FingerPose,
    delta: f64,
    baseline: &MechanismState,
    settings: &SolverSettings,
) -> Result<SensitivityRecord> {
    oat_with(link.name(), geom.link(link), delta, |value| {
        let s = solve_perturbed(geom, link, value, pose, baseline, settings).or_else(|_| {
            // Fall back to assembling the perturbed mechanism from scratch.
            let mut g = geom.clone().with_link(link, value);
            let seed = geom.seed.ok_or_else(|| Error::InvalidGeometry("geometry has no seed".into()))?;
            g.seed = Some(candidate_seed(&g, &seed, settings)?);
            solve_from_extension(&g, pose, settings)
        })?;
        Ok((s.c1, s.c2))
    })
}

/// Records for every primitive length plus the ones that could not be evaluated.
#[derive(Debug, Clone)]
pub struct SensitivityReport {
    /// Sorted by `SI_g` descending, ties by name.
    pub records: Vec<SensitivityRecord>,
    pub failures: Vec<(String, String)>,
}

impl SensitivityReport {
    pub fn retained(&self) -> Vec<&str> {
        self.records.iter().filter(|r| r.retained()).map(|r| r.parameter.as_str()).collect()
    }

    pub fn frozen(&self) -> Vec<&str> {
        self.records.iter().filter(|r| !r.retained()).map(|r| r.parameter.as_str()).collect()
    }

    pub fn get(&self, link: Link) -> Option<&SensitivityRecord> {
        self.records.iter().find(|r| r.parameter == link.name())
    }
}

/// OAT study over all eleven primitive lengths.
pub fn rank_parameters(geom: &Geometry, pose: &FingerPose, delta: f64, settings: &SolverSettings) -> Result<SensitivityReport> {
    check_delta(delta)?;
    let baseline = solve_from_extension(geom, pose, settings)?;
    let results: Vec<(Link, Result<SensitivityRecord>)> = Link::ALL
        .par_iter()
        .map(|&link| (link, oat_at(geom, link, pose, delta, &baseline, settings)))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (link, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push((link.name().to_string(), e.to_string())),
        }
    }
    records.sort_by(|a, b| b.si_g.total_cmp(&a.si_g).then_with(|| a.parameter.cmp(&b.parameter)));
    Ok(SensitivityReport { records, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn combined_index_examples() {
        assert_eq!(combined_index(3.0, 4.0), 5.0);
        assert_eq!(combined_index(-3.0, 4.0), -5.0);
        assert_eq!(combined_index(-3.0, -4.0), 5.0);
        assert_eq!(combined_index(0.0, 4.0), 0.0);
    }

    #[test]
    fn independent_output_has_zero_index() {
        let r = oat_with("dummy", 12.0, 0.1, |_| Ok((3.0, 7.0))).unwrap();
        assert_eq!(r.si_c1, 0.0);
        assert_eq!(r.si_c2, 0.0);
        assert_eq!(r.si_g, 0.0);
    }

    #[test]
    fn zero_delta_is_rejected() {
        assert!(matches!(
            oat_with("x", 1.0, 0.0, |e| Ok((e, e))),
            Err(Error::InvalidSensitivity(_))
        ));
    }

    #[test]
    fn failing_model_reports_parameter() {
        let err = oat_with("L_XY", 1.0, 0.1, |_| Err(Error::Indeterminate)).unwrap_err();
        assert!(matches!(err, Error::UnsolvablePerturbation { ref parameter, .. } if parameter == "L_XY"));
    }

    proptest! {
        #[test]
        fn linear_model_has_unit_index(a in prop_oneof![-50.0..-0.01f64, 0.01..50.0f64], v in 0.5..100.0f64, d in 0.01..0.5f64) {
            let r = oat_with("lin", v, d, |e| Ok((a * e, 2.0 * a * e))).unwrap();
            prop_assert!((r.si_c1 - 1.0).abs() <= 1e-12);
            prop_assert!((r.si_c2 - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn swap_invariance(e1 in 1.0..10.0f64, de in 0.1..5.0f64, s1 in 1.0..10.0f64, s2 in 1.0..10.0f64) {
            let e2 = e1 + de;
            let a = sensitivity_index(e1, e2, s1, s2).unwrap();
            let b = sensitivity_index(e2, e1, s2, s1).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn combined_identity(lo in (1.0..10.0f64, 1.0..10.0f64), hi in (1.0..10.0f64, 1.0..10.0f64)) {
            let r = SensitivityRecord::from_samples("p", 9.0, 11.0, lo, hi).unwrap();
            prop_assert_eq!(r.si_g, sign(r.si_c1) * sign(r.si_c2) * (r.si_c1 * r.si_c1 + r.si_c2 * r.si_c2).sqrt());
        }
    }
}
