//! One-sided Welch test on pupil diameter, passing against non-passing.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::passing::PassingPhase;
use super::stats::{mean, sample_variance};
use crate::gaze::GazeSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: f64,
    pub df: f64,
    /// P(T >= t) under equal means.
    pub p: f64,
}

/// Upper tail of Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 0.0;
    }
    if t == f64::NEG_INFINITY {
        return 1.0;
    }
    let x = df / (df + t * t);
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, x);
    if t >= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Tests H1: mean(a) > mean(b) with unequal variances. Needs two values per group.
pub fn welch_greater(a: &[f64], b: &[f64]) -> Option<WelchResult> {
    let (va, vb) = (sample_variance(a)?, sample_variance(b)?);
    let (ma, mb) = (mean(a)?, mean(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    let diff = ma - mb;
    let (t, df) = if se2 > 0.0 {
        let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
        (diff / se2.sqrt(), df)
    } else {
        let t = if diff > 0.0 {
            f64::INFINITY
        } else if diff < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        };
        (t, na + nb - 2.0)
    };
    Some(WelchResult { n_a: a.len(), n_b: b.len(), mean_a: ma, mean_b: mb, t, df, p: student_t_sf(t, df) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EyeTest {
    pub result: Option<WelchResult>,
    /// Why the test could not run.
    pub unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PupilTest {
    pub left: EyeTest,
    pub right: EyeTest,
}

/// `gaze[i]` is the sample aligned to absolute frame `first_frame + i`.
pub fn pupil_ttest(gaze: &[GazeSample], first_frame: u64, phase: &PassingPhase) -> PupilTest {
    let eye = |pick: fn(&GazeSample) -> Option<f64>| {
        if !phase.complete() {
            return EyeTest { result: None, unavailable: Some("incomplete passing phase".into()) };
        }
        let (mut pass, mut rest) = (Vec::new(), Vec::new());
        for (i, g) in gaze.iter().enumerate() {
            if let Some(d) = pick(g).filter(|d| d.is_finite() && *d > 0.0) {
                if phase.contains(first_frame + i as u64) {
                    pass.push(d);
                } else {
                    rest.push(d);
                }
            }
        }
        if pass.len() < 2 || rest.len() < 2 {
            return EyeTest { result: None, unavailable: Some("fewer than two valid samples in a phase".into()) };
        }
        EyeTest { result: welch_greater(&pass, &rest), unavailable: None }
    };
    PupilTest { left: eye(|g| g.pupil_left), right: eye(|g| g.pupil_right) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shift_gives_half() {
        let a = [1.0, 2.0, 3.0];
        let r = welch_greater(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert!((r.p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn known_quantile() {
        // t = 2.228 is the 0.975 quantile for 10 degrees of freedom.
        assert!((student_t_sf(2.228138851986, 10.0) - 0.025).abs() < 1e-9);
        assert!((student_t_sf(-2.228138851986, 10.0) - 0.975).abs() < 1e-9);
    }

    #[test]
    fn missing_eye_is_unavailable() {
        let phase = PassingPhase { t_s: Some(2), t_e: Some(5) };
        let gaze: Vec<GazeSample> = (0..10)
            .map(|i| GazeSample { timestamp_ms: i as f64, point: None, pupil_left: Some(3.0 + i as f64 * 0.01), pupil_right: None })
            .collect();
        let r = pupil_ttest(&gaze, 0, &phase);
        assert!(r.left.result.is_some());
        assert!(r.right.result.is_none() && r.right.unavailable.is_some());
    }
}
