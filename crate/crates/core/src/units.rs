//! Frame clock and unit conversions shared by every module.

/// Simulation and eye-tracker rate.
pub const FPS: u32 = 60;

/// Frame period in milliseconds (1000/60).
pub const FRAME_MS: f64 = 1000.0 / FPS as f64;

/// Half a frame period; the gaze-to-frame matching tolerance.
pub const HALF_FRAME_MS: f64 = FRAME_MS / 2.0;

/// Step size in seconds.
pub const DT_S: f64 = 1.0 / FPS as f64;

pub const FT_PER_MILE: f64 = 5280.0;

/// 1 mph expressed in ft/s.
pub const MPH_TO_FTPS: f64 = FT_PER_MILE / 3600.0;

#[inline]
pub fn mph_to_ftps(v: f64) -> f64 {
    v * MPH_TO_FTPS
}

#[inline]
pub fn ftps_to_mph(v: f64) -> f64 {
    v / MPH_TO_FTPS
}

/// Timestamp of a frame, computed from the index rather than accumulated so
/// consecutive frames are always exactly one period apart.
#[inline]
pub fn frame_time_ms(frame: u64) -> f64 {
    frame as f64 * 1000.0 / FPS as f64
}

/// Exact rational timestamp `(numerator, denominator)` in ms.
#[inline]
pub fn frame_time_ms_rational(frame: u64) -> (u64, u64) {
    (frame * 50, 3)
}

/// Round to 9 significant digits; the on-disk numeric precision.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let s = format!("{:.8e}", x);
    s.parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_spacing_is_exact() {
        for i in [0u64, 1, 59, 60, 7199, 1_000_000] {
            let (n0, d0) = frame_time_ms_rational(i);
            let (n1, d1) = frame_time_ms_rational(i + 1);
            assert_eq!(d0, d1);
            assert_eq!(n1 - n0, 50);
            let dt = frame_time_ms(i + 1) - frame_time_ms(i);
            assert!((dt - FRAME_MS).abs() < 1e-6);
        }
    }

    #[test]
    fn sig9_is_idempotent() {
        for x in [1.0 / 3.0, 123456.789012345, -2.5e-7, 1e300, 0.0] {
            let a = sig9(x);
            assert_eq!(a, sig9(a));
            assert!((a - x).abs() <= x.abs() * 1e-8);
        }
    }

    #[test]
    fn mph_round_trip() {
        assert!((mph_to_ftps(60.0) - 88.0).abs() < 1e-12);
        assert!((ftps_to_mph(88.0) - 60.0).abs() < 1e-12);
    }
}
