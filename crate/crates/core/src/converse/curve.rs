//! Piece-wise linear memory/load tradeoff curves.
//!
//! A curve is a list of corner points `(t, M = t N / lambda, R)` with `t`
//! ascending; between corners the load interpolates linearly (memory
//! sharing between the two adjacent integer parameters).

use num_traits::ToPrimitive;

use crate::combinatorics::{whole, Rational};
use crate::converse::bounds::{comb_optimal_load, full_avg_lower_bound, level_avg_lower_bound};
use crate::converse::ConverseError;
use crate::topology::CombProfile;

pub const COMB_SOURCE: &str = "comb-optimal";
pub const LEVEL_AVG_SOURCE: &str = "level-ensemble-avg-lb";
pub const FULL_AVG_SOURCE: &str = "full-ensemble-avg-lb";

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Corner {
    pub t: u32,
    pub memory: Rational,
    pub load: Rational,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundCurve {
    lambda_caches: u32,
    n_files: u64,
    source: String,
    corners: Vec<Corner>,
}

impl BoundCurve {
    /// Builds a curve from `(t, load)` pairs; the memory of each corner is
    /// `t N / lambda`. Pairs must come with `t` ascending.
    pub fn from_corner_loads(
        lambda_caches: u32,
        n_files: u64,
        source: &str,
        loads: impl IntoIterator<Item = (u32, Rational)>,
    ) -> Self {
        let corners: Vec<Corner> = loads
            .into_iter()
            .map(|(t, load)| Corner {
                t,
                memory: whole(t) * whole(n_files) / whole(lambda_caches),
                load,
            })
            .collect();
        assert!(!corners.is_empty(), "a curve needs at least one corner");
        assert!(
            corners.windows(2).all(|w| w[0].t < w[1].t),
            "corner parameters must ascend"
        );
        BoundCurve {
            lambda_caches,
            n_files,
            source: source.to_string(),
            corners,
        }
    }

    pub fn lambda_caches(&self) -> u32 {
        self.lambda_caches
    }

    pub fn n_files(&self) -> u64 {
        self.n_files
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    /// Load at cache size `memory`, for `memory in [0, N]`: exact at
    /// corners, linear in between. Past the last corner the curve stays at
    /// its final value (curves that end early have already reached load 0
    /// or their floor).
    pub fn evaluate(&self, memory: &Rational) -> Result<Rational, ConverseError> {
        let max = whole(self.n_files);
        if *memory < whole(0) || *memory > max {
            return Err(ConverseError::MemoryOutOfRange {
                memory: memory.to_string(),
                max: max.to_string(),
            });
        }
        let last = self.corners.last().expect("non-empty");
        if *memory >= last.memory {
            return Ok(last.load.clone());
        }
        let mut i = 0;
        while self.corners[i + 1].memory < *memory {
            i += 1;
        }
        let (lo, hi) = (&self.corners[i], &self.corners[i + 1]);
        if *memory == lo.memory {
            return Ok(lo.load.clone());
        }
        let slope = (&hi.load - &lo.load) / (&hi.memory - &lo.memory);
        Ok(&lo.load + slope * (memory - &lo.memory))
    }

    /// CSV with exact numerator/denominator columns plus a decimal rendering.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,M_num,M_den,R_num,R_den,R_decimal\n");
        for c in &self.corners {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.t,
                c.memory.numer(),
                c.memory.denom(),
                c.load.numer(),
                c.load.denom(),
                decimal_string(&c.load),
            ));
        }
        out
    }

    /// JSON mirror of the CSV, with a provenance field per corner.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda_caches": self.lambda_caches,
            "n_files": self.n_files,
            "source": self.source,
            "corners": self.corners.iter().map(|c| serde_json::json!({
                "t": c.t,
                "memory": { "num": c.memory.numer().to_string(), "den": c.memory.denom().to_string() },
                "load": { "num": c.load.numer().to_string(), "den": c.load.denom().to_string() },
                "load_decimal": decimal_string(&c.load),
                "source": self.source,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Fixed-precision decimal rendering for reports; values stay exact
/// internally.
pub fn decimal_string(r: &Rational) -> String {
    format!("{:.6}", r.to_f64().unwrap_or(f64::NAN))
}

/// Optimal tradeoff of the combinatorial topology: corners at every
/// `t in [0, lambda]`.
pub fn comb_optimal_curve(profile: &CombProfile, n_files: u64) -> BoundCurve {
    let lambda_caches = profile.lambda_caches();
    BoundCurve::from_corner_loads(
        lambda_caches,
        n_files,
        COMB_SOURCE,
        (0..=lambda_caches).map(|t| (t, comb_optimal_load(profile, t))),
    )
}

/// Average-load lower bound over the level-uniform ensemble: corners at
/// `t in [0, lambda - level + 1]`.
pub fn level_avg_curve(lambda_caches: u32, level: u32, users: u64, n_files: u64) -> BoundCurve {
    BoundCurve::from_corner_loads(
        lambda_caches,
        n_files,
        LEVEL_AVG_SOURCE,
        (0..=(lambda_caches - level + 1))
            .map(|t| (t, level_avg_lower_bound(lambda_caches, level, users, t))),
    )
}

/// Average-load lower bound over the full ensemble: corners at
/// `t in [0, lambda]`.
pub fn full_avg_curve(lambda_caches: u32, users: u64, n_files: u64) -> BoundCurve {
    BoundCurve::from_corner_loads(
        lambda_caches,
        n_files,
        FULL_AVG_SOURCE,
        (0..=lambda_caches).map(|t| (t, full_avg_lower_bound(lambda_caches, users, t))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::ratio;

    #[test]
    fn corners_are_exact_and_midpoints_average() {
        let profile = CombProfile::new(4, vec![0, 0, 1, 0, 0]).unwrap();
        let curve = comb_optimal_curve(&profile, 6);
        assert_eq!(curve.corners().len(), 5);
        assert_eq!(curve.corners()[0].load, whole(6));
        assert_eq!(curve.corners()[2].load, ratio(1u32.into(), 6u32.into()));

        // Corner memory: t*N/lambda.
        assert_eq!(curve.corners()[2].memory, whole(3));
        assert_eq!(curve.evaluate(&whole(3)).unwrap(), ratio(1u32.into(), 6u32.into()));

        // Midway between t=0 (R=6) and t=1 (R=1): arithmetic mean.
        let mid = ratio(3u32.into(), 4u32.into());
        assert_eq!(
            curve.evaluate(&mid).unwrap(),
            ratio(7u32.into(), 2u32.into())
        );
    }

    #[test]
    fn comb_curve_is_convex_non_increasing() {
        let profile = CombProfile::new(5, vec![1, 1, 2, 0, 1, 0]).unwrap();
        let curve = comb_optimal_curve(&profile, 40);
        let corners = curve.corners();
        for w in corners.windows(2) {
            assert!(w[1].load <= w[0].load);
        }
        for w in corners.windows(3) {
            let s1 = (&w[1].load - &w[0].load) / (&w[1].memory - &w[0].memory);
            let s2 = (&w[2].load - &w[1].load) / (&w[2].memory - &w[1].memory);
            assert!(s1 <= s2, "slopes must not decrease");
        }
    }

    #[test]
    fn out_of_range_memory_is_rejected() {
        let curve = full_avg_curve(3, 2, 4);
        assert!(curve.evaluate(&whole(-1)).is_err());
        assert!(curve.evaluate(&whole(5)).is_err());
        assert!(curve.evaluate(&whole(4)).is_ok());
    }

    #[test]
    fn level_curve_ends_at_zero_and_extends_flat() {
        // lambda=3, level=2: corners t in [0,2], final load 0.
        let curve = level_avg_curve(3, 2, 2, 6);
        assert_eq!(curve.corners().len(), 3);
        assert_eq!(curve.corners()[2].load, whole(0));
        // Beyond the last corner (M=4) the bound stays 0 up to N=6.
        assert_eq!(curve.evaluate(&whole(5)).unwrap(), whole(0));
    }

    #[test]
    fn csv_layout() {
        let profile = CombProfile::new(2, vec![0, 1, 0]).unwrap();
        let curve = comb_optimal_curve(&profile, 2);
        let csv = curve.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,M_num,M_den,R_num,R_den,R_decimal"));
        assert_eq!(lines.next(), Some("0,0,1,2,1,2.000000"));
        assert_eq!(lines.next(), Some("1,1,1,1,2,0.500000"));
        assert_eq!(lines.next(), Some("2,2,1,0,1,0.000000"));
    }

    #[test]
    fn json_mirrors_provenance() {
        let curve = full_avg_curve(2, 1, 2);
        let v = curve.to_json_value();
        assert_eq!(v["source"], FULL_AVG_SOURCE);
        assert_eq!(v["corners"][0]["source"], FULL_AVG_SOURCE);
        assert_eq!(v["corners"][0]["load"]["num"], "1");
    }
}
