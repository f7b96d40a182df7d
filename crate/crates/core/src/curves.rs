//! Concave piecewise-linear detection curves.
//!
//! A curve maps a nonnegative budget to a detection rate in `[0, 1]`. Curves
//! are nondecreasing and concave (diminishing returns), and once a curve
//! reaches rate 1 it stays there. They are usually written down as the
//! pointwise minimum of a few affine lines — the steepest line is active at
//! low budgets and successively shallower lines take over — with the whole
//! envelope clamped at rate 1.

use crate::error::{Error, Result};

/// Tolerance for treating two adjacent segment slopes as equal (colinear
/// breakpoints are merged at construction).
pub const SLOPE_MERGE_TOL: f64 = 1e-12;

/// Slack allowed past the domain end when evaluating, so that mesh points
/// reconstructed from `step * index` arithmetic never fall out of domain.
const DOMAIN_EVAL_SLACK: f64 = 1e-9;

/// One affine piece `rate = slope * budget + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineLine {
    pub slope: f64,
    pub intercept: f64,
}

impl AffineLine {
    /// Builds a line, rejecting negative slope or intercept (detection can
    /// neither decrease with budget nor start below zero).
    pub fn new(slope: f64, intercept: f64) -> Result<Self> {
        if !(slope >= 0.0) || !(intercept >= 0.0) {
            return Err(Error::InvalidLine { slope, intercept });
        }
        Ok(AffineLine { slope, intercept })
    }

    fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// One linear segment of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub slope: f64,
}

/// A concave, nondecreasing piecewise-linear detection curve on
/// `[0, domain_max]`, stored in canonical breakpoint form.
///
/// Canonical form means: the first breakpoint sits at budget 0, budgets
/// strictly increase, the last breakpoint sits at the domain end, values are
/// nondecreasing within `[0, 1]`, and segment slopes strictly decrease (no
/// two adjacent segments are colinear).
#[derive(Debug, Clone)]
pub struct PwlCurve {
    /// `(budget, rate)` pairs in canonical form.
    points: Vec<(f64, f64)>,
    /// Slope of each segment; `slopes.len() == points.len() - 1`.
    slopes: Vec<f64>,
    /// Whether the rate-1 ceiling truncated the line envelope strictly
    /// inside the domain (the raw envelope kept rising past 1).
    clamped: bool,
}

/// Equality is graph identity: curves with the same canonical breakpoints
/// describe the same detection behaviour however they were constructed.
/// Slopes are derived from the points, and `clamped` is a construction
/// note, so neither participates.
impl PartialEq for PwlCurve {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl PwlCurve {
    /// Lower envelope of `lines` on `[0, domain_max]`, clamped at rate 1.
    ///
    /// The clamp inserts a breakpoint where the envelope crosses 1; callers
    /// can ask [`PwlCurve::unit_clamped`] whether that happened and warn,
    /// since it usually means the line coefficients overshoot the physical
    /// range.
    pub fn from_lines(lines: &[AffineLine], domain_max: f64) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::EmptyLines);
        }
        for l in lines {
            // Re-check even for lines built via the constructor: literals
            // are cheap to write inline in tests and scenarios.
            if !(l.slope >= 0.0) || !(l.intercept >= 0.0) {
                return Err(Error::InvalidLine { slope: l.slope, intercept: l.intercept });
            }
        }
        if !(domain_max >= 0.0) {
            return Err(Error::NegativeBudget { budget: domain_max });
        }

        let raw_min = |x: f64| lines.iter().map(|l| l.at(x)).fold(f64::INFINITY, f64::min);

        // Candidate breakpoint abscissas: the domain ends, every pairwise
        // line crossing, and every crossing with the rate-1 ceiling. Between
        // consecutive candidates the envelope is a single affine piece.
        let mut xs = vec![0.0, domain_max];
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                if (a.slope - b.slope).abs() > 0.0 {
                    let x = (b.intercept - a.intercept) / (a.slope - b.slope);
                    if x > 0.0 && x < domain_max {
                        xs.push(x);
                    }
                }
            }
            if a.slope > 0.0 {
                let x = (1.0 - a.intercept) / a.slope;
                if x > 0.0 && x < domain_max {
                    xs.push(x);
                }
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("candidate abscissas are finite"));
        let dedupe_tol = 1e-15 * domain_max.max(1.0);
        xs.dedup_by(|a, b| (*a - *b).abs() <= dedupe_tol);

        let clamped = raw_min(domain_max) > 1.0 + SLOPE_MERGE_TOL;
        let points: Vec<(f64, f64)> = xs.into_iter().map(|x| (x, raw_min(x).min(1.0))).collect();
        let mut curve = Self::assemble(points, clamped)?;
        curve.clamped = clamped;
        Ok(curve)
    }

    /// Builds a curve directly from `(budget, rate)` breakpoints, validating
    /// the canonical-form rules. Colinear middles are merged.
    pub fn from_breakpoints(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::assemble(points, false)
    }

    fn assemble(points: Vec<(f64, f64)>, already_clamped: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidBreakpoints { detail: "no breakpoints".into() });
        }
        if points[0].0 != 0.0 {
            return Err(Error::InvalidBreakpoints {
                detail: format!("first breakpoint must sit at budget 0, got {}", points[0].0),
            });
        }
        if points[0].1 < 0.0 {
            return Err(Error::NegativeAtZero { value: points[0].1 });
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidBreakpoints {
                    detail: format!("budgets must strictly increase ({} then {})", w[0].0, w[1].0),
                });
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidBreakpoints {
                    detail: format!("rates must not decrease ({} then {})", w[0].1, w[1].1),
                });
            }
        }
        if let Some(&(b, v)) = points.iter().find(|&&(_, v)| !(v <= 1.0) || !v.is_finite()) {
            return Err(Error::InvalidBreakpoints {
                detail: format!("rate {v} at budget {b} is outside [0, 1]"),
            });
        }

        // Merge colinear middles. A middle point is dropped when the slopes
        // on either side agree within SLOPE_MERGE_TOL *and* the point lies on
        // the chord through its neighbours, so merging never moves the curve
        // by more than the tolerance.
        let mut kept: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for p in points {
            kept.push(p);
            while kept.len() >= 3 {
                let [a, b, c] = [kept[kept.len() - 3], kept[kept.len() - 2], kept[kept.len() - 1]];
                let s_ab = (b.1 - a.1) / (b.0 - a.0);
                let s_bc = (c.1 - b.1) / (c.0 - b.0);
                let chord = a.1 + (b.0 - a.0) * (c.1 - a.1) / (c.0 - a.0);
                if (s_ab - s_bc).abs() <= SLOPE_MERGE_TOL && (chord - b.1).abs() <= SLOPE_MERGE_TOL
                {
                    kept.remove(kept.len() - 2);
                } else {
                    break;
                }
            }
        }

        let slopes: Vec<f64> =
            kept.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        for w in slopes.windows(2) {
            if w[1] > w[0] + SLOPE_MERGE_TOL {
                return Err(Error::NotConcaveRepresentable {
                    detail: format!("segment slope rises from {} to {}", w[0], w[1]),
                });
            }
        }

        Ok(PwlCurve { points: kept, slopes, clamped: already_clamped })
    }

    /// Detection rate at budget `r`. Exact at breakpoints, linear between
    /// them; `r` must lie in `[0, domain_max]` (a hair of slack absorbs
    /// floating-point noise from mesh arithmetic).
    pub fn eval(&self, r: f64) -> Result<f64> {
        let dmax = self.domain_max();
        if !(r >= 0.0) || r > dmax + DOMAIN_EVAL_SLACK {
            return Err(Error::OutOfDomain { value: r, domain_max: dmax });
        }
        let r = r.min(dmax);
        // Index of the last breakpoint with budget <= r; r >= 0 = first
        // budget, so the subtraction cannot underflow.
        let idx = self.points.partition_point(|p| p.0 <= r) - 1;
        let (b, v) = self.points[idx];
        if idx == self.points.len() - 1 {
            return Ok(v);
        }
        Ok(v + (r - b) * self.slopes[idx])
    }

    /// Largest segment slope. Concavity puts it on the first segment; a
    /// constant curve reports 0.
    pub fn max_slope(&self) -> f64 {
        self.slopes.first().copied().unwrap_or(0.0).max(0.0)
    }

    /// End of the curve's budget domain.
    pub fn domain_max(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Canonical `(budget, rate)` breakpoints.
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// True when the rate-1 ceiling truncated a rising line envelope
    /// strictly inside the domain.
    pub fn unit_clamped(&self) -> bool {
        self.clamped
    }

    /// The curve's linear segments in budget order.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.points.windows(2).zip(&self.slopes).map(|(w, &slope)| Segment {
            start: w[0].0,
            end: w[1].0,
            slope,
        })
    }

    /// Slope of the segment strictly containing `r`. Breakpoints (including
    /// the domain ends) have no single slope and are rejected.
    pub fn slope_at_interior(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r >= self.domain_max() {
            return Err(Error::AtBreakpoint { position: r });
        }
        if self.points.iter().any(|p| (p.0 - r).abs() <= SLOPE_MERGE_TOL) {
            return Err(Error::AtBreakpoint { position: r });
        }
        let idx = self.points.partition_point(|p| p.0 < r) - 1;
        Ok(self.slopes[idx])
    }
}

/// Convenience for the common "identity" curve `rate = budget` on `[0, 1]`
/// (rate 1 exactly at the domain end). Used heavily by tests.
pub fn identity_curve(domain_max: f64) -> PwlCurve {
    let bp = if domain_max <= 1.0 {
        vec![(0.0, 0.0), (domain_max, domain_max)]
    } else {
        vec![(0.0, 0.0), (1.0, 1.0), (domain_max, 1.0)]
    };
    PwlCurve::from_breakpoints(bp).expect("identity breakpoints are canonical")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(coeffs: &[(f64, f64)]) -> Vec<AffineLine> {
        coeffs.iter().map(|&(s, b)| AffineLine::new(s, b).unwrap()).collect()
    }

    /// Dense-sampling oracle: the curve must match min(1, min of lines)
    /// everywhere, not just at its own breakpoints.
    fn assert_matches_envelope(curve: &PwlCurve, ls: &[AffineLine], samples: usize, tol: f64) {
        let dmax = curve.domain_max();
        for k in 0..=samples {
            let x = dmax * k as f64 / samples as f64;
            let want = ls.iter().map(|l| l.at(x)).fold(f64::INFINITY, f64::min).min(1.0);
            let got = curve.eval(x).unwrap();
            assert!((got - want).abs() <= tol, "envelope mismatch at {x}: got {got}, want {want}");
        }
    }

    fn assert_breakpoints_close(curve: &PwlCurve, want: &[(f64, f64)]) {
        let got = curve.breakpoints();
        assert_eq!(got.len(), want.len(), "breakpoint count: {got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!(
                (g.0 - w.0).abs() <= 1e-12 && (g.1 - w.1).abs() <= 1e-12,
                "{got:?} vs {want:?}"
            );
        }
    }

    // ---- construction from line envelopes ----

    #[test]
    fn two_line_inner_curve_breakpoints() {
        let ls = lines(&[(0.2, 0.0), (0.1, 0.4)]);
        let c = PwlCurve::from_lines(&ls, 10.0).unwrap();
        assert_breakpoints_close(&c, &[(0.0, 0.0), (4.0, 0.8), (6.0, 1.0), (10.0, 1.0)]);
        assert!(c.unit_clamped(), "envelope keeps rising past 1 inside the domain");
        assert_matches_envelope(&c, &ls, 10_000, 1e-12);
    }

    #[test]
    fn single_identity_line() {
        let ls = lines(&[(1.0, 0.0)]);
        let c = PwlCurve::from_lines(&ls, 1.0).unwrap();
        assert_breakpoints_close(&c, &[(0.0, 0.0), (1.0, 1.0)]);
        assert!(!c.unit_clamped(), "reaching 1 exactly at the domain end is not a clamp");
        assert_matches_envelope(&c, &ls, 10_000, 1e-12);
    }

    #[test]
    fn three_line_outer_curve_breakpoints() {
        let ls = lines(&[(0.3, 0.0), (0.1, 0.3), (0.05, 0.5)]);
        let c = PwlCurve::from_lines(&ls, 10.0).unwrap();
        assert_breakpoints_close(&c, &[(0.0, 0.0), (1.5, 0.45), (4.0, 0.7), (10.0, 1.0)]);
        assert_matches_envelope(&c, &ls, 10_000, 1e-12);
    }

    #[test]
    fn empty_line_set_is_rejected() {
        assert!(matches!(PwlCurve::from_lines(&[], 1.0), Err(Error::EmptyLines)));
    }

    #[test]
    fn negative_coefficients_are_rejected() {
        assert!(AffineLine::new(-0.1, 0.0).is_err());
        assert!(AffineLine::new(0.1, -0.2).is_err());
    }

    #[test]
    fn colinear_duplicate_lines_collapse() {
        // The shallower copy never becomes active; the envelope is one segment.
        let ls = lines(&[(0.5, 0.0), (0.5, 0.2)]);
        let c = PwlCurve::from_lines(&ls, 1.0).unwrap();
        assert_breakpoints_close(&c, &[(0.0, 0.0), (1.0, 0.5)]);
    }

    // ---- evaluation ----

    #[test]
    fn eval_is_exact_at_breakpoints() {
        let c = PwlCurve::from_lines(&lines(&[(0.2, 0.0), (0.1, 0.4)]), 10.0).unwrap();
        assert_eq!(c.eval(0.0).unwrap(), 0.0);
        assert!((c.eval(4.0).unwrap() - 0.8).abs() <= 1e-12);
        assert_eq!(c.eval(6.0).unwrap(), 1.0);
        assert_eq!(c.eval(10.0).unwrap(), 1.0);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let c = identity_curve(1.0);
        assert!(matches!(c.eval(-0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(c.eval(1.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(c.eval(f64::NAN), Err(Error::OutOfDomain { .. })));
        // Mesh arithmetic noise just past the domain end is absorbed.
        assert_eq!(c.eval(1.0 + 1e-12).unwrap(), 1.0);
    }

    // ---- slopes ----

    #[test]
    fn max_slope_comes_from_the_first_segment() {
        let c = PwlCurve::from_lines(&lines(&[(0.2, 0.0), (0.1, 0.4)]), 10.0).unwrap();
        assert_eq!(c.max_slope(), 0.2);
        assert_eq!(identity_curve(1.0).max_slope(), 1.0);
        let flat = PwlCurve::from_breakpoints(vec![(0.0, 0.3), (2.0, 0.3)]).unwrap();
        assert_eq!(flat.max_slope(), 0.0);
    }

    #[test]
    fn interior_slope_rejects_breakpoints() {
        let c = PwlCurve::from_lines(&lines(&[(0.2, 0.0), (0.1, 0.4)]), 10.0).unwrap();
        assert_eq!(c.slope_at_interior(2.0).unwrap(), 0.2);
        assert!((c.slope_at_interior(5.0).unwrap() - 0.1).abs() <= 1e-15);
        assert_eq!(c.slope_at_interior(8.0).unwrap(), 0.0);
        assert!(matches!(c.slope_at_interior(4.0), Err(Error::AtBreakpoint { .. })));
        assert!(matches!(c.slope_at_interior(0.0), Err(Error::AtBreakpoint { .. })));
        assert!(matches!(c.slope_at_interior(10.0), Err(Error::AtBreakpoint { .. })));
    }

    // ---- direct breakpoint input ----

    #[test]
    fn breakpoint_input_round_trips() {
        let bp = vec![(0.0, 0.0), (1.5, 0.45), (4.0, 0.7), (10.0, 1.0)];
        let c = PwlCurve::from_breakpoints(bp.clone()).unwrap();
        assert_eq!(c.breakpoints(), &bp[..]);
        assert!(!c.unit_clamped());
    }

    #[test]
    fn breakpoint_input_validation() {
        // Convexity (rising slopes) is not a detection curve.
        assert!(matches!(
            PwlCurve::from_breakpoints(vec![(0.0, 0.0), (1.0, 0.1), (2.0, 0.9)]),
            Err(Error::NotConcaveRepresentable { .. })
        ));
        // Budgets out of order.
        assert!(matches!(
            PwlCurve::from_breakpoints(vec![(0.0, 0.0), (2.0, 0.5), (1.0, 0.6)]),
            Err(Error::InvalidBreakpoints { .. })
        ));
        // Must start at budget 0.
        assert!(matches!(
            PwlCurve::from_breakpoints(vec![(0.5, 0.0), (1.0, 0.5)]),
            Err(Error::InvalidBreakpoints { .. })
        ));
        // Rates above the ceiling.
        assert!(matches!(
            PwlCurve::from_breakpoints(vec![(0.0, 0.0), (1.0, 1.2)]),
            Err(Error::InvalidBreakpoints { .. })
        ));
        // Decreasing rates.
        assert!(matches!(
            PwlCurve::from_breakpoints(vec![(0.0, 0.5), (1.0, 0.4)]),
            Err(Error::InvalidBreakpoints { .. })
        ));
        // Negative at zero gets its own error.
        assert!(matches!(
            PwlCurve::from_breakpoints(vec![(0.0, -0.1), (1.0, 0.4)]),
            Err(Error::NegativeAtZero { .. })
        ));
    }

    #[test]
    fn colinear_breakpoints_are_merged() {
        let c = PwlCurve::from_breakpoints(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 1.0), (3.0, 1.0)])
            .unwrap();
        assert_eq!(c.breakpoints(), &[(0.0, 0.0), (2.0, 1.0), (3.0, 1.0)]);
    }

    // ---- property: random envelopes stay canonical and faithful ----

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn random_envelopes_match_dense_sampling(
            raw in proptest::collection::vec((0.0f64..2.0, 0.0f64..0.5), 1..6),
            domain_max in 0.5f64..20.0,
        ) {
            let ls = lines(&raw.iter().map(|&(s, b)| (s, b)).collect::<Vec<_>>());
            let c = PwlCurve::from_lines(&ls, domain_max).unwrap();

            // Canonical form invariants.
            prop_assert_eq!(c.breakpoints()[0].0, 0.0);
            prop_assert_eq!(c.domain_max(), domain_max);
            for w in c.breakpoints().windows(2) {
                prop_assert!(w[1].0 > w[0].0);
                prop_assert!(w[1].1 >= w[0].1 - 1e-15);
            }
            for (b, v) in c.breakpoints() {
                prop_assert!(*v >= 0.0 && *v <= 1.0, "rate {} out of range at {}", v, b);
            }
            let slopes: Vec<f64> = c.segments().map(|s| s.slope).collect();
            for w in slopes.windows(2) {
                prop_assert!(w[1] <= w[0] + SLOPE_MERGE_TOL, "slopes rise: {:?}", slopes);
            }

            // Faithfulness to the raw envelope (colinear merging may move the
            // curve by up to the slope tolerance over a segment).
            let dmax = c.domain_max();
            for k in 0..=200 {
                let x = dmax * k as f64 / 200.0;
                let want = ls.iter().map(|l| l.at(x)).fold(f64::INFINITY, f64::min).min(1.0);
                let got = c.eval(x).unwrap();
                prop_assert!((got - want).abs() <= 2e-12, "at {}: {} vs {}", x, got, want);
            }

            // Monotone along the whole domain.
            let mut prev = -1.0;
            for k in 0..=200 {
                let x = dmax * k as f64 / 200.0;
                let v = c.eval(x).unwrap();
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
