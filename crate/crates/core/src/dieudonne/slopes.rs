//! Newton polygons with exact rational slopes.

use crate::padic::RingError;
use num_integer::Integer;

/// A reduced fraction `num/den`, `den >= 1`.
pub type Slope = (i64, i64);

pub fn reduce_slope(num: i64, den: i64) -> Slope {
    assert!(den != 0);
    let g = num.gcd(&den);
    let (mut n, mut d) = (num / g, den / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    (n, d)
}

pub fn slope_value(s: Slope) -> f64 {
    s.0 as f64 / s.1 as f64
}

/// Lower convex hull slopes of the points `(i, vals[i])`, one entry per
/// unit of horizontal length, ascending. `vals[i]` is the valuation of
/// the `T^(n-i)` coefficient of a monic polynomial; `None` means "at
/// least the working precision". The leading entry must be `Some(0)` and
/// the constant term must be determined, otherwise the polygon is not
/// pinned down and the call fails.
pub fn newton_polygon_slopes(vals: &[Option<u32>]) -> Result<Vec<Slope>, RingError> {
    let n = vals.len() - 1;
    if vals[0] != Some(0) {
        return Err(RingError::Shape("polynomial is not monic".into()));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    if vals[n].is_none() {
        return Err(RingError::Precision(
            "constant term vanishes to working precision".into(),
        ));
    }
    let pts: Vec<(i64, i64)> = vals
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i as i64, v as i64)))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &c in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // pop b when it lies on or above the segment a -> c
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let run = w[1].0 - w[0].0;
        let rise = w[1].1 - w[0].1;
        let s = reduce_slope(rise, run);
        for _ in 0..run {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_segment() {
        // T^2 - p: vals (0, inf, 1) -> slope 1/2 twice
        let s = newton_polygon_slopes(&[Some(0), None, Some(1)]).unwrap();
        assert_eq!(s, vec![(1, 2), (1, 2)]);
    }

    #[test]
    fn breaks_and_interior_points_above() {
        // vertices (0,0), (1,0), (3,2): slopes 0, 1, 1; the point (2,3)
        // sits above the hull and must not bend it
        let s = newton_polygon_slopes(&[Some(0), Some(0), Some(3), Some(2)]).unwrap();
        assert_eq!(s, vec![(0, 1), (1, 1), (1, 1)]);
    }

    #[test]
    fn collinear_points_merge() {
        let s = newton_polygon_slopes(&[Some(0), Some(1), Some(2)]).unwrap();
        assert_eq!(s, vec![(1, 1), (1, 1)]);
    }

    #[test]
    fn undetermined_constant_term_is_an_error() {
        assert!(newton_polygon_slopes(&[Some(0), Some(1), None]).is_err());
    }
}
