use crate::error::{Error, Result};

/// Cycle life of the battery as a function of depth of discharge.
///
/// Knots are `(dod_percent, cycles)` pairs. Between knots the curve is
/// linear; below the first knot it is held flat.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleLifeCurve {
    knots: Vec<(f64, f64)>,
}

impl Default for CycleLifeCurve {
    fn default() -> Self {
        Self::new(vec![
            (10.0, 14500.0),
            (20.0, 12000.0),
            (30.0, 9600.0),
            (40.0, 7500.0),
            (50.0, 5800.0),
            (60.0, 4600.0),
            (70.0, 3400.0),
            (80.0, 3000.0),
            (90.0, 2200.0),
            (100.0, 2000.0),
        ])
        .expect("default cycle-life knots are valid")
    }
}

impl CycleLifeCurve {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Domain("cycle-life curve needs at least 2 knots".into()));
        }
        for &(dod, cycles) in &knots {
            if !(dod > 0.0 && dod <= 100.0) {
                return Err(Error::Domain(format!("knot DOD {dod}% outside (0, 100]")));
            }
            if !(cycles > 0.0 && cycles.is_finite()) {
                return Err(Error::Domain(format!("knot cycles {cycles} must be positive")));
            }
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Domain("knot DODs must be strictly increasing".into()));
            }
            if w[1].1 >= w[0].1 {
                return Err(Error::Domain("knot cycles must be strictly decreasing".into()));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Cycles to failure at depth `dod` (a fraction in (0, 1]).
    pub fn cycle_life_at(&self, dod: f64) -> Result<f64> {
        if !(dod > 0.0 && dod <= 1.0) {
            return Err(Error::Domain(format!("DOD {dod} outside (0, 1]")));
        }
        let x = dod * 100.0;
        let (x0, y0) = self.knots[0];
        if x <= x0 {
            return Ok(y0);
        }
        for w in self.knots.windows(2) {
            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
            if x <= xb {
                if x == xb {
                    return Ok(yb);
                }
                return Ok(ya + (yb - ya) * (x - xa) / (xb - xa));
            }
        }
        // past the last knot (< 100%): hold the last value
        Ok(self.knots[self.knots.len() - 1].1)
    }
}
