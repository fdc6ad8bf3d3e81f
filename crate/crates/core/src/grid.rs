use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `points` samples from `start` to `stop` inclusive.
pub fn time_grid(start: f64, stop: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
    }
    if !(start.is_finite() && stop.is_finite()) || start < 0.0 || stop <= start {
        return Err(Error::InvalidGrid(format!("need 0 <= start < stop, got [{start}, {stop}]")));
    }
    let n = (points - 1) as f64;
    let mut g: Vec<f64> = match spacing {
        Spacing::Linear => (0..points).map(|i| start + (stop - start) * i as f64 / n).collect(),
        Spacing::Log => {
            if start <= 0.0 {
                return Err(Error::InvalidGrid("log spacing needs start > 0".into()));
            }
            let (a, b) = (start.ln(), stop.ln());
            (0..points).map(|i| (a + (b - a) * i as f64 / n).exp()).collect()
        }
    };
    g[0] = start;
    g[points - 1] = stop;
    Ok(g)
}

/// Linear grid whose step does not exceed `max_step`, with at least `min_points`.
pub fn resolved_grid(start: f64, stop: f64, max_step: f64, min_points: usize) -> Result<Vec<f64>> {
    if !(max_step.is_finite() && max_step > 0.0) {
        return Err(Error::InvalidGrid(format!("step must be positive, got {max_step}")));
    }
    let n = ((stop - start) / max_step).ceil() as usize + 1;
    time_grid(start, stop, n.max(min_points), Spacing::Linear)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = time_grid(0.0, 1.0, 11, Spacing::Linear).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[3] - 0.3).abs() < 1e-15);
        let g = time_grid(1.0, 100.0, 3, Spacing::Log).unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert!(time_grid(0.0, 1.0, 1, Spacing::Linear).is_err());
        assert!(time_grid(2.0, 1.0, 5, Spacing::Linear).is_err());
        assert!(time_grid(0.0, 1.0, 5, Spacing::Log).is_err());
        assert!(time_grid(-1.0, 1.0, 5, Spacing::Linear).is_err());
        let g = resolved_grid(10.0, 50.0, 0.1, 10).unwrap();
        assert!(g.windows(2).all(|w| w[1] - w[0] <= 0.1 + 1e-12));
    }
}
