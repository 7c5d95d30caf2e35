//! Error statistics of simulated against measured series.

use std::fmt::Write as _;

use thermocircuit::{Series, Trajectory};

use crate::error::CliError;

pub const DEFAULT_BIN_WIDTH: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramBin {
    /// Bin is `[lower, lower + width)`.
    pub lower: f64,
    pub count: usize,
}

/// Statistics of `simulated − measured` over the overlapping samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonStats {
    pub count: usize,
    pub mean: f64,
    /// Population form, divides by the sample count.
    pub std_dev: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub bin_width: f64,
    /// Contiguous bins from the one holding `min` to the one holding `max`.
    pub histogram: Vec<HistogramBin>,
}

/// Linear interpolation between order statistics.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl ComparisonStats {
    /// `errors` must be non-empty and `bin_width` positive.
    pub fn from_errors(errors: &[f64], bin_width: f64) -> Result<Self, CliError> {
        if errors.is_empty() {
            return Err(CliError::input("compare", None, "no samples to compare"));
        }
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(CliError::Usage(format!("histogram bin width must be positive, got {bin_width}")));
        }
        let n = errors.len() as f64;
        let mean = errors.iter().sum::<f64>() / n;
        let std_dev = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n).sqrt();
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        let bin = |e: f64| (e / bin_width).floor() as i64;
        let (first, last) = (bin(sorted[0]), bin(sorted[sorted.len() - 1]));
        let mut histogram: Vec<HistogramBin> =
            (first..=last).map(|b| HistogramBin { lower: b as f64 * bin_width, count: 0 }).collect();
        for &e in &sorted {
            histogram[(bin(e) - first) as usize].count += 1;
        }
        Ok(Self {
            count: errors.len(),
            mean,
            std_dev,
            min: sorted[0],
            q25: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q75: quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
            bin_width,
            histogram,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelComparison {
    pub simulated: String,
    pub measured: String,
    pub stats: ComparisonStats,
}

/// Pairs each output with the measured channel of the same name, or with a
/// channel named after any member of a merged label `a=b`.
pub fn default_channel_map(outputs: &[String], measured: &Series) -> Vec<(String, String)> {
    outputs
        .iter()
        .filter_map(|o| {
            let names: Vec<&str> = std::iter::once(o.as_str()).chain(o.split('=')).collect();
            names.into_iter().find(|n| measured.channel(n).is_some()).map(|m| (o.clone(), m.to_string()))
        })
        .collect()
}

/// Aligns the two grids and compares each mapped channel over the common
/// window. Grids must share the step and be offset by whole steps.
pub fn compare(
    traj: &Trajectory<f64>,
    measured: &Series,
    map: &[(String, String)],
    bin_width: f64,
) -> Result<Vec<ChannelComparison>, CliError> {
    let fail = |m: String| CliError::input("compare", None, m);
    if traj.is_empty() {
        return Err(fail("empty trajectory".into()));
    }
    if map.is_empty() {
        return Err(fail("no measured channel matches an output".into()));
    }
    let dt = if traj.len() > 1 { traj.times[1] - traj.times[0] } else { measured.dt() };
    if traj.len() > 1 && measured.len() > 1 && (dt - measured.dt()).abs() > 1e-9 * dt {
        return Err(fail(format!("sampling steps differ: simulated {dt} s, measured {} s", measured.dt())));
    }
    let shift = (measured.start() - traj.times[0]) / dt;
    if (shift - shift.round()).abs() > 1e-6 {
        return Err(fail(format!("grids are offset by {} s, not a whole number of steps", shift * dt)));
    }
    // measured sample m aligns with simulated sample m + shift
    let shift = shift.round() as i64;
    let lo = shift.max(0);
    let hi = (shift + measured.len() as i64).min(traj.len() as i64);
    if lo >= hi {
        return Err(fail("simulated and measured series do not overlap".into()));
    }
    map.iter()
        .map(|(sim, meas)| {
            let s = traj.series(sim).ok_or_else(|| fail(format!("no simulated output `{sim}`")))?;
            let m = measured.channel(meas).ok_or_else(|| fail(format!("no measured channel `{meas}`")))?;
            let errors: Vec<f64> = (lo..hi).map(|k| s[k as usize] - m[(k - shift) as usize]).collect();
            Ok(ChannelComparison {
                simulated: sim.clone(),
                measured: meas.clone(),
                stats: ComparisonStats::from_errors(&errors, bin_width)?,
            })
        })
        .collect()
}

/// One row per channel: count, mean, standard deviation, min, quartiles, max.
pub fn stats_table(results: &[ChannelComparison]) -> String {
    let mut out = String::from("output,measured,count,mean,std_dev,min,q25,median,q75,max\n");
    for r in results {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.simulated, r.measured, s.count, s.mean, s.std_dev, s.min, s.q25, s.median, s.q75, s.max
        );
    }
    out
}

/// Histogram rows `output,lower,upper,count`.
pub fn histogram_table(results: &[ChannelComparison]) -> String {
    let mut out = String::from("output,lower,upper,count\n");
    for r in results {
        for b in &r.stats.histogram {
            let _ = writeln!(out, "{},{},{},{}", r.simulated, b.lower, b.lower + r.stats.bin_width, b.count);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use thermocircuit::Channel;

    fn traj(values: Vec<f64>) -> Trajectory<f64> {
        Trajectory {
            times: (0..values.len()).map(|k| 600.0 * k as f64).collect(),
            labels: vec!["y".into()],
            values: vec![values],
            state_labels: vec![],
            states: None,
        }
    }

    fn measured(start: f64, values: Vec<f64>) -> Series {
        Series::new(start, 600.0, vec![Channel::new("y", values)]).unwrap()
    }

    fn map() -> Vec<(String, String)> {
        vec![("y".into(), "y".into())]
    }

    #[test]
    fn identical_series_give_zero_stats() {
        let v = vec![20.0, 21.5, 19.0, 22.0];
        let r = compare(&traj(v.clone()), &measured(0.0, v), &map(), DEFAULT_BIN_WIDTH).unwrap();
        let s = &r[0].stats;
        assert_eq!((s.mean, s.std_dev, s.min, s.max, s.median), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(s.histogram, vec![HistogramBin { lower: 0.0, count: 4 }]);
    }

    #[test]
    fn constant_offset() {
        let m = vec![20.0, 21.0, 19.0];
        let sim = m.iter().map(|v| v + 0.5).collect();
        let s = &compare(&traj(sim), &measured(0.0, m), &map(), DEFAULT_BIN_WIDTH).unwrap()[0].stats;
        assert!((s.mean - 0.5).abs() < 1e-12);
        assert!(s.std_dev < 1e-12);
    }

    #[test]
    fn alternating_unit_errors_have_unit_population_deviation() {
        let m = vec![20.0; 6];
        let sim = (0..6).map(|k| if k % 2 == 0 { 21.0 } else { 19.0 }).collect();
        let s = &compare(&traj(sim), &measured(0.0, m), &map(), DEFAULT_BIN_WIDTH).unwrap()[0].stats;
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.std_dev, 1.0);
        assert_eq!((s.min, s.max), (-1.0, 1.0));
        assert_eq!(s.histogram.len(), 21);
        assert_eq!(s.histogram.iter().map(|b| b.count).sum::<usize>(), 6);
    }

    #[test]
    fn overlapping_window_only() {
        let sim = vec![1.0, 2.0, 3.0, 4.0];
        // measured starts two steps later: samples 2, 3 overlap
        let r = compare(&traj(sim), &measured(1200.0, vec![3.0, 4.0, 9.0]), &map(), 0.1).unwrap();
        assert_eq!(r[0].stats.count, 2);
        assert_eq!(r[0].stats.max, 0.0);
    }

    #[test]
    fn disjoint_windows_fail() {
        assert!(compare(&traj(vec![1.0, 2.0]), &measured(6000.0, vec![1.0]), &map(), 0.1).is_err());
    }

    #[test]
    fn quartiles_interpolate() {
        let s = ComparisonStats::from_errors(&[4.0, 1.0, 3.0, 2.0], 1.0).unwrap();
        assert_eq!((s.q25, s.median, s.q75), (1.75, 2.5, 3.25));
    }

    #[test]
    fn merged_labels_match_members() {
        let m = measured(0.0, vec![1.0]);
        assert_eq!(default_channel_map(&["x=y".into(), "z".into()], &m), vec![("x=y".to_string(), "y".to_string())]);
    }
}
