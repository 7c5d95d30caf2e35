use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T> {
    pub name: String,
    pub values: Vec<T>,
}

impl<T> Channel<T> {
    pub fn new(name: impl Into<String>, values: Vec<T>) -> Self {
        Self { name: name.into(), values }
    }
}

/// Uniformly sampled named channels sharing one time grid.
///
/// Invariants: `dt > 0`, all channels have `len` samples, names are unique.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<T> {
    start: T,
    dt: T,
    len: usize,
    channels: Vec<Channel<T>>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(start: T, dt: T, channels: Vec<Channel<T>>) -> Result<Self> {
        let len = channels.first().map_or(0, |c| c.values.len());
        let mut s = Self::empty(start, dt, len)?;
        for c in channels {
            s.push_channel(c)?;
        }
        Ok(s)
    }

    /// A time grid of `len` samples without channels.
    pub fn empty(start: T, dt: T, len: usize) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::TimeSeries(format!("sampling interval must be positive, got {dt}")));
        }
        if !start.is_finite() {
            return Err(Error::TimeSeries("start time is not finite".into()));
        }
        Ok(Self { start, dt, len, channels: Vec::new() })
    }

    pub fn push_channel(&mut self, channel: Channel<T>) -> Result<()> {
        if channel.values.len() != self.len {
            return Err(Error::TimeSeries(format!(
                "channel `{}` has {} samples, expected {}",
                channel.name,
                channel.values.len(),
                self.len
            )));
        }
        if self.channels.iter().any(|c| c.name == channel.name) {
            return Err(Error::TimeSeries(format!("duplicate channel `{}`", channel.name)));
        }
        if let Some(k) = channel.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::TimeSeries(format!("channel `{}` sample {k} is not finite", channel.name)));
        }
        self.channels.push(channel);
        Ok(())
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn time(&self, k: usize) -> T {
        self.start + self.dt * T::from(k).expect("sample index")
    }

    pub fn channel(&self, name: &str) -> Option<&[T]> {
        self.channels.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn channels(&self) -> &[Channel<T>] {
        &self.channels
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|c| c.name.as_str())
    }
}

/// Sampled outputs, `values[channel][sample]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub labels: Vec<String>,
    pub values: Vec<Vec<T>>,
    pub state_labels: Vec<String>,
    /// `states[state][sample]`, when recorded.
    pub states: Option<Vec<Vec<T>>>,
}

impl<T: Copy> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self, label: &str) -> Option<&[T]> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i].as_slice())
    }

    /// Output vector at sample `k`.
    pub fn sample(&self, k: usize) -> Vec<T> {
        self.values.iter().map(|v| v[k]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_channels() {
        let err = TimeSeries::new(0.0, 1.0, vec![Channel::new("a", vec![1.0, 2.0]), Channel::new("b", vec![1.0])]);
        assert!(matches!(err, Err(Error::TimeSeries(_))));
    }

    #[test]
    fn rejects_duplicate_names_and_bad_dt() {
        assert!(TimeSeries::new(0.0, 1.0, vec![Channel::new("a", vec![1.0]), Channel::new("a", vec![2.0])]).is_err());
        assert!(TimeSeries::<f64>::empty(0.0, 0.0, 3).is_err());
        assert!(TimeSeries::<f64>::empty(0.0, -1.0, 3).is_err());
        assert!(TimeSeries::new(0.0, 1.0, vec![Channel::new("a", vec![f64::NAN])]).is_err());
    }

    #[test]
    fn time_grid() {
        let s = TimeSeries::new(100.0, 600.0, vec![Channel::new("a", vec![0.0; 4])]).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.time(3), 1900.0);
        assert_eq!(s.channel("a").unwrap().len(), 4);
        assert!(s.channel("b").is_none());
    }
}
