//! Named-channel time series, their CSV form, and pointwise comparison.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Rows of channel values on strictly increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub channels: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(channels: impl IntoIterator<Item = S>) -> Self {
        Self {
            channels: channels.into_iter().map(Into::into).collect(),
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, row: Vec<f64>) -> Result<()> {
        if row.len() != self.channels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.channels.len(),
                found: row.len(),
            });
        }
        if self.times.last().is_some_and(|&last| t <= last) {
            return Err(Error::InvalidParameter(format!("time {t} does not increase")));
        }
        self.times.push(t);
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channels
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.channel_index(name)?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Largest value of a channel and the time it occurs.
    pub fn max_of(&self, name: &str) -> Result<(f64, f64)> {
        let k = self.channel_index(name)?;
        Ok(self
            .times
            .iter()
            .zip(&self.rows)
            .map(|(&t, r)| (r[k], t))
            .fold((f64::NEG_INFINITY, f64::NAN), |a, b| if b.0 > a.0 { b } else { a }))
    }

    pub fn window(&self) -> Option<(f64, f64)> {
        Some((*self.times.first()?, *self.times.last()?))
    }

    /// Linear interpolation of channel `k`; `None` outside the sampled window.
    pub fn interpolate(&self, k: usize, t: f64) -> Option<f64> {
        let (a, b) = self.window()?;
        if t < a || t > b {
            return None;
        }
        let i = self.times.partition_point(|&x| x <= t);
        if i == self.times.len() {
            return Some(self.rows[i - 1][k]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (y0, y1) = (self.rows[i - 1][k], self.rows[i][k]);
        Some(y0 + (y1 - y0) * (t - t0) / (t1 - t0))
    }

    /// Appends the channels of `other`, which must share the time grid.
    pub fn join(&mut self, other: &TimeSeries) -> Result<()> {
        if other.times != self.times {
            return Err(Error::InvalidParameter("joined series need identical times".into()));
        }
        self.channels.extend(other.channels.iter().cloned());
        for (r, o) in self.rows.iter_mut().zip(&other.rows) {
            r.extend_from_slice(o);
        }
        Ok(())
    }

    /// CSV with a `t` column first and 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for c in &self.channels {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (t, row) in self.times.iter().zip(&self.rows) {
            write!(s, "{t:.16e}").unwrap();
            for v in row {
                write!(s, ",{v:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    /// Parses the output of [`TimeSeries::to_csv`]. `path` only labels errors.
    pub fn read_csv<R: BufRead>(r: R, path: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_string(),
            line,
            msg,
        };
        let mut lines = r.lines();
        let header = match lines.next() {
            Some(h) => h.map_err(|e| Error::Io {
                path: path.to_string(),
                source: e,
            })?,
            None => return Err(perr(1, "empty file".into())),
        };
        let mut cols = header.trim().split(',');
        if cols.next() != Some("t") {
            return Err(perr(1, "first column must be `t`".into()));
        }
        let mut ts = TimeSeries::new(cols.map(str::to_string));
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Io {
                path: path.to_string(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let vals = line
                .trim()
                .split(',')
                .map(|v| v.parse::<f64>().map_err(|e| perr(i + 2, format!("`{v}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let (t, row) = vals.split_first().ok_or_else(|| perr(i + 2, "empty row".into()))?;
            ts.push(*t, row.to_vec()).map_err(|e| perr(i + 2, e.to_string()))?;
        }
        Ok(ts)
    }
}

/// Largest difference on one channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelDifference {
    pub channel: String,
    pub max_abs: f64,
    pub at: f64,
}

/// Pointwise differences of two series on the sample times of `a` inside the
/// overlap of both windows, with `b` linearly interpolated.
pub fn compare(a: &TimeSeries, b: &TimeSeries, channels: &[&str]) -> Result<Vec<ChannelDifference>> {
    let (wa, wb) = (
        a.window().ok_or(Error::DisjointWindows)?,
        b.window().ok_or(Error::DisjointWindows)?,
    );
    let (lo, hi) = (wa.0.max(wb.0), wa.1.min(wb.1));
    if lo > hi {
        return Err(Error::DisjointWindows);
    }
    channels
        .iter()
        .map(|&name| {
            let (ka, kb) = (a.channel_index(name)?, b.channel_index(name)?);
            let mut best = ChannelDifference {
                channel: name.to_string(),
                max_abs: 0.0,
                at: lo,
            };
            for (t, row) in a.times.iter().zip(&a.rows) {
                if *t < lo || *t > hi {
                    continue;
                }
                let Some(vb) = b.interpolate(kb, *t) else { continue };
                let d = (row[ka] - vb).abs();
                if d > best.max_abs {
                    best.max_abs = d;
                    best.at = *t;
                }
            }
            Ok(best)
        })
        .collect()
}
