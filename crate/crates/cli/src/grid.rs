//! Retransmission-factor grid specification, `start:stop:points[:log]`.

use std::str::FromStr;

use anyhow::{bail, ensure};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGrid {
    pub start: f64,
    pub stop: f64,
    pub points: u32,
    pub log: bool,
}

impl QGrid {
    pub fn single(q: f64) -> Self {
        QGrid { start: q, stop: q, points: 1, log: false }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let m = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / m;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

impl FromStr for QGrid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let log = match parts.len() {
            3 => false,
            4 if parts[3] == "log" => true,
            4 => bail!("grid suffix must be \"log\", got {:?}", parts[3]),
            _ => bail!("grid must be start:stop:points[:log], got {s:?}"),
        };
        let start: f64 = parts[0].parse()?;
        let stop: f64 = parts[1].parse()?;
        let points: u32 = parts[2].parse()?;
        ensure!(points >= 1, "grid needs at least one point");
        ensure!(
            points == 1 || start < stop,
            "multi-point grid needs start < stop"
        );
        ensure!(
            start > 0.0 && stop < 1.0,
            "retransmission factors must lie strictly inside (0, 1)"
        );
        Ok(QGrid { start, stop, points, log })
    }
}
