use serde::Serialize;

use super::{find_rainbow_hamilton, SearchConfig, SearchStatus};
use crate::arith::{ser_ratio, to_f64, Ratio};
use crate::error::{Error, Result};
use crate::instances::random_system;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeRow {
    #[serde(serialize_with = "ser_ratio")]
    pub level: Ratio,
    pub trials: usize,
    pub found: usize,
    pub absent: usize,
    pub exhausted: usize,
    /// found / trials
    pub fraction: f64,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeTable {
    pub k: usize,
    pub n: usize,
    pub rows: Vec<ProbeRow>,
}

/// Fraction of random systems at each degree level that carry a rainbow
/// Hamilton cycle. Trial j at every level uses seed `seed + j`.
pub fn threshold_probe(
    k: usize,
    n: usize,
    grid: &[Ratio],
    trials: usize,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<ProbeTable> {
    if n <= k {
        return Err(Error::InvalidParameter(format!("probe needs n > k, got n={n}, k={k}")));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for level in grid {
        let seeds: Vec<u64> = (0..trials as u64).map(|j| seed.wrapping_add(j)).collect();
        let (mut found, mut absent, mut exhausted) = (0, 0, 0);
        for &s in &seeds {
            let sys = random_system(n, k, level, s)?;
            let run = SearchConfig { seed: s, ..cfg.clone() };
            match find_rainbow_hamilton(&sys, &run)?.status {
                SearchStatus::Found => found += 1,
                SearchStatus::Absent => absent += 1,
                SearchStatus::Exhausted => exhausted += 1,
            }
        }
        log::info!("probe level {:.4}: {found}/{trials}", to_f64(level));
        rows.push(ProbeRow {
            level: level.clone(),
            trials,
            found,
            absent,
            exhausted,
            fraction: if trials == 0 { 0.0 } else { found as f64 / trials as f64 },
            seeds,
        });
    }
    Ok(ProbeTable { k, n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn extremes() {
        let t = threshold_probe(3, 6, &[int(0), int(1)], 3, 1, &SearchConfig::default()).unwrap();
        assert_eq!(t.rows[0].fraction, 0.0);
        assert_eq!(t.rows[1].fraction, 1.0);
    }
}
