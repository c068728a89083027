//! Split evaluation: left-to-right cumulative scan with both missing-bin
//! placements.

use serde::{Deserialize, Serialize};

use super::histogram::{BinStats, Histogram};

/// Split quality for given left/right gradient sums.
///
/// gain = 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - (G_L+G_R)^2/(H_L+H_R+lambda)] - gamma
pub fn split_gain(left: BinStats, right: BinStats, lambda: f64, gamma: f64) -> f64 {
    let term = |s: &BinStats| s.g * s.g / (s.h + lambda);
    let parent = BinStats {
        count: left.count + right.count,
        g: left.g + right.g,
        h: left.h + right.h,
    };
    0.5 * (term(&left) + term(&right) - term(&parent)) - gamma
}

/// Optimal leaf weight for gradient sums (before learning-rate scaling).
pub fn leaf_weight(stats: BinStats, lambda: f64) -> f64 {
    -stats.g / (stats.h + lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCandidate {
    pub field_id: u32,
    /// Split at the upper boundary of this bin: value bins `<= bin_boundary`
    /// go left.
    pub bin_boundary: u8,
    pub missing_goes_left: bool,
    pub gain: f64,
    pub left_stats: BinStats,
    pub right_stats: BinStats,
}

impl BinStats {
    fn add(&mut self, other: &BinStats) {
        self.count += other.count;
        self.g += other.g;
        self.h += other.h;
    }

    fn minus(&self, other: &BinStats) -> BinStats {
        BinStats {
            count: self.count - other.count,
            g: self.g - other.g,
            h: self.h - other.h,
        }
    }
}

/// Best split over all fields, or `None` when no candidate improves on the
/// complexity cost.
///
/// Per field the scan starts with an empty left bucket and moves the split
/// point right one value bin at a time; the missing bin is tried on both
/// sides. Ties break to the lower field id, then lower boundary, then
/// missing-right before missing-left.
pub fn find_best_split(
    histograms: &[Histogram],
    parent_stats: BinStats,
    lambda: f64,
    gamma: f64,
) -> Option<SplitCandidate> {
    let mut best: Option<SplitCandidate> = None;
    for hist in histograms {
        let n_bins = hist.bins.len();
        if n_bins < 2 {
            continue;
        }
        let missing = &hist.bins[n_bins - 1];
        for missing_goes_left in [false, true] {
            let mut left = BinStats::default();
            if missing_goes_left {
                left.add(missing);
            }
            // value bins only; the last boundary separates missing from the rest
            for boundary in 0..n_bins - 1 {
                left.add(&hist.bins[boundary]);
                let right = parent_stats.minus(&left);
                let gain = split_gain(left, right, lambda, gamma);
                if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                    best = Some(SplitCandidate {
                        field_id: hist.field_id,
                        bin_boundary: boundary as u8,
                        missing_goes_left,
                        gain,
                        left_stats: left,
                        right_stats: right,
                    });
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(field_id: u32, bins: &[(u64, f64, f64)]) -> Histogram {
        Histogram {
            field_id,
            bins: bins.iter().map(|&(count, g, h)| BinStats { count, g, h }).collect(),
        }
    }

    #[test]
    fn single_occupied_bin_yields_no_split() {
        let h = hist(0, &[(10, 5.0, 10.0), (0, 0.0, 0.0), (0, 0.0, 0.0)]);
        let parent = h.totals();
        assert_eq!(find_best_split(&[h], parent, 1.0, 0.0), None);
    }

    #[test]
    fn separable_bins_split_at_the_boundary() {
        // negative gradients in bin 0, positive in bin 1
        let h = hist(0, &[(5, -5.0, 5.0), (5, 5.0, 5.0), (0, 0.0, 0.0)]);
        let parent = h.totals();
        let s = find_best_split(&[h], parent, 1.0, 0.0).unwrap();
        assert_eq!(s.bin_boundary, 0);
        assert!(s.gain > 0.0);
        assert_eq!(s.left_stats.count + s.right_stats.count, parent.count);
        assert!((s.left_stats.g + s.right_stats.g - parent.g).abs() < 1e-12);
    }

    #[test]
    fn missing_direction_can_win() {
        // missing-bin records carry the positive gradients
        let h = hist(0, &[(4, -4.0, 4.0), (4, -4.0, 4.0), (4, 8.0, 4.0)]);
        let parent = h.totals();
        let s = find_best_split(&[h], parent, 1.0, 0.0).unwrap();
        assert!(!s.missing_goes_left);
        assert_eq!(s.bin_boundary, 1); // all value bins left, missing right
    }

    #[test]
    fn gamma_suppresses_weak_splits() {
        let h = hist(0, &[(5, -0.5, 5.0), (5, 0.5, 5.0), (0, 0.0, 0.0)]);
        let parent = h.totals();
        assert!(find_best_split(&[h.clone()], parent, 1.0, 0.0).is_some());
        assert_eq!(find_best_split(&[h], parent, 1.0, 10.0), None);
    }

    #[test]
    fn ties_break_to_lower_field_and_boundary() {
        let a = hist(0, &[(5, -5.0, 5.0), (5, 5.0, 5.0), (0, 0.0, 0.0)]);
        let b = hist(1, &[(5, -5.0, 5.0), (5, 5.0, 5.0), (0, 0.0, 0.0)]);
        let parent = a.totals();
        let s = find_best_split(&[a, b], parent, 1.0, 0.0).unwrap();
        assert_eq!(s.field_id, 0);
    }
}
