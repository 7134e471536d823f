//! Per-channel intensity histograms and the independent-channel pixel
//! probability model.
//!
//! A pixel `(a, b, c)` has probability `n_a/N * n_b/N * n_c/N`, where `n_x`
//! counts occurrences of intensity `x` in that pixel's channel and `N` is the
//! pixel count. Because the model is a product of marginals, it also assigns
//! mass to tuples that never occur, so the mass over present tuples of a
//! multichannel image is generally below one.

use crate::ingest::PixelGrid;

pub const LEVELS: usize = 256;

/// Occurrence counts of each intensity in one channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelHistogram {
    counts: [u64; LEVELS],
    total: u64,
}

impl ChannelHistogram {
    pub fn counts(&self) -> &[u64; LEVELS] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, intensity: u8) -> u64 {
        self.counts[intensity as usize]
    }

    /// Marginal frequency `n_x / N`.
    pub fn frequency(&self, intensity: u8) -> f64 {
        self.counts[intensity as usize] as f64 / self.total as f64
    }
}

/// One histogram per channel, in channel order.
pub fn channel_histograms(grid: &PixelGrid) -> Vec<ChannelHistogram> {
    let mut hists = vec![
        ChannelHistogram {
            counts: [0; LEVELS],
            total: grid.pixel_count() as u64,
        };
        grid.channels()
    ];
    for pixel in grid.pixels() {
        for (hist, &v) in hists.iter_mut().zip(pixel) {
            hist.counts[v as usize] += 1;
        }
    }
    hists
}

/// Product of the per-channel marginal frequencies of `pixel`.
///
/// Returns 0 when any channel never takes the queried intensity.
///
/// # Panics
///
/// Panics if `pixel.len()` differs from the number of histograms.
pub fn pixel_probability(histograms: &[ChannelHistogram], pixel: &[u8]) -> f64 {
    assert_eq!(
        histograms.len(),
        pixel.len(),
        "tuple length must match the channel count"
    );
    histograms
        .iter()
        .zip(pixel)
        .map(|(h, &v)| h.frequency(v))
        .product()
}

/// A distinct intensity tuple present in an image.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEntry {
    pub tuple: Vec<u8>,
    pub probability: f64,
    /// Number of pixels carrying this tuple.
    pub multiplicity: u64,
    /// Lowest row-major pixel index carrying this tuple.
    pub first_pixel: usize,
}

/// Product-model probabilities of every distinct tuple present in an image,
/// ordered lexicographically by tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDistribution {
    channels: usize,
    entries: Vec<SupportEntry>,
}

impl SupportDistribution {
    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn entries(&self) -> &[SupportEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.probability).collect()
    }

    /// Sum of probabilities over present tuples; exactly 1 only for
    /// single-channel images (up to rounding).
    pub fn present_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    pub fn index_of(&self, tuple: &[u8]) -> Option<usize> {
        self.entries
            .binary_search_by(|e| e.tuple.as_slice().cmp(tuple))
            .ok()
    }
}

/// Big-endian packing preserves lexicographic tuple order.
fn pack(tuple: &[u8]) -> u32 {
    tuple.iter().fold(0u32, |acc, &v| (acc << 8) | v as u32)
}

/// Distinct present tuples with their product probabilities.
pub fn support_distribution(grid: &PixelGrid) -> SupportDistribution {
    support_with_pixel_index(grid).0
}

/// Like [`support_distribution`], also returning each pixel's entry index.
pub fn support_with_pixel_index(grid: &PixelGrid) -> (SupportDistribution, Vec<usize>) {
    let hists = channel_histograms(grid);
    let keys: Vec<u32> = grid.pixels().map(pack).collect();

    let mut distinct = keys.clone();
    distinct.sort_unstable();
    distinct.dedup();

    let mut pixel_entry = Vec::with_capacity(keys.len());
    // row-major visiting order fixes first_pixel
    let mut slots: Vec<Option<SupportEntry>> = vec![None; distinct.len()];
    for (index, (&key, pixel)) in keys.iter().zip(grid.pixels()).enumerate() {
        let slot = distinct
            .binary_search(&key)
            .expect("key collected from the same grid");
        pixel_entry.push(slot);
        match slots[slot].as_mut() {
            Some(entry) => entry.multiplicity += 1,
            None => {
                slots[slot] = Some(SupportEntry {
                    tuple: pixel.to_vec(),
                    probability: pixel_probability(&hists, pixel),
                    multiplicity: 1,
                    first_pixel: index,
                })
            }
        }
    }
    let entries = slots.into_iter().flatten().collect();

    (
        SupportDistribution {
            channels: grid.channels(),
            entries,
        },
        pixel_entry,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(w: usize, h: usize, c: usize, data: &[u8]) -> PixelGrid {
        PixelGrid::new(w, h, c, data.to_vec()).unwrap()
    }

    #[test]
    fn histogram_counts() {
        let hs = channel_histograms(&grid(2, 2, 1, &[10, 10, 20, 30]));
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].count(10), 2);
        assert_eq!(hs[0].count(20), 1);
        assert_eq!(hs[0].count(30), 1);
        assert_eq!(hs[0].total(), 4);

        let hs = channel_histograms(&grid(1, 2, 3, &[0, 0, 0, 255, 255, 255]));
        assert_eq!(hs.len(), 3);
        for h in &hs {
            assert_eq!(h.count(0), 1);
            assert_eq!(h.count(255), 1);
            assert_eq!(h.total(), 2);
        }

        let hs = channel_histograms(&grid(3, 3, 1, &[7; 9]));
        assert_eq!(hs[0].count(7), 9);
        assert_eq!(hs[0].total(), 9);
    }

    #[test]
    fn probability_of_present_and_absent_tuples() {
        let g = grid(3, 3, 3, &[7; 27]);
        assert_eq!(pixel_probability(&channel_histograms(&g), &[7, 7, 7]), 1.0);

        let hs = channel_histograms(&grid(1, 2, 3, &[0, 0, 0, 255, 255, 255]));
        assert_eq!(pixel_probability(&hs, &[0, 0, 0]), 0.125);
        // absent triple still gets product mass
        assert_eq!(pixel_probability(&hs, &[0, 0, 255]), 0.125);
        assert_eq!(pixel_probability(&hs, &[0, 0, 1]), 0.0);
    }

    #[test]
    fn support_entries() {
        let s = support_distribution(&grid(3, 3, 1, &[7; 9]));
        assert_eq!(s.len(), 1);
        assert_eq!(s.entries()[0].probability, 1.0);
        assert_eq!(s.entries()[0].multiplicity, 9);

        let s = support_distribution(&grid(2, 2, 1, &[10, 10, 20, 30]));
        let got: Vec<_> = s
            .entries()
            .iter()
            .map(|e| (e.tuple[0], e.probability, e.multiplicity))
            .collect();
        assert_eq!(got, vec![(10, 0.5, 2), (20, 0.25, 1), (30, 0.25, 1)]);

        let s = support_distribution(&grid(2, 1, 3, &[0, 0, 0, 255, 255, 255]));
        assert_eq!(s.probabilities(), vec![0.125, 0.125]);
        assert_eq!(s.present_mass(), 0.25);
    }

    #[test]
    fn first_pixel_and_index() {
        let g = grid(4, 1, 1, &[30, 10, 30, 10]);
        let (s, idx) = support_with_pixel_index(&g);
        assert_eq!(idx, vec![1, 0, 1, 0]);
        assert_eq!(s.entries()[0].first_pixel, 1);
        assert_eq!(s.entries()[1].first_pixel, 0);
        assert_eq!(s.index_of(&[30]), Some(1));
        assert_eq!(s.index_of(&[31]), None);
    }

    fn arb_grid() -> impl Strategy<Value = PixelGrid> {
        (
            1usize..8,
            1usize..8,
            prop::sample::select(vec![1usize, 3]),
            1u8..12,
        )
            .prop_flat_map(|(w, h, c, levels)| {
                prop::collection::vec(0..levels, w * h * c).prop_map(move |data| {
                    // spread the small alphabet across the full range
                    let data = data.into_iter().map(|v| v.wrapping_mul(23)).collect();
                    PixelGrid::new(w, h, c, data).unwrap()
                })
            })
    }

    proptest! {
        #[test]
        fn multiplicities_sum_to_pixel_count(g in arb_grid()) {
            let s = support_distribution(&g);
            let total: u64 = s.entries().iter().map(|e| e.multiplicity).sum();
            prop_assert_eq!(total, g.pixel_count() as u64);
            prop_assert!(s.entries().windows(2).all(|w| w[0].tuple < w[1].tuple));
            prop_assert!(s.present_mass() <= 1.0 + 1e-12);
        }

        #[test]
        fn single_channel_mass_is_one(g in arb_grid()) {
            let g = crate::ingest::to_grayscale(&g);
            let s = support_distribution(&g);
            prop_assert!((s.present_mass() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn support_agrees_with_pixel_probability(g in arb_grid()) {
            let hs = channel_histograms(&g);
            for e in support_distribution(&g).entries() {
                prop_assert_eq!(e.probability, pixel_probability(&hs, &e.tuple));
            }
        }

        #[test]
        fn position_free(g in arb_grid(), rot in 0usize..64) {
            let n = g.pixel_count();
            let c = g.channels();
            let mut pixels: Vec<&[u8]> = g.pixels().collect();
            pixels.rotate_left(rot % n);
            pixels.reverse();
            let data = pixels.concat();
            let shuffled = PixelGrid::new(g.width(), g.height(), c, data).unwrap();
            let a = support_distribution(&g);
            let b = support_distribution(&shuffled);
            let strip = |s: &SupportDistribution| -> Vec<(Vec<u8>, f64, u64)> {
                s.entries().iter().map(|e| (e.tuple.clone(), e.probability, e.multiplicity)).collect()
            };
            prop_assert_eq!(strip(&a), strip(&b));
        }
    }
}
