//! Thin wrappers that run on rayon when `parallel` is enabled and fall back
//! to sequential iteration otherwise.

use alloc::vec::Vec;
use core::ops::Add;

use crate::Result;

pub(crate) fn map_reduce<T, R, F>(items: Vec<T>, f: F) -> R
where
    T: Send,
    R: Default + Add<Output = R> + Send,
    F: Fn(usize, T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items
            .into_par_iter()
            .enumerate()
            .map(|(i, t)| f(i, t))
            .reduce(R::default, |a, b| a + b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items
            .into_iter()
            .enumerate()
            .fold(R::default(), |acc, (i, t)| acc + f(i, t))
    }
}

pub(crate) fn try_map_reduce<T, R, F>(items: Vec<T>, f: F) -> Result<R>
where
    T: Send,
    R: Default + Add<Output = R> + Send,
    F: Fn(usize, T) -> Result<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items
            .into_par_iter()
            .enumerate()
            .map(|(i, t)| f(i, t))
            .try_reduce(R::default, |a, b| Ok(a + b))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut acc = R::default();
        for (i, t) in items.into_iter().enumerate() {
            acc = acc + f(i, t)?;
        }
        Ok(acc)
    }
}

pub(crate) fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().enumerate().map(|(i, t)| f(i, t)).collect()
    }
}

/// Number of workers a caller should plan static work splits for.
pub(crate) fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads().max(1)
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Carves `buf` into disjoint regions indexed `[src][bin]`.
///
/// `bin_start` has `n_bins + 1` entries delimiting each bin in `buf`;
/// `offsets[src * n_bins + bin]` is where source `src` starts writing inside
/// that bin. Source `src`'s region ends where `src + 1` starts (or at the end
/// of the bin for the last source).
pub(crate) fn split_regions<'a, T>(
    mut buf: &'a mut [T],
    bin_start: &[usize],
    offsets: &[usize],
    n_src: usize,
    n_bins: usize,
) -> Vec<Vec<&'a mut [T]>> {
    debug_assert_eq!(bin_start.len(), n_bins + 1);
    debug_assert_eq!(offsets.len(), n_src * n_bins);
    let mut regions: Vec<Vec<&'a mut [T]>> = (0..n_src).map(|_| Vec::with_capacity(n_bins)).collect();
    for bin in 0..n_bins {
        let size = bin_start[bin + 1] - bin_start[bin];
        let (mut bin_buf, rest) = core::mem::take(&mut buf).split_at_mut(size);
        buf = rest;
        for src in 0..n_src {
            let end = if src + 1 < n_src {
                offsets[(src + 1) * n_bins + bin] - offsets[src * n_bins + bin]
            } else {
                bin_buf.len()
            };
            let (piece, tail) = core::mem::take(&mut bin_buf).split_at_mut(end);
            bin_buf = tail;
            regions[src].push(piece);
        }
    }
    regions
}

/// Splits `0..offsets.len()-1` into at most `parts` contiguous vertex ranges
/// with roughly equal edge counts.
pub(crate) fn edge_balanced_ranges(offsets: &[usize], parts: usize) -> Vec<(usize, usize)> {
    let n = offsets.len().saturating_sub(1);
    let parts = parts.max(1).min(n.max(1));
    let m = offsets.last().copied().unwrap_or(0);
    let mut ranges = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 1..=parts {
        let end = if p == parts {
            n
        } else {
            // weight vertices and edges equally so edgeless stretches still split
            let goal = (m + n) * p / parts;
            let mut lo = start;
            let mut hi = n;
            while lo < hi {
                let mid = (lo + hi) / 2;
                if offsets[mid] + mid < goal {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        ranges.push((start, end));
        start = end;
    }
    ranges
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn regions_tile_bins() {
        // two bins of sizes 3 and 2; source 0 writes 1 into bin 0, 2 into bin 1
        let mut buf = [0u8; 5];
        let bin_start = [0, 3, 5];
        let offsets = [0, 0, 1, 2];
        let regions = split_regions(&mut buf, &bin_start, &offsets, 2, 2);
        assert_eq!(regions[0][0].len(), 1);
        assert_eq!(regions[0][1].len(), 2);
        assert_eq!(regions[1][0].len(), 2);
        assert_eq!(regions[1][1].len(), 0);
    }

    #[test]
    fn balanced_ranges_cover_all_vertices() {
        let offsets = vec![0, 10, 10, 11, 30, 31];
        for parts in 1..8 {
            let r = edge_balanced_ranges(&offsets, parts);
            assert_eq!(r.first().unwrap().0, 0);
            assert_eq!(r.last().unwrap().1, 5);
            for w in r.windows(2) {
                assert_eq!(w[0].1, w[1].0);
            }
        }
        assert_eq!(edge_balanced_ranges(&[0], 4), vec![(0, 0)]);
    }
}
