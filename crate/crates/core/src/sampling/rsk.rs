use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Shape of the Robinson–Schensted insertion tableau of `sequence`.
///
/// Rows are kept sorted; each insertion bumps the first entry larger than
/// the incoming one, found by binary search.
pub fn rsk_shape<T: Ord + Clone>(sequence: &[T]) -> Result<Partition> {
    let mut sorted: Vec<&T> = sequence.iter().collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateEntry);
    }
    Ok(insert_all(sequence.iter().cloned()))
}

fn insert_all<T: Ord>(items: impl Iterator<Item = T>) -> Partition {
    let mut rows: Vec<Vec<T>> = Vec::new();
    for item in items {
        let mut x = item;
        let mut r = 0;
        loop {
            if r == rows.len() {
                rows.push(vec![x]);
                break;
            }
            let row = &mut rows[r];
            let pos = row.partition_point(|y| *y < x);
            if pos == row.len() {
                row.push(x);
                break;
            }
            x = std::mem::replace(&mut row[pos], x);
            r += 1;
        }
    }
    Partition::from_sorted_parts(rows.iter().map(Vec::len).collect())
}

/// A Plancherel-distributed partition of `n`: the RSK shape of a uniform
/// random permutation.
pub fn sample_plancherel<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(rng);
    insert_all(perm.into_iter())
}
