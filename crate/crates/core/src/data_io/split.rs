//! Seeded dictionary / held-out splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DseldError, Result};

/// Row indices of the two halves of a split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    /// Rows that become dictionary atoms, in shuffled order.
    pub dictionary: Vec<usize>,
    /// Remaining rows in ascending order.
    pub held_out: Vec<usize>,
}

/// Chooses `dict_size` of the `labels.len()` rows for the dictionary.
///
/// Stratified mode gives class `c` `⌊M·n_c/R⌋` atoms and hands the
/// remainder to the classes with the largest fractional parts (lowest class
/// id first on ties). Uniform mode samples rows without regard to class.
pub fn split_dataset(labels: &[u32], dict_size: usize, seed: u64, stratified: bool) -> Result<Split> {
    let rows = labels.len();
    if dict_size > rows {
        return Err(DseldError::NotEnoughRows {
            requested: dict_size,
            available: rows,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dictionary = if stratified {
        stratified_pick(labels, dict_size, &mut rng)
    } else {
        let mut all: Vec<usize> = (0..rows).collect();
        all.shuffle(&mut rng);
        all.truncate(dict_size);
        all
    };
    dictionary.shuffle(&mut rng);

    let mut taken = vec![false; rows];
    for &i in &dictionary {
        taken[i] = true;
    }
    let held_out = (0..rows).filter(|&i| !taken[i]).collect();
    Ok(Split { dictionary, held_out })
}

fn stratified_pick(labels: &[u32], m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let rows = labels.len();
    let classes = labels.iter().copied().max().map_or(0, |c| c as usize + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &l) in labels.iter().enumerate() {
        members[l as usize].push(i);
    }

    let mut quota: Vec<usize> = Vec::with_capacity(classes);
    // Remainders as exact fractions over `rows` so ties compare exactly.
    let mut remainder: Vec<(usize, usize)> = Vec::with_capacity(classes);
    for (c, rows_c) in members.iter().enumerate() {
        let scaled = m * rows_c.len();
        quota.push(scaled / rows);
        remainder.push((scaled % rows, c));
    }
    let short = m - quota.iter().sum::<usize>();
    remainder.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, c) in remainder.iter().take(short) {
        quota[c] += 1;
    }

    let mut picked = Vec::with_capacity(m);
    for (c, rows_c) in members.iter_mut().enumerate() {
        rows_c.shuffle(rng);
        picked.extend_from_slice(&rows_c[..quota[c]]);
    }
    picked
}
