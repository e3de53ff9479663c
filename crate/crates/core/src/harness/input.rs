use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::F64Key;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputKind {
    /// A random permutation of `0..n`.
    #[serde(rename = "perm")]
    Perm,
    /// Independent integers uniform in `[0, key_range)`.
    #[serde(rename = "uniform-int")]
    UniformInt,
    /// Independent doubles uniform in `[0, key_range)`.
    #[serde(rename = "uniform-double")]
    UniformDouble,
}

impl InputKind {
    pub const ALL: [InputKind; 3] = [InputKind::Perm, InputKind::UniformInt, InputKind::UniformDouble];

    pub fn id(self) -> &'static str {
        match self {
            InputKind::Perm => "perm",
            InputKind::UniformInt => "uniform-int",
            InputKind::UniformDouble => "uniform-double",
        }
    }
}

impl FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InputKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown input kind `{s}`")))
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Per-rank input buffers, typed by key mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Inputs {
    Int(Vec<Vec<i64>>),
    Double(Vec<Vec<F64Key>>),
}

impl Inputs {
    pub fn p(&self) -> usize {
        match self {
            Inputs::Int(v) => v.len(),
            Inputs::Double(v) => v.len(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Inputs::Int(v) => v.iter().map(Vec::len).sum(),
            Inputs::Double(v) => v.iter().map(Vec::len).sum(),
        }
    }
}

/// Sizes of `p` contiguous blocks of `n` elements; the first `n % p` blocks
/// get one extra element.
pub fn block_sizes(n: usize, p: usize) -> Vec<usize> {
    (0..p).map(|r| n / p + usize::from(r < n % p)).collect()
}

fn deal<T>(mut all: Vec<T>, p: usize) -> Vec<Vec<T>> {
    let sizes = block_sizes(all.len(), p);
    let mut out = Vec::with_capacity(p);
    for size in sizes.into_iter().rev() {
        out.push(all.split_off(all.len() - size));
    }
    out.reverse();
    out
}

/// Generates `p` input buffers holding `n` keys in total.
///
/// Keys come from one seeded sequence dealt to the ranks in contiguous
/// blocks, so the multiset of keys depends on `(kind, n, key_range, seed)`
/// but not on `p`. `key_range` defaults to `n` (at least 1).
pub fn gen_input(kind: InputKind, n: usize, p: usize, key_range: Option<f64>, seed: u64) -> Result<Inputs> {
    if p == 0 {
        return Err(Error::Config("at least one rank is required".into()));
    }
    let range = key_range.unwrap_or(n as f64).max(1.0);
    if !range.is_finite() {
        return Err(Error::Config(format!("key range must be finite, got {range}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match kind {
        InputKind::Perm => {
            let mut keys: Vec<i64> = (0..n as i64).collect();
            keys.shuffle(&mut rng);
            Inputs::Int(deal(keys, p))
        }
        InputKind::UniformInt => {
            let hi = range.ceil() as i64;
            let keys = (0..n).map(|_| rng.gen_range(0..hi)).collect();
            Inputs::Int(deal(keys, p))
        }
        InputKind::UniformDouble => {
            let keys = (0..n).map(|_| F64Key(rng.gen_range(0.0..range))).collect();
            Inputs::Double(deal(keys, p))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input() {
        let Inputs::Int(bufs) = gen_input(InputKind::Perm, 0, 4, None, 1).unwrap() else {
            panic!("perm yields integers")
        };
        assert_eq!(bufs.len(), 4);
        assert!(bufs.iter().all(Vec::is_empty));
    }

    #[test]
    fn perm_is_a_permutation() {
        let Inputs::Int(bufs) = gen_input(InputKind::Perm, 8, 2, None, 5).unwrap() else {
            panic!()
        };
        assert_eq!(bufs[0].len(), 4);
        let mut all: Vec<i64> = bufs.concat();
        all.sort();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn sizes_differ_by_at_most_one() {
        for (n, p) in [(7, 4), (1000, 64), (1, 8), (64, 64)] {
            let inputs = gen_input(InputKind::UniformInt, n, p, None, 3).unwrap();
            let Inputs::Int(bufs) = inputs else { panic!() };
            let lens: Vec<usize> = bufs.iter().map(Vec::len).collect();
            assert_eq!(lens.iter().sum::<usize>(), n);
            assert!(lens.iter().max().unwrap() - lens.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn deterministic_and_independent_of_p() {
        let a = gen_input(InputKind::UniformDouble, 100, 4, None, 9).unwrap();
        let b = gen_input(InputKind::UniformDouble, 100, 4, None, 9).unwrap();
        assert_eq!(a, b);
        let (Inputs::Double(a), Inputs::Double(c)) = (a, gen_input(InputKind::UniformDouble, 100, 8, None, 9).unwrap())
        else {
            panic!()
        };
        assert_eq!(a.concat(), c.concat());
    }

    #[test]
    fn uniform_doubles_fill_quartiles_evenly() {
        let n = 1_000_000;
        let range = 1e8;
        let Inputs::Double(bufs) = gen_input(InputKind::UniformDouble, n, 4, Some(range), 11).unwrap() else {
            panic!()
        };
        let mut quartiles = [0usize; 4];
        for k in bufs.iter().flatten() {
            assert!(k.0 >= 0.0 && k.0 < range);
            quartiles[(k.0 / (range / 4.0)) as usize] += 1;
        }
        // each count is Binomial(n, 1/4): sd ~ 433, allow 5 sd
        for q in quartiles {
            assert!((q as f64 - n as f64 / 4.0).abs() < 5.0 * 433.0, "{quartiles:?}");
        }
    }

    #[test]
    fn unknown_kind() {
        assert!("gaussian".parse::<InputKind>().is_err());
        assert_eq!("uniform-double".parse::<InputKind>().unwrap(), InputKind::UniformDouble);
    }
}
