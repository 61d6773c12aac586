//! Attribute-value object space, one-hot encodings, and data splits.
//!
//! An object is a tuple of `n_att` attributes, each taking one of `n_val`
//! values. One value is held out of training entirely; objects containing it
//! in exactly one slot form the zero-shot set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::rng::Rng;

/// Attribute tuple; the canonical object representation.
pub type Object = Vec<u16>;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObjectSpace {
    pub n_att: usize,
    pub n_val: usize,
    pub held_out_value: u16,
}

impl ObjectSpace {
    pub fn new(n_att: usize, n_val: usize, held_out_value: u16) -> Result<Self> {
        if n_att < 1 {
            return Err(Error::InvalidArgument("n_att must be >= 1".into()));
        }
        if n_val < 2 {
            return Err(Error::InvalidArgument(format!(
                "n_val must be >= 2 (got {n_val}); one value is held out and at least one must remain"
            )));
        }
        if held_out_value as usize >= n_val {
            return Err(Error::InvalidArgument(format!(
                "held_out_value {held_out_value} out of range [0, {n_val})"
            )));
        }
        Ok(Self {
            n_att,
            n_val,
            held_out_value,
        })
    }

    pub fn total_objects(&self) -> usize {
        self.n_val.pow(self.n_att as u32)
    }

    pub fn in_distribution_count(&self) -> usize {
        (self.n_val - 1).pow(self.n_att as u32)
    }

    /// Dimension of the one-hot concatenation.
    pub fn encoding_dim(&self) -> usize {
        self.n_att * self.n_val
    }

    /// Values usable during training, ascending.
    fn allowed_values(&self) -> Vec<u16> {
        (0..self.n_val as u16)
            .filter(|&v| v != self.held_out_value)
            .collect()
    }
}

/// One object together with its one-hot block encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectVec {
    pub attributes: Object,
    pub encoding: Vec<f64>,
}

/// Encode an object as a concatenation of `n_att` one-hot vectors of
/// dimension `n_val`. The Euclidean distance between two encodings is
/// sqrt(2 h) where h counts differing attributes.
pub fn encode(space: &ObjectSpace, attributes: &[u16]) -> Result<ObjectVec> {
    if attributes.len() != space.n_att {
        return Err(Error::InvalidArgument(format!(
            "expected {} attributes, got {}",
            space.n_att,
            attributes.len()
        )));
    }
    let mut encoding = vec![0.0; space.encoding_dim()];
    for (i, &v) in attributes.iter().enumerate() {
        if v as usize >= space.n_val {
            return Err(Error::InvalidArgument(format!(
                "attribute value {v} out of range [0, {})",
                space.n_val
            )));
        }
        encoding[i * space.n_val + v as usize] = 1.0;
    }
    Ok(ObjectVec {
        attributes: attributes.to_vec(),
        encoding,
    })
}

/// All objects avoiding the held-out value, in lexicographic order.
pub fn enumerate_in_distribution(space: &ObjectSpace) -> Vec<Object> {
    let allowed = space.allowed_values();
    let mut out = Vec::with_capacity(space.in_distribution_count());
    let mut odometer = vec![0usize; space.n_att];
    loop {
        out.push(odometer.iter().map(|&i| allowed[i]).collect());
        let mut pos = space.n_att;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < allowed.len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

/// Objects where exactly one attribute takes the held-out value, in
/// lexicographic order of (held-out position, remaining attributes).
pub fn enumerate_zero_shot(space: &ObjectSpace) -> Vec<Object> {
    let inner = ObjectSpace {
        n_att: space.n_att - 1,
        ..*space
    };
    let rests = enumerate_in_distribution(&inner);
    let mut out = Vec::with_capacity(space.n_att * rests.len());
    for pos in 0..space.n_att {
        for rest in &rests {
            let mut obj = Vec::with_capacity(space.n_att);
            obj.extend_from_slice(&rest[..pos]);
            obj.push(space.held_out_value);
            obj.extend_from_slice(&rest[pos..]);
            out.push(obj);
        }
    }
    out
}

/// Train / in-distribution generalization / zero-shot partitions.
///
/// The training set is a uniform sample of `ceil(train_fraction * n_in_dist)`
/// in-distribution objects and doubles as the validation set.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub train: Vec<Object>,
    pub generalization: Vec<Object>,
    pub zero_shot: Vec<Object>,
    pub seed: u64,
    pub train_fraction: f64,
}

pub fn make_splits(space: &ObjectSpace, train_fraction: f64, seed: u64) -> Result<DataSplit> {
    if !(0.0..=1.0).contains(&train_fraction) || train_fraction == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "train_fraction must be in (0, 1], got {train_fraction}"
        )));
    }
    let in_dist = enumerate_in_distribution(space);
    let n = in_dist.len();
    let n_train = ((train_fraction * n as f64).ceil() as usize).min(n);

    let mut rng = Rng::seeded(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut idx);
    let mut train_idx: Vec<usize> = idx[..n_train].to_vec();
    let mut gen_idx: Vec<usize> = idx[n_train..].to_vec();
    train_idx.sort_unstable();
    gen_idx.sort_unstable();

    Ok(DataSplit {
        train: train_idx.iter().map(|&i| in_dist[i].clone()).collect(),
        generalization: gen_idx.iter().map(|&i| in_dist[i].clone()).collect(),
        zero_shot: enumerate_zero_shot(space),
        seed,
        train_fraction,
    })
}

/// JSON manifest for exact cross-run split reuse: indices refer to the
/// lexicographic in-distribution enumeration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitManifest {
    pub space: ObjectSpace,
    pub seed: u64,
    pub train_fraction: f64,
    pub train_indices: Vec<usize>,
}

impl SplitManifest {
    pub fn from_split(space: &ObjectSpace, split: &DataSplit) -> Self {
        let in_dist = enumerate_in_distribution(space);
        let mut position = std::collections::HashMap::new();
        for (i, obj) in in_dist.iter().enumerate() {
            position.insert(obj.clone(), i);
        }
        Self {
            space: *space,
            seed: split.seed,
            train_fraction: split.train_fraction,
            train_indices: split.train.iter().map(|o| position[o]).collect(),
        }
    }

    pub fn to_split(&self) -> Result<DataSplit> {
        let in_dist = enumerate_in_distribution(&self.space);
        let member: std::collections::HashSet<usize> = self.train_indices.iter().copied().collect();
        for &i in &self.train_indices {
            if i >= in_dist.len() {
                return Err(Error::InvalidArgument(format!(
                    "train index {i} out of range for in-distribution size {}",
                    in_dist.len()
                )));
            }
        }
        Ok(DataSplit {
            train: self.train_indices.iter().map(|&i| in_dist[i].clone()).collect(),
            generalization: in_dist
                .iter()
                .enumerate()
                .filter(|(i, _)| !member.contains(i))
                .map(|(_, o)| o.clone())
                .collect(),
            zero_shot: enumerate_zero_shot(&self.space),
            seed: self.seed,
            train_fraction: self.train_fraction,
        })
    }
}
