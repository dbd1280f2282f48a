//! Synthetic bars dataset and feature-recovery scoring.
//!
//! Data vectors are small square images built as non-negative mixtures of
//! horizontal and vertical bars (and adjacent double bars), the standard
//! benchmark for parts-based representation learning. Images are stored
//! flattened row-major, one image per column.

use std::fmt;

use crate::densemat::Matrix;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Parameters of the generated dataset.
#[derive(Debug, Clone)]
pub struct BarsSpec {
    /// Side length of the square images.
    pub image_side: usize,
    pub n_samples: usize,
    /// Probability that a feature is active in a given sample.
    pub active_prob: f64,
    /// Mean of the exponential amplitude of an active feature.
    pub amp_scale: f64,
    pub seed: u64,
}

impl Default for BarsSpec {
    fn default() -> Self {
        BarsSpec {
            image_side: 3,
            n_samples: 500,
            active_prob: 0.2,
            amp_scale: 1.0,
            seed: 0,
        }
    }
}

impl BarsSpec {
    pub fn check(&self) -> Result<()> {
        if self.image_side < 2 {
            return Err(Error::InvalidParameter {
                name: "image_side",
                value: self.image_side as f64,
            });
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter { name: "n_samples", value: 0.0 });
        }
        if self.active_prob <= 0.0 || self.active_prob > 1.0 || self.active_prob.is_nan() {
            return Err(Error::InvalidParameter {
                name: "active_prob",
                value: self.active_prob,
            });
        }
        if self.amp_scale <= 0.0 || self.amp_scale.is_nan() {
            return Err(Error::InvalidParameter {
                name: "amp_scale",
                value: self.amp_scale,
            });
        }
        Ok(())
    }
}

/// Generated dataset: data X = A_orig * S_orig together with the ground
/// truth factors.
#[derive(Debug, Clone)]
pub struct BarsData {
    pub x: Matrix,
    pub s_orig: Matrix,
    pub a_orig: Matrix,
}

/// Bar features for a side x side grid, one unit-norm column per feature:
/// all single horizontal bars, all single vertical bars, then the
/// adjacent horizontal and vertical double bars.
pub fn features_for_side(side: usize) -> Result<Matrix> {
    if side < 2 {
        return Err(Error::InvalidParameter {
            name: "image_side",
            value: side as f64,
        });
    }
    let pixels = side * side;
    let n_features = 2 * side + 2 * (side - 1);
    let single = 1.0 / (side as f64).sqrt();
    let double = 1.0 / (2.0 * side as f64).sqrt();
    let mut data = vec![0.0; pixels * n_features];
    let mut set = |pixel: usize, feature: usize, v: f64| data[pixel * n_features + feature] = v;
    let mut feature = 0;
    for row in 0..side {
        for col in 0..side {
            set(row * side + col, feature, single);
        }
        feature += 1;
    }
    for col in 0..side {
        for row in 0..side {
            set(row * side + col, feature, single);
        }
        feature += 1;
    }
    for top in 0..side - 1 {
        for row in [top, top + 1] {
            for col in 0..side {
                set(row * side + col, feature, double);
            }
        }
        feature += 1;
    }
    for left in 0..side - 1 {
        for col in [left, left + 1] {
            for row in 0..side {
                set(row * side + col, feature, double);
            }
        }
        feature += 1;
    }
    debug_assert_eq!(feature, n_features);
    Matrix::from_vec(pixels, n_features, data)
}

/// The ten 3x3 features: three horizontal bars, three vertical bars, two
/// horizontal double bars, two vertical double bars, each unit norm.
pub fn original_features() -> Matrix {
    features_for_side(3).expect("side 3 is valid")
}

/// Draws sparse non-negative components and mixes them through the bar
/// features: every S_orig entry is zero with probability
/// `1 - active_prob`, otherwise exponential with mean `amp_scale`.
/// Deterministic given the spec (including seed).
pub fn generate(spec: &BarsSpec) -> Result<BarsData> {
    spec.check()?;
    let a_orig = features_for_side(spec.image_side)?;
    let r = a_orig.cols();
    let mut rng = SeededRng::new(spec.seed);
    let s_orig = Matrix::from_fn(r, spec.n_samples, |_, _| {
        if rng.uniform() < spec.active_prob {
            rng.exponential(spec.amp_scale)
        } else {
            0.0
        }
    });
    let x = a_orig.matmul(&s_orig)?;
    Ok(BarsData { x, s_orig, a_orig })
}

/// Result of greedily matching learned features to reference features by
/// cosine similarity.
#[derive(Debug, Clone)]
pub struct MatchReport {
    /// One-to-one (learned index, reference index) pairs, sorted by
    /// learned index.
    pub assignment: Vec<(usize, usize)>,
    /// Cosine similarity of each assigned pair, parallel to `assignment`.
    pub similarities: Vec<f64>,
    /// Pairs with similarity at or above the threshold.
    pub recovered_count: usize,
    pub threshold: f64,
}

impl fmt::Display for MatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((learned, reference), sim) in self.assignment.iter().zip(&self.similarities) {
            let mark = if *sim >= self.threshold { "recovered" } else { "missed" };
            writeln!(
                f,
                "learned {learned:>2} -> reference {reference:>2}  similarity {sim:.6}  {mark}"
            )?;
        }
        write!(
            f,
            "{} of {} features recovered at threshold {}",
            self.recovered_count,
            self.assignment.len(),
            self.threshold
        )
    }
}

fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu <= 0.0 || nv <= 0.0 {
        return 0.0;
    }
    let c = dot / (nu * nv);
    // Identical columns must score exactly 1 regardless of rounding in
    // the norm products.
    if c > 1.0 - 1e-12 {
        1.0
    } else {
        c.max(0.0)
    }
}

/// Greedy one-to-one assignment of learned columns to reference columns
/// by descending cosine similarity (ties broken by lower learned index,
/// then lower reference index). Learned columns are compared
/// direction-only, so the report is invariant to positive rescaling.
pub fn match_features(learned: &Matrix, reference: &Matrix, threshold: f64) -> Result<MatchReport> {
    if learned.rows() != reference.rows() {
        return Err(Error::DimensionMismatch {
            op: "match_features",
            left: learned.shape(),
            right: reference.shape(),
        });
    }
    let nl = learned.cols();
    let nr = reference.cols();
    let learned_cols: Vec<Vec<f64>> = (0..nl).map(|j| learned.column(j)).collect();
    let reference_cols: Vec<Vec<f64>> = (0..nr).map(|j| reference.column(j)).collect();
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(nl * nr);
    for (i, lc) in learned_cols.iter().enumerate() {
        for (j, rc) in reference_cols.iter().enumerate() {
            candidates.push((cosine(lc, rc), i, j));
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut used_learned = vec![false; nl];
    let mut used_reference = vec![false; nr];
    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(nl.min(nr));
    for (sim, i, j) in candidates {
        if used_learned[i] || used_reference[j] {
            continue;
        }
        used_learned[i] = true;
        used_reference[j] = true;
        pairs.push((i, j, sim));
        if pairs.len() == nl.min(nr) {
            break;
        }
    }
    pairs.sort_by_key(|&(i, _, _)| i);
    let recovered_count = pairs.iter().filter(|&&(_, _, sim)| sim >= threshold).count();
    Ok(MatchReport {
        assignment: pairs.iter().map(|&(i, j, _)| (i, j)).collect(),
        similarities: pairs.iter().map(|&(_, _, sim)| sim).collect(),
        recovered_count,
        threshold,
    })
}

/// Renders each column as a side x side tile in a plain-text (P2)
/// portable graymap, tiles left to right with a one-pixel black separator
/// column, values mapped linearly from [0, max entry] to [0, 255].
pub fn to_pgm(m: &Matrix, side: usize) -> Result<String> {
    if side == 0 || m.rows() != side * side {
        return Err(Error::InvalidShape {
            rows: m.rows(),
            cols: m.cols(),
            len: side * side,
        });
    }
    let tiles = m.cols();
    let width = tiles * side + tiles.saturating_sub(1);
    let height = side;
    let max = m.max_entry();
    let level = |v: f64| -> u32 {
        if max <= 0.0 {
            return 0;
        }
        let scaled = (v.max(0.0) / max * 255.0).round();
        scaled.clamp(0.0, 255.0) as u32
    };
    let mut out = format!("P2\n{width} {height}\n255\n");
    for y in 0..height {
        let mut line = String::new();
        for tile in 0..tiles {
            if tile > 0 {
                push_token(&mut out, &mut line, "0");
            }
            for x in 0..side {
                let v = level(m.get(y * side + x, tile));
                push_token(&mut out, &mut line, &v.to_string());
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

// Keeps every line of PGM sample data within the format's 70-character
// limit.
fn push_token(out: &mut String, line: &mut String, token: &str) {
    if !line.is_empty() && line.len() + 1 + token.len() > 70 {
        out.push_str(line);
        out.push('\n');
        line.clear();
    }
    if !line.is_empty() {
        line.push(' ');
    }
    line.push_str(token);
}
