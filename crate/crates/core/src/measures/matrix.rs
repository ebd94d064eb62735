use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{measure, self_dependence, MeasureKind};
use crate::error::{Error, Result};
use crate::sample::PairedSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDiagnostic {
    pub i: usize,
    pub j: usize,
    pub error: String,
}

/// Symmetric `p x p` matrix; failed pairs are `None` and listed in `diagnostics`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMatrix {
    pub p: usize,
    pub values: Vec<Option<f64>>,
    pub diagnostics: Vec<PairDiagnostic>,
}

impl PairwiseMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[Option<f64>] {
        &self.values[i * self.p..(i + 1) * self.p]
    }
}

/// Applies `kind` to every unordered pair of rows of `data` (variables by
/// observations). Pairs are computed in parallel and assembled in a fixed order.
pub fn pairwise_matrix(data: &[Vec<f64>], kind: &MeasureKind) -> Result<PairwiseMatrix> {
    kind.validate()?;
    let p = data.len();
    if p < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 variables, got {p}"
        )));
    }
    let n = data[0].len();
    if let Some(bad) = data.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch {
            xs: n,
            ys: bad.len(),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect();
    let results: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            if i == j {
                self_dependence(kind, &data[i])
            } else {
                let s = PairedSample::new(data[i].clone(), data[j].clone())?;
                measure(kind, &s)
            }
        })
        .collect();
    let mut values = vec![None; p * p];
    let mut diagnostics = Vec::new();
    for (&(i, j), r) in pairs.iter().zip(results) {
        match r {
            Ok(v) => {
                values[i * p + j] = Some(v);
                values[j * p + i] = Some(v);
            }
            Err(e) => diagnostics.push(PairDiagnostic {
                i,
                j,
                error: e.to_string(),
            }),
        }
    }
    Ok(PairwiseMatrix {
        p,
        values,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aldg::ThresholdRule;
    use crate::rng::rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_rows(p: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut r = rng(seed);
        (0..p)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect())
            .collect()
    }

    #[test]
    fn two_variables_mirror_one_call() {
        let rows = gaussian_rows(2, 40, 1);
        let m = pairwise_matrix(&rows, &MeasureKind::Spearman).unwrap();
        let s = PairedSample::new(rows[0].clone(), rows[1].clone()).unwrap();
        let v = measure(&MeasureKind::Spearman, &s).unwrap();
        assert_eq!(m.get(0, 1), Some(v));
        assert_eq!(m.get(1, 0), Some(v));
        assert_eq!(m.get(0, 0), Some(1.0));
        assert!(m.diagnostics.is_empty());
    }

    #[test]
    fn relabeling_permutes_matrix() {
        let rows = gaussian_rows(5, 50, 2);
        let perm = [3, 0, 4, 1, 2];
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&k| rows[k].clone()).collect();
        for kind in [
            MeasureKind::Kendall,
            MeasureKind::Aldg {
                rule: ThresholdRule::Auto { seed: 4 },
            },
            MeasureKind::Hhg,
        ] {
            let a = pairwise_matrix(&rows, &kind).unwrap();
            let b = pairwise_matrix(&permuted, &kind).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(b.get(i, j), a.get(perm[i], perm[j]), "{kind}");
                }
            }
        }
    }

    #[test]
    fn failures_become_diagnostics() {
        let mut rows = gaussian_rows(3, 20, 3);
        rows[1] = vec![2.0; 20];
        let m = pairwise_matrix(&rows, &MeasureKind::Pearson).unwrap();
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.get(1, 1), None);
        assert!(m.get(0, 2).is_some());
        assert_eq!(m.diagnostics.len(), 3);
        assert!(pairwise_matrix(&rows[..1], &MeasureKind::Pearson).is_err());
    }

    #[test]
    fn block_structure_shows_in_aldg() {
        // two blocks of 25 variables sharing a latent factor within each block
        let (p, n) = (50, 150);
        let mut r = rng(11);
        let latent: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect())
            .collect();
        let rows: Vec<Vec<f64>> = (0..p)
            .map(|v| {
                let f = &latent[v / 25];
                (0..n)
                    .map(|k| {
                        f[k] + 0.7 * {
                            let z: f64 = StandardNormal.sample(&mut r);
                            z
                        }
                    })
                    .collect()
            })
            .collect();
        let m = pairwise_matrix(
            &rows,
            &MeasureKind::Aldg {
                rule: ThresholdRule::Auto { seed: 0 },
            },
        )
        .unwrap();
        let (mut within, mut nw, mut between, mut nb) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..p {
            for j in i + 1..p {
                let v = m.get(i, j).unwrap();
                if i / 25 == j / 25 {
                    within += v;
                    nw += 1.0;
                } else {
                    between += v;
                    nb += 1.0;
                }
            }
        }
        assert!(
            within / nw > 5.0 * (between / nb) && within / nw > 0.1,
            "{} {}",
            within / nw,
            between / nb
        );
    }
}
