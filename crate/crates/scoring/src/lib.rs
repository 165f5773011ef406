//! Detection scoring: equal error rate and ranking statistics over a set
//! of scored trials.
//!
//! Scores follow the convention "higher means more bonafide". The equal
//! error rate is found by sweeping a decision threshold over the observed
//! scores; where the false-acceptance and false-rejection step curves
//! cross between two adjacent thresholds, both are interpolated linearly
//! and the crossing of the interpolants is reported.

mod error;

pub use error::ScoreError;

use synth_data::Label;

// ----------------------------------------------------------------------
// score sets
// ----------------------------------------------------------------------

/// Parallel scores and ground-truth labels for a set of trials.
#[derive(Debug, Clone)]
pub struct ScoreSet {
    scores: Vec<f64>,
    labels: Vec<Label>,
}

impl ScoreSet {
    pub fn new(scores: Vec<f64>, labels: Vec<Label>) -> Result<Self, ScoreError> {
        if scores.len() != labels.len() {
            return Err(ScoreError::Shape {
                detail: format!("{} scores vs {} labels", scores.len(), labels.len()),
            });
        }
        if scores.is_empty() {
            return Err(ScoreError::Shape {
                detail: "empty trial list".to_string(),
            });
        }
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() {
                return Err(ScoreError::NonFinite { index: i, value: s });
            }
        }
        Ok(ScoreSet { scores, labels })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn bonafide_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Bonafide).count()
    }

    pub fn spoof_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Spoof).count()
    }

    fn require_both_classes(&self) -> Result<(usize, usize), ScoreError> {
        let n_bona = self.bonafide_count();
        let n_spoof = self.spoof_count();
        if n_bona == 0 {
            return Err(ScoreError::SingleClass { present: "spoof" });
        }
        if n_spoof == 0 {
            return Err(ScoreError::SingleClass { present: "bonafide" });
        }
        Ok((n_bona, n_spoof))
    }
}

// ----------------------------------------------------------------------
// equal error rate
// ----------------------------------------------------------------------

/// Equal error rate together with the threshold where the curves cross.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EerPoint {
    pub eer: f64,
    pub threshold: f64,
}

/// Sweeps the decision threshold over every distinct score (plus one
/// point past the maximum, where everything is rejected) and returns the
/// crossing of FAR(t) = fraction of spoof trials with score >= t and
/// FRR(t) = fraction of bonafide trials with score < t.
///
/// With a single distinct score the curves jump straight from (1, 0) to
/// (0, 1) and the interpolated crossing is 0.5.
pub fn compute_eer(set: &ScoreSet) -> Result<EerPoint, ScoreError> {
    let (n_bona, n_spoof) = set.require_both_classes()?;

    let mut pairs: Vec<(f64, Label)> = set
        .scores
        .iter()
        .copied()
        .zip(set.labels.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores are finite"));

    struct Cand {
        t: f64,
        bona_below: usize,
        spoof_below: usize,
    }

    let mut cands: Vec<Cand> = Vec::new();
    let mut bona_seen = 0usize;
    let mut spoof_seen = 0usize;
    let mut i = 0usize;
    while i < pairs.len() {
        let v = pairs[i].0;
        cands.push(Cand {
            t: v,
            bona_below: bona_seen,
            spoof_below: spoof_seen,
        });
        while i < pairs.len() && pairs[i].0 == v {
            match pairs[i].1 {
                Label::Bonafide => bona_seen += 1,
                Label::Spoof => spoof_seen += 1,
            }
            i += 1;
        }
    }
    let top = pairs.last().expect("non-empty").0;
    cands.push(Cand {
        t: top + 1.0,
        bona_below: bona_seen,
        spoof_below: spoof_seen,
    });

    let mut prev: Option<(f64, f64, f64)> = None;
    for c in &cands {
        let fa = (n_spoof - c.spoof_below) as f64 / n_spoof as f64;
        let fr = c.bona_below as f64 / n_bona as f64;
        let d = fa - fr;
        if d == 0.0 {
            return Ok(EerPoint {
                eer: fa,
                threshold: c.t,
            });
        }
        if d < 0.0 {
            // FAR - FRR is non-increasing in t and starts at +1, so a
            // negative value means the crossing sits between this
            // candidate and the previous one.
            let (pt, pfa, pfr) = prev.expect("sweep starts at full acceptance");
            let pd = pfa - pfr;
            let lam = pd / (pd - d);
            return Ok(EerPoint {
                eer: pfa + lam * (fa - pfa),
                threshold: pt + lam * (c.t - pt),
            });
        }
        prev = Some((c.t, fa, fr));
    }
    unreachable!("rejection endpoint has FAR 0 and FRR 1");
}

// ----------------------------------------------------------------------
// ranking
// ----------------------------------------------------------------------

/// Probability that a random bonafide trial outscores a random spoof
/// trial, with half credit for ties. 0.5 means the scores carry no class
/// information; values below 0.5 mean the ordering is inverted.
///
/// Quadratic in the class sizes, which is fine at the corpus sizes this
/// workspace targets.
pub fn compute_auc(set: &ScoreSet) -> Result<f64, ScoreError> {
    let (n_bona, n_spoof) = set.require_both_classes()?;

    let mut acc = 0.0f64;
    for (sb, lb) in set.scores.iter().zip(set.labels.iter()) {
        if *lb != Label::Bonafide {
            continue;
        }
        for (ss, ls) in set.scores.iter().zip(set.labels.iter()) {
            if *ls != Label::Spoof {
                continue;
            }
            if sb > ss {
                acc += 1.0;
            } else if sb == ss {
                acc += 0.5;
            }
        }
    }
    Ok(acc / (n_bona as f64 * n_spoof as f64))
}

// ----------------------------------------------------------------------
