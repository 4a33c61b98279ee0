//! JSON form of profiles.
//!
//! Prudent profiles use
//! `{"instance": .., "segments": [{"t0","t1","hi","a","gamma","lambda"}], "terminal_slope": m}`
//! and general profiles `{"instance": .., "tails": [[{"t0","t1","a","gamma","lambda"}]]}`.
//! `"t1": null` stands for an unbounded segment; `gamma` is the coefficient
//! of `exp(lambda * t)` in absolute time.

use serde::{Deserialize, Serialize};

use super::{ExpPiece, Layout, Profile, Segment};
use crate::error::Result;
use crate::instance::{Instance, InstanceFile};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentDoc<T> {
    pub t0: T,
    pub t1: Option<T>,
    pub hi: usize,
    pub a: T,
    pub gamma: T,
    pub lambda: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceDoc<T> {
    pub t0: T,
    pub t1: Option<T>,
    pub a: T,
    pub gamma: T,
    pub lambda: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileDoc<T> {
    Prudent {
        instance: InstanceFile<T>,
        segments: Vec<SegmentDoc<T>>,
        terminal_slope: Option<usize>,
    },
    Tails {
        instance: InstanceFile<T>,
        tails: Vec<Vec<PieceDoc<T>>>,
    },
}

fn end<T: Scalar>(t1: T) -> Option<T> {
    t1.is_finite().then_some(t1)
}

impl<T: Scalar> From<&Profile<T>> for ProfileDoc<T> {
    fn from(p: &Profile<T>) -> Self {
        let instance = InstanceFile::from(p.instance.clone());
        match &p.layout {
            Layout::Prudent {
                segments,
                terminal_slope,
            } => ProfileDoc::Prudent {
                instance,
                segments: segments
                    .iter()
                    .map(|s| SegmentDoc {
                        t0: s.t0,
                        t1: end(s.t1),
                        hi: s.hi,
                        a: s.a,
                        gamma: s.gamma(),
                        lambda: s.lambda,
                    })
                    .collect(),
                terminal_slope: *terminal_slope,
            },
            Layout::Tails => ProfileDoc::Tails {
                instance,
                tails: p
                    .tails
                    .iter()
                    .map(|c| {
                        c.pieces()
                            .iter()
                            .map(|q| PieceDoc {
                                t0: q.t0,
                                t1: end(q.t1),
                                a: q.a,
                                gamma: q.gamma(),
                                lambda: q.rate,
                            })
                            .collect()
                    })
                    .collect(),
            },
        }
    }
}

impl<T: Scalar> ProfileDoc<T> {
    pub fn into_profile(self) -> Result<Profile<T>> {
        let open = |t1: Option<T>| t1.unwrap_or_else(T::infinity);
        match self {
            ProfileDoc::Prudent {
                instance,
                segments,
                terminal_slope,
            } => {
                let inst = Instance::try_from(instance)?;
                let segments = segments
                    .into_iter()
                    .map(|d| Segment::new(d.t0, open(d.t1), d.hi, d.a, d.gamma, d.lambda))
                    .collect();
                Profile::prudent(inst, segments, terminal_slope)
            }
            ProfileDoc::Tails { instance, tails } => {
                let inst = Instance::try_from(instance)?;
                let tails = tails
                    .into_iter()
                    .map(|c| {
                        c.into_iter()
                            .map(|d| ExpPiece::from_absolute(d.t0, open(d.t1), d.a, d.gamma, d.lambda))
                            .collect()
                    })
                    .collect();
                Profile::from_tails(inst, tails)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Slope;

    #[test]
    fn prudent_round_trip() {
        let e = std::f64::consts::E;
        let inst = Instance::normalize(&[Slope::new(0.0, 1.0), Slope::new(1.0, 0.0)]).unwrap();
        let seg = Segment::new(0.0, 1.0, 1, -1.0 / (e - 1.0), 1.0 / (e - 1.0), 1.0);
        let p = Profile::prudent(inst, vec![seg], Some(1)).unwrap();
        let text = p.to_json().unwrap();
        assert!(text.contains("\"terminal_slope\": 1"));
        let back = Profile::<f64>::from_json_str(&text).unwrap();
        for t in [0.1, 0.5, 0.9, 2.0] {
            assert!((back.total_cost(t).unwrap() - p.total_cost(t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn unbounded_segment_is_null() {
        let inst = Instance::normalize(&[Slope::new(0.0, 1.0), Slope::new(1.0, 0.5)]).unwrap();
        let seg = Segment::new(0.0, f64::INFINITY, 1, 0.25, 0.0, 2.0);
        let p = Profile::prudent(inst, vec![seg], None).unwrap();
        let text = p.to_json().unwrap();
        assert!(text.contains("\"t1\": null"));
        let back = Profile::<f64>::from_json_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
