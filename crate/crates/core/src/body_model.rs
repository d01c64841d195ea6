//! The segmented link model: per-segment mass fractions, landmark endpoints,
//! center-of-gravity ratios and the joint tree connecting the segments.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace_io::LandmarkTrace;
use crate::Vec3;

const DEFAULT_MODEL: &str = include_str!("../data/body_model.toml");

/// Tolerance on the mass-ratio sum accepted when loading a model.
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// A segment endpoint: one landmark, or the midpoint of two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Landmark(String),
    Midpoint([String; 2]),
}

impl Endpoint {
    pub fn landmarks(&self) -> Vec<&str> {
        match self {
            Endpoint::Landmark(a) => vec![a.as_str()],
            Endpoint::Midpoint([a, b]) => vec![a.as_str(), b.as_str()],
        }
    }

    /// Position in trace units. `Err` carries the first missing landmark.
    fn resolve<'a>(&'a self, trace: &LandmarkTrace, frame: usize) -> Result<Vec3, &'a str> {
        let positions = &trace.frames[frame].positions;
        let get = |name: &'a str| positions.get(name).copied().ok_or(name);
        match self {
            Endpoint::Landmark(a) => get(a),
            Endpoint::Midpoint([a, b]) => Ok((get(a)? + get(b)?) * 0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub mass_ratio: f64,
    pub proximal: Endpoint,
    pub distal: Endpoint,
    pub cog_ratio: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    segment: Vec<SegmentDef>,
}

/// A validated link model. Segment indices follow declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyModel {
    segments: Vec<SegmentDef>,
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
    /// Root first; every parent precedes its children.
    topo: Vec<usize>,
}

/// The 15-segment model shipped with the crate, rooted at `Hip`.
pub fn default_body_model() -> BodyModel {
    BodyModel::from_toml_str(DEFAULT_MODEL).expect("shipped body model is valid")
}

impl BodyModel {
    pub fn new(segments: Vec<SegmentDef>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Model("model has no segments".into()));
        }
        let mut names = BTreeSet::new();
        for seg in &segments {
            if !names.insert(seg.name.as_str()) {
                return Err(Error::Model(format!("duplicate segment \"{}\"", seg.name)));
            }
            if !(seg.mass_ratio > 0.0 && seg.mass_ratio <= 1.0) {
                return Err(Error::Model(format!(
                    "segment \"{}\": mass_ratio {} not in (0, 1]",
                    seg.name, seg.mass_ratio
                )));
            }
            if !(0.0..=1.0).contains(&seg.cog_ratio) {
                return Err(Error::Model(format!(
                    "segment \"{}\": cog_ratio {} not in [0, 1]",
                    seg.name, seg.cog_ratio
                )));
            }
        }
        let total: f64 = segments.iter().map(|s| s.mass_ratio).sum();
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::Model(format!("mass ratios sum to {total}, expected 1")));
        }

        let index_of = |name: &str| segments.iter().position(|s| s.name == name);
        let mut parents = Vec::with_capacity(segments.len());
        let mut children = vec![Vec::new(); segments.len()];
        let mut roots = Vec::new();
        for (i, seg) in segments.iter().enumerate() {
            match &seg.parent {
                None => {
                    roots.push(i);
                    parents.push(None);
                }
                Some(p) => {
                    let pi = index_of(p).ok_or_else(|| {
                        Error::Model(format!("segment \"{}\": unknown parent \"{p}\"", seg.name))
                    })?;
                    parents.push(Some(pi));
                    children[pi].push(i);
                }
            }
        }
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(Error::Model("no root segment (every segment has a parent)".into())),
            many => {
                let names: Vec<_> = many.iter().map(|&i| segments[i].name.as_str()).collect();
                return Err(Error::Model(format!("multiple root segments: {}", names.join(", "))));
            }
        };

        let mut topo = Vec::with_capacity(segments.len());
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            topo.push(i);
            queue.extend(children[i].iter().copied());
        }
        if topo.len() != segments.len() {
            let unreachable: Vec<_> = (0..segments.len())
                .filter(|i| !topo.contains(i))
                .map(|i| segments[i].name.as_str())
                .collect();
            return Err(Error::Model(format!(
                "segments not reachable from root \"{}\" (cycle?): {}",
                segments[root].name,
                unreachable.join(", ")
            )));
        }

        Ok(Self {
            segments,
            parents,
            children,
            root,
            topo,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ModelFile = toml::from_str(text).map_err(|e| Error::Parse {
            what: "body model".into(),
            message: e.to_string(),
        })?;
        Self::new(file.segment)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn segments(&self) -> &[SegmentDef] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, segment: usize) -> Option<usize> {
        self.parents[segment]
    }

    /// Children in declaration order.
    pub fn children(&self, segment: usize) -> &[usize] {
        &self.children[segment]
    }

    /// Segment indices with every parent before its children.
    pub fn root_first(&self) -> &[usize] {
        &self.topo
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.segments.iter().position(|s| s.name == name)
    }

    pub fn mass_ratio(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.segments[i].mass_ratio)
    }

    pub fn total_mass_ratio(&self) -> f64 {
        self.segments.iter().map(|s| s.mass_ratio).sum()
    }

    /// Mass fraction of `segment` and everything distal to it.
    pub fn subtree_mass_ratio(&self, segment: usize) -> f64 {
        self.segments[segment].mass_ratio
            + self.children[segment]
                .iter()
                .map(|&c| self.subtree_mass_ratio(c))
                .sum::<f64>()
    }

    /// Name of the joint at the proximal end of `segment`, e.g. `Hip->RThigh`.
    /// The root's joint is its contact with the ground.
    pub fn joint_name(&self, segment: usize) -> String {
        let parent = self.parents[segment].map_or("ground", |p| self.segments[p].name.as_str());
        format!("{parent}->{}", self.segments[segment].name)
    }

    /// Looks up a joint by its full name or by the name of its distal segment.
    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.index_of(name)
            .or_else(|| (0..self.len()).find(|&i| self.joint_name(i) == name))
    }

    /// Every landmark name referenced by some segment endpoint.
    pub fn required_landmarks(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .segments
            .iter()
            .flat_map(|s| s.proximal.landmarks().into_iter().chain(s.distal.landmarks()))
            .collect();
        set.into_iter().map(str::to_owned).collect()
    }
}

/// Center-of-gravity trajectories in meters, +y up, indexed `[segment][frame]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCogTrace {
    pub timestamps: Vec<f64>,
    pub positions: Vec<Vec<Vec3>>,
}

impl SegmentCogTrace {
    pub fn frame_count(&self) -> usize {
        self.timestamps.len()
    }

    /// Zeroes the depth (z) component, for traces from monocular 2-D estimation.
    pub fn zero_depth(&mut self) {
        for p in self.positions.iter_mut().flatten() {
            p.z = 0.0;
        }
    }
}

pub fn compute_cog_positions(trace: &LandmarkTrace, model: &BodyModel) -> Result<SegmentCogTrace> {
    let mut positions = Vec::with_capacity(model.len());
    for seg in model.segments() {
        let mut track = Vec::with_capacity(trace.len());
        for frame in 0..trace.len() {
            let missing = |name: &str| Error::MissingLandmark {
                landmark: name.to_owned(),
                frame,
            };
            let proximal = seg.proximal.resolve(trace, frame).map_err(missing)?;
            let distal = seg.distal.resolve(trace, frame).map_err(missing)?;
            let cog = proximal + (distal - proximal) * seg.cog_ratio;
            track.push(trace.up_axis.to_y_up(cog * trace.unit_scale));
        }
        positions.push(track);
    }
    Ok(SegmentCogTrace {
        timestamps: trace.timestamps(),
        positions,
    })
}

/// Mass-weighted mean of the segment CoGs per frame.
pub fn whole_body_com(cogs: &SegmentCogTrace, model: &BodyModel) -> Vec<Vec3> {
    (0..cogs.frame_count())
        .map(|frame| {
            model
                .segments()
                .iter()
                .zip(&cogs.positions)
                .fold(Vec3::zeros(), |acc, (seg, track)| acc + track[frame] * seg.mass_ratio)
        })
        .collect()
}
