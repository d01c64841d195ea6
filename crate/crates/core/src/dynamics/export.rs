use std::path::Path;

use crate::error::{Error, Result};
use crate::Vec3;

use super::inverse::{GrfTrace, JointForceTrace};

/// Column label used for the whole-body ground reaction force.
pub const GRF_COLUMN: &str = "GRF";

/// Per-frame force vectors keyed by joint name, as stored in a force CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceTable {
    pub timestamps: Vec<f64>,
    pub names: Vec<String>,
    /// `[column][row]`.
    pub forces: Vec<Vec<Vec3>>,
}

impl ForceTable {
    pub fn from_traces(joints: &JointForceTrace, grf: Option<&GrfTrace>) -> Self {
        let mut names = joints.joint_names.clone();
        let mut forces = joints.forces.clone();
        if let Some(grf) = grf {
            names.push(GRF_COLUMN.to_owned());
            forces.push(grf.forces.clone());
        }
        Self {
            timestamps: joints.timestamps.clone(),
            names,
            forces,
        }
    }

    pub fn column(&self, name: &str) -> Option<&[Vec3]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.forces[i].as_slice())
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_owned()];
        for name in &self.names {
            header.extend(["fx", "fy", "fz"].map(|c| format!("{name}_{c}")));
        }
        w.write_record(&header).expect("in-memory write");
        for (row, t) in self.timestamps.iter().enumerate() {
            let mut rec = vec![t.to_string()];
            for col in &self.forces {
                let f = col[row];
                rec.extend([f.x, f.y, f.z].map(|v| v.to_string()));
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse {
            what: "force CSV".into(),
            message,
        };
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.get(0) != Some("t") || (header.len() - 1) % 3 != 0 {
            return Err(bad("expected `t` followed by fx/fy/fz triples".into()));
        }
        let names: Vec<String> = header
            .iter()
            .skip(1)
            .step_by(3)
            .map(|h| h.strip_suffix("_fx").unwrap_or(h).to_owned())
            .collect();
        let mut timestamps = Vec::new();
        let mut forces = vec![Vec::new(); names.len()];
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let nums = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            timestamps.push(nums[0]);
            for (k, col) in forces.iter_mut().enumerate() {
                col.push(Vec3::new(nums[1 + 3 * k], nums[2 + 3 * k], nums[3 + 3 * k]));
            }
        }
        Ok(Self {
            timestamps,
            names,
            forces,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }
}

/// Writes `t`, then `fx,fy,fz` per joint (and the GRF when given), one row
/// per valid frame.
pub fn write_forces_csv(
    path: impl AsRef<Path>,
    joints: &JointForceTrace,
    grf: Option<&GrfTrace>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, ForceTable::from_traces(joints, grf).to_csv_string())
        .map_err(|e| Error::io(path, e))
}
