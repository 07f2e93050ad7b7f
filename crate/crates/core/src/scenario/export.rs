//! Plot-ready output files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::PhotonEvent;
use crate::error::{Error, Result};
use crate::field::{IntensityMap, Profile};

use super::report::RunReport;

/// Everything a scenario leaves behind besides its report.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    /// 2-D planes; each gives `<name>.csv` (y = 0 cut) and `<name>.pgm`.
    pub planes: Vec<(String, IntensityMap)>,
    /// Extra 1-D cuts written as `<name>.csv`.
    pub profiles: Vec<(String, Profile)>,
    pub events: Vec<PhotonEvent>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn profile_csv(profile: &Profile) -> String {
    let mut s = String::with_capacity(32 * profile.len() + 16);
    s.push_str("x_m,intensity\n");
    for (x, v) in profile.x.iter().zip(&profile.values) {
        s.push_str(&format!("{x:e},{v:e}\n"));
    }
    s
}

/// Binary 16-bit greymap, top row at the largest y, linear in intensity
/// with the plane maximum at 65535.
pub fn pgm_bytes(map: &IntensityMap) -> Vec<u8> {
    let grid = map.grid();
    let header = format!("P5\n{} {}\n65535\n", grid.nx, grid.ny);
    let mut out = Vec::with_capacity(header.len() + 2 * grid.len());
    out.extend_from_slice(header.as_bytes());
    let max = map.max();
    let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
    for j in (0..grid.ny).rev() {
        for i in 0..grid.nx {
            let level = (map.at(i, j) * scale).round().clamp(0.0, 65535.0) as u16;
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    out
}

pub fn events_csv(events: &[PhotonEvent]) -> String {
    let mut s = String::with_capacity(48 * events.len() + 32);
    s.push_str("event_id,plane,x_m,y_m\n");
    for e in events {
        s.push_str(&format!("{},{},{:e},{:e}\n", e.event_id, e.plane, e.x, e.y));
    }
    s
}

/// Writes profiles, images, events, `summary.csv` and `report.txt` into
/// `dir`, creating it if needed. Returns the written paths.
pub fn export_outputs(
    report: &RunReport,
    artifacts: &Artifacts,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    for (name, map) in &artifacts.planes {
        let unit = map.normalized()?;
        put(
            format!("{name}.csv"),
            profile_csv(&unit.cut_y0()).as_bytes(),
        )?;
        put(format!("{name}.pgm"), &pgm_bytes(map))?;
    }
    for (name, profile) in &artifacts.profiles {
        put(format!("{name}.csv"), profile_csv(profile).as_bytes())?;
    }
    if !artifacts.events.is_empty() {
        put(
            "events.csv".into(),
            events_csv(&artifacts.events).as_bytes(),
        )?;
    }
    put("summary.csv".into(), report.summary_csv().as_bytes())?;
    put("report.txt".into(), report.to_string().as_bytes())?;
    Ok(written)
}
