//! Device catalog and architecture profiles, with optional overrides from a
//! TOML file for what-if studies.
//!
//! File schema:
//!
//! ```toml
//! [[device]]
//! part = "xcvu35p-fsvh-2"
//! family = "US+"              # "V7" or "US+"
//! bram_count = 1344
//! lut_bram_ratio = 651
//! base_bram_freq_mhz = 737.0
//! id = "U50"
//!
//! [[arch]]                     # partial overrides of a built-in profile
//! name = "CCB"
//! clock_overhead = 0.45
//! ```
//!
//! Devices are matched by `id`: existing entries are replaced, new ones
//! appended. Architecture entries patch only the fields they set.

use std::path::Path;

use serde::Deserialize;

use picaso_core::perfmodel::{builtin_devices, ArchId, ArchProfile, DeviceProfile, Family};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Catalog {
    pub devices: Vec<DeviceProfile>,
    pub profiles: Vec<ArchProfile>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Catalog {
    pub fn builtin() -> Self {
        Catalog {
            devices: builtin_devices(),
            profiles: ArchProfile::all_builtin(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let mut catalog = Catalog::builtin();
        catalog.apply(&text)?;
        Ok(catalog)
    }

    /// Looks a device up by id or part name, case-insensitively.
    pub fn device(&self, key: &str) -> Result<&DeviceProfile, CliError> {
        self.devices
            .iter()
            .find(|d| d.id.eq_ignore_ascii_case(key) || d.part.eq_ignore_ascii_case(key))
            .ok_or_else(|| CliError::Usage(format!("unknown device '{key}'")))
    }

    pub fn profile(&self, id: ArchId) -> &ArchProfile {
        self.profiles
            .iter()
            .find(|p| p.id == id)
            .expect("catalog holds a profile per architecture")
    }

    fn apply(&mut self, text: &str) -> Result<(), CliError> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("catalog: {e}")))?;
        for entry in file.device {
            let family = match entry.family.as_str() {
                "V7" => Family::Virtex7,
                "US+" => Family::UltrascalePlus,
                other => {
                    return Err(CliError::Usage(format!(
                        "catalog: unknown family '{other}' (expected V7 or US+)"
                    )))
                }
            };
            let profile = DeviceProfile {
                part: entry.part,
                family,
                bram_count: entry.bram_count,
                lut_bram_ratio: entry.lut_bram_ratio,
                base_bram_freq_mhz: entry.base_bram_freq_mhz,
                id: entry.id,
            };
            match self.devices.iter_mut().find(|d| d.id == profile.id) {
                Some(slot) => *slot = profile,
                None => self.devices.push(profile),
            }
        }
        for entry in file.arch {
            let id = ArchId::parse(&entry.name)
                .ok_or_else(|| CliError::Usage(format!("catalog: unknown arch '{}'", entry.name)))?;
            let profile = self
                .profiles
                .iter_mut()
                .find(|p| p.id == id)
                .expect("all architectures are built in");
            if let Some(v) = entry.clock_overhead {
                profile.clock_overhead = v;
            }
            if let Some(v) = entry.macs_per_bram {
                profile.macs_per_bram = v;
            }
            if let Some(v) = entry.bitline_depth {
                profile.bitline_depth = v;
            }
            if let Some(v) = entry.reserved_wordlines_per_bit {
                profile.reserved_wordlines_per_bit = v;
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct CatalogFile {
    #[serde(default)]
    device: Vec<DeviceEntry>,
    #[serde(default)]
    arch: Vec<ArchEntry>,
}

#[derive(Deserialize)]
struct DeviceEntry {
    part: String,
    family: String,
    bram_count: u32,
    lut_bram_ratio: u32,
    base_bram_freq_mhz: f64,
    id: String,
}

#[derive(Deserialize)]
struct ArchEntry {
    name: String,
    clock_overhead: Option<f64>,
    macs_per_bram: Option<u32>,
    bitline_depth: Option<u32>,
    reserved_wordlines_per_bit: Option<u32>,
}
