//! Flat `key = value` configuration files.
//!
//! Lengths are in mm and angles in degrees on disk; everything is converted to
//! radians on load. `#` starts a comment. Unknown keys and duplicates are
//! rejected so that typos do not silently fall back to defaults.
//!
//! Geometry keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `L_AB` … `L_GF` | the eleven primitive link lengths |
//! | `l_act`, `l_KN`, `l_LK`, `l_ML` | frame lengths |
//! | `q_KN`, `q_LK`, `q_o1_ref` | frame angles (deg) |
//! | `s_BD`, `s_BH`, `s_FD` | composite signs, `1` or `-1` |
//! | `db_angle` | `as_printed_qK` or `corrected_qB` |
//! | `seed.l_x`, `seed.c_1`, … `seed.q_N` | optional extension-pose guess (angles in deg) |
//!
//! Anthropometry keys: `l_ML`, `l_p2`, `c1_max`, `c2_max`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Anthropometry, DbAngle, Geometry, Link, MechanismState, Sign};
use crate::report::write_atomic;

struct Entry {
    line: usize,
    value: String,
}

struct KeyValues {
    origin: String,
    entries: BTreeMap<String, Entry>,
}

impl KeyValues {
    fn parse(text: &str, origin: &str) -> Result<KeyValues> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(config_error(origin, line, format!("expected `key = value`, got `{content}`")));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(config_error(origin, line, "empty key or value".to_string()));
            }
            if let Some(prev) = entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            ) {
                return Err(config_error(
                    origin,
                    line,
                    format!("duplicate key `{key}` (first on line {})", prev.line),
                ));
            }
        }
        Ok(KeyValues {
            origin: origin.to_string(),
            entries,
        })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        let Some(entry) = self.take(key) else {
            return Ok(None);
        };
        match entry.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(config_error(
                &self.origin,
                entry.line,
                format!("`{key}` is not a finite number: `{}`", entry.value),
            )),
        }
    }

    fn required(&mut self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| config_error(&self.origin, 0, format!("missing key `{key}`")))
    }

    fn finish(self) -> Result<()> {
        if let Some((key, entry)) = self.entries.into_iter().next() {
            return Err(config_error(&self.origin, entry.line, format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

fn config_error(origin: &str, line: usize, message: String) -> Error {
    Error::Config {
        path: origin.to_string(),
        line,
        message,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

const SEED_KEYS: [&str; 8] = [
    "seed.l_x", "seed.c_1", "seed.c_2", "seed.q_B", "seed.q_D", "seed.q_G", "seed.q_K", "seed.q_N",
];

fn sign(kv: &mut KeyValues, key: &str) -> Result<Sign> {
    let line = kv.entries.get(key).map_or(0, |e| e.line);
    let v = kv.required(key)?;
    Sign::from_value(v).ok_or_else(|| config_error(&kv.origin, line, format!("`{key}` must be 1 or -1, got {v}")))
}

/// Parse geometry text. `origin` names the source in error messages.
pub fn parse_geometry(text: &str, origin: &str) -> Result<Geometry> {
    let mut kv = KeyValues::parse(text, origin)?;
    let mut lengths = [0.0; 11];
    for link in Link::ALL {
        lengths[link as usize] = kv.required(link.name())?;
    }
    let l_act = kv.required("l_act")?;
    let l_kn = kv.required("l_KN")?;
    let q_kn = kv.required("q_KN")?.to_radians();
    let l_lk = kv.required("l_LK")?;
    let q_lk = kv.required("q_LK")?.to_radians();
    let l_ml = kv.required("l_ML")?;
    let q_o1_ref = kv.required("q_o1_ref")?.to_radians();
    let mut geom = Geometry::new(lengths, l_act, l_kn, q_kn, l_lk, q_lk, l_ml, q_o1_ref);
    geom.s_bd = sign(&mut kv, "s_BD")?;
    geom.s_bh = sign(&mut kv, "s_BH")?;
    geom.s_fd = sign(&mut kv, "s_FD")?;
    if let Some(entry) = kv.take("db_angle") {
        geom.db_angle = DbAngle::from_name(&entry.value).ok_or_else(|| {
            config_error(
                origin,
                entry.line,
                format!("`db_angle` must be as_printed_qK or corrected_qB, got `{}`", entry.value),
            )
        })?;
    }

    let mut seed = [None; 8];
    for (i, key) in SEED_KEYS.iter().enumerate() {
        seed[i] = kv.number(key)?;
    }
    if seed.iter().any(Option::is_some) {
        let mut values = [0.0; 8];
        for (i, v) in seed.iter().enumerate() {
            let v = v.ok_or_else(|| config_error(origin, 0, format!("seed is incomplete: missing `{}`", SEED_KEYS[i])))?;
            values[i] = if MechanismState::ANGLES.contains(&i) { v.to_radians() } else { v };
        }
        geom.seed = Some(MechanismState::from_array(values));
    }
    kv.finish()?;
    geom.validate()
        .map_err(|e| config_error(origin, 0, e.to_string()))?;
    Ok(geom)
}

/// Text of the bundled reference geometry.
pub const REFERENCE_GEOMETRY: &str = include_str!("../../../reference_index.cfg");

/// The bundled reference geometry, with its extension-pose seed.
pub fn reference_geometry() -> Geometry {
    parse_geometry(REFERENCE_GEOMETRY, "reference_index.cfg").expect("bundled reference geometry parses")
}

pub fn load_geometry(path: &Path) -> Result<Geometry> {
    parse_geometry(&read(path)?, &path.display().to_string())
}

/// Render a geometry in the format accepted by [`parse_geometry`].
pub fn geometry_to_string(geom: &Geometry) -> String {
    let mut out = String::new();
    out.push_str("# link lengths (mm)\n");
    for link in Link::ALL {
        let _ = writeln!(out, "{} = {}", link.name(), geom.link(link));
    }
    out.push_str("\n# frame constants (mm, deg)\n");
    let _ = writeln!(out, "l_act = {}", geom.l_act);
    let _ = writeln!(out, "l_KN = {}", geom.l_kn);
    let _ = writeln!(out, "q_KN = {}", geom.q_kn.to_degrees());
    let _ = writeln!(out, "l_LK = {}", geom.l_lk);
    let _ = writeln!(out, "q_LK = {}", geom.q_lk.to_degrees());
    let _ = writeln!(out, "l_ML = {}", geom.l_ml);
    let _ = writeln!(out, "q_o1_ref = {}", geom.q_o1_ref.to_degrees());
    out.push_str("\n# composite conventions\n");
    let _ = writeln!(out, "s_BD = {}", geom.s_bd.value());
    let _ = writeln!(out, "s_BH = {}", geom.s_bh.value());
    let _ = writeln!(out, "s_FD = {}", geom.s_fd.value());
    let _ = writeln!(out, "db_angle = {}", geom.db_angle.name());
    if let Some(seed) = &geom.seed {
        out.push_str("\n# solver seed at full extension (mm, deg)\n");
        for (i, v) in seed.to_array().iter().enumerate() {
            let v = if MechanismState::ANGLES.contains(&i) { v.to_degrees() } else { *v };
            let _ = writeln!(out, "{} = {}", SEED_KEYS[i], v);
        }
    }
    out
}

pub fn write_geometry(path: &Path, geom: &Geometry) -> Result<()> {
    write_atomic(path, geometry_to_string(geom).as_bytes())
}

pub fn parse_anthropometry(text: &str, origin: &str) -> Result<Anthropometry> {
    let mut kv = KeyValues::parse(text, origin)?;
    let anthro = Anthropometry {
        l_ml: kv.required("l_ML")?,
        l_p2: kv.required("l_p2")?,
        c1_max: kv.required("c1_max")?,
        c2_max: kv.required("c2_max")?,
    };
    kv.finish()?;
    anthro
        .validate()
        .map_err(|e| config_error(origin, 0, e.to_string()))?;
    Ok(anthro)
}

pub fn load_anthropometry(path: &Path) -> Result<Anthropometry> {
    parse_anthropometry(&read(path)?, &path.display().to_string())
}

/// A preset name (`small`, `medium`, `big`) or a path to an anthropometry file.
pub fn resolve_anthropometry(spec: &str) -> Result<Anthropometry> {
    match Anthropometry::preset(spec) {
        Some(a) => Ok(a),
        None => load_anthropometry(Path::new(spec)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Geometry {
        let lengths = [20.0, 42.0, 10.0, 16.0, 32.0, 30.0, 37.0, 35.0, 72.0, 86.0, 36.0];
        let mut g = Geometry::new(lengths, 61.25, 9.5, 2.7314, 9.055, 1.6815, 50.0, std::f64::consts::PI);
        g.seed = Some(MechanismState::from_array([3.0, 14.0, 8.0, 0.1, -0.2, 2.9, 2.7, -1.0]));
        g
    }

    #[test]
    fn bundled_reference_has_a_seed() {
        let g = reference_geometry();
        assert!(g.seed.is_some());
        assert_eq!(g.link(Link::AB), 20.0);
    }

    #[test]
    fn round_trip_preserves_values() {
        let g = sample();
        let back = parse_geometry(&geometry_to_string(&g), "mem").unwrap();
        assert_eq!(back.lengths(), g.lengths());
        assert_eq!(back.l_act, g.l_act);
        assert!((back.q_kn - g.q_kn).abs() < 1e-12);
        assert!((back.q_lk - g.q_lk).abs() < 1e-12);
        assert!((back.q_o1_ref - g.q_o1_ref).abs() < 1e-12);
        assert_eq!(back.s_bd, g.s_bd);
        assert_eq!(back.db_angle, g.db_angle);
        let (a, b) = (back.seed.unwrap().to_array(), g.seed.unwrap().to_array());
        for i in 0..8 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn degrees_on_disk_radians_in_memory() {
        let text = geometry_to_string(&sample()).replace("q_o1_ref = 180", "q_o1_ref = 90");
        let g = parse_geometry(&text, "mem").unwrap();
        assert!((g.q_o1_ref - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(geometry_to_string(&g).contains("q_o1_ref = 90\n"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = geometry_to_string(&sample()).replace("L_CD = 10", "L_CD = ten");
        match parse_geometry(&text, "ref.cfg") {
            Err(Error::Config { path, line, .. }) => {
                assert_eq!(path, "ref.cfg");
                assert_eq!(line, 4);
            }
            other => panic!("{other:?}"),
        }
        let text = format!("{}\nL_XY = 3\n", geometry_to_string(&sample()));
        assert!(matches!(parse_geometry(&text, "x"), Err(Error::Config { .. })));
        let text = format!("{}\nL_AB = 3\n", geometry_to_string(&sample()));
        assert!(matches!(parse_geometry(&text, "x"), Err(Error::Config { .. })));
        let text = geometry_to_string(&sample()).replace("s_BD = -1", "s_BD = 2");
        assert!(matches!(parse_geometry(&text, "x"), Err(Error::Config { .. })));
    }

    #[test]
    fn invalid_geometry_is_a_config_error() {
        let text = geometry_to_string(&sample()).replace("L_KB = 35", "L_KB = 80");
        let err = parse_geometry(&text, "x").unwrap_err();
        assert!(!err.is_domain());
    }

    #[test]
    fn anthropometry_files_and_presets() {
        let a = parse_anthropometry("l_ML = 52\nl_p2 = 31 # custom\nc1_max = 50\nc2_max = 40\n", "a").unwrap();
        assert_eq!(a.l_ml, 52.0);
        assert_eq!(resolve_anthropometry("big").unwrap(), Anthropometry::BIG);
        assert!(parse_anthropometry("l_ML = 52\n", "a").is_err());
        assert!(matches!(resolve_anthropometry("/nonexistent/hand.cfg"), Err(Error::Io { .. })));
    }
}
