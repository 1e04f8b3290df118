//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Sections: `geometry`, `material`, `shell`, `load`, `constraints`,
//! `stepping`, `output`. Unknown sections and keys are errors.

use std::collections::BTreeMap;

use klshell::constitution::Pipeline;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryKind {
    /// Flat strip `W × L`, length along `e2`.
    Strip,
    /// Quarter of a square plate, clamped on `x = 0`, `y = 0`.
    PlateQuarter,
    /// Quarter of a square sheet with symmetry on `x = 0`, `y = 0`.
    SheetQuarter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub thickness: f64,
    /// Strip width; unused for square sheets.
    pub width: f64,
    /// Strip length or full side of the square.
    pub length: f64,
    pub nel_w: usize,
    pub nel_l: usize,
    /// Coarsest-to-finest element ratio, graded toward the origin.
    pub grading: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialBlock {
    pub model: String,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub mu: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub kappa: f64,
    /// Fiber angles in degrees from the `e2` axis toward `e1`.
    pub fiber_angles: Vec<f64>,
    pub switch: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadSpec {
    /// Corner force along `e2` up to `F = ratio · E · W · T`.
    CornerForce { force_ratio: f64 },
    /// End normal rotated about `e1` up to `angle_deg`.
    EndRotation { angle_deg: f64 },
    /// Follower pressure up to `pressure` [kPa].
    Pressure { pressure: f64 },
    /// Rigid sphere of radius `radius_ratio · L` pressed to `depth_ratio · L`.
    Indentation {
        depth_ratio: f64,
        radius_ratio: f64,
        penalty_factor: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterEdges {
    Clamped,
    Pinned,
}

/// Root of a cantilever strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    /// Axial displacement and the rotation about the edge are held; the
    /// cross-section may contract and curl.
    Beam,
    /// Every control point of the edge row is fixed and the normal is held.
    Fixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraints {
    /// Rotation penalty as a multiple of `E T³`.
    pub rotation_penalty: f64,
    pub outer_edges: OuterEdges,
    pub root: RootKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stepping {
    pub steps: usize,
    pub max_iterations: usize,
    /// Absolute tolerance as a multiple of `E T L`.
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_bisections: usize,
    /// Stall tolerance as a multiple of `E T L`; defaults to `tol_abs`.
    pub tol_stall: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub geometry: Geometry,
    pub material: MaterialBlock,
    pub pipeline: Pipeline,
    pub load: LoadSpec,
    pub constraints: Constraints,
    pub stepping: Stepping,
}

struct Entry {
    value: String,
    line: usize,
    column: usize,
}

type Sections = BTreeMap<String, (usize, BTreeMap<String, Entry>)>;

const KEYS: &[(&str, &[&str])] = &[
    (
        "geometry",
        &[
            "kind",
            "thickness",
            "width",
            "length",
            "nel_w",
            "nel_l",
            "grading",
        ],
    ),
    (
        "material",
        &[
            "model",
            "c1",
            "c2",
            "c3",
            "mu",
            "k1",
            "k2",
            "kappa",
            "fiber_angles",
            "switch",
        ],
    ),
    ("shell", &["pipeline", "gauss_points"]),
    (
        "load",
        &[
            "type",
            "force_ratio",
            "angle_deg",
            "pressure",
            "depth_ratio",
            "radius_ratio",
            "penalty_factor",
        ],
    ),
    ("constraints", &["rotation_penalty", "outer_edges", "root"]),
    (
        "stepping",
        &[
            "steps",
            "max_iterations",
            "tol_abs",
            "tol_rel",
            "max_bisections",
            "tol_stall",
        ],
    ),
    ("output", &["name"]),
];

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Sections, ParseError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col0 = content.find(trimmed).unwrap_or(0) + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, col0, "unterminated section header"))?
                .trim()
                .to_string();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(err(line, col0 + 1, format!("unknown section `{name}`")));
            }
            if sections.contains_key(&name) {
                return Err(err(line, col0 + 1, format!("duplicate section `{name}`")));
            }
            sections.insert(name.clone(), (line, BTreeMap::new()));
            current = Some(name);
            continue;
        }
        let Some((k, v)) = trimmed.split_once('=') else {
            return Err(err(line, col0, "expected `key = value`"));
        };
        let key = k.trim().to_string();
        let section = current
            .as_ref()
            .ok_or_else(|| err(line, col0, "key outside of a section"))?;
        let allowed = KEYS
            .iter()
            .find(|(s, _)| s == section)
            .map(|(_, k)| *k)
            .unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            return Err(err(
                line,
                col0,
                format!("unknown key `{key}` in section `{section}`"),
            ));
        }
        let vcol = col0 + trimmed.find('=').unwrap_or(0) + 1 + (v.len() - v.trim_start().len());
        let map = &mut sections.get_mut(section).expect("section exists").1;
        if map.contains_key(&key) {
            return Err(err(line, col0, format!("duplicate key `{key}`")));
        }
        map.insert(
            key,
            Entry {
                value: v.trim().to_string(),
                line,
                column: vcol,
            },
        );
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    line: usize,
    map: Option<&'a BTreeMap<String, Entry>>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.map.and_then(|m| m.get(key))
    }

    fn str_or(&self, key: &str, default: Option<&str>) -> Result<String, ParseError> {
        match (self.raw(key), default) {
            (Some(e), _) => Ok(e.value.clone()),
            (None, Some(d)) => Ok(d.to_string()),
            (None, None) => Err(err(
                self.line,
                1,
                format!("missing key `{key}` in section `{}`", self.name),
            )),
        }
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T, ParseError> {
        match self.raw(key) {
            Some(e) => e.value.parse::<T>().map_err(|_| {
                err(
                    e.line,
                    e.column,
                    format!("invalid value `{}` for `{key}`", e.value),
                )
            }),
            None => default.ok_or_else(|| {
                err(
                    self.line,
                    1,
                    format!("missing key `{key}` in section `{}`", self.name),
                )
            }),
        }
    }

    fn opt_num(&self, key: &str) -> Result<Option<f64>, ParseError> {
        self.raw(key)
            .map(|_| self.num::<f64>(key, None))
            .transpose()
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<f64, ParseError> {
        let v = self.num::<f64>(key, default)?;
        if !(v > 0.0) || !v.is_finite() {
            let (l, c) = self.raw(key).map_or((self.line, 1), |e| (e.line, e.column));
            return Err(err(l, c, format!("`{key}` must be positive")));
        }
        Ok(v)
    }

    fn choice<'c>(
        &self,
        key: &str,
        default: Option<&str>,
        options: &[&'c str],
    ) -> Result<&'c str, ParseError> {
        let v = self.str_or(key, default)?;
        options.iter().copied().find(|o| *o == v).ok_or_else(|| {
            let (l, c) = self.raw(key).map_or((self.line, 1), |e| (e.line, e.column));
            err(
                l,
                c,
                format!("`{key}` must be one of {options:?}, got `{v}`"),
            )
        })
    }
}

/// Parse a scenario; `name` is used when the file has no `[output] name`.
pub fn parse_scenario(text: &str, name: &str) -> Result<Scenario, ParseError> {
    let sections = tokenize(text)?;
    let get = |n: &'static str| {
        let s = sections.get(n);
        Section {
            name: n,
            line: s.map_or(1, |s| s.0),
            map: s.map(|s| &s.1),
        }
    };
    for required in ["geometry", "material", "load"] {
        if !sections.contains_key(required) {
            return Err(err(1, 1, format!("missing section `[{required}]`")));
        }
    }
    let g = get("geometry");
    let kind = match g.choice("kind", None, &["strip", "plate_quarter", "sheet_quarter"])? {
        "strip" => GeometryKind::Strip,
        "plate_quarter" => GeometryKind::PlateQuarter,
        _ => GeometryKind::SheetQuarter,
    };
    let length = g.positive("length", None)?;
    let geometry = Geometry {
        kind,
        thickness: g.positive("thickness", None)?,
        width: if kind == GeometryKind::Strip {
            g.positive("width", None)?
        } else {
            length
        },
        length,
        nel_w: g.num("nel_w", Some(6))?,
        nel_l: g.num("nel_l", Some(6))?,
        grading: g.num("grading", Some(1.0))?,
    };
    if geometry.nel_w == 0 || geometry.nel_l == 0 {
        return Err(err(g.line, 1, "element counts must be at least 1"));
    }
    if !(geometry.grading >= 1.0) {
        let (l, c) = g.raw("grading").map_or((g.line, 1), |e| (e.line, e.column));
        return Err(err(l, c, "`grading` must be at least 1"));
    }

    let m = get("material");
    let model = m
        .choice("model", None, &["nh", "mr", "fung", "amr", "goh"])?
        .to_string();
    let fiber_angles = match m.raw("fiber_angles") {
        None => vec![],
        Some(e) => e
            .value
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| {
                err(
                    e.line,
                    e.column,
                    format!("invalid fiber angle list `{}`", e.value),
                )
            })?,
    };
    let material = MaterialBlock {
        model,
        c1: m.opt_num("c1")?,
        c2: m.opt_num("c2")?,
        c3: m.opt_num("c3")?,
        mu: m.opt_num("mu")?,
        k1: m.opt_num("k1")?,
        k2: m.opt_num("k2")?,
        kappa: m.num("kappa", Some(0.0))?,
        fiber_angles,
        switch: m.choice("switch", Some("false"), &["true", "false"])? == "true",
    };

    let s = get("shell");
    let gauss: Option<usize> = s
        .raw("gauss_points")
        .map(|_| s.num("gauss_points", None))
        .transpose()?;
    let pipeline = match s.choice("pipeline", Some("ap"), &["np", "ap", "dd"])? {
        "np" => Pipeline::Np {
            n_gp: gauss.unwrap_or(if material.switch { 5 } else { 2 }),
        },
        "ap" => Pipeline::Ap,
        _ => Pipeline::Dd,
    };
    if let Pipeline::Np { n_gp: 0 } = pipeline {
        return Err(err(s.line, 1, "`gauss_points` must be at least 1"));
    }

    let l = get("load");
    let load = match l.choice(
        "type",
        None,
        &["corner_force", "end_rotation", "pressure", "indentation"],
    )? {
        "corner_force" => LoadSpec::CornerForce {
            force_ratio: l.positive("force_ratio", None)?,
        },
        "end_rotation" => LoadSpec::EndRotation {
            angle_deg: l.positive("angle_deg", None)?,
        },
        "pressure" => LoadSpec::Pressure {
            pressure: l.num("pressure", None)?,
        },
        _ => LoadSpec::Indentation {
            depth_ratio: l.positive("depth_ratio", None)?,
            radius_ratio: l.positive("radius_ratio", Some(1.0 / 6.0))?,
            penalty_factor: l.positive("penalty_factor", Some(1e8))?,
        },
    };

    let c = get("constraints");
    let constraints = Constraints {
        rotation_penalty: c.positive("rotation_penalty", Some(1e3))?,
        outer_edges: match c.choice("outer_edges", Some("pinned"), &["pinned", "clamped"])? {
            "clamped" => OuterEdges::Clamped,
            _ => OuterEdges::Pinned,
        },
        root: match c.choice("root", Some("beam"), &["beam", "fixed"])? {
            "fixed" => RootKind::Fixed,
            _ => RootKind::Beam,
        },
    };

    let st = get("stepping");
    let tol_abs = st.positive("tol_abs", Some(1e-8))?;
    let stepping = Stepping {
        steps: st.num("steps", Some(20))?,
        max_iterations: st.num("max_iterations", Some(30))?,
        tol_abs,
        tol_stall: st.positive("tol_stall", Some(tol_abs))?,
        tol_rel: st.positive("tol_rel", Some(1e-10))?,
        max_bisections: st.num("max_bisections", Some(8))?,
    };
    if stepping.steps == 0 {
        return Err(err(st.line, 1, "`steps` must be at least 1"));
    }
    let o = get("output");
    let name = o.str_or("name", Some(name))?;
    Ok(Scenario {
        name,
        geometry,
        material,
        pipeline,
        load,
        constraints,
        stepping,
    })
}
