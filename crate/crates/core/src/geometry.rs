//! Link lengths, frame constants and the state types of one finger mechanism.
//!
//! Units are millimetres and radians throughout. Degrees only appear at the
//! file and command-line boundary.

use std::fmt;

use crate::error::{Error, Result};

/// The eleven primitive segment lengths of the linkage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Link {
    AB,
    BC,
    CD,
    CI,
    ED,
    EF,
    EJ,
    KB,
    KH,
    GH,
    GF,
}

impl Link {
    pub const ALL: [Link; 11] = [
        Link::AB,
        Link::BC,
        Link::CD,
        Link::CI,
        Link::ED,
        Link::EF,
        Link::EJ,
        Link::KB,
        Link::KH,
        Link::GH,
        Link::GF,
    ];

    /// Name as used in configuration files and reports, e.g. `L_EJ`.
    pub fn name(self) -> &'static str {
        match self {
            Link::AB => "L_AB",
            Link::BC => "L_BC",
            Link::CD => "L_CD",
            Link::CI => "L_CI",
            Link::ED => "L_ED",
            Link::EF => "L_EF",
            Link::EJ => "L_EJ",
            Link::KB => "L_KB",
            Link::KH => "L_KH",
            Link::GH => "L_GH",
            Link::GF => "L_GF",
        }
    }

    pub fn from_name(name: &str) -> Option<Link> {
        Link::ALL.into_iter().find(|l| l.name() == name)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Orientation of a segment composed from two collinear primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Option<Sign> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// Which angle carries the D→B segment in the fourth closure loop.
///
/// The printed loop writes it along `q_K`; the loop through B and D in the
/// third loop puts the same segment along `q_B`. Both are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbAngle {
    AsPrintedQk,
    CorrectedQb,
}

impl DbAngle {
    pub fn name(self) -> &'static str {
        match self {
            DbAngle::AsPrintedQk => "as_printed_qK",
            DbAngle::CorrectedQb => "corrected_qB",
        }
    }

    pub fn from_name(name: &str) -> Option<DbAngle> {
        match name {
            "as_printed_qK" => Some(DbAngle::AsPrintedQk),
            "corrected_qB" => Some(DbAngle::CorrectedQb),
            _ => None,
        }
    }
}

/// The eight closure unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MechanismState {
    /// Actuator stroke (mm).
    pub l_x: f64,
    /// Slider travel along the proximal phalanx (mm).
    pub c1: f64,
    /// Slider travel along the intermediate phalanx (mm).
    pub c2: f64,
    pub q_b: f64,
    pub q_d: f64,
    pub q_g: f64,
    pub q_k: f64,
    pub q_n: f64,
}

impl MechanismState {
    /// Column order used by every vector and matrix in the crate.
    pub const NAMES: [&'static str; 8] = ["l_x", "c_1", "c_2", "q_B", "q_D", "q_G", "q_K", "q_N"];

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.l_x, self.c1, self.c2, self.q_b, self.q_d, self.q_g, self.q_k, self.q_n,
        ]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        MechanismState {
            l_x: v[0],
            c1: v[1],
            c2: v[2],
            q_b: v[3],
            q_d: v[4],
            q_g: v[5],
            q_k: v[6],
            q_n: v[7],
        }
    }

    /// Indices of the angular entries in [`MechanismState::to_array`] order.
    pub const ANGLES: [usize; 5] = [3, 4, 5, 6, 7];

    /// Largest absolute angle change relative to `other`, wrapped to (-π, π].
    pub fn max_angle_jump(&self, other: &MechanismState) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        Self::ANGLES
            .iter()
            .map(|&i| wrap_angle(a[i] - b[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Wrap an angle to (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Geometry of one finger mechanism: primitive lengths, frame constants and
/// the composite sign conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    lengths: [f64; 11],
    /// Actuator body length between N and the zero-stroke point O (mm).
    pub l_act: f64,
    /// Offset K→N of the actuator base pivot.
    pub l_kn: f64,
    pub q_kn: f64,
    /// Offset L→K from the MCP joint to the base pivot K.
    pub l_lk: f64,
    pub q_lk: f64,
    /// Proximal phalanx length MCP→PIP (mm); enters the third loop.
    pub l_ml: f64,
    /// Orientation `q_o1` of the proximal phalanx at full extension.
    pub q_o1_ref: f64,
    pub s_bd: Sign,
    pub s_bh: Sign,
    pub s_fd: Sign,
    pub db_angle: DbAngle,
    /// Extension-pose initial guess for the closure solver.
    pub seed: Option<MechanismState>,
}

/// Segment lengths derived from collinear primitives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedSegments {
    pub l_bd: f64,
    pub l_bh: f64,
    pub l_hg: f64,
    pub l_fd: f64,
    /// A→D along the rocker. Not used by the closure loops.
    pub l_ad: f64,
}

impl Geometry {
    /// Build a geometry from primitive lengths in [`Link::ALL`] order and the
    /// frame constants. Composite signs default to the reference convention.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lengths: [f64; 11],
        l_act: f64,
        l_kn: f64,
        q_kn: f64,
        l_lk: f64,
        q_lk: f64,
        l_ml: f64,
        q_o1_ref: f64,
    ) -> Self {
        Geometry {
            lengths,
            l_act,
            l_kn,
            q_kn,
            l_lk,
            q_lk,
            l_ml,
            q_o1_ref,
            s_bd: Sign::Minus,
            s_bh: Sign::Minus,
            s_fd: Sign::Plus,
            db_angle: DbAngle::AsPrintedQk,
            seed: None,
        }
    }

    pub fn link(&self, link: Link) -> f64 {
        self.lengths[link as usize]
    }

    pub fn set_link(&mut self, link: Link, value: f64) {
        self.lengths[link as usize] = value;
    }

    pub fn with_link(mut self, link: Link, value: f64) -> Self {
        self.set_link(link, value);
        self
    }

    pub fn lengths(&self) -> [f64; 11] {
        self.lengths
    }

    /// Check primitive lengths and composite segments.
    pub fn validate(&self) -> Result<DerivedSegments> {
        for link in Link::ALL {
            let v = self.link(link);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidGeometry(format!("{link} must be positive, got {v}")));
            }
        }
        if !(self.l_ml > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "l_ML must be positive, got {}",
                self.l_ml
            )));
        }
        composite_lengths(self)
    }

    /// Every length (primitive, frame, phalanx and seed strokes) multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Geometry {
        let mut g = self.clone();
        for v in g.lengths.iter_mut() {
            *v *= k;
        }
        g.l_act *= k;
        g.l_kn *= k;
        g.l_lk *= k;
        g.l_ml *= k;
        if let Some(s) = g.seed.as_mut() {
            s.l_x *= k;
            s.c1 *= k;
            s.c2 *= k;
        }
        g
    }

    /// Use the proximal phalanx length of the given hand.
    pub fn with_anthropometry(mut self, anthro: &Anthropometry) -> Self {
        self.l_ml = anthro.l_ml;
        self
    }
}

/// Derive the composite segments used by the closure loops.
///
/// `l_BD = L_BC + s_BD·L_CD`, `l_BH = L_KH + s_BH·L_KB`, `l_HG = L_GH`,
/// `l_FD = L_ED + s_FD·L_EF`, `l_AD = L_AB + l_BD`.
pub fn composite_lengths(geom: &Geometry) -> Result<DerivedSegments> {
    let l_bd = geom.link(Link::BC) + geom.s_bd.value() * geom.link(Link::CD);
    let l_bh = geom.link(Link::KH) + geom.s_bh.value() * geom.link(Link::KB);
    let l_hg = geom.link(Link::GH);
    let l_fd = geom.link(Link::ED) + geom.s_fd.value() * geom.link(Link::EF);
    let l_ad = geom.link(Link::AB) + l_bd;
    for (name, value) in [
        ("l_BD", l_bd),
        ("l_BH", l_bh),
        ("l_HG", l_hg),
        ("l_FD", l_fd),
        ("l_AD", l_ad),
    ] {
        if !(value > 0.0) {
            return Err(Error::NonPositiveComposite { name, value });
        }
    }
    Ok(DerivedSegments {
        l_bd,
        l_bh,
        l_hg,
        l_fd,
        l_ad,
    })
}

/// Finger pose as absolute orientations of the two driven phalanges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerPose {
    pub q_o1: f64,
    pub q_o2: f64,
}

impl FingerPose {
    /// Convert anatomical joint angles (degrees, flexion positive) to
    /// absolute orientations: `q_o1 = ref - θ_MCP`, `q_o2 = q_o1 - θ_PIP`.
    pub fn from_anatomical_deg(q_o1_ref: f64, mcp_deg: f64, pip_deg: f64) -> FingerPose {
        let q_o1 = q_o1_ref - mcp_deg.to_radians();
        FingerPose {
            q_o1,
            q_o2: q_o1 - pip_deg.to_radians(),
        }
    }

    /// Inverse of [`FingerPose::from_anatomical_deg`], in radians.
    pub fn to_anatomical(&self, q_o1_ref: f64) -> (f64, f64) {
        (q_o1_ref - self.q_o1, self.q_o1 - self.q_o2)
    }

    pub fn to_anatomical_deg(&self, q_o1_ref: f64) -> (f64, f64) {
        let (m, p) = self.to_anatomical(q_o1_ref);
        (m.to_degrees(), p.to_degrees())
    }

    /// True when the anatomical angles lie within the natural range of motion
    /// (MCP 0–85°, PIP 0–100°).
    pub fn within_natural_rom(&self, q_o1_ref: f64) -> bool {
        let (m, p) = self.to_anatomical_deg(q_o1_ref);
        let eps = 1e-9;
        (-eps..=85.0 + eps).contains(&m) && (-eps..=100.0 + eps).contains(&p)
    }
}

/// Convert anatomical angles to a pose using the geometry's extension reference.
pub fn anatomical_to_internal(geom: &Geometry, mcp_deg: f64, pip_deg: f64) -> FingerPose {
    FingerPose::from_anatomical_deg(geom.q_o1_ref, mcp_deg, pip_deg)
}

/// Phalanx measurements and slider limits of one hand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anthropometry {
    /// Proximal phalanx, MCP→PIP (mm).
    pub l_ml: f64,
    /// Usable intermediate phalanx length (mm).
    pub l_p2: f64,
    pub c1_max: f64,
    pub c2_max: f64,
}

impl Anthropometry {
    pub const SMALL: Anthropometry = Anthropometry {
        l_ml: 45.0,
        l_p2: 27.0,
        c1_max: 50.0,
        c2_max: 40.0,
    };
    pub const MEDIUM: Anthropometry = Anthropometry {
        l_ml: 50.0,
        l_p2: 30.0,
        c1_max: 50.0,
        c2_max: 40.0,
    };
    pub const BIG: Anthropometry = Anthropometry {
        l_ml: 55.0,
        l_p2: 34.0,
        c1_max: 50.0,
        c2_max: 40.0,
    };

    pub fn preset(name: &str) -> Option<Anthropometry> {
        match name {
            "small" => Some(Self::SMALL),
            "medium" => Some(Self::MEDIUM),
            "big" => Some(Self::BIG),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_ml > 0.0 && self.l_p2 > 0.0 && self.c1_max > 0.0 && self.c2_max > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "anthropometry values must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for Anthropometry {
    fn default() -> Self {
        Self::MEDIUM
    }
}
