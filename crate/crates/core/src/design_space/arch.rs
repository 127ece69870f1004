//! Architecture variables, their domains and the dense architecture id.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::DomainError;

/// The thirteen architecture variables, in declared order.
///
/// The declared order drives enumeration, the mixed-radix [`ArchId`], the
/// crossover point of the genetic algorithm and the prefix tree of the ant
/// colony search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variable {
    XyZ,
    XyTqg,
    ZTqg,
    XyZTqg,
    XyD,
    ZD,
    TqgD,
    SD,
    SingleQubitImpl,
    ZRotImpl,
    Degree,
    Router,
    SwapOpt,
}

pub const NUM_VARIABLES: usize = 13;

const BOOL_DOMAIN: [i32; 2] = [0, 1];
const CAP_DOMAIN: [i32; 6] = [-1, 1, 25, 50, 75, 100];
const SQI_DOMAIN: [i32; 4] = [0, 1, 2, 3];
const DEGREE_DOMAIN: [i32; 3] = [4, 6, 8];

impl Variable {
    pub const ALL: [Variable; NUM_VARIABLES] = [
        Variable::XyZ,
        Variable::XyTqg,
        Variable::ZTqg,
        Variable::XyZTqg,
        Variable::XyD,
        Variable::ZD,
        Variable::TqgD,
        Variable::SD,
        Variable::SingleQubitImpl,
        Variable::ZRotImpl,
        Variable::Degree,
        Variable::Router,
        Variable::SwapOpt,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::XyZ => "xy_z",
            Variable::XyTqg => "xy_tqg",
            Variable::ZTqg => "z_tqg",
            Variable::XyZTqg => "xy_z_tqg",
            Variable::XyD => "xyD",
            Variable::ZD => "zD",
            Variable::TqgD => "tqgD",
            Variable::SD => "sD",
            Variable::SingleQubitImpl => "single_qubit_impl",
            Variable::ZRotImpl => "z_rot_impl",
            Variable::Degree => "degree",
            Variable::Router => "router",
            Variable::SwapOpt => "swap_opt",
        }
    }

    /// Looks a variable up by name. Matching ignores ASCII case so that
    /// `SWAP_opt` and `swap_opt` are the same variable.
    pub fn from_name(name: &str) -> Option<Variable> {
        Variable::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(name.trim()))
    }

    /// Full domain in canonical order, as numeric codes.
    ///
    /// Booleans are `0/1`, caps are percentages with `-1` for "not
    /// applicable", `single_qubit_impl` uses its enum code
    /// (Sequential=0, Local=1, Global=2, Semi-Global=3), `degree` is the
    /// literal degree and the remaining enums use their codes.
    pub fn canonical_domain(self) -> &'static [i32] {
        match self {
            Variable::XyD | Variable::ZD | Variable::TqgD | Variable::SD => &CAP_DOMAIN,
            Variable::SingleQubitImpl => &SQI_DOMAIN,
            Variable::Degree => &DEGREE_DOMAIN,
            _ => &BOOL_DOMAIN,
        }
    }

    pub fn is_cap(self) -> bool {
        matches!(
            self,
            Variable::XyD | Variable::ZD | Variable::TqgD | Variable::SD
        )
    }

    /// Variables averaged numerically when several architectures are merged.
    pub fn is_numeric(self) -> bool {
        self.is_cap() || self == Variable::Degree
    }

    pub fn canonical_index(self, code: i32) -> Option<usize> {
        self.canonical_domain().iter().position(|&c| c == code)
    }

    /// Position of `code` on the ordered scale used for distances.
    ///
    /// Identical to the canonical index except for `single_qubit_impl`,
    /// which is ordered by how many single-qubit gates may share a cycle:
    /// Sequential < Semi-Global < Local < Global.
    pub fn ordinal(self, code: i32) -> Option<usize> {
        if self == Variable::SingleQubitImpl {
            return match code {
                0 => Some(0),
                3 => Some(1),
                1 => Some(2),
                2 => Some(3),
                _ => None,
            };
        }
        self.canonical_index(code)
    }

    /// Parses a value as written in rule/domain files and on the command line.
    pub fn parse_value(self, text: &str) -> Result<i32, DomainError> {
        let t = text.trim();
        let named = match self {
            Variable::SingleQubitImpl => SingleQubitImpl::from_name(t).map(|v| v as i32),
            Variable::ZRotImpl => ZRotImpl::from_name(t).map(|v| v as i32),
            Variable::Router => Router::from_name(t).map(|v| v as i32),
            _ => None,
        };
        let code = match named {
            Some(c) => c,
            None => t
                .trim_end_matches('%')
                .parse::<i32>()
                .map_err(|_| DomainError {
                    variable: self.name().to_string(),
                    value: t.to_string(),
                })?,
        };
        self.check(code)?;
        Ok(code)
    }

    pub fn format_value(self, code: i32) -> String {
        match self {
            Variable::SingleQubitImpl => SingleQubitImpl::from_code(code)
                .map(|v| v.name().to_string())
                .unwrap_or_else(|| code.to_string()),
            Variable::ZRotImpl => ZRotImpl::from_code(code)
                .map(|v| v.name().to_string())
                .unwrap_or_else(|| code.to_string()),
            Variable::Router => Router::from_code(code)
                .map(|v| v.name().to_string())
                .unwrap_or_else(|| code.to_string()),
            _ => code.to_string(),
        }
    }

    pub fn check(self, code: i32) -> Result<(), DomainError> {
        if self.canonical_index(code).is_some() {
            Ok(())
        } else {
            Err(DomainError {
                variable: self.name().to_string(),
                value: code.to_string(),
            })
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parallelization cap in percent of the qubit count; `-1` means the cap is
/// not user-defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Cap(i8);

impl Cap {
    pub const NA: Cap = Cap(-1);

    pub fn new(percent: i32) -> Option<Cap> {
        CAP_DOMAIN.contains(&percent).then_some(Cap(percent as i8))
    }

    pub fn percent(self) -> Option<u32> {
        (self.0 >= 0).then_some(self.0 as u32)
    }

    pub fn code(self) -> i32 {
        self.0 as i32
    }

    pub fn is_na(self) -> bool {
        self.0 < 0
    }
}

impl TryFrom<i32> for Cap {
    type Error = DomainError;
    fn try_from(v: i32) -> Result<Self, Self::Error> {
        Cap::new(v).ok_or(DomainError {
            variable: "cap".into(),
            value: v.to_string(),
        })
    }
}

impl From<Cap> for i32 {
    fn from(c: Cap) -> i32 {
        c.code()
    }
}

macro_rules! code_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident = $code:expr, $text:expr, [$($alias:expr),*]);+ $(;)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $($variant = $code),+
        }

        impl $name {
            pub fn from_code(code: i32) -> Option<Self> {
                match code {
                    $($code => Some($name::$variant),)+
                    _ => None,
                }
            }

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn from_name(s: &str) -> Option<Self> {
                let s = s.trim();
                $(
                    if s.eq_ignore_ascii_case($text) $(|| s.eq_ignore_ascii_case($alias))* {
                        return Some($name::$variant);
                    }
                )+
                None
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

code_enum! {
    /// How single-qubit rotations are driven.
    SingleQubitImpl {
        Sequential = 0, "Sequential", [];
        Local = 1, "Local", [];
        Global = 2, "Global", [];
        SemiGlobal = 3, "SemiGlobal", ["Semi-Global", "semi_global"];
    }
}

code_enum! {
    /// Hardware realization of Z rotations.
    ZRotImpl {
        ShuttleBased = 0, "ShuttleBased", ["shuttle"];
        PulseBased = 1, "PulseBased", ["pulse"];
    }
}

code_enum! {
    Router {
        ShuttleBasedSwap = 0, "ShuttleBasedSwap", ["SBS", "shuttle-swap"];
        Snake = 1, "Snake", ["beSnake"];
    }
}

/// Average node degree of the coupling graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Degree {
    Four,
    Six,
    Eight,
}

impl Degree {
    pub fn value(self) -> u32 {
        match self {
            Degree::Four => 4,
            Degree::Six => 6,
            Degree::Eight => 8,
        }
    }

    pub fn from_value(v: i32) -> Option<Degree> {
        match v {
            4 => Some(Degree::Four),
            6 => Some(Degree::Six),
            8 => Some(Degree::Eight),
            _ => None,
        }
    }
}

/// Dense mixed-radix id over the canonical domains (first variable most
/// significant), so ids sort in canonical lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArchId(pub u32);

impl fmt::Display for ArchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One point of the design space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Architecture {
    pub xy_z: bool,
    pub xy_tqg: bool,
    pub z_tqg: bool,
    pub xy_z_tqg: bool,
    #[serde(rename = "xyD")]
    pub xy_d: Cap,
    #[serde(rename = "zD")]
    pub z_d: Cap,
    #[serde(rename = "tqgD")]
    pub tqg_d: Cap,
    #[serde(rename = "sD")]
    pub s_d: Cap,
    pub single_qubit_impl: SingleQubitImpl,
    pub z_rot_impl: ZRotImpl,
    pub degree: Degree,
    pub router: Router,
    pub swap_opt: bool,
}

impl Architecture {
    /// The most permissive local architecture: everything parallel, caps at
    /// 100%, pulse Z rotations, degree 8 and the snake router.
    pub fn fully_parallel() -> Self {
        Architecture {
            xy_z: true,
            xy_tqg: true,
            z_tqg: true,
            xy_z_tqg: true,
            xy_d: Cap(100),
            z_d: Cap(100),
            tqg_d: Cap(100),
            s_d: Cap(100),
            single_qubit_impl: SingleQubitImpl::Local,
            z_rot_impl: ZRotImpl::PulseBased,
            degree: Degree::Eight,
            router: Router::Snake,
            swap_opt: false,
        }
    }

    pub fn get(&self, var: Variable) -> i32 {
        match var {
            Variable::XyZ => self.xy_z as i32,
            Variable::XyTqg => self.xy_tqg as i32,
            Variable::ZTqg => self.z_tqg as i32,
            Variable::XyZTqg => self.xy_z_tqg as i32,
            Variable::XyD => self.xy_d.code(),
            Variable::ZD => self.z_d.code(),
            Variable::TqgD => self.tqg_d.code(),
            Variable::SD => self.s_d.code(),
            Variable::SingleQubitImpl => self.single_qubit_impl as i32,
            Variable::ZRotImpl => self.z_rot_impl as i32,
            Variable::Degree => self.degree.value() as i32,
            Variable::Router => self.router as i32,
            Variable::SwapOpt => self.swap_opt as i32,
        }
    }

    pub fn set(&mut self, var: Variable, code: i32) -> Result<(), DomainError> {
        var.check(code)?;
        let bad = || DomainError {
            variable: var.name().to_string(),
            value: code.to_string(),
        };
        match var {
            Variable::XyZ => self.xy_z = code == 1,
            Variable::XyTqg => self.xy_tqg = code == 1,
            Variable::ZTqg => self.z_tqg = code == 1,
            Variable::XyZTqg => self.xy_z_tqg = code == 1,
            Variable::XyD => self.xy_d = Cap::new(code).ok_or_else(bad)?,
            Variable::ZD => self.z_d = Cap::new(code).ok_or_else(bad)?,
            Variable::TqgD => self.tqg_d = Cap::new(code).ok_or_else(bad)?,
            Variable::SD => self.s_d = Cap::new(code).ok_or_else(bad)?,
            Variable::SingleQubitImpl => {
                self.single_qubit_impl = SingleQubitImpl::from_code(code).ok_or_else(bad)?
            }
            Variable::ZRotImpl => self.z_rot_impl = ZRotImpl::from_code(code).ok_or_else(bad)?,
            Variable::Degree => self.degree = Degree::from_value(code).ok_or_else(bad)?,
            Variable::Router => self.router = Router::from_code(code).ok_or_else(bad)?,
            Variable::SwapOpt => self.swap_opt = code == 1,
        }
        Ok(())
    }

    pub fn with(mut self, var: Variable, code: i32) -> Result<Self, DomainError> {
        self.set(var, code)?;
        Ok(self)
    }

    pub fn codes(&self) -> [i32; NUM_VARIABLES] {
        Variable::ALL.map(|v| self.get(v))
    }

    pub fn from_codes(codes: &[i32; NUM_VARIABLES]) -> Result<Self, DomainError> {
        let mut arch = Architecture::fully_parallel();
        for (var, &code) in Variable::ALL.iter().zip(codes) {
            arch.set(*var, code)?;
        }
        Ok(arch)
    }

    /// Coordinates on the ordinal scales; the L1 distance between two
    /// coordinate vectors is the architecture distance.
    pub fn coordinates(&self) -> [u8; NUM_VARIABLES] {
        Variable::ALL.map(|v| v.ordinal(self.get(v)).expect("field within domain") as u8)
    }

    pub fn id(&self) -> ArchId {
        let mut id = 0u32;
        for var in Variable::ALL {
            let radix = var.canonical_domain().len() as u32;
            let digit = var
                .canonical_index(self.get(var))
                .expect("field within domain") as u32;
            id = id * radix + digit;
        }
        ArchId(id)
    }

    pub fn from_id(id: ArchId) -> Option<Self> {
        let mut rest = id.0;
        let mut codes = [0i32; NUM_VARIABLES];
        for var in Variable::ALL.iter().rev() {
            let dom = var.canonical_domain();
            let radix = dom.len() as u32;
            codes[var.index()] = dom[(rest % radix) as usize];
            rest /= radix;
        }
        if rest != 0 {
            return None;
        }
        Architecture::from_codes(&codes).ok()
    }

    /// Parses `var=value` pairs separated by commas. Unlisted variables keep
    /// the values of `base`.
    pub fn parse_assignments(base: Architecture, text: &str) -> Result<Self, DomainError> {
        let mut arch = base;
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item.split_once('=').ok_or_else(|| DomainError {
                variable: item.to_string(),
                value: String::new(),
            })?;
            let var = Variable::from_name(name).ok_or_else(|| DomainError {
                variable: name.trim().to_string(),
                value: value.trim().to_string(),
            })?;
            arch.set(var, var.parse_value(value)?)?;
        }
        Ok(arch)
    }
}

/// Total number of points in the unconstrained canonical cross-product.
pub fn canonical_cardinality() -> u64 {
    Variable::ALL
        .iter()
        .map(|v| v.canonical_domain().len() as u64)
        .product()
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, var) in Variable::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", var.name(), var.format_value(self.get(*var)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_round_trip_covers_canonical_space() {
        let total = canonical_cardinality();
        assert_eq!(total, 1_990_656);
        for raw in [0u32, 1, 17, 123_456, (total - 1) as u32] {
            let arch = Architecture::from_id(ArchId(raw)).unwrap();
            assert_eq!(arch.id(), ArchId(raw));
        }
        assert!(Architecture::from_id(ArchId(total as u32)).is_none());
    }

    #[test]
    fn sqi_ordinal_order() {
        let v = Variable::SingleQubitImpl;
        let seq = v.ordinal(SingleQubitImpl::Sequential as i32).unwrap();
        let semi = v.ordinal(SingleQubitImpl::SemiGlobal as i32).unwrap();
        let local = v.ordinal(SingleQubitImpl::Local as i32).unwrap();
        let global = v.ordinal(SingleQubitImpl::Global as i32).unwrap();
        assert!(seq < semi && semi < local && local < global);
    }

    #[test]
    fn parse_values_and_errors() {
        assert_eq!(
            Variable::SingleQubitImpl
                .parse_value("Semi-Global")
                .unwrap(),
            3
        );
        assert_eq!(Variable::Router.parse_value("snake").unwrap(), 1);
        assert_eq!(Variable::XyD.parse_value("-1").unwrap(), -1);
        assert_eq!(Variable::XyD.parse_value("25%").unwrap(), 25);
        let err = Variable::XyD.parse_value("30").unwrap_err();
        assert_eq!(err.variable, "xyD");
        let err = Architecture::fully_parallel()
            .with(Variable::Degree, 5)
            .unwrap_err();
        assert_eq!(err.variable, "degree");
    }

    #[test]
    fn assignments_parse() {
        let a = Architecture::parse_assignments(
            Architecture::fully_parallel(),
            "degree=4, router=ShuttleBasedSwap, xyD=50",
        )
        .unwrap();
        assert_eq!(a.degree, Degree::Four);
        assert_eq!(a.router, Router::ShuttleBasedSwap);
        assert_eq!(a.xy_d.percent(), Some(50));
        let round = Architecture::parse_assignments(Architecture::fully_parallel(), &a.to_string())
            .unwrap();
        assert_eq!(round, a);
    }
}
