use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The closed four-class label set.
///
/// The discriminant doubles as the class index used by every classifier and
/// confusion matrix; argmax ties resolve toward the lower index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Actuation = 0,
    Exhalation = 1,
    Inhalation = 2,
    Noise = 3,
}

impl Class {
    pub const COUNT: usize = 4;
    pub const ALL: [Class; 4] = [
        Class::Actuation,
        Class::Exhalation,
        Class::Inhalation,
        Class::Noise,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Class> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::Actuation => "actuation",
            Class::Exhalation => "exhalation",
            Class::Inhalation => "inhalation",
            Class::Noise => "noise",
        }
    }

    /// Short column tag used in report headers (`drug_f1`, ...).
    pub fn report_tag(self) -> &'static str {
        match self {
            Class::Actuation => "drug",
            Class::Exhalation => "exhale",
            Class::Inhalation => "inhale",
            Class::Noise => "noise",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "actuation" => Ok(Class::Actuation),
            "exhalation" => Ok(Class::Exhalation),
            "inhalation" => Ok(Class::Inhalation),
            "noise" => Ok(Class::Noise),
            other => Err(Error::invalid(format!("unknown label '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_is_case_insensitive_and_closed() {
        assert_eq!("Inhalation".parse::<Class>().unwrap(), Class::Inhalation);
        assert!("cough".parse::<Class>().is_err());
        for c in Class::ALL {
            assert_eq!(Class::from_index(c.index()), Some(c));
        }
    }
}
