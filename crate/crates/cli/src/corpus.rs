//! The bundled corpus of system files used by the check battery.

use crate::system::{CorrespondenceFile, SystemDescription};

pub const SYSTEMS: &[(&str, &str)] = &[
    ("difference-quotient", include_str!("../corpus/difference-quotient.toml")),
    ("identity-p1", include_str!("../corpus/identity-p1.toml")),
    ("lucas", include_str!("../corpus/lucas.toml")),
    ("p1-cubed-cyclic", include_str!("../corpus/p1-cubed-cyclic.toml")),
    ("p1-cubed-power-2", include_str!("../corpus/p1-cubed-power-2.toml")),
    ("p1-p2-split", include_str!("../corpus/p1-p2-split.toml")),
    ("p2-power-2", include_str!("../corpus/p2-power-2.toml")),
    ("p2-power-3", include_str!("../corpus/p2-power-3.toml")),
    ("p2-quadratic", include_str!("../corpus/p2-quadratic.toml")),
    ("power-2", include_str!("../corpus/power-2.toml")),
    ("power-3", include_str!("../corpus/power-3.toml")),
    ("power-4", include_str!("../corpus/power-4.toml")),
    ("power-6", include_str!("../corpus/power-6.toml")),
    ("scaling", include_str!("../corpus/scaling.toml")),
    ("split-2-2", include_str!("../corpus/split-2-2.toml")),
    ("split-2-3", include_str!("../corpus/split-2-3.toml")),
    ("split-2-5", include_str!("../corpus/split-2-5.toml")),
    ("split-3-4", include_str!("../corpus/split-3-4.toml")),
    ("sum-of-squares", include_str!("../corpus/sum-of-squares.toml")),
    ("swap-twist-2-2", include_str!("../corpus/swap-twist-2-2.toml")),
    ("swap-twist-2-3", include_str!("../corpus/swap-twist-2-3.toml")),
    ("swap-twist-2-5", include_str!("../corpus/swap-twist-2-5.toml")),
    ("swap-twist-3-3", include_str!("../corpus/swap-twist-3-3.toml")),
];

pub const DIAGONAL: &str = include_str!("../corpus/diagonal.toml");

pub fn systems() -> Vec<(&'static str, SystemDescription)> {
    SYSTEMS
        .iter()
        .map(|(name, src)| (*name, SystemDescription::parse(src).unwrap_or_else(|e| panic!("corpus file {name}: {e}"))))
        .collect()
}

pub fn system(name: &str) -> Option<SystemDescription> {
    SYSTEMS.iter().find(|(n, _)| *n == name).map(|(n, src)| {
        SystemDescription::parse(src).unwrap_or_else(|e| panic!("corpus file {n}: {e}"))
    })
}

pub fn diagonal() -> CorrespondenceFile {
    CorrespondenceFile::parse(DIAGONAL).expect("bundled correspondence parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_files_are_canonical() {
        for (name, src) in SYSTEMS {
            let s = SystemDescription::parse(src).unwrap();
            assert_eq!(s.name, *name);
            let again = SystemDescription::parse(&s.to_canonical_string()).unwrap();
            assert_eq!(again, s);
        }
        assert_eq!(diagonal().to_canonical_string(), DIAGONAL);
    }
}
