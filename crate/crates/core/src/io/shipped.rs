//! Benchmark configurations bundled with the library.

/// `(file name, contents)` of every shipped configuration.
pub const CONFIGS: [(&str, &str); 5] = [
    ("cantilever_moment.cfg", include_str!("../../configs/cantilever_moment.cfg")),
    ("buckling.cfg", include_str!("../../configs/buckling.cfg")),
    ("spall.cfg", include_str!("../../configs/spall.cfg")),
    ("transverse_fracture.cfg", include_str!("../../configs/transverse_fracture.cfg")),
    ("spaghetti.cfg", include_str!("../../configs/spaghetti.cfg")),
];

/// Contents of the shipped configuration `name`, with or without `.cfg`.
pub fn find(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".cfg").unwrap_or(name);
    CONFIGS.iter().find(|(f, _)| f.strip_suffix(".cfg") == Some(name)).map(|(_, t)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config_str;
    use crate::scenarios::ScenarioId;

    #[test]
    fn every_shipped_config_parses() {
        for ((file, text), id) in CONFIGS.iter().zip(ScenarioId::ALL) {
            let c = parse_config_str(text).unwrap_or_else(|e| panic!("{file}: {e}"));
            assert_eq!(c.id, id, "{file}");
            assert_eq!(find(id.name()), Some(*text));
        }
        assert!(find("nope").is_none());
    }
}
