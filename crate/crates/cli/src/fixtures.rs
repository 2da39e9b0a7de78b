//! The shipped fixture files. `GRIDn` files are generated.

use essimg::{fixtures, MeasurableMap};

const FILES: [(&str, &str, &str); 8] = [
    ("EX1A", "sys", include_str!("../fixtures/EX1A.sys")),
    ("COUNT2", "sys", include_str!("../fixtures/COUNT2.sys")),
    ("ROT3", "sys", include_str!("../fixtures/ROT3.sys")),
    ("COLLAPSE", "sys", include_str!("../fixtures/COLLAPSE.sys")),
    ("ID_TRIVIAL", "sys", include_str!("../fixtures/ID_TRIVIAL.sys")),
    ("MARKOV2", "mkv", include_str!("../fixtures/MARKOV2.mkv")),
    ("CSMC_A", "mkv", include_str!("../fixtures/CSMC_A.mkv")),
    ("CSMC_B", "mkv", include_str!("../fixtures/CSMC_B.mkv")),
];

/// Largest `n` accepted for `GRIDn`.
pub const GRID_MAX: usize = 16;

/// Names of all shipped fixtures, with the grids for `N = 2, 3, 4`.
pub fn names() -> Vec<String> {
    let mut v: Vec<String> = FILES.iter().map(|(n, _, _)| n.to_string()).collect();
    v.extend((2..=4).map(|n| format!("GRID{n}")));
    v
}

/// Writes a map in the file grammar. Singleton atoms named after their
/// point are left implicit.
pub fn render(map: &MeasurableMap, comment: &str) -> String {
    let mut out = String::new();
    if !comment.is_empty() {
        out.push_str(&format!("# {comment}\n"));
    }
    let dom = map.domain();
    let cod = map.codomain();
    let mut spaces = vec![dom];
    if !map.is_endomap() {
        spaces.push(cod);
    }
    for s in &spaces {
        out.push_str(&format!("@space {}\n", s.name()));
        for (p, w) in s.weighted_points() {
            out.push_str(&format!("point {p} {w}\n"));
        }
        let blocks: Vec<_> = s
            .partition_by_name()
            .into_iter()
            .filter(|(n, pts)| !(pts.len() == 1 && &pts[0] == n))
            .collect();
        if !blocks.is_empty() {
            out.push_str(&format!("@partition {}\n", s.name()));
            for (n, pts) in blocks {
                out.push_str(&format!("atom {n}: {}\n", pts.join(" ")));
            }
        }
    }
    if map.is_endomap() {
        out.push_str("@map\n");
    } else {
        out.push_str(&format!("@map [{} -> {}]\n", dom.name(), cod.name()));
    }
    for p in 0..dom.num_points() {
        out.push_str(&format!(
            "{} -> {}\n",
            dom.point_name(p),
            cod.point_name(map.point_image(p))
        ));
    }
    out
}

fn grid_text(n: usize) -> String {
    let mut text = render(
        fixtures::grid(n).map(),
        &format!("T(m,n) = (m-1,n), T(1,n) = (1,0), T(1,0) = T(0,0) = (0,0) for 1 <= m <= n <= {n}"),
    );
    text.push_str("@set BOTTOM = (0,0)\n");
    text
}

/// The text of a fixture by name (case-insensitive, extension optional),
/// with its extension.
pub fn lookup(name: &str) -> Option<(String, &'static str, String)> {
    let stem = name
        .strip_suffix(".sys")
        .or_else(|| name.strip_suffix(".mkv"))
        .unwrap_or(name)
        .to_ascii_uppercase();
    if let Some((n, ext, text)) = FILES.iter().find(|(n, _, _)| *n == stem) {
        return Some((n.to_string(), ext, text.to_string()));
    }
    let n: usize = stem.strip_prefix("GRID")?.parse().ok()?;
    (1..=GRID_MAX).contains(&n).then(|| (stem.clone(), "sys", grid_text(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_system_file, SystemFile};

    fn parsed_map(name: &str) -> MeasurableMap {
        let (n, _, text) = lookup(name).unwrap();
        match parse_system_file(&n, &text).unwrap() {
            SystemFile::System(s) => s.map,
            SystemFile::Markov { .. } => panic!("{name} is a model"),
        }
    }

    #[test]
    fn files_match_library_fixtures() {
        for s in fixtures::systems() {
            let m = parsed_map(s.name());
            let (x, y) = (m.domain(), s.space());
            assert_eq!(x.weighted_points(), y.weighted_points(), "{}", s.name());
            assert_eq!(x.partition_by_name(), y.partition_by_name(), "{}", s.name());
            assert_eq!(m.image_of(), s.map().image_of(), "{}", s.name());
        }
        let id = parsed_map("ID_TRIVIAL");
        let lib = fixtures::identity_to_trivial();
        assert_eq!(id.codomain().partition_by_name(), lib.codomain().partition_by_name());
        assert_eq!(id.image_of(), lib.image_of());
    }

    #[test]
    fn models_match_library_fixtures() {
        for (name, lib) in [
            ("MARKOV2", fixtures::markov2()),
            ("CSMC_A", fixtures::csmc_a()),
            ("CSMC_B", fixtures::csmc_b()),
        ] {
            let (_, _, text) = lookup(name).unwrap();
            match parse_system_file(name, &text).unwrap() {
                SystemFile::Markov { model, .. } => {
                    assert_eq!(model.init(), lib.init());
                    assert_eq!(model.trans(), lib.trans());
                    assert_eq!(model.states(), lib.states());
                }
                SystemFile::System(_) => panic!("{name} is a system"),
            }
        }
    }

    #[test]
    fn grid_files_are_current() {
        let files = [
            include_str!("../fixtures/GRID2.sys"),
            include_str!("../fixtures/GRID3.sys"),
            include_str!("../fixtures/GRID4.sys"),
        ];
        for (n, f) in (2..).zip(files) {
            assert_eq!(f, grid_text(n), "GRID{n}");
        }
    }

    #[test]
    fn lookup_variants() {
        assert!(lookup("ex1a.sys").is_some());
        assert!(lookup("GRID2").is_some());
        assert!(lookup("GRID0").is_none());
        assert!(lookup("nothing").is_none());
        assert_eq!(names().len(), 11);
    }
}
