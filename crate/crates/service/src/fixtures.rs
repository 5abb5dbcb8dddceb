//! Example graphs bundled with the binary.

use crate::document::{parse_graph, GraphDocument};

pub const FIXTURES: &[(&str, &str)] = &[
    ("arggraph", include_str!("../fixtures/arggraph.json")),
    ("neutrality", include_str!("../fixtures/neutrality.json")),
    (
        "neutrality-prime",
        include_str!("../fixtures/neutrality-prime.json"),
    ),
    (
        "neutralisation",
        include_str!("../fixtures/neutralisation.json"),
    ),
    (
        "interchangeability",
        include_str!("../fixtures/interchangeability.json"),
    ),
    (
        "interchangeability-prime",
        include_str!("../fixtures/interchangeability-prime.json"),
    ),
    ("dampening", include_str!("../fixtures/dampening.json")),
    (
        "dampening-prime",
        include_str!("../fixtures/dampening-prime.json"),
    ),
    ("liverpool", include_str!("../fixtures/liverpool.json")),
    (
        "liverpool-split",
        include_str!("../fixtures/liverpool-split.json"),
    ),
    (
        "liverpool-manchester",
        include_str!("../fixtures/liverpool-manchester.json"),
    ),
    ("school", include_str!("../fixtures/school.json")),
    ("self-attack", include_str!("../fixtures/self-attack.json")),
    ("rsig-square", include_str!("../fixtures/rsig-square.json")),
    (
        "dogged-hexagon",
        include_str!("../fixtures/dogged-hexagon.json"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

pub fn fixture(name: &str) -> Option<GraphDocument> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_graph(src.as_bytes()).expect("bundled fixtures are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse() {
        for n in names() {
            let doc = fixture(n).unwrap();
            doc.to_graph().unwrap();
        }
        assert_eq!(fixture("liverpool").unwrap().edges.len(), 3);
        assert!(fixture("nope").is_none());
    }
}
