//! Deterministic text and JSON reports.

use essimg::{MSet, Orbit, Space};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Entry {
    Property(bool),
    Set(Vec<String>),
    NoSet,
    Sets(Vec<Vec<String>>),
    Chain {
        pre: Vec<Vec<String>>,
        period: Vec<Vec<String>>,
    },
    Value(String),
}

/// Key-value lines in insertion order. In JSON, booleans go under
/// `properties`, sets under `witnesses`, sequences under `chains` and
/// everything else under `values`.
#[derive(Debug, Clone, Default)]
pub struct Report {
    system: String,
    entries: Vec<(String, Entry)>,
}

fn names(space: &Space, a: &MSet) -> Vec<String> {
    space.names(a)
}

fn show(set: &[String]) -> String {
    if set.is_empty() {
        "∅".to_string()
    } else {
        set.join(" ")
    }
}

impl Report {
    pub fn new(system: impl Into<String>) -> Self {
        Report {
            system: system.into(),
            entries: Vec::new(),
        }
    }

    fn push(&mut self, key: &str, e: Entry) -> &mut Self {
        self.entries.push((key.to_string(), e));
        self
    }

    pub fn property(&mut self, key: &str, v: bool) -> &mut Self {
        self.push(key, Entry::Property(v))
    }

    pub fn set(&mut self, key: &str, space: &Space, a: &MSet) -> &mut Self {
        self.push(key, Entry::Set(names(space, a)))
    }

    pub fn maybe_set(&mut self, key: &str, space: &Space, a: Option<&MSet>) -> &mut Self {
        match a {
            Some(a) => self.set(key, space, a),
            None => self.push(key, Entry::NoSet),
        }
    }

    pub fn sets<'a>(&mut self, key: &str, space: &Space, sets: impl IntoIterator<Item = &'a MSet>) -> &mut Self {
        let v = sets.into_iter().map(|a| names(space, a)).collect();
        self.push(key, Entry::Sets(v))
    }

    pub fn chain(&mut self, key: &str, space: &Space, o: &Orbit<MSet>) -> &mut Self {
        let f = |v: &[MSet]| v.iter().map(|a| names(space, a)).collect();
        self.push(
            key,
            Entry::Chain {
                pre: f(&o.pre),
                period: f(&o.period),
            },
        )
    }

    pub fn value(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.push(key, Entry::Value(v.to_string()))
    }

    pub fn text(&self) -> String {
        let mut out = format!("system: {}\n", self.system);
        for (k, e) in &self.entries {
            let v = match e {
                Entry::Property(b) => b.to_string(),
                Entry::Set(s) => show(s),
                Entry::NoSet => "none".to_string(),
                Entry::Sets(v) => v.iter().map(|s| format!("{{{}}}", show(s))).collect::<Vec<_>>().join(" "),
                Entry::Chain { pre, period } => {
                    let f = |v: &Vec<Vec<String>>| {
                        v.iter().map(|s| format!("{{{}}}", show(s))).collect::<Vec<_>>().join(" ")
                    };
                    format!("pre [{}] period [{}]", f(pre), f(period))
                }
                Entry::Value(s) => s.clone(),
            };
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }

    pub fn json(&self) -> String {
        let mut groups: [Map<String, Value>; 4] = Default::default();
        for (k, e) in &self.entries {
            let (g, v) = match e {
                Entry::Property(b) => (0, json!(b)),
                Entry::Set(s) => (1, json!(s)),
                Entry::NoSet => (1, Value::Null),
                Entry::Sets(v) => (1, json!(v)),
                Entry::Chain { pre, period } => (2, json!({ "pre": pre, "period": period })),
                Entry::Value(s) => (3, json!(s)),
            };
            groups[g].insert(k.clone(), v);
        }
        let [properties, witnesses, chains, values] = groups;
        let doc = json!({
            "system": self.system,
            "properties": properties,
            "witnesses": witnesses,
            "chains": chains,
            "values": values,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use essimg::fixtures;

    #[test]
    fn text_and_json_layouts() {
        let s = fixtures::rot3();
        let x = s.space();
        let mut r = Report::new("ROT3");
        r.property("ergodic", true)
            .set("empty", x, &x.empty())
            .maybe_set("missing", x, None)
            .chain("orbit", x, &s.image_orbit(&x.atom(0)))
            .value("depth", 0);
        assert_eq!(
            r.text(),
            "system: ROT3\nergodic: true\nempty: ∅\nmissing: none\norbit: pre [] period [{0} {1} {2}]\ndepth: 0\n"
        );
        let v: Value = serde_json::from_str(&r.json()).unwrap();
        assert_eq!(v["properties"]["ergodic"], json!(true));
        assert_eq!(v["chains"]["orbit"]["period"], json!([["0"], ["1"], ["2"]]));
        assert_eq!(v["values"]["depth"], json!("0"));
        assert_eq!(v["witnesses"]["empty"], json!([]));
        assert_eq!(v["witnesses"]["missing"], Value::Null);
    }
}
