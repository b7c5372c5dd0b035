//! Flat, sectioned `key = value` text files with a versioned header line:
//!
//! ```text
//! # moead-config v1
//! [section]
//! key = value   # trailing comments are allowed
//! ```

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    /// Text inside the brackets; empty for keys before the first header.
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvDocument {
    pub kind: String,
    pub version: u32,
    pub sections: Vec<Section>,
}

impl KvDocument {
    pub fn parse(text: &str, expected_kind: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| Error::parse(1, "empty document"))?;
        let rest = header
            .strip_prefix('#')
            .map(str::trim)
            .ok_or_else(|| Error::parse(hline, format!("expected header `# {expected_kind} v1`")))?;
        let (kind, version) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(hline, "header must be `# <kind> v<version>`"))?;
        if kind != expected_kind {
            return Err(Error::parse(
                hline,
                format!("expected a {expected_kind} file, found {kind}"),
            ));
        }
        let version = version
            .trim()
            .strip_prefix('v')
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(hline, format!("bad version `{version}`")))?;

        let mut sections = vec![Section {
            name: String::new(),
            line: hline,
            entries: Vec::new(),
        }];
        for (no, raw) in lines {
            let line = match raw.find('#') {
                Some(p) => raw[..p].trim(),
                None => raw,
            };
            if line.is_empty() {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let name = inner
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(no, "unterminated section header"))?;
                sections.push(Section {
                    name: name.trim().to_string(),
                    line: no,
                    entries: Vec::new(),
                });
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(no, format!("expected `key = value`, got `{line}`")))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(Error::parse(no, "empty key"));
            }
            let section = sections.last_mut().expect("root section");
            if section.get(key).is_some() {
                return Err(Error::parse(no, format!("duplicate key `{key}`")));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: v.trim().to_string(),
                line: no,
            });
        }
        Ok(Self {
            kind: kind.to_string(),
            version,
            sections,
        })
    }

    pub fn root(&self) -> &Section {
        &self.sections[0]
    }

    pub fn sections_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections
            .iter()
            .skip(1)
            .filter(move |s| s.name.split_whitespace().next() == Some(prefix))
    }
}

/// Writes the header line of a document.
pub fn header(kind: &str, version: u32) -> String {
    format!("# {kind} v{version}\n")
}

pub fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let doc = KvDocument::parse(
            "\n# moead-plan v1\nname = x # trailing\n\n[param T]\ntype = int\n",
            "moead-plan",
        )
        .unwrap();
        assert_eq!(doc.version, 1);
        assert_eq!(doc.root().get("name").unwrap().value, "x");
        let p: Vec<_> = doc.sections_named("param").collect();
        assert_eq!(p[0].name, "param T");
        assert_eq!(p[0].get("type").unwrap().line, 6);
    }

    #[test]
    fn reports_line_numbers() {
        let err = KvDocument::parse("# moead-plan v1\na = 1\nbroken line\n", "moead-plan").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = KvDocument::parse("# moead-plan v1\na = 1\na = 2\n", "moead-plan").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(KvDocument::parse("a = 1", "moead-plan").is_err());
        assert!(KvDocument::parse("# moead-space v1", "moead-plan").is_err());
    }
}
