// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Sectioned `key = value` files. Lines starting with `#` or `;` are comments,
//! and `#` starts a trailing comment anywhere else.

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ini {
    pub sections: Vec<Section>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            let content = match trimmed.find('#') {
                Some(p) => trimmed[..p].trim_end(),
                None => trimmed,
            };
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::at(line, None, "unterminated section header"))?
                    .trim();
                if name.is_empty() {
                    return Err(CliError::at(line, None, "empty section name"));
                }
                if let Some(prev) = sections.iter().find(|s| s.name == name) {
                    return Err(CliError::at(line, None, format!("section [{name}] already defined on line {}", prev.line)));
                }
                sections.push(Section { name: name.to_string(), line, entries: Vec::new() });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::at(line, None, format!("expected 'key = value', found '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(CliError::at(line, None, "missing key before '='"));
            }
            let section = sections
                .last_mut()
                .ok_or_else(|| CliError::at(line, Some(key), "key appears before any [section]"))?;
            if let Some(prev) = section.get(key) {
                return Err(CliError::at(line, Some(key), format!("duplicate key (first set on line {})", prev.line)));
            }
            if value.is_empty() {
                return Err(CliError::at(line, Some(key), "empty value"));
            }
            section.entries.push(Entry { key: key.to_string(), value: value.to_string(), line });
        }
        Ok(Self { sections })
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Canonical text with comments and spacing normalized.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{}]\n", s.name));
            for e in &s.entries {
                out.push_str(&format!("{} = {}\n", e.key, e.value));
            }
        }
        out
    }
}
