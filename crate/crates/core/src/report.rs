use std::fmt;

/// Flat `key = value` text block used for every human-readable report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvBlock {
    entries: Vec<(String, String)>,
}

impl KvBlock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    /// Reals are written with 17 significant digits so values round-trip.
    pub fn real(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.push(key, format!("{value:.16e}"))
    }

    pub fn extend(&mut self, prefix: &str, other: &KvBlock) -> &mut Self {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}{k}"), v.clone()));
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

impl fmt::Display for KvBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        let mut b = KvBlock::new();
        b.real("x", 0.1 + 0.2).push("name", "a");
        assert_eq!(b.get_f64("x"), Some(0.1 + 0.2));
        assert!(b.to_string().contains("name = a\n"));
    }
}
