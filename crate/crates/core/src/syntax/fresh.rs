use std::collections::BTreeSet;

/// Deterministic supply of variable names `p0, p1, …` that avoids a finite
/// set of taken names.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    taken: BTreeSet<String>,
}

impl FreshNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FreshNames {
            taken: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn avoid(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    pub fn avoid_all<I, S>(&mut self, names: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for n in names {
            self.avoid(n.as_ref());
        }
    }

    pub fn is_taken(&self, name: &str) -> bool {
        self.taken.contains(name)
    }

    /// The first `prefix<k>` not yet taken; it becomes taken.
    pub fn fresh(&mut self, prefix: &str) -> String {
        let mut k = 0usize;
        loop {
            let candidate = format!("{prefix}{k}");
            if !self.taken.contains(&candidate) {
                self.taken.insert(candidate.clone());
                return candidate;
            }
            k += 1;
        }
    }

    /// `name` itself if free, otherwise `name` with primes appended.
    pub fn prime(&mut self, name: &str) -> String {
        let mut candidate = name.to_string();
        while self.taken.contains(&candidate) {
            candidate.push('\'');
        }
        self.taken.insert(candidate.clone());
        candidate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_taken_names() {
        let mut f = FreshNames::avoiding(["v0", "v2"]);
        assert_eq!(f.fresh("v"), "v1");
        assert_eq!(f.fresh("v"), "v3");
        assert_eq!(f.prime("v1"), "v1'");
        assert_eq!(f.prime("w"), "w");
    }
}
