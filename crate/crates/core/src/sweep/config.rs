use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::MAX_TABLE_MODULUS;
use crate::lfunc::{DEFAULT_C_KMAX, DEFAULT_C_PMAX};
use crate::precision::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidueClass {
    #[serde(rename = "all")]
    All,
    #[serde(rename = "1mod4")]
    OneMod4,
    #[serde(rename = "3mod4")]
    ThreeMod4,
}

impl ResidueClass {
    pub fn contains(self, p: u64) -> bool {
        match self {
            ResidueClass::All => true,
            ResidueClass::OneMod4 => p % 4 == 1,
            ResidueClass::ThreeMod4 => p % 4 == 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ResidueClass::All => "all",
            ResidueClass::OneMod4 => "1mod4",
            ResidueClass::ThreeMod4 => "3mod4",
        }
    }

    /// Class label of an odd prime.
    pub fn of(p: u64) -> &'static str {
        if p % 4 == 1 {
            "1mod4"
        } else {
            "3mod4"
        }
    }
}

impl FromStr for ResidueClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ResidueClass::All),
            "1mod4" => Ok(ResidueClass::OneMod4),
            "3mod4" => Ok(ResidueClass::ThreeMod4),
            _ => Err(Error::InvalidArgument(format!("unknown residue class `{s}`"))),
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Csv,
    Json,
    Svg,
}

impl FromStr for Emit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Emit::Csv),
            "json" => Ok(Emit::Json),
            "svg" => Ok(Emit::Svg),
            _ => Err(Error::InvalidArgument(format!("unknown output kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub pmin: u64,
    pub pmax: u64,
    pub class: ResidueClass,
    pub n_list: Vec<i64>,
    pub m_list: Vec<u32>,
    pub precision: Precision,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub emit: BTreeSet<Emit>,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub c_pmax: u64,
    pub c_kmax: u32,
    /// Primes up to this bound use every admissible `a` for `S(a)`, `R(a)`.
    pub full_range_limit: u64,
    /// Record wall-clock time per prime. Off by default so that reruns are
    /// byte-identical.
    pub timings: bool,
    /// Zeroes one Legendre table entry for this prime, to exercise the
    /// identity-failure path.
    pub inject_fault: Option<u64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            pmin: 5,
            pmax: 500,
            class: ResidueClass::All,
            n_list: vec![1],
            m_list: vec![1, 2, 3, 4],
            precision: Precision::Standard,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            out_dir: PathBuf::from("out"),
            emit: [Emit::Csv, Emit::Json].into_iter().collect(),
            seed: 0,
            cache_dir: None,
            c_pmax: DEFAULT_C_PMAX,
            c_kmax: DEFAULT_C_KMAX,
            full_range_limit: 500,
            timings: false,
            inject_fault: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.pmin < 3 {
            return bad(format!("pmin must be at least 3, got {}", self.pmin));
        }
        if self.pmax < self.pmin {
            return bad(format!("pmax {} is below pmin {}", self.pmax, self.pmin));
        }
        if self.pmax >= MAX_TABLE_MODULUS {
            return bad(format!("pmax {} is too large", self.pmax));
        }
        if self.n_list.is_empty() {
            return bad("the n list is empty".into());
        }
        if self.m_list.is_empty() {
            return bad("the m list is empty".into());
        }
        if let Some(m) = self.m_list.iter().find(|m| !(1..=4).contains(*m)) {
            return bad(format!("m = {m} is outside 1..=4"));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.emit.is_empty() {
            return bad("nothing to emit".into());
        }
        if self.c_pmax < 2 || self.c_kmax < 1 {
            return bad("constant cutoffs need cmax-pmax >= 2 and cmax-k >= 1".into());
        }
        Ok(())
    }

    /// The `n` and `m` lists without duplicates, in first-seen order.
    pub fn normalized_lists(&self) -> (Vec<i64>, Vec<u32>) {
        fn dedup<T: Copy + Ord>(xs: &[T]) -> Vec<T> {
            let mut seen = BTreeSet::new();
            xs.iter().copied().filter(|x| seen.insert(*x)).collect()
        }
        (dedup(&self.n_list), dedup(&self.m_list))
    }

    /// Everything that influences a per-prime record besides `p` and the
    /// precision.
    pub fn fingerprint(&self) -> String {
        let (n, m) = self.normalized_lists();
        format!(
            "n={n:?};m={m:?};seed={};c={}/{};full={};fault={:?}",
            self.seed, self.c_pmax, self.c_kmax, self.full_range_limit, self.inject_fault
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = SweepConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SweepConfig { pmin: 2, ..ok.clone() },
            SweepConfig { pmax: 3, pmin: 7, ..ok.clone() },
            SweepConfig { n_list: vec![], ..ok.clone() },
            SweepConfig { m_list: vec![5], ..ok.clone() },
            SweepConfig { workers: 0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn parsing_and_classes() {
        assert_eq!("1mod4".parse::<ResidueClass>().unwrap(), ResidueClass::OneMod4);
        assert!("2mod4".parse::<ResidueClass>().is_err());
        assert_eq!("svg".parse::<Emit>().unwrap(), Emit::Svg);
        assert!(ResidueClass::ThreeMod4.contains(7) && !ResidueClass::ThreeMod4.contains(13));
        assert_eq!(ResidueClass::of(13), "1mod4");
    }

    #[test]
    fn fingerprint_tracks_inputs() {
        let a = SweepConfig::default();
        let b = SweepConfig { seed: 9, ..a.clone() };
        assert_ne!(a.fingerprint(), b.fingerprint());
        let c = SweepConfig { workers: 7, ..a.clone() };
        assert_eq!(a.fingerprint(), c.fingerprint());
    }
}
