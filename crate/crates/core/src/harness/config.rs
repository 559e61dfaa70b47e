//! Experiment configuration: defaults, TOML file values and overrides.
//!
//! Precedence is overrides > file > defaults. Every rejection names the
//! offending key.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::channel::ChannelProfile;
use crate::error::{Error, Result};
use crate::mapping::Modulation;
use crate::txchain::Scheme;

pub const DEFAULT_DELAYS_NS: [f64; 12] = [
    50.0, 100.0, 200.0, 300.0, 500.0, 750.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0, 3500.0,
];

/// How the BER experiment combines the SNR grid and the delay list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerSweep {
    /// SNR grid at `ber_delay_ns`, plus the delay list at `ber_snr_db`.
    Figures,
    /// Every SNR at every delay.
    Grid,
}

impl BerSweep {
    fn name(self) -> &'static str {
        match self {
            BerSweep::Figures => "figures",
            BerSweep::Grid => "grid",
        }
    }
}

/// Parse `lo..hi:step`, or a comma-separated list that may contain `inf`.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |reason: String| Error::config("snr", reason);
    let text = text.trim();
    if let Some((range, step)) = text.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| bad(format!("`{text}` is not lo..hi:step")))?;
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("`{s}` is not a finite number")))
        };
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if step <= 0.0 || hi < lo {
            return Err(bad(format!("`{text}` needs lo <= hi and step > 0")));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| lo + step * i as f64).collect());
    }
    let values = text
        .split(',')
        .map(|s| match s.trim() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("`{v}` is not a number or `inf`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values)
}

fn format_snr(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    /// User counts for the PAPR experiment.
    pub k: Vec<usize>,
    /// User counts for the BER experiment.
    pub ber_k: Vec<usize>,
    pub schemes: Vec<Scheme>,
    pub modulations: Vec<Modulation>,
    pub snr_db: Vec<f64>,
    pub delay_spreads_ns: Vec<f64>,
    pub ber_sweep: BerSweep,
    /// Delay spread used for the SNR sweep.
    pub ber_delay_ns: f64,
    /// SNR used for the delay sweep.
    pub ber_snr_db: f64,
    pub blocks: usize,
    pub ber_blocks: usize,
    pub psd_blocks: usize,
    pub seed: u64,
    /// Cyclic prefix length; `N/4` of the relevant block size when unset.
    pub cp_len: Option<usize>,
    pub oversample: usize,
    pub papr_with_cp: bool,
    pub psd_n: usize,
    pub psd_k: usize,
    pub psd_scheme: Scheme,
    /// Zero-based users whose individual spectra are reported.
    pub psd_users: Vec<usize>,
    pub psd_segment: usize,
    pub psd_overlap: f64,
    pub out: PathBuf,
    /// Thread count; 0 uses every available core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 256,
            k: vec![16, 32, 64, 128],
            ber_k: vec![64],
            schemes: Scheme::ALL.to_vec(),
            modulations: vec![Modulation::Qam16, Modulation::Qam64],
            snr_db: (0..=10).map(|i| 4.0 * i as f64).collect(),
            delay_spreads_ns: DEFAULT_DELAYS_NS.to_vec(),
            ber_sweep: BerSweep::Figures,
            ber_delay_ns: 300.0,
            ber_snr_db: 32.0,
            blocks: 500,
            ber_blocks: 2000,
            psd_blocks: 200,
            seed: 1,
            cp_len: None,
            oversample: 1,
            papr_with_cp: false,
            psd_n: 1024,
            psd_k: 64,
            psd_scheme: Scheme::POfdma,
            psd_users: vec![0, 31],
            psd_segment: 1024,
            psd_overlap: 0.5,
            out: PathBuf::from("results"),
            workers: 0,
        }
    }
}

/// Values supplied on the command line. `None` and empty lists leave the
/// file or default value in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    /// Applies to both the PAPR and the BER user lists.
    pub k: Vec<usize>,
    pub schemes: Vec<String>,
    pub modulations: Vec<u32>,
    pub snr: Option<String>,
    pub delay_ns: Vec<f64>,
    pub blocks: Option<usize>,
    pub ber_blocks: Option<usize>,
    pub psd_blocks: Option<usize>,
    pub seed: Option<u64>,
    pub cp_len: Option<usize>,
    pub oversample: Option<usize>,
    pub papr_with_cp: bool,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

const KEYS: &[&str] = &[
    "n",
    "k",
    "ber_k",
    "schemes",
    "modulations",
    "snr",
    "delay_ns",
    "ber_sweep",
    "ber_delay_ns",
    "ber_snr_db",
    "blocks",
    "ber_blocks",
    "psd_blocks",
    "seed",
    "cp_len",
    "oversample",
    "papr_with_cp",
    "psd_n",
    "psd_k",
    "psd_scheme",
    "psd_users",
    "psd_segment",
    "psd_overlap",
    "out",
];

fn want_uint(key: &str, v: &Value) -> Result<usize> {
    v.as_integer()
        .filter(|i| *i >= 0)
        .map(|i| i as usize)
        .ok_or_else(|| Error::config(key, format!("expected a non-negative integer, got {v}")))
}

fn want_float(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(f) => Ok(*f),
        _ => Err(Error::config(key, format!("expected a number, got {v}"))),
    }
}

fn want_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::config(key, format!("expected a string, got {v}")))
}

fn want_list<T>(key: &str, v: &Value, item: impl Fn(&str, &Value) -> Result<T>) -> Result<Vec<T>> {
    match v {
        Value::Array(items) => items.iter().map(|x| item(key, x)).collect(),
        single => Ok(vec![item(key, single)?]),
    }
}

fn parse_scheme(key: &str, s: &str) -> Result<Scheme> {
    s.parse()
        .map_err(|_| Error::config(key, format!("unknown scheme `{s}`")))
}

fn parse_modulation(key: &str, order: u32) -> Result<Modulation> {
    Modulation::from_order(order).map_err(|e| Error::config(key, e.to_string()))
}

impl ExperimentConfig {
    /// Apply the keys of a TOML table on top of `self`.
    pub fn apply_table(&mut self, table: &Table) -> Result<()> {
        for (key, v) in table {
            let key = key.as_str();
            match key {
                "n" => self.n = want_uint(key, v)?,
                "k" => self.k = want_list(key, v, want_uint)?,
                "ber_k" => self.ber_k = want_list(key, v, want_uint)?,
                "schemes" => {
                    self.schemes = want_list(key, v, |k, x| parse_scheme(k, want_str(k, x)?))?
                }
                "modulations" => {
                    self.modulations =
                        want_list(key, v, |k, x| parse_modulation(k, want_uint(k, x)? as u32))?
                }
                "snr" => {
                    self.snr_db = match v {
                        Value::String(s) => parse_snr_grid(s)?,
                        other => want_list(key, other, want_float)?,
                    }
                }
                "delay_ns" => self.delay_spreads_ns = want_list(key, v, want_float)?,
                "ber_sweep" => {
                    self.ber_sweep = match want_str(key, v)? {
                        "figures" => BerSweep::Figures,
                        "grid" => BerSweep::Grid,
                        other => {
                            return Err(Error::config(
                                key,
                                format!("`{other}` is neither `figures` nor `grid`"),
                            ))
                        }
                    }
                }
                "ber_delay_ns" => self.ber_delay_ns = want_float(key, v)?,
                "ber_snr_db" => self.ber_snr_db = want_float(key, v)?,
                "blocks" => self.blocks = want_uint(key, v)?,
                "ber_blocks" => self.ber_blocks = want_uint(key, v)?,
                "psd_blocks" => self.psd_blocks = want_uint(key, v)?,
                "seed" => {
                    self.seed = v.as_integer().map(|i| i as u64).ok_or_else(|| {
                        Error::config(key, format!("expected an integer, got {v}"))
                    })?
                }
                "cp_len" => self.cp_len = Some(want_uint(key, v)?),
                "oversample" => self.oversample = want_uint(key, v)?,
                "papr_with_cp" => {
                    self.papr_with_cp = v
                        .as_bool()
                        .ok_or_else(|| Error::config(key, format!("expected a boolean, got {v}")))?
                }
                "psd_n" => self.psd_n = want_uint(key, v)?,
                "psd_k" => self.psd_k = want_uint(key, v)?,
                "psd_scheme" => self.psd_scheme = parse_scheme(key, want_str(key, v)?)?,
                "psd_users" => self.psd_users = want_list(key, v, want_uint)?,
                "psd_segment" => self.psd_segment = want_uint(key, v)?,
                "psd_overlap" => self.psd_overlap = want_float(key, v)?,
                "out" => self.out = PathBuf::from(want_str(key, v)?),
                unknown => {
                    return Err(Error::config(
                        unknown,
                        format!("unknown key; expected one of {}", KEYS.join(", ")),
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) -> Result<()> {
        if let Some(n) = o.n {
            self.n = n;
        }
        if !o.k.is_empty() {
            self.k = o.k.clone();
            self.ber_k = o.k.clone();
        }
        if !o.schemes.is_empty() {
            self.schemes = o
                .schemes
                .iter()
                .map(|s| parse_scheme("scheme", s))
                .collect::<Result<_>>()?;
        }
        if !o.modulations.is_empty() {
            self.modulations = o
                .modulations
                .iter()
                .map(|&m| parse_modulation("mod", m))
                .collect::<Result<_>>()?;
        }
        if let Some(snr) = &o.snr {
            self.snr_db = parse_snr_grid(snr)?;
        }
        if !o.delay_ns.is_empty() {
            self.delay_spreads_ns = o.delay_ns.clone();
        }
        if let Some(b) = o.blocks {
            self.blocks = b;
        }
        if let Some(b) = o.ber_blocks {
            self.ber_blocks = b;
        }
        if let Some(b) = o.psd_blocks {
            self.psd_blocks = b;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if o.cp_len.is_some() {
            self.cp_len = o.cp_len;
        }
        if let Some(f) = o.oversample {
            self.oversample = f;
        }
        if o.papr_with_cp {
            self.papr_with_cp = true;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(w) = o.workers {
            self.workers = w;
        }
        Ok(())
    }

    /// Prefix length for blocks of `n` subcarriers.
    pub fn cp_for(&self, n: usize) -> usize {
        self.cp_len.unwrap_or((n / 4).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let pow2 = |key: &str, v: usize| {
            if v == 0 || !v.is_power_of_two() {
                Err(Error::config(key, format!("{v} is not a power of two")))
            } else {
                Ok(())
            }
        };
        let nonempty = |key: &str, len: usize| {
            if len == 0 {
                Err(Error::config(key, "list is empty"))
            } else {
                Ok(())
            }
        };
        let divides = |key: &str, ks: &[usize], n: usize| {
            for &k in ks {
                if k == 0 || !n.is_multiple_of(k) {
                    return Err(Error::config(key, format!("K={k} does not divide N={n}")));
                }
            }
            Ok(())
        };
        let positive = |key: &str, v: usize| {
            if v == 0 {
                Err(Error::config(key, "must be positive"))
            } else {
                Ok(())
            }
        };

        pow2("n", self.n)?;
        nonempty("k", self.k.len())?;
        divides("k", &self.k, self.n)?;
        nonempty("ber_k", self.ber_k.len())?;
        divides("ber_k", &self.ber_k, self.n)?;
        nonempty("schemes", self.schemes.len())?;
        nonempty("modulations", self.modulations.len())?;
        nonempty("snr", self.snr_db.len())?;
        if self
            .snr_db
            .iter()
            .any(|s| s.is_nan() || *s == f64::NEG_INFINITY)
        {
            return Err(Error::config("snr", "values must be finite or +inf"));
        }
        if self.ber_snr_db.is_nan() {
            return Err(Error::config("ber_snr_db", "not a number"));
        }
        nonempty("delay_ns", self.delay_spreads_ns.len())?;
        for (key, &d) in self
            .delay_spreads_ns
            .iter()
            .map(|d| ("delay_ns", d))
            .chain([("ber_delay_ns", &self.ber_delay_ns)])
        {
            let profile = ChannelProfile::new(d);
            profile
                .validate()
                .map_err(|e| Error::config(key, e.to_string()))?;
            if profile.tap_count() > self.n {
                return Err(Error::config(
                    key,
                    format!(
                        "{d} ns needs {} taps, more than a block",
                        profile.tap_count()
                    ),
                ));
            }
        }
        positive("blocks", self.blocks)?;
        positive("ber_blocks", self.ber_blocks)?;
        positive("psd_blocks", self.psd_blocks)?;
        for n in [self.n, self.psd_n] {
            let cp = self.cp_for(n);
            if cp == 0 || cp >= n {
                return Err(Error::config("cp_len", format!("{cp} must be in 1..{n}")));
            }
        }
        pow2("oversample", self.oversample)?;
        pow2("psd_n", self.psd_n)?;
        divides("psd_k", &[self.psd_k], self.psd_n)?;
        for &u in &self.psd_users {
            if u >= self.psd_k {
                return Err(Error::config(
                    "psd_users",
                    format!("user {u} >= psd_k {}", self.psd_k),
                ));
            }
        }
        pow2("psd_segment", self.psd_segment)?;
        let stream = self.psd_blocks * (self.psd_n + self.cp_for(self.psd_n));
        if self.psd_segment > stream {
            return Err(Error::config(
                "psd_segment",
                format!("{} exceeds the {stream}-sample stream", self.psd_segment),
            ));
        }
        if !(0.0..1.0).contains(&self.psd_overlap) {
            return Err(Error::config("psd_overlap", "must be in [0, 1)"));
        }
        Ok(())
    }

    /// TOML rendering of every result-affecting key. Output location and
    /// thread count are left out so that they never change result files.
    pub fn to_toml(&self) -> String {
        let list = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let floats = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let names = |v: &[Scheme]| {
            v.iter()
                .map(|s| format!("\"{s}\""))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mods = self
            .modulations
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let snr = self
            .snr_db
            .iter()
            .map(|&s| format_snr(s))
            .collect::<Vec<_>>()
            .join(",");
        let mut s = String::new();
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "k = [{}]", list(&self.k));
        let _ = writeln!(s, "ber_k = [{}]", list(&self.ber_k));
        let _ = writeln!(s, "schemes = [{}]", names(&self.schemes));
        let _ = writeln!(s, "modulations = [{mods}]");
        let _ = writeln!(s, "snr = \"{snr}\"");
        let _ = writeln!(s, "delay_ns = [{}]", floats(&self.delay_spreads_ns));
        let _ = writeln!(s, "ber_sweep = \"{}\"", self.ber_sweep.name());
        let _ = writeln!(s, "ber_delay_ns = {:?}", self.ber_delay_ns);
        let _ = writeln!(s, "ber_snr_db = {:?}", self.ber_snr_db);
        let _ = writeln!(s, "blocks = {}", self.blocks);
        let _ = writeln!(s, "ber_blocks = {}", self.ber_blocks);
        let _ = writeln!(s, "psd_blocks = {}", self.psd_blocks);
        let _ = writeln!(s, "seed = {}", self.seed as i64);
        if let Some(cp) = self.cp_len {
            let _ = writeln!(s, "cp_len = {cp}");
        }
        let _ = writeln!(s, "oversample = {}", self.oversample);
        let _ = writeln!(s, "papr_with_cp = {}", self.papr_with_cp);
        let _ = writeln!(s, "psd_n = {}", self.psd_n);
        let _ = writeln!(s, "psd_k = {}", self.psd_k);
        let _ = writeln!(s, "psd_scheme = \"{}\"", self.psd_scheme);
        let _ = writeln!(s, "psd_users = [{}]", list(&self.psd_users));
        let _ = writeln!(s, "psd_segment = {}", self.psd_segment);
        let _ = writeln!(s, "psd_overlap = {:?}", self.psd_overlap);
        s
    }
}

/// Defaults, then the optional TOML file, then `overrides`; validated.
pub fn parse_config(overrides: &Overrides, file: Option<&Path>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
        cfg.apply_table(&table)?;
    }
    cfg.apply_overrides(overrides)?;
    cfg.validate()?;
    Ok(cfg)
}
