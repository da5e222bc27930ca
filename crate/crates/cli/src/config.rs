//! Flat `key=value` run configuration.

use std::fmt;
use std::path::PathBuf;

use balance_dg::harness::{lookup, Case, CASE_NAMES};
use balance_dg::physics::{EntropyMode, SourceVariant};
use balance_dg::solver::{EntropyCorrection, QuadratureMode, SchemeConfig};

/// Keys accepted in a config file, in serialization order.
pub const KEYS: &[(&str, &str)] = &[
    ("case", "benchmark name (required)"),
    ("p", "polynomial degree 1..=8 (required)"),
    ("nx", "elements in x (required)"),
    ("ny", "elements in y for 2D cases [nx]"),
    ("cfl", "CFL number [0.5]"),
    ("t_final", "final time [case default]"),
    ("quadrature", "standard | global_flux [global_flux]"),
    ("source_variant", "basic | modified [modified]"),
    ("entropy_correction", "off | analytical | global [off]"),
    ("entropy_mode", "plain | total [total]"),
    (
        "target",
        "converge against the discrete steady state or after t_final: steady | finite [steady]",
    ),
    (
        "n_list",
        "mesh sizes for converge, comma list [25,50,100,200]",
    ),
    ("perturbation_amplitude", "depth perturbation amplitude [0]"),
    (
        "perturbation_center",
        "perturbation center x [case default]",
    ),
    ("output_dir", "directory for CSV output [.]"),
    ("snapshot_times", "extra output times, comma list [none]"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergeTarget {
    Steady,
    Finite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub p: usize,
    pub nx: usize,
    pub ny: Option<usize>,
    pub cfl: f64,
    pub t_final: Option<f64>,
    pub quadrature: QuadratureMode,
    pub source_variant: SourceVariant,
    pub entropy_correction: EntropyCorrection,
    pub entropy_mode: EntropyMode,
    pub target: ConvergeTarget,
    pub n_list: Vec<usize>,
    pub perturbation_amplitude: f64,
    pub perturbation_center: Option<f64>,
    pub output_dir: PathBuf,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError(format!("invalid value `{v}` for key `{key}`")))
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn quadrature_name(q: QuadratureMode) -> &'static str {
    match q {
        QuadratureMode::Standard => "standard",
        QuadratureMode::GlobalFlux => "global_flux",
    }
}

fn source_name(s: SourceVariant) -> &'static str {
    match s {
        SourceVariant::Basic => "basic",
        SourceVariant::Modified => "modified",
    }
}

fn correction_name(c: EntropyCorrection) -> &'static str {
    match c {
        EntropyCorrection::Off => "off",
        EntropyCorrection::AnalyticalFlux => "analytical",
        EntropyCorrection::GlobalFluxFlux => "global",
    }
}

fn mode_name(m: EntropyMode) -> &'static str {
    match m {
        EntropyMode::Plain => "plain",
        EntropyMode::Total => "total",
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let defaults = SchemeConfig::well_balanced(1);
        let mut case = None;
        let mut p = None;
        let mut nx = None;
        let mut c = RunConfig {
            case: String::new(),
            p: 0,
            nx: 0,
            ny: None,
            cfl: defaults.cfl,
            t_final: None,
            quadrature: defaults.quadrature,
            source_variant: defaults.source_variant,
            entropy_correction: defaults.entropy_correction,
            entropy_mode: defaults.entropy_mode,
            target: ConvergeTarget::Steady,
            n_list: vec![25, 50, 100, 200],
            perturbation_amplitude: 0.0,
            perturbation_center: None,
            output_dir: PathBuf::from("."),
            snapshot_times: Vec::new(),
        };
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ));
            };
            let (key, v) = (key.trim(), value.trim());
            if !KEYS.iter().any(|(k, _)| *k == key) {
                return err(format!("unknown key `{key}` on line {}", lineno + 1));
            }
            if seen.contains(&key) {
                return err(format!("duplicate key `{key}`"));
            }
            seen.push(key);
            match key {
                "case" => {
                    if !CASE_NAMES.contains(&v) {
                        return err(format!("unknown case `{v}`"));
                    }
                    case = Some(v.to_string());
                }
                "p" => p = Some(num(key, v)?),
                "nx" => nx = Some(num(key, v)?),
                "ny" => c.ny = Some(num(key, v)?),
                "cfl" => c.cfl = num(key, v)?,
                "t_final" => c.t_final = Some(num(key, v)?),
                "quadrature" => {
                    c.quadrature = match v {
                        "standard" => QuadratureMode::Standard,
                        "global_flux" => QuadratureMode::GlobalFlux,
                        _ => return err(format!("invalid value `{v}` for key `quadrature`")),
                    }
                }
                "source_variant" => {
                    c.source_variant = match v {
                        "basic" => SourceVariant::Basic,
                        "modified" => SourceVariant::Modified,
                        _ => return err(format!("invalid value `{v}` for key `source_variant`")),
                    }
                }
                "entropy_correction" => {
                    c.entropy_correction = match v {
                        "off" => EntropyCorrection::Off,
                        "analytical" => EntropyCorrection::AnalyticalFlux,
                        "global" => EntropyCorrection::GlobalFluxFlux,
                        _ => {
                            return err(format!("invalid value `{v}` for key `entropy_correction`"))
                        }
                    }
                }
                "entropy_mode" => {
                    c.entropy_mode = match v {
                        "plain" => EntropyMode::Plain,
                        "total" => EntropyMode::Total,
                        _ => return err(format!("invalid value `{v}` for key `entropy_mode`")),
                    }
                }
                "target" => {
                    c.target = match v {
                        "steady" => ConvergeTarget::Steady,
                        "finite" => ConvergeTarget::Finite,
                        _ => return err(format!("invalid value `{v}` for key `target`")),
                    }
                }
                "n_list" => c.n_list = list(key, v)?,
                "perturbation_amplitude" => c.perturbation_amplitude = num(key, v)?,
                "perturbation_center" => c.perturbation_center = Some(num(key, v)?),
                "output_dir" => c.output_dir = PathBuf::from(v),
                "snapshot_times" => c.snapshot_times = list(key, v)?,
                _ => unreachable!(),
            }
        }
        c.case = case.ok_or_else(|| ConfigError("missing required key `case`".into()))?;
        c.p = p.ok_or_else(|| ConfigError("missing required key `p`".into()))?;
        c.nx = nx.ok_or_else(|| ConfigError("missing required key `nx`".into()))?;
        c.scheme_config()
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        if c.nx == 0 || c.ny == Some(0) || c.n_list.contains(&0) {
            return err("element counts must be positive");
        }
        if c.t_final.is_some_and(|t| !(t >= 0.0)) {
            return err("t_final must be non-negative");
        }
        Ok(c)
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            quadrature: self.quadrature,
            source_variant: self.source_variant,
            entropy_correction: self.entropy_correction,
            entropy_mode: self.entropy_mode,
            cfl: self.cfl,
            ..SchemeConfig::well_balanced(self.p)
        }
    }

    pub fn case(&self) -> Case {
        lookup(&self.case).expect("case name checked at parse time")
    }

    pub fn t_final(&self) -> f64 {
        self.t_final.unwrap_or_else(|| self.case().t_final())
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case={}", self.case)?;
        writeln!(f, "p={}", self.p)?;
        writeln!(f, "nx={}", self.nx)?;
        if let Some(ny) = self.ny {
            writeln!(f, "ny={ny}")?;
        }
        writeln!(f, "cfl={}", self.cfl)?;
        if let Some(t) = self.t_final {
            writeln!(f, "t_final={t}")?;
        }
        writeln!(f, "quadrature={}", quadrature_name(self.quadrature))?;
        writeln!(f, "source_variant={}", source_name(self.source_variant))?;
        writeln!(
            f,
            "entropy_correction={}",
            correction_name(self.entropy_correction)
        )?;
        writeln!(f, "entropy_mode={}", mode_name(self.entropy_mode))?;
        let target = match self.target {
            ConvergeTarget::Steady => "steady",
            ConvergeTarget::Finite => "finite",
        };
        writeln!(f, "target={target}")?;
        writeln!(f, "n_list={}", join(&self.n_list))?;
        writeln!(f, "perturbation_amplitude={}", self.perturbation_amplitude)?;
        if let Some(x0) = self.perturbation_center {
            writeln!(f, "perturbation_center={x0}")?;
        }
        writeln!(f, "output_dir={}", self.output_dir.display())?;
        if !self.snapshot_times.is_empty() {
            writeln!(f, "snapshot_times={}", join(&self.snapshot_times))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = RunConfig::parse("case=lake_at_rest\np=2\nnx=50\n").unwrap();
        assert_eq!(c.scheme_config(), SchemeConfig::well_balanced(2));
        assert_eq!(c.t_final(), c.case().t_final());
        assert_eq!(c.n_list, vec![25, 50, 100, 200]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text =
            "# header\n\ncase = subcritical  # trailing\np=3\nnx=10\nsnapshot_times=0.5, 1.0\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.case, "subcritical");
        assert_eq!(c.snapshot_times, vec![0.5, 1.0]);
    }

    #[test]
    fn missing_case_is_named() {
        let e = RunConfig::parse("p=2\nnx=10\n").unwrap_err();
        assert!(e.0.contains("`case`"), "{e}");
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "case=lake_at_rest\np=2\nnx=10\ncolour=blue\n",
            "case=nowhere\np=2\nnx=10\n",
            "case=lake_at_rest\np=2\nnx=ten\n",
            "case=lake_at_rest\np=12\nnx=10\n",
            "case=lake_at_rest\np=2\nnx=10\np=3\n",
            "case=lake_at_rest\np=2\nnx=10\nquadrature=simpson\n",
            "case=lake_at_rest\np=2\nnx=10\nquadrature=standard\nentropy_correction=global\n",
            "case=lake_at_rest\np=2\nnx=10\njust text\n",
        ] {
            assert!(RunConfig::parse(text).is_err(), "{text}");
        }
    }

    proptest! {
        #[test]
        fn round_trip(
            case in prop::sample::select(CASE_NAMES.to_vec()),
            p in 1usize..=8,
            nx in 1usize..500,
            ny in prop::option::of(1usize..500),
            cfl in 0.01f64..1.0,
            t in prop::option::of(0.0f64..100.0),
            standard in any::<bool>(),
            basic in any::<bool>(),
            corr in 0usize..3,
            plain in any::<bool>(),
            amp in -1.0f64..1.0,
            x0 in prop::option::of(-10.0f64..30.0),
            snaps in prop::collection::vec(0.0f64..10.0, 0..4),
        ) {
            let corr = ["off", "analytical", "global"][corr];
            let quad = if standard && corr != "global" { "standard" } else { "global_flux" };
            let mut text = format!(
                "case={case}\np={p}\nnx={nx}\ncfl={cfl}\nquadrature={quad}\nsource_variant={}\n\
                 entropy_correction={corr}\nentropy_mode={}\nperturbation_amplitude={amp}\n",
                if basic { "basic" } else { "modified" },
                if plain { "plain" } else { "total" },
            );
            if let Some(ny) = ny { text += &format!("ny={ny}\n"); }
            if let Some(t) = t { text += &format!("t_final={t}\n"); }
            if let Some(x0) = x0 { text += &format!("perturbation_center={x0}\n"); }
            if !snaps.is_empty() { text += &format!("snapshot_times={}\n", join(&snaps)); }
            let c = RunConfig::parse(&text).unwrap();
            let once = c.to_string();
            let again = RunConfig::parse(&once).unwrap();
            prop_assert_eq!(&again, &c);
            prop_assert_eq!(again.to_string(), once);
        }
    }
}
