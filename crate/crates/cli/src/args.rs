//! Command-line flags and their conversion into map parameters.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ratsurf::params::{parse_sign, CFile, ParamFile};
use ratsurf::{Error, MapParams, Result};

#[derive(Parser, Debug)]
#[command(name = "ratsurf", version, about = "Rational surface automorphisms with positive entropy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Characteristic polynomial, dynamical degree and entropy of f_*
    Spectrum(Common),
    /// The admissible values of c for a cycle length n
    Cn {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Run the lattice, chart, factorization and parabolic suites
    Verify(SuiteArgs),
    /// Fixed points in the plane with multipliers and type
    FixedPoints(Common),
    /// Orbits of the seed points
    Orbit {
        #[command(flatten)]
        common: Common,
        /// CSV (`x,y` per line) or JSON (`[[x, y], ...]`) seed file
        #[arg(long)]
        seeds: Option<PathBuf>,
        /// a single seed `x,y`; may be repeated
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
        /// iterations per seed
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// iterate the inverse map
        #[arg(long)]
        inverse: bool,
    },
    /// Unstable (or stable) manifolds of the real saddles
    Unstable {
        #[command(flatten)]
        common: Common,
        /// arclength traced per branch
        #[arg(long, default_value_t = 20.0)]
        arclength: f64,
        /// largest gap between consecutive points
        #[arg(long, default_value_t = 0.01)]
        spacing: f64,
        /// plot window `max(|x|, |y|)`
        #[arg(long, default_value_t = 10.0)]
        window: f64,
        /// emit the stable manifolds, reflected across x = y
        #[arg(long)]
        stable: bool,
    },
    /// Fiber transitions, closed form against numeric limits
    Charts(SuiteArgs),
    /// f^(2n) and its differential on the parabolic set
    Parabolic(SuiteArgs),
    /// Reflection factorizations of f_* and the reversor
    Weyl(Common),
    /// Degree sequence d_m = (f_*^m e_0) . e_0
    Degrees {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        m: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// parameter file (JSON); flags override its values
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    /// index j of c = 2 cos(j pi / n) or its odd-n analogue
    #[arg(long = "c-j")]
    pub c_j: Option<u32>,
    /// branch sign of c, `+` or `-`
    #[arg(long = "c-sign", allow_hyphen_values = true)]
    pub c_sign: Option<String>,
    /// coefficient `l=re[,im]`; may be repeated
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Vec<String>,
    /// Jacobian determinant `re[,im]`
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// directory for data files
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug, Clone)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: Common,
    /// tolerance for numeric transition and differential checks
    #[arg(long)]
    pub tol: Option<f64>,
    /// sample points per chart or component
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// seed of the sampler
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// largest degree index in the growth checks
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
}

/// `re[,im]`
pub fn parse_complex(s: &str) -> Result<[f64; 2]> {
    let bad = || Error::InvalidParams(format!("expected re[,im], got {s:?}"));
    let mut parts = s.split(',');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(t) => t.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok([re, im])
}

impl MapArgs {
    /// The parameter file if given, else the `figure1` preset when no
    /// shape flag is set, else an empty member of the requested shape.
    pub fn params(&self) -> Result<MapParams> {
        let mut file = match &self.params {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| Error::ParamFile(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<ParamFile>(&text).map_err(|e| Error::ParamFile(e.to_string()))?
            }
            None if self.n.is_none() && self.k.is_none() => MapParams::figure1().to_file_format(),
            None => ParamFile { n: 2, k: 4, c: None, a: BTreeMap::new(), delta: None },
        };
        if let Some(n) = self.n {
            file.n = n;
        }
        if let Some(k) = self.k {
            file.k = k;
        }
        match (self.c_j, &self.c_sign) {
            (Some(j), sign) => {
                let sign = sign.clone().unwrap_or_else(|| "+".into());
                parse_sign(&sign)?;
                file.c = Some(CFile::Root { j, sign });
            }
            (None, Some(sign)) => {
                parse_sign(sign)?;
                match &mut file.c {
                    Some(CFile::Root { sign: s, .. }) => *s = sign.clone(),
                    _ => return Err(Error::InvalidParams("--c-sign needs --c-j".into())),
                }
            }
            (None, None) => {}
        }
        for entry in &self.a {
            let (idx, val) = entry
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("--a expects l=re[,im], got {entry:?}")))?;
            file.a.insert(idx.trim().to_string(), parse_complex(val)?);
        }
        if let Some(d) = &self.delta {
            file.delta = Some(parse_complex(d)?);
        }
        file.into_params()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> MapArgs {
        let mut full = vec!["ratsurf", "fixed-points"];
        full.extend_from_slice(args);
        match Cli::parse_from(full).command {
            Command::FixedPoints(c) => c.map,
            _ => unreachable!(),
        }
    }

    #[test]
    fn complex_values() {
        assert_eq!(parse_complex("-2.64").unwrap(), [-2.64, 0.0]);
        assert_eq!(parse_complex("1, -0.5").unwrap(), [1.0, -0.5]);
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn defaults_to_preset() {
        let p = parse(&[]).params().unwrap();
        let preset = MapParams::figure1();
        assert_eq!((p.n, p.k, p.a.clone()), (preset.n, preset.k, preset.a));
    }

    #[test]
    fn shape_flags_start_empty() {
        let p = parse(&["--n", "3", "--k", "2"]).params().unwrap();
        assert!(p.a.is_empty());
        let p = parse(&["--n", "4", "--k", "2", "--c-j", "3", "--c-sign", "-", "--delta", "1,0"]).params().unwrap();
        // the sign negates 2 cos(3 pi / 4)
        assert!((p.c_value() - 2f64.sqrt()).abs() < 1e-12);
        assert!(parse(&["--n", "4", "--k", "2", "--c-sign", "-"]).params().is_err());
        assert!(parse(&["--a", "2"]).params().is_err());
    }
}
