// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded generators for the benchmark signals.
//!
//! Every model draws its observations in time order from a single
//! `ChaCha8Rng` seeded with `seed_from_u64(seed)`. The `_TR` models reuse
//! the base model's draw for the same seed and apply `exp` elementwise.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, ChiSquared, Distribution, Gamma, Normal, Poisson, StudentT, Uniform};
use serde::{Deserialize, Serialize};

use crate::contrast::Series;
use crate::error::{NpidError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ModelId {
    /// Length 500, standard normal, no change.
    Nc,
    /// Length 200, mean 0 -> 1 at 100.
    M1,
    /// Length 500, variance 1 -> 4 at 250.
    V1,
    /// Length 1000, Unif(-3, 3) -> t3 at 500.
    D1,
    MmGauss,
    MmGaussTr,
    MmStudentT3,
    MmGauss2,
    MmPois,
    MmPoisTr,
    MvGauss,
    MvGauss2,
    Md1,
    Md2,
    Md3,
    /// Mean changes of size 4 every 30 points, sd 0.5.
    T1(usize),
    /// Sd alternating 1 and 2 every 250 points.
    T2(usize),
    NoChangeGauss(usize),
    NoChangeCauchy(usize),
    NoChangePois {
        rate: f64,
        len: usize,
    },
}

/// A model and the seed of its draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub id: ModelId,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(id: ModelId, seed: u64) -> Self {
        Self { id, seed }
    }
}

#[derive(Debug, Clone, Copy)]
enum Noise {
    Normal {
        mean: f64,
        sd: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Standard Student-t shifted by `shift`.
    StudentT {
        df: f64,
        shift: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
    ChiSq {
        df: f64,
    },
    /// Uncentered Poisson noise added to `shift`.
    Poisson {
        rate: f64,
        shift: f64,
    },
    Cauchy {
        loc: f64,
        scale: f64,
    },
}

impl Noise {
    fn gauss(mean: f64, var: f64) -> Self {
        Noise::Normal {
            mean,
            sd: var.sqrt(),
        }
    }

    fn fill(self, rng: &mut ChaCha8Rng, n: usize, out: &mut Vec<f64>) -> Result<()> {
        let bad = |e: &dyn fmt::Display| NpidError::domain(format!("distribution: {e}"));
        match self {
            Noise::Normal { mean, sd } => {
                let d = Normal::new(mean, sd).map_err(|e| bad(&e))?;
                out.extend(d.sample_iter(&mut *rng).take(n));
            }
            Noise::Uniform { lo, hi } => {
                let d = Uniform::new(lo, hi).map_err(|e| bad(&e))?;
                out.extend(d.sample_iter(&mut *rng).take(n));
            }
            Noise::StudentT { df, shift } => {
                let d = StudentT::new(df).map_err(|e| bad(&e))?;
                out.extend(d.sample_iter(&mut *rng).take(n).map(|x| x + shift));
            }
            Noise::Gamma { shape, rate } => {
                let d = Gamma::new(shape, 1.0 / rate).map_err(|e| bad(&e))?;
                out.extend(d.sample_iter(&mut *rng).take(n));
            }
            Noise::ChiSq { df } => {
                let d = ChiSquared::new(df).map_err(|e| bad(&e))?;
                out.extend(d.sample_iter(&mut *rng).take(n));
            }
            Noise::Poisson { rate, shift } => {
                let d = Poisson::new(rate).map_err(|e| bad(&e))?;
                out.extend(d.sample_iter(&mut *rng).take(n).map(|x| x + shift));
            }
            Noise::Cauchy { loc, scale } => {
                let d = Cauchy::new(loc, scale).map_err(|e| bad(&e))?;
                out.extend(d.sample_iter(&mut *rng).take(n));
            }
        }
        Ok(())
    }
}

/// Segment distributions with the change-points separating them.
struct Layout {
    len: usize,
    changepoints: Vec<usize>,
    segments: Vec<Noise>,
}

impl Layout {
    fn new(len: usize, changepoints: Vec<usize>, segments: Vec<Noise>) -> Self {
        debug_assert_eq!(changepoints.len() + 1, segments.len());
        Self {
            len,
            changepoints,
            segments,
        }
    }

    fn draw(&self, seed: u64) -> Result<Series> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(self.len);
        let mut prev = 0;
        for (i, noise) in self.segments.iter().enumerate() {
            let end = self.changepoints.get(i).copied().unwrap_or(self.len);
            noise.fill(&mut rng, end - prev, &mut values)?;
            prev = end;
        }
        Series::with_truth(values, self.changepoints.clone())
    }
}

/// Multiples of `step` strictly inside `(0, len)` and at most `len - step`.
fn regular(step: usize, len: usize) -> Vec<usize> {
    (1..)
        .map(|k| k * step)
        .take_while(|&r| r + step <= len)
        .collect()
}

fn mean_shifts(levels: &[f64], noise: impl Fn(f64) -> Noise) -> Vec<Noise> {
    levels.iter().map(|&m| noise(m)).collect()
}

const MM_LEVELS: [f64; 4] = [0.0, 1.0, -0.2, -1.3];

impl ModelId {
    /// The models of the benchmark study with fixed lengths.
    pub const BENCHMARKS: [ModelId; 15] = [
        ModelId::Nc,
        ModelId::M1,
        ModelId::V1,
        ModelId::D1,
        ModelId::MmGauss,
        ModelId::MmGaussTr,
        ModelId::MmStudentT3,
        ModelId::MmGauss2,
        ModelId::MmPois,
        ModelId::MmPoisTr,
        ModelId::MvGauss,
        ModelId::MvGauss2,
        ModelId::Md1,
        ModelId::Md2,
        ModelId::Md3,
    ];

    fn layout(self) -> Result<Layout> {
        use Noise::*;
        let std_normal = Normal { mean: 0.0, sd: 1.0 };
        let sqrt3 = 3f64.sqrt();
        let layout = match self {
            ModelId::Nc => Layout::new(500, vec![], vec![std_normal]),
            ModelId::M1 => Layout::new(200, vec![100], vec![std_normal, Noise::gauss(1.0, 1.0)]),
            ModelId::V1 => Layout::new(500, vec![250], vec![std_normal, Noise::gauss(0.0, 4.0)]),
            ModelId::D1 => Layout::new(
                1000,
                vec![500],
                vec![
                    Uniform { lo: -3.0, hi: 3.0 },
                    StudentT {
                        df: 3.0,
                        shift: 0.0,
                    },
                ],
            ),
            ModelId::MmGauss | ModelId::MmGaussTr => Layout::new(
                400,
                vec![100, 200, 300],
                mean_shifts(&MM_LEVELS, |m| Noise::gauss(m, 1.0)),
            ),
            ModelId::MmStudentT3 => Layout::new(
                400,
                vec![100, 200, 300],
                mean_shifts(&MM_LEVELS, |m| StudentT { df: 3.0, shift: m }),
            ),
            ModelId::MmGauss2 => {
                let cps = regular(80, 1600);
                let segs = (0..=cps.len())
                    .map(|i| Noise::gauss(if i % 2 == 0 { 0.0 } else { 2.0 }, 1.0))
                    .collect();
                Layout::new(1600, cps, segs)
            }
            ModelId::MmPois | ModelId::MmPoisTr => Layout::new(
                400,
                vec![100, 200, 300],
                mean_shifts(&MM_LEVELS, |m| Poisson {
                    rate: 1.0,
                    shift: m,
                }),
            ),
            ModelId::MvGauss => Layout::new(
                600,
                vec![150, 350, 500],
                [1.0, 9.0, 1.44, 0.1]
                    .iter()
                    .map(|&v| Noise::gauss(0.0, v))
                    .collect(),
            ),
            ModelId::MvGauss2 => Layout::new(
                1000,
                vec![200, 350, 550, 700, 900],
                [10.0, 2.0, 0.3, 4.0, 20.0, 2.0]
                    .iter()
                    .map(|&v| Noise::gauss(0.0, v))
                    .collect(),
            ),
            ModelId::Md1 => Layout::new(
                750,
                vec![250, 500],
                vec![
                    Gamma {
                        shape: 1.0,
                        rate: 1.0,
                    },
                    Poisson {
                        rate: 1.0,
                        shift: 0.0,
                    },
                    Uniform {
                        lo: 1.0 - sqrt3,
                        hi: 1.0 + sqrt3,
                    },
                ],
            ),
            ModelId::Md2 => Layout::new(
                500,
                vec![100, 250, 350],
                vec![
                    std_normal,
                    ChiSq { df: 1.0 },
                    StudentT {
                        df: 3.0,
                        shift: 0.0,
                    },
                    Noise::gauss(1.0, 1.0),
                ],
            ),
            ModelId::Md3 => Layout::new(
                1000,
                vec![200, 500, 750],
                vec![
                    Gamma {
                        shape: 1.0,
                        rate: 1.0,
                    },
                    ChiSq { df: 3.0 },
                    Noise::gauss(0.5, 1.0),
                    StudentT {
                        df: 5.0,
                        shift: 0.0,
                    },
                ],
            ),
            ModelId::T1(len) => {
                if len < 60 {
                    return Err(NpidError::domain("T1 needs length >= 60"));
                }
                let cps = regular(30, len);
                let segs = (0..=cps.len())
                    .map(|i| Normal {
                        mean: if i % 2 == 0 { 0.0 } else { 4.0 },
                        sd: 0.5,
                    })
                    .collect();
                Layout::new(len, cps, segs)
            }
            ModelId::T2(len) => {
                if len < 500 {
                    return Err(NpidError::domain("T2 needs length >= 500"));
                }
                let cps = regular(250, len);
                let segs = (0..=cps.len())
                    .map(|i| Normal {
                        mean: 0.0,
                        sd: if i % 2 == 0 { 1.0 } else { 2.0 },
                    })
                    .collect();
                Layout::new(len, cps, segs)
            }
            ModelId::NoChangeGauss(len) => Layout::new(len, vec![], vec![std_normal]),
            ModelId::NoChangeCauchy(len) => Layout::new(
                len,
                vec![],
                vec![Cauchy {
                    loc: 0.0,
                    scale: 1.0,
                }],
            ),
            ModelId::NoChangePois { rate, len } => {
                Layout::new(len, vec![], vec![Poisson { rate, shift: 0.0 }])
            }
        };
        if layout.len < 2 {
            return Err(NpidError::domain(format!("{self} needs length >= 2")));
        }
        Ok(layout)
    }

    pub fn series_len(self) -> Result<usize> {
        self.layout().map(|l| l.len)
    }

    pub fn truth(self) -> Result<Vec<usize>> {
        self.layout().map(|l| l.changepoints)
    }

    fn exp_transformed(self) -> bool {
        matches!(self, ModelId::MmGaussTr | ModelId::MmPoisTr)
    }
}

/// Draws the series for `spec`, truth attached.
pub fn generate(spec: &ModelSpec) -> Result<Series> {
    let base = spec.id.layout()?.draw(spec.seed)?;
    if spec.id.exp_transformed() {
        base.map(f64::exp)
    } else {
        Ok(base)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelId::Nc => f.write_str("NC"),
            ModelId::M1 => f.write_str("M1"),
            ModelId::V1 => f.write_str("V1"),
            ModelId::D1 => f.write_str("D1"),
            ModelId::MmGauss => f.write_str("MM_GAUSS"),
            ModelId::MmGaussTr => f.write_str("MM_GAUSS_TR"),
            ModelId::MmStudentT3 => f.write_str("MM_STUDENT_T3"),
            ModelId::MmGauss2 => f.write_str("MM_GAUSS2"),
            ModelId::MmPois => f.write_str("MM_POIS"),
            ModelId::MmPoisTr => f.write_str("MM_POIS_TR"),
            ModelId::MvGauss => f.write_str("MV_GAUSS"),
            ModelId::MvGauss2 => f.write_str("MV_GAUSS2"),
            ModelId::Md1 => f.write_str("MD1"),
            ModelId::Md2 => f.write_str("MD2"),
            ModelId::Md3 => f.write_str("MD3"),
            ModelId::T1(l) => write!(f, "T1:{l}"),
            ModelId::T2(l) => write!(f, "T2:{l}"),
            ModelId::NoChangeGauss(t) => write!(f, "NOCHANGE_GAUSS:{t}"),
            ModelId::NoChangeCauchy(t) => write!(f, "NOCHANGE_CAUCHY:{t}"),
            ModelId::NoChangePois { rate, len } => write!(f, "NOCHANGE_POIS:{rate}:{len}"),
        }
    }
}

impl FromStr for ModelId {
    type Err = NpidError;

    /// Accepts `NAME`, `NAME:arg[:arg]` or `NAME(arg[,arg])`, any case.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || NpidError::UnknownModel(s.to_string());
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        let (name, args) = match norm.find([':', '(']) {
            Some(i) => {
                let rest = norm[i + 1..].trim_end_matches(')');
                let args: Vec<&str> = rest.split([':', ',']).map(str::trim).collect();
                (norm[..i].to_string(), args)
            }
            None => (norm.clone(), Vec::new()),
        };
        let int = |i: usize| -> Result<usize> {
            args.get(i).and_then(|a| a.parse().ok()).ok_or_else(unknown)
        };
        let fixed = |id: ModelId| {
            if args.is_empty() {
                Ok(id)
            } else {
                Err(unknown())
            }
        };
        match name.as_str() {
            "NC" => fixed(ModelId::Nc),
            "M1" => fixed(ModelId::M1),
            "V1" => fixed(ModelId::V1),
            "D1" => fixed(ModelId::D1),
            "MM_GAUSS" => fixed(ModelId::MmGauss),
            "MM_GAUSS_TR" => fixed(ModelId::MmGaussTr),
            "MM_STUDENT_T3" => fixed(ModelId::MmStudentT3),
            "MM_GAUSS2" => fixed(ModelId::MmGauss2),
            "MM_POIS" => fixed(ModelId::MmPois),
            "MM_POIS_TR" => fixed(ModelId::MmPoisTr),
            "MV_GAUSS" => fixed(ModelId::MvGauss),
            "MV_GAUSS2" => fixed(ModelId::MvGauss2),
            "MD1" => fixed(ModelId::Md1),
            "MD2" => fixed(ModelId::Md2),
            "MD3" => fixed(ModelId::Md3),
            "T1" if args.len() == 1 => Ok(ModelId::T1(int(0)?)),
            "T2" if args.len() == 1 => Ok(ModelId::T2(int(0)?)),
            "NOCHANGE_GAUSS" if args.len() == 1 => Ok(ModelId::NoChangeGauss(int(0)?)),
            "NOCHANGE_CAUCHY" if args.len() == 1 => Ok(ModelId::NoChangeCauchy(int(0)?)),
            "NOCHANGE_POIS" if args.len() == 2 => {
                let rate: f64 = args[0].parse().map_err(|_| unknown())?;
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(unknown());
                }
                Ok(ModelId::NoChangePois { rate, len: int(1)? })
            }
            _ => Err(unknown()),
        }
    }
}

impl From<ModelId> for String {
    fn from(id: ModelId) -> Self {
        id.to_string()
    }
}

impl TryFrom<String> for ModelId {
    type Error = NpidError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_layouts() {
        let m1 = generate(&ModelSpec::new(ModelId::M1, 9)).unwrap();
        assert_eq!(m1.len(), 200);
        assert_eq!(m1.truth(), Some(&[100][..]));
        let g2 = ModelId::MmGauss2;
        let truth = g2.truth().unwrap();
        assert_eq!(g2.series_len().unwrap(), 1600);
        assert_eq!(truth.len(), 19);
        assert_eq!(truth.first(), Some(&80));
        assert_eq!(truth.last(), Some(&1520));
        assert_eq!(
            ModelId::MvGauss2.truth().unwrap(),
            vec![200, 350, 550, 700, 900]
        );
        assert_eq!(ModelId::T1(3000).truth().unwrap().len(), 99);
        assert_eq!(ModelId::T1(3000).truth().unwrap().last(), Some(&2970));
        assert_eq!(ModelId::T2(3000).truth().unwrap().last(), Some(&2750));
        assert!(ModelId::NoChangeGauss(30).truth().unwrap().is_empty());
    }

    #[test]
    fn every_benchmark_generates() {
        for id in ModelId::BENCHMARKS {
            let s = generate(&ModelSpec::new(id, 3)).unwrap();
            assert_eq!(s.len(), id.series_len().unwrap(), "{id}");
            let truth = s.truth().unwrap();
            assert!(truth.iter().all(|&r| r > 1 && r < s.len()), "{id}");
        }
    }

    #[test]
    fn transformed_models_are_exp_of_base() {
        for (tr, base) in [
            (ModelId::MmGaussTr, ModelId::MmGauss),
            (ModelId::MmPoisTr, ModelId::MmPois),
        ] {
            let a = generate(&ModelSpec::new(tr, 77)).unwrap();
            let b = generate(&ModelSpec::new(base, 77)).unwrap();
            assert_eq!(a.truth(), b.truth());
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(*x, y.exp());
            }
        }
    }

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let spec = ModelSpec::new(ModelId::Md3, 5);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        assert_ne!(
            generate(&spec).unwrap(),
            generate(&ModelSpec::new(ModelId::Md3, 6)).unwrap()
        );
    }

    #[test]
    fn poisson_segment_is_integer_valued() {
        let s = generate(&ModelSpec::new(ModelId::Md1, 1)).unwrap();
        assert!(s.values()[250..500].iter().all(|x| x.fract() == 0.0));
        let p = generate(&ModelSpec::new(ModelId::MmPois, 1)).unwrap();
        // Level -0.2 plus nonnegative integers.
        assert!(p.values()[200..300]
            .iter()
            .all(|x| ((x + 0.2).round() - (x + 0.2)).abs() < 1e-12));
    }

    #[test]
    fn parse_and_display() {
        for id in ModelId::BENCHMARKS {
            assert_eq!(id.to_string().parse::<ModelId>().unwrap(), id);
        }
        assert_eq!("mm_gauss".parse::<ModelId>().unwrap(), ModelId::MmGauss);
        assert_eq!("T1(3000)".parse::<ModelId>().unwrap(), ModelId::T1(3000));
        assert_eq!("t2:6000".parse::<ModelId>().unwrap(), ModelId::T2(6000));
        assert_eq!(
            "NOCHANGE_POIS(0.3,75)".parse::<ModelId>().unwrap(),
            ModelId::NoChangePois { rate: 0.3, len: 75 }
        );
        assert_eq!(
            ModelId::NoChangePois {
                rate: 30.0,
                len: 200
            }
            .to_string()
            .parse::<ModelId>()
            .unwrap(),
            ModelId::NoChangePois {
                rate: 30.0,
                len: 200
            }
        );
        assert!(matches!(
            "M7".parse::<ModelId>(),
            Err(NpidError::UnknownModel(_))
        ));
        assert!("NC:5".parse::<ModelId>().is_err());
        assert!("T1".parse::<ModelId>().is_err());
    }

    #[test]
    fn short_models_rejected() {
        assert!(generate(&ModelSpec::new(ModelId::NoChangeGauss(1), 0)).is_err());
        assert!(generate(&ModelSpec::new(ModelId::T1(40), 0)).is_err());
    }
}
