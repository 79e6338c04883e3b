//! Problem sources: strict-schema TOML files and the built-in registry.

use serde::Deserialize;
use sl4_core::bc::{dirichlet_pair, hinged_pair, natural_pair, BoundaryForm};
use sl4_core::hamiltonian::QuasiVector;
use sl4_core::linalg::{c, Mat2};
use sl4_core::problem::{EndpointClass, EndpointKind, ProblemSpec, Side};

use crate::CliError;

/// A problem ready to run, plus everything the PROBLEM report section needs.
pub struct Loaded {
    pub spec: ProblemSpec,
    pub name: String,
    /// Coefficient strings and interval, pre-formatted for the report.
    pub describe: Vec<String>,
    /// Sides whose class was not declared and should be probed by classify.
    pub auto_left: bool,
    pub auto_right: bool,
}

// ---------------------------------------------------------------------------
// TOML schema (strict: unknown keys are rejected everywhere)

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    p: String,
    s: String,
    q: String,
    w: String,
    interval: [TomlScalar; 2],
    left: Option<EndpointBlock>,
    right: Option<EndpointBlock>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TomlScalar {
    Num(f64),
    Str(String),
}

impl TomlScalar {
    fn endpoint(&self) -> Result<f64, CliError> {
        match self {
            TomlScalar::Num(v) => Ok(*v),
            TomlScalar::Str(s) => match s.trim() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => other
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad interval endpoint {other:?}"))),
            },
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TomlComplex {
    Re(f64),
    Pair([f64; 2]),
}

impl TomlComplex {
    fn value(&self) -> sl4_core::C64 {
        match self {
            TomlComplex::Re(v) => c(*v, 0.0),
            TomlComplex::Pair([re, im]) => c(*re, *im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EndpointBlock {
    class: Option<String>,
    #[serde(default)]
    bc: Vec<BcBlock>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BcBlock {
    #[serde(rename = "type")]
    kind: String,
    #[serde(rename = "A1")]
    a1: Option<Vec<TomlComplex>>,
    #[serde(rename = "A2")]
    a2: Option<Vec<TomlComplex>>,
    #[serde(rename = "WR")]
    wr: Option<[f64; 3]>,
    psi: Option<Vec<TomlComplex>>,
    psi2: Option<Vec<TomlComplex>>,
}

fn mat2(name: &str, entries: &Option<Vec<TomlComplex>>) -> Result<Mat2, CliError> {
    let entries = entries
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("bc type \"pair\" needs {name}")))?;
    if entries.len() != 4 {
        return Err(CliError::Config(format!("{name} needs 4 row-major entries")));
    }
    let e: Vec<_> = entries.iter().map(|v| v.value()).collect();
    Ok(Mat2([[e[0], e[1]], [e[2], e[3]]]))
}

fn quasi(name: &str, entries: &[TomlComplex]) -> Result<QuasiVector, CliError> {
    if entries.len() != 4 {
        return Err(CliError::Config(format!("{name} needs 4 quasi-derivative values")));
    }
    Ok(QuasiVector::new([
        entries[0].value(),
        entries[1].value(),
        entries[2].value(),
        entries[3].value(),
    ]))
}

impl BcBlock {
    fn build(&self) -> Result<BoundaryForm, CliError> {
        match self.kind.as_str() {
            "dirichlet" => Ok(dirichlet_pair()),
            "pair" => Ok(BoundaryForm::RegularPair {
                a1: mat2("A1", &self.a1)?,
                a2: mat2("A2", &self.a2)?,
            }),
            "weyl" => {
                let [kappa, mu, nu] =
                    self.wr.ok_or_else(|| CliError::Config("bc type \"weyl\" needs WR".into()))?;
                Ok(BoundaryForm::WeylForm {
                    wr: Mat2::from_real([[kappa, mu], [mu, nu]]),
                })
            }
            "lagrange" => {
                let psi = self
                    .psi
                    .as_ref()
                    .ok_or_else(|| CliError::Config("bc type \"lagrange\" needs psi".into()))?;
                let psi2 = match &self.psi2 {
                    Some(v) => Some(quasi("psi2", v)?),
                    None => None,
                };
                Ok(BoundaryForm::LagrangeCondition { psi: quasi("psi", psi)?, psi2 })
            }
            other => Err(CliError::Config(format!(
                "unknown bc type {other:?} (expected dirichlet|pair|weyl|lagrange)"
            ))),
        }
    }
}

fn parse_class(s: &str) -> Result<Option<EndpointKind>, CliError> {
    match s {
        "auto" => Ok(None),
        "regular" => Ok(Some(EndpointKind::Regular)),
        "lim2" => Ok(Some(EndpointKind::Lim2)),
        "lim3" => Ok(Some(EndpointKind::Lim3)),
        "lim4" => Ok(Some(EndpointKind::Lim4)),
        other => Err(CliError::Config(format!(
            "unknown endpoint class {other:?} (expected auto|regular|lim2|lim3|lim4)"
        ))),
    }
}

pub fn load_file(path: &std::path::Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: ProblemFile =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;

    let a = file.interval[0].endpoint()?;
    let b = file.interval[1].endpoint()?;
    let mut spec = ProblemSpec::from_exprs(&file.p, &file.s, &file.q, &file.w, a, b)
        .map_err(|e| CliError::Config(format!("{e}")))?;

    let mut auto = [false, false];
    for (i, (block, side)) in [(&file.left, Side::Left), (&file.right, Side::Right)]
        .into_iter()
        .enumerate()
    {
        let Some(block) = block else { continue };
        if let Some(class) = &block.class {
            match parse_class(class)? {
                Some(kind) => {
                    let declared = EndpointClass::declared(kind);
                    match side {
                        Side::Left => spec.left_class = declared,
                        Side::Right => spec.right_class = declared,
                    }
                }
                None => auto[i] = true,
            }
        }
        let forms: Result<Vec<_>, _> = block.bc.iter().map(BcBlock::build).collect();
        match side {
            Side::Left => spec.left_bc = forms?,
            Side::Right => spec.right_bc = forms?,
        }
    }

    let describe = describe_lines(&file.p, &file.s, &file.q, &file.w, a, b);
    Ok(Loaded {
        spec,
        name: path.display().to_string(),
        describe,
        auto_left: auto[0],
        auto_right: auto[1],
    })
}

fn describe_lines(p: &str, s: &str, q: &str, w: &str, a: f64, b: f64) -> Vec<String> {
    vec![
        format!("p(x) = {p}"),
        format!("s(x) = {s}"),
        format!("q(x) = {q}"),
        format!("w(x) = {w}"),
        format!("interval: ({a}, {b})"),
    ]
}

// ---------------------------------------------------------------------------
// built-in registry

pub fn load_builtin(name: &str) -> Result<Loaded, CliError> {
    let simple = |p: &str, q: &str, a: f64, b: f64| {
        ProblemSpec::from_exprs(p, "0", q, "1", a, b)
            .map_err(|e| CliError::Config(format!("{e}")))
    };
    match name {
        "hinged" => {
            let mut spec = simple("1", "0", 0.0, 1.0)?;
            spec.left_bc = vec![hinged_pair()];
            spec.right_bc = vec![hinged_pair()];
            Ok(Loaded {
                spec,
                name: "hinged".into(),
                describe: describe_lines("1", "0", "0", "1", 0.0, 1.0),
                auto_left: false,
                auto_right: false,
            })
        }
        "clamped" => {
            let mut spec = simple("1", "0", 0.0, 1.0)?;
            spec.left_bc = vec![dirichlet_pair()];
            spec.right_bc = vec![dirichlet_pair()];
            Ok(Loaded {
                spec,
                name: "clamped".into(),
                describe: describe_lines("1", "0", "0", "1", 0.0, 1.0),
                auto_left: false,
                auto_right: false,
            })
        }
        "free-beam" => {
            // free end at 0, nothing imposed toward infinity
            let mut spec = simple("1", "0", 0.0, f64::INFINITY)?;
            spec.left_bc = vec![natural_pair()];
            Ok(Loaded {
                spec,
                name: "free-beam".into(),
                describe: describe_lines("1", "0", "0", "1", 0.0, f64::INFINITY),
                auto_left: false,
                auto_right: true,
            })
        }
        "quartic-well" => {
            let mut spec = simple("1", "x^4", 0.0, f64::INFINITY)?;
            spec.left_bc = vec![dirichlet_pair()];
            Ok(Loaded {
                spec,
                name: "quartic-well".into(),
                describe: describe_lines("1", "0", "x^4", "1", 0.0, f64::INFINITY),
                auto_left: false,
                auto_right: true,
            })
        }
        _ => {
            if let Some(cval) = name.strip_prefix("euler-family:C=") {
                let cval: f64 = cval
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad euler-family constant {cval:?}")))?;
                let q = format!("{cval:?}/x^4");
                let mut spec = simple("1", &q, 0.0, 1.0)?;
                // x = 0 is genuinely singular; the default finite-end class
                // would wrongly say regular, so leave it to the classifier
                spec.left_class = EndpointClass { kind: EndpointKind::Lim3, confidence: 0.0 };
                spec.right_bc = vec![dirichlet_pair()];
                Ok(Loaded {
                    spec,
                    name: name.into(),
                    describe: describe_lines("1", "0", &q, "1", 0.0, 1.0),
                    auto_left: true,
                    auto_right: false,
                })
            } else {
                Err(CliError::Config(format!(
                    "unknown builtin {name:?} (expected hinged|clamped|free-beam|quartic-well|euler-family:C=<val>)"
                )))
            }
        }
    }
}

pub fn load(problem: &Option<std::path::PathBuf>, builtin: &Option<String>) -> Result<Loaded, CliError> {
    match (problem, builtin) {
        (Some(path), None) => load_file(path),
        (None, Some(name)) => load_builtin(name),
        (Some(_), Some(_)) => {
            Err(CliError::Config("--problem and --builtin are mutually exclusive".into()))
        }
        (None, None) => Err(CliError::Config("one of --problem or --builtin is required".into())),
    }
}
