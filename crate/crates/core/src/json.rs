//! JSON wire formats for distributions, penalty curves and extended reals.

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::maxitive::{PenaltyCurve, PenaltyFamily};
use crate::pwl::PiecewiseLinearFn;
use crate::quantile::StepQuantile;

/// Distribution input: raw atoms or an explicit quantile function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionJson {
    Samples {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Quantile {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl TryFrom<DistributionJson> for StepQuantile {
    type Error = Error;

    fn try_from(json: DistributionJson) -> Result<Self, Error> {
        match json {
            DistributionJson::Samples { values, weights } => {
                StepQuantile::from_samples(&values, weights.as_deref())
            }
            DistributionJson::Quantile {
                breakpoints,
                values,
            } => StepQuantile::from_parts(breakpoints, values),
        }
    }
}

impl From<StepQuantile> for DistributionJson {
    fn from(q: StepQuantile) -> Self {
        DistributionJson::Quantile {
            breakpoints: q.breakpoints().to_vec(),
            values: q.values().to_vec(),
        }
    }
}

/// A real number or `±∞`, written as the strings `"inf"` and `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x == f64::INFINITY {
            s.serialize_str("inf")
        } else if x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else {
            s.serialize_f64(x)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                Ok(ExtReal(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v {
                    "inf" | "+inf" | "infinity" => Ok(ExtReal(f64::INFINITY)),
                    "-inf" | "-infinity" => Ok(ExtReal(f64::NEG_INFINITY)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}

/// `#[serde(with = "ext_real")]` for `f64` fields that may be infinite.
pub mod ext_real {
    use super::ExtReal;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        ExtReal(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        ExtReal::deserialize(d).map(|e| e.0)
    }
}

/// `#[serde(with = "ext_real_vec")]` for `Vec<f64>` fields.
pub mod ext_real_vec {
    use super::ExtReal;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&ExtReal(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<ExtReal>::deserialize(d).map(|v| v.into_iter().map(|e| e.0).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    StepLeft,
    PiecewiseLinear,
}

/// Wire form of a [`PenaltyCurve`]. Piecewise-linear grids include 0 and 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub kind: CurveKind,
    pub grid: Vec<f64>,
    #[serde(with = "ext_real_vec")]
    pub values: Vec<f64>,
}

impl TryFrom<CurveJson> for PenaltyCurve {
    type Error = Error;

    fn try_from(json: CurveJson) -> Result<Self, Error> {
        match json.kind {
            CurveKind::StepLeft => PenaltyCurve::step_left(json.grid, json.values),
            CurveKind::PiecewiseLinear => PenaltyCurve::piecewise_linear(json.grid, json.values),
        }
    }
}

impl From<PenaltyCurve> for CurveJson {
    fn from(curve: PenaltyCurve) -> Self {
        match curve {
            PenaltyCurve::StepLeft { grid, values } => CurveJson {
                kind: CurveKind::StepLeft,
                grid,
                values,
            },
            PenaltyCurve::PiecewiseLinear(f) => CurveJson {
                kind: CurveKind::PiecewiseLinear,
                grid: f.knots().to_vec(),
                values: f.values().to_vec(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub levels: Vec<f64>,
    pub curves: Vec<PenaltyCurve>,
}

impl TryFrom<FamilyJson> for PenaltyFamily {
    type Error = Error;

    fn try_from(json: FamilyJson) -> Result<Self, Error> {
        PenaltyFamily::new(json.levels, json.curves, crate::DEFAULT_TOL)
    }
}

impl From<PenaltyFamily> for FamilyJson {
    fn from(fam: PenaltyFamily) -> Self {
        FamilyJson {
            levels: fam.levels().to_vec(),
            curves: fam.curves().to_vec(),
        }
    }
}

/// Piecewise-linear function as `{"knots": [...], "values": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearJson {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl TryFrom<PiecewiseLinearJson> for PiecewiseLinearFn {
    type Error = Error;

    fn try_from(json: PiecewiseLinearJson) -> Result<Self, Error> {
        PiecewiseLinearFn::new(json.knots, json.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxitive::FunctionalSpec;
    use crate::orders::OrderRelation;

    #[test]
    fn distribution_forms() {
        let q: StepQuantile =
            serde_json::from_str(r#"{"kind":"samples","values":[1,0]}"#).unwrap();
        assert_eq!(q.breakpoints(), &[0.5, 1.0]);
        assert_eq!(q.values(), &[0.0, 1.0]);
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, r#"{"kind":"quantile","breakpoints":[0.5,1.0],"values":[0.0,1.0]}"#);
        let back: StepQuantile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
        let merged: StepQuantile = serde_json::from_str(
            r#"{"kind":"quantile","breakpoints":[0.25,0.5,1.0],"values":[1,1,2]}"#,
        )
        .unwrap();
        assert_eq!(merged.breakpoints(), &[0.5, 1.0]);
        assert!(serde_json::from_str::<StepQuantile>(
            r#"{"kind":"quantile","breakpoints":[0.5,1.0],"values":[2,1]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<StepQuantile>(
            r#"{"kind":"samples","values":[0,1],"weights":[0.5,0.6]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<StepQuantile>(r#"{"kind":"other"}"#).is_err());
    }

    #[test]
    fn ext_real_strings() {
        assert_eq!(serde_json::to_string(&ExtReal(f64::INFINITY)).unwrap(), r#""inf""#);
        assert_eq!(serde_json::to_string(&ExtReal(f64::NEG_INFINITY)).unwrap(), r#""-inf""#);
        assert_eq!(serde_json::to_string(&ExtReal(1.0)).unwrap(), "1.0");
        let x: ExtReal = serde_json::from_str(r#""-inf""#).unwrap();
        assert_eq!(x.0, f64::NEG_INFINITY);
        let x: ExtReal = serde_json::from_str("3").unwrap();
        assert_eq!(x.0, 3.0);
        assert!(serde_json::from_str::<ExtReal>(r#""big""#).is_err());
    }

    #[test]
    fn spec_forms() {
        let es: FunctionalSpec = serde_json::from_str(r#"{"tag":"es","u":0.9}"#).unwrap();
        assert_eq!(es, FunctionalSpec::Es { u: 0.9 });
        let st: FunctionalSpec = serde_json::from_str(
            r#"{"tag":"penalty_st","curve":{"kind":"step_left","grid":[0.5],"values":["-inf",1]}}"#,
        )
        .unwrap();
        let FunctionalSpec::PenaltySt { curve } = &st else {
            panic!("wrong tag")
        };
        assert_eq!(curve.eval(0.25), f64::NEG_INFINITY);
        let text = serde_json::to_string(&st).unwrap();
        assert_eq!(
            text,
            r#"{"tag":"penalty_st","curve":{"kind":"step_left","grid":[0.5],"values":["-inf",1.0]}}"#
        );
        let g: FunctionalSpec = serde_json::from_str(
            r#"{"tag":"g_family","levels":[0,1],"curves":[
                {"kind":"step_left","grid":[],"values":[0]},
                {"kind":"step_left","grid":[],"values":[1]}],"relation":"st"}"#,
        )
        .unwrap();
        assert_eq!(g.native_relation(), OrderRelation::St);
        let back: FunctionalSpec = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        let bad = serde_json::from_str::<FunctionalSpec>(
            r#"{"tag":"g_family","levels":[0,1],"curves":[
                {"kind":"step_left","grid":[],"values":[1]},
                {"kind":"step_left","grid":[],"values":[0]}],"relation":"st"}"#,
        );
        assert!(bad.is_err());
    }
}
