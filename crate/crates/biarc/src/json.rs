//! Versioned JSON certificate schemas. Every document carries `"schema": 1`
//! so downstream tooling can evolve.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::digraph::CkLabeling;
use crate::obstruction::Circuit;
use crate::ordering::{KMinFailure, KMinRecognition, RecognitionResult};
use crate::poly::BinaryTable;
use crate::represent::{ArcRepresentation, CircArc};
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Certificate document with a status tag.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateDoc {
    pub schema: u32,
    #[serde(flatten)]
    pub body: Certificate,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certificate {
    MinOrdering {
        order: Vec<usize>,
    },
    KMinOrdering {
        k: usize,
        labels: Vec<usize>,
        orders: Vec<Vec<usize>>,
    },
    Obstruction {
        component: usize,
        circuit: Vec<(usize, usize)>,
    },
    NoKMinOrdering {
        attempts: Vec<AttemptJson>,
    },
    InvertiblePair {
        pair: (usize, usize),
    },
    CcPolymorphism {
        n: usize,
        table: BTreeMap<String, usize>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AttemptJson {
    pub k: usize,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit: Option<Vec<(usize, usize)>>,
}

impl CertificateDoc {
    pub fn new(body: Certificate) -> Self {
        CertificateDoc { schema: SCHEMA_VERSION, body }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }
}

impl From<&RecognitionResult> for CertificateDoc {
    fn from(r: &RecognitionResult) -> Self {
        CertificateDoc::new(match r {
            RecognitionResult::MinOrdering(order) => {
                Certificate::MinOrdering { order: order.clone() }
            }
            RecognitionResult::Obstruction(c) => Certificate::Obstruction {
                component: c.component,
                circuit: c.pairs.clone(),
            },
        })
    }
}

impl From<&KMinRecognition> for CertificateDoc {
    fn from(r: &KMinRecognition) -> Self {
        CertificateDoc::new(match r {
            KMinRecognition::KMinOrdering { k, labeling, orders } => Certificate::KMinOrdering {
                k: *k,
                labels: labeling.label.clone(),
                orders: orders.clone(),
            },
            KMinRecognition::NoKMinOrdering { attempts } => Certificate::NoKMinOrdering {
                attempts: attempts
                    .iter()
                    .map(|a| match &a.failure {
                        KMinFailure::NoCkLabeling => AttemptJson {
                            k: a.k,
                            reason: "no_cycle_labeling".into(),
                            component: None,
                            circuit: None,
                        },
                        KMinFailure::Circuit(c) => AttemptJson {
                            k: a.k,
                            reason: "circuit".into(),
                            component: Some(c.component),
                            circuit: Some(c.pairs.clone()),
                        },
                    })
                    .collect(),
            },
        })
    }
}

impl Certificate {
    pub fn from_cc_table(t: &BinaryTable) -> Self {
        Certificate::CcPolymorphism {
            n: t.n(),
            table: t.off_diagonal().map(|((x, y), v)| (format!("{x},{y}"), v)).collect(),
        }
    }

    /// Re-assembles the domain objects a certificate names.
    pub fn circuit(&self) -> Option<Circuit> {
        match self {
            Certificate::Obstruction { component, circuit } => {
                Some(Circuit { pairs: circuit.clone(), component: *component })
            }
            _ => None,
        }
    }

    pub fn k_min(&self) -> Option<(CkLabeling, Vec<Vec<usize>>)> {
        match self {
            Certificate::KMinOrdering { k, labels, orders } => {
                Some((CkLabeling { k: *k, label: labels.clone() }, orders.clone()))
            }
            _ => None,
        }
    }

    pub fn cc_table(&self) -> Result<Option<BinaryTable>, Error> {
        let Certificate::CcPolymorphism { n, table } = self else {
            return Ok(None);
        };
        let mut t = BinaryTable::identity_diagonal(*n);
        for (key, &v) in table {
            let (x, y) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: format!("bad table key {key:?}"),
                })?;
            if x >= *n || y >= *n {
                return Err(Error::Parse { line: 1, msg: format!("table key {key:?} out of range") });
            }
            t.set_symmetric(x, y, v);
        }
        if !t.is_total() {
            return Err(Error::Parse { line: 1, msg: "table misses some pair".into() });
        }
        Ok(Some(t))
    }
}

/// Representation document; its field layout is fixed, so it lives outside
/// the tagged certificate enum.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RepresentationJson {
    pub schema: u32,
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub poles: PolesJson,
    #[serde(rename = "I")]
    pub i: BTreeMap<String, (usize, usize)>,
    #[serde(rename = "J")]
    pub j: BTreeMap<String, (usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolesJson {
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
}

impl From<&ArcRepresentation> for RepresentationJson {
    fn from(rep: &ArcRepresentation) -> Self {
        let encode = |arcs: &[CircArc]| {
            arcs.iter().enumerate().map(|(v, a)| (v.to_string(), (a.ccw, a.cw))).collect()
        };
        RepresentationJson {
            schema: SCHEMA_VERSION,
            k: rep.k,
            l: rep.circumference,
            poles: PolesJson { n: rep.n_poles.clone(), s: rep.s_poles.clone() },
            i: encode(&rep.i_arcs),
            j: encode(&rep.j_arcs),
        }
    }
}

impl RepresentationJson {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("representations serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn to_representation(&self) -> Result<ArcRepresentation, Error> {
        let n = self.i.len();
        if self.j.len() != n {
            return Err(Error::Parse { line: 1, msg: "I and J name different vertices".into() });
        }
        let decode = |map: &BTreeMap<String, (usize, usize)>| -> Result<Vec<CircArc>, Error> {
            let mut arcs = vec![None; n];
            for (key, &(ccw, cw)) in map {
                let v: usize = key.parse().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("bad vertex key {key:?}"),
                })?;
                if v >= n {
                    return Err(Error::Parse { line: 1, msg: format!("vertex {v} out of range") });
                }
                arcs[v] = Some(CircArc { ccw, cw });
            }
            arcs.into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Parse { line: 1, msg: "missing vertex arc".into() })
        };
        Ok(ArcRepresentation {
            k: self.k,
            circumference: self.l,
            n_poles: self.poles.n.clone(),
            s_poles: self.poles.s.clone(),
            i_arcs: decode(&self.i)?,
            j_arcs: decode(&self.j)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use crate::ordering::build_min_ordering;
    use crate::represent::build_arc_representation;

    #[test]
    fn obstruction_round_trip() {
        let doc = CertificateDoc::new(Certificate::Obstruction {
            component: 0,
            circuit: vec![(0, 1), (1, 2), (2, 0)],
        });
        let js = doc.to_json();
        assert!(js.contains("\"status\": \"obstruction\""));
        assert!(js.contains("\"schema\": 1"));
        let back = CertificateDoc::from_json(&js).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn recognition_to_certificate() {
        let h = Digraph::new(2, [(0, 1)]).unwrap();
        let r = build_min_ordering(&h).unwrap();
        let doc = CertificateDoc::from(&r);
        match doc.body {
            Certificate::MinOrdering { ref order } => assert_eq!(order, &vec![0, 1]),
            ref other => panic!("unexpected body {other:?}"),
        }
    }

    #[test]
    fn representation_round_trip() {
        let h = Digraph::new(2, [(0, 1)]).unwrap();
        let rep = build_arc_representation(&h, &[0, 1]).unwrap();
        let js = RepresentationJson::from(&rep).to_json();
        let back = RepresentationJson::from_json(&js).unwrap().to_representation().unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn cc_table_round_trip() {
        let t = BinaryTable::min_table(&[1, 0, 2]);
        let cert = Certificate::from_cc_table(&t);
        let back = cert.cc_table().unwrap().unwrap();
        assert_eq!(back, t);
    }
}
