//! Machine-readable certificates: one serialized verdict per verification,
//! carrying the parameters, the pass/fail/refused status, and a structured
//! witness payload sufficient to re-check the claim without re-running the
//! enumerations that produced it.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Refused,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub p: u64,
    pub pi: Vec<u64>,
    pub flags: Vec<String>,
}

/// One verification verdict. Serialization is deterministic: struct fields
/// appear in declaration order and all dynamic payload maps are
/// BTreeMap-backed, hence key-sorted. `elapsed_ms` and `artifact_version`
/// are the only fields excluded from byte-for-byte comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub check_id: String,
    pub parameters: Parameters,
    pub status: Status,
    pub witness_data: serde_json::Value,
    pub elapsed_ms: u64,
    pub artifact_version: String,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One JSON object per line, streamable.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("certificates always serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Certificate, serde_json::Error> {
        serde_json::from_str(line)
    }

    /// Human-readable single line keyed by the check id.
    pub fn to_text_line(&self) -> String {
        let pi = self
            .parameters
            .pi
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Refused => "REFUSED",
        };
        let summary = summarize(&self.check_id, &self.witness_data);
        format!(
            "{} @ p={} pi={{{}}}: {}{} ({} ms)",
            self.check_id, self.parameters.p, pi, status, summary, self.elapsed_ms
        )
    }
}

fn get<'v>(value: &'v serde_json::Value, path: &[&str]) -> Option<&'v serde_json::Value> {
    let mut cur = value;
    for key in path {
        cur = cur.get(key)?;
    }
    Some(cur)
}

/// Short deterministic summary of the witness payload for the text format.
fn summarize(check_id: &str, data: &serde_json::Value) -> String {
    let s = |v: Option<&serde_json::Value>| v.map(|x| x.to_string()).unwrap_or_default();
    match check_id {
        "presentation" => format!(
            ", group order {}, relation orders {}",
            s(get(data, &["group_order"])),
            s(get(data, &["relation_orders"]))
        ),
        "character" => format!(
            ", values {}, order-7 multiset {}",
            s(get(data, &["values"])),
            s(get(data, &["order7_values"]))
        ),
        "irreducibility" => format!(", span dimension {}", s(get(data, &["span_dim"]))),
        "aut-l" => format!(
            ", {} relation-preserving pairs, {} inner",
            s(get(data, &["total"])),
            s(get(data, &["inner"]))
        ),
        "normalizer-gl" => format!(
            ", normalizer order {}, outer twists with intertwiners {}",
            s(get(data, &["report", "normalizer_order"])),
            s(get(data, &["report", "outer_with_intertwiner"]))
        ),
        "aut-g" => format!(
            ", model order {}, faithful {}",
            s(get(data, &["order"])),
            s(get(data, &["centralizer_of_g_trivial"]))
        ),
        "suzuki" => format!(
            ", order-24 overgroup {}, extension Sylow-2 maximal {}",
            s(get(data, &["order24_overgroup_exists"])),
            s(get(data, &["ext_sylow2_is_maximal_subgroup"]))
        ),
        "wh-sweep" => format!(", {} instances checked", s(get(data, &["instances_checked"]))),
        "lemma22" => format!(", {} instances checked", s(get(data, &["instances_checked"]))),
        "lemma23" => format!(", {} instances checked", s(get(data, &["instances_checked"]))),
        "lemma42" => {
            let refuted = get(data, &["verdict", "status", "status"])
                .map(|v| v == "RefutedExhaustively")
                .unwrap_or(false);
            format!(
                ": {} over {} intermediate groups, {} catalog classes",
                if refuted { "REFUTED-EXHAUSTIVELY" } else { "NOT REFUTED" },
                get(data, &["tower_divisors"])
                    .and_then(|v| v.as_array())
                    .map(|a| a.len())
                    .unwrap_or(0),
                s(get(data, &["verdict", "status", "total_pairs"]))
            )
        }
        "example1" => format!(
            ", witnessed in the degree-6 carrier {}, image refuted {}",
            s(get(data, &["core", "s_equals_k_intersect_h"])),
            get(data, &["s_image_verdict", "status", "status"])
                .map(|v| (v == "RefutedExhaustively").to_string())
                .unwrap_or_default()
        ),
        "example2" => format!(
            ", witness order {}, preimage classes {}",
            s(get(data, &["k_order"])),
            s(get(data, &["preimage_classes_of_order8"]))
        ),
        _ => String::new(),
    }
}
