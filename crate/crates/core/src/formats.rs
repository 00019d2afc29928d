//! Hex vectors, fixture files and the JSON document formats.
//!
//! Every document is a JSON object carrying `"version"`, `"kind"` and
//! `"bits"`; vectors inside it are [`HexVector`] strings of that width.

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgh::{AuthorizedShareSet, MaskSet, RoleTag};
use crate::protocol::{
    EnvSummary, Message, MessageKind, PartyId, Payload, SafeSharesState, Transcript, ValueClass,
};
use crate::pvss::{BulletinBoard, KeyAssignment, VerificationResult, Verdict};
use crate::vector::{SchemeParams, ShareVector};

pub const FORMAT_VERSION: u32 = 1;

/// Lowercase hex text of an `l`-bit vector: `ceil(l / 8)` bytes, component 1
/// in the most significant bit of the first byte, zero padding at the end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HexVector {
    text: String,
    bits: usize,
}

impl HexVector {
    pub fn new(text: impl Into<String>, bits: usize) -> Self {
        HexVector {
            text: text.into(),
            bits,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn bits(&self) -> usize {
        self.bits
    }
}

impl fmt::Display for HexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

pub fn encode_vector(v: &ShareVector) -> Result<HexVector> {
    let bits = v.params().bits()?;
    Ok(HexVector::new(hex::encode(v.to_bytes()?), bits))
}

/// Decodes `h` under `params`. Upper-case digits are accepted.
pub fn decode_vector(h: &HexVector, params: SchemeParams) -> Result<ShareVector> {
    let bits = params.bits()?;
    let expected = params.byte_len() * 2;
    if h.bits != bits || h.text.len() != expected {
        return Err(Error::LengthMismatch {
            bits,
            expected,
            actual: h.text.len(),
        });
    }
    let bytes = hex::decode(&h.text).map_err(|e| Error::BadHex(format!("{:?}: {e}", h.text)))?;
    ShareVector::from_bytes(params, &bytes)
}

/// Shorthand for decoding bare text at the width of `params`.
pub fn parse_hex(text: &str, params: SchemeParams) -> Result<ShareVector> {
    decode_vector(&HexVector::new(text.trim(), params.dimension()), params)
}

fn hex_of(v: &ShareVector) -> String {
    encode_vector(v).expect("binary vector").text
}

fn hexes(vs: &[ShareVector]) -> Vec<String> {
    vs.iter().map(hex_of).collect()
}

fn unhexes(texts: &[String], params: SchemeParams) -> Result<Vec<ShareVector>> {
    texts.iter().map(|t| parse_hex(t, params)).collect()
}

/// One hex vector per line; blank lines and lines starting with `#` are
/// skipped.
pub fn parse_fixture(text: &str, params: SchemeParams) -> Result<Vec<ShareVector>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_hex(l, params))
        .collect()
}

pub fn format_fixture(values: &[ShareVector]) -> Result<String> {
    let mut out = String::new();
    for v in values {
        out.push_str(encode_vector(v)?.text());
        out.push('\n');
    }
    Ok(out)
}

#[derive(Deserialize)]
struct Header {
    version: u32,
    kind: String,
    bits: usize,
}

/// Reads the `kind` and `bits` of any document without decoding the rest.
pub fn peek_document(json: &str) -> Result<(String, usize)> {
    let h: Header = serde_json::from_str(json)?;
    if h.version != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported document version {}", h.version)));
    }
    Ok((h.kind, h.bits))
}

/// A value with a JSON document representation.
pub trait Document: Sized {
    const KIND: &'static str;

    fn to_json(&self) -> Result<String>;

    fn from_json(json: &str) -> Result<Self>;
}

fn write_doc<T: Serialize>(raw: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(raw)?;
    s.push('\n');
    Ok(s)
}

fn read_doc<T: DeserializeOwned>(json: &str, kind: &str) -> Result<(T, SchemeParams)> {
    let (found, bits) = peek_document(json)?;
    if found != kind {
        return Err(Error::Parse(format!("expected a {kind} document, found {found}")));
    }
    Ok((serde_json::from_str(json)?, SchemeParams::binary(bits)?))
}

#[derive(Serialize, Deserialize)]
struct ShareSetDoc {
    version: u32,
    kind: String,
    bits: usize,
    role: RoleTag,
    shares: Vec<String>,
}

impl Document for AuthorizedShareSet {
    const KIND: &'static str = "share_set";

    fn to_json(&self) -> Result<String> {
        write_doc(&ShareSetDoc {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            bits: self.params().bits()?,
            role: self.role(),
            shares: hexes(self.shares()),
        })
    }

    fn from_json(json: &str) -> Result<Self> {
        let (d, params): (ShareSetDoc, _) = read_doc(json, Self::KIND)?;
        AuthorizedShareSet::new(d.role, unhexes(&d.shares, params)?)
    }
}

#[derive(Serialize, Deserialize)]
struct MaskSetDoc {
    version: u32,
    kind: String,
    bits: usize,
    masks: Vec<String>,
}

impl Document for MaskSet {
    const KIND: &'static str = "mask_set";

    fn to_json(&self) -> Result<String> {
        write_doc(&MaskSetDoc {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            bits: self.params().bits()?,
            masks: hexes(self.vectors()),
        })
    }

    fn from_json(json: &str) -> Result<Self> {
        let (d, params): (MaskSetDoc, _) = read_doc(json, Self::KIND)?;
        MaskSet::new(params, unhexes(&d.masks, params)?)
    }
}

#[derive(Serialize, Deserialize)]
struct TwoSetDoc {
    version: u32,
    kind: String,
    bits: usize,
    set1_role: RoleTag,
    set2_role: RoleTag,
    set1: Vec<String>,
    set2: Vec<String>,
}

impl Document for BulletinBoard {
    const KIND: &'static str = "bulletin";

    fn to_json(&self) -> Result<String> {
        let (r1, r2) = self.roles();
        write_doc(&TwoSetDoc {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            bits: self.params().bits()?,
            set1_role: r1,
            set2_role: r2,
            set1: hexes(self.set1_entries()),
            set2: hexes(self.set2_entries()),
        })
    }

    fn from_json(json: &str) -> Result<Self> {
        let (d, params): (TwoSetDoc, _) = read_doc(json, Self::KIND)?;
        BulletinBoard::from_entries(
            params,
            (d.set1_role, d.set2_role),
            unhexes(&d.set1, params)?,
            unhexes(&d.set2, params)?,
        )
    }
}

impl Document for KeyAssignment {
    const KIND: &'static str = "key_assignment";

    fn to_json(&self) -> Result<String> {
        let (r1, r2) = self.roles();
        write_doc(&TwoSetDoc {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            bits: self.params().bits()?,
            set1_role: r1,
            set2_role: r2,
            set1: hexes(self.set1_keys()),
            set2: hexes(self.set2_keys()),
        })
    }

    fn from_json(json: &str) -> Result<Self> {
        let (d, params): (TwoSetDoc, _) = read_doc(json, Self::KIND)?;
        KeyAssignment::from_keys(
            params,
            (d.set1_role, d.set2_role),
            unhexes(&d.set1, params)?,
            unhexes(&d.set2, params)?,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct SafeSharesDoc {
    version: u32,
    kind: String,
    bits: usize,
    held: Vec<String>,
    keys: Vec<String>,
    masks: Vec<String>,
    owner_shares: Vec<String>,
    assignment: Vec<usize>,
    key_regenerations: usize,
}

impl Document for SafeSharesState {
    const KIND: &'static str = "safeshares_state";

    fn to_json(&self) -> Result<String> {
        write_doc(&SafeSharesDoc {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            bits: self.params().bits()?,
            held: hexes(self.held()),
            keys: hexes(self.keys()),
            masks: hexes(self.masks().vectors()),
            owner_shares: hexes(self.owner_shares().shares()),
            assignment: self.assignment().to_vec(),
            key_regenerations: self.key_regenerations(),
        })
    }

    fn from_json(json: &str) -> Result<Self> {
        let (d, params): (SafeSharesDoc, _) = read_doc(json, Self::KIND)?;
        SafeSharesState::from_parts(
            unhexes(&d.held, params)?,
            unhexes(&d.keys, params)?,
            MaskSet::new(params, unhexes(&d.masks, params)?)?,
            AuthorizedShareSet::new(RoleTag::Owner, unhexes(&d.owner_shares, params)?)?,
            d.assignment,
            d.key_regenerations,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct VerificationDoc {
    version: u32,
    kind: String,
    bits: usize,
    verdict: String,
    xored_keys: String,
    xored_encrypted_shares: String,
}

impl Document for VerificationResult {
    const KIND: &'static str = "verification";

    fn to_json(&self) -> Result<String> {
        write_doc(&VerificationDoc {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            bits: self.xored_keys.params().bits()?,
            verdict: self.verdict.to_string(),
            xored_keys: hex_of(&self.xored_keys),
            xored_encrypted_shares: hex_of(&self.xored_encrypted_shares),
        })
    }

    fn from_json(json: &str) -> Result<Self> {
        let (d, params): (VerificationDoc, _) = read_doc(json, Self::KIND)?;
        let r = VerificationResult::new(
            parse_hex(&d.xored_keys, params)?,
            parse_hex(&d.xored_encrypted_shares, params)?,
        );
        let stated = match d.verdict.as_str() {
            "POSITIVE" => Verdict::Positive,
            "NEGATIVE" => Verdict::Negative,
            other => return Err(Error::Parse(format!("unknown verdict {other:?}"))),
        };
        if stated != r.verdict {
            return Err(Error::Parse(format!(
                "verdict {stated} contradicts the recorded vectors"
            )));
        }
        Ok(r)
    }
}

/// One transcript line. Flag payloads are `"00"` or `"01"`.
#[derive(Serialize, Deserialize)]
struct Record {
    seq: u64,
    from: PartyId,
    to: PartyId,
    kind: String,
    class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    payload_hex: String,
}

#[derive(Serialize, Deserialize)]
struct TranscriptDoc {
    version: u32,
    kind: String,
    bits: usize,
    config: EnvSummary,
    steps: Vec<Record>,
}

impl Document for Transcript {
    const KIND: &'static str = "transcript";

    fn to_json(&self) -> Result<String> {
        let steps = self
            .steps()
            .iter()
            .map(|m| Record {
                seq: m.seq,
                from: m.from,
                to: m.to,
                kind: m.kind.to_string(),
                class: m.class.to_string(),
                index: m.index,
                payload_hex: match &m.payload {
                    Payload::Vector(v) => hex_of(v),
                    Payload::Flag(b) => if *b { "01" } else { "00" }.to_string(),
                },
            })
            .collect();
        write_doc(&TranscriptDoc {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            bits: self.config().bits,
            config: self.config().clone(),
            steps,
        })
    }

    fn from_json(json: &str) -> Result<Self> {
        let (d, params): (TranscriptDoc, _) = read_doc(json, Self::KIND)?;
        let steps = d
            .steps
            .into_iter()
            .map(|r| {
                let kind: MessageKind = r.kind.parse()?;
                let payload = if kind.carries_flag() {
                    match r.payload_hex.as_str() {
                        "00" => Payload::Flag(false),
                        "01" => Payload::Flag(true),
                        other => return Err(Error::BadHex(format!("flag payload {other:?}"))),
                    }
                } else {
                    Payload::Vector(parse_hex(&r.payload_hex, params)?)
                };
                Ok(Message {
                    seq: r.seq,
                    from: r.from,
                    to: r.to,
                    kind,
                    class: r.class.parse::<ValueClass>()?,
                    index: r.index,
                    payload,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Transcript::from_parts(d.config, steps)
    }
}
