//! Public messages and their canonical byte encoding.
//!
//! Payloads are length-prefixed with big-endian `u32`s. A sets message is a
//! tag byte `0x01` followed by the four published sets, each as a count and
//! then its indices ascending. An abort is the single byte `0x00`. An
//! encrypted string is its bit length followed by the bits packed MSB first.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

use super::sets::OrderedSets;

pub const TRANSCRIPT_VERSION: u32 = 1;

const TAG_ABORT: u8 = 0x00;
const TAG_SETS: u8 = 0x01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sender {
    Alice,
    Bob,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub step: u32,
    pub sender: Sender,
    #[serde(with = "hex_bytes")]
    #[serde(rename = "payload_hex")]
    pub payload: Vec<u8>,
}

/// Public parameters every party knows before the first message.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub version: u32,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub k: usize,
    #[serde(with = "hex_u64")]
    pub code_seed: u64,
    #[serde(with = "hex_u64")]
    pub hash0_seed: u64,
    #[serde(with = "hex_u64")]
    pub hash1_seed: u64,
}

/// Append-only log of public messages.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transcript {
    pub header: TranscriptHeader,
    messages: Vec<Message>,
}

/// A decoded public message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Abort,
    Sets(OrderedSets),
    Encrypted(BitString),
}

impl Transcript {
    pub fn new(header: TranscriptHeader) -> Self {
        Self { header, messages: Vec::new() }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn push(&mut self, sender: Sender, payload: Vec<u8>) {
        let step = self.messages.len() as u32 + 1;
        self.messages.push(Message { step, sender, payload });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text).map_err(|e| Error::Transcript(e.to_string()))?;
        for (i, msg) in t.messages.iter().enumerate() {
            if msg.step != i as u32 + 1 {
                return Err(Error::Transcript(format!("message {i} has step {}", msg.step)));
            }
        }
        Ok(t)
    }

    /// Bob's published sets, or `None` if he aborted.
    pub fn ordered_sets(&self) -> Result<Option<OrderedSets>> {
        match self.messages.first().map(|m| decode_payload(m.sender, &m.payload)).transpose()? {
            Some(Payload::Sets(sets)) => Ok(Some(sets)),
            Some(Payload::Abort) => Ok(None),
            _ => Err(Error::Transcript("first message is not Bob's sets".into())),
        }
    }

    /// Alice's two encrypted strings, if the run got that far.
    pub fn encrypted_strings(&self) -> Result<Option<(BitString, BitString)>> {
        let strings = self
            .messages
            .iter()
            .skip(1)
            .map(|m| match decode_payload(m.sender, &m.payload)? {
                Payload::Encrypted(s) => Ok(s),
                _ => Err(Error::Transcript(format!("step {} is not an encrypted string", m.step))),
            })
            .collect::<Result<Vec<_>>>()?;
        match strings.len() {
            0 => Ok(None),
            2 => {
                let mut it = strings.into_iter();
                Ok(Some((it.next().unwrap(), it.next().unwrap())))
            }
            n => Err(Error::Transcript(format!("expected 2 encrypted strings, found {n}"))),
        }
    }
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_be_bytes());
}

pub fn encode_sets(sets: &OrderedSets) -> Vec<u8> {
    let mut out = vec![TAG_SETS];
    for set in sets.as_array() {
        put_u32(&mut out, set.len());
        for &i in set {
            put_u32(&mut out, i);
        }
    }
    out
}

pub fn encode_abort() -> Vec<u8> {
    vec![TAG_ABORT]
}

pub fn encode_string(bits: &BitString) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + bits.len().div_ceil(8));
    put_u32(&mut out, bits.len());
    out.extend(bits.to_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.bytes.len() < n {
            return Err(Error::Transcript("truncated payload".into()));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<usize> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }
}

pub fn decode_payload(sender: Sender, payload: &[u8]) -> Result<Payload> {
    let mut r = Reader { bytes: payload };
    let out = match sender {
        Sender::Bob => match r.take(1)?[0] {
            TAG_ABORT => Payload::Abort,
            TAG_SETS => {
                let mut sets: [Vec<usize>; 4] = Default::default();
                for set in sets.iter_mut() {
                    let len = r.u32()?;
                    *set = (0..len).map(|_| r.u32()).collect::<Result<_>>()?;
                    if !set.windows(2).all(|w| w[0] < w[1]) {
                        return Err(Error::Transcript("set indices are not strictly ascending".into()));
                    }
                }
                let [l00, l01, l10, l11] = sets;
                Payload::Sets(OrderedSets { l00, l01, l10, l11 })
            }
            tag => return Err(Error::Transcript(format!("unknown tag {tag:#04x}"))),
        },
        Sender::Alice => {
            let len = r.u32()?;
            let bytes = r.take(len.div_ceil(8))?;
            Payload::Encrypted(BitString::from_bytes(bytes, len)?)
        }
    };
    if !r.bytes.is_empty() {
        return Err(Error::Transcript("trailing bytes in payload".into()));
    }
    Ok(out)
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        hex::decode(text).map_err(serde::de::Error::custom)
    }
}

mod hex_u64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:016x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let text = String::deserialize(d)?;
        u64::from_str_radix(&text, 16).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> TranscriptHeader {
        TranscriptHeader { version: 1, n: 8, m: 1, s: 1, k: 1, code_seed: 1, hash0_seed: 2, hash1_seed: 0xabc }
    }

    #[test]
    fn json_shape() {
        let mut t = Transcript::new(header());
        t.push(Sender::Bob, encode_abort());
        let json = t.to_json();
        assert!(json.contains(r#""messages":[{"step":1,"sender":"bob","payload_hex":"00"}]"#), "{json}");
        assert!(json.contains(r#""hash1_seed":"0000000000000abc""#));
        assert_eq!(Transcript::from_json(&json).unwrap(), t);
        assert_eq!(t.ordered_sets().unwrap(), None);
        assert_eq!(t.encrypted_strings().unwrap(), None);
    }

    #[test]
    fn sets_and_strings_decode() {
        let sets = OrderedSets { l00: vec![0, 7], l01: vec![3], l10: vec![1, 2], l11: vec![70_000] };
        let a: BitString = "1011".parse().unwrap();
        let b: BitString = "0000".parse().unwrap();
        let mut t = Transcript::new(header());
        t.push(Sender::Bob, encode_sets(&sets));
        t.push(Sender::Alice, encode_string(&a));
        t.push(Sender::Alice, encode_string(&b));
        let back = Transcript::from_json(&t.to_json()).unwrap();
        assert_eq!(back.ordered_sets().unwrap(), Some(sets));
        assert_eq!(back.encrypted_strings().unwrap(), Some((a, b)));
        assert_eq!(hex::encode(encode_string(&"1011".parse().unwrap())), "00000004b0");
    }

    #[test]
    fn malformed_payloads_rejected() {
        assert!(decode_payload(Sender::Bob, &[0x01, 0, 0]).is_err());
        assert!(decode_payload(Sender::Bob, &[0x07]).is_err());
        assert!(decode_payload(Sender::Alice, &[0, 0, 0, 9, 0xff]).is_err());
        assert!(decode_payload(Sender::Bob, &[0x00, 0x00]).is_err());
        let unsorted = [0x01, 0, 0, 0, 2, 0, 0, 0, 5, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        assert!(decode_payload(Sender::Bob, &unsorted).is_err());
    }
}
