//! Message transcripts with bit-exact accounting.
//!
//! Every party message is a fixed-width unsigned integer. Messages are
//! packed big-endian, most significant bit first, in party order, and the
//! final byte is zero-padded. The text form is a list of `key value` lines
//! ending in the hex-encoded packed block.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::modular::ceil_log2;
use crate::rational::Epsilon;

const TRANSCRIPT_MAGIC: &str = "coordsum-transcript 1";
const COMPOSITE_MAGIC: &str = "coordsum-composite 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolId {
    SumDist,
    SumEqual,
}

impl ProtocolId {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolId::SumDist => "sumdist",
            ProtocolId::SumEqual => "sumequal",
        }
    }
}

/// Which protocol body an instance runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Parties send the base of the progression holding their scaled input.
    DapProtocol,
    /// Parties send their raw residue and the coordinator adds them up.
    TrivialFallback,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::DapProtocol => "dap",
            Mode::TrivialFallback => "trivial",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub protocol: ProtocolId,
    pub mode: Mode,
    pub p: u64,
    pub k: usize,
    /// Progression difference; absent in fallback mode.
    pub diff: Option<u64>,
    /// Scaling constant, when the protocol used one.
    pub c: Option<u64>,
    /// Public-randomness seed, for randomized protocols.
    pub seed: Option<u64>,
    /// `[g0, g1]` for sumdist, `[g]` for sumequal.
    pub targets: Vec<u64>,
    pub epsilon: Option<Epsilon>,
}

impl Header {
    /// Bits per party message.
    pub fn width(&self) -> u32 {
        match (self.mode, self.diff) {
            (Mode::DapProtocol, Some(d)) => ceil_log2(d),
            _ => ceil_log2(self.p),
        }
    }

    /// Exclusive bound on message values.
    fn alphabet(&self) -> u64 {
        match (self.mode, self.diff) {
            (Mode::DapProtocol, Some(d)) => d,
            _ => self.p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub party: usize,
    pub value: u64,
    pub width: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub header: Header,
    pub messages: Vec<Message>,
}

impl Transcript {
    pub(crate) fn new(header: Header, values: &[u64]) -> Self {
        let width = header.width();
        let messages = values
            .iter()
            .enumerate()
            .map(|(party, &value)| Message {
                party,
                value,
                width,
            })
            .collect();
        Transcript { header, messages }
    }

    pub fn total_bits(&self) -> u64 {
        self.messages.iter().map(|m| m.width as u64).sum()
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.messages.iter().map(|m| m.value)
    }

    pub fn pack(&self) -> Vec<u8> {
        let mut w = BitWriter::default();
        for m in &self.messages {
            w.push(m.value, m.width);
        }
        w.finish()
    }

    pub fn encode(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        let mut line = |k: &str, v: &dyn fmt::Display| out.push_str(&format!("{k} {v}\n"));
        line("coordsum-transcript", &1);
        line("protocol", &h.protocol.as_str());
        line("mode", &h.mode);
        line("p", &h.p);
        line("k", &h.k);
        if let Some(d) = h.diff {
            line("D", &d);
        }
        if let Some(c) = h.c {
            line("c", &c);
        }
        if let Some(s) = h.seed {
            line("seed", &s);
        }
        match h.protocol {
            ProtocolId::SumDist => {
                line("g0", &h.targets[0]);
                line("g1", &h.targets[1]);
            }
            ProtocolId::SumEqual => line("g", &h.targets[0]),
        }
        if let Some(e) = h.epsilon {
            line("eps", &e);
        }
        line("width", &h.width());
        line("bits", &self.total_bits());
        line("block", &hex::encode(self.pack()));
        out
    }

    pub fn decode(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(TRANSCRIPT_MAGIC) {
            return Err(malformed("missing transcript magic line"));
        }
        let mut fields = BTreeMap::new();
        for l in lines {
            let (k, v) = l
                .split_once(' ')
                .ok_or_else(|| malformed(format!("bad line {l:?}")))?;
            if fields.insert(k, v.trim()).is_some() {
                return Err(malformed(format!("duplicate key {k}")));
            }
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| malformed(format!("missing {k}")))
        };
        let num = |k: &str| -> Result<Option<u64>> {
            fields
                .get(k)
                .map(|v| {
                    v.parse()
                        .map_err(|_| malformed(format!("{k} is not a number")))
                })
                .transpose()
        };
        let req = |k: &str| num(k)?.ok_or_else(|| malformed(format!("missing {k}")));

        let protocol = match get("protocol")? {
            "sumdist" => ProtocolId::SumDist,
            "sumequal" => ProtocolId::SumEqual,
            other => return Err(malformed(format!("unknown protocol {other}"))),
        };
        let mode = match get("mode")? {
            "dap" => Mode::DapProtocol,
            "trivial" => Mode::TrivialFallback,
            other => return Err(malformed(format!("unknown mode {other}"))),
        };
        let targets = match protocol {
            ProtocolId::SumDist => vec![req("g0")?, req("g1")?],
            ProtocolId::SumEqual => vec![req("g")?],
        };
        let epsilon = fields.get("eps").map(|e| e.parse()).transpose()?;
        let header = Header {
            protocol,
            mode,
            p: req("p")?,
            k: req("k")? as usize,
            diff: num("D")?,
            c: num("c")?,
            seed: num("seed")?,
            targets,
            epsilon,
        };
        if header.mode == Mode::DapProtocol && header.diff.is_none() {
            return Err(malformed("dap mode without D"));
        }
        if header.p < 2 || header.alphabet() == 0 {
            return Err(malformed("degenerate modulus"));
        }
        let width = header.width();
        if req("width")? != width as u64 {
            return Err(malformed("width does not match header parameters"));
        }
        let bits = req("bits")?;
        if bits != header.k as u64 * width as u64 {
            return Err(malformed("bit count does not match k * width"));
        }
        let block = hex::decode(get("block")?).map_err(|e| malformed(e.to_string()))?;
        if block.len() as u64 != bits.div_ceil(8) {
            return Err(malformed("block length does not match bit count"));
        }
        let mut r = BitReader::new(&block);
        let mut values = Vec::with_capacity(header.k);
        for _ in 0..header.k {
            let v = r.read(width).ok_or_else(|| malformed("block truncated"))?;
            if v >= header.alphabet() {
                return Err(malformed(format!("message value {v} out of range")));
            }
            values.push(v);
        }
        if !r.rest_is_zero() {
            return Err(malformed("nonzero padding"));
        }
        Ok(Transcript::new(header, &values))
    }
}

/// Per-factor transcripts of a protocol run over Z_N.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeTranscript {
    pub modulus: u64,
    pub factors: Vec<Transcript>,
}

impl CompositeTranscript {
    pub fn total_bits(&self) -> u64 {
        self.factors.iter().map(Transcript::total_bits).sum()
    }

    pub fn encode(&self) -> String {
        let mut out = format!(
            "{COMPOSITE_MAGIC}\nN {}\nfactors {}\n",
            self.modulus,
            self.factors.len()
        );
        for t in &self.factors {
            out.push_str(&format!("factor {}\n", t.header.p));
            out.push_str(&t.encode());
            out.push_str("end\n");
        }
        out.push_str(&format!("bits {}\n", self.total_bits()));
        out
    }

    pub fn decode(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(COMPOSITE_MAGIC) {
            return Err(malformed("missing composite magic line"));
        }
        fn field<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<u64> {
            let l = lines
                .next()
                .ok_or_else(|| malformed(format!("missing {key}")))?;
            l.strip_prefix(key)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| malformed(format!("expected {key}, got {l:?}")))
        }
        let modulus = field(&mut lines, "N")?;
        let count = field(&mut lines, "factors")?;
        let mut factors = Vec::new();
        for _ in 0..count {
            let p = field(&mut lines, "factor")?;
            let mut body = String::new();
            loop {
                let l = lines
                    .next()
                    .ok_or_else(|| malformed("unterminated factor block"))?;
                if l == "end" {
                    break;
                }
                body.push_str(l);
                body.push('\n');
            }
            let t = Transcript::decode(&body)?;
            if t.header.p != p {
                return Err(malformed("factor label does not match its transcript"));
            }
            factors.push(t);
        }
        let composite = CompositeTranscript { modulus, factors };
        if field(&mut lines, "bits")? != composite.total_bits() {
            return Err(malformed("composite bit count mismatch"));
        }
        Ok(composite)
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedTranscript(msg.into())
}

#[derive(Default)]
struct BitWriter {
    bytes: Vec<u8>,
    used: u32,
}

impl BitWriter {
    fn push(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            if self.used % 8 == 0 {
                self.bytes.push(0);
            }
            let bit = ((value >> i) & 1) as u8;
            *self.bytes.last_mut().unwrap() |= bit << (7 - self.used % 8);
            self.used += 1;
        }
    }

    fn finish(self) -> Vec<u8> {
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    fn bit(&self, i: usize) -> u64 {
        ((self.bytes[i / 8] >> (7 - i % 8)) & 1) as u64
    }

    fn read(&mut self, width: u32) -> Option<u64> {
        if self.pos + width as usize > self.bytes.len() * 8 {
            return None;
        }
        let mut v = 0;
        for _ in 0..width {
            v = (v << 1) | self.bit(self.pos);
            self.pos += 1;
        }
        Some(v)
    }

    fn rest_is_zero(&self) -> bool {
        (self.pos..self.bytes.len() * 8).all(|i| self.bit(i) == 0)
    }
}
