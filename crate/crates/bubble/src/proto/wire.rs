//! Data field wire format.
//!
//! Layout: 1-byte kind, 1-byte subtype, 2-byte originator, then an 8-byte
//! timestamp (control) or 4-byte sequence number (information), a 2-byte
//! body length and the body. All integers big-endian. Unknown subtypes are
//! preserved opaquely so newer peers can extend the taxonomy.

use thiserror::Error;

pub const KIND_CONTROL: u8 = 0;
pub const KIND_INFORMATION: u8 = 1;

pub const SUB_HELLO: u8 = 0;

pub const SUB_CHAT: u8 = 0;
pub const SUB_MULTIMEDIA: u8 = 1;
pub const SUB_TC: u8 = 2;
pub const SUB_ARQ: u8 = 3;
pub const SUB_GEO: u8 = 4;
pub const SUB_MUTE: u8 = 5;
pub const SUB_FAIL: u8 = 6;
pub const SUB_REPUDIATION: u8 = 7;
pub const SUB_ADDITION: u8 = 8;
pub const SUB_MERGE: u8 = 9;

#[derive(Debug, Error, PartialEq)]
pub enum WireError {
    #[error("truncated data field: {0}")]
    Truncated(&'static str),
    #[error("bad kind tag {0}")]
    BadKind(u8),
    #[error("body too large: {0} bytes")]
    BodyTooLarge(usize),
    #[error("malformed {0} body")]
    BadBody(&'static str),
}

/// Control fields carry a timestamp, information fields a sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stamp {
    Timestamp(u64),
    Sequence(u32),
}

/// Decoded interior of a data field.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// Symmetric, asymmetric and (optionally) relay-selection lists.
    Hello { sym: Vec<u16>, asym: Vec<u16>, mprs: Vec<u16> },
    Chat(String),
    Multimedia { file_id: u32, chunk_index: u16, chunk_total: u16, data: Vec<u8> },
    /// Symmetric neighbors of a backbone member, each with a freshness stamp.
    Tc(Vec<(u16, u64)>),
    /// Request retransmission of `(origin, seq)`.
    Arq { origin: u16, seq: u32 },
    Geo { lat: f64, lon: f64 },
    /// `offset` is the declared silence duration; absent means indefinite.
    Mute { offset: Option<u64> },
    Fail,
    Repudiation { member: u16 },
    Addition { member: u16 },
    Merge { bridge: u16, members: Vec<u16> },
    /// Unknown subtype, preserved byte-for-byte.
    Opaque { kind: u8, subtype: u8, data: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataField {
    pub originator: u16,
    pub stamp: Stamp,
    pub body: Body,
}

impl DataField {
    pub fn control(originator: u16, timestamp: u64, body: Body) -> DataField {
        DataField { originator, stamp: Stamp::Timestamp(timestamp), body }
    }

    pub fn information(originator: u16, seq: u32, body: Body) -> DataField {
        DataField { originator, stamp: Stamp::Sequence(seq), body }
    }

    pub fn is_control(&self) -> bool {
        matches!(self.stamp, Stamp::Timestamp(_))
    }

    pub fn seq(&self) -> Option<u32> {
        match self.stamp {
            Stamp::Sequence(s) => Some(s),
            Stamp::Timestamp(_) => None,
        }
    }

    fn kind_and_subtype(&self) -> (u8, u8) {
        match &self.body {
            Body::Hello { .. } => (KIND_CONTROL, SUB_HELLO),
            Body::Chat(_) => (KIND_INFORMATION, SUB_CHAT),
            Body::Multimedia { .. } => (KIND_INFORMATION, SUB_MULTIMEDIA),
            Body::Tc(_) => (KIND_INFORMATION, SUB_TC),
            Body::Arq { .. } => (KIND_INFORMATION, SUB_ARQ),
            Body::Geo { .. } => (KIND_INFORMATION, SUB_GEO),
            Body::Mute { .. } => (KIND_INFORMATION, SUB_MUTE),
            Body::Fail => (KIND_INFORMATION, SUB_FAIL),
            Body::Repudiation { .. } => (KIND_INFORMATION, SUB_REPUDIATION),
            Body::Addition { .. } => (KIND_INFORMATION, SUB_ADDITION),
            Body::Merge { .. } => (KIND_INFORMATION, SUB_MERGE),
            Body::Opaque { kind, subtype, .. } => (*kind, *subtype),
        }
    }

    pub fn subtype(&self) -> u8 {
        self.kind_and_subtype().1
    }
}

fn push_id_list(out: &mut Vec<u8>, ids: &[u16]) {
    out.push(ids.len() as u8);
    for &id in ids {
        out.extend_from_slice(&id.to_be_bytes());
    }
}

fn encode_body(body: &Body) -> Result<Vec<u8>, WireError> {
    let mut out = Vec::new();
    match body {
        Body::Hello { sym, asym, mprs } => {
            if sym.len() > 255 || asym.len() > 255 || mprs.len() > 255 {
                return Err(WireError::BodyTooLarge(sym.len() + asym.len() + mprs.len()));
            }
            push_id_list(&mut out, sym);
            push_id_list(&mut out, asym);
            // relay list only present when nonempty, for compatibility with
            // the two-list layout
            if !mprs.is_empty() {
                push_id_list(&mut out, mprs);
            }
        }
        Body::Chat(text) => out.extend_from_slice(text.as_bytes()),
        Body::Multimedia { file_id, chunk_index, chunk_total, data } => {
            out.extend_from_slice(&file_id.to_be_bytes());
            out.extend_from_slice(&chunk_index.to_be_bytes());
            out.extend_from_slice(&chunk_total.to_be_bytes());
            out.extend_from_slice(data);
        }
        Body::Tc(entries) => {
            if entries.len() > 255 {
                return Err(WireError::BodyTooLarge(entries.len()));
            }
            out.push(entries.len() as u8);
            for (id, ts) in entries {
                out.extend_from_slice(&id.to_be_bytes());
                out.extend_from_slice(&ts.to_be_bytes());
            }
        }
        Body::Arq { origin, seq } => {
            out.extend_from_slice(&origin.to_be_bytes());
            out.extend_from_slice(&seq.to_be_bytes());
        }
        Body::Geo { lat, lon } => {
            out.extend_from_slice(&lat.to_be_bytes());
            out.extend_from_slice(&lon.to_be_bytes());
        }
        Body::Mute { offset } => {
            if let Some(off) = offset {
                out.extend_from_slice(&off.to_be_bytes());
            }
        }
        Body::Fail => {}
        Body::Repudiation { member } | Body::Addition { member } => {
            out.extend_from_slice(&member.to_be_bytes());
        }
        Body::Merge { bridge, members } => {
            if members.len() > 255 {
                return Err(WireError::BodyTooLarge(members.len()));
            }
            out.extend_from_slice(&bridge.to_be_bytes());
            push_id_list(&mut out, members);
        }
        Body::Opaque { data, .. } => out.extend_from_slice(data),
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8], WireError> {
        if self.pos + len > self.bytes.len() {
            return Err(WireError::Truncated(what));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8, WireError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, WireError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, WireError> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes(b.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, WireError> {
        let b = self.take(8, what)?;
        Ok(u64::from_be_bytes(b.try_into().unwrap()))
    }

    fn id_list(&mut self, what: &'static str) -> Result<Vec<u16>, WireError> {
        let count = self.u8(what)? as usize;
        (0..count).map(|_| self.u16(what)).collect()
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn rest(&mut self) -> &'a [u8] {
        let out = &self.bytes[self.pos..];
        self.pos = self.bytes.len();
        out
    }
}

fn decode_body(kind: u8, subtype: u8, bytes: &[u8]) -> Result<Body, WireError> {
    let mut r = Reader { bytes, pos: 0 };
    let body = match (kind, subtype) {
        (KIND_CONTROL, SUB_HELLO) => {
            let sym = r.id_list("hello sym list")?;
            let asym = r.id_list("hello asym list")?;
            let mprs = if r.remaining() > 0 { r.id_list("hello mpr list")? } else { Vec::new() };
            Body::Hello { sym, asym, mprs }
        }
        (KIND_INFORMATION, SUB_CHAT) => Body::Chat(
            String::from_utf8(r.rest().to_vec()).map_err(|_| WireError::BadBody("chat"))?,
        ),
        (KIND_INFORMATION, SUB_MULTIMEDIA) => Body::Multimedia {
            file_id: r.u32("multimedia header")?,
            chunk_index: r.u16("multimedia header")?,
            chunk_total: r.u16("multimedia header")?,
            data: r.rest().to_vec(),
        },
        (KIND_INFORMATION, SUB_TC) => {
            let count = r.u8("tc count")? as usize;
            let entries = (0..count)
                .map(|_| Ok((r.u16("tc entry")?, r.u64("tc entry")?)))
                .collect::<Result<Vec<_>, WireError>>()?;
            Body::Tc(entries)
        }
        (KIND_INFORMATION, SUB_ARQ) => Body::Arq {
            origin: r.u16("arq body")?,
            seq: r.u32("arq body")?,
        },
        (KIND_INFORMATION, SUB_GEO) => Body::Geo {
            lat: f64::from_be_bytes(r.take(8, "geo body")?.try_into().unwrap()),
            lon: f64::from_be_bytes(r.take(8, "geo body")?.try_into().unwrap()),
        },
        (KIND_INFORMATION, SUB_MUTE) => Body::Mute {
            offset: if r.remaining() >= 8 { Some(r.u64("mute offset")?) } else { None },
        },
        (KIND_INFORMATION, SUB_FAIL) => Body::Fail,
        (KIND_INFORMATION, SUB_REPUDIATION) => Body::Repudiation { member: r.u16("repudiation body")? },
        (KIND_INFORMATION, SUB_ADDITION) => Body::Addition { member: r.u16("addition body")? },
        (KIND_INFORMATION, SUB_MERGE) => Body::Merge {
            bridge: r.u16("merge body")?,
            members: r.id_list("merge members")?,
        },
        _ => Body::Opaque { kind, subtype, data: bytes.to_vec() },
    };
    Ok(body)
}

pub fn encode_data(d: &DataField) -> Result<Vec<u8>, WireError> {
    let (kind, subtype) = d.kind_and_subtype();
    match (kind, &d.stamp) {
        (KIND_CONTROL, Stamp::Timestamp(_)) | (KIND_INFORMATION, Stamp::Sequence(_)) => {}
        _ => return Err(WireError::BadKind(kind)),
    }
    let body = encode_body(&d.body)?;
    if body.len() > u16::MAX as usize {
        return Err(WireError::BodyTooLarge(body.len()));
    }
    let mut out = Vec::with_capacity(14 + body.len());
    out.push(kind);
    out.push(subtype);
    out.extend_from_slice(&d.originator.to_be_bytes());
    match d.stamp {
        Stamp::Timestamp(ts) => out.extend_from_slice(&ts.to_be_bytes()),
        Stamp::Sequence(seq) => out.extend_from_slice(&seq.to_be_bytes()),
    }
    out.extend_from_slice(&(body.len() as u16).to_be_bytes());
    out.extend_from_slice(&body);
    Ok(out)
}

pub fn decode_data(bytes: &[u8]) -> Result<DataField, WireError> {
    let mut r = Reader { bytes, pos: 0 };
    let kind = r.u8("kind")?;
    if kind != KIND_CONTROL && kind != KIND_INFORMATION {
        return Err(WireError::BadKind(kind));
    }
    let subtype = r.u8("subtype")?;
    let originator = r.u16("originator")?;
    let stamp = if kind == KIND_CONTROL {
        Stamp::Timestamp(r.u64("timestamp")?)
    } else {
        Stamp::Sequence(r.u32("sequence")?)
    };
    let body_len = r.u16("body length")? as usize;
    let body_bytes = r.take(body_len, "body")?;
    let body = decode_body(kind, subtype, body_bytes)?;
    Ok(DataField { originator, stamp, body })
}

/// Split a file into multimedia chunk bodies.
pub fn split_multimedia(file_id: u32, data: &[u8], chunk_size: usize) -> Vec<Body> {
    assert!(chunk_size > 0);
    let total = data.chunks(chunk_size).count().max(1) as u16;
    if data.is_empty() {
        return vec![Body::Multimedia { file_id, chunk_index: 0, chunk_total: 1, data: Vec::new() }];
    }
    data.chunks(chunk_size)
        .enumerate()
        .map(|(i, chunk)| Body::Multimedia {
            file_id,
            chunk_index: i as u16,
            chunk_total: total,
            data: chunk.to_vec(),
        })
        .collect()
}
