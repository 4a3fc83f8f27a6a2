//! Per-member protocol state machine.
//!
//! A node owns its neighbor tables, sequence ledger, topology directory and
//! backbone flag. All operations take an injected `now`; nothing reads a
//! wall clock. Every outgoing packet is sealed with the member's key
//! column, and the harness expands each [`Output::Transmit`] into one
//! unicast per current radio neighbor.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cds::{self, TwoHopView};
use crate::crypto::{self, CryptoError, KeyColumn, SealedPacket};
use crate::proto::wire::{self, Body, DataField, Stamp};

#[derive(Debug, Error, PartialEq)]
pub enum ProtoError {
    #[error("node is muted")]
    Muted,
    #[error("node state has been wiped")]
    Wiped,
    #[error("node is revoked and may not originate")]
    Revoked,
    #[error(transparent)]
    Wire(#[from] wire::WireError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

/// Which election rule drives the live backbone flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElectionRule {
    #[default]
    WuLi1999,
    MprCds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeConfig {
    pub member: u16,
    pub n: usize,
    /// Member allowed to issue repudiations.
    pub leader: u16,
    pub hello_period: u64,
    pub tc_period: u64,
    pub hold_multiplier: u64,
    pub tc_expiry_multiplier: u64,
    pub arq_timeout: u64,
    pub timestamp_tolerance: u64,
    pub seq_window: u32,
    pub cache_capacity: usize,
    pub election: ElectionRule,
    /// Meters of divergence between successive position reports that
    /// triggers a local warning.
    pub geo_warn_threshold_m: f64,
    pub demute_password: String,
    /// Grace period for entering the password after the first demute attempt.
    pub password_grace: u64,
    pub seal_seed: u64,
}

impl NodeConfig {
    pub fn new(member: u16, n: usize) -> NodeConfig {
        let hello_period = 1_000_000;
        NodeConfig {
            member,
            n,
            leader: 0,
            hello_period,
            tc_period: 3 * hello_period,
            hold_multiplier: 3,
            tc_expiry_multiplier: 3,
            arq_timeout: 500_000,
            timestamp_tolerance: 2 * hello_period,
            seq_window: 64,
            cache_capacity: 128,
            election: ElectionRule::WuLi1999,
            geo_warn_threshold_m: 200.0,
            demute_password: "rosebud".into(),
            password_grace: 30_000_000,
            seal_seed: 0,
        }
    }
}

/// What an operation produced: bytes to put on the air, application
/// deliveries, or notable local events (for traces and tests).
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    /// A sealed packet, to be unicast to every current neighbor.
    Transmit(Vec<u8>),
    Deliver { origin: u16, seq: u32, body: Body },
    Event(String),
}

#[derive(Debug, Clone, Default)]
struct OriginLedger {
    highest: u32,
    seen: BTreeSet<u32>,
    /// Missing seq -> next time an ARQ may be emitted for it.
    gaps: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone, Default)]
struct DirectoryEntry {
    updated: u64,
    neighbors: BTreeMap<u16, u64>,
}

#[derive(Debug)]
pub struct NodeState {
    pub config: NodeConfig,
    column: KeyColumn,
    rng: ChaCha8Rng,

    // neighbor discovery
    sym: BTreeMap<u16, u64>,
    asym: BTreeMap<u16, u64>,
    two_hop: BTreeMap<u16, (u64, BTreeSet<u16>)>,
    /// Neighbors whose hellos list us in their relay set.
    mpr_selectors: BTreeSet<u16>,
    my_mprs: BTreeSet<u16>,
    cds_flag: bool,

    // sequencing
    own_seq: u32,
    ledger: BTreeMap<u16, OriginLedger>,
    /// Ten most recent control timestamps per member.
    control_stamps: BTreeMap<u16, VecDeque<u64>>,

    directory: BTreeMap<u16, DirectoryEntry>,

    /// Recently seen data fields, by (origin, seq); serves ARQ requests.
    cache: VecDeque<((u16, u32), Vec<u8>)>,

    muted: bool,
    wiped: bool,
    demute_deadline: Option<u64>,
    /// Peers' declared mute deadlines; overdue ones are flagged once.
    peer_mute_deadline: BTreeMap<u16, u64>,
    /// Peers known to be silent on purpose: exempt from hold-time expiry so
    /// floods keep reaching them while they listen.
    muted_peers: BTreeSet<u16>,

    last_geo: Option<(u16, f64, f64)>,
}

impl NodeState {
    pub fn new(config: NodeConfig, column: KeyColumn) -> NodeState {
        assert_eq!(config.member, column.owner);
        let rng = ChaCha8Rng::seed_from_u64(config.seal_seed ^ (config.member as u64) << 32);
        NodeState {
            config,
            column,
            rng,
            sym: BTreeMap::new(),
            asym: BTreeMap::new(),
            two_hop: BTreeMap::new(),
            mpr_selectors: BTreeSet::new(),
            my_mprs: BTreeSet::new(),
            cds_flag: true,
            own_seq: 0,
            ledger: BTreeMap::new(),
            control_stamps: BTreeMap::new(),
            directory: BTreeMap::new(),
            cache: VecDeque::new(),
            muted: false,
            wiped: false,
            demute_deadline: None,
            peer_mute_deadline: BTreeMap::new(),
            muted_peers: BTreeSet::new(),
            last_geo: None,
        }
    }

    pub fn member(&self) -> u16 {
        self.config.member
    }

    pub fn is_cds(&self) -> bool {
        self.cds_flag
    }

    pub fn is_muted(&self) -> bool {
        self.muted
    }

    pub fn is_wiped(&self) -> bool {
        self.wiped
    }

    pub fn sym_neighbors(&self) -> Vec<u16> {
        self.sym.keys().copied().collect()
    }

    pub fn asym_neighbors(&self) -> Vec<u16> {
        self.asym.keys().copied().collect()
    }

    pub fn two_hop_of(&self, neighbor: u16) -> Option<&BTreeSet<u16>> {
        self.two_hop.get(&neighbor).map(|(_, s)| s)
    }

    pub fn own_seq(&self) -> u32 {
        self.own_seq
    }

    pub fn directory_members(&self) -> Vec<u16> {
        self.directory.keys().copied().collect()
    }

    pub fn missing_seqs(&self, origin: u16) -> Vec<u32> {
        self.ledger.get(&origin).map_or(Vec::new(), |l| l.gaps.keys().copied().collect())
    }

    /// The node's local two-hop view, as the election rules consume it.
    pub fn view(&self) -> TwoHopView {
        let sym_neighbors: BTreeSet<u16> = self.sym.keys().copied().collect();
        let neighbor_of = self
            .two_hop
            .iter()
            .filter(|(id, _)| sym_neighbors.contains(id))
            .map(|(&id, (_, set))| (id, set.clone()))
            .collect();
        TwoHopView { owner: self.config.member, sym_neighbors, neighbor_of }
    }

    fn seal_field(&mut self, field: &DataField) -> Result<Vec<u8>, ProtoError> {
        let bytes = wire::encode_data(field)?;
        let pkt = crypto::seal(&self.column, &bytes, &mut self.rng)?;
        Ok(pkt.to_bytes())
    }

    fn cache_insert(&mut self, key: (u16, u32), bytes: Vec<u8>) {
        if let Some(pos) = self.cache.iter().position(|(k, _)| *k == key) {
            self.cache.remove(pos);
        }
        self.cache.push_back((key, bytes));
        while self.cache.len() > self.config.cache_capacity {
            self.cache.pop_front();
        }
    }

    fn cache_get(&self, key: (u16, u32)) -> Option<&[u8]> {
        self.cache.iter().find(|(k, _)| *k == key).map(|(_, b)| b.as_slice())
    }

    /// Emit the periodic hello listing the current S and A sets (and, under
    /// the relay election, which neighbors we selected).
    pub fn tick_hello(&mut self, now: u64) -> Result<Vec<Output>, ProtoError> {
        if self.wiped {
            return Err(ProtoError::Wiped);
        }
        if self.muted {
            return Ok(Vec::new());
        }
        let mprs = if self.config.election == ElectionRule::MprCds {
            self.my_mprs.iter().copied().collect()
        } else {
            Vec::new()
        };
        let field = DataField::control(
            self.config.member,
            now,
            Body::Hello {
                sym: self.sym.keys().copied().collect(),
                asym: self.asym.keys().copied().collect(),
                mprs,
            },
        );
        Ok(vec![Output::Transmit(self.seal_field(&field)?)])
    }

    /// Process a received hello: promote the sender between the A and S
    /// lists, refresh the two-hop table, and re-run the election.
    fn on_hello(&mut self, from: u16, sym: &[u16], asym: &[u16], mprs: &[u16], ts: u64) {
        let me = self.config.member;
        let lists_us = sym.contains(&me) || asym.contains(&me);
        if lists_us {
            self.asym.remove(&from);
            self.sym.insert(from, ts);
        } else if !self.sym.contains_key(&from) {
            self.asym.insert(from, ts);
        } else {
            // an S neighbor that stopped listing us fell back to asymmetric
            self.sym.remove(&from);
            self.two_hop.remove(&from);
            self.asym.insert(from, ts);
        }
        if self.sym.contains_key(&from) {
            self.two_hop.insert(from, (ts, sym.iter().copied().collect()));
        }
        if mprs.contains(&me) {
            self.mpr_selectors.insert(from);
        } else {
            self.mpr_selectors.remove(&from);
        }
        self.recompute_cds();
    }

    /// Re-derive the backbone flag (and, under the relay rule, our own
    /// relay selection) from local knowledge only. Returns the flag.
    pub fn recompute_cds(&mut self) -> bool {
        let view = self.view();
        self.my_mprs = cds::select_mprs(&view).mprs;
        self.cds_flag = match self.config.election {
            ElectionRule::WuLi1999 => cds::wu_li_flag(&view),
            ElectionRule::MprCds => {
                match view.sym_neighbors.iter().next() {
                    None => true,
                    Some(&min) => {
                        let me = self.config.member;
                        me < min || self.mpr_selectors.contains(&min)
                    }
                }
            }
        };
        self.cds_flag
    }

    /// Originate an information packet: bump the sequence number, cache the
    /// field for later retransmission requests, seal and send.
    pub fn originate(&mut self, body: Body, _now: u64) -> Result<Vec<Output>, ProtoError> {
        if self.wiped {
            return Err(ProtoError::Wiped);
        }
        if self.muted {
            return Err(ProtoError::Muted);
        }
        if self.column.is_revoked(self.config.member) {
            return Err(ProtoError::Revoked);
        }
        self.own_seq += 1;
        let field = DataField::information(self.config.member, self.own_seq, body);
        let field_bytes = wire::encode_data(&field)?;
        self.cache_insert((self.config.member, self.own_seq), field_bytes);
        // our own packets are "seen" so flood copies come back silently
        let ledger = self.ledger.entry(self.config.member).or_default();
        ledger.highest = self.own_seq;
        ledger.seen.insert(self.own_seq);
        Ok(vec![Output::Transmit(self.seal_field(&field)?)])
    }

    /// Periodic topology advertisement; only backbone members emit.
    pub fn tick_tc(&mut self, now: u64) -> Result<Vec<Output>, ProtoError> {
        if self.wiped || self.muted || !self.cds_flag || self.sym.is_empty() {
            return Ok(Vec::new());
        }
        let entries: Vec<(u16, u64)> = self.sym.iter().map(|(&id, &ts)| (id, ts)).collect();
        self.originate(Body::Tc(entries), now)
    }

    /// Handle one received sealed packet.
    pub fn handle_bytes(&mut self, bytes: &[u8], now: u64) -> Vec<Output> {
        if self.wiped {
            return Vec::new();
        }
        let pkt = match SealedPacket::from_bytes(bytes, self.config.n) {
            Ok(p) => p,
            Err(_) => return vec![Output::Event("drop malformed".into())],
        };
        let sealed_origin = match pkt.originator() {
            Ok(o) => o,
            Err(_) => return vec![Output::Event("drop bad-marker".into())],
        };
        if sealed_origin == self.config.member {
            // a copy of our own flood came back
            return Vec::new();
        }
        let plain = match crypto::open(&self.column, &pkt) {
            Ok((_, p)) => p,
            Err(CryptoError::OriginatorRevoked(m)) => {
                return vec![Output::Event(format!("drop revoked-origin {m}"))];
            }
            Err(_) => return vec![Output::Event("drop undecodable".into())],
        };
        let field = match wire::decode_data(&plain) {
            Ok(f) => f,
            Err(_) => return vec![Output::Event("drop bad-field".into())],
        };
        match field.stamp {
            Stamp::Timestamp(ts) => self.handle_control(sealed_origin, &field, ts, now),
            Stamp::Sequence(seq) => self.handle_information(bytes, &field, seq, now),
        }
    }

    fn handle_control(&mut self, from: u16, field: &DataField, ts: u64, now: u64) -> Vec<Output> {
        // stale control traffic is discarded around its timestamp
        if now.abs_diff(ts) > self.config.timestamp_tolerance {
            return vec![Output::Event(format!("drop stale-hello from {from}"))];
        }
        let window = self.control_stamps.entry(from).or_default();
        window.push_back(ts);
        while window.len() > 10 {
            window.pop_front();
        }
        if let Body::Hello { sym, asym, mprs } = &field.body {
            let (sym, asym, mprs) = (sym.clone(), asym.clone(), mprs.clone());
            self.on_hello(from, &sym, &asym, &mprs, ts);
        }
        Vec::new()
    }

    fn handle_information(
        &mut self,
        raw: &[u8],
        field: &DataField,
        seq: u32,
        now: u64,
    ) -> Vec<Output> {
        let origin = field.originator;
        if self.column.is_revoked(origin) {
            return vec![Output::Event(format!("drop revoked-payload-origin {origin}"))];
        }
        let mut out = Vec::new();
        let is_arq = matches!(field.body, Body::Arq { .. });

        // duplicate suppression on the payload identity
        let ledger = self.ledger.entry(origin).or_default();
        let window = self.config.seq_window;
        let already = ledger.seen.contains(&seq)
            || (ledger.highest >= window && seq <= ledger.highest - window);
        if already {
            return vec![Output::Event(format!("dup {origin}:{seq}"))];
        }
        ledger.seen.insert(seq);
        if let Some(fire) = ledger.gaps.remove(&seq) {
            let _ = fire;
            out.push(Output::Event(format!("gap-filled {origin}:{seq}")));
        }
        if seq > ledger.highest {
            // a jump reveals missing packets; request them after a timeout
            // (receipt of an ARQ is exempt so ARQs never beget ARQs)
            if !is_arq {
                for missing in (ledger.highest + 1)..seq {
                    if !ledger.seen.contains(&missing) {
                        ledger.gaps.entry(missing).or_insert(now + self.config.arq_timeout);
                        out.push(Output::Event(format!("gap {origin}:{missing}")));
                    }
                }
            }
            ledger.highest = seq;
        }
        // bound the per-origin window
        while let Some(&low) = ledger.seen.first() {
            if ledger.highest >= window && low <= ledger.highest - window {
                ledger.seen.remove(&low);
            } else {
                break;
            }
        }

        // cache for later retransmission requests
        if !is_arq {
            if let Ok(bytes) = wire::encode_data(field) {
                self.cache_insert((origin, seq), bytes);
            }
        }

        out.extend(self.deliver_information(field, seq, now));

        if is_arq {
            if let Body::Arq { origin: want_origin, seq: want_seq } = field.body {
                out.extend(self.on_arq(want_origin, want_seq, raw, now));
            }
        } else if self.cds_flag && !self.muted {
            // backbone relaying: re-emit the sealed packet unchanged
            out.push(Output::Transmit(raw.to_vec()));
        }
        out
    }

    fn deliver_information(&mut self, field: &DataField, seq: u32, now: u64) -> Vec<Output> {
        let origin = field.originator;
        let mut out = Vec::new();
        match &field.body {
            Body::Chat(_) | Body::Multimedia { .. } => {
                out.push(Output::Deliver { origin, seq, body: field.body.clone() });
            }
            Body::Geo { lat, lon } => {
                if let Some((prev_member, plat, plon)) = self.last_geo {
                    let d = geo_distance_m(plat, plon, *lat, *lon);
                    if d > self.config.geo_warn_threshold_m {
                        out.push(Output::Event(format!(
                            "warn geo-divergence {prev_member}->{origin} {:.0}m",
                            d
                        )));
                    }
                }
                self.last_geo = Some((origin, *lat, *lon));
                out.push(Output::Deliver { origin, seq, body: field.body.clone() });
            }
            Body::Tc(entries) => {
                self.on_tc(origin, entries, now);
            }
            Body::Arq { .. } => {}
            Body::Mute { offset } => {
                if let Some(off) = offset {
                    self.peer_mute_deadline.insert(origin, now + off);
                }
                self.muted_peers.insert(origin);
                out.push(Output::Event(format!("peer-muted {origin}")));
            }
            Body::Fail => {
                out.push(Output::Event(format!("peer-failed {origin}")));
            }
            Body::Repudiation { member } => {
                out.extend(self.on_repudiation(origin, *member));
            }
            Body::Addition { member } => {
                out.push(Output::Event(format!("addition-request {member} (not provisioned)")));
            }
            Body::Merge { bridge, members } => {
                out.push(Output::Event(format!(
                    "merge-request bridge={bridge} members={} (not provisioned)",
                    members.len()
                )));
            }
            Body::Opaque { subtype, .. } => {
                out.push(Output::Event(format!("opaque subtype {subtype}")));
            }
            Body::Hello { .. } => {
                out.push(Output::Event("drop hello-as-information".into()));
            }
        }
        // any traffic from a peer clears its pending mute deadline
        if !matches!(field.body, Body::Mute { .. }) {
            self.peer_mute_deadline.remove(&origin);
            self.muted_peers.remove(&origin);
        }
        out
    }

    /// Merge a topology advertisement from backbone member `y`: only
    /// entries with a newer timestamp replace stored ones.
    fn on_tc(&mut self, y: u16, entries: &[(u16, u64)], now: u64) {
        let entry = self.directory.entry(y).or_default();
        entry.updated = now;
        for &(id, ts) in entries {
            let stored = entry.neighbors.entry(id).or_insert(0);
            if ts > *stored {
                *stored = ts;
            }
        }
    }

    /// Serve or forward a retransmission request per the backbone rules.
    fn on_arq(&mut self, origin: u16, seq: u32, raw: &[u8], _now: u64) -> Vec<Output> {
        let me = self.config.member;
        if origin == me {
            // we generated the missing packet: answer from our cache
            return match self.cache_get((me, seq)) {
                Some(bytes) => {
                    let field_bytes = bytes.to_vec();
                    match self.reseal(&field_bytes) {
                        Ok(b) => vec![
                            Output::Event(format!("arq-answer {origin}:{seq}")),
                            Output::Transmit(b),
                        ],
                        Err(_) => vec![Output::Event("arq-answer-failed".into())],
                    }
                }
                None => vec![Output::Event(format!("arq-cache-miss {origin}:{seq}"))],
            };
        }
        if !self.cds_flag {
            return Vec::new();
        }
        if let Some(bytes) = self.cache_get((origin, seq)) {
            // answer on behalf of the generator and absorb the request
            let field_bytes = bytes.to_vec();
            return match self.reseal(&field_bytes) {
                Ok(b) => vec![
                    Output::Event(format!("arq-answer {origin}:{seq}")),
                    Output::Transmit(b),
                ],
                Err(_) => vec![Output::Event("arq-answer-failed".into())],
            };
        }
        let seen = self
            .ledger
            .get(&origin)
            .map_or(false, |l| l.seen.contains(&seq) || (l.highest >= self.config.seq_window && seq <= l.highest - self.config.seq_window));
        if !seen && !self.muted {
            return vec![Output::Transmit(raw.to_vec())];
        }
        Vec::new()
    }

    fn reseal(&mut self, field_bytes: &[u8]) -> Result<Vec<u8>, ProtoError> {
        let pkt = crypto::seal(&self.column, field_bytes, &mut self.rng)?;
        Ok(pkt.to_bytes())
    }

    /// Enter or leave silent running. Entering emits a final mute notice.
    pub fn set_mute(&mut self, on: bool, declared_offset: Option<u64>, now: u64) -> Result<Vec<Output>, ProtoError> {
        if self.wiped {
            return Err(ProtoError::Wiped);
        }
        if on {
            if self.muted {
                return Ok(Vec::new());
            }
            let outputs = self.originate(Body::Mute { offset: declared_offset }, now)?;
            self.muted = true;
            self.demute_deadline = None;
            Ok(outputs)
        } else {
            self.muted = false;
            self.demute_deadline = None;
            Ok(Vec::new())
        }
    }

    /// Password-gated exit from mute. A wrong password past the grace
    /// deadline emits a fail notice and destroys local state.
    pub fn demute_with_password(&mut self, attempt: &str, now: u64) -> Vec<Output> {
        if self.wiped || !self.muted {
            return Vec::new();
        }
        let deadline = *self.demute_deadline.get_or_insert(now + self.config.password_grace);
        if attempt == self.config.demute_password && now <= deadline {
            self.muted = false;
            self.demute_deadline = None;
            // pull everything missed while silent as soon as possible
            for ledger in self.ledger.values_mut() {
                for fire in ledger.gaps.values_mut() {
                    *fire = now;
                }
            }
            return vec![Output::Event("demuted".into())];
        }
        if now > deadline {
            let mut out = Vec::new();
            self.muted = false; // transmit the final notice
            if let Ok(mut sent) = self.originate(Body::Fail, now) {
                out.append(&mut sent);
            }
            self.wipe();
            out.push(Output::Event("state-wiped".into()));
            return out;
        }
        vec![Output::Event("bad-password".into())]
    }

    fn wipe(&mut self) {
        self.wiped = true;
        self.muted = true;
        self.sym.clear();
        self.asym.clear();
        self.two_hop.clear();
        self.ledger.clear();
        self.control_stamps.clear();
        self.directory.clear();
        self.cache.clear();
        self.muted_peers.clear();
        self.peer_mute_deadline.clear();
        self.column.column.iter_mut().for_each(|k| *k = [0u8; 16]);
    }

    /// Leader-only revocation of a member's key material.
    fn on_repudiation(&mut self, sealed_origin: u16, member: u16) -> Vec<Output> {
        if sealed_origin != self.config.leader {
            return vec![Output::Event(format!(
                "ignore repudiation of {member} from non-leader {sealed_origin}"
            ))];
        }
        if self.column.is_revoked(member) {
            return Vec::new();
        }
        self.column = crypto::repudiate(&self.column, member);
        vec![Output::Event(format!("revoked {member}"))]
    }

    /// Local (leader-side) revocation entry point.
    pub fn revoke_local(&mut self, member: u16) {
        self.column = crypto::repudiate(&self.column, member);
    }

    /// Fire any due retransmission requests. Each missing packet triggers
    /// at most one request per timeout window.
    pub fn service_arqs(&mut self, now: u64) -> Vec<Output> {
        if self.wiped || self.muted {
            return Vec::new();
        }
        let mut due: Vec<(u16, u32)> = Vec::new();
        for (&origin, ledger) in &mut self.ledger {
            for (&seq, fire) in &mut ledger.gaps {
                if *fire <= now {
                    *fire = now + self.config.arq_timeout;
                    due.push((origin, seq));
                }
            }
        }
        let mut out = Vec::new();
        for (origin, seq) in due {
            out.push(Output::Event(format!("arq-request {origin}:{seq}")));
            match self.originate(Body::Arq { origin, seq }, now) {
                Ok(mut sent) => out.append(&mut sent),
                Err(_) => {}
            }
        }
        out
    }

    /// Sweep every aged table: neighbor lists, two-hop entries, directory
    /// entries, and overdue peer mute declarations.
    pub fn expire(&mut self, now: u64) -> Vec<Output> {
        if self.wiped {
            return Vec::new();
        }
        let hold = self.config.hold_multiplier * self.config.hello_period;
        let before_sym = self.sym.len();
        let muted_peers = &self.muted_peers;
        self.sym
            .retain(|id, &mut ts| now.saturating_sub(ts) <= hold || muted_peers.contains(id));
        self.asym
            .retain(|id, &mut ts| now.saturating_sub(ts) <= hold || muted_peers.contains(id));
        let sym = &self.sym;
        self.two_hop.retain(|id, _| sym.contains_key(id));
        self.mpr_selectors.retain(|id| sym.contains_key(id));
        if self.sym.len() != before_sym {
            self.recompute_cds();
        }
        let expiry = self.config.tc_expiry_multiplier * self.config.tc_period;
        self.directory.retain(|_, e| now.saturating_sub(e.updated) <= expiry);

        let mut out = Vec::new();
        let overdue: Vec<u16> = self
            .peer_mute_deadline
            .iter()
            .filter(|(_, &deadline)| now > deadline)
            .map(|(&m, _)| m)
            .collect();
        for m in overdue {
            self.peer_mute_deadline.remove(&m);
            out.push(Output::Event(format!("late-demute {m}")));
        }
        out
    }
}

/// Rough great-circle distance in meters, for divergence warnings only.
fn geo_distance_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let r = 6_371_000.0;
    let to_rad = std::f64::consts::PI / 180.0;
    let dlat = (lat2 - lat1) * to_rad;
    let dlon = (lon2 - lon1) * to_rad;
    let a = (dlat / 2.0).sin().powi(2)
        + (lat1 * to_rad).cos() * (lat2 * to_rad).cos() * (dlon / 2.0).sin().powi(2);
    2.0 * r * a.sqrt().asin()
}
