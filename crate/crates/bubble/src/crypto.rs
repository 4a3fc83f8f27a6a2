//! Group key material and per-packet key wrapping.
//!
//! The leader generates a matrix of pairwise 16-byte keys; member `j` is
//! handed column `j` out of band. A packet carries one wrapped copy of a
//! fresh packet key per member: the originator's own slot holds an all-ones
//! marker (identifying the originator), revoked members' slots are zeroed,
//! and every other slot is the packet key encrypted under the pairwise key.
//!
//! The data field is AES-128-CTR under the single-use packet key, with a
//! CRC32 of the plaintext inside the encryption. The checksum detects
//! wrong-key decodes and corruption; it is not a MAC and provides no
//! cryptographic authentication.

use aes::cipher::{BlockDecrypt, BlockEncrypt, KeyInit};
use aes::Aes128;
use rand::RngCore;
use thiserror::Error;

pub const KEY_LEN: usize = 16;
pub const MAX_MEMBERS: usize = 50;

/// Marker placed in the originator's own key field.
pub const ORIGINATOR_MARKER: [u8; KEY_LEN] = [0xFF; KEY_LEN];

pub type Key = [u8; KEY_LEN];

#[derive(Debug, Error, PartialEq)]
pub enum CryptoError {
    #[error("member count {0} outside 2..={MAX_MEMBERS}")]
    BadMemberCount(usize),
    #[error("member index {0} out of range for {1} members")]
    BadMember(u16, usize),
    #[error("plaintext must be nonempty")]
    EmptyPlaintext,
    #[error("column owner is revoked and may not originate")]
    OwnerRevoked,
    #[error("packet has no originator marker")]
    NoMarker,
    #[error("packet has multiple originator markers")]
    MultipleMarkers,
    #[error("originator {0} is revoked")]
    OriginatorRevoked(u16),
    #[error("receiver's key field is zeroed (repudiated by originator)")]
    SelfFieldZero,
    #[error("checksum mismatch (wrong key or corrupt packet)")]
    ChecksumMismatch,
    #[error("packet truncated: {0}")]
    Truncated(&'static str),
    #[error("bad column file: {0}")]
    BadColumnFile(&'static str),
}

/// The leader-side n x n key grid. `keys[i][j]` is the pairwise key between
/// `i` and `j`; the grid is mirrored so both columns agree on it.
#[derive(Clone, PartialEq)]
pub struct KeyMatrix {
    n: usize,
    keys: Vec<Vec<Key>>,
}

impl KeyMatrix {
    pub fn member_count(&self) -> usize {
        self.n
    }

    pub fn key(&self, i: u16, j: u16) -> &Key {
        &self.keys[i as usize][j as usize]
    }
}

/// One member's slice of the matrix, plus the revocations it has seen.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyColumn {
    pub owner: u16,
    pub column: Vec<Key>,
    pub revoked: Vec<u16>,
}

/// Generate the mission key matrix from a seeded generator.
pub fn generate_matrix<R: RngCore>(n: usize, rng: &mut R) -> Result<KeyMatrix, CryptoError> {
    if !(2..=MAX_MEMBERS).contains(&n) {
        return Err(CryptoError::BadMemberCount(n));
    }
    let mut keys = vec![vec![[0u8; KEY_LEN]; n]; n];
    // draw the upper triangle, mirror it: both endpoints of a pair must
    // find the same key in their respective columns
    for i in 0..n {
        for j in i..n {
            let mut k = [0u8; KEY_LEN];
            rng.fill_bytes(&mut k);
            keys[i][j] = k;
            keys[j][i] = k;
        }
    }
    Ok(KeyMatrix { n, keys })
}

/// Extract member `j`'s column.
pub fn column_for(m: &KeyMatrix, j: u16) -> Result<KeyColumn, CryptoError> {
    if j as usize >= m.n {
        return Err(CryptoError::BadMember(j, m.n));
    }
    let column = (0..m.n).map(|i| m.keys[i][j as usize]).collect();
    Ok(KeyColumn { owner: j, column, revoked: Vec::new() })
}

impl KeyColumn {
    pub fn member_count(&self) -> usize {
        self.column.len()
    }

    pub fn is_revoked(&self, member: u16) -> bool {
        self.revoked.contains(&member)
    }

    /// Binary column file: magic `BBKC`, version, n, owner, the keys, then
    /// the revocation bitmap.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.column.len();
        let mut out = Vec::with_capacity(9 + n * KEY_LEN + n.div_ceil(8));
        out.extend_from_slice(b"BBKC");
        out.push(1); // version
        out.extend_from_slice(&(n as u16).to_be_bytes());
        out.extend_from_slice(&self.owner.to_be_bytes());
        for k in &self.column {
            out.extend_from_slice(k);
        }
        let mut bitmap = vec![0u8; n.div_ceil(8)];
        for &r in &self.revoked {
            bitmap[r as usize / 8] |= 1 << (r % 8);
        }
        out.extend_from_slice(&bitmap);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<KeyColumn, CryptoError> {
        let bad = CryptoError::BadColumnFile;
        if bytes.len() < 9 || &bytes[0..4] != b"BBKC" {
            return Err(bad("missing magic"));
        }
        if bytes[4] != 1 {
            return Err(bad("unsupported version"));
        }
        let n = u16::from_be_bytes([bytes[5], bytes[6]]) as usize;
        let owner = u16::from_be_bytes([bytes[7], bytes[8]]);
        let want = 9 + n * KEY_LEN + n.div_ceil(8);
        if bytes.len() != want || owner as usize >= n {
            return Err(bad("bad length or owner"));
        }
        let mut column = Vec::with_capacity(n);
        for i in 0..n {
            let start = 9 + i * KEY_LEN;
            let mut k = [0u8; KEY_LEN];
            k.copy_from_slice(&bytes[start..start + KEY_LEN]);
            column.push(k);
        }
        let bitmap = &bytes[9 + n * KEY_LEN..];
        let revoked = (0..n as u16)
            .filter(|&r| bitmap[r as usize / 8] >> (r % 8) & 1 == 1)
            .collect();
        Ok(KeyColumn { owner, column, revoked })
    }
}

/// Mark a member as revoked. Idempotent; returns the updated column.
pub fn repudiate(col: &KeyColumn, member: u16) -> KeyColumn {
    let mut out = col.clone();
    if !out.revoked.contains(&member) {
        out.revoked.push(member);
        out.revoked.sort_unstable();
    }
    out
}

/// A sealed packet: `n` key fields then the encrypted data.
#[derive(Debug, Clone, PartialEq)]
pub struct SealedPacket {
    pub key_fields: Vec<Key>,
    pub ciphertext: Vec<u8>,
}

impl SealedPacket {
    /// Index of the all-ones marker, i.e. the claimed originator.
    pub fn originator(&self) -> Result<u16, CryptoError> {
        let mut found = None;
        for (i, f) in self.key_fields.iter().enumerate() {
            if *f == ORIGINATOR_MARKER {
                if found.is_some() {
                    return Err(CryptoError::MultipleMarkers);
                }
                found = Some(i as u16);
            }
        }
        found.ok_or(CryptoError::NoMarker)
    }

    /// Wire layout: the key fields back to back, then the ciphertext.
    /// `n` is session configuration, not carried on the wire.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.key_fields.len() * KEY_LEN + self.ciphertext.len());
        for f in &self.key_fields {
            out.extend_from_slice(f);
        }
        out.extend_from_slice(&self.ciphertext);
        out
    }

    pub fn from_bytes(bytes: &[u8], n: usize) -> Result<SealedPacket, CryptoError> {
        if bytes.len() < n * KEY_LEN {
            return Err(CryptoError::Truncated("key fields"));
        }
        let key_fields = (0..n)
            .map(|i| {
                let mut k = [0u8; KEY_LEN];
                k.copy_from_slice(&bytes[i * KEY_LEN..(i + 1) * KEY_LEN]);
                k
            })
            .collect();
        Ok(SealedPacket { key_fields, ciphertext: bytes[n * KEY_LEN..].to_vec() })
    }
}

fn ctr_xor(key: &Key, data: &mut [u8]) {
    // CTR with an all-zero nonce: the key is single-use per packet
    let cipher = Aes128::new(key.into());
    for (i, chunk) in data.chunks_mut(16).enumerate() {
        let mut block = [0u8; 16];
        block[8..].copy_from_slice(&(i as u64).to_be_bytes());
        cipher.encrypt_block((&mut block).into());
        for (b, k) in chunk.iter_mut().zip(block.iter()) {
            *b ^= k;
        }
    }
}

fn wrap_key(pairwise: &Key, packet_key: &Key) -> Key {
    let cipher = Aes128::new(pairwise.into());
    let mut block = *packet_key;
    cipher.encrypt_block((&mut block).into());
    block
}

fn unwrap_key(pairwise: &Key, wrapped: &Key) -> Key {
    let cipher = Aes128::new(pairwise.into());
    let mut block = *wrapped;
    cipher.decrypt_block((&mut block).into());
    block
}

/// Seal a plaintext for the whole group under a fresh single-use key.
pub fn seal<R: RngCore>(
    col: &KeyColumn,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<SealedPacket, CryptoError> {
    if plaintext.is_empty() {
        return Err(CryptoError::EmptyPlaintext);
    }
    if col.is_revoked(col.owner) {
        return Err(CryptoError::OwnerRevoked);
    }
    let mut packet_key = [0u8; KEY_LEN];
    rng.fill_bytes(&mut packet_key);

    let n = col.column.len();
    let mut key_fields = Vec::with_capacity(n);
    for i in 0..n as u16 {
        if i == col.owner {
            key_fields.push(ORIGINATOR_MARKER);
        } else if col.is_revoked(i) {
            key_fields.push([0u8; KEY_LEN]);
        } else {
            key_fields.push(wrap_key(&col.column[i as usize], &packet_key));
        }
    }

    let mut inner = Vec::with_capacity(4 + plaintext.len());
    inner.extend_from_slice(&crc32fast::hash(plaintext).to_be_bytes());
    inner.extend_from_slice(plaintext);
    ctr_xor(&packet_key, &mut inner);
    Ok(SealedPacket { key_fields, ciphertext: inner })
}

/// Open a sealed packet with the receiver's column. Returns the originator
/// index and the recovered plaintext.
pub fn open(col: &KeyColumn, pkt: &SealedPacket) -> Result<(u16, Vec<u8>), CryptoError> {
    let originator = pkt.originator()?;
    if col.is_revoked(originator) {
        return Err(CryptoError::OriginatorRevoked(originator));
    }
    let me = col.owner as usize;
    if me >= pkt.key_fields.len() {
        return Err(CryptoError::Truncated("receiver slot missing"));
    }
    let my_field = &pkt.key_fields[me];
    if *my_field == [0u8; KEY_LEN] {
        return Err(CryptoError::SelfFieldZero);
    }
    let pairwise = &col.column[originator as usize];
    let packet_key = unwrap_key(pairwise, my_field);

    let mut inner = pkt.ciphertext.clone();
    ctr_xor(&packet_key, &mut inner);
    if inner.len() < 4 {
        return Err(CryptoError::Truncated("ciphertext"));
    }
    let stored = u32::from_be_bytes([inner[0], inner[1], inner[2], inner[3]]);
    let plaintext = inner.split_off(4);
    if crc32fast::hash(&plaintext) != stored {
        return Err(CryptoError::ChecksumMismatch);
    }
    Ok((originator, plaintext))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn matrix(n: usize, seed: u64) -> KeyMatrix {
        generate_matrix(n, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn matrix_shape_and_determinism() {
        let m = matrix(2, 1);
        assert_eq!(m.member_count(), 2);
        assert_eq!(matrix(2, 1).keys, m.keys);
        assert_ne!(matrix(2, 2).keys, m.keys);
        let big = matrix(50, 3);
        assert_eq!(big.keys.len() * big.keys[0].len(), 2500);
        assert!(generate_matrix(1, &mut ChaCha20Rng::seed_from_u64(0)).is_err());
        assert!(generate_matrix(51, &mut ChaCha20Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn columns_index_the_matrix() {
        let m = matrix(3, 7);
        let c0 = column_for(&m, 0).unwrap();
        assert_eq!(c0.column[1], *m.key(1, 0));
        // both sides of a pair agree on the shared key
        let ca = column_for(&m, 1).unwrap();
        let cb = column_for(&m, 2).unwrap();
        assert_eq!(ca.column[2], cb.column[1]);
        assert!(column_for(&m, 3).is_err());
    }

    #[test]
    fn seal_structure() {
        let m = matrix(3, 5);
        let col = column_for(&m, 1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let pkt = seal(&col, b"payload", &mut rng).unwrap();
        assert_eq!(pkt.key_fields.len(), 3);
        assert_eq!(pkt.key_fields[1], ORIGINATOR_MARKER);
        assert_ne!(pkt.key_fields[0], [0u8; 16]);
        assert_eq!(pkt.ciphertext.len(), 4 + 7);
        // fresh key each packet
        let pkt2 = seal(&col, b"payload", &mut rng).unwrap();
        assert_ne!(pkt.ciphertext, pkt2.ciphertext);
    }

    #[test]
    fn seal_zeroes_revoked_slots() {
        let m = matrix(3, 5);
        let col = repudiate(&column_for(&m, 1).unwrap(), 2);
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let pkt = seal(&col, b"x", &mut rng).unwrap();
        assert_eq!(pkt.key_fields[2], [0u8; 16]);
    }

    #[test]
    fn round_trip_all_pairs() {
        let m = matrix(5, 11);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        for j in 0..5u16 {
            let sender = column_for(&m, j).unwrap();
            let pkt = seal(&sender, b"hello bubble", &mut rng).unwrap();
            for i in 0..5u16 {
                if i == j {
                    continue;
                }
                let receiver = column_for(&m, i).unwrap();
                let (origin, plain) = open(&receiver, &pkt).unwrap();
                assert_eq!(origin, j);
                assert_eq!(plain, b"hello bubble");
            }
        }
    }

    #[test]
    fn open_error_paths() {
        let m = matrix(4, 13);
        let sender = column_for(&m, 0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let pkt = seal(&sender, b"secret", &mut rng).unwrap();

        // receiver that repudiated the originator rejects
        let suspicious = repudiate(&column_for(&m, 1).unwrap(), 0);
        assert_eq!(open(&suspicious, &pkt).unwrap_err(), CryptoError::OriginatorRevoked(0));

        // receiver zeroed by the sender cannot decode
        let sender_r = repudiate(&sender, 2);
        let pkt_r = seal(&sender_r, b"secret", &mut rng).unwrap();
        let victim = column_for(&m, 2).unwrap();
        assert_eq!(open(&victim, &pkt_r).unwrap_err(), CryptoError::SelfFieldZero);

        // outsider with a random column fails the checksum
        let outsider_m = matrix(4, 999);
        let outsider = column_for(&outsider_m, 3).unwrap();
        assert_eq!(open(&outsider, &pkt).unwrap_err(), CryptoError::ChecksumMismatch);

        // malformed markers
        let mut no_marker = pkt.clone();
        no_marker.key_fields[0] = [1u8; 16];
        assert_eq!(open(&victim, &no_marker).unwrap_err(), CryptoError::NoMarker);
        let mut two_markers = pkt.clone();
        two_markers.key_fields[3] = ORIGINATOR_MARKER;
        assert_eq!(open(&victim, &two_markers).unwrap_err(), CryptoError::MultipleMarkers);
    }

    #[test]
    fn repudiation_is_idempotent_and_blocks_owner() {
        let m = matrix(3, 17);
        let col = column_for(&m, 0).unwrap();
        let once = repudiate(&col, 1);
        assert_eq!(repudiate(&once, 1), once);
        let self_revoked = repudiate(&col, 0);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        assert_eq!(seal(&self_revoked, b"x", &mut rng).unwrap_err(), CryptoError::OwnerRevoked);
    }

    #[test]
    fn empty_plaintext_rejected() {
        let m = matrix(2, 19);
        let col = column_for(&m, 0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        assert_eq!(seal(&col, b"", &mut rng).unwrap_err(), CryptoError::EmptyPlaintext);
    }

    #[test]
    fn wire_and_column_file_round_trip() {
        let m = matrix(6, 23);
        let col = repudiate(&column_for(&m, 4).unwrap(), 2);
        assert_eq!(KeyColumn::from_bytes(&col.to_bytes()).unwrap(), col);
        assert!(KeyColumn::from_bytes(b"nope").is_err());

        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let pkt = seal(&col, b"wire", &mut rng).unwrap();
        let bytes = pkt.to_bytes();
        assert_eq!(bytes.len(), 6 * KEY_LEN + 4 + 4);
        assert_eq!(SealedPacket::from_bytes(&bytes, 6).unwrap(), pkt);
        assert!(SealedPacket::from_bytes(&bytes[..10], 6).is_err());
    }

    #[test]
    fn large_payload_round_trip() {
        let m = matrix(3, 29);
        let sender = column_for(&m, 0).unwrap();
        let receiver = column_for(&m, 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let mut payload = vec![0u8; 64 * 1024];
        rng.fill_bytes(&mut payload);
        let pkt = seal(&sender, &payload, &mut rng).unwrap();
        let (_, plain) = open(&receiver, &pkt).unwrap();
        assert_eq!(plain, payload);
    }
}
