//! Group privacy with a pairwise key matrix: every member holds one
//! column; a packet is sealed once and opened by everyone, and revoking a
//! member locks them out without redistributing keys.
//!
//! Run with: `cargo run --example group_keys`

use bubble::crypto::{self, KeyColumn};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let n = 5;
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let matrix = crypto::generate_matrix(n, &mut rng).unwrap();
    let columns: Vec<KeyColumn> =
        (0..n as u16).map(|m| crypto::column_for(&matrix, m).unwrap()).collect();

    // member 1 seals a message; every other member opens it
    let pkt = crypto::seal(&columns[1], b"rally at the bridge", &mut rng).unwrap();
    println!("sealed packet: {} bytes, originator field count {n}", pkt.to_bytes().len());
    for col in &columns {
        if col.owner == 1 {
            continue;
        }
        let (from, plain) = crypto::open(col, &pkt).unwrap();
        assert_eq!((from, plain.as_slice()), (1, b"rally at the bridge".as_slice()));
    }
    println!("all {} receivers opened it and identified member 1", n - 1);

    // revoke member 3: it can no longer read new traffic
    let col0 = crypto::repudiate(&columns[0], 3);
    let pkt2 = crypto::seal(&col0, b"member 3 is out", &mut rng).unwrap();
    let col3 = crypto::repudiate(&columns[3], 3); // 3's own copy is zeroed too
    assert!(crypto::open(&col3, &pkt2).is_err());
    let (_, plain) = crypto::open(&columns[2], &pkt2).unwrap();
    println!("member 2 still reads: {:?}", String::from_utf8(plain).unwrap());

    // columns serialize for distribution before the mission
    let bytes = columns[4].to_bytes();
    assert_eq!(KeyColumn::from_bytes(&bytes).unwrap(), columns[4]);
    println!("column file for member 4: {} bytes", bytes.len());
}
