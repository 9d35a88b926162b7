//! Published conversion tables, stored verbatim with signs and row order.
//!
//! Grammar: `#` starts a comment; header lines `source_n N`, `target_n N` and
//! `m M`; then one row per line, `A|B|C <source op> <target op>`. An `L` row
//! gives the two complementary logicals whose product bridges the `B` row
//! immediately above it. Rows are converted top to bottom.

/// `[[7,1,3]]` to `[[5,1,3]]` with no extra ancilla.
pub const TABLE1: &str = "\
# [[7,1,3]] -> [[5,1,3]], m = 0
source_n 7
target_n 5
m 0
A -YXXYIZZ  -YXXYIZZ
C ZZZZIII   IXZZXII
C -YYXXZZI  XZZXIII
C -IXZYYZX  XIXZZII
C -XIYZYZX  ZXIXZII
C -ZYYZIXX  IIIIIZI
";

/// `(34)`-permuted Steane code to Shor's `[[9,1,3]]`.
pub const TABLE2: &str = "\
# (34).[[7,1,3]] -> [[9,1,3]], m = 0
source_n 7
target_n 9
m 0
A ZZIIZZIII   ZZIIZZIII
A IIIIIIIZZ   IIIIIIIZZ
C YIIYYIYII   -YXYZZIXXX
B ZZZZIIIZI   ZZIIIIZZI
L XXXXXXXXX   XXXXXXXII
C -ZZYYXXIII  IZZZZIIII
C ZIIZZIZII   -YYXXXXIII
C -XZZXYIYII  -XYYIIIXXX
C -IYZXZXYII  IIIZZIIII
";

/// Steane code to its `(34)` permutation with two ancilla qubits.
pub const TABLE3: &str = "\
# [[7,1,3]] -> (34).[[7,1,3]], m = 2
source_n 7
target_n 7
m 2
A XXIIXXIII  XXIIXXIII
A ZZZZIIIII  ZZZZIIIII
A ZZIIZZIII  ZZIIZZIII
A XXXXIIIII  XXXXIIIII
C XIXIXIXII  YIIYYIYXX
C IIIIIIIZZ  XIIXXIXIX
C ZIZIZIZIZ  IIIIIIIXX
C YIYIYIYZZ  XIIXXIXXX
";

pub const NAMES: [&str; 3] = ["table1", "table2", "table3"];

pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "table1" => Some(TABLE1),
        "table2" => Some(TABLE2),
        "table3" => Some(TABLE3),
        _ => None,
    }
}
