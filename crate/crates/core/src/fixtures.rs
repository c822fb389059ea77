//! Small reference instances used across tests, benches, and the CLI.

use crate::model::{load_instance, Instance};

/// Path `0-1-2-3` with one bit per edge; the wiretapper sees the parity of
/// all three edge bits.
pub const PARITY_PATH: &str = "\
treepin q=2
vertices 4
edge 0 0 1 1
edge 1 1 2 1
edge 2 2 3 1
wiretap cols=1
1
1
1
";

/// Path of three edges with two bits on edge 0. The wiretapper sees the
/// parity of edge 0's bits and the parity of the bits on edges 1 and 2, so
/// edge 0 shares one bit with it.
pub const SHARED_PARITY_PATH: &str = "\
treepin q=2
vertices 4
edge 0 0 1 2
edge 1 1 2 1
edge 2 2 3 1
wiretap cols=2
1 0
1 0
0 1
0 1
";

/// Same tree as [`SHARED_PARITY_PATH`] with only the second wiretap column.
pub const SINGLE_PARITY_PATH: &str = "\
treepin q=2
vertices 4
edge 0 0 1 2
edge 1 1 2 1
edge 2 2 3 1
wiretap cols=1
0
0
1
1
";

pub fn parity_path() -> Instance {
    load_instance(PARITY_PATH).expect("fixture parses")
}

pub fn shared_parity_path() -> Instance {
    load_instance(SHARED_PARITY_PATH).expect("fixture parses")
}

pub fn single_parity_path() -> Instance {
    load_instance(SINGLE_PARITY_PATH).expect("fixture parses")
}

/// Two-realization scheme for [`PARITY_PATH`] over `F_4`. The 2x2 binary
/// matrix `[[1,1],[1,0]]` satisfies `M^2 = M + I`, so acting on pairs of
/// bits it is multiplication by `x` in `F_2[x]/(x^2+x+1)`. Node 1 sends
/// `X_a + x X_b` and node 2 sends `(x+1) X_b + X_c`; their sum is the
/// wiretapper's parity.
pub const PUBLISHED_SCHEME: &str = "\
treepin-scheme q=2 n=2
modulus 1 1 1
root 0
f rows=3 cols=2
1:0 0:0
0:1 1:1
0:0 1:0
owners 1 2
";

pub fn published_scheme() -> crate::scheme::CommScheme {
    crate::scheme::load_scheme(PUBLISHED_SCHEME).expect("fixture parses")
}
