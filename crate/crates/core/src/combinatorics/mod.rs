//! Level sequences, binary trees, and the posets they generate.

pub mod families;
pub mod poset;
pub mod seq;
pub mod tree;

pub use families::{hypercube, permutohedron, simplex, tamari, tamari_cover, LineChain, Phase};
pub use poset::{chain_classes, Chain, Cover, CoverLabel, Poset, PosetKind};
pub use seq::{apply_op, apply_word, braid_check, sigma_s, verify_braid_rules, Letter, LevelSeq, Op, OpWord, TamariSeq};
pub use tree::{collapse, BinaryTree};
