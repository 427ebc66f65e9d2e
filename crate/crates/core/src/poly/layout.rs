use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::PolyError;

/// One named group of variables, e.g. the `x` in `q(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub dim: usize,
}

/// Ordered variable blocks. Variables are numbered block after block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableLayout {
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    total_dim: usize,
}

impl VariableLayout {
    pub fn new<S: Into<String>>(blocks: impl IntoIterator<Item = (S, usize)>) -> Result<Self, PolyError> {
        let mut out = Vec::new();
        let mut offsets = Vec::new();
        let mut total = 0;
        for (name, dim) in blocks {
            let name = name.into();
            if dim == 0 {
                return Err(PolyError::InvalidLayout(format!("block `{name}` has dimension 0")));
            }
            if out.iter().any(|b: &Block| b.name == name) {
                return Err(PolyError::InvalidLayout(format!("duplicate block name `{name}`")));
            }
            offsets.push(total);
            total += dim;
            out.push(Block { name, dim });
        }
        if out.is_empty() {
            return Err(PolyError::InvalidLayout("layout has no blocks".into()));
        }
        Ok(Self { blocks: out, offsets, total_dim: total })
    }

    /// Single block named `x`.
    pub fn single(dim: usize) -> Self {
        Self::new([("x", dim)]).expect("dimension must be positive")
    }

    /// Two blocks `x`, `y` of equal dimension.
    pub fn bipartite(dim: usize) -> Self {
        Self::new([("x", dim), ("y", dim)]).expect("dimension must be positive")
    }

    /// `m` blocks `x1..xm` of dimension `dim`.
    pub fn uniform(m: usize, dim: usize) -> Self {
        Self::new((1..=m).map(|i| (format!("x{i}"), dim))).expect("dimension must be positive")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn block_index(&self, name: &str) -> Result<usize, PolyError> {
        self.blocks
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| PolyError::UnknownBlock(name.to_string()))
    }

    /// Variable index range of block `i`.
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.blocks[i].dim
    }

    pub fn range_of(&self, name: &str) -> Result<Range<usize>, PolyError> {
        Ok(self.range(self.block_index(name)?))
    }
}
