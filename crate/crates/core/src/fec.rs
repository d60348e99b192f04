//! Rate-1/2, K=7 convolutional code with generators 171 and 133 (octal),
//! zero-tail terminated, and its Viterbi decoder.

use crate::error::{GfdmError, Result};

pub const CONSTRAINT_LENGTH: usize = 7;
pub const GENERATORS_OCTAL: (u32, u32) = (0o171, 0o133);
const MEMORY: usize = CONSTRAINT_LENGTH - 1;
const STATES: usize = 1 << MEMORY;

/// The only code supported: K=7, (171, 133), rate 1/2, zero tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSpec {
    pub constraint_length: usize,
    pub generators_octal: (u32, u32),
}

impl Default for CodeSpec {
    fn default() -> Self {
        CodeSpec {
            constraint_length: CONSTRAINT_LENGTH,
            generators_octal: GENERATORS_OCTAL,
        }
    }
}

impl CodeSpec {
    pub fn new(constraint_length: usize, generators_octal: (u32, u32)) -> Result<Self> {
        let spec = CodeSpec { constraint_length, generators_octal };
        if spec != CodeSpec::default() {
            return Err(GfdmError::Unsupported(format!(
                "only K=7 (171,133) is implemented, got K={constraint_length} ({:o},{:o})",
                generators_octal.0, generators_octal.1
            )));
        }
        Ok(spec)
    }

    pub const fn rate(&self) -> f64 {
        0.5
    }

    /// Coded length for `info` input bits including the tail.
    pub const fn coded_len(&self, info: usize) -> usize {
        2 * (info + MEMORY)
    }
}

/// Output pair for `input` entering a register holding `state`. The 7-bit
/// register has the current input in its MSB.
fn branch(state: usize, input: usize) -> (u8, u8, usize) {
    let reg = ((input << MEMORY) | state) as u32;
    let a = ((reg & GENERATORS_OCTAL.0).count_ones() & 1) as u8;
    let b = ((reg & GENERATORS_OCTAL.1).count_ones() & 1) as u8;
    (a, b, (reg >> 1) as usize)
}

/// Encodes `info` and appends the 6-bit zero tail; output is `2·(len+6)` bits.
pub fn conv_encode(info: &[u8]) -> Result<Vec<u8>> {
    if info.is_empty() {
        return Err(GfdmError::param("cannot encode an empty block"));
    }
    let mut out = Vec::with_capacity(2 * (info.len() + MEMORY));
    let mut state = 0;
    for &bit in info.iter().chain(std::iter::repeat_n(&0u8, MEMORY)) {
        if bit > 1 {
            return Err(GfdmError::param(format!("bit value {bit} is not 0 or 1")));
        }
        let (a, b, next) = branch(state, bit as usize);
        out.push(a);
        out.push(b);
        state = next;
    }
    Ok(out)
}

/// Decoder input.
#[derive(Debug, Clone, Copy)]
pub enum CodeMetrics<'a> {
    /// Hard bits, scored by Hamming distance.
    Hard(&'a [u8]),
    /// Soft values with bit `b` expected at `1 − 2b`, scored by squared distance.
    Soft(&'a [f64]),
}

impl CodeMetrics<'_> {
    fn len(&self) -> usize {
        match self {
            CodeMetrics::Hard(v) => v.len(),
            CodeMetrics::Soft(v) => v.len(),
        }
    }

    fn cost(&self, idx: usize, bit: u8) -> f64 {
        match self {
            CodeMetrics::Hard(v) => (v[idx] != bit) as u8 as f64,
            CodeMetrics::Soft(v) => {
                let d = v[idx] - (1.0 - 2.0 * bit as f64);
                d * d
            }
        }
    }
}

/// Maximum-likelihood decoding of a zero-tail block. Equal path metrics
/// resolve to the predecessor with the lower state index.
pub fn viterbi_decode(received: CodeMetrics<'_>) -> Result<Vec<u8>> {
    viterbi_decode_with(received.len(), |idx, bit| received.cost(idx, bit))
}

/// Viterbi over an arbitrary additive branch cost: `cost(i, b)` is the cost
/// of code bit `i` being `b`.
pub fn viterbi_decode_with(len: usize, cost: impl Fn(usize, u8) -> f64) -> Result<Vec<u8>> {
    if len % 2 != 0 || len < 2 * (MEMORY + 1) {
        return Err(GfdmError::param(format!(
            "received length {len} is not an even count covering at least one bit plus the tail"
        )));
    }
    let steps = len / 2;
    let mut table = [[(0u8, 0u8, 0usize); 2]; STATES];
    for (s, row) in table.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = branch(s, b);
        }
    }
    let mut metric = vec![f64::INFINITY; STATES];
    metric[0] = 0.0;
    let mut next = vec![0.0; STATES];
    // bit x of decisions[t] selects predecessor ((ns & 31) << 1) | x
    let mut decisions = vec![0u64; steps];
    for (t, dec) in decisions.iter_mut().enumerate() {
        let cost = [[cost(2 * t, 0), cost(2 * t, 1)], [cost(2 * t + 1, 0), cost(2 * t + 1, 1)]];
        for (ns, slot) in next.iter_mut().enumerate() {
            let input = ns >> (MEMORY - 1);
            let mut best = f64::INFINITY;
            let mut pick = 0;
            for x in 0..2 {
                let ps = ((ns & (STATES / 2 - 1)) << 1) | x;
                let (a, b, _) = table[ps][input];
                let m = metric[ps] + cost[0][a as usize] + cost[1][b as usize];
                if m < best {
                    best = m;
                    pick = x;
                }
            }
            *slot = best;
            *dec |= (pick as u64) << ns;
        }
        std::mem::swap(&mut metric, &mut next);
    }
    let mut bits = vec![0u8; steps];
    let mut state = 0usize;
    for t in (0..steps).rev() {
        bits[t] = (state >> (MEMORY - 1)) as u8;
        let x = ((decisions[t] >> state) & 1) as usize;
        state = ((state & (STATES / 2 - 1)) << 1) | x;
    }
    bits.truncate(steps - MEMORY);
    Ok(bits)
}
