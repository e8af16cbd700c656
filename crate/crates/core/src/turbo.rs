//! Turbo encoder: two recursive systematic convolutional (RSC) encoders, one
//! over the data in natural order and one over an interleaved copy, each
//! mapping (systematic, parity) bit pairs onto QPSK symbols.
//!
//! The frame layout is encoder-1 symbols followed by encoder-2 symbols, with
//! no trellis termination; both encoders start in state 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Constituent RSC code, described by its feedback and feedforward tap masks.
/// Bit `j` of a mask is the coefficient of `D^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RscCode {
    pub feedback: u32,
    pub feedforward: u32,
    /// Number of delay elements; the trellis has `2^memory` states.
    pub memory: u32,
}

/// 4-state code with generator `[1, (1 + D^2)/(1 + D + D^2)]`.
pub const CODE_4_STATE: RscCode = RscCode {
    feedback: 0b111,
    feedforward: 0b101,
    memory: 2,
};

/// 16-state code with generator `[1, (1 + D^2 + D^3 + D^4)/(1 + D + D^4)]`.
pub const CODE_16_STATE: RscCode = RscCode {
    feedback: 0b1_0011,
    feedforward: 0b1_1101,
    memory: 4,
};

impl RscCode {
    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    fn validate(&self) -> Result<()> {
        if self.memory == 0 || self.memory > 16 {
            return Err(Error::InvalidParameter(format!(
                "memory must be in 1..=16, got {}",
                self.memory
            )));
        }
        let span = 1u32 << (self.memory + 1);
        if self.feedback & 1 == 0 {
            return Err(Error::InvalidParameter(
                "feedback taps must include the D^0 term".into(),
            ));
        }
        if self.feedback >> self.memory != 1 {
            return Err(Error::InvalidParameter(
                "feedback taps must include the D^memory term and nothing higher".into(),
            ));
        }
        if self.feedforward == 0 || self.feedforward >= span {
            return Err(Error::InvalidParameter(format!(
                "feedforward taps must be nonzero and fit {} memory elements",
                self.memory
            )));
        }
        Ok(())
    }
}

/// Antipodal bit map used throughout: 0 -> +1, 1 -> -1.
#[inline]
pub fn bit_amplitude(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// QPSK symbol for one transition: systematic bit on the real axis, parity
/// bit on the imaginary axis.
#[inline]
pub fn qpsk_symbol(systematic: bool, parity: bool) -> Complex64 {
    Complex64::new(bit_amplitude(systematic), bit_amplitude(parity))
}

/// Index of a transition's symbol in a per-position branch-metric table.
#[inline]
pub fn symbol_id(systematic: bool, parity: bool) -> usize {
    ((systematic as usize) << 1) | parity as usize
}

/// The four QPSK symbols in [`symbol_id`] order.
pub fn qpsk_alphabet() -> [Complex64; 4] {
    [
        qpsk_symbol(false, false),
        qpsk_symbol(false, true),
        qpsk_symbol(true, false),
        qpsk_symbol(true, true),
    ]
}

/// One trellis branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next: usize,
    pub parity: bool,
    pub symbol: Complex64,
    pub symbol_id: usize,
}

/// Complete transition table of a constituent code.
#[derive(Debug, Clone)]
pub struct Trellis {
    code: RscCode,
    num_states: usize,
    /// Indexed by `[state][input bit]`.
    outgoing: Vec<[Transition; 2]>,
    /// For each state, the two `(source state, input bit)` pairs reaching it.
    incoming: Vec<[(usize, bool); 2]>,
}

impl Trellis {
    pub fn new(code: RscCode) -> Result<Self> {
        code.validate()?;
        let num_states = code.num_states();
        let mut outgoing = Vec::with_capacity(num_states);
        for state in 0..num_states {
            let make = |bit: bool| {
                let (next, parity) = step(&code, state, bit);
                Transition {
                    next,
                    parity,
                    symbol: qpsk_symbol(bit, parity),
                    symbol_id: symbol_id(bit, parity),
                }
            };
            outgoing.push([make(false), make(true)]);
        }
        let mut fan_in: Vec<Vec<(usize, bool)>> = vec![Vec::new(); num_states];
        for (state, branches) in outgoing.iter().enumerate() {
            for (bit, t) in branches.iter().enumerate() {
                fan_in[t.next].push((state, bit == 1));
            }
        }
        let mut incoming = Vec::with_capacity(num_states);
        for (state, sources) in fan_in.into_iter().enumerate() {
            let pair: [(usize, bool); 2] = sources.try_into().map_err(|_| {
                Error::InvalidParameter(format!(
                    "taps do not yield exactly two transitions into state {state}"
                ))
            })?;
            incoming.push(pair);
        }
        Ok(Self {
            code,
            num_states,
            outgoing,
            incoming,
        })
    }

    pub fn code(&self) -> RscCode {
        self.code
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    #[inline]
    pub fn transition(&self, state: usize, bit: bool) -> &Transition {
        &self.outgoing[state][bit as usize]
    }

    /// `(source state, input bit)` pairs of the branches converging to `state`.
    #[inline]
    pub fn converging(&self, state: usize) -> &[(usize, bool); 2] {
        &self.incoming[state]
    }

    /// States reachable from `state` (the diverge set).
    pub fn diverging(&self, state: usize) -> [usize; 2] {
        [
            self.outgoing[state][0].next,
            self.outgoing[state][1].next,
        ]
    }

    /// State reached from `state` on input symbol +1 (data bit 0).
    #[inline]
    pub fn next_on_plus(&self, state: usize) -> usize {
        self.outgoing[state][0].next
    }

    /// State reached from `state` on input symbol -1 (data bit 1).
    #[inline]
    pub fn next_on_minus(&self, state: usize) -> usize {
        self.outgoing[state][1].next
    }
}

/// Shift-register update: the state keeps the last `memory` feedback values,
/// most recent in bit 0.
fn step(code: &RscCode, state: usize, bit: bool) -> (usize, bool) {
    let fb_tail = (code.feedback >> 1) as usize;
    let w = bit as usize ^ ((state & fb_tail).count_ones() as usize & 1);
    let augmented = (state << 1) | w;
    let parity = (augmented & code.feedforward as usize).count_ones() & 1 == 1;
    let next = augmented & (code.num_states() - 1);
    (next, parity)
}

/// Bijective index map between data order and encoder-2 order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interleaver {
    /// `perm[l]` is the data index read at interleaved position `l`.
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl Interleaver {
    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let len = perm.len();
        if len < 2 {
            return Err(Error::InvalidParameter(
                "interleaver length must be at least 2".into(),
            ));
        }
        let mut inv = vec![usize::MAX; len];
        for (l, &i) in perm.iter().enumerate() {
            if i >= len || inv[i] != usize::MAX {
                return Err(Error::InvalidParameter(
                    "interleaver table is not a permutation".into(),
                ));
            }
            inv[i] = l;
        }
        Ok(Self { perm, inv })
    }

    /// Uniform random permutation, fixed by the stream that seeds it.
    pub fn random(len: usize, stream: &mut RngStream) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidParameter(
                "interleaver length must be at least 2".into(),
            ));
        }
        let mut perm: Vec<usize> = (0..len).collect();
        for i in (1..len).rev() {
            perm.swap(i, stream.index(i + 1));
        }
        Self::from_permutation(perm)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Data index feeding interleaved position `l`.
    #[inline]
    pub fn source_index(&self, l: usize) -> usize {
        self.perm[l]
    }

    /// Interleaved position of data index `i`.
    #[inline]
    pub fn interleaved_index(&self, i: usize) -> usize {
        self.inv[i]
    }

    /// Reorders a data-order slice into interleaved order.
    pub fn gather<T: Copy>(&self, data_order: &[T]) -> Vec<T> {
        self.perm.iter().map(|&i| data_order[i]).collect()
    }

    /// Writes an interleaved-order slice back to data order.
    pub fn scatter<T: Copy>(&self, interleaved: &[T], data_order: &mut [T]) {
        for (l, &i) in self.perm.iter().enumerate() {
            data_order[i] = interleaved[l];
        }
    }
}

/// Convenience constructor used by the simulation harness.
pub fn make_interleaver(len: usize, stream: &mut RngStream) -> Result<Interleaver> {
    Interleaver::random(len, stream)
}

/// Runs one constituent encoder from state 0 over `bits`.
fn rsc_symbols(trellis: &Trellis, bits: &[bool]) -> Vec<Complex64> {
    let mut state = 0usize;
    bits.iter()
        .map(|&b| {
            let t = trellis.transition(state, b);
            state = t.next;
            t.symbol
        })
        .collect()
}

/// Encodes one frame of data bits into `2 * data.len()` QPSK symbols:
/// encoder-1 output over the data order, then encoder-2 output over the
/// interleaved order.
pub fn encode(
    data: &[bool],
    trellis: &Trellis,
    interleaver: &Interleaver,
) -> Result<Vec<Complex64>> {
    if data.len() != interleaver.len() {
        return Err(Error::DimensionMismatch(format!(
            "data length {} does not match interleaver length {}",
            data.len(),
            interleaver.len()
        )));
    }
    let mut symbols = rsc_symbols(trellis, data);
    let permuted = interleaver.gather(data);
    symbols.extend(rsc_symbols(trellis, &permuted));
    Ok(symbols)
}
