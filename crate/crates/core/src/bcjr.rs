//! Iterative turbo decoder built on probability-domain BCJR passes.
//!
//! Each constituent pass runs a forward and a backward sum-of-products
//! recursion over the trellis with per-time normalization, then forms the
//! per-bit extrinsic pair that the other decoder consumes as its prior. The
//! branch metric is `exp(-|y - f * s|^2 / (2 sigma_u^2))`; for robustness the
//! exponents at each frame position are shifted so their maximum is 0 and
//! clamped at -30 before exponentiation, which preserves every likelihood
//! ratio while ruling out underflow.

use crate::combiner::CombinedObservation;
use crate::error::{Error, Result};
use crate::turbo::{qpsk_alphabet, Interleaver, Trellis};

/// Probability pair over the antipodal data symbol: index 0 holds P(+1)
/// (data bit 0), index 1 holds P(-1) (data bit 1).
pub type ProbPair = [f64; 2];

/// Lower clamp for branch-metric exponents after the per-position shift.
pub const GAMMA_EXPONENT_FLOOR: f64 = -30.0;

/// Soft inputs of one frame: the combined observations of both encoders'
/// symbols plus the frame's interference-plus-noise variance.
#[derive(Debug, Clone)]
pub struct SoftFrame {
    pub obs: Vec<CombinedObservation>,
    pub sigma_u_sq: f64,
}

/// Branch metrics for one frame position, indexed by
/// [`crate::turbo::symbol_id`]. Values lie in `[e^-30, 1]` with at least one
/// entry equal to 1.
pub fn gamma_table(obs: &CombinedObservation, sigma_u_sq: f64) -> [f64; 4] {
    let inv = 1.0 / (2.0 * sigma_u_sq);
    let mut exponents = [0.0; 4];
    let mut max = f64::NEG_INFINITY;
    for (e, s) in exponents.iter_mut().zip(qpsk_alphabet()) {
        *e = -(obs.y - obs.f * s).norm_sqr() * inv;
        max = max.max(*e);
    }
    exponents.map(|e| (e - max).max(GAMMA_EXPONENT_FLOOR).exp())
}

/// Branch metrics for a whole constituent block.
pub fn gamma_tables(obs: &[CombinedObservation], sigma_u_sq: f64) -> Result<Vec<[f64; 4]>> {
    if !(sigma_u_sq > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma_u_sq must be positive, got {sigma_u_sq}"
        )));
    }
    Ok(obs.iter().map(|o| gamma_table(o, sigma_u_sq)).collect())
}

#[inline]
fn prior_of(pair: &ProbPair, bit: bool) -> f64 {
    pair[bit as usize]
}

fn check_block(trellis: &Trellis, gammas: &[[f64; 4]], priors: &[ProbPair]) -> Result<usize> {
    if gammas.len() != priors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} branch-metric positions vs {} priors",
            gammas.len(),
            priors.len()
        )));
    }
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("empty constituent block".into()));
    }
    Ok(trellis.num_states())
}

/// Forward sum-of-products. Returns `L` columns of `num_states` values laid
/// out flat; every column is normalized to sum 1, starting from the uniform
/// boundary at time 0.
pub fn forward(trellis: &Trellis, gammas: &[[f64; 4]], priors: &[ProbPair]) -> Result<Vec<f64>> {
    let s = check_block(trellis, gammas, priors)?;
    let l = gammas.len();
    let mut alphas = vec![0.0; l * s];
    let uniform = 1.0 / s as f64;
    alphas[..s].fill(uniform);
    for i in 0..l - 1 {
        let (head, tail) = alphas.split_at_mut((i + 1) * s);
        let prev = &head[i * s..];
        let next = &mut tail[..s];
        let g = &gammas[i];
        let p = &priors[i];
        let mut sum = 0.0;
        for (n, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(m, bit) in trellis.converging(n) {
                let t = trellis.transition(m, bit);
                acc += prev[m] * g[t.symbol_id] * prior_of(p, bit);
            }
            *slot = acc;
            sum += acc;
        }
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Degeneracy(format!(
                "forward column {} summed to {sum}",
                i + 1
            )));
        }
        let inv = 1.0 / sum;
        for v in next.iter_mut() {
            *v *= inv;
        }
    }
    Ok(alphas)
}

/// Backward sum-of-products. Returns `L + 1` flat columns, each normalized to
/// sum 1, with the uniform boundary at time `L`.
pub fn backward(trellis: &Trellis, gammas: &[[f64; 4]], priors: &[ProbPair]) -> Result<Vec<f64>> {
    let s = check_block(trellis, gammas, priors)?;
    let l = gammas.len();
    let mut betas = vec![0.0; (l + 1) * s];
    let uniform = 1.0 / s as f64;
    betas[l * s..].fill(uniform);
    for i in (0..l).rev() {
        let (head, tail) = betas.split_at_mut((i + 1) * s);
        let next = &tail[..s];
        let cur = &mut head[i * s..];
        let g = &gammas[i];
        let p = &priors[i];
        let mut sum = 0.0;
        for (n, slot) in cur.iter_mut().enumerate() {
            let mut acc = 0.0;
            for bit in [false, true] {
                let t = trellis.transition(n, bit);
                acc += next[t.next] * g[t.symbol_id] * prior_of(p, bit);
            }
            *slot = acc;
            sum += acc;
        }
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Degeneracy(format!(
                "backward column {i} summed to {sum}"
            )));
        }
        let inv = 1.0 / sum;
        for v in cur.iter_mut() {
            *v *= inv;
        }
    }
    Ok(betas)
}

/// Raw and normalized per-bit extrinsic pairs of one constituent pass.
#[derive(Debug, Clone)]
pub struct Extrinsic {
    /// Unnormalized sums `G_i+-` over the +1 and -1 branches.
    pub g: Vec<ProbPair>,
    /// `g` normalized so each pair sums to 1.
    pub f: Vec<ProbPair>,
}

/// Combines the recursions into per-bit extrinsic pairs. The sums exclude the
/// time-`i` prior, so the result carries only channel and neighborhood
/// information about bit `i`.
pub fn extrinsic(
    trellis: &Trellis,
    alphas: &[f64],
    betas: &[f64],
    gammas: &[[f64; 4]],
) -> Result<Extrinsic> {
    let s = trellis.num_states();
    let l = gammas.len();
    if alphas.len() != l * s || betas.len() != (l + 1) * s {
        return Err(Error::DimensionMismatch(
            "recursion buffers do not match the block length".into(),
        ));
    }
    let mut g = Vec::with_capacity(l);
    let mut f = Vec::with_capacity(l);
    for i in 0..l {
        let a = &alphas[i * s..(i + 1) * s];
        let b = &betas[(i + 1) * s..(i + 2) * s];
        let gam = &gammas[i];
        let mut pair = [0.0; 2];
        for (n, &an) in a.iter().enumerate() {
            let plus = trellis.transition(n, false);
            let minus = trellis.transition(n, true);
            pair[0] += an * gam[plus.symbol_id] * b[plus.next];
            pair[1] += an * gam[minus.symbol_id] * b[minus.next];
        }
        let sum = pair[0] + pair[1];
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Degeneracy(format!(
                "extrinsic pair at position {i} summed to {sum}"
            )));
        }
        g.push(pair);
        f.push([pair[0] / sum, pair[1] / sum]);
    }
    Ok(Extrinsic { g, f })
}

/// One full constituent pass: forward, backward, extrinsic.
pub fn constituent_pass(
    trellis: &Trellis,
    gammas: &[[f64; 4]],
    priors: &[ProbPair],
) -> Result<Extrinsic> {
    let alphas = forward(trellis, gammas, priors)?;
    let betas = backward(trellis, gammas, priors)?;
    extrinsic(trellis, &alphas, &betas, gammas)
}

/// Hard decisions and a-posteriori probabilities for one frame.
#[derive(Debug, Clone)]
pub struct DecodeOutput {
    /// Decoded data bits.
    pub bits: Vec<bool>,
    /// Normalized posterior pair per data bit.
    pub app: Vec<ProbPair>,
}

/// Runs the iterative decoder: decoder 1 over the first half of the
/// observations in data order, decoder 2 over the second half in interleaved
/// order, exchanging extrinsic pairs each iteration. Initial priors are
/// uniform. The final posterior of bit `i` is `G1_i+- * F2_i+-`, combining the
/// last decoder-1 pass with the freshest de-interleaved decoder-2 extrinsic;
/// ties decide for +1.
pub fn decode(
    frame: &SoftFrame,
    trellis: &Trellis,
    interleaver: &Interleaver,
    iterations: usize,
) -> Result<DecodeOutput> {
    if iterations == 0 {
        return Err(Error::InvalidParameter(
            "iteration count must be at least 1".into(),
        ));
    }
    let l = interleaver.len();
    if frame.obs.len() != 2 * l {
        return Err(Error::DimensionMismatch(format!(
            "expected {} observations for {l} data bits, got {}",
            2 * l,
            frame.obs.len()
        )));
    }
    let (obs1, obs2) = frame.obs.split_at(l);
    let gammas1 = gamma_tables(obs1, frame.sigma_u_sq)?;
    let gammas2 = gamma_tables(obs2, frame.sigma_u_sq)?;

    let mut f2_data: Vec<ProbPair> = vec![[0.5, 0.5]; l];
    let mut g1: Vec<ProbPair> = Vec::new();
    for _ in 0..iterations {
        let pass1 = constituent_pass(trellis, &gammas1, &f2_data)?;
        let priors2 = interleaver.gather(&pass1.f);
        let pass2 = constituent_pass(trellis, &gammas2, &priors2)?;
        interleaver.scatter(&pass2.f, &mut f2_data);
        g1 = pass1.g;
    }

    let mut bits = Vec::with_capacity(l);
    let mut app = Vec::with_capacity(l);
    for i in 0..l {
        let raw = [g1[i][0] * f2_data[i][0], g1[i][1] * f2_data[i][1]];
        let sum = raw[0] + raw[1];
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Degeneracy(format!(
                "posterior pair at position {i} summed to {sum}"
            )));
        }
        let pair = [raw[0] / sum, raw[1] / sum];
        bits.push(pair[1] > pair[0]);
        app.push(pair);
    }
    Ok(DecodeOutput { bits, app })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    use crate::numerics::{RngStream, StreamRole};
    use crate::turbo::{self, Interleaver, RscCode, CODE_16_STATE, CODE_4_STATE};

    fn obs(y: Complex64, f: f64) -> CombinedObservation {
        CombinedObservation { y, f }
    }

    /// Test-local RSC stepping that re-derives parity straight from the tap
    /// polynomials, independent of the trellis table. `initial_state` packs
    /// the shift register with the most recent feedback value in bit 0.
    fn oracle_rsc(code: &RscCode, initial_state: usize, bits: &[bool]) -> Vec<Complex64> {
        let memory = code.memory as usize;
        let mut mem: Vec<bool> = (0..memory).map(|j| initial_state >> j & 1 == 1).collect();
        let mut out = Vec::with_capacity(bits.len());
        for &b in bits {
            let mut w = b;
            for (j, &m) in mem.iter().enumerate() {
                if code.feedback >> (j + 1) & 1 == 1 {
                    w ^= m;
                }
            }
            let mut parity = if code.feedforward & 1 == 1 { w } else { false };
            for (j, &m) in mem.iter().enumerate() {
                if code.feedforward >> (j + 1) & 1 == 1 {
                    parity ^= m;
                }
            }
            out.push(turbo::qpsk_symbol(b, parity));
            mem.rotate_right(1);
            mem[0] = w;
        }
        out
    }

    /// Exhaustive symbol-MAP oracle: marginalizes every data word of a single
    /// constituent block under the exact (unclamped) Gaussian metric. The
    /// decoder's boundary conditions leave the initial state uniform, so the
    /// enumeration also sums over all initial states.
    fn brute_force_app(
        code: &RscCode,
        observations: &[CombinedObservation],
        sigma_u_sq: f64,
        priors: &[ProbPair],
    ) -> Vec<ProbPair> {
        let l = observations.len();
        let mut acc = vec![[0.0f64; 2]; l];
        for initial_state in 0..code.num_states() {
            for word in 0..(1u32 << l) {
                let bits: Vec<bool> = (0..l).map(|i| word >> i & 1 == 1).collect();
                let symbols = oracle_rsc(code, initial_state, &bits);
                let mut weight = 1.0;
                for i in 0..l {
                    let d = observations[i].y - observations[i].f * symbols[i];
                    weight *= (-d.norm_sqr() / (2.0 * sigma_u_sq)).exp();
                    weight *= priors[i][bits[i] as usize];
                }
                for i in 0..l {
                    acc[i][bits[i] as usize] += weight;
                }
            }
        }
        acc.iter()
            .map(|p| {
                let sum = p[0] + p[1];
                [p[0] / sum, p[1] / sum]
            })
            .collect()
    }

    /// Path-enumeration oracle for the forward recursion: accumulates the
    /// product of branch terms over every state path (any initial state, per
    /// the uniform boundary), then normalizes each time column.
    fn path_sum_alphas(
        trellis: &Trellis,
        gammas: &[[f64; 4]],
        priors: &[ProbPair],
    ) -> Vec<Vec<f64>> {
        let l = gammas.len();
        let s = trellis.num_states();
        let mut columns = vec![vec![0.0; s]; l];
        for n in 0..s {
            columns[0][n] = 1.0;
        }
        for col in 1..l {
            for initial_state in 0..s {
                for word in 0..(1u32 << col) {
                    let mut state = initial_state;
                    let mut weight = 1.0;
                    for i in 0..col {
                        let bit = word >> i & 1 == 1;
                        let t = trellis.transition(state, bit);
                        weight *= gammas[i][t.symbol_id] * priors[i][bit as usize];
                        state = t.next;
                    }
                    columns[col][state] += weight;
                }
            }
        }
        for col in columns.iter_mut() {
            let sum: f64 = col.iter().sum();
            for v in col.iter_mut() {
                *v /= sum;
            }
        }
        columns
    }

    /// Reversed path-enumeration oracle for the backward recursion: the mass
    /// at `(i, n)` sums every continuation from state `n` at time `i` to the
    /// open end of the block.
    fn path_sum_betas(
        trellis: &Trellis,
        gammas: &[[f64; 4]],
        priors: &[ProbPair],
    ) -> Vec<Vec<f64>> {
        let l = gammas.len();
        let s = trellis.num_states();
        let mut columns = vec![vec![0.0; s]; l + 1];
        for n in 0..s {
            columns[l][n] = 1.0;
        }
        for col in 0..l {
            let steps = l - col;
            for start in 0..s {
                for word in 0..(1u32 << steps) {
                    let mut state = start;
                    let mut weight = 1.0;
                    for j in 0..steps {
                        let bit = word >> j & 1 == 1;
                        let t = trellis.transition(state, bit);
                        weight *= gammas[col + j][t.symbol_id] * priors[col + j][bit as usize];
                        state = t.next;
                    }
                    columns[col][start] += weight;
                }
            }
        }
        for col in columns.iter_mut() {
            let sum: f64 = col.iter().sum();
            for v in col.iter_mut() {
                *v /= sum;
            }
        }
        columns
    }

    fn random_block(seed: u64, len: usize, code: &RscCode) -> Vec<CombinedObservation> {
        let mut bits = RngStream::new(seed, 0, StreamRole::Data);
        let mut chan = RngStream::new(seed, 0, StreamRole::Channel);
        let data = bits.bits(len);
        let symbols = oracle_rsc(code, 0, &data);
        symbols
            .iter()
            .map(|&s| {
                let f = 0.6 + 0.8 * (chan.standard_normal().abs().min(1.0));
                let noise = Complex64::new(
                    0.5 * chan.standard_normal(),
                    0.5 * chan.standard_normal(),
                );
                obs(f * s + noise, f)
            })
            .collect()
    }

    #[test]
    fn gamma_is_one_for_exact_symbol() {
        let s = turbo::qpsk_symbol(false, true);
        let table = gamma_table(&obs(2.5 * s, 2.5), 1.0);
        assert_eq!(table[turbo::symbol_id(false, true)], 1.0);
        for id in 0..4 {
            assert!(table[id] <= 1.0 && table[id] > 0.0);
        }
    }

    #[test]
    fn gamma_exponent_is_clamped() {
        // An observation hundreds of sigmas away from three of the symbols.
        let table = gamma_table(&obs(Complex64::new(100.0, 100.0), 1.0), 0.01);
        let floor = GAMMA_EXPONENT_FLOOR.exp();
        for v in table {
            assert!(v >= floor, "gamma {v} fell below the clamp");
            assert!(v <= 1.0);
        }
    }

    #[test]
    fn equidistant_symbols_get_equal_gammas() {
        // y on the real axis is equidistant from the two symbols sharing the
        // same real part.
        let table = gamma_table(&obs(Complex64::new(1.0, 0.0), 1.0), 0.7);
        assert_eq!(
            table[turbo::symbol_id(false, false)],
            table[turbo::symbol_id(false, true)]
        );
        assert_eq!(
            table[turbo::symbol_id(true, false)],
            table[turbo::symbol_id(true, true)]
        );
    }

    #[test]
    fn gamma_tables_reject_bad_variance() {
        assert!(gamma_tables(&[obs(Complex64::new(0.0, 0.0), 1.0)], 0.0).is_err());
    }

    #[test]
    fn uniform_inputs_keep_alphas_uniform() {
        let trellis = Trellis::new(CODE_4_STATE).unwrap();
        let l = 6;
        let gammas = vec![[0.25; 4]; l];
        let priors = vec![[0.5, 0.5]; l];
        let alphas = forward(&trellis, &gammas, &priors).unwrap();
        for v in &alphas {
            assert!((v - 0.25).abs() < 1e-12);
        }
        let betas = backward(&trellis, &gammas, &priors).unwrap();
        for v in &betas {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn recursions_match_path_enumeration_oracle() {
        for code in [CODE_4_STATE, CODE_16_STATE] {
            let trellis = Trellis::new(code).unwrap();
            let observations = random_block(77, 6, &code);
            let gammas = gamma_tables(&observations, 1.0).unwrap();
            let mut prior_stream = RngStream::new(78, 0, StreamRole::Data);
            let priors: Vec<ProbPair> = (0..6)
                .map(|_| {
                    let p = 0.2 + 0.6 * prior_stream.standard_normal().abs().min(1.0);
                    [p, 1.0 - p]
                })
                .collect();
            let alphas = forward(&trellis, &gammas, &priors).unwrap();
            let oracle = path_sum_alphas(&trellis, &gammas, &priors);
            let s = trellis.num_states();
            for i in 0..6 {
                for n in 0..s {
                    assert!(
                        (alphas[i * s + n] - oracle[i][n]).abs() < 1e-12,
                        "alpha mismatch at time {i}, state {n}"
                    );
                }
            }
            let betas = backward(&trellis, &gammas, &priors).unwrap();
            let oracle = path_sum_betas(&trellis, &gammas, &priors);
            for i in 0..=6 {
                for n in 0..s {
                    assert!(
                        (betas[i * s + n] - oracle[i][n]).abs() < 1e-12,
                        "beta mismatch at time {i}, state {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn recursion_columns_are_normalized() {
        let trellis = Trellis::new(CODE_16_STATE).unwrap();
        let observations = random_block(79, 12, &CODE_16_STATE);
        let gammas = gamma_tables(&observations, 0.8).unwrap();
        let priors = vec![[0.7, 0.3]; 12];
        let s = trellis.num_states();
        let alphas = forward(&trellis, &gammas, &priors).unwrap();
        for i in 0..12 {
            let sum: f64 = alphas[i * s..(i + 1) * s].iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "alpha column {i} sums to {sum}");
        }
        let betas = backward(&trellis, &gammas, &priors).unwrap();
        for i in 0..=12 {
            let sum: f64 = betas[i * s..(i + 1) * s].iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "beta column {i} sums to {sum}");
        }
    }

    #[test]
    fn zero_observation_gives_agnostic_extrinsic() {
        let trellis = Trellis::new(CODE_4_STATE).unwrap();
        let l = 5;
        let observations: Vec<CombinedObservation> =
            (0..l).map(|_| obs(Complex64::new(0.0, 0.0), 1.0)).collect();
        let gammas = gamma_tables(&observations, 1.0).unwrap();
        let priors = vec![[0.5, 0.5]; l];
        let out = constituent_pass(&trellis, &gammas, &priors).unwrap();
        for pair in out.f {
            assert!((pair[0] - 0.5).abs() < 1e-12);
            assert!((pair[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn strong_systematic_observation_biases_extrinsic() {
        let trellis = Trellis::new(CODE_4_STATE).unwrap();
        let l = 5;
        // All-plus observations: the +1 hypothesis should dominate everywhere.
        let observations: Vec<CombinedObservation> =
            (0..l).map(|_| obs(Complex64::new(3.0, 3.0), 1.0)).collect();
        let gammas = gamma_tables(&observations, 1.0).unwrap();
        let priors = vec![[0.5, 0.5]; l];
        let out = constituent_pass(&trellis, &gammas, &priors).unwrap();
        for pair in out.f {
            assert!(pair[0] > pair[1]);
        }
    }

    #[test]
    fn constituent_pass_matches_brute_force_marginals() {
        for code in [CODE_4_STATE, CODE_16_STATE] {
            let trellis = Trellis::new(code).unwrap();
            for seed in 0..5 {
                let observations = random_block(100 + seed, 6, &code);
                let gammas = gamma_tables(&observations, 1.0).unwrap();
                let priors = vec![[0.5, 0.5]; 6];
                let pass = constituent_pass(&trellis, &gammas, &priors).unwrap();
                let oracle = brute_force_app(&code, &observations, 1.0, &priors);
                for i in 0..6 {
                    assert!(
                        (pass.f[i][0] - oracle[i][0]).abs() < 1e-9,
                        "seed {seed}: APP({i}) = {:?} vs oracle {:?}",
                        pass.f[i],
                        oracle[i]
                    );
                }
            }
        }
    }

    fn noiseless_frame(
        data: &[bool],
        trellis: &Trellis,
        interleaver: &Interleaver,
        sigma_u_sq: f64,
    ) -> SoftFrame {
        let symbols = turbo::encode(data, trellis, interleaver).unwrap();
        SoftFrame {
            obs: symbols.iter().map(|&s| obs(s, 1.0)).collect(),
            sigma_u_sq,
        }
    }

    #[test]
    fn noiseless_frame_decodes_exactly() {
        let trellis = Trellis::new(CODE_4_STATE).unwrap();
        let mut il_stream = RngStream::new(50, 0, StreamRole::Interleaver);
        let interleaver = Interleaver::random(24, &mut il_stream).unwrap();
        let mut bits = RngStream::new(51, 0, StreamRole::Data);
        for _ in 0..20 {
            let data = bits.bits(24);
            let frame = noiseless_frame(&data, &trellis, &interleaver, 0.5);
            let out = decode(&frame, &trellis, &interleaver, 4).unwrap();
            assert_eq!(out.bits, data);
        }
    }

    #[test]
    fn posterior_confidence_grows_as_noise_vanishes() {
        let trellis = Trellis::new(CODE_4_STATE).unwrap();
        let mut il_stream = RngStream::new(52, 0, StreamRole::Interleaver);
        let interleaver = Interleaver::random(16, &mut il_stream).unwrap();
        let mut bits = RngStream::new(53, 0, StreamRole::Data);
        let data = bits.bits(16);
        let mut last_conf = 0.0;
        for sigma_u_sq in [1.0, 0.1, 0.01] {
            let frame = noiseless_frame(&data, &trellis, &interleaver, sigma_u_sq);
            let out = decode(&frame, &trellis, &interleaver, 4).unwrap();
            let conf: f64 = out
                .app
                .iter()
                .zip(&data)
                .map(|(pair, &b)| pair[b as usize])
                .sum::<f64>()
                / 16.0;
            assert!(conf >= last_conf - 1e-12);
            last_conf = conf;
        }
        assert!(last_conf > 0.999, "mean true-bit APP = {last_conf}");
    }

    #[test]
    fn posteriors_stay_normalized_over_many_iterations() {
        let trellis = Trellis::new(CODE_16_STATE).unwrap();
        let mut il_stream = RngStream::new(54, 0, StreamRole::Interleaver);
        let interleaver = Interleaver::random(32, &mut il_stream).unwrap();
        let mut bits = RngStream::new(55, 0, StreamRole::Data);
        let mut chan = RngStream::new(56, 0, StreamRole::Channel);
        let data = bits.bits(32);
        let symbols = turbo::encode(&data, &trellis, &interleaver).unwrap();
        let frame = SoftFrame {
            obs: symbols
                .iter()
                .map(|&s| {
                    let noise = Complex64::new(
                        0.8 * chan.standard_normal(),
                        0.8 * chan.standard_normal(),
                    );
                    obs(s + noise, 1.0)
                })
                .collect(),
            sigma_u_sq: 1.28,
        };
        let out = decode(&frame, &trellis, &interleaver, 50).unwrap();
        for pair in out.app {
            assert!(pair[0].is_finite() && pair[1].is_finite());
            assert!(pair[0] >= 0.0 && pair[0] <= 1.0);
            assert!((pair[0] + pair[1] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_iteration_with_flat_second_decoder_matches_constituent_map() {
        // With uniform priors and an uninformative second half (y = 0), one
        // decoder-1 pass is exactly the single-constituent MAP.
        let code = CODE_4_STATE;
        let trellis = Trellis::new(code).unwrap();
        let interleaver = Interleaver::from_permutation((0..6).collect()).unwrap();
        let observations = random_block(200, 6, &code);
        let mut all = observations.clone();
        all.extend((0..6).map(|_| obs(Complex64::new(0.0, 0.0), 1.0)));
        let frame = SoftFrame {
            obs: all,
            sigma_u_sq: 1.0,
        };
        let out = decode(&frame, &trellis, &interleaver, 1).unwrap();
        let oracle = brute_force_app(&code, &observations, 1.0, &vec![[0.5, 0.5]; 6]);
        for i in 0..6 {
            assert!(
                (out.app[i][0] - oracle[i][0]).abs() < 1e-9,
                "APP({i}) = {:?} vs {:?}",
                out.app[i],
                oracle[i]
            );
        }
    }

    #[test]
    fn decode_validates_inputs() {
        let trellis = Trellis::new(CODE_4_STATE).unwrap();
        let interleaver = Interleaver::from_permutation((0..4).collect()).unwrap();
        let frame = SoftFrame {
            obs: vec![obs(Complex64::new(0.0, 0.0), 1.0); 8],
            sigma_u_sq: 1.0,
        };
        assert!(decode(&frame, &trellis, &interleaver, 0).is_err());
        let short = SoftFrame {
            obs: vec![obs(Complex64::new(0.0, 0.0), 1.0); 6],
            sigma_u_sq: 1.0,
        };
        assert!(decode(&short, &trellis, &interleaver, 1).is_err());
    }

    proptest! {
        /// Scaling all observations by c^2 and the variance by c^4 leaves the
        /// branch metrics bitwise unchanged when c^2 is a power of two.
        #[test]
        fn power_of_two_scaling_leaves_gammas_bitwise_equal(
            seed in 0u64..200,
            scale_pow in -2i32..3,
        ) {
            let c2 = 4.0f64.powi(scale_pow);
            let mut chan = RngStream::new(seed, 0, StreamRole::Channel);
            let y = Complex64::new(chan.standard_normal(), chan.standard_normal());
            let f = chan.standard_normal().abs() + 0.1;
            let sigma = chan.standard_normal().abs() + 0.2;
            let base = gamma_table(&obs(y, f), sigma);
            let scaled = gamma_table(&obs(y * c2, f * c2), sigma * c2 * c2);
            for id in 0..4 {
                prop_assert_eq!(base[id].to_bits(), scaled[id].to_bits());
            }
        }
    }
}
