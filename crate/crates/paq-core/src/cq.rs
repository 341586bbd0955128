//! Classical-quantum states, wiretap channels, codebooks, and the channels
//! that act on them: hashing `R^h`, the perfectly randomizing channel, i.i.d.
//! extension, and Stinespring dilation.
//!
//! A c-q state `Σ_x p(x)|x⟩⟨x| ⊗ ρ_E^x` is stored as a labeled block list and
//! never expanded to the full `|X|·d_E` matrix unless explicitly requested;
//! all distance computations factor per block.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::AffineHash;
use crate::operator::{
    partial_trace, tensor, trace_norm_raw, CMat, DensityOperator, HermitianOperator, MatrixJson,
};
use crate::tolerances;

/// A classical-quantum state: distribution `p` over `{0,…,|X|−1}` plus one
/// side-information state per symbol, all of common dimension `d_E`.
///
/// Symbols with `p(x) = 0` may carry a designated zero block instead of a
/// density operator; such symbols never contribute to any quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "CQStateJson", into = "CQStateJson")]
pub struct CQState {
    p: Vec<f64>,
    rhos: Vec<HermitianOperator>,
    dim_e: usize,
}

/// JSON schema: `{"p": [...], "rhos": [matrix, ...]}` with the row-major
/// matrix encoding from the operator module.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CQStateJson {
    pub p: Vec<f64>,
    pub rhos: Vec<MatrixJson>,
}

impl TryFrom<CQStateJson> for CQState {
    type Error = Error;
    fn try_from(j: CQStateJson) -> Result<Self> {
        let rhos = j
            .rhos
            .iter()
            .map(|m| HermitianOperator::new(m.to_matrix()?))
            .collect::<Result<Vec<_>>>()?;
        CQState::new(j.p, rhos)
    }
}

impl From<CQState> for CQStateJson {
    fn from(s: CQState) -> CQStateJson {
        CQStateJson {
            p: s.p.clone(),
            rhos: s.rhos.iter().map(|r| MatrixJson::from_matrix(r.matrix())).collect(),
        }
    }
}

impl CQState {
    pub fn new(p: Vec<f64>, rhos: Vec<HermitianOperator>) -> Result<Self> {
        if p.is_empty() || p.len() != rhos.len() {
            return Err(Error::validation(format!(
                "c-q state needs one block per symbol: |p| = {}, |rhos| = {}",
                p.len(),
                rhos.len()
            )));
        }
        if p.iter().any(|&x| x < 0.0) {
            return Err(Error::validation("probabilities must be nonnegative"));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tolerances::PROB_SUM {
            return Err(Error::validation(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        let dim_e = rhos[0].dim();
        for (x, rho) in rhos.iter().enumerate() {
            if rho.dim() != dim_e {
                return Err(Error::validation(format!(
                    "block {x} has dim {} but block 0 has dim {dim_e}",
                    rho.dim()
                )));
            }
            if p[x] > 0.0 {
                DensityOperator::new(rho.clone()).map_err(|e| {
                    Error::validation(format!("block {x} (p = {}): {e}", p[x]))
                })?;
            } else if !rho.is_zero() {
                // zero-probability padding may carry either the designated
                // zero block or a genuine state
                DensityOperator::new(rho.clone()).map_err(|e| {
                    Error::validation(format!("zero-probability block {x}: {e}"))
                })?;
            }
        }
        Ok(CQState { p, rhos, dim_e })
    }

    /// Purely classical source: trivial side information (`d_E = 1`).
    pub fn classical(p: Vec<f64>) -> Result<Self> {
        let rhos = vec![HermitianOperator::from_diagonal(&[1.0]); p.len()];
        CQState::new(p, rhos)
    }

    pub fn alphabet_size(&self) -> usize {
        self.p.len()
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.p[x]
    }

    pub fn rho(&self, x: usize) -> &HermitianOperator {
        &self.rhos[x]
    }

    /// The weighted block `p(x)·ρ_E^x` as a raw matrix.
    pub fn weighted_block(&self, x: usize) -> CMat {
        self.rhos[x].matrix() * Complex64::new(self.p[x], 0.0)
    }

    /// All weighted blocks, i.e. the block-diagonal form of the state itself.
    pub fn to_blocks(&self) -> BlockDiagonal {
        BlockDiagonal {
            blocks: (0..self.alphabet_size()).map(|x| self.weighted_block(x)).collect(),
        }
    }

    /// The state as one dense `|X|·d_E` matrix.
    pub fn to_dense(&self) -> DensityOperator {
        DensityOperator::new(self.to_blocks().to_dense())
            .expect("block-diagonal c-q state is a density operator")
    }

    /// Symbols with positive probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alphabet_size()).filter(|&x| self.p[x] > 0.0)
    }
}

/// A block-diagonal Hermitian operator `⊕_z A_z` with equal-sized blocks.
#[derive(Debug, Clone)]
pub struct BlockDiagonal {
    pub blocks: Vec<CMat>,
}

impl BlockDiagonal {
    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace().re).sum()
    }

    /// Schatten-1 norm, computed per block.
    pub fn trace_norm(&self) -> f64 {
        self.blocks.iter().map(trace_norm_raw).sum()
    }

    /// `½‖self − other‖₁`, block by block.
    pub fn trace_distance(&self, other: &BlockDiagonal) -> Result<f64> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::validation(format!(
                "block count mismatch: {} vs {}",
                self.blocks.len(),
                other.blocks.len()
            )));
        }
        let mut acc = 0.0;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            if a.nrows() != b.nrows() {
                return Err(Error::validation("block dimension mismatch"));
            }
            acc += trace_norm_raw(&(a - b));
        }
        Ok(0.5 * acc)
    }

    /// Expands to the dense direct-sum matrix.
    pub fn to_dense(&self) -> HermitianOperator {
        let d = self.blocks.first().map_or(0, |b| b.nrows());
        let n = self.blocks.len() * d;
        let mut m = CMat::zeros(n, n);
        for (z, b) in self.blocks.iter().enumerate() {
            m.view_mut((z * d, z * d), (d, d)).copy_from(b);
        }
        HermitianOperator::from_hermitian_parts(m)
    }
}

/// `ρ_E = Σ_x p(x) ρ_E^x`.
pub fn marginal_e(s: &CQState) -> DensityOperator {
    let mut acc = CMat::zeros(s.dim_e(), s.dim_e());
    for x in s.support() {
        acc += s.weighted_block(x);
    }
    DensityOperator::new(HermitianOperator::from_hermitian_parts(acc))
        .expect("marginal of a valid c-q state is a density operator")
}

/// `n`-fold i.i.d. extension with the alphabet `X^n` in lexicographic order
/// (first copy most significant).
pub fn iid_extend(s: &CQState, n: u32) -> Result<CQState> {
    if n == 0 {
        return Err(Error::validation("iid_extend needs n ≥ 1"));
    }
    let size = (s.alphabet_size() as f64).powi(n as i32) * (s.dim_e() as f64).powi(n as i32);
    if size > tolerances::IID_CAPACITY as f64 {
        return Err(Error::capacity(format!(
            "iid_extend: |X|^n · d_E^n = {size} exceeds limit {}",
            tolerances::IID_CAPACITY
        )));
    }
    if n == 1 {
        return Ok(s.clone());
    }
    let base = s.alphabet_size();
    let count = base.pow(n);
    let mut p = Vec::with_capacity(count);
    let mut rhos = Vec::with_capacity(count);
    for idx in 0..count {
        // decode lexicographic index into symbols, first copy most significant
        let mut digits = vec![0usize; n as usize];
        let mut rem = idx;
        for slot in (0..n as usize).rev() {
            digits[slot] = rem % base;
            rem /= base;
        }
        let prob: f64 = digits.iter().map(|&x| s.prob(x)).product();
        let mut rho = s.rho(digits[0]).clone();
        for &x in &digits[1..] {
            rho = tensor(&rho, s.rho(x));
        }
        p.push(prob);
        rhos.push(rho);
    }
    CQState::new(p, rhos)
}

/// The hashing channel `R^h`: relabels classical symbols through `h` and
/// merges blocks with equal image. Empty preimages carry probability 0 and
/// the designated zero block.
pub fn apply_hash(s: &CQState, h: &AffineHash) -> Result<CQState> {
    let expected = h.ctx.order();
    if s.alphabet_size() as u64 != expected {
        return Err(Error::validation(format!(
            "hash input width 2^{} = {expected} does not match alphabet size {}",
            h.ctx.u(),
            s.alphabet_size()
        )));
    }
    let blocks = hashed_weighted_blocks(s, h);
    let mut p = Vec::with_capacity(blocks.len());
    let mut rhos = Vec::with_capacity(blocks.len());
    for block in blocks {
        let mass = block.trace().re;
        if mass > 0.0 {
            p.push(mass);
            rhos.push(HermitianOperator::from_hermitian_parts(
                &block * Complex64::new(1.0 / mass, 0.0),
            ));
        } else {
            p.push(0.0);
            rhos.push(HermitianOperator::zeros(s.dim_e()));
        }
    }
    // renormalize away accumulated rounding; exact inputs stay exact
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > tolerances::PROB_SUM {
        return Err(Error::validation(format!(
            "hashing lost probability mass: total {total}"
        )));
    }
    CQState::new(p, rhos)
}

/// The weighted output blocks `Σ_{x ∈ h^{-1}(z)} p(x) ρ_E^x` for each `z`.
pub fn hashed_weighted_blocks(s: &CQState, h: &AffineHash) -> Vec<CMat> {
    let zsize = h.output_size() as usize;
    let d = s.dim_e();
    let mut blocks = vec![CMat::zeros(d, d); zsize];
    for x in s.support() {
        let z = h.eval_unchecked(x as u64) as usize;
        blocks[z] += s.weighted_block(x);
    }
    blocks
}

/// The perfectly randomizing channel's output `(1_Z/|Z|) ⊗ ρ_E` as a
/// block-diagonal operator over `z`.
pub fn randomized_target(s: &CQState, zsize: usize) -> Result<BlockDiagonal> {
    if zsize == 0 {
        return Err(Error::validation("randomized_target needs zsize ≥ 1"));
    }
    let rho_e = marginal_e(s);
    let block = rho_e.matrix() * Complex64::new(1.0 / zsize as f64, 0.0);
    Ok(BlockDiagonal {
        blocks: vec![block; zsize],
    })
}

/// A classical-quantum wiretap channel `x ↦ σ_BE^x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "WiretapChannelJson", into = "WiretapChannelJson")]
pub struct WiretapChannel {
    d_b: usize,
    d_e: usize,
    outputs: Vec<DensityOperator>,
}

/// JSON schema: `{"dB": int, "dE": int, "outputs": [matrix, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WiretapChannelJson {
    #[serde(rename = "dB")]
    pub d_b: usize,
    #[serde(rename = "dE")]
    pub d_e: usize,
    pub outputs: Vec<MatrixJson>,
}

impl TryFrom<WiretapChannelJson> for WiretapChannel {
    type Error = Error;
    fn try_from(j: WiretapChannelJson) -> Result<Self> {
        let outputs = j
            .outputs
            .iter()
            .map(|m| DensityOperator::from_matrix(m.to_matrix()?))
            .collect::<Result<Vec<_>>>()?;
        WiretapChannel::new(j.d_b, j.d_e, outputs)
    }
}

impl From<WiretapChannel> for WiretapChannelJson {
    fn from(c: WiretapChannel) -> WiretapChannelJson {
        WiretapChannelJson {
            d_b: c.d_b,
            d_e: c.d_e,
            outputs: c
                .outputs
                .iter()
                .map(|o| MatrixJson::from_matrix(o.matrix()))
                .collect(),
        }
    }
}

impl WiretapChannel {
    pub fn new(d_b: usize, d_e: usize, outputs: Vec<DensityOperator>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::validation("wiretap channel needs at least one output"));
        }
        for (x, out) in outputs.iter().enumerate() {
            if out.dim() != d_b * d_e {
                return Err(Error::validation(format!(
                    "output {x} has dim {}, expected d_B·d_E = {}",
                    out.dim(),
                    d_b * d_e
                )));
            }
        }
        Ok(WiretapChannel { d_b, d_e, outputs })
    }

    pub fn alphabet_size(&self) -> usize {
        self.outputs.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_b, self.d_e)
    }

    pub fn output(&self, x: usize) -> &DensityOperator {
        &self.outputs[x]
    }
}

/// Which subsystem of a `BE` output to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    B,
    E,
}

/// The c-q state `Σ_x p(x)|x⟩⟨x| ⊗ Tr_{B or E}[σ_BE^x]` induced by feeding a
/// prior through the channel and keeping one output subsystem.
pub fn induced_cq(channel: &WiretapChannel, p: &[f64], keep: Subsystem) -> Result<CQState> {
    if p.len() != channel.alphabet_size() {
        return Err(Error::validation(format!(
            "prior has {} entries but channel alphabet is {}",
            p.len(),
            channel.alphabet_size()
        )));
    }
    let (d_b, d_e) = channel.dims();
    let keep_idx: &[usize] = match keep {
        Subsystem::B => &[0],
        Subsystem::E => &[1],
    };
    let rhos = channel
        .outputs
        .iter()
        .map(|out| partial_trace(out.as_hermitian(), &[d_b, d_e], keep_idx))
        .collect::<Result<Vec<_>>>()?;
    CQState::new(p.to_vec(), rhos)
}

/// A channel in Kraus form, `ρ ↦ Σ_i K_i ρ K_i†`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<CMat>,
    d_in: usize,
    d_out: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::validation("Kraus set must be non-empty"));
        }
        let d_out = kraus[0].nrows();
        let d_in = kraus[0].ncols();
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != d_out || k.ncols() != d_in {
                return Err(Error::validation(format!(
                    "Kraus operator {i} has shape {}x{}, expected {d_out}x{d_in}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let mut sum = CMat::zeros(d_in, d_in);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let err = (&sum - CMat::identity(d_in, d_in)).norm();
        if err > tolerances::KRAUS_COMPLETENESS {
            return Err(Error::validation(format!(
                "Kraus completeness violated: ‖ΣK†K − 1‖ = {err:.3e}"
            )));
        }
        Ok(KrausChannel { kraus, d_in, d_out })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_in, self.d_out)
    }

    pub fn operators(&self) -> &[CMat] {
        &self.kraus
    }

    /// Kraus-sum action `Σ_i K_i ρ K_i†`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.d_in {
            return Err(Error::validation("channel input dimension mismatch"));
        }
        let mut acc = CMat::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            acc += k * rho.matrix() * k.adjoint();
        }
        DensityOperator::new(HermitianOperator::from_hermitian_parts(acc))
    }
}

/// A Stinespring dilation `V = Σ_i K_i ⊗ |i⟩_E` of a Kraus channel, with the
/// environment dimension equal to the number of Kraus operators.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    isometry: CMat,
    d_in: usize,
    d_b: usize,
    d_e: usize,
}

/// Builds the dilation isometry from a Kraus channel. `V†V = 1` follows from
/// Kraus completeness and is re-checked.
pub fn stinespring(ch: &KrausChannel) -> Result<StinespringDilation> {
    let (d_in, d_b) = ch.dims();
    let d_e = ch.operators().len();
    let mut v = CMat::zeros(d_b * d_e, d_in);
    for (i, k) in ch.operators().iter().enumerate() {
        for b in 0..d_b {
            for a in 0..d_in {
                v[(b * d_e + i, a)] = k[(b, a)];
            }
        }
    }
    let err = (v.adjoint() * &v - CMat::identity(d_in, d_in)).norm();
    if err > tolerances::KRAUS_COMPLETENESS {
        return Err(Error::validation(format!(
            "dilation is not an isometry: ‖V†V − 1‖ = {err:.3e}"
        )));
    }
    Ok(StinespringDilation {
        isometry: v,
        d_in,
        d_b,
        d_e,
    })
}

impl StinespringDilation {
    pub fn isometry(&self) -> &CMat {
        &self.isometry
    }

    /// `(d_B, d_E)` of the dilated output space.
    pub fn dims(&self) -> (usize, usize) {
        (self.d_b, self.d_e)
    }

    /// `V ρ V†` on the joint `BE` space.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.d_in {
            return Err(Error::validation("dilation input dimension mismatch"));
        }
        let out = &self.isometry * rho.matrix() * self.isometry.adjoint();
        DensityOperator::new(HermitianOperator::from_hermitian_parts(out))
    }

    /// Wiretap channel built by dilating a c-q encoding `x ↦ ρ_A^x`.
    pub fn to_wiretap(&self, inputs: &[DensityOperator]) -> Result<WiretapChannel> {
        let outputs = inputs
            .iter()
            .map(|rho| self.apply(rho))
            .collect::<Result<Vec<_>>>()?;
        WiretapChannel::new(self.d_b, self.d_e, outputs)
    }
}

/// A realized codebook `k ↦ x_k`.
#[derive(Debug, Clone)]
pub struct Codebook {
    entries: Vec<usize>,
    alphabet: usize,
}

impl Codebook {
    pub fn new(entries: Vec<usize>, alphabet: usize) -> Result<Self> {
        if entries.iter().any(|&x| x >= alphabet) {
            return Err(Error::validation("codebook entry indexes an invalid symbol"));
        }
        Ok(Codebook { entries, alphabet })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn entry(&self, k: usize) -> usize {
        self.entries[k]
    }
}

/// Eve's per-message states under a balanced hash: for each `m`,
/// `(1/L) Σ_{k ∈ h^{-1}(m)} σ_E^{x_k}`, plus the global average `σ_E^C`.
pub fn wiretap_joint_blocks(
    cb: &Codebook,
    h: &AffineHash,
    channel: &WiretapChannel,
) -> Result<(Vec<DensityOperator>, DensityOperator)> {
    if !h.is_balanced() {
        return Err(Error::domain(
            "wiretap_joint_blocks requires a balanced hash (a ≠ 0)",
        ));
    }
    let ml = h.ctx.order() as usize;
    if cb.len() != ml {
        return Err(Error::validation(format!(
            "codebook has {} entries, hash domain needs {ml}",
            cb.len()
        )));
    }
    if cb.alphabet_size() != channel.alphabet_size() {
        return Err(Error::validation("codebook and channel alphabets differ"));
    }
    let (d_b, d_e) = channel.dims();
    let big_m = h.output_size() as usize;
    let big_l = ml / big_m;
    let eve_states: Vec<HermitianOperator> = (0..channel.alphabet_size())
        .map(|x| partial_trace(channel.output(x).as_hermitian(), &[d_b, d_e], &[1]))
        .collect::<Result<Vec<_>>>()?;

    let mut per_message = vec![CMat::zeros(d_e, d_e); big_m];
    let mut global = CMat::zeros(d_e, d_e);
    for k in 0..ml {
        let m = h.eval_unchecked(k as u64) as usize;
        let sigma = eve_states[cb.entry(k)].matrix();
        per_message[m] += sigma;
        global += sigma;
    }
    let per_message = per_message
        .into_iter()
        .map(|acc| {
            DensityOperator::new(HermitianOperator::from_hermitian_parts(
                acc * Complex64::new(1.0 / big_l as f64, 0.0),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let global = DensityOperator::new(HermitianOperator::from_hermitian_parts(
        global * Complex64::new(1.0 / ml as f64, 0.0),
    ))?;
    Ok((per_message, global))
}
