//! Shared backbone with one softmax head per attribute set.
//!
//! The input is a fixed feature vector. An optional ReLU hidden layer is
//! shared by all heads; head `i` maps it to `K_i` logits. Parameters live in
//! one flat vector: hidden weights, hidden biases, head weights, head biases.

use std::io::{Read, Write};

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::codec::{AttributeSchema, SchemaId};
use crate::error::{Error, Result};
use crate::matcher::{PredictionSet, SetPrediction};

const MAGIC: &[u8; 4] = b"HZAM";
const VERSION: u32 = 1;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `C = alpha * A·B + beta * C` for strided row-major views, with
/// `A: m×k`, `B: k×n`, `C: m×n`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
    rsc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    let last = |r: usize, c: usize, rs: usize, cs: usize| (r - 1) * rs + (c - 1) * cs;
    if k > 0 {
        assert!(last(m, k, rsa, csa) < a.len() && last(k, n, rsb, csb) < b.len());
    }
    assert!(last(m, n, rsc, 1) < c.len());
    // SAFETY: the asserts above keep every strided access inside the slices,
    // and `c` is borrowed mutably so it cannot alias `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            rsc as isize,
            1,
        );
    }
}

/// Scratch matrices for a mini-batch pass.
#[derive(Debug, Clone, Default)]
pub(crate) struct BatchWorkspace {
    x: Vec<f64>,
    pre: Vec<f64>,
    act: Vec<f64>,
    z: Vec<f64>,
    dact: Vec<f64>,
}

/// Multi-head attribute classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHeadModel {
    schema_id: SchemaId,
    input_dim: usize,
    hidden: usize,
    head_sizes: Vec<usize>,
    head_offsets: Vec<usize>,
    params: Vec<f64>,
}

/// Scratch buffers for one forward/backward pass.
#[derive(Debug, Clone, Default)]
pub(crate) struct Workspace {
    pre: Vec<f64>,
    act: Vec<f64>,
    logits: Vec<f64>,
    dz: Vec<f64>,
    dh: Vec<f64>,
}

impl MultiHeadModel {
    /// All-zero parameters for `schema`; `hidden == 0` means linear heads.
    pub fn zeros(schema: &AttributeSchema, input_dim: usize, hidden: usize) -> Self {
        let head_sizes: Vec<usize> = schema.sets().iter().map(|s| s.len()).collect();
        Self::with_heads(schema.id().clone(), input_dim, hidden, head_sizes)
    }

    pub(crate) fn with_heads(schema_id: SchemaId, input_dim: usize, hidden: usize, head_sizes: Vec<usize>) -> Self {
        let mut head_offsets = Vec::with_capacity(head_sizes.len() + 1);
        let mut acc = 0;
        for &k in &head_sizes {
            head_offsets.push(acc);
            acc += k;
        }
        head_offsets.push(acc);
        let d = if hidden == 0 { input_dim } else { hidden };
        let n = hidden * input_dim + hidden + acc * d + acc;
        MultiHeadModel {
            schema_id,
            input_dim,
            hidden,
            head_sizes,
            head_offsets,
            params: vec![0.0; n],
        }
    }

    /// Xavier-uniform weights (limit `sqrt(6 / (fan_in + fan_out))` per
    /// layer, per head for the output layer); zero biases.
    pub fn xavier(schema: &AttributeSchema, input_dim: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let mut m = Self::zeros(schema, input_dim, hidden);
        let (f, h) = (m.input_dim, m.hidden);
        if h > 0 {
            let r = (6.0 / (f + h) as f64).sqrt();
            for w in &mut m.params[..h * f] {
                *w = rng.gen_range(-r..=r);
            }
        }
        let d = m.head_input();
        let w2 = m.w2_offset();
        for i in 0..m.head_sizes.len() {
            let k = m.head_sizes[i];
            let r = (6.0 / (d + k) as f64).sqrt();
            let start = w2 + m.head_offsets[i] * d;
            for w in &mut m.params[start..start + k * d] {
                *w = rng.gen_range(-r..=r);
            }
        }
        m
    }

    pub fn schema_id(&self) -> &SchemaId {
        &self.schema_id
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn head_sizes(&self) -> &[usize] {
        &self.head_sizes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn head_input(&self) -> usize {
        if self.hidden == 0 {
            self.input_dim
        } else {
            self.hidden
        }
    }

    fn total_outputs(&self) -> usize {
        *self.head_offsets.last().unwrap()
    }

    fn b1_offset(&self) -> usize {
        self.hidden * self.input_dim
    }

    fn w2_offset(&self) -> usize {
        self.b1_offset() + self.hidden
    }

    fn b2_offset(&self) -> usize {
        self.w2_offset() + self.total_outputs() * self.head_input()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Fills `ws.act` (head input) and `ws.logits`.
    fn forward_ws(&self, x: &[f64], ws: &mut Workspace) {
        let (f, h) = (self.input_dim, self.hidden);
        ws.act.clear();
        if h > 0 {
            let w1 = &self.params[..h * f];
            let b1 = &self.params[self.b1_offset()..self.w2_offset()];
            ws.pre.clear();
            ws.pre.extend((0..h).map(|j| dot(&w1[j * f..(j + 1) * f], x) + b1[j]));
            ws.act.extend(ws.pre.iter().map(|&a| a.max(0.0)));
        } else {
            ws.act.extend_from_slice(x);
        }
        let d = self.head_input();
        let w2 = &self.params[self.w2_offset()..self.b2_offset()];
        let b2 = &self.params[self.b2_offset()..];
        let act = &ws.act;
        ws.logits.clear();
        ws.logits
            .extend((0..self.total_outputs()).map(|o| dot(&w2[o * d..(o + 1) * d], act) + b2[o]));
    }

    /// Raw logits of all heads, concatenated in schema order.
    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut ws = Workspace::default();
        self.forward_ws(x, &mut ws);
        Ok(ws.logits)
    }

    /// Per-head softmax probabilities.
    pub fn forward(&self, x: &[f64]) -> Result<PredictionSet> {
        let z = self.logits(x)?;
        Ok(PredictionSet::from_sets(
            self.head_sizes
                .iter()
                .enumerate()
                .map(|(i, _)| SetPrediction::Probs(softmax(&z[self.head_offsets[i]..self.head_offsets[i + 1]])))
                .collect(),
        ))
    }

    /// Adds the gradient of the summed cross-entropy at `(x, targets)` to
    /// `grad` and returns that loss. Inputs are assumed validated.
    pub(crate) fn accumulate_gradient(
        &self,
        x: &[f64],
        targets: &[usize],
        grad: &mut [f64],
        ws: &mut Workspace,
    ) -> f64 {
        self.forward_ws(x, ws);
        let mut loss = 0.0;
        ws.dz.clear();
        ws.dz.resize(self.total_outputs(), 0.0);
        for (i, &t) in targets.iter().enumerate() {
            let (s, e) = (self.head_offsets[i], self.head_offsets[i + 1]);
            let z = &ws.logits[s..e];
            let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = z.iter().map(|v| (v - max).exp()).sum();
            let log_sum = sum.ln();
            loss += log_sum - (z[t] - max);
            for (k, dz) in ws.dz[s..e].iter_mut().enumerate() {
                *dz = (z[k] - max - log_sum).exp();
            }
            ws.dz[s + t] -= 1.0;
        }
        let d = self.head_input();
        let (w2o, b2o) = (self.w2_offset(), self.b2_offset());
        let hidden = self.hidden;
        if hidden > 0 {
            ws.dh.clear();
            ws.dh.resize(d, 0.0);
        }
        {
            let (g_head, g_b2) = grad[w2o..].split_at_mut(b2o - w2o);
            let w2 = &self.params[w2o..b2o];
            for (o, &dz) in ws.dz.iter().enumerate() {
                if dz == 0.0 {
                    continue;
                }
                axpy(dz, &ws.act, &mut g_head[o * d..(o + 1) * d]);
                g_b2[o] += dz;
                if hidden > 0 {
                    axpy(dz, &w2[o * d..(o + 1) * d], &mut ws.dh);
                }
            }
        }
        if hidden > 0 {
            let f = self.input_dim;
            let b1o = self.b1_offset();
            for j in 0..hidden {
                if ws.pre[j] <= 0.0 {
                    continue;
                }
                let da = ws.dh[j];
                axpy(da, x, &mut grad[j * f..(j + 1) * f]);
                grad[b1o + j] += da;
            }
        }
        loss
    }

    /// Adds the summed gradient over a mini-batch to `grad`; returns the
    /// summed loss. Same result as [`Self::accumulate_gradient`] per sample,
    /// computed with matrix products.
    pub(crate) fn batch_gradient(
        &self,
        xs: &[&[f64]],
        targets: &[&[usize]],
        grad: &mut [f64],
        ws: &mut BatchWorkspace,
    ) -> f64 {
        let bsz = xs.len();
        let (f, h, d, o) = (self.input_dim, self.hidden, self.head_input(), self.total_outputs());
        let (b1o, w2o, b2o) = (self.b1_offset(), self.w2_offset(), self.b2_offset());
        ws.x.clear();
        for x in xs {
            ws.x.extend_from_slice(x);
        }
        if h > 0 {
            ws.pre.clear();
            ws.pre.resize(bsz * h, 0.0);
            gemm(
                bsz,
                f,
                h,
                1.0,
                &ws.x,
                (f, 1),
                &self.params[..h * f],
                (1, f),
                0.0,
                &mut ws.pre,
                h,
            );
            let b1 = &self.params[b1o..w2o];
            ws.act.clear();
            for row in ws.pre.chunks_mut(h) {
                for (v, b) in row.iter_mut().zip(b1) {
                    *v += b;
                }
                ws.act.extend(row.iter().map(|&v| v.max(0.0)));
            }
        }
        let act: &[f64] = if h > 0 { &ws.act } else { &ws.x };
        ws.z.clear();
        ws.z.resize(bsz * o, 0.0);
        gemm(
            bsz,
            d,
            o,
            1.0,
            act,
            (d, 1),
            &self.params[w2o..b2o],
            (1, d),
            0.0,
            &mut ws.z,
            o,
        );

        // Logits become dL/dz in place.
        let b2 = &self.params[b2o..];
        let mut loss = 0.0;
        for (row, t) in ws.z.chunks_mut(o).zip(targets) {
            for (v, b) in row.iter_mut().zip(b2) {
                *v += b;
            }
            for (i, &ti) in t.iter().enumerate() {
                let z = &mut row[self.head_offsets[i]..self.head_offsets[i + 1]];
                let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = z.iter().map(|v| (v - max).exp()).sum();
                let log_sum = sum.ln();
                loss += log_sum - (z[ti] - max);
                for v in z.iter_mut() {
                    *v = (*v - max - log_sum).exp();
                }
                z[ti] -= 1.0;
            }
        }
        let dz = &ws.z;
        {
            let (g_w2, g_b2) = grad[w2o..].split_at_mut(b2o - w2o);
            gemm(o, bsz, d, 1.0, dz, (1, o), act, (d, 1), 1.0, g_w2, d);
            for row in dz.chunks(o) {
                for (g, v) in g_b2.iter_mut().zip(row) {
                    *g += v;
                }
            }
        }
        if h > 0 {
            ws.dact.clear();
            ws.dact.resize(bsz * h, 0.0);
            gemm(
                bsz,
                o,
                h,
                1.0,
                dz,
                (o, 1),
                &self.params[w2o..b2o],
                (h, 1),
                0.0,
                &mut ws.dact,
                h,
            );
            for (da, &p) in ws.dact.iter_mut().zip(&ws.pre) {
                if p <= 0.0 {
                    *da = 0.0;
                }
            }
            let (g_w1, rest) = grad.split_at_mut(b1o);
            gemm(h, bsz, f, 1.0, &ws.dact, (1, h), &ws.x, (f, 1), 1.0, g_w1, f);
            for row in ws.dact.chunks(h) {
                for (g, v) in rest[..h].iter_mut().zip(row) {
                    *g += v;
                }
            }
        }
        loss
    }

    /// Loss and gradient of the summed cross-entropy for one sample.
    pub fn loss_and_gradient(&self, x: &[f64], targets: &[usize]) -> Result<(f64, Vec<f64>)> {
        self.check_input(x)?;
        self.check_targets(targets)?;
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.accumulate_gradient(x, targets, &mut grad, &mut Workspace::default());
        Ok((loss, grad))
    }

    pub(crate) fn check_targets(&self, targets: &[usize]) -> Result<()> {
        if targets.len() != self.head_sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.head_sizes.len(),
                actual: targets.len(),
            });
        }
        for (i, (&t, &k)) in targets.iter().zip(&self.head_sizes).enumerate() {
            if t >= k {
                return Err(Error::InvalidParameter(format!(
                    "target {t} out of range for head {i} of size {k}"
                )));
            }
        }
        Ok(())
    }

    /// Serialized model: header then little-endian f64 parameters.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + self.params.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.schema_id.len() as u32).to_le_bytes());
        out.extend_from_slice(self.schema_id.as_bytes());
        out.extend_from_slice(&(self.input_dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.hidden as u32).to_le_bytes());
        out.extend_from_slice(&(self.head_sizes.len() as u32).to_le_bytes());
        for &k in &self.head_sizes {
            out.extend_from_slice(&(k as u32).to_le_bytes());
        }
        out.extend_from_slice(&(self.params.len() as u64).to_le_bytes());
        for p in &self.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::format("model file", 0, m.to_string());
        let mut r = bytes;
        let mut take = |n: usize| -> Result<&[u8]> {
            if r.len() < n {
                return Err(bad("truncated"));
            }
            let (a, b) = r.split_at(n);
            r = b;
            Ok(a)
        };
        if take(4)? != MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap()) as usize;
        let version = u32_at(take(4)?);
        if version != VERSION as usize {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let id_len = u32_at(take(4)?);
        let id = std::str::from_utf8(take(id_len)?).map_err(|_| bad("schema id not UTF-8"))?;
        let schema_id: SchemaId = id.into();
        let input_dim = u32_at(take(4)?);
        let hidden = u32_at(take(4)?);
        let heads = u32_at(take(4)?);
        let mut head_sizes = Vec::with_capacity(heads);
        for _ in 0..heads {
            head_sizes.push(u32_at(take(4)?));
        }
        if head_sizes.contains(&0) {
            return Err(bad("empty head"));
        }
        let count = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        let mut m = Self::with_heads(schema_id, input_dim, hidden, head_sizes);
        if count != m.params.len() {
            return Err(bad("parameter count does not match header"));
        }
        for p in m.params.iter_mut() {
            *p = f64::from_le_bytes(take(8)?.try_into().unwrap());
            if !p.is_finite() {
                return Err(bad("non-finite parameter"));
            }
        }
        if !r.is_empty() {
            return Err(bad("trailing bytes"));
        }
        Ok(m)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    /// First 16 hex digits of the SHA-256 of the serialized model.
    pub fn checksum(&self) -> String {
        let digest = Sha256::digest(self.to_bytes());
        hex::encode(&digest[..8])
    }

    /// Fails unless the model was built for `schema`.
    pub fn check_schema(&self, schema: &AttributeSchema) -> Result<()> {
        if self.schema_id != *schema.id() {
            return Err(Error::SchemaMismatch {
                expected: schema.id().to_string(),
                actual: self.schema_id.to_string(),
            });
        }
        Ok(())
    }
}

/// Numerically stable softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Summed cross-entropy `−Σ ln p_i(target_i)` over all sets.
pub fn total_loss(preds: &PredictionSet, targets: &[usize]) -> Result<f64> {
    if preds.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            actual: preds.len(),
        });
    }
    let mut loss = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        let p = match preds.get(i) {
            Some(SetPrediction::Probs(p)) => p.get(t).copied(),
            Some(SetPrediction::Index(k)) => Some(if *k == t { 1.0 } else { 0.0 }),
            None => return Err(Error::MissingSet(i.to_string())),
        };
        let p = p.ok_or_else(|| Error::InvalidParameter(format!("target {t} out of range for set {i}")))?;
        loss -= p.ln();
    }
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{AttributeSet, Group};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_schema() -> AttributeSchema {
        let set = |name: &str, group, n: usize| AttributeSet {
            name: name.into(),
            group,
            alphabet: (0..n).map(|i| format!("v{i}")).collect(),
        };
        AttributeSchema::from_sets(vec![set("a", Group::Structure, 3), set("b", Group::Stroke, 4)]).unwrap()
    }

    #[test]
    fn zero_model_is_uniform() {
        let schema = AttributeSchema::default_schema();
        let m = MultiHeadModel::zeros(&schema, 16, 0);
        let p = m.forward(&[0.3; 16]).unwrap();
        let mut expected = 0.0;
        for (i, set) in schema.sets().iter().enumerate() {
            let Some(SetPrediction::Probs(v)) = p.get(i) else {
                panic!()
            };
            assert_eq!(v.len(), set.len());
            for &x in v {
                assert!((x - 1.0 / set.len() as f64).abs() < 1e-15);
            }
            expected += (set.len() as f64).ln();
        }
        let loss = total_loss(&p, &[0; 23]).unwrap();
        assert!((loss - expected).abs() < 1e-9);
    }

    #[test]
    fn softmax_shift_invariant() {
        let z = [0.3, -1.2, 2.5, 0.0];
        let shifted: Vec<f64> = z.iter().map(|v| v + 17.0).collect();
        for (a, b) in softmax(&z).iter().zip(softmax(&shifted)) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn certain_targets_have_zero_loss() {
        let p = PredictionSet::from_sets(vec![SetPrediction::Probs(vec![0.0, 1.0]), SetPrediction::Index(2)]);
        assert_eq!(total_loss(&p, &[1, 2]).unwrap(), 0.0);
        let missing = PredictionSet::with_len(2);
        assert!(total_loss(&missing, &[0, 0]).is_err());
    }

    #[allow(clippy::needless_range_loop)]
    fn check_gradient(hidden: usize) {
        let schema = toy_schema();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = MultiHeadModel::xavier(&schema, 6, hidden, &mut rng);
        for p in m.params_mut() {
            *p += rng.gen_range(-0.3..0.3);
        }
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = [2, 1];
        let (loss, grad) = m.loss_and_gradient(&x, &t).unwrap();
        let direct = total_loss(&m.forward(&x).unwrap(), &t).unwrap();
        assert!((loss - direct).abs() < 1e-12);
        let eps = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..m.params().len() {
            let mut plus = m.clone();
            plus.params_mut()[i] += eps;
            let mut minus = m.clone();
            minus.params_mut()[i] -= eps;
            let lp = total_loss(&plus.forward(&x).unwrap(), &t).unwrap();
            let lm = total_loss(&minus.forward(&x).unwrap(), &t).unwrap();
            let numeric = (lp - lm) / (2.0 * eps);
            let rel = (numeric - grad[i]).abs() / numeric.abs().max(grad[i].abs()).max(1e-8);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-4, "max relative error {worst}");
    }

    #[test]
    fn gradient_matches_central_differences_linear() {
        check_gradient(0);
    }

    #[test]
    fn gradient_matches_central_differences_hidden() {
        check_gradient(5);
    }

    #[test]
    fn batch_gradient_matches_per_sample_sum() {
        for hidden in [0, 4] {
            let schema = toy_schema();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut m = MultiHeadModel::xavier(&schema, 6, hidden, &mut rng);
            for p in m.params_mut() {
                *p += rng.gen_range(-0.3..0.3);
            }
            let xs: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let ts: Vec<Vec<usize>> = (0..5).map(|i| vec![i % 3, (i * 3) % 4]).collect();
            let mut expected = vec![0.0; m.params().len()];
            let mut expected_loss = 0.0;
            for (x, t) in xs.iter().zip(&ts) {
                let (l, g) = m.loss_and_gradient(x, t).unwrap();
                expected_loss += l;
                for (e, v) in expected.iter_mut().zip(g) {
                    *e += v;
                }
            }
            let mut grad = vec![0.0; m.params().len()];
            let xr: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
            let tr: Vec<&[usize]> = ts.iter().map(Vec::as_slice).collect();
            let loss = m.batch_gradient(&xr, &tr, &mut grad, &mut BatchWorkspace::default());
            assert!((loss - expected_loss).abs() < 1e-9);
            for (a, b) in grad.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-9, "hidden {hidden}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let schema = toy_schema();
        let m = MultiHeadModel::xavier(&schema, 6, 3, &mut ChaCha8Rng::seed_from_u64(1));
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..4], b"HZAM");
        let back = MultiHeadModel::from_bytes(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.checksum(), m.checksum());
        assert!(MultiHeadModel::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(MultiHeadModel::from_bytes(&extra).is_err());
    }

    #[test]
    fn xavier_within_limits() {
        let schema = toy_schema();
        let m = MultiHeadModel::xavier(&schema, 10, 4, &mut ChaCha8Rng::seed_from_u64(2));
        let r1 = (6.0f64 / 14.0).sqrt();
        assert!(m.params()[..40].iter().all(|w| w.abs() <= r1));
        assert!(m.params()[40..44].iter().all(|&b| b == 0.0));
        assert!(m.params()[44..].iter().any(|&w| w != 0.0));
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..21).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..21).map(|i| 1.0 - i as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-9);
    }
}
