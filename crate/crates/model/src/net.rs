use std::collections::HashMap;

use tensor_core::{Graph, NodeId, Rng, Scalar, Tensor};

use crate::config::{AdapterPlacement, ModelConfig, LN_EPS, LOG_SIGMA_CLAMP};
use crate::entropy::LatentGaussian;
use crate::error::ModelError;
use crate::params::ParamStore;

/// Which parameter groups receive gradients.
///
/// `WarmUp` is the reconstruction-only phase that gives the backbone
/// non-degenerate features; `Adapters` is the main phase where the
/// backbone is frozen and only adapters, encoders, decoder and
/// classifier move; `Inference` freezes everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainPhase {
    WarmUp,
    Adapters,
    Inference,
}

impl TrainPhase {
    pub fn trainable(self, name: &str) -> bool {
        match self {
            TrainPhase::WarmUp => {
                name.starts_with("backbone.")
                    || name.starts_with("enc_")
                    || name.starts_with("dec.")
            }
            TrainPhase::Adapters => {
                name.starts_with("adapter.")
                    || name.starts_with("enc_")
                    || name.starts_with("dec.")
                    || name.starts_with("cls.")
            }
            TrainPhase::Inference => false,
        }
    }
}

/// Parameter tensors materialized as graph leaves for one forward pass.
#[derive(Debug)]
pub struct Mounted {
    ids: HashMap<String, NodeId>,
}

impl Mounted {
    pub fn id(&self, name: &str) -> Result<NodeId, ModelError> {
        self.ids
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::MissingParam { name: name.into() })
    }

    /// Points a known parameter name at a different graph node. Used by
    /// gradient probes that need selected parameters as checkable leaves.
    pub fn set(&mut self, name: &str, id: NodeId) -> Result<(), ModelError> {
        match self.ids.get_mut(name) {
            Some(slot) => {
                *slot = id;
                Ok(())
            }
            None => Err(ModelError::MissingParam { name: name.into() }),
        }
    }
}

/// Output of an inference-only pass over one clip.
#[derive(Debug, Clone)]
pub struct Inference<F: Scalar> {
    /// Raw classifier outputs, bonafide then spoof.
    pub logits: [F; 2],
    pub latent: LatentGaussian<F>,
}

// ---------------------------------------------------------------------------

struct Init<'a, F: Scalar> {
    store: ParamStore<F>,
    root: &'a Rng,
    slot: u64,
}

impl<'a, F: Scalar> Init<'a, F> {
    fn stream(&mut self) -> Rng {
        let r = self.root.split(self.slot);
        self.slot += 1;
        r
    }

    fn randn(&mut self, name: &str, shape: &[usize], fan_in: usize) -> Result<(), ModelError> {
        let mut r = self.stream();
        let std = (fan_in as f64).sqrt().recip();
        self.store
            .insert(name, Tensor::randn_scaled(&mut r, shape, std))
    }

    fn zeros(&mut self, name: &str, shape: &[usize]) -> Result<(), ModelError> {
        self.stream();
        self.store.insert(name, Tensor::zeros(shape))
    }

    fn ones(&mut self, name: &str, shape: &[usize]) -> Result<(), ModelError> {
        self.stream();
        self.store.insert(name, Tensor::full(shape, F::one()))
    }
}

/// The full detector: frozen-able backbone with adapters, mean and
/// variance encoders, upsampling decoder and entropy classifier.
#[derive(Debug, Clone)]
pub struct Model<F: Scalar> {
    pub cfg: ModelConfig,
    pub params: ParamStore<F>,
}

impl<F: Scalar> Model<F> {
    pub fn init(cfg: ModelConfig, rng: &Rng) -> Result<Self, ModelError> {
        cfg.validate()?;
        let mut b = Init {
            store: ParamStore::new(),
            root: rng,
            slot: 0,
        };
        let d = cfg.width;

        b.randn(
            "backbone.frontend.w",
            &[d, cfg.frontend_kernel],
            cfg.frontend_kernel,
        )?;
        b.zeros("backbone.frontend.b", &[d])?;
        for blk in 0..cfg.layers {
            let p = format!("backbone.block{blk}");
            for head in ["wq", "wk", "wv", "wo"] {
                b.randn(&format!("{p}.attn.{head}"), &[d, d], d)?;
            }
            for bias in ["bq", "bk", "bv", "bo"] {
                b.zeros(&format!("{p}.attn.{bias}"), &[d])?;
            }
            b.ones(&format!("{p}.ln1.gamma"), &[d])?;
            b.zeros(&format!("{p}.ln1.beta"), &[d])?;
            b.randn(&format!("{p}.ffn.w1"), &[d, cfg.ffn_width], d)?;
            b.zeros(&format!("{p}.ffn.b1"), &[cfg.ffn_width])?;
            b.randn(&format!("{p}.ffn.w2"), &[cfg.ffn_width, d], cfg.ffn_width)?;
            b.zeros(&format!("{p}.ffn.b2"), &[d])?;
            b.ones(&format!("{p}.ln2.gamma"), &[d])?;
            b.zeros(&format!("{p}.ln2.beta"), &[d])?;

            let a = format!("adapter.block{blk}");
            b.randn(&format!("{a}.down.w"), &[d, cfg.adapter_dim], d)?;
            b.zeros(&format!("{a}.down.b"), &[cfg.adapter_dim])?;
            b.zeros(&format!("{a}.up.w"), &[cfg.adapter_dim, d])?;
            b.zeros(&format!("{a}.up.b"), &[d])?;
        }
        for enc in ["enc_mu", "enc_ls"] {
            let h = cfg.encoder_hidden;
            b.randn(&format!("{enc}.c1.w"), &[h, d * 3], d * 3)?;
            b.zeros(&format!("{enc}.c1.b"), &[h])?;
            b.randn(&format!("{enc}.c2.w"), &[cfg.latent_dim, h * 3], h * 3)?;
            b.zeros(&format!("{enc}.c2.b"), &[cfg.latent_dim])?;
        }
        let chain = cfg.decoder_channels();
        for (s, &rate) in cfg.decoder_rates.iter().enumerate() {
            let (c_in, c_out) = (chain[s], chain[s + 1]);
            let kernel = 2 * rate;
            b.randn(
                &format!("dec.s{s}.w"),
                &[c_in, c_out * kernel],
                c_in * kernel,
            )?;
            b.zeros(&format!("dec.s{s}.b"), &[c_out])?;
        }
        let c = cfg.frames();
        b.randn("cls.fc1.w", &[c, cfg.classifier_hidden], c)?;
        b.zeros("cls.fc1.b", &[cfg.classifier_hidden])?;
        b.randn(
            "cls.fc2.w",
            &[cfg.classifier_hidden, 2],
            cfg.classifier_hidden,
        )?;
        b.zeros("cls.fc2.b", &[2])?;

        Ok(Model {
            cfg,
            params: b.store,
        })
    }

    /// Copies every parameter into `g` as a leaf; the phase decides
    /// which leaves ask for gradients.
    pub fn mount(&self, g: &mut Graph<F>, phase: TrainPhase) -> Result<Mounted, ModelError> {
        let mut ids = HashMap::with_capacity(self.params.len());
        for (name, t) in self.params.iter() {
            let id = g.leaf(t.clone(), phase.trainable(name))?;
            ids.insert(name.to_string(), id);
        }
        Ok(Mounted { ids })
    }

    // -- Backbone -----------------------------------------------------------

    /// Frontend convolution plus the encoder blocks, `[1, clip]` in,
    /// `[C, D]` out.
    pub fn backbone_forward(
        &self,
        g: &mut Graph<F>,
        m: &Mounted,
        wave: NodeId,
    ) -> Result<NodeId, ModelError> {
        let shape = &g.value(wave).shape;
        if *shape != vec![1, self.cfg.clip_samples] {
            return Err(ModelError::Shape {
                op: "backbone_forward",
                detail: format!(
                    "waveform shape {:?}, need [1, {}]",
                    shape, self.cfg.clip_samples
                ),
            });
        }
        let fw = m.id("backbone.frontend.w")?;
        let fb = m.id("backbone.frontend.b")?;
        let f = g.conv1d(wave, fw, self.cfg.frontend_kernel, self.cfg.frontend_stride)?;
        let ft = g.transpose(f)?;
        let fbias = g.add_row(ft, fb)?;
        let mut x = g.gelu(fbias)?;

        let eps = F::of(LN_EPS);
        for blk in 0..self.cfg.layers {
            let p = format!("backbone.block{blk}");
            let q = self.proj(g, m, &p, "q", x)?;
            let k = self.proj(g, m, &p, "k", x)?;
            let v = self.proj(g, m, &p, "v", x)?;
            let at = g.attention(q, k, v)?;
            let wo = m.id(&format!("{p}.attn.wo"))?;
            let bo = m.id(&format!("{p}.attn.bo"))?;
            let o = g.linear(at, wo, bo)?;
            let mut r1 = g.add(x, o)?;
            if self.cfg.adapter_placement == AdapterPlacement::PostAttention {
                r1 = self.adapter_forward(g, m, blk, r1)?;
            }
            let g1 = m.id(&format!("{p}.ln1.gamma"))?;
            let b1 = m.id(&format!("{p}.ln1.beta"))?;
            let h1 = g.layer_norm(r1, g1, b1, eps)?;

            let w1 = m.id(&format!("{p}.ffn.w1"))?;
            let fb1 = m.id(&format!("{p}.ffn.b1"))?;
            let w2 = m.id(&format!("{p}.ffn.w2"))?;
            let fb2 = m.id(&format!("{p}.ffn.b2"))?;
            let f1 = g.linear(h1, w1, fb1)?;
            let fa = g.gelu(f1)?;
            let f2 = g.linear(fa, w2, fb2)?;
            let mut r2 = g.add(h1, f2)?;
            if self.cfg.adapter_placement == AdapterPlacement::PostFfn {
                r2 = self.adapter_forward(g, m, blk, r2)?;
            }
            let g2 = m.id(&format!("{p}.ln2.gamma"))?;
            let b2 = m.id(&format!("{p}.ln2.beta"))?;
            x = g.layer_norm(r2, g2, b2, eps)?;
        }
        Ok(x)
    }

    fn proj(
        &self,
        g: &mut Graph<F>,
        m: &Mounted,
        block: &str,
        which: &str,
        x: NodeId,
    ) -> Result<NodeId, ModelError> {
        let w = m.id(&format!("{block}.attn.w{which}"))?;
        let b = m.id(&format!("{block}.attn.b{which}"))?;
        Ok(g.linear(x, w, b)?)
    }

    /// Residual bottleneck: x + up(act(down(x))). The up projection is
    /// zero at init, so a fresh adapter is an exact identity.
    pub fn adapter_forward(
        &self,
        g: &mut Graph<F>,
        m: &Mounted,
        block: usize,
        x: NodeId,
    ) -> Result<NodeId, ModelError> {
        let p = format!("adapter.block{block}");
        let dw = m.id(&format!("{p}.down.w"))?;
        let db = m.id(&format!("{p}.down.b"))?;
        let uw = m.id(&format!("{p}.up.w"))?;
        let ub = m.id(&format!("{p}.up.b"))?;
        let down = g.linear(x, dw, db)?;
        let a = g.gelu(down)?;
        let up = g.linear(a, uw, ub)?;
        Ok(g.add(x, up)?)
    }

    // -- Variational head ---------------------------------------------------

    /// Mean and variance encoders over the feature sequence: `[C, D]` in,
    /// a `(mu, log_sigma)` pair of `[C, K]` nodes out. `log_sigma` is
    /// clamped.
    pub fn encode(
        &self,
        g: &mut Graph<F>,
        m: &Mounted,
        x: NodeId,
    ) -> Result<(NodeId, NodeId), ModelError> {
        let mu = self.encode_branch(g, m, "enc_mu", x)?;
        let raw = self.encode_branch(g, m, "enc_ls", x)?;
        let c = F::of(LOG_SIGMA_CLAMP);
        let log_sigma = g.clamp(raw, -c, c)?;
        Ok((mu, log_sigma))
    }

    fn encode_branch(
        &self,
        g: &mut Graph<F>,
        m: &Mounted,
        prefix: &str,
        x: NodeId,
    ) -> Result<NodeId, ModelError> {
        let xt = g.transpose(x)?;
        let h = self.conv_block(g, m, &format!("{prefix}.c1"), xt)?;
        let ha = g.gelu(h)?;
        let ht = g.transpose(ha)?;
        self.conv_block(g, m, &format!("{prefix}.c2"), ht)
    }

    /// Padded width-3 convolution over `[C_in, T]`, returned as `[T, C_out]`
    /// with bias applied.
    fn conv_block(
        &self,
        g: &mut Graph<F>,
        m: &Mounted,
        prefix: &str,
        x: NodeId,
    ) -> Result<NodeId, ModelError> {
        let w = m.id(&format!("{prefix}.w"))?;
        let b = m.id(&format!("{prefix}.b"))?;
        let p = g.zero_pad1d(x, 1, 1)?;
        let y = g.conv1d(p, w, 3, 1)?;
        let yt = g.transpose(y)?;
        Ok(g.add_row(yt, b)?)
    }

    // -- Decoder ------------------------------------------------------------

    /// Transposed-conv upsampling stack: `[C, K]` in, `[C * stride]` out.
    pub fn decode(&self, g: &mut Graph<F>, m: &Mounted, z: NodeId) -> Result<NodeId, ModelError> {
        let mut x = g.transpose(z)?;
        let last = self.cfg.decoder_rates.len() - 1;
        for (s, &rate) in self.cfg.decoder_rates.iter().enumerate() {
            let w = m.id(&format!("dec.s{s}.w"))?;
            let b = m.id(&format!("dec.s{s}.b"))?;
            let y = g.tconv1d(x, w, rate)?;
            let yt = g.transpose(y)?;
            let yb = g.add_row(yt, b)?;
            let act = if s == last { g.tanh(yb)? } else { g.gelu(yb)? };
            x = g.transpose(act)?;
        }
        let len = g.value(x).shape[1];
        Ok(g.reshape(x, &[len])?)
    }

    // -- Classifier ---------------------------------------------------------

    /// Two FC layers over the mean-subtracted entropy sequence. The input
    /// must hold exactly one entropy value per latent frame.
    pub fn classify(&self, g: &mut Graph<F>, m: &Mounted, h: NodeId) -> Result<NodeId, ModelError> {
        let shape = &g.value(h).shape;
        let c = self.cfg.frames();
        if *shape != vec![c] {
            return Err(ModelError::Shape {
                op: "classify",
                detail: format!("entropy sequence shape {shape:?}, need [{c}]"),
            });
        }
        let mean = g.mean_all(h)?;
        let centered = g.sub_scalar(h, mean)?;
        let row = g.reshape(centered, &[1, c])?;
        let w1 = m.id("cls.fc1.w")?;
        let b1 = m.id("cls.fc1.b")?;
        let w2 = m.id("cls.fc2.w")?;
        let b2 = m.id("cls.fc2.b")?;
        let z1 = g.linear(row, w1, b1)?;
        let a = g.gelu(z1)?;
        Ok(g.linear(a, w2, b2)?)
    }

    // -- Whole-clip inference -----------------------------------------------

    /// Builds a gradient-free graph over one standardized clip and
    /// returns logits plus the latent posterior.
    pub fn infer(&self, samples: &[F]) -> Result<Inference<F>, ModelError> {
        if samples.len() != self.cfg.clip_samples {
            return Err(ModelError::Shape {
                op: "infer",
                detail: format!(
                    "clip of {} samples, need {}",
                    samples.len(),
                    self.cfg.clip_samples
                ),
            });
        }
        let mut g = Graph::new();
        let m = self.mount(&mut g, TrainPhase::Inference)?;
        let wave = g.constant(Tensor::new(vec![1, samples.len()], samples.to_vec())?)?;
        let x = self.backbone_forward(&mut g, &m, wave)?;
        let (mu, log_sigma) = self.encode(&mut g, &m, x)?;
        let h = entropy_node(&mut g, log_sigma)?;
        let logits = self.classify(&mut g, &m, h)?;
        let row = &g.value(logits).data;
        Ok(Inference {
            logits: [row[0], row[1]],
            latent: LatentGaussian::new(g.value(mu).clone(), g.value(log_sigma).clone())?,
        })
    }
}

// ---------------------------------------------------------------------------

/// In-graph per-frame entropy: sums `log_sigma` across latent dimensions,
/// `[C, K]` in, `[C]` out.
pub fn entropy_node<F: Scalar>(g: &mut Graph<F>, log_sigma: NodeId) -> Result<NodeId, ModelError> {
    Ok(g.row_sum(log_sigma)?)
}

/// z = mu + sigma * eps with sigma = exp(log_sigma). Gradients flow into
/// `mu` and `log_sigma`; `eps` is expected to be a no-grad leaf.
pub fn reparameterize<F: Scalar>(
    g: &mut Graph<F>,
    mu: NodeId,
    log_sigma: NodeId,
    eps: NodeId,
) -> Result<NodeId, ModelError> {
    let sigma = g.exp(log_sigma)?;
    let scaled = g.mul(sigma, eps)?;
    Ok(g.add(mu, scaled)?)
}
