//! Bits-back coding for small discrete latent-variable models.
//!
//! A latent-variable model gives probabilities only through a prior over the
//! latent and a conditional over the observation; the marginal over
//! observations is not directly codable. Bits-back sidesteps this: to encode
//! `x`, first *decode* a latent `z` from the posterior for `x` — spending
//! state bits to make the choice — then encode `x` under the conditional for
//! `z` and `z` under the prior. The decoder runs the three steps backwards,
//! and the posterior encode at the end hands the sampling bits back. The
//! per-symbol cost converges to the negative evidence lower bound.
//!
//! All three distribution families are quantized with integer weights; the
//! prior and posteriors share the latent precision so the sampling step is
//! exactly invertible.

use std::fmt::Write as _;

use crate::ans::{AnsState, QuantizedDist, SymbolCodec};
use crate::error::{Error, Result};

/// A discrete latent-variable model: prior `P(z)`, conditionals `P(x|z)`,
/// and posteriors `Q(z|x)`, all quantized. Latents and observations are
/// dense indices `0..latent_count` and `0..obs_count`.
#[derive(Debug, Clone)]
pub struct DiscreteLvm {
    prior: QuantizedDist<usize>,
    conditional: Vec<QuantizedDist<usize>>,
    posterior: Vec<QuantizedDist<usize>>,
}

impl DiscreteLvm {
    pub fn new(
        prior: QuantizedDist<usize>,
        conditional: Vec<QuantizedDist<usize>>,
        posterior: Vec<QuantizedDist<usize>>,
    ) -> Result<Self> {
        let nz = prior.len();
        let nx = posterior.len();
        if conditional.len() != nz {
            return Err(Error::InvalidDistribution(
                "need one conditional per latent".into(),
            ));
        }
        for cond in &conditional {
            if cond.len() != nx || cond.precision() != conditional[0].precision() {
                return Err(Error::InvalidDistribution(
                    "conditionals must share alphabet and precision".into(),
                ));
            }
        }
        for post in &posterior {
            if post.len() != nz || post.precision() != prior.precision() {
                return Err(Error::InvalidDistribution(
                    "posteriors must match the prior's alphabet and precision".into(),
                ));
            }
        }
        Ok(DiscreteLvm {
            prior,
            conditional,
            posterior,
        })
    }

    pub fn latent_count(&self) -> usize {
        self.prior.len()
    }

    pub fn obs_count(&self) -> usize {
        self.posterior.len()
    }

    /// Shared precision of the prior and posteriors.
    pub fn latent_precision(&self) -> u64 {
        self.prior.precision()
    }

    pub fn obs_precision(&self) -> u64 {
        self.conditional[0].precision()
    }

    pub fn prior(&self) -> &QuantizedDist<usize> {
        &self.prior
    }

    pub fn conditional(&self, z: usize) -> &QuantizedDist<usize> {
        &self.conditional[z]
    }

    pub fn posterior(&self, x: usize) -> &QuantizedDist<usize> {
        &self.posterior[x]
    }

    /// Parse the plain-text model format written by [`to_text`](Self::to_text):
    ///
    /// ```text
    /// latents 2
    /// observations 2
    /// prior 2 2
    /// conditional 3 1
    /// conditional 1 3
    /// posterior 3 1
    /// posterior 1 3
    /// ```
    ///
    /// `#` starts a comment; blank lines are ignored. `conditional` lines
    /// appear once per latent (weights over observations); `posterior` lines
    /// once per observation (weights over latents).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut latents = None;
        let mut observations = None;
        let mut prior: Option<Vec<u64>> = None;
        let mut conditional: Vec<Vec<u64>> = Vec::new();
        let mut posterior: Vec<Vec<u64>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap();
            let values: Vec<u64> = parts
                .map(|t| {
                    t.parse::<u64>().map_err(|_| {
                        Error::InvalidInput(format!("line {}: bad integer {t:?}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            match key {
                "latents" if values.len() == 1 => latents = Some(values[0] as usize),
                "observations" if values.len() == 1 => observations = Some(values[0] as usize),
                "prior" => prior = Some(values),
                "conditional" => conditional.push(values),
                "posterior" => posterior.push(values),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "line {}: unrecognized entry {key:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let nz = latents.ok_or_else(|| Error::InvalidInput("missing latents line".into()))?;
        let nx =
            observations.ok_or_else(|| Error::InvalidInput("missing observations line".into()))?;
        let prior = prior.ok_or_else(|| Error::InvalidInput("missing prior line".into()))?;
        if prior.len() != nz || conditional.len() != nz || posterior.len() != nx {
            return Err(Error::InvalidInput(
                "model line counts do not match declared sizes".into(),
            ));
        }
        let dist = |weights: Vec<u64>| QuantizedDist::<usize>::from_weights(weights);
        DiscreteLvm::new(
            dist(prior)?,
            conditional.into_iter().map(dist).collect::<Result<_>>()?,
            posterior.into_iter().map(dist).collect::<Result<_>>()?,
        )
    }

    /// Serialize in the format accepted by [`from_text`](Self::from_text).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "latents {}", self.latent_count());
        let _ = writeln!(out, "observations {}", self.obs_count());
        let weights_line = |out: &mut String, key: &str, d: &QuantizedDist<usize>| {
            let _ = write!(out, "{key}");
            for sym in d.symbols() {
                let _ = write!(out, " {}", d.forward_lookup(sym).unwrap().freq);
            }
            let _ = writeln!(out);
        };
        weights_line(&mut out, "prior", &self.prior);
        for cond in &self.conditional {
            weights_line(&mut out, "conditional", cond);
        }
        for post in &self.posterior {
            weights_line(&mut out, "posterior", post);
        }
        out
    }
}

/// Encode a sequence of observations. Errors with
/// [`Error::StateDepleted`] if the state ever holds fewer values than the
/// latent precision before a posterior sampling step; the default `2^64`
/// seed makes that impossible on the first symbol for any sane model.
pub fn encode(xs: &[usize], lvm: &DiscreteLvm, state: &mut AnsState) -> Result<()> {
    for &x in xs {
        if x >= lvm.obs_count() {
            return Err(Error::SymbolNotFound);
        }
        if state.is_depleted(lvm.latent_precision()) {
            return Err(Error::StateDepleted {
                precision: lvm.latent_precision(),
            });
        }
        let z = lvm.posterior(x).decode(state)?;
        lvm.conditional(z).encode(state, &x)?;
        lvm.prior().encode(state, &z)?;
    }
    Ok(())
}

/// Decode `count` observations, restoring the pre-encode state exactly.
pub fn decode(state: &mut AnsState, count: usize, lvm: &DiscreteLvm) -> Result<Vec<usize>> {
    let mut xs = Vec::with_capacity(count);
    for _ in 0..count {
        let z = lvm.prior().decode(state)?;
        let x = lvm.conditional(z).decode(state)?;
        lvm.posterior(x).encode(state, &z)?;
        xs.push(x);
    }
    xs.reverse();
    Ok(xs)
}

/// Expected per-symbol rate of the bits-back code under `data_dist`:
/// `E_x E_{z ~ Q(.|x)} [ -log2( P(x|z) P(z) / Q(z|x) ) ]` in bits.
pub fn nelbo(lvm: &DiscreteLvm, data_dist: &QuantizedDist<usize>) -> f64 {
    let nz = lvm.latent_precision() as f64;
    let nx = lvm.obs_precision() as f64;
    let nd = data_dist.precision() as f64;
    let mut bits = 0.0;
    for x in data_dist.symbols() {
        let px = data_dist.forward_lookup(x).unwrap().freq as f64 / nd;
        for z in 0..lvm.latent_count() {
            let q = lvm.posterior(*x).forward_lookup(&z).unwrap().freq as f64 / nz;
            let p_x_z = lvm.conditional(z).forward_lookup(x).unwrap().freq as f64 / nx;
            let p_z = lvm.prior().forward_lookup(&z).unwrap().freq as f64 / nz;
            bits += px * q * (q / (p_x_z * p_z)).log2();
        }
    }
    bits
}
