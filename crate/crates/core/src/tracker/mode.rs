//! Response-model strategies. Each tracking mode — the full
//! generative/discriminative hybrid, the matching-only generative model, and
//! the classifier-only discriminative model — implements one trait and is
//! registered by name, so the active model is chosen at runtime from config.

use super::ResponseMap;
use crate::error::{Error, Result};
use crate::spectral::{self, Spectrum};

/// Filter weights owned by the active response model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeWeights {
    /// The generative model carries no learned filter.
    None,
    /// One filter over the fused response spectrum.
    Single(Spectrum),
    /// One filter per feature channel.
    PerChannel(Vec<Spectrum>),
}

impl ModeWeights {
    /// Running-average update `rho * new + (1 - rho) * self`.
    pub fn lerp_toward(&mut self, new: &ModeWeights, rho: f64) -> Result<()> {
        match (self, new) {
            (ModeWeights::None, ModeWeights::None) => Ok(()),
            (ModeWeights::Single(a), ModeWeights::Single(b)) => {
                a.scale(1.0 - rho);
                a.add_scaled(b, rho);
                Ok(())
            }
            (ModeWeights::PerChannel(a), ModeWeights::PerChannel(b)) if a.len() == b.len() => {
                for (x, y) in a.iter_mut().zip(b) {
                    x.scale(1.0 - rho);
                    x.add_scaled(y, rho);
                }
                Ok(())
            }
            _ => Err(Error::Input("mismatched weight layouts in update".into())),
        }
    }
}

/// Everything a response model reads from the tracker.
pub struct ModelContext<'a> {
    pub proto_spectra: &'a [Spectrum],
    pub weights: &'a ModeWeights,
    pub label_spectrum: &'a Spectrum,
    pub lambda: f64,
}

/// A tracking response model. Implementations must return confidence maps
/// whose peak displacement is measured from the grid center cell.
pub trait ResponseModel: Sync {
    fn name(&self) -> &'static str;

    /// Filter weights regressed on the initial model (the prototype against
    /// itself).
    fn initial_weights(&self, ctx: &ModelContext) -> Result<ModeWeights>;

    /// Confidence map for the current frame's channel spectra.
    fn response(&self, ctx: &ModelContext, feat_spectra: &[Spectrum]) -> Result<ResponseMap>;

    /// Fresh weights regressed on the features at the newly located target,
    /// to be blended into the running average.
    fn refreshed_weights(
        &self,
        ctx: &ModelContext,
        new_spectra: &[Spectrum],
    ) -> Result<ModeWeights>;
}

/// Channel-averaged correlation spectrum of the input against the stored
/// prototype: `(1/K) * sum_k F[X_k] ⊙ conj(F[P_k])`.
pub fn s2_from_spectra(proto: &[Spectrum], feats: &[Spectrum]) -> Result<Spectrum> {
    if proto.len() != feats.len() || proto.is_empty() {
        return Err(Error::Input(format!(
            "channel count mismatch: {} prototype vs {} input",
            proto.len(),
            feats.len()
        )));
    }
    if proto[0].dims() != feats[0].dims() {
        return Err(Error::Input(format!(
            "spectrum dimension mismatch: {:?} vs {:?}",
            proto[0].dims(),
            feats[0].dims()
        )));
    }
    let (rows, cols) = proto[0].dims();
    let mut acc = Spectrum::zeros(rows, cols);
    for (f, p) in feats.iter().zip(proto) {
        let out = acc.as_mut_slice();
        for (i, (x, y)) in f.as_slice().iter().zip(p.as_slice()).enumerate() {
            out[i] += x * y.conj();
        }
    }
    acc.scale(1.0 / proto.len() as f64);
    Ok(acc)
}

/// Filtered response `real(F^-1[W ⊙ S2])` for a single fused filter.
pub fn filtered_response(weights: &Spectrum, s2: &Spectrum) -> Result<ResponseMap> {
    let c2 = spectral::multiply(weights, s2)?;
    ResponseMap::new(spectral::inverse(&c2).real())
}

/// Hybrid model: correlation against the prototype fused over channels,
/// then the learned filter on top.
pub struct HybridModel;

impl ResponseModel for HybridModel {
    fn name(&self) -> &'static str {
        "hybrid"
    }

    fn initial_weights(&self, ctx: &ModelContext) -> Result<ModeWeights> {
        let s2 = s2_from_spectra(ctx.proto_spectra, ctx.proto_spectra)?;
        Ok(ModeWeights::Single(spectral::divide_regularized(
            ctx.label_spectrum,
            &s2,
            ctx.lambda,
        )?))
    }

    fn response(&self, ctx: &ModelContext, feat_spectra: &[Spectrum]) -> Result<ResponseMap> {
        let s2 = s2_from_spectra(ctx.proto_spectra, feat_spectra)?;
        let ModeWeights::Single(w) = ctx.weights else {
            return Err(Error::Input("hybrid model requires a single filter".into()));
        };
        filtered_response(w, &s2)
    }

    fn refreshed_weights(
        &self,
        ctx: &ModelContext,
        new_spectra: &[Spectrum],
    ) -> Result<ModeWeights> {
        let s2 = s2_from_spectra(ctx.proto_spectra, new_spectra)?;
        Ok(ModeWeights::Single(spectral::divide_regularized(
            ctx.label_spectrum,
            &s2,
            ctx.lambda,
        )?))
    }
}

/// Generative model: the raw prototype-correlation map, recentered so zero
/// displacement sits on the grid center cell.
pub struct GenerativeModel;

impl ResponseModel for GenerativeModel {
    fn name(&self) -> &'static str {
        "generative"
    }

    fn initial_weights(&self, _ctx: &ModelContext) -> Result<ModeWeights> {
        Ok(ModeWeights::None)
    }

    fn response(&self, ctx: &ModelContext, feat_spectra: &[Spectrum]) -> Result<ResponseMap> {
        let s2 = s2_from_spectra(ctx.proto_spectra, feat_spectra)?;
        let spatial = spectral::inverse(&s2).real();
        let (rows, cols) = spatial.dims();
        // Correlation puts zero lag at the origin; move it to the center
        // cell so displacement handling matches the filtered models.
        ResponseMap::new(spatial.circular_shift((rows / 2) as i64, (cols / 2) as i64))
    }

    fn refreshed_weights(&self, _ctx: &ModelContext, _new: &[Spectrum]) -> Result<ModeWeights> {
        Ok(ModeWeights::None)
    }
}

/// Discriminative model: per-channel filters applied to the channel spectra
/// directly, bypassing prototype correlation.
pub struct DiscriminativeModel;

impl DiscriminativeModel {
    fn regress(&self, ctx: &ModelContext, spectra: &[Spectrum]) -> Result<ModeWeights> {
        let ws: Vec<Spectrum> = spectra
            .iter()
            .map(|s| spectral::divide_regularized(ctx.label_spectrum, s, ctx.lambda))
            .collect::<Result<_>>()?;
        Ok(ModeWeights::PerChannel(ws))
    }
}

impl ResponseModel for DiscriminativeModel {
    fn name(&self) -> &'static str {
        "discriminative"
    }

    fn initial_weights(&self, ctx: &ModelContext) -> Result<ModeWeights> {
        self.regress(ctx, ctx.proto_spectra)
    }

    fn response(&self, ctx: &ModelContext, feat_spectra: &[Spectrum]) -> Result<ResponseMap> {
        let ModeWeights::PerChannel(ws) = ctx.weights else {
            return Err(Error::Input(
                "discriminative model requires per-channel filters".into(),
            ));
        };
        if ws.len() != feat_spectra.len() {
            return Err(Error::Input("filter/channel count mismatch".into()));
        }
        let (rows, cols) = feat_spectra[0].dims();
        let mut acc = Spectrum::zeros(rows, cols);
        for (w, f) in ws.iter().zip(feat_spectra) {
            let out = acc.as_mut_slice();
            for (i, (x, y)) in w.as_slice().iter().zip(f.as_slice()).enumerate() {
                out[i] += x * y;
            }
        }
        acc.scale(1.0 / ws.len() as f64);
        ResponseMap::new(spectral::inverse(&acc).real())
    }

    fn refreshed_weights(
        &self,
        ctx: &ModelContext,
        new_spectra: &[Spectrum],
    ) -> Result<ModeWeights> {
        self.regress(ctx, new_spectra)
    }
}

static REGISTRY: [&(dyn ResponseModel); 3] = [&HybridModel, &GenerativeModel, &DiscriminativeModel];

/// All registered mode names, in registry order.
pub fn available_modes() -> Vec<&'static str> {
    REGISTRY.iter().map(|m| m.name()).collect()
}

/// Resolves a mode by its registered name.
pub fn lookup_mode(name: &str) -> Result<&'static dyn ResponseModel> {
    REGISTRY
        .iter()
        .copied()
        .find(|m| m.name() == name)
        .ok_or_else(|| {
            Error::Parameter(format!(
                "unknown tracking mode '{name}' (available: {})",
                available_modes().join(", ")
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ComplexMap, Grid};
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_spectra(seed: u64, n: usize, rows: usize, cols: usize) -> Vec<Spectrum> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                spectral::forward(&Grid::from_fn(rows, cols, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }))
            })
            .collect()
    }

    #[test]
    fn registry_resolves_all_modes() {
        assert_eq!(available_modes(), vec!["hybrid", "generative", "discriminative"]);
        for name in available_modes() {
            assert_eq!(lookup_mode(name).unwrap().name(), name);
        }
        assert!(lookup_mode("kalman").is_err());
    }

    #[test]
    fn s2_autocorrelation_peaks_at_zero_lag() {
        let proto = random_spectra(1, 6, 8, 8);
        let s2 = s2_from_spectra(&proto, &proto).unwrap();
        let spatial = spectral::inverse(&s2).real();
        let mut best = (0, 0);
        for r in 0..8 {
            for c in 0..8 {
                if spatial.at(r, c) > spatial.at(best.0, best.1) {
                    best = (r, c);
                }
            }
        }
        assert_eq!(best, (0, 0));
    }

    #[test]
    fn s2_of_zero_features_is_zero() {
        let proto = random_spectra(2, 4, 6, 6);
        let zeros: Vec<Spectrum> = (0..4)
            .map(|_| spectral::forward(&ComplexMap::zeros_complex(6, 6)))
            .collect();
        let s2 = s2_from_spectra(&proto, &zeros).unwrap();
        assert!(s2.as_slice().iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn s2_rejects_mismatches() {
        let a = random_spectra(3, 4, 6, 6);
        let b = random_spectra(4, 5, 6, 6);
        assert!(s2_from_spectra(&a, &b).is_err());
        let c = random_spectra(5, 4, 5, 6);
        assert!(s2_from_spectra(&a, &c).is_err());
    }

    #[test]
    fn weight_lerp_rules() {
        let a = random_spectra(6, 1, 4, 4).remove(0);
        let b = random_spectra(7, 1, 4, 4).remove(0);
        let mut w = ModeWeights::Single(a.clone());
        w.lerp_toward(&ModeWeights::Single(b.clone()), 0.25).unwrap();
        let ModeWeights::Single(out) = &w else { panic!() };
        for i in 0..16 {
            let expected = 0.25 * b.as_slice()[i] + 0.75 * a.as_slice()[i];
            assert!((out.as_slice()[i] - expected).norm() < 1e-12);
        }
        let mut n = ModeWeights::None;
        n.lerp_toward(&ModeWeights::None, 0.5).unwrap();
        assert!(n
            .lerp_toward(&ModeWeights::Single(a), 0.5)
            .is_err());
    }
}
