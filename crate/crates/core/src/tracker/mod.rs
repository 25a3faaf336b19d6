//! The tracking state machine: maintain the feature prototype and filter
//! weights, score each frame through the configured response model, localize
//! the peak, and blend the new frame into the model.

pub mod mode;

use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureStack};
use crate::frame::Frame;
use crate::grid::{Grid, RealMap};
use crate::spectral::{self, Spectrum};
use mode::{ModeWeights, ModelContext, ResponseModel};

/// Axis-aligned target region in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BoundingBox { x, y, w, h }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        BoundingBox {
            x: cx - w / 2.0,
            y: cy - h / 2.0,
            w,
            h,
        }
    }

    /// A box with positive extent; all-zero boxes mark absent targets.
    pub fn is_present(&self) -> bool {
        self.w > 0.0 && self.h > 0.0
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Tracking hyperparameters. Defaults follow the reference configuration:
/// learning rate 0.02, label widths {0.1, 0.08}, double-size search window.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub mode: String,
    pub rho: f64,
    pub lambda: f64,
    pub padding: f64,
    pub sigma_candidates: (f64, f64),
    pub taper_enabled: bool,
    pub threads: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            mode: "hybrid".into(),
            rho: 0.02,
            lambda: 1e-4,
            padding: 2.0,
            sigma_candidates: (0.1, 0.08),
            taper_enabled: true,
            threads: 1,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        mode::lookup_mode(&self.mode)?;
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Parameter(format!(
                "learning rate must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if self.lambda < 0.0 {
            return Err(Error::Parameter("lambda must be non-negative".into()));
        }
        if self.padding < 1.0 {
            return Err(Error::Parameter(format!(
                "padding must be >= 1, got {}",
                self.padding
            )));
        }
        if self.sigma_candidates.0 <= 0.0 || self.sigma_candidates.1 <= 0.0 {
            return Err(Error::Parameter("sigma candidates must be positive".into()));
        }
        if self.threads == 0 {
            return Err(Error::Parameter("threads must be >= 1".into()));
        }
        Ok(())
    }
}

/// Real-valued confidence surface over the feature grid.
#[derive(Debug, Clone)]
pub struct ResponseMap {
    pub values: RealMap,
    /// `(row, col, value)` of the maximum; ties resolve to the first cell
    /// in row-major scan order.
    pub peak: (usize, usize, f64),
}

impl ResponseMap {
    pub fn new(values: RealMap) -> Result<Self> {
        let mut peak: Option<(usize, usize, f64)> = None;
        for r in 0..values.rows() {
            for c in 0..values.cols() {
                let v = values.at(r, c);
                if v.is_finite() && peak.map_or(true, |(_, _, best)| v > best) {
                    peak = Some((r, c, v));
                }
            }
        }
        let peak = peak.ok_or_else(|| {
            Error::Numerical("response map contains no finite values".into())
        })?;
        Ok(ResponseMap { values, peak })
    }
}

/// Regression target: an isotropic Gaussian bump with peak exactly 1 at the
/// given grid cell.
pub fn gaussian_label(
    grid_dims: (usize, usize),
    center: (usize, usize),
    sigma_cells: f64,
) -> Result<RealMap> {
    let (rows, cols) = grid_dims;
    if sigma_cells <= 0.0 {
        return Err(Error::Parameter(format!(
            "label width must be positive, got {sigma_cells}"
        )));
    }
    if center.0 >= rows || center.1 >= cols {
        return Err(Error::Parameter(format!(
            "label center {center:?} outside {rows}x{cols} grid"
        )));
    }
    let denom = 2.0 * sigma_cells * sigma_cells;
    Ok(Grid::from_fn(rows, cols, |r, c| {
        let dr = r as f64 - center.0 as f64;
        let dc = c as f64 - center.1 as f64;
        (-(dr * dr + dc * dc) / denom).exp()
    }))
}

/// Reference cell for displacement measurements.
pub fn grid_center(dims: (usize, usize)) -> (usize, usize) {
    (dims.0 / 2, dims.1 / 2)
}

/// Signed circular displacement of `p` from `c` on an axis of length `n`,
/// wrapped into `(-n/2, n/2]`.
fn wrap_displacement(p: usize, c: usize, n: usize) -> i64 {
    let n = n as i64;
    let mut d = p as i64 - c as i64;
    if 2 * d > n {
        d -= n;
    }
    if 2 * d <= -n {
        d += n;
    }
    d
}

/// Everything the tracker carries between frames.
#[derive(Debug, Clone)]
pub struct TrackerState {
    /// Stored appearance template (spatial domain).
    pub prototype: FeatureStack,
    /// Cached per-channel spectra of the prototype.
    proto_spectra: Vec<Spectrum>,
    pub weights: ModeWeights,
    pub label_spectrum: Spectrum,
    /// Reported box extent, constant over the run.
    pub target_size: (f64, f64),
    /// Search window extent in pixels `(width, height)`.
    pub window_size: (usize, usize),
    /// Pooled grid `(rows, cols)`.
    pub grid_dims: (usize, usize),
    pub sigma_s: f64,
    pub frame_index: usize,
    /// Response peaks of the most recent frames (up to five).
    pub recent_peaks: Vec<f64>,
    /// Current target center in pixel coordinates.
    pub center: (f64, f64),
    sigma_adapted: bool,
}

impl TrackerState {
    fn sigma_cells(&self) -> f64 {
        let (w, h) = self.target_size;
        let cell = crate::features::pooling::CELL_SIZE as f64;
        self.sigma_s * ((w / cell) * (h / cell)).sqrt()
    }
}

/// Channel-averaged correlation spectrum of `features` against the stored
/// prototype.
pub fn s2_response(state: &TrackerState, features: &FeatureStack) -> Result<Spectrum> {
    if features.grid_dims() != state.grid_dims {
        return Err(Error::Input(format!(
            "feature grid {:?} does not match tracker grid {:?}",
            features.grid_dims(),
            state.grid_dims
        )));
    }
    let spectra = features.to_spectra(false);
    mode::s2_from_spectra(&state.proto_spectra, &spectra)
}

/// Applies the learned fused filter to a correlation spectrum.
pub fn c2_response(state: &TrackerState, s2: &Spectrum) -> Result<ResponseMap> {
    let ModeWeights::Single(w) = &state.weights else {
        return Err(Error::Input(
            "fused filter response requires single-filter weights".into(),
        ));
    };
    mode::filtered_response(w, s2)
}

/// Maps a response peak to a new box: displacement from the grid center in
/// cells, scaled to pixels, applied to the current center.
pub fn locate(resp: &ResponseMap, state: &TrackerState) -> Result<BoundingBox> {
    if !resp.peak.2.is_finite() {
        return Err(Error::Numerical("response peak is not finite".into()));
    }
    let (rows, cols) = state.grid_dims;
    let (cr, cc) = grid_center(state.grid_dims);
    let dr = wrap_displacement(resp.peak.0, cr, rows);
    let dc = wrap_displacement(resp.peak.1, cc, cols);
    let cell = state.prototype.cell_size as f64;
    let (cx, cy) = state.center;
    Ok(BoundingBox::from_center(
        cx + dc as f64 * cell,
        cy + dr as f64 * cell,
        state.target_size.0,
        state.target_size.1,
    ))
}

/// Chooses the label width from the first five response peaks: ascending
/// trend (positive least-squares slope) keeps the wide label, anything else
/// the narrow one.
pub fn adapt_sigma(recent_peaks: &[f64], candidates: (f64, f64)) -> Result<f64> {
    if recent_peaks.len() != 5 {
        return Err(Error::Input(format!(
            "trend estimation needs exactly 5 peaks, got {}",
            recent_peaks.len()
        )));
    }
    let slope: f64 = recent_peaks
        .iter()
        .enumerate()
        .map(|(i, &y)| (i as f64 - 2.0) * y)
        .sum();
    Ok(if slope > 0.0 { candidates.0 } else { candidates.1 })
}

/// One tracked target: configuration, extractor, response model, and state.
pub struct Tracker {
    cfg: TrackerConfig,
    extractor: FeatureExtractor,
    model: &'static dyn ResponseModel,
    pool: Option<rayon::ThreadPool>,
    state: TrackerState,
}

impl Tracker {
    /// Builds the model from the first frame: extracts the prototype from
    /// the padded window around `target`, regresses the filter against the
    /// centered Gaussian label, and records the first response peak.
    pub fn init(
        frame: &Frame,
        target: BoundingBox,
        cfg: TrackerConfig,
        table: crate::features::color::ColorNameTable,
    ) -> Result<Tracker> {
        cfg.validate()?;
        if !target.is_present() {
            return Err(Error::Input(format!(
                "degenerate target box {}x{}",
                target.w, target.h
            )));
        }
        let (frame_h, frame_w) = frame.dims();
        let (cx, cy) = target.center();
        if cx < 0.0 || cy < 0.0 || cx >= frame_w as f64 || cy >= frame_h as f64 {
            return Err(Error::Input("target center outside the frame".into()));
        }

        let model = mode::lookup_mode(&cfg.mode)?;
        let cell = crate::features::pooling::CELL_SIZE;
        let win_w = ((target.w * cfg.padding).round() as usize).max(cell);
        let win_h = ((target.h * cfg.padding).round() as usize).max(cell);
        let parallel = cfg.threads > 1;
        let extractor = FeatureExtractor::new(table, cfg.taper_enabled).with_parallelism(parallel);
        let pool = if parallel {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.threads)
                    .build()
                    .map_err(|e| Error::Input(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };

        let patch = frame.cut_patch(cx, cy, win_w, win_h)?;
        let prototype = match &pool {
            Some(p) => p.install(|| extractor.extract(&patch)),
            None => extractor.extract(&patch),
        }?;
        let grid_dims = prototype.grid_dims();
        let proto_spectra = prototype.to_spectra(false);

        let mut state = TrackerState {
            prototype,
            proto_spectra,
            weights: ModeWeights::None,
            label_spectrum: Spectrum::zeros(grid_dims.0, grid_dims.1),
            target_size: (target.w, target.h),
            window_size: (win_w, win_h),
            grid_dims,
            sigma_s: cfg.sigma_candidates.0,
            frame_index: 1,
            recent_peaks: Vec::with_capacity(5),
            center: (cx, cy),
            sigma_adapted: false,
        };
        let label = gaussian_label(grid_dims, grid_center(grid_dims), state.sigma_cells())?;
        state.label_spectrum = spectral::forward(&label.to_complex());

        let ctx = ModelContext {
            proto_spectra: &state.proto_spectra,
            weights: &state.weights,
            label_spectrum: &state.label_spectrum,
            lambda: cfg.lambda,
        };
        state.weights = model.initial_weights(&ctx)?;

        // First-frame response peak seeds the label-width trend.
        let ctx = ModelContext {
            proto_spectra: &state.proto_spectra,
            weights: &state.weights,
            label_spectrum: &state.label_spectrum,
            lambda: cfg.lambda,
        };
        let resp = model.response(&ctx, &state.proto_spectra)?;
        state.recent_peaks.push(resp.peak.2);

        Ok(Tracker {
            cfg,
            extractor,
            model,
            pool,
            state,
        })
    }

    pub fn state(&self) -> &TrackerState {
        &self.state
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn mode_name(&self) -> &'static str {
        self.model.name()
    }

    /// Processes one frame: score the window at the previous center, move
    /// the box to the response peak, then fold the newly centered features
    /// into the model. Returns the located box.
    pub fn track_frame(&mut self, frame: &Frame) -> Result<BoundingBox> {
        match self.pool.take() {
            Some(pool) => {
                let out = pool.install(|| self.track_frame_inner(frame));
                self.pool = Some(pool);
                out
            }
            None => self.track_frame_inner(frame),
        }
    }

    fn track_frame_inner(&mut self, frame: &Frame) -> Result<BoundingBox> {
        let parallel = self.cfg.threads > 1;
        let (win_w, win_h) = self.state.window_size;
        let (cx, cy) = self.state.center;

        let patch = frame.cut_patch(cx, cy, win_w, win_h)?;
        let features = self.extractor.extract(&patch)?;
        let spectra = features.to_spectra(parallel);
        let ctx = ModelContext {
            proto_spectra: &self.state.proto_spectra,
            weights: &self.state.weights,
            label_spectrum: &self.state.label_spectrum,
            lambda: self.cfg.lambda,
        };
        let resp = self.model.response(&ctx, &spectra)?;
        let bbox = locate(&resp, &self.state)?;

        self.state.center = bbox.center();
        self.state.frame_index += 1;
        self.state.recent_peaks.push(resp.peak.2);
        if self.state.recent_peaks.len() > 5 {
            self.state.recent_peaks.remove(0);
        }
        if self.state.frame_index == 5 && !self.state.sigma_adapted {
            self.adapt_label_width()?;
        }

        let patch = frame.cut_patch(bbox.center().0, bbox.center().1, win_w, win_h)?;
        let new_features = self.extractor.extract(&patch)?;
        let new_spectra = new_features.to_spectra(parallel);
        self.update_with_spectra(&new_features, &new_spectra, self.cfg.rho)?;

        Ok(bbox)
    }

    /// Blends features from the new target location into the prototype and
    /// filter weights with rate `rho`.
    pub fn update(&mut self, features_at_new_location: &FeatureStack, rho: f64) -> Result<()> {
        if features_at_new_location.grid_dims() != self.state.grid_dims {
            return Err(Error::Input("feature grid mismatch in update".into()));
        }
        let spectra = features_at_new_location.to_spectra(false);
        self.update_with_spectra(features_at_new_location, &spectra, rho)
    }

    fn update_with_spectra(
        &mut self,
        features: &FeatureStack,
        spectra: &[Spectrum],
        rho: f64,
    ) -> Result<()> {
        self.state.prototype.lerp_toward(features, rho);
        for (p, f) in self.state.proto_spectra.iter_mut().zip(spectra) {
            p.scale(1.0 - rho);
            p.add_scaled(f, rho);
        }
        let ctx = ModelContext {
            proto_spectra: &self.state.proto_spectra,
            weights: &self.state.weights,
            label_spectrum: &self.state.label_spectrum,
            lambda: self.cfg.lambda,
        };
        let fresh = self.model.refreshed_weights(&ctx, spectra)?;
        self.state.weights.lerp_toward(&fresh, rho)
    }

    /// Picks the label width from the first five peaks and, when it
    /// changes, rebuilds the label spectrum and re-regresses the filter on
    /// the current prototype.
    fn adapt_label_width(&mut self) -> Result<()> {
        let chosen = adapt_sigma(&self.state.recent_peaks, self.cfg.sigma_candidates)?;
        self.state.sigma_adapted = true;
        if chosen != self.state.sigma_s {
            self.state.sigma_s = chosen;
            let label = gaussian_label(
                self.state.grid_dims,
                grid_center(self.state.grid_dims),
                self.state.sigma_cells(),
            )?;
            self.state.label_spectrum = spectral::forward(&label.to_complex());
            let ctx = ModelContext {
                proto_spectra: &self.state.proto_spectra,
                weights: &self.state.weights,
                label_spectrum: &self.state.label_spectrum,
                lambda: self.cfg.lambda,
            };
            self.state.weights = self.model.initial_weights(&ctx)?;
        }
        Ok(())
    }
}
