//! Network instances: station layout, carriers, prices, budgets and demands.
//!
//! A [`Scenario`] is the static half of a simulation trial. Channel draws live
//! in [`crate::propagation::ChannelRealization`].

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::Money;
use crate::num::{dbm_to_watts, Real};
use crate::propagation::friis_loss_db;

pub type StationId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Anchor,
    Demanding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct Position<T = f64> {
    pub x_m: T,
    pub y_m: T,
}

impl<T: Real> Position<T> {
    pub fn new(x_m: T, y_m: T) -> Self {
        Position { x_m, y_m }
    }

    pub fn distance(&self, other: &Position<T>) -> T {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct BaseStation<T = f64> {
    pub id: StationId,
    pub role: Role,
    pub position: Position<T>,
}

/// Component carrier. `MmWave` orders before `Sub6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    #[serde(rename = "mmw")]
    MmWave,
    Sub6,
}

impl BandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BandKind::MmWave => "mmw",
            BandKind::Sub6 => "sub6",
        }
    }
}

impl fmt::Display for BandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct Band<T = f64> {
    pub kind: BandKind,
    pub center_frequency_hz: T,
    /// BRBs offered by each anchor on this carrier.
    pub num_brbs: usize,
    pub brb_bandwidth_hz: T,
}

/// One band of each kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct Bands<T = f64> {
    pub mmw: Band<T>,
    pub sub6: Band<T>,
}

impl<T: Real> Bands<T> {
    pub fn get(&self, kind: BandKind) -> &Band<T> {
        match kind {
            BandKind::MmWave => &self.mmw,
            BandKind::Sub6 => &self.sub6,
        }
    }

    /// BRBs per anchor across both carriers.
    pub fn brbs_per_anchor(&self) -> usize {
        self.mmw.num_brbs + self.sub6.num_brbs
    }
}

/// Per-BRB prices an anchor charges on each carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorPrices {
    pub mmw: Money,
    pub sub6: Money,
}

impl AnchorPrices {
    pub fn get(&self, band: BandKind) -> Money {
        match band {
            BandKind::MmWave => self.mmw,
            BandKind::Sub6 => self.sub6,
        }
    }
}

/// Prices indexed by anchor position (order of anchors in the station list).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceSchedule(pub Vec<AnchorPrices>);

impl PriceSchedule {
    pub fn uniform(num_anchors: usize, prices: AnchorPrices) -> Self {
        PriceSchedule(vec![prices; num_anchors])
    }

    pub fn price(&self, anchor: usize, band: BandKind) -> Money {
        self.0[anchor].get(band)
    }
}

/// Log-distance mmWave model with Gaussian shadowing and a Bernoulli
/// blockage indicator per link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct MmwParams<T = f64> {
    pub alpha: T,
    pub beta_db: T,
    pub sigma_db: T,
    #[serde(default)]
    pub blockage_probability: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct Sub6Params<T = f64> {
    pub pathloss_exponent: T,
    /// Loss at the 1 m reference distance.
    pub ref_loss_db: T,
}

/// Static description of one network instance.
///
/// `budget` and `demand_bps` are indexed by demanding-station position: the
/// i-th entry belongs to the i-th `Demanding` station in `stations`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct Scenario<T = f64> {
    pub area_side_m: T,
    pub seed: u64,
    pub stations: Vec<BaseStation<T>>,
    pub bands: Bands<T>,
    pub prices: PriceSchedule,
    pub budget: Vec<Money>,
    pub demand_bps: Vec<T>,
    pub tx_power_w: T,
    /// Noise power per BRB, whatever the BRB bandwidth.
    pub noise_power_dbm: T,
    pub mmw: MmwParams<T>,
    pub sub6: Sub6Params<T>,
}

impl<T: Real> Scenario<T> {
    pub fn anchors(&self) -> impl Iterator<Item = &BaseStation<T>> {
        self.stations.iter().filter(|s| s.role == Role::Anchor)
    }

    pub fn demanding(&self) -> impl Iterator<Item = &BaseStation<T>> {
        self.stations.iter().filter(|s| s.role == Role::Demanding)
    }

    pub fn num_anchors(&self) -> usize {
        self.anchors().count()
    }

    pub fn num_demanding(&self) -> usize {
        self.demanding().count()
    }

    pub fn noise_power_w(&self) -> T {
        dbm_to_watts(self.noise_power_dbm)
    }

    /// Total BRBs on offer across all anchors.
    pub fn total_brbs(&self) -> usize {
        self.num_anchors() * self.bands.brbs_per_anchor()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, &e))
    }
}

pub fn save_scenario<T: Real>(s: &Scenario<T>, path: impl AsRef<Path>) -> Result<()> {
    s.save(path)
}

pub fn load_scenario<T: Real>(path: impl AsRef<Path>) -> Result<Scenario<T>> {
    Scenario::load(path)
}

/// Inputs for [`generate_scenario`]. Defaults reproduce the reference
/// deployment: 10 stations (2 anchors) in a 2 km square, 192 mmWave BRBs of
/// 4.86 MHz at 73 GHz and 100 sub-6 BRBs of 480 kHz at 5.8 GHz per anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerationParams {
    pub num_stations: usize,
    pub num_anchors: usize,
    pub area_side_m: f64,
    pub mmw_center_frequency_hz: f64,
    pub mmw_num_brbs: usize,
    pub mmw_brb_bandwidth_hz: f64,
    pub sub6_center_frequency_hz: f64,
    pub sub6_num_brbs: usize,
    pub sub6_brb_bandwidth_hz: f64,
    pub tx_power_w: f64,
    pub noise_power_dbm: f64,
    pub mmw_alpha: f64,
    pub mmw_beta_db: f64,
    pub mmw_sigma_db: f64,
    pub mmw_blockage_probability: f64,
    pub sub6_pathloss_exponent: f64,
    /// Free-space loss at 1 m for the sub-6 carrier when unset.
    pub sub6_ref_loss_db: Option<f64>,
    pub price_mmw: f64,
    pub price_sub6: f64,
    pub budget: f64,
    pub demand_bps: f64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            num_stations: 10,
            num_anchors: 2,
            area_side_m: 2000.0,
            mmw_center_frequency_hz: 73e9,
            mmw_num_brbs: 192,
            mmw_brb_bandwidth_hz: 4.86e6,
            sub6_center_frequency_hz: 5.8e9,
            sub6_num_brbs: 100,
            sub6_brb_bandwidth_hz: 480e3,
            tx_power_w: 1.0,
            noise_power_dbm: -90.0,
            mmw_alpha: 2.0,
            mmw_beta_db: 70.0,
            mmw_sigma_db: 4.1,
            mmw_blockage_probability: 0.0,
            sub6_pathloss_exponent: 3.0,
            sub6_ref_loss_db: None,
            price_mmw: 0.1,
            price_sub6: 10.0,
            budget: 60.0,
            demand_bps: 100e6,
        }
    }
}

/// Draws station positions uniformly over the square. The first
/// `num_anchors` stations are anchors; ids are `0..num_stations`.
pub fn generate_scenario<T: Real>(params: &GenerationParams, seed: u64) -> Result<Scenario<T>> {
    let p = params;
    if p.num_anchors == 0 {
        return Err(Error::InvalidConfig("at least one anchor station is required".into()));
    }
    if p.num_anchors >= p.num_stations {
        return Err(Error::InvalidConfig(format!(
            "num_anchors ({}) must be smaller than num_stations ({}) so that at least one \
             demanding station exists",
            p.num_anchors, p.num_stations
        )));
    }
    if !(p.area_side_m > 0.0 && p.area_side_m.is_finite()) {
        return Err(Error::InvalidConfig(format!("area_side_m must be positive, got {}", p.area_side_m)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = T::of(p.area_side_m);
    let stations = (0..p.num_stations)
        .map(|i| {
            let x: f64 = rng.random::<f64>() * p.area_side_m;
            let y: f64 = rng.random::<f64>() * p.area_side_m;
            BaseStation {
                id: i as StationId,
                role: if i < p.num_anchors { Role::Anchor } else { Role::Demanding },
                // f32 rounding can land exactly on the far edge, never past it.
                position: Position::new(T::of(x).min(side), T::of(y).min(side)),
            }
        })
        .collect();

    let num_demanding = p.num_stations - p.num_anchors;
    let ref_loss = p.sub6_ref_loss_db.unwrap_or_else(|| friis_loss_db(p.sub6_center_frequency_hz));

    Ok(Scenario {
        area_side_m: side,
        seed,
        stations,
        bands: Bands {
            mmw: Band {
                kind: BandKind::MmWave,
                center_frequency_hz: T::of(p.mmw_center_frequency_hz),
                num_brbs: p.mmw_num_brbs,
                brb_bandwidth_hz: T::of(p.mmw_brb_bandwidth_hz),
            },
            sub6: Band {
                kind: BandKind::Sub6,
                center_frequency_hz: T::of(p.sub6_center_frequency_hz),
                num_brbs: p.sub6_num_brbs,
                brb_bandwidth_hz: T::of(p.sub6_brb_bandwidth_hz),
            },
        },
        prices: PriceSchedule::uniform(
            p.num_anchors,
            AnchorPrices { mmw: Money::from_units(p.price_mmw), sub6: Money::from_units(p.price_sub6) },
        ),
        budget: vec![Money::from_units(p.budget); num_demanding],
        demand_bps: vec![T::of(p.demand_bps); num_demanding],
        tx_power_w: T::of(p.tx_power_w),
        noise_power_dbm: T::of(p.noise_power_dbm),
        mmw: MmwParams {
            alpha: T::of(p.mmw_alpha),
            beta_db: T::of(p.mmw_beta_db),
            sigma_db: T::of(p.mmw_sigma_db),
            blockage_probability: T::of(p.mmw_blockage_probability),
        },
        sub6: Sub6Params { pathloss_exponent: T::of(p.sub6_pathloss_exponent), ref_loss_db: T::of(ref_loss) },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    DuplicateStationId,
    PositionOutOfArea,
    NoAnchor,
    NoDemanding,
    NonPositiveArea,
    BandKindMismatch,
    NonPositiveBandwidth,
    NonPositiveFrequency,
    PriceScheduleLength,
    NegativePrice,
    BudgetLength,
    NonPositiveBudget,
    DemandLength,
    NonPositiveDemand,
    NonPositiveTxPower,
    NonFiniteNoise,
    NegativeShadowing,
    BlockageProbability,
    NonFiniteParameter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

/// Lists every violated scenario invariant. An empty list means valid.
pub fn validate_scenario<T: Real>(s: &Scenario<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, detail: String| out.push(Violation { kind, detail });
    let zero = T::zero();

    let mut ids: Vec<StationId> = s.stations.iter().map(|st| st.id).collect();
    ids.sort_unstable();
    for w in ids.windows(2) {
        if w[0] == w[1] {
            push(ViolationKind::DuplicateStationId, format!("station id {} appears more than once", w[0]));
        }
    }

    if !(s.area_side_m > zero && s.area_side_m.is_finite()) {
        push(ViolationKind::NonPositiveArea, format!("area_side_m = {}", s.area_side_m));
    }
    for st in &s.stations {
        let Position { x_m, y_m } = st.position;
        let inside = |v: T| v >= zero && v <= s.area_side_m;
        if !(inside(x_m) && inside(y_m)) {
            push(
                ViolationKind::PositionOutOfArea,
                format!("station {} at ({x_m}, {y_m}) lies outside [0, {}]^2", st.id, s.area_side_m),
            );
        }
    }

    let num_anchors = s.num_anchors();
    let num_demanding = s.num_demanding();
    if num_anchors == 0 {
        push(ViolationKind::NoAnchor, "scenario has no anchor station".into());
    }
    if num_demanding == 0 {
        push(ViolationKind::NoDemanding, "scenario has no demanding station".into());
    }

    for (expected, band) in [(BandKind::MmWave, &s.bands.mmw), (BandKind::Sub6, &s.bands.sub6)] {
        if band.kind != expected {
            push(ViolationKind::BandKindMismatch, format!("the {expected} slot holds a {} band", band.kind));
        }
        if !(band.brb_bandwidth_hz > zero && band.brb_bandwidth_hz.is_finite()) {
            push(
                ViolationKind::NonPositiveBandwidth,
                format!("{expected} brb_bandwidth_hz = {}", band.brb_bandwidth_hz),
            );
        }
        if !(band.center_frequency_hz > zero && band.center_frequency_hz.is_finite()) {
            push(
                ViolationKind::NonPositiveFrequency,
                format!("{expected} center_frequency_hz = {}", band.center_frequency_hz),
            );
        }
    }

    if s.prices.0.len() != num_anchors {
        push(
            ViolationKind::PriceScheduleLength,
            format!("{} price entries for {num_anchors} anchors", s.prices.0.len()),
        );
    }
    for (k1, p) in s.prices.0.iter().enumerate() {
        for band in [BandKind::MmWave, BandKind::Sub6] {
            if p.get(band).is_negative() {
                push(ViolationKind::NegativePrice, format!("anchor {k1} {band} price = {}", p.get(band)));
            }
        }
    }

    if s.budget.len() != num_demanding {
        push(ViolationKind::BudgetLength, format!("{} budgets for {num_demanding} demanding stations", s.budget.len()));
    }
    for (k2, b) in s.budget.iter().enumerate() {
        if *b <= Money::ZERO {
            push(ViolationKind::NonPositiveBudget, format!("budget[{k2}] = {b}"));
        }
    }
    if s.demand_bps.len() != num_demanding {
        push(
            ViolationKind::DemandLength,
            format!("{} demands for {num_demanding} demanding stations", s.demand_bps.len()),
        );
    }
    for (k2, d) in s.demand_bps.iter().enumerate() {
        if !(*d > zero && d.is_finite()) {
            push(ViolationKind::NonPositiveDemand, format!("demand_bps[{k2}] = {d}"));
        }
    }

    if !(s.tx_power_w > zero && s.tx_power_w.is_finite()) {
        push(ViolationKind::NonPositiveTxPower, format!("tx_power_w = {}", s.tx_power_w));
    }
    // Any finite dBm figure is a positive power.
    if !s.noise_power_dbm.is_finite() {
        push(ViolationKind::NonFiniteNoise, format!("noise_power_dbm = {}", s.noise_power_dbm));
    }
    if s.mmw.sigma_db.is_nan() || s.mmw.sigma_db < zero {
        push(ViolationKind::NegativeShadowing, format!("mmw sigma_db = {}", s.mmw.sigma_db));
    }
    let pb = s.mmw.blockage_probability;
    if !(pb >= zero && pb <= T::one()) {
        push(ViolationKind::BlockageProbability, format!("mmw blockage_probability = {pb}"));
    }
    for (name, v) in [
        ("mmw alpha", s.mmw.alpha),
        ("mmw beta_db", s.mmw.beta_db),
        ("sub6 pathloss_exponent", s.sub6.pathloss_exponent),
        ("sub6 ref_loss_db", s.sub6.ref_loss_db),
    ] {
        if !v.is_finite() {
            push(ViolationKind::NonFiniteParameter, format!("{name} = {v}"));
        }
    }

    out
}
