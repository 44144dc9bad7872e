//! Link models for both carriers: mmWave log-distance path loss with
//! lognormal shadowing (noise limited), and sub-6 GHz Rayleigh fading with
//! worst-case co-channel interference from every other anchor.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::scenario::{BandKind, Scenario};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space (Friis) loss at 1 m, isotropic antennas.
pub fn friis_loss_db(frequency_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * frequency_hz / SPEED_OF_LIGHT).log10()
}

fn check_distance<T: Real>(d: T) -> Result<()> {
    if d >= T::one() {
        Ok(())
    } else {
        Err(Error::Domain { quantity: "distance_m", value: d.as_f64(), constraint: "d >= 1 m" })
    }
}

/// mmWave LOS path loss in dB: `beta + alpha * 10 log10(d) + chi`.
pub fn mmw_pathloss_db<T: Real>(d: T, alpha: T, beta_db: T, chi_db: T) -> Result<T> {
    check_distance(d)?;
    Ok(beta_db + alpha * T::of(10.0) * d.log10() + chi_db)
}

/// One zero-mean Gaussian shadowing draw with standard deviation `xi_db`.
pub fn sample_mmw_shadowing<T: Real, R: Rng + ?Sized>(xi_db: T, rng: &mut R) -> T {
    debug_assert!(xi_db >= T::zero());
    let z: f64 = StandardNormal.sample(rng);
    xi_db * T::of(z)
}

/// Unit-mean exponential draw: the squared envelope of a Rayleigh channel.
pub fn sample_sub6_fade<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let f: f64 = Exp1.sample(rng);
    T::of(f)
}

/// Sub-6 GHz linear power gain: `fade * 10^(-(ref_loss + 10 n log10 d) / 10)`.
pub fn sub6_gain<T: Real>(d: T, exponent: T, ref_loss_db: T, fade: T) -> Result<T> {
    check_distance(d)?;
    let loss_db = ref_loss_db + T::of(10.0) * exponent * d.log10();
    Ok(fade * T::from_db(-loss_db))
}

/// Noise-limited mmWave SNR.
pub fn snr_mmw<T: Real>(psi: T, gain: T, sigma2: T) -> T {
    psi * gain / sigma2
}

/// Sub-6 SINR on BRB `n` (realization index) from anchor `k1` to demanding
/// station `k2`, with every other anchor assumed active on `n`.
pub fn sinr_sub6<T: Real>(
    k1: usize,
    n: usize,
    k2: usize,
    psi: &[T],
    ch: &ChannelRealization<T>,
    sigma2: T,
) -> Result<T> {
    if ch.band_of(n) != BandKind::Sub6 {
        return Err(Error::WrongBand { brb: n });
    }
    let interference: T = (0..ch.num_anchors()).filter(|&j| j != k1).map(|j| psi[j] * ch.gain(j, n, k2)).sum();
    Ok(psi[k1] * ch.gain(k1, n, k2) / (interference + sigma2))
}

/// Achievable rate of one BRB: `omega * log2(1 + gamma)`.
pub fn brb_rate<T: Real>(omega: T, gamma: T) -> T {
    omega * (T::one() + gamma).log2()
}

/// Per-link, per-BRB linear power gains for one trial.
///
/// BRB index `n` runs over `0..num_mmw` for mmWave BRBs followed by the
/// sub-6 BRBs. Gains are stored `[k1][n][k2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T = f64> {
    num_anchors: usize,
    num_mmw: usize,
    num_brbs: usize,
    num_demanding: usize,
    gain: Vec<T>,
    los: Vec<bool>,
}

impl<T: Real> ChannelRealization<T> {
    /// Builds a realization from explicit tensors, mostly for hand-made test
    /// instances. Panics if a length does not match the shape.
    pub fn from_parts(
        num_anchors: usize,
        num_mmw: usize,
        num_brbs: usize,
        num_demanding: usize,
        gain: Vec<T>,
        los: Vec<bool>,
    ) -> Self {
        assert!(num_mmw <= num_brbs);
        assert_eq!(gain.len(), num_anchors * num_brbs * num_demanding, "gain tensor shape");
        assert_eq!(los.len(), num_anchors * num_demanding, "los matrix shape");
        ChannelRealization { num_anchors, num_mmw, num_brbs, num_demanding, gain, los }
    }

    /// `(anchors, brbs per anchor, demanding stations)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.num_anchors, self.num_brbs, self.num_demanding)
    }

    pub fn num_anchors(&self) -> usize {
        self.num_anchors
    }

    pub fn num_mmw(&self) -> usize {
        self.num_mmw
    }

    pub fn num_brbs(&self) -> usize {
        self.num_brbs
    }

    pub fn num_demanding(&self) -> usize {
        self.num_demanding
    }

    pub fn band_of(&self, n: usize) -> BandKind {
        if n < self.num_mmw {
            BandKind::MmWave
        } else {
            BandKind::Sub6
        }
    }

    fn offset(&self, k1: usize, n: usize, k2: usize) -> usize {
        debug_assert!(k1 < self.num_anchors && n < self.num_brbs && k2 < self.num_demanding);
        (k1 * self.num_brbs + n) * self.num_demanding + k2
    }

    pub fn gain(&self, k1: usize, n: usize, k2: usize) -> T {
        self.gain[self.offset(k1, n, k2)]
    }

    pub fn gain_mut(&mut self, k1: usize, n: usize, k2: usize) -> &mut T {
        let i = self.offset(k1, n, k2);
        &mut self.gain[i]
    }

    pub fn los(&self, k1: usize, k2: usize) -> bool {
        self.los[k1 * self.num_demanding + k2]
    }

    pub fn gains(&self) -> &[T] {
        &self.gain
    }

    /// Writes `k1,n,k2,gain` rows in tensor order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            k1: usize,
            n: usize,
            k2: usize,
            gain: f64,
        }
        let mut w = csv::Writer::from_writer(out);
        for k1 in 0..self.num_anchors {
            for n in 0..self.num_brbs {
                for k2 in 0..self.num_demanding {
                    w.serialize(Row { k1, n, k2, gain: self.gain(k1, n, k2).as_f64() })?;
                }
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Samples every link of the scenario.
///
/// Per (anchor, demanding) pair: one blockage draw and one shadowing draw,
/// shared by all mmWave BRBs of that pair. Per sub-6 BRB: an independent
/// unit-mean fade. Blocked mmWave links have zero gain. Distances under the
/// 1 m reference are evaluated at 1 m.
pub fn realize_channels<T: Real, R: Rng + ?Sized>(s: &Scenario<T>, rng: &mut R) -> ChannelRealization<T> {
    let anchors: Vec<_> = s.anchors().map(|a| a.position).collect();
    let demanding: Vec<_> = s.demanding().map(|d| d.position).collect();
    let (ka, kd) = (anchors.len(), demanding.len());
    let num_mmw = s.bands.mmw.num_brbs;
    let num_brbs = s.bands.brbs_per_anchor();

    let mut ch = ChannelRealization {
        num_anchors: ka,
        num_mmw,
        num_brbs,
        num_demanding: kd,
        gain: vec![T::zero(); ka * num_brbs * kd],
        los: vec![false; ka * kd],
    };

    let p_block = s.mmw.blockage_probability.as_f64().clamp(0.0, 1.0);
    for (k1, a) in anchors.iter().enumerate() {
        for (k2, d) in demanding.iter().enumerate() {
            let dist = a.distance(d).max(T::one());
            let blocked = rng.random::<f64>() < p_block;
            let chi = sample_mmw_shadowing(s.mmw.sigma_db, rng);
            ch.los[k1 * kd + k2] = !blocked;
            let g = if blocked {
                T::zero()
            } else {
                let loss =
                    mmw_pathloss_db(dist, s.mmw.alpha, s.mmw.beta_db, chi).expect("distance clamped to the reference");
                T::from_db(-loss)
            };
            for n in 0..num_mmw {
                *ch.gain_mut(k1, n, k2) = g;
            }
        }
    }

    for (k1, a) in anchors.iter().enumerate() {
        for n in num_mmw..num_brbs {
            for (k2, d) in demanding.iter().enumerate() {
                let dist = a.distance(d).max(T::one());
                let fade = sample_sub6_fade(rng);
                *ch.gain_mut(k1, n, k2) = sub6_gain(dist, s.sub6.pathloss_exponent, s.sub6.ref_loss_db, fade)
                    .expect("distance clamped to the reference");
            }
        }
    }
    ch
}

/// SNR/SINR and achievable rate for every (anchor, BRB, demanding) triple,
/// laid out like [`ChannelRealization`].
#[derive(Debug, Clone)]
pub struct LinkTable<T = f64> {
    shape: (usize, usize, usize),
    gamma: Vec<T>,
    rate: Vec<T>,
}

impl<T: Real> LinkTable<T> {
    pub fn new(s: &Scenario<T>, ch: &ChannelRealization<T>) -> Self {
        let (ka, nb, kd) = ch.shape();
        let psi = vec![s.tx_power_w; ka];
        let sigma2 = s.noise_power_w();
        let mut gamma = Vec::with_capacity(ka * nb * kd);
        let mut rate = Vec::with_capacity(ka * nb * kd);
        for k1 in 0..ka {
            for n in 0..nb {
                let band = ch.band_of(n);
                let omega = s.bands.get(band).brb_bandwidth_hz;
                for k2 in 0..kd {
                    let g = match band {
                        BandKind::MmWave => snr_mmw(psi[k1], ch.gain(k1, n, k2), sigma2),
                        BandKind::Sub6 => sinr_sub6(k1, n, k2, &psi, ch, sigma2).expect("n is a sub-6 BRB"),
                    };
                    gamma.push(g);
                    rate.push(brb_rate(omega, g));
                }
            }
        }
        LinkTable { shape: (ka, nb, kd), gamma, rate }
    }

    fn offset(&self, k1: usize, n: usize, k2: usize) -> usize {
        (k1 * self.shape.1 + n) * self.shape.2 + k2
    }

    pub fn gamma(&self, k1: usize, n: usize, k2: usize) -> T {
        self.gamma[self.offset(k1, n, k2)]
    }

    pub fn rate(&self, k1: usize, n: usize, k2: usize) -> T {
        self.rate[self.offset(k1, n, k2)]
    }
}
