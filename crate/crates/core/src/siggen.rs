//! Synthesis of modulated baseband segments, AWGN injection, and dataset I/O.
//!
//! All generation is a pure function of its arguments and a seed: the same
//! call always yields byte-identical samples. Segments store interleaved
//! 32-bit I/Q samples; waveform math runs in f64 and is quantized once at
//! segment construction so that file round-trips are bit-exact.
//!
//! Fixed modulator conventions:
//! - ASK (4ASK/8ASK): bipolar uniformly spaced levels, e.g. {±1, ±3}/√5.
//! - PAM (4PAM/16PAM): unipolar uniformly spaced levels {0..M−1}, normalized.
//! - OOK: {0, √2}.
//! - DQPSK: differentially encoded QPSK starting at π/4.
//! - OQPSK: QPSK with the quadrature arm delayed by sps/2 samples.
//! - CPFSK: binary, modulation index h = 0.5.
//! - GMSK: Gaussian pulse BT = 0.3, span 4 symbols, h = 0.5.
//! - GFSK: same Gaussian pulse, h = 1.0 (keeps it separable from GMSK).
//! - Linear schemes use a rectangular pulse.
//!
//! Every amplitude alphabet is normalized to unit ensemble power.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex32;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::ModulationLabel;

/// Current on-disk manifest schema.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// A complex baseband segment with its generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct IQSegment {
    /// Complex samples (I, Q) at 32-bit precision.
    pub samples: Vec<Complex32>,
    pub label: ModulationLabel,
    /// Signal-to-noise ratio in dB; `f64::INFINITY` marks a noiseless segment.
    pub snr_db: f64,
    /// Samples per symbol.
    pub sps: u32,
}

impl IQSegment {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of |x|² over the segment, in f64.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|s| (s.re as f64) * (s.re as f64) + (s.im as f64) * (s.im as f64))
            .sum::<f64>()
            / self.samples.len() as f64
    }
}

/// One dataset entry; `file` is relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub label: ModulationLabel,
    #[serde(with = "snr_db_serde")]
    pub snr_db: f64,
    pub n: usize,
    pub sps: u32,
    pub seed: u64,
}

/// Index of the binary sample files making up a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub entries: Vec<ManifestEntry>,
}

/// JSON null ⇄ +infinity so noiseless segments survive serialization.
pub(crate) mod snr_db_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// SplitMix64-style mix of a master seed and an entry index.
///
/// Stated so that per-entry generation is parallelism-invariant: entry seeds
/// depend only on (master, index), never on generation order.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform SNR grid from `lo` to `hi` inclusive.
pub fn snr_grid(lo_db: f64, hi_db: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo_db];
    }
    (0..steps)
        .map(|i| lo_db + (hi_db - lo_db) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Real amplitude alphabet for the linear schemes, normalized to unit
/// ensemble power. Returns `None` for phase/frequency modulations.
pub fn amplitude_alphabet(label: ModulationLabel) -> Option<Vec<f64>> {
    let raw: Vec<f64> = match label {
        ModulationLabel::Ook => vec![0.0, 1.0],
        ModulationLabel::Ask4 => vec![-3.0, -1.0, 1.0, 3.0],
        ModulationLabel::Ask8 => (0..8).map(|k| (2 * k - 7) as f64).collect(),
        ModulationLabel::Pam4 => (0..4).map(|k| k as f64).collect(),
        ModulationLabel::Pam16 => (0..16).map(|k| k as f64).collect(),
        _ => return None,
    };
    let power = raw.iter().map(|a| a * a).sum::<f64>() / raw.len() as f64;
    let scale = 1.0 / power.sqrt();
    Some(raw.iter().map(|a| a * scale).collect())
}

fn validate_shape(n_symbols: usize, sps: u32) -> Result<()> {
    if n_symbols < 64 {
        return Err(Error::invalid(format!(
            "n_symbols must be >= 64, got {n_symbols}"
        )));
    }
    if !(1..=64).contains(&sps) {
        return Err(Error::invalid(format!("sps must be in [1, 64], got {sps}")));
    }
    Ok(())
}

/// Generate a noiseless segment of `n_symbols * sps` samples.
pub fn modulate(
    label: ModulationLabel,
    n_symbols: usize,
    sps: u32,
    seed: u64,
) -> Result<IQSegment> {
    validate_shape(n_symbols, sps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sps_us = sps as usize;
    let n = n_symbols * sps_us;

    let samples: Vec<Complex32> = match label {
        ModulationLabel::Ook
        | ModulationLabel::Ask4
        | ModulationLabel::Ask8
        | ModulationLabel::Pam4
        | ModulationLabel::Pam16 => {
            let alphabet = amplitude_alphabet(label).expect("linear alphabet");
            let mut out = Vec::with_capacity(n);
            for _ in 0..n_symbols {
                let level = alphabet[rng.gen_range(0..alphabet.len())];
                out.extend(std::iter::repeat(Complex32::new(level as f32, 0.0)).take(sps_us));
            }
            out
        }
        ModulationLabel::Dqpsk => {
            let mut out = Vec::with_capacity(n);
            let mut phase = std::f64::consts::FRAC_PI_4;
            for _ in 0..n_symbols {
                let step = rng.gen_range(0u8..4) as f64;
                phase += step * std::f64::consts::FRAC_PI_2;
                let s = Complex32::new(phase.cos() as f32, phase.sin() as f32);
                out.extend(std::iter::repeat(s).take(sps_us));
            }
            out
        }
        ModulationLabel::Oqpsk => {
            let scale = std::f64::consts::FRAC_1_SQRT_2;
            let mut i_stream = Vec::with_capacity(n);
            let mut q_stream = Vec::with_capacity(n);
            for _ in 0..n_symbols {
                let i_bit = if rng.gen::<bool>() { scale } else { -scale };
                let q_bit = if rng.gen::<bool>() { scale } else { -scale };
                i_stream.extend(std::iter::repeat(i_bit).take(sps_us));
                q_stream.extend(std::iter::repeat(q_bit).take(sps_us));
            }
            // Delay the quadrature arm by half a symbol, holding its first value.
            let delay = sps_us / 2;
            (0..n)
                .map(|idx| {
                    let q = q_stream[idx.saturating_sub(delay)];
                    Complex32::new(i_stream[idx] as f32, q as f32)
                })
                .collect()
        }
        ModulationLabel::Cpfsk => frequency_modulate(&nrz_bits(&mut rng, n_symbols, sps_us), 0.5, sps_us),
        ModulationLabel::Gmsk => {
            let nrz = gaussian_filtered_nrz(&mut rng, n_symbols, sps_us, 0.3, 4);
            frequency_modulate(&nrz, 0.5, sps_us)
        }
        ModulationLabel::Gfsk => {
            let nrz = gaussian_filtered_nrz(&mut rng, n_symbols, sps_us, 0.3, 4);
            frequency_modulate(&nrz, 1.0, sps_us)
        }
    };

    Ok(IQSegment {
        samples,
        label,
        snr_db: f64::INFINITY,
        sps,
    })
}

/// Rectangular ±1 frequency waveform at `sps` samples per symbol.
fn nrz_bits(rng: &mut ChaCha8Rng, n_symbols: usize, sps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_symbols * sps);
    for _ in 0..n_symbols {
        let bit = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        out.extend(std::iter::repeat(bit).take(sps));
    }
    out
}

/// ±1 NRZ convolved with a truncated Gaussian kernel (unit DC gain).
fn gaussian_filtered_nrz(
    rng: &mut ChaCha8Rng,
    n_symbols: usize,
    sps: usize,
    bt: f64,
    span_symbols: usize,
) -> Vec<f64> {
    let nrz = nrz_bits(rng, n_symbols, sps);
    let half = span_symbols * sps / 2;
    let sigma = (2.0f64.ln()).sqrt() / (2.0 * std::f64::consts::PI * bt);
    let mut kernel: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let t = (i as f64 - half as f64) / sps as f64;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }

    let n = nrz.len();
    // Same-size convolution with edge replication.
    (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, k)| {
                    let idx = (i + j).saturating_sub(half).min(n - 1);
                    k * nrz[idx]
                })
                .sum()
        })
        .collect()
}

/// Integrate a frequency waveform into a constant-envelope phase signal.
///
/// Each symbol of sustained ±1 frequency advances the phase by ±π·h.
fn frequency_modulate(freq: &[f64], h: f64, sps: usize) -> Vec<Complex32> {
    let step = std::f64::consts::PI * h / sps as f64;
    let mut phase = 0.0f64;
    freq.iter()
        .map(|f| {
            phase += step * f;
            Complex32::new(phase.cos() as f32, phase.sin() as f32)
        })
        .collect()
}

/// Add circularly symmetric complex Gaussian noise at the requested SNR.
///
/// Noise power is `P_signal / 10^(snr_db/10)` with `P_signal` measured from
/// the input. An infinite `snr_db` returns the input samples unchanged.
pub fn add_awgn(seg: &IQSegment, snr_db: f64, seed: u64) -> Result<IQSegment> {
    if seg.is_empty() {
        return Err(Error::invalid("cannot add noise to an empty segment"));
    }
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(IQSegment {
            samples: seg.samples.clone(),
            label: seg.label,
            snr_db,
            sps: seg.sps,
        });
    }
    if snr_db.is_nan() {
        return Err(Error::invalid("snr_db must not be NaN"));
    }

    let p_signal = seg.mean_power();
    let p_noise = p_signal / 10f64.powf(snr_db / 10.0);
    let sigma = (p_noise / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let samples = seg
        .samples
        .iter()
        .map(|s| {
            let ni: f64 = rng.sample(StandardNormal);
            let nq: f64 = rng.sample(StandardNormal);
            Complex32::new(
                (s.re as f64 + sigma * ni) as f32,
                (s.im as f64 + sigma * nq) as f32,
            )
        })
        .collect();

    Ok(IQSegment {
        samples,
        label: seg.label,
        snr_db,
        sps: seg.sps,
    })
}

/// Generate `per_class` noisy segments for each class, cycling SNRs from
/// `snr_grid_db` per class, and write samples plus `manifest.json` under
/// `out_dir`.
pub fn generate_dataset(
    classes: &[ModulationLabel],
    per_class: usize,
    snr_grid_db: &[f64],
    n_symbols: usize,
    sps: u32,
    master_seed: u64,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    if classes.is_empty() {
        return Err(Error::invalid("classes must be nonempty"));
    }
    if per_class == 0 {
        return Err(Error::invalid("per_class must be >= 1"));
    }
    if snr_grid_db.is_empty() {
        return Err(Error::invalid("snr_grid must be nonempty"));
    }
    validate_shape(n_symbols, sps)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut entries = Vec::with_capacity(classes.len() * per_class);
    let mut index = 0u64;
    for &label in classes {
        for j in 0..per_class {
            let snr_db = snr_grid_db[j % snr_grid_db.len()];
            let entry_seed = mix_seed(master_seed, index);
            let clean = modulate(label, n_symbols, sps, mix_seed(entry_seed, 0))?;
            let noisy = add_awgn(&clean, snr_db, mix_seed(entry_seed, 1))?;

            let id = format!("{}_{:04}", label, j);
            let file = format!("{id}.iq");
            write_segment_file(&out_dir.join(&file), &noisy.samples)?;
            entries.push(ManifestEntry {
                id,
                file,
                label,
                snr_db,
                n: noisy.len(),
                sps,
                seed: entry_seed,
            });
            index += 1;
        }
    }

    let manifest = DatasetManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        entries,
    };
    save_manifest(out_dir, &manifest)?;
    Ok(manifest)
}

/// Write interleaved little-endian f32 I,Q pairs.
pub fn write_segment_file(path: &Path, samples: &[Complex32]) -> Result<()> {
    let mut bytes = Vec::with_capacity(samples.len() * 8);
    for s in samples {
        bytes.extend_from_slice(&s.re.to_le_bytes());
        bytes.extend_from_slice(&s.im.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Load one manifest entry's samples from `dir`, validating the byte count.
pub fn load_segment(dir: &Path, entry: &ManifestEntry) -> Result<IQSegment> {
    let path = dir.join(&entry.file);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    if bytes.len() != entry.n * 8 {
        return Err(Error::format(
            &path,
            format!("expected {} bytes for n={}, found {}", entry.n * 8, entry.n, bytes.len()),
        ));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex32::new(re, im)
        })
        .collect();
    Ok(IQSegment {
        samples,
        label: entry.label,
        snr_db: entry.snr_db,
        sps: entry.sps,
    })
}

/// Write `manifest.json` into `dir` and return its path.
pub fn save_manifest(dir: &Path, manifest: &DatasetManifest) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::format(&path, e.to_string()))?;
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Load and version-check a manifest file.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(Error::format(
            path,
            format!(
                "unsupported manifest schema_version {} (supported: {})",
                manifest.schema_version, MANIFEST_SCHEMA_VERSION
            ),
        ));
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn alphabets_have_unit_ensemble_power() {
        for label in ModulationLabel::ALL {
            if let Some(alphabet) = amplitude_alphabet(label) {
                let power =
                    alphabet.iter().map(|a| a * a).sum::<f64>() / alphabet.len() as f64;
                assert!(
                    (power - 1.0).abs() < 1e-9,
                    "{label}: ensemble power {power}"
                );
            }
        }
    }

    #[test]
    fn ook_alphabet_is_zero_and_sqrt2() {
        let alphabet = amplitude_alphabet(ModulationLabel::Ook).unwrap();
        assert_eq!(alphabet[0], 0.0);
        assert!((alphabet[1] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ook_takes_exactly_two_levels_one_zero() {
        let seg = modulate(ModulationLabel::Ook, 256, 8, 11).unwrap();
        let levels: BTreeSet<u32> = seg.samples.iter().map(|s| s.re.to_bits()).collect();
        assert_eq!(levels.len(), 2);
        assert!(seg.samples.iter().all(|s| s.im == 0.0));
        assert!(seg.samples.iter().any(|s| s.re == 0.0));
    }

    #[test]
    fn constant_envelope_families_stay_on_unit_circle() {
        for label in [
            ModulationLabel::Gmsk,
            ModulationLabel::Gfsk,
            ModulationLabel::Cpfsk,
        ] {
            let seg = modulate(label, 256, 8, 5).unwrap();
            let worst = seg
                .samples
                .iter()
                .map(|s| ((s.norm() as f64) - 1.0).abs())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-6, "{label}: envelope deviation {worst}");
        }
    }

    #[test]
    fn ask4_sample_power_near_unity() {
        let seg = modulate(ModulationLabel::Ask4, 4096, 1, 3).unwrap();
        assert!((seg.mean_power() - 1.0).abs() < 0.05);
    }

    #[test]
    fn modulate_is_deterministic() {
        for label in ModulationLabel::ALL {
            let a = modulate(label, 64, 4, 99).unwrap();
            let b = modulate(label, 64, 4, 99).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn modulate_rejects_bad_shapes() {
        assert!(modulate(ModulationLabel::Ook, 63, 8, 0).is_err());
        assert!(modulate(ModulationLabel::Ook, 64, 0, 0).is_err());
        assert!(modulate(ModulationLabel::Ook, 64, 65, 0).is_err());
    }

    #[test]
    fn segment_length_is_symbols_times_sps() {
        let seg = modulate(ModulationLabel::Dqpsk, 128, 4, 0).unwrap();
        assert_eq!(seg.len(), 128 * 4);
    }

    #[test]
    fn oqpsk_at_sps1_reduces_to_qpsk_grid() {
        let seg = modulate(ModulationLabel::Oqpsk, 256, 1, 17).unwrap();
        for s in &seg.samples {
            assert!(((s.norm() as f64) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn awgn_infinite_snr_is_identity() {
        let seg = modulate(ModulationLabel::Gmsk, 64, 2, 1).unwrap();
        let out = add_awgn(&seg, f64::INFINITY, 42).unwrap();
        assert_eq!(out.samples, seg.samples);
        assert!(out.snr_db.is_infinite());
    }

    #[test]
    fn awgn_noise_power_matches_request() {
        let seg = modulate(ModulationLabel::Gmsk, 2048, 8, 7).unwrap();
        assert_eq!(seg.len(), 16384);
        for (snr_db, expected) in [(0.0, 1.0), (-10.0, 10.0)] {
            let noisy = add_awgn(&seg, snr_db, 123).unwrap();
            let measured: f64 = seg
                .samples
                .iter()
                .zip(&noisy.samples)
                .map(|(a, b)| {
                    let dr = (b.re - a.re) as f64;
                    let di = (b.im - a.im) as f64;
                    dr * dr + di * di
                })
                .sum::<f64>()
                / seg.len() as f64;
            assert!(
                (measured - expected).abs() / expected < 0.02,
                "snr {snr_db}: noise power {measured}, expected {expected}"
            );
        }
    }

    #[test]
    fn awgn_measured_snr_within_tolerance() {
        for label in [ModulationLabel::Ask4, ModulationLabel::Gfsk] {
            let seg = modulate(label, 2048, 8, 21).unwrap();
            for snr_db in [-10.0, 0.0, 10.0] {
                let noisy = add_awgn(&seg, snr_db, 77).unwrap();
                let p_sig = seg.mean_power();
                let p_noise: f64 = seg
                    .samples
                    .iter()
                    .zip(&noisy.samples)
                    .map(|(a, b)| {
                        let dr = (b.re - a.re) as f64;
                        let di = (b.im - a.im) as f64;
                        dr * dr + di * di
                    })
                    .sum::<f64>()
                    / seg.len() as f64;
                let measured_db = 10.0 * (p_sig / p_noise).log10();
                assert!(
                    (measured_db - snr_db).abs() < 0.2,
                    "{label} at {snr_db} dB: measured {measured_db}"
                );
            }
        }
    }

    #[test]
    fn dataset_paper_protocol_has_200_entries() {
        let dir = tempfile::tempdir().unwrap();
        let grid = snr_grid(-10.0, 10.0, 21);
        let manifest = generate_dataset(
            &ModulationLabel::ALL,
            20,
            &grid,
            64,
            2,
            7,
            dir.path(),
        )
        .unwrap();
        assert_eq!(manifest.entries.len(), 200);
        for entry in &manifest.entries {
            let meta = std::fs::metadata(dir.path().join(&entry.file)).unwrap();
            assert_eq!(meta.len() as usize, entry.n * 8);
        }
    }

    #[test]
    fn dataset_single_entry() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = generate_dataset(
            &[ModulationLabel::Ook],
            1,
            &[0.0],
            64,
            1,
            1,
            dir.path(),
        )
        .unwrap();
        assert_eq!(manifest.entries.len(), 1);
        assert_eq!(manifest.entries[0].snr_db, 0.0);
    }

    #[test]
    fn dataset_generation_is_byte_identical() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let grid = [0.0, 5.0];
        let classes = [ModulationLabel::Ook, ModulationLabel::Gmsk];
        let ma = generate_dataset(&classes, 3, &grid, 64, 2, 99, dir_a.path()).unwrap();
        let mb = generate_dataset(&classes, 3, &grid, 64, 2, 99, dir_b.path()).unwrap();
        assert_eq!(ma, mb);
        for entry in &ma.entries {
            let a = std::fs::read(dir_a.path().join(&entry.file)).unwrap();
            let b = std::fs::read(dir_b.path().join(&entry.file)).unwrap();
            assert_eq!(a, b, "sample file {} differs", entry.file);
        }
        let ja = std::fs::read(dir_a.path().join("manifest.json")).unwrap();
        let jb = std::fs::read(dir_b.path().join("manifest.json")).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn segment_file_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let seg = add_awgn(&modulate(ModulationLabel::Dqpsk, 64, 2, 3).unwrap(), 5.0, 9).unwrap();
        let entry = ManifestEntry {
            id: "t".into(),
            file: "t.iq".into(),
            label: seg.label,
            snr_db: seg.snr_db,
            n: seg.len(),
            sps: seg.sps,
            seed: 3,
        };
        write_segment_file(&dir.path().join("t.iq"), &seg.samples).unwrap();
        let loaded = load_segment(dir.path(), &entry).unwrap();
        assert_eq!(loaded, seg);
    }

    #[test]
    fn truncated_file_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let seg = modulate(ModulationLabel::Ook, 64, 1, 0).unwrap();
        write_segment_file(&dir.path().join("t.iq"), &seg.samples).unwrap();
        let bytes = std::fs::read(dir.path().join("t.iq")).unwrap();
        std::fs::write(dir.path().join("t.iq"), &bytes[..bytes.len() - 4]).unwrap();
        let entry = ManifestEntry {
            id: "t".into(),
            file: "t.iq".into(),
            label: seg.label,
            snr_db: f64::INFINITY,
            n: seg.len(),
            sps: 1,
            seed: 0,
        };
        let err = load_segment(dir.path(), &entry).unwrap_err();
        assert!(err.to_string().contains("t.iq"));
    }

    #[test]
    fn unsupported_manifest_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        std::fs::write(&path, r#"{"schema_version": 99, "entries": []}"#).unwrap();
        let err = load_manifest(&path).unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }

    #[test]
    fn infinite_snr_survives_manifest_round_trip() {
        let entry = ManifestEntry {
            id: "x".into(),
            file: "x.iq".into(),
            label: ModulationLabel::Ook,
            snr_db: f64::INFINITY,
            n: 1,
            sps: 1,
            seed: 0,
        };
        let manifest = DatasetManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            entries: vec![entry],
        };
        let json = serde_json::to_string(&manifest).unwrap();
        let back: DatasetManifest = serde_json::from_str(&json).unwrap();
        assert!(back.entries[0].snr_db.is_infinite());
    }

    #[test]
    fn mix_seed_spreads_indices() {
        let seeds: BTreeSet<u64> = (0..1000).map(|i| mix_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn snr_grid_endpoints() {
        let grid = snr_grid(-10.0, 10.0, 21);
        assert_eq!(grid.len(), 21);
        assert_eq!(grid[0], -10.0);
        assert_eq!(grid[20], 10.0);
        assert_eq!(grid[10], 0.0);
        assert_eq!(snr_grid(3.0, 9.0, 1), vec![3.0]);
    }
}
