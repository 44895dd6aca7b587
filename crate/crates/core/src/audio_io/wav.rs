use std::io::{Read, Seek};
use std::path::Path;

use super::AudioClip;
use crate::error::{Error, Result};

/// PCM bit depths the loader and writer understand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BitDepth {
    #[serde(rename = "8")]
    Eight,
    #[serde(rename = "16")]
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u16 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    /// Snap an amplitude onto the integer grid of this depth.
    pub fn quantize(self, x: f64) -> f64 {
        let scale = match self {
            BitDepth::Eight => 128.0,
            BitDepth::Sixteen => 32768.0,
        };
        let q = (x * scale).round().clamp(-scale, scale - 1.0);
        q / scale
    }
}

/// Loads a mono 8-bit unsigned or 16-bit signed PCM WAV file.
///
/// 8-bit bytes map as `(b - 128) / 128`, 16-bit values as `v / 32768`, so the
/// negative rail hits `-1.0` exactly. Subject and clip ids default to empty and
/// the file stem respectively.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let clip_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_wav(std::io::BufReader::new(file), "", clip_id)
}

/// Decodes a WAV stream. See [`load_wav`].
pub fn read_wav<R: Read + Seek>(reader: R, subject_id: &str, clip_id: String) -> Result<AudioClip> {
    let mut wav = hound::WavReader::new(reader).map_err(map_hound)?;
    let spec = wav.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedWav(format!(
            "expected 1 channel, found {}",
            spec.channels
        )));
    }
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::UnsupportedWav("only integer PCM is supported".into()));
    }
    let samples: Vec<f64> = match spec.bits_per_sample {
        // hound already recentres unsigned bytes to i8 (b - 128).
        8 => wav
            .samples::<i8>()
            .map(|s| s.map(|v| v as f64 / 128.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        16 => wav
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        b => {
            return Err(Error::UnsupportedWav(format!(
                "{b}-bit samples (only 8 and 16 are supported)"
            )))
        }
    };
    if samples.is_empty() {
        return Err(Error::MalformedWav("no samples in data chunk".into()));
    }
    AudioClip::new(samples, spec.sample_rate, subject_id, clip_id)
}

fn map_hound(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::MalformedWav(io.to_string()),
        hound::Error::FormatError(m) => Error::MalformedWav(m.to_string()),
        hound::Error::Unsupported => Error::UnsupportedWav("compression or format not supported".into()),
        other => Error::MalformedWav(other.to_string()),
    }
}

/// Writes a clip as mono PCM at the given depth.
pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate(),
        bits_per_sample: depth.bits(),
        sample_format: hound::SampleFormat::Int,
    };
    let io_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::MalformedWav(other.to_string()),
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(io_err)?;
    for &s in clip.samples() {
        match depth {
            BitDepth::Eight => {
                let v = (s * 128.0).round().clamp(-128.0, 127.0) as i8;
                w.write_sample(v).map_err(io_err)?;
            }
            BitDepth::Sixteen => {
                let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                w.write_sample(v).map_err(io_err)?;
            }
        }
    }
    w.finalize().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use std::io::Cursor;

    use super::*;

    fn wav_bytes(bits: u16, channels: u16, format_tag: u16, data: &[u8]) -> Vec<u8> {
        let block_align = channels * bits / 8;
        let mut v = Vec::new();
        v.extend_from_slice(b"RIFF");
        v.extend_from_slice(&(36 + data.len() as u32).to_le_bytes());
        v.extend_from_slice(b"WAVEfmt ");
        v.extend_from_slice(&16u32.to_le_bytes());
        v.extend_from_slice(&format_tag.to_le_bytes());
        v.extend_from_slice(&channels.to_le_bytes());
        v.extend_from_slice(&8000u32.to_le_bytes());
        v.extend_from_slice(&(8000 * block_align as u32).to_le_bytes());
        v.extend_from_slice(&block_align.to_le_bytes());
        v.extend_from_slice(&bits.to_le_bytes());
        v.extend_from_slice(b"data");
        v.extend_from_slice(&(data.len() as u32).to_le_bytes());
        v.extend_from_slice(data);
        v
    }

    #[test]
    fn eight_bit_affine_map() {
        let bytes = wav_bytes(8, 1, 1, &[128, 255, 0]);
        let clip = read_wav(Cursor::new(bytes), "s1", "c".into()).unwrap();
        assert_eq!(clip.samples(), &[0.0, 0.9921875, -1.0]);
    }

    #[test]
    fn sixteen_bit_zero_maps_to_zero() {
        let data: Vec<u8> = [0i16, i16::MIN, i16::MAX]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let clip = read_wav(Cursor::new(wav_bytes(16, 1, 1, &data)), "", "c".into()).unwrap();
        assert_eq!(clip.samples()[0], 0.0);
        assert_eq!(clip.samples()[1], -1.0);
        assert!(clip.samples()[2] < 1.0);
    }

    #[test]
    fn duration_follows_sample_count() {
        let clip = read_wav(Cursor::new(wav_bytes(8, 1, 1, &[128; 4000])), "", "c".into()).unwrap();
        assert_eq!(clip.duration(), 4000.0 / 8000.0);
    }

    #[test]
    fn truncated_header_is_malformed() {
        let bytes = wav_bytes(8, 1, 1, &[1, 2, 3]);
        let err = read_wav(Cursor::new(bytes[..20].to_vec()), "", "c".into()).unwrap_err();
        assert!(err.to_string().contains("malformed WAV"), "{err}");
    }

    #[test]
    fn rejects_stereo_and_compressed() {
        let stereo = wav_bytes(8, 2, 1, &[128; 4]);
        assert!(matches!(
            read_wav(Cursor::new(stereo), "", "c".into()),
            Err(Error::UnsupportedWav(_))
        ));
        // format tag 2 = MS ADPCM
        let adpcm = wav_bytes(8, 1, 2, &[128; 4]);
        assert!(read_wav(Cursor::new(adpcm), "", "c".into()).is_err());
    }

    #[test]
    fn write_then_load_is_exact_on_grid() {
        let dir = tempfile::tempdir().unwrap();
        for depth in [BitDepth::Eight, BitDepth::Sixteen] {
            let samples: Vec<f64> = (0..257)
                .map(|i| depth.quantize(((i as f64) * 0.37).sin()))
                .collect();
            let clip = AudioClip::new(samples.clone(), 8000, "s", "c").unwrap();
            let p = dir.path().join(format!("c{}.wav", depth.bits()));
            write_wav(&p, &clip, depth).unwrap();
            assert_eq!(load_wav(&p).unwrap().samples(), &samples[..]);
        }
    }
}
