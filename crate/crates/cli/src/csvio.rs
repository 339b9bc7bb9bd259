//! CSV emit/ingest for every artifact the commands produce, plus atomic
//! file writes. All numbers are printed with 12 significant digits so that
//! reruns are byte-identical and refits reproducible.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use cqad_core::reflection::{FluxSweepMap, ReflectionSpectrum, SpectrumMeta};

use crate::CliError;

/// Format with 12 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write via a temp file in the same directory and rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp: PathBuf = path.to_path_buf();
    let mut name = path
        .file_name()
        .ok_or_else(|| CliError::runtime(format!("bad output path {}", path.display())))?
        .to_os_string();
    name.push(".tmp");
    tmp.set_file_name(name);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn spectrum_csv(spectrum: &ReflectionSpectrum) -> String {
    let mut out = String::from("frequency_hz,s11_re,s11_im,s11_abs\n");
    for (f, s) in spectrum.frequencies.iter().zip(&spectrum.s11) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            num(*f),
            num(s.re),
            num(s.im),
            num(s.norm())
        ));
    }
    out
}

pub fn read_spectrum_csv(path: &Path) -> Result<ReflectionSpectrum, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime("empty spectrum csv".into()))?;
    if header.trim() != "frequency_hz,s11_re,s11_im,s11_abs" {
        return Err(CliError::runtime(format!(
            "unexpected spectrum csv header: {header}"
        )));
    }
    let mut frequencies = Vec::new();
    let mut s11 = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CliError::runtime(format!("bad csv row {}", n + 2)));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|e| CliError::runtime(format!("row {}: {e}", n + 2)))
        };
        frequencies.push(parse(fields[0])?);
        s11.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
    }
    Ok(ReflectionSpectrum {
        frequencies,
        s11,
        meta: SpectrumMeta::default(),
    })
}

pub fn flux_map_csv(map: &FluxSweepMap) -> String {
    let mut out = String::from("current_a,frequency_hz,s11_abs\n");
    for (ci, current) in map.currents.iter().enumerate() {
        for (fi, f) in map.frequencies.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                num(*current),
                num(*f),
                num(map.get(ci, fi))
            ));
        }
    }
    out
}

pub fn read_flux_map_csv(path: &Path) -> Result<FluxSweepMap, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime("empty flux map csv".into()))?;
    if header.trim() != "current_a,frequency_hz,s11_abs" {
        return Err(CliError::runtime(format!(
            "unexpected flux map csv header: {header}"
        )));
    }
    let mut currents: Vec<f64> = Vec::new();
    let mut frequencies: Vec<f64> = Vec::new();
    let mut magnitude: Vec<f64> = Vec::new();
    let mut first_row = true;
    let mut row_freq_idx = 0_usize;
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::runtime(format!("bad csv row {}", n + 2)));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|e| CliError::runtime(format!("row {}: {e}", n + 2)))
        };
        let current = parse(fields[0])?;
        let freq = parse(fields[1])?;
        let mag = parse(fields[2])?;
        if currents.last() != Some(&current) {
            currents.push(current);
            if first_row && !frequencies.is_empty() {
                first_row = false;
            }
            row_freq_idx = 0;
        }
        if currents.len() == 1 {
            frequencies.push(freq);
        } else {
            // every row must repeat the same frequency grid
            if frequencies.get(row_freq_idx) != Some(&freq) {
                return Err(CliError::runtime(format!(
                    "row {}: frequency grid is not rectangular",
                    n + 2
                )));
            }
            row_freq_idx += 1;
        }
        magnitude.push(mag);
    }
    FluxSweepMap::new(currents, frequencies, magnitude).map_err(CliError::from)
}

pub fn read_stark_csv(path: &Path) -> Result<Vec<(f64, Vec<(f64, f64)>)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime("empty stark csv".into()))?;
    if header.trim() != "omega_q_hz,phonon,shift_hz" {
        return Err(CliError::runtime(format!(
            "unexpected stark csv header: {header}"
        )));
    }
    let mut groups: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::runtime(format!("bad csv row {}", n + 2)));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|e| CliError::runtime(format!("row {}: {e}", n + 2)))
        };
        let wq = parse(fields[0])?;
        let phonon = parse(fields[1])?;
        let shift = parse(fields[2])?;
        match groups.last_mut() {
            Some((w, points)) if *w == wq => points.push((phonon, shift)),
            _ => groups.push((wq, vec![(phonon, shift)])),
        }
    }
    Ok(groups)
}
