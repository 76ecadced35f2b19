//! Frequency grids, per-source spectra and CSV export.

use std::io::{self, Write};

use super::NoiseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Logarithmic,
    Linear,
}

/// Strictly increasing, positive frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl FrequencyGrid {
    pub fn logarithmic(f_min: f64, f_max: f64, n: usize) -> Result<Self, NoiseError> {
        Self::check_range(f_min, f_max, n)?;
        let (a, b) = (f_min.ln(), f_max.ln());
        let mut points: Vec<f64> = (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect();
        // pin the end points against round-off in exp(ln(x))
        points[0] = f_min;
        points[n - 1] = f_max;
        Self::from_points(points, Spacing::Logarithmic)
    }

    pub fn linear(f_min: f64, f_max: f64, n: usize) -> Result<Self, NoiseError> {
        Self::check_range(f_min, f_max, n)?;
        let step = (f_max - f_min) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| f_min + step * i as f64).collect();
        points[n - 1] = f_max;
        Self::from_points(points, Spacing::Linear)
    }

    pub fn from_points(points: Vec<f64>, spacing: Spacing) -> Result<Self, NoiseError> {
        if points.is_empty() {
            return Err(NoiseError::InvalidGrid("grid has no points".into()));
        }
        if let Some(p) = points.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(NoiseError::InvalidGrid(format!(
                "frequency {p} is not positive and finite"
            )));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NoiseError::InvalidGrid(
                "frequencies must be strictly increasing".into(),
            ));
        }
        Ok(FrequencyGrid { points, spacing })
    }

    fn check_range(f_min: f64, f_max: f64, n: usize) -> Result<(), NoiseError> {
        if n < 2 {
            return Err(NoiseError::InvalidGrid(format!(
                "need at least 2 points, got {n}"
            )));
        }
        if !(f_min > 0.0 && f_min.is_finite() && f_max.is_finite() && f_min < f_max) {
            return Err(NoiseError::InvalidGrid(format!(
                "need 0 < f_min < f_max, got f_min = {f_min}, f_max = {f_max}"
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

/// Budget entries, in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseSource {
    Sql,
    Shot,
    RadiationPressure,
    QuantumTotal,
    BrownianSubstrate,
    BrownianCoating,
    BrownianTotal,
    GasThermal,
    LaserFrequency,
    LaserIntensity,
    Seismic,
    ClassicalTotal,
    GrandTotal,
}

impl NoiseSource {
    pub const ALL: [NoiseSource; 13] = [
        NoiseSource::Sql,
        NoiseSource::Shot,
        NoiseSource::RadiationPressure,
        NoiseSource::QuantumTotal,
        NoiseSource::BrownianSubstrate,
        NoiseSource::BrownianCoating,
        NoiseSource::BrownianTotal,
        NoiseSource::GasThermal,
        NoiseSource::LaserFrequency,
        NoiseSource::LaserIntensity,
        NoiseSource::Seismic,
        NoiseSource::ClassicalTotal,
        NoiseSource::GrandTotal,
    ];

    /// Independent classical contributions summed into `ClassicalTotal`.
    pub const CLASSICAL: [NoiseSource; 6] = [
        NoiseSource::BrownianSubstrate,
        NoiseSource::BrownianCoating,
        NoiseSource::GasThermal,
        NoiseSource::LaserFrequency,
        NoiseSource::LaserIntensity,
        NoiseSource::Seismic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseSource::Sql => "sql",
            NoiseSource::Shot => "shot",
            NoiseSource::RadiationPressure => "radiation_pressure",
            NoiseSource::QuantumTotal => "quantum_total",
            NoiseSource::BrownianSubstrate => "brownian_substrate",
            NoiseSource::BrownianCoating => "brownian_coating",
            NoiseSource::BrownianTotal => "brownian_total",
            NoiseSource::GasThermal => "gas_thermal",
            NoiseSource::LaserFrequency => "laser_frequency",
            NoiseSource::LaserIntensity => "laser_intensity",
            NoiseSource::Seismic => "seismic",
            NoiseSource::ClassicalTotal => "classical_total",
            NoiseSource::GrandTotal => "grand_total",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for NoiseSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Displacement PSD (m²/Hz) of one source on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub source: NoiseSource,
    pub grid: FrequencyGrid,
    pub psd: Vec<f64>,
}

impl NoiseSpectrum {
    pub fn new(source: NoiseSource, grid: FrequencyGrid, psd: Vec<f64>) -> Result<Self, NoiseError> {
        assert_eq!(grid.len(), psd.len(), "spectrum length must match its grid");
        if let Some((index, &value)) = psd
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(NoiseError::InvalidSpectrum {
                kind: source,
                frequency: grid.points()[index],
                value,
            });
        }
        Ok(NoiseSpectrum { source, grid, psd })
    }

    /// Spectrum from a closed-form point evaluator.
    pub fn from_fn(
        source: NoiseSource,
        grid: &FrequencyGrid,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, NoiseError> {
        let psd = grid.points().iter().map(|&x| f(x)).collect();
        Self::new(source, grid.clone(), psd)
    }

    pub fn asd(&self) -> Vec<f64> {
        self.psd.iter().map(|p| p.sqrt()).collect()
    }

    pub fn len(&self) -> usize {
        self.psd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psd.is_empty()
    }
}

/// Writes `frequency_hz` followed by one ASD column per spectrum, ordered by
/// source. Values use 9 significant digits in scientific notation.
pub fn write_asd_csv<W: Write>(mut out: W, spectra: &[NoiseSpectrum]) -> io::Result<()> {
    let mut cols: Vec<&NoiseSpectrum> = spectra.iter().collect();
    cols.sort_by_key(|s| s.source);
    let Some(first) = cols.first() else {
        return writeln!(out, "frequency_hz");
    };
    let grid = &first.grid;
    write!(out, "frequency_hz")?;
    for s in &cols {
        assert_eq!(&s.grid, grid, "all spectra must share one grid");
        write!(out, ",{}", s.source)?;
    }
    writeln!(out)?;
    for (i, f) in grid.points().iter().enumerate() {
        write!(out, "{f:.8e}")?;
        for s in &cols {
            write!(out, ",{:.8e}", s.psd[i].sqrt())?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints_and_order() {
        let g = FrequencyGrid::logarithmic(10.0, 1e6, 1000).unwrap();
        assert_eq!(g.len(), 1000);
        assert_eq!(g.first(), 10.0);
        assert_eq!(g.last(), 1e6);
        assert!(g.points().windows(2).all(|w| w[1] > w[0]));
        let r0 = g.points()[1] / g.points()[0];
        let r1 = g.points()[999] / g.points()[998];
        assert!((r0 / r1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grid_preconditions() {
        assert!(FrequencyGrid::logarithmic(10.0, 10.0, 5).is_err());
        assert!(FrequencyGrid::logarithmic(0.0, 10.0, 5).is_err());
        assert!(FrequencyGrid::linear(1.0, 10.0, 1).is_err());
        assert!(FrequencyGrid::from_points(vec![1.0, 1.0], Spacing::Linear).is_err());
        let g = FrequencyGrid::linear(1.0, 2.0, 2).unwrap();
        assert_eq!(g.points(), &[1.0, 2.0]);
    }

    #[test]
    fn negative_psd_rejected() {
        let g = FrequencyGrid::linear(1.0, 2.0, 2).unwrap();
        let e = NoiseSpectrum::new(NoiseSource::Shot, g, vec![1.0, -1.0]).unwrap_err();
        assert!(matches!(e, NoiseError::InvalidSpectrum { frequency, .. } if frequency == 2.0));
    }

    #[test]
    fn csv_columns_follow_enum_order() {
        let g = FrequencyGrid::linear(1.0, 2.0, 2).unwrap();
        let a = NoiseSpectrum::new(NoiseSource::Seismic, g.clone(), vec![4.0, 9.0]).unwrap();
        let b = NoiseSpectrum::new(NoiseSource::Sql, g, vec![1.0, 0.25]).unwrap();
        let mut buf = Vec::new();
        write_asd_csv(&mut buf, &[a, b]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "frequency_hz,sql,seismic");
        assert_eq!(lines[1], "1.00000000e0,1.00000000e0,2.00000000e0");
        assert_eq!(lines[2], "2.00000000e0,5.00000000e-1,3.00000000e0");
    }

    #[test]
    fn source_labels_are_unique() {
        let mut names: Vec<&str> = NoiseSource::ALL.iter().map(|s| s.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 13);
        for (i, s) in NoiseSource::ALL.iter().enumerate() {
            assert_eq!(s.index(), i);
        }
    }
}
