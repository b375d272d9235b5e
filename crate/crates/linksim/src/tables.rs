//! Multiplication counts per QAM symbol over slot lengths 1 to 14.

use fcwave_core::metrics::{beta_direct, beta_simplified, complexity, ProcessingMode, SubbandCost};
use fcwave_core::Numerology;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::Result;

/// Subband layouts compared in the complexity tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Case {
    pub name: &'static str,
    pub subbands: usize,
    pub l_act: usize,
    pub n_tb: usize,
    pub l_continuous: usize,
    pub l_discontinuous: usize,
}

pub const CASES: [Case; 4] = [
    Case {
        name: "3x1PRB",
        subbands: 3,
        l_act: 12,
        n_tb: 2,
        l_continuous: 128,
        l_discontinuous: 16,
    },
    Case {
        name: "3x4PRB",
        subbands: 3,
        l_act: 48,
        n_tb: 2,
        l_continuous: 128,
        l_discontinuous: 64,
    },
    Case {
        name: "52x1PRB",
        subbands: 52,
        l_act: 12,
        n_tb: 2,
        l_continuous: 128,
        l_discontinuous: 16,
    },
    Case {
        name: "1x52PRB",
        subbands: 1,
        l_act: 624,
        n_tb: 4,
        l_continuous: 1024,
        l_discontinuous: 1024,
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub case: &'static str,
    pub scheme: String,
    pub slot_len: usize,
    pub alpha: String,
    /// Exact value as `numerator/denominator`.
    pub mults_per_qam: String,
    pub mults_per_qam_approx: f64,
    #[serde(skip)]
    pub exact: Rational64,
}

fn costs(c: &Case, l: usize) -> Vec<SubbandCost> {
    vec![
        SubbandCost {
            l,
            l_ofdm: l,
            l_act: c.l_act,
            n_tb: c.n_tb
        };
        c.subbands
    ]
}

fn show(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Continuous processing at overlaps 0.25 and 0.5 and discontinuous
/// processing with the direct and fused receivers, per case and slot length.
pub fn complexity_grid(num: &Numerology) -> Result<Vec<GridRow>> {
    let mut rows = Vec::new();
    for case in &CASES {
        for slot in 1..=14 {
            let schemes = [
                (
                    "continuous_0.25",
                    costs(case, case.l_continuous),
                    ProcessingMode::Continuous { overlap: 0.25 },
                    beta_direct(),
                ),
                (
                    "continuous_0.5",
                    costs(case, case.l_continuous),
                    ProcessingMode::Continuous { overlap: 0.5 },
                    beta_direct(),
                ),
                (
                    "discontinuous",
                    costs(case, case.l_discontinuous),
                    ProcessingMode::Discontinuous,
                    beta_direct(),
                ),
                (
                    "discontinuous_fused",
                    costs(case, case.l_discontinuous),
                    ProcessingMode::Discontinuous,
                    beta_simplified(),
                ),
            ];
            for (scheme, sb, mode, beta) in schemes {
                let r = complexity(&sb, num, mode, beta, slot)?;
                rows.push(GridRow {
                    case: case.name,
                    scheme: scheme.to_string(),
                    slot_len: slot,
                    alpha: show(r.alpha),
                    mults_per_qam: show(r.c_per_qam),
                    mults_per_qam_approx: *r.c_per_qam.numer() as f64 / *r.c_per_qam.denom() as f64,
                    exact: r.c_per_qam,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_grid<W: std::io::Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
        .map_err(|e| crate::error::SimError::io("<output>", e))?;
    Ok(())
}
