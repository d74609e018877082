//! Return assumptions, the eight fixed-horizon scenarios and the five standard starting glidepaths.

use crate::error::{Error, Result};
use crate::io::{ControlFile, EstimatorSpec};
use crate::optimizer::Method;
use crate::portfolio::ReturnParams;

/// Historical real returns (stocks and 10-year Treasuries, 1928-2013) at full precision.
pub const HISTORICAL: ReturnParams = ReturnParams {
    mu_s: 0.082509,
    sigma2_s: 0.0402696529,
    mu_b: 0.021409,
    sigma2_b: 0.0069605649,
    cov_sb: 0.0007344180,
    expense_ratio: 0.0,
};

/// Lower forward-looking real-return assumptions.
pub const EVENSKY: ReturnParams = ReturnParams {
    mu_s: 0.055,
    sigma2_s: 0.042849,
    mu_b: 0.0175,
    sigma2_b: 0.004225,
    cov_sb: 0.0040365,
    expense_ratio: 0.0,
};

/// One fixed-horizon optimization scenario with its reference run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub number: u8,
    pub params: ReturnParams,
    pub horizon: usize,
    pub withdrawal_rate: f64,
    pub method: Method,
    pub epsilon: f64,
    pub precision: u32,
    pub rf_max: f64,
}

impl Scenario {
    /// Control file with dynamic-programming estimation at the reference precision.
    pub fn control(&self) -> ControlFile {
        ControlFile {
            params: self.params,
            horizon: self.horizon,
            withdrawal_rate: self.withdrawal_rate,
            epsilon: self.epsilon,
            method: self.method,
            estimator: EstimatorSpec::Dp { precision: self.precision, rf_max: self.rf_max },
        }
    }
}

/// Scenario `number` in 1..=8.
pub fn scenario(number: u8) -> Result<Scenario> {
    let (base, wr, er) = match number {
        1 => (HISTORICAL, 0.04, 0.0),
        2 => (HISTORICAL, 0.04, 0.01),
        3 => (EVENSKY, 0.04, 0.0),
        4 => (EVENSKY, 0.04, 0.01),
        5 => (HISTORICAL, 0.05, 0.0),
        6 => (HISTORICAL, 0.05, 0.01),
        7 => (EVENSKY, 0.05, 0.0),
        8 => (EVENSKY, 0.05, 0.01),
        _ => return Err(Error::InvalidParams(format!("scenario {number} is not in 1..=8"))),
    };
    let boundary = number == 8;
    Ok(Scenario {
        number,
        params: ReturnParams { expense_ratio: er, ..base },
        horizon: 30,
        withdrawal_rate: wr,
        method: if boundary { Method::GradientAscent } else { Method::Newton },
        epsilon: if boundary { 1.3e-9 } else { 1e-11 },
        precision: if boundary { 10_000 } else { 5_000 },
        rf_max: 2.75,
    })
}

/// The five standard 30-year starting glidepaths: rising, declining, constant and two random ones.
pub fn starting_glidepaths() -> [(&'static str, [f64; 30]); 5] {
    [
        ("rising", RISING),
        ("declining", DECLINING),
        ("constant", CONSTANT),
        ("random-1", RANDOM_1),
        ("random-2", RANDOM_2),
    ]
}

pub const RISING: [f64; 30] = [
    0.305, 0.315, 0.325, 0.335, 0.345, 0.355, 0.365, 0.375, 0.385, 0.395, 0.405, 0.415, 0.425, 0.435, 0.445, 0.455,
    0.465, 0.475, 0.485, 0.495, 0.505, 0.515, 0.525, 0.535, 0.545, 0.555, 0.565, 0.575, 0.585, 0.595,
];

pub const DECLINING: [f64; 30] = [
    0.595, 0.585, 0.575, 0.565, 0.555, 0.545, 0.535, 0.525, 0.515, 0.505, 0.495, 0.485, 0.475, 0.465, 0.455, 0.445,
    0.435, 0.425, 0.415, 0.405, 0.395, 0.385, 0.375, 0.365, 0.355, 0.345, 0.335, 0.325, 0.315, 0.305,
];

pub const CONSTANT: [f64; 30] = [
    0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450,
    0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450, 0.450,
];

pub const RANDOM_1: [f64; 30] = [
    0.636, 0.214, 0.193, 0.637, 0.626, 0.597, 0.943, 0.877, 0.254, 0.823, 0.903, 0.294, 0.444, 0.513, 0.529, 0.160,
    0.564, 0.293, 0.698, 0.228, 0.311, 0.776, 0.689, 0.764, 0.596, 0.793, 0.911, 0.624, 0.709, 0.205,
];

pub const RANDOM_2: [f64; 30] = [
    0.813, 0.886, 0.227, 0.684, 0.328, 0.379, 0.484, 0.145, 0.763, 0.284, 0.690, 0.476, 0.876, 0.649, 0.147, 0.643,
    0.521, 0.662, 0.161, 0.864, 0.867, 0.332, 0.281, 0.224, 0.471, 0.777, 0.922, 0.880, 0.295, 0.860,
];

/// Optimum reported for a scenario at its reference precision, used as a regression target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptimum {
    pub probability: f64,
    pub glidepath: [f64; 30],
}

/// Reported optimum for scenarios 1, 4, 7 and 8.
pub fn reference_optimum(number: u8) -> Option<ReferenceOptimum> {
    let (probability, glidepath) = match number {
        1 => (0.9196892347, REFERENCE_1),
        4 => (0.5998654133, REFERENCE_4),
        7 => (0.527952155270, REFERENCE_7),
        8 => (0.4322869545, REFERENCE_8),
        _ => return None,
    };
    Some(ReferenceOptimum { probability, glidepath })
}

const REFERENCE_1: [f64; 30] = [
    0.3684826900,
    0.3782146268,
    0.3884336499,
    0.3991332015,
    0.4103025899,
    0.4219268946,
    0.4339869745,
    0.4464596018,
    0.4593177397,
    0.4725309778,
    0.4860661326,
    0.4998880110,
    0.5139603274,
    0.5282467547,
    0.5427120841,
    0.5573234631,
    0.5720516836,
    0.5868724955,
    0.6017679310,
    0.6167276424,
    0.6317502766,
    0.6468449369,
    0.6620328225,
    0.6773491818,
    0.6928457918,
    0.7085942800,
    0.7246907811,
    0.7412627184,
    0.7584790253,
    0.7765660632,
];

const REFERENCE_4: [f64; 30] = [
    0.5706001278,
    0.5927784900,
    0.6129556047,
    0.6304850727,
    0.6448803856,
    0.6558717793,
    0.6634184339,
    0.6676782655,
    0.6689517784,
    0.6676200346,
    0.6640914236,
    0.6587636517,
    0.6520009401,
    0.6441232226,
    0.6354034439,
    0.6260696330,
    0.6163093765,
    0.6062751824,
    0.5960898717,
    0.5858515575,
    0.5756380295,
    0.5655105044,
    0.5555167779,
    0.5456938428,
    0.5360700508,
    0.5266668922,
    0.5175004623,
    0.5085826720,
    0.4999222574,
    0.4915256292,
];

const REFERENCE_7: [f64; 30] = [
    0.8235272966,
    0.8617503896,
    0.8850732670,
    0.8931568162,
    0.8890061069,
    0.8765350143,
    0.8590020928,
    0.8386754281,
    0.8170174723,
    0.7949412393,
    0.7730074379,
    0.7515547956,
    0.7307821069,
    0.7107993614,
    0.6916598009,
    0.6733802825,
    0.6559544071,
    0.6393611079,
    0.6235703362,
    0.6085468596,
    0.5942528104,
    0.5806493950,
    0.5676980327,
    0.5553611039,
    0.5436024264,
    0.5323875470,
    0.5216839028,
    0.5114608960,
    0.5016899088,
    0.4923442815,
];

// The printed list has 31 entries with eleven leading ones; ten ones reproduce the reported probability.
const REFERENCE_8: [f64; 30] = [
    1.0000000000,
    1.0000000000,
    1.0000000000,
    1.0000000000,
    1.0000000000,
    1.0000000000,
    1.0000000000,
    1.0000000000,
    1.0000000000,
    1.0000000000,
    0.9911850486,
    0.9373566848,
    0.8906630236,
    0.8493134032,
    0.8121883772,
    0.7785260350,
    0.7477740007,
    0.7195131648,
    0.6934139924,
    0.6692102999,
    0.6466825215,
    0.6256465423,
    0.6059459405,
    0.5874464078,
    0.5700316138,
    0.5536000608,
    0.5380626395,
    0.5233406936,
    0.5093644632,
    0.4960727971,
];
