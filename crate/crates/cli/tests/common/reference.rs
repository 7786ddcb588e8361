//! Polynomials displayed in the reference text, transcribed verbatim into
//! the parser syntax. Two displays carry typos; both the literal and the
//! corrected form are kept, and the tests say which one the engine gives.

pub const S13_LITERAL: &str = "3 f[3]^(1) + 3 f[2]^(2) + f[1]^(3) + 3 f[1] f[1]^(1)";
pub const S13_CORRECTED: &str = "3 f[3]^(1) + 3 f[2]^(2) + f[1]^(3) + 6 f[1] f[1]^(1)";
pub const S33: &str =
    "3 f[5]^(1) + 3 f[4]^(2) + f[3]^(3) + 3 f[1] f[3]^(1) + 9 f[1]^(1) f[3] - 3 f[1] f[2]^(2) + 6 f[2] f[2]^(1) - 3 f[1]^(2) f[2]";

pub const W: [&str; 5] = [
    "f[1]",
    "2 f[2] + f[1]^(1)",
    "3 f[3] + 3 f[2]^(1) + f[1]^(2) + 3 f[1]^2",
    "4 f[4] + 6 f[3]^(1) + 4 f[2]^(2) + 12 f[1] f[2] + f[1]^(3) + 6 f[1] f[1]^(1)",
    "5 f[5] + 10 f[4]^(1) + 10 f[3]^(2) + 20 f[1] f[3] + 5 f[2]^(3) + 20 f[1] f[2]^(1) + 10 f[2]^2 + 10 f[1]^(1) f[2] + f[1]^(4) \
     + 10 f[1] f[1]^(2) + 5 f[1]^(1) f[1]^(1) + 10 f[1]^3",
];

pub const F2: &str = "-f[1]^(1)";
pub const F4: &str = "-2 f[3]^(1) + f[1]^(3)";

pub const S13_BKP: &str = "3 f[3]^(1) - 2 f[1]^(3) + 6 f[1] f[1]^(1)";
pub const S33_BKP_LITERAL: &str =
    "3 f[5]^(5) - 5 f[3]^(3) + 3 f[1] f[3]^(1) + 9 f[1]^(1) f[3] + 3 f[1]^(5) + 3 f[1] f[1]^(3) + 9 f[1]^(1) f[1]^(2)";
pub const S33_BKP_CORRECTED: &str =
    "3 f[5]^(1) - 5 f[3]^(3) + 3 f[1] f[3]^(1) + 9 f[1]^(1) f[3] + 3 f[1]^(5) + 3 f[1] f[1]^(3) + 9 f[1]^(1) f[1]^(2)";

pub const W_BKP: [&str; 3] = [
    "f[1]",
    "3 f[3] - 2 f[1]^(2) + 3 f[1]^2",
    "5 f[5] - 10 f[3]^(2) + 20 f[1] f[3] + 6 f[1]^(4) - 10 f[1] f[1]^(2) + 5 f[1]^(1) f[1]^(1) + 10 f[1]^3",
];

pub const F_BKP: [&str; 3] = [
    "w[1]",
    "1/3 w[3] + 2/3 w[1]^(2) - w[1]^2",
    "1/5 w[5] + 2/3 w[3]^(2) - 4/3 w[1] w[3] + 2/15 w[1]^(4) - 14/3 w[1] w[1]^(2) - 5 w[1]^(1) w[1]^(1) + 2 w[1]^3",
];

pub const R22_BKP: &str = "9/5 w[5] - w[3]^(2) - 3 w[1] w[3] + 1/5 w[1]^(4) + 3 w[1] w[1]^(2) + 3 w[1]^3";

pub const Q22: &str =
    "v[3] + v[1] v[2] + 1/3 v[1]^3 - 1/6 eps^2 v[2]^(2) - 1/6 eps^2 v[1] v[1]^(2) + 1/180 eps^4 v[1]^(4)";

/// Golden CLI invocations and the polynomial each must print.
pub fn golden_commands() -> Vec<(&'static str, Vec<&'static str>, &'static str)> {
    vec![
        ("kp_flow_1_3", vec!["kp", "flow", "-i", "1", "-k", "3"], S13_CORRECTED),
        ("kp_flow_3_3", vec!["kp", "flow", "-i", "3", "-k", "3"], S33),
        ("kp_normal_1", vec!["kp", "normal", "-a", "1"], W[0]),
        ("kp_normal_2", vec!["kp", "normal", "-a", "2"], W[1]),
        ("kp_normal_3", vec!["kp", "normal", "-a", "3"], W[2]),
        ("kp_normal_4", vec!["kp", "normal", "-a", "4"], W[3]),
        ("kp_normal_5", vec!["kp", "normal", "-a", "5"], W[4]),
        ("bkp_even_1", vec!["bkp", "even", "-i", "1"], F2),
        ("bkp_even_2", vec!["bkp", "even", "-i", "2"], F4),
        ("bkp_flow_1_2", vec!["bkp", "flow", "-i", "1", "-k", "2"], S13_BKP),
        ("bkp_flow_2_2", vec!["bkp", "flow", "-i", "2", "-k", "2"], S33_BKP_CORRECTED),
        ("bkp_normal_1", vec!["bkp", "normal", "-a", "1"], W_BKP[0]),
        ("bkp_normal_2", vec!["bkp", "normal", "-a", "2"], W_BKP[1]),
        ("bkp_normal_3", vec!["bkp", "normal", "-a", "3"], W_BKP[2]),
        ("bkp_normal_1_invert", vec!["bkp", "normal", "-a", "1", "--invert"], F_BKP[0]),
        ("bkp_normal_2_invert", vec!["bkp", "normal", "-a", "2", "--invert"], F_BKP[1]),
        ("bkp_normal_3_invert", vec!["bkp", "normal", "-a", "3", "--invert"], F_BKP[2]),
        ("bkp_rflow_2_2", vec!["bkp", "rflow", "-a", "2", "-b", "2"], R22_BKP),
        ("fixtures_show_q22", vec!["fixtures", "show", "Q22"], Q22),
    ]
}

pub const P12: &str = "u[2] + 1/8 eps^2 u[1]^(2)";
pub const P13: &str =
    "u[3] + 3/8 eps^2 u[2]^(2) + 1/12 eps^2 u[1]^(2) u[1] + 1/12 eps^2 u[1]^(1) u[1]^(1) + 37/1152 eps^4 u[1]^(4)";
pub const P22: &str = "u[3] + u[1] u[2] + 1/3 u[1]^3 + 1/12 eps^2 u[2]^(2) + 1/24 eps^2 u[1] u[1]^(2) \
     + 1/12 eps^2 u[1]^(1) u[1]^(1) + 7/5760 eps^4 u[1]^(4)";
