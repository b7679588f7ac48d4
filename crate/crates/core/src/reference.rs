//! The worked example: architecture, target pose and published solution tables.

use crate::pentapod::{Architecture, Configuration};
use crate::polyalg::rational;

/// Architecture as printed with the example (`a_2 = (5,0,0)`).
pub fn caption_architecture() -> Architecture {
    Architecture::from_integers([[0, 0, 0], [5, 0, 0], [-4, -3, 0], [3, 7, -6], [9, -5, 4]], [0, 2, 4, 5, 10])
        .expect("valid architecture")
}

/// Architecture that reproduces the published tables: the caption data with
/// `x_2` set to 1 and nothing else rescaled.
pub fn published_architecture() -> Architecture {
    Architecture::from_integers([[0, 0, 0], [1, 0, 0], [-4, -3, 0], [3, 7, -6], [9, -5, 4]], [0, 2, 4, 5, 10])
        .expect("valid architecture")
}

/// Target pose `G = (3/5, 4/5, 0, 2, 3, 4)`.
pub fn target_pose() -> Configuration {
    Configuration::new([0.6, 0.8, 0.0], [2.0, 3.0, 4.0])
}

pub fn target_pose_exact() -> Configuration<num_rational::BigRational> {
    Configuration::new(
        [rational(3, 5), rational(4, 5), rational(0, 1)],
        [rational(2, 1), rational(3, 1), rational(4, 1)],
    )
}

/// Fixed orientation: `(p_x, p_y, p_z, λ, l)`.
pub const FIXED_ORIENTATION_TABLE: [[f64; 5]; 4] = [
    [2.551763090, 2.637467970, 0.1144666998, 0.0002811301, 3.941223289],
    [0.4205946500, -10.11287492, 3.678294530, 0.0045791513, 13.21156707],
    [-6.106365796, -8.333480392, -0.3367715809, 0.7825158446, 14.30080937],
    [-39.77559922, -14.40064789, -6.535304462, -0.6930082534, 46.46478104],
];

/// Fixed position: `(u, v, w, λ_1, λ_2, s°)`.
pub const FIXED_POSITION_TABLE: [[f64; 6]; 2] = [
    [0.3701933149, 0.5523718708, 0.7468883632, 0.0000002748, 4.381351180, 48.41786560],
    [-0.3265950579, -0.5850572044, -0.7423232012, 0.0000131667, -6.434527722, 131.6726142],
];

/// General metric: `(u, v, w, λ_2, d)`.
pub const GENERAL_TABLE: [[f64; 5]; 16] = [
    [0.5559273038, 0.7274604486, 0.4021767380, 0.0000977412, 1.479192394],
    [0.7100848787, 0.6097073464, -0.3521880419, 0.0112120286, 6.370089783],
    [0.6707364219, 0.6608309577, -0.3367715809, 0.0263760716, 6.396348687],
    [0.9520812787, 0.2971145357, -0.0725547483, 0.0518935724, 6.494930694],
    [-0.4198912232, -0.7478308408, -0.5142376826, 0.0001295064, 6.522840484],
    [0.6426323048, 0.5670451826, -0.5152508920, 0.6390457179, 7.901089998],
    [-0.9141441020, 0.2145188032, -0.3439800050, 0.0175335168, 8.153560918],
    [-0.6633066166, -0.6523793948, 0.3666407746, -0.0198075803, 9.072642063],
    [-0.4968498376, -0.8534603513, -0.1573075574, 0.0025204733, 9.244102979],
    [0.4561177696, -0.7759229223, 0.4357753997, -0.1291505456, 9.308167139],
    [-0.6449198390, -0.5507646090, 0.5298459651, 0.0516473389, 9.970322913],
    [0.9794782799, -0.1982747821, 0.0361857697, 0.0967973416, 10.05488078],
    [-0.2161351180, 0.9213140919, -0.3232119349, 0.0362890328, 13.78049458],
    [0.1003162322, -0.5648716701, -0.8190583922, 0.0430362461, 37.60374403],
    [0.8001243699, 0.1449203823, 0.5820644943, -0.1991801120, 52.29308488],
    [0.0428010579, 0.5580832041, 0.8286804008, -0.0557997298, 65.26242524],
];

/// Position and `λ_1` of the general minimizer `M`.
pub const GENERAL_MINIMIZER_POSITION: [f64; 3] = [2.296688437, 3.479406728, 1.835729103];
pub const GENERAL_MINIMIZER_LAMBDA1: f64 = -4.720444174;

/// Equiform relaxation: `(u, v, w, λ_2, d, μ)`.
pub const EQUIFORM_TABLE: [[f64; 6]; 6] = [
    [0.5055836745, 0.6656442614, 0.3718172932, 0.0000990198, 1.4517670618, 0.9148471097],
    [0.6486166479, 0.5542384068, -0.3254994305, 0.0118010768, 6.3636100364, 0.9131449210],
    [0.6200661016, 0.6110910452, -0.3126505854, 0.0283247861, 6.3914193483, 0.9250214183],
    [0.8789381698, 0.2541301769, -0.0569840426, 0.0548756462, 6.4897306508, 0.9167124054],
    [0.5220226650, 0.4591892110, -0.4197574551, 9.9482986641, 7.8756112220, 0.8121322031],
    [0.6513903749, -0.9060852905, 0.5534569690, -0.1501405543, 9.2038614723, 1.2456382263],
];

/// Position of the equiform minimizer `N`.
pub const EQUIFORM_MINIMIZER_POSITION: [f64; 3] = [2.5031164070, 3.7266491740, 1.9989579769];

/// Metric distances quoted for `O` (fixed-orientation minimizer) and `P`
/// (fixed-position minimizer) from `G`, four decimals.
pub const DISTANCE_O_G: f64 = 3.9412;
pub const DISTANCE_P_G: f64 = 4.4142;

/// Pose of a fixed-orientation table row.
pub fn fixed_orientation_pose(row: usize) -> Configuration {
    let r = FIXED_ORIENTATION_TABLE[row];
    Configuration::new([0.6, 0.8, 0.0], [r[0], r[1], r[2]])
}

/// Pose of a fixed-position table row.
pub fn fixed_position_pose(row: usize) -> Configuration {
    let r = FIXED_POSITION_TABLE[row];
    Configuration::new([r[0], r[1], r[2]], [2.0, 3.0, 4.0])
}

pub fn general_minimizer() -> Configuration {
    let r = GENERAL_TABLE[0];
    Configuration::new([r[0], r[1], r[2]], GENERAL_MINIMIZER_POSITION)
}

pub fn equiform_minimizer() -> Configuration {
    let r = EQUIFORM_TABLE[0];
    Configuration::new([r[0], r[1], r[2]], EQUIFORM_MINIMIZER_POSITION)
}
