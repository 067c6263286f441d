#ifndef QVLENS_CONFIG_HPP
#define QVLENS_CONFIG_HPP

#include <stdexcept>
#include <string>

#include "qvlens/binary.hpp"
#include "qvlens/constants.hpp"
#include "qvlens/lens.hpp"
#include "qvlens/ray.hpp"
#include "qvlens/star.hpp"

namespace qvlens {

/// Raised for malformed config text, unknown sections/keys, or invalid
/// values. The message names the offending key.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };
enum class AngleUnit { rad, arcsec };

struct OutputOptions {
    OutputFormat format = OutputFormat::csv;
    std::string path;  // empty = stdout
    AngleUnit angles = AngleUnit::rad;

    bool operator==(const OutputOptions&) const = default;
};

/// Standalone lens geometry for the lens/threshold commands.
struct LensGeometry {
    char lens_star = 'B';       // 'A' or 'B'
    double d_lens = 3.086e19;   // m, observer -> lens
    double d_source = 6.172e19; // m, observer -> source

    bool operator==(const LensGeometry&) const = default;
};

/// Full run configuration. Defaults describe a double-pulsar scenario with a
/// 2 h 45 min circular orbit seen nearly edge-on.
struct RunConfig {
    PhysicalConstants constants;
    NeutronStar star_a;
    NeutronStar star_b;
    OrbitalElements orbit;
    LensedBody lensed = LensedBody::a_by_b;
    double beam_half_width = 5e-4;  // rad
    BeamProfile beam_profile = BeamProfile::tophat;
    IndexModel index_model;
    IntegratorConfig integrator;
    LensGeometry lens_geometry;
    OutputOptions output;

    RunConfig();

    bool operator==(const RunConfig&) const = default;

    void validate() const;

    double a_coupling() const { return constants.coupling_for(index_model.polarization); }
    BinaryScenario scenario() const;
    LensConfiguration lens_configuration() const;
};

/// Parse config text in the [section] key = value format. Unknown sections
/// and keys are errors naming the offender; values are validated on parse.
RunConfig parse_config(const std::string& text);

/// Load and parse a config file.
RunConfig load_config(const std::string& path);

/// Serialize a config such that parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace qvlens

#endif
