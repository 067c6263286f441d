#include "qvlens/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace qvlens {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view value, const std::string& key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("invalid numeric value for key '" + key + "': " +
                          std::string(value));
    return out;
}

std::size_t parse_size(std::string_view value, const std::string& key) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("invalid integer value for key '" + key + "': " +
                          std::string(value));
    return out;
}

template <typename Enum>
Enum parse_enum(std::string_view value, const std::string& key,
                std::initializer_list<std::pair<std::string_view, Enum>> options) {
    for (const auto& [name, item] : options) {
        if (value == name) return item;
    }
    std::string allowed;
    for (const auto& [name, item] : options) {
        if (!allowed.empty()) allowed += "|";
        allowed += name;
    }
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + key +
                      "' (expected " + allowed + ")");
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

const char* convention_name(FieldConvention c) {
    switch (c) {
        case FieldConvention::equatorial: return "equatorial";
        case FieldConvention::polar: return "polar";
        case FieldConvention::closed_form: return "closed_form";
    }
    return "closed_form";
}

void apply_star_key(NeutronStar& star, const std::string& key, std::string_view value,
                    const std::string& qualified) {
    if (key == "mass_kg") star.mass = parse_double(value, qualified);
    else if (key == "radius_m") star.radius = parse_double(value, qualified);
    else if (key == "surface_field_T") star.surface_field = parse_double(value, qualified);
    else if (key == "field_convention")
        star.field_convention = parse_enum<FieldConvention>(
            value, qualified,
            {{"equatorial", FieldConvention::equatorial},
             {"polar", FieldConvention::polar},
             {"closed_form", FieldConvention::closed_form}});
    else if (key == "dipole_axis_x") star.dipole_axis.x = parse_double(value, qualified);
    else if (key == "dipole_axis_y") star.dipole_axis.y = parse_double(value, qualified);
    else if (key == "dipole_axis_z") star.dipole_axis.z = parse_double(value, qualified);
    else if (key == "spin_axis_x") star.spin_axis.x = parse_double(value, qualified);
    else if (key == "spin_axis_y") star.spin_axis.y = parse_double(value, qualified);
    else if (key == "spin_axis_z") star.spin_axis.z = parse_double(value, qualified);
    else if (key == "spin_period_s") star.spin_period = parse_double(value, qualified);
    else if (key == "spin_phase0_rad") star.spin_phase0 = parse_double(value, qualified);
    else throw ConfigError("unknown config key '" + qualified + "'");
}

void emit_star(std::ostringstream& out, const char* section, const NeutronStar& star) {
    out << "[" << section << "]\n";
    out << "mass_kg = " << format_double(star.mass) << "\n";
    out << "radius_m = " << format_double(star.radius) << "\n";
    out << "surface_field_T = " << format_double(star.surface_field) << "\n";
    out << "field_convention = " << convention_name(star.field_convention) << "\n";
    out << "dipole_axis_x = " << format_double(star.dipole_axis.x) << "\n";
    out << "dipole_axis_y = " << format_double(star.dipole_axis.y) << "\n";
    out << "dipole_axis_z = " << format_double(star.dipole_axis.z) << "\n";
    out << "spin_axis_x = " << format_double(star.spin_axis.x) << "\n";
    out << "spin_axis_y = " << format_double(star.spin_axis.y) << "\n";
    out << "spin_axis_z = " << format_double(star.spin_axis.z) << "\n";
    out << "spin_period_s = " << format_double(star.spin_period) << "\n";
    out << "spin_phase0_rad = " << format_double(star.spin_phase0) << "\n";
}

}  // namespace

RunConfig::RunConfig() {
    star_a.mass = 1.4 * 1.989e30;
    star_a.radius = 1e4;
    star_a.surface_field = 1e8;
    star_a.field_convention = FieldConvention::closed_form;
    star_a.dipole_axis = {1.0, 0.0, 0.0};
    star_a.spin_axis = {0.0, 0.0, 1.0};
    star_a.spin_period = 0.023;
    star_a.spin_phase0 = 0.0;

    star_b = star_a;
    star_b.spin_period = 2.77;

    orbit.period = 9900.0;  // 2 h 45 min
    orbit.semi_major_axis = 9e8;
    orbit.eccentricity = 0.0;
    orbit.inclination = (90.0 - 0.63) * kPi / 180.0;
    orbit.argument_of_periastron = 0.0;
    orbit.epoch_phase = 0.0;
}

void RunConfig::validate() const {
    constants.validate();
    star_a.validate();
    star_b.validate();
    orbit.validate();
    integrator.validate();
    if (!(beam_half_width > 0.0)) throw std::domain_error("beam half width must be positive");
    if (!(lens_geometry.d_lens > 0.0) || !(lens_geometry.d_source > lens_geometry.d_lens))
        throw std::domain_error("lens distances must satisfy 0 < d_lens < d_source");
    if (lens_geometry.lens_star != 'A' && lens_geometry.lens_star != 'B')
        throw std::domain_error("lens star must be A or B");
}

BinaryScenario RunConfig::scenario() const {
    BinaryScenario s;
    s.pulsar_a = star_a;
    s.pulsar_b = star_b;
    s.orbit = orbit;
    s.lensed = lensed;
    s.beam_half_width = beam_half_width;
    s.beam_profile = beam_profile;
    s.index_model = index_model;
    s.a_coupling = a_coupling();
    return s;
}

LensConfiguration RunConfig::lens_configuration() const {
    LensConfiguration lc;
    lc.lens = lens_geometry.lens_star == 'A' ? star_a : star_b;
    lc.d_lens = lens_geometry.d_lens;
    lc.d_source = lens_geometry.d_source;
    lc.a_coupling = a_coupling();
    lc.projection = index_model.projection;
    return lc;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;

    while (std::getline(in, line)) {
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';') continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError("malformed section header: " + std::string(stripped));
            section = std::string(trim(stripped.substr(1, stripped.size() - 2)));
            if (section != "constants" && section != "star.A" && section != "star.B" &&
                section != "orbit" && section != "integrator" && section != "lens" &&
                section != "output")
                throw ConfigError("unknown config section '[" + section + "]'");
            continue;
        }

        const auto eq = stripped.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value', got: " + std::string(stripped));
        const std::string key{trim(stripped.substr(0, eq))};
        const std::string_view value = trim(stripped.substr(eq + 1));
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any [section]");
        const std::string qualified = section + "." + key;

        if (section == "constants") {
            if (key == "G") cfg.constants.G = parse_double(value, qualified);
            else if (key == "c") cfg.constants.c = parse_double(value, qualified);
            else if (key == "a_par") cfg.constants.a_par = parse_double(value, qualified);
            else if (key == "a_perp") cfg.constants.a_perp = parse_double(value, qualified);
            else if (key == "B_crit") cfg.constants.b_crit = parse_double(value, qualified);
            else throw ConfigError("unknown config key '" + qualified + "'");
        } else if (section == "star.A") {
            apply_star_key(cfg.star_a, key, value, qualified);
        } else if (section == "star.B") {
            apply_star_key(cfg.star_b, key, value, qualified);
        } else if (section == "orbit") {
            if (key == "period_s") cfg.orbit.period = parse_double(value, qualified);
            else if (key == "semi_major_axis_m")
                cfg.orbit.semi_major_axis = parse_double(value, qualified);
            else if (key == "eccentricity") cfg.orbit.eccentricity = parse_double(value, qualified);
            else if (key == "inclination_rad")
                cfg.orbit.inclination = parse_double(value, qualified);
            else if (key == "argument_of_periastron_rad")
                cfg.orbit.argument_of_periastron = parse_double(value, qualified);
            else if (key == "epoch_phase_rad")
                cfg.orbit.epoch_phase = parse_double(value, qualified);
            else if (key == "lensed")
                cfg.lensed = parse_enum<LensedBody>(value, qualified,
                                                    {{"A_by_B", LensedBody::a_by_b},
                                                     {"B_by_A", LensedBody::b_by_a}});
            else if (key == "beam_half_width_rad")
                cfg.beam_half_width = parse_double(value, qualified);
            else if (key == "beam_profile")
                cfg.beam_profile = parse_enum<BeamProfile>(value, qualified,
                                                           {{"tophat", BeamProfile::tophat},
                                                            {"gaussian", BeamProfile::gaussian}});
            else throw ConfigError("unknown config key '" + qualified + "'");
        } else if (section == "integrator") {
            if (key == "method")
                cfg.integrator.method = parse_enum<IntegratorMethod>(
                    value, qualified,
                    {{"rk4_fixed", IntegratorMethod::rk4_fixed},
                     {"rk45_adaptive", IntegratorMethod::rk45_adaptive}});
            else if (key == "step_m") cfg.integrator.step = parse_double(value, qualified);
            else if (key == "rel_tol") cfg.integrator.rel_tol = parse_double(value, qualified);
            else if (key == "abs_tol") cfg.integrator.abs_tol = parse_double(value, qualified);
            else if (key == "max_steps") cfg.integrator.max_steps = parse_size(value, qualified);
            else if (key == "domain_halfspan_factor")
                cfg.integrator.domain_halfspan_factor = parse_double(value, qualified);
            else if (key == "field_projection")
                cfg.index_model.projection = parse_enum<FieldProjection>(
                    value, qualified,
                    {{"transverse", FieldProjection::transverse_b_squared},
                     {"total", FieldProjection::total_b_squared}});
            else if (key == "polarization")
                cfg.index_model.polarization = parse_enum<Polarization>(
                    value, qualified,
                    {{"parallel", Polarization::parallel},
                     {"perpendicular", Polarization::perpendicular},
                     {"unpolarized", Polarization::unpolarized_average}});
            else throw ConfigError("unknown config key '" + qualified + "'");
        } else if (section == "lens") {
            if (key == "star") {
                if (value == "A") cfg.lens_geometry.lens_star = 'A';
                else if (value == "B") cfg.lens_geometry.lens_star = 'B';
                else throw ConfigError("invalid value '" + std::string(value) + "' for key '" +
                                       qualified + "' (expected A|B)");
            } else if (key == "d_lens_m") {
                cfg.lens_geometry.d_lens = parse_double(value, qualified);
            } else if (key == "d_source_m") {
                cfg.lens_geometry.d_source = parse_double(value, qualified);
            } else {
                throw ConfigError("unknown config key '" + qualified + "'");
            }
        } else if (section == "output") {
            if (key == "format")
                cfg.output.format = parse_enum<OutputFormat>(value, qualified,
                                                             {{"csv", OutputFormat::csv},
                                                              {"json", OutputFormat::json}});
            else if (key == "path") cfg.output.path = std::string(value);
            else if (key == "angles")
                cfg.output.angles = parse_enum<AngleUnit>(value, qualified,
                                                          {{"rad", AngleUnit::rad},
                                                           {"arcsec", AngleUnit::arcsec}});
            else throw ConfigError("unknown config key '" + qualified + "'");
        }
    }

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    out << "[constants]\n";
    out << "G = " << format_double(config.constants.G) << "\n";
    out << "c = " << format_double(config.constants.c) << "\n";
    out << "a_par = " << format_double(config.constants.a_par) << "\n";
    out << "a_perp = " << format_double(config.constants.a_perp) << "\n";
    out << "B_crit = " << format_double(config.constants.b_crit) << "\n";
    out << "\n";
    emit_star(out, "star.A", config.star_a);
    out << "\n";
    emit_star(out, "star.B", config.star_b);
    out << "\n";
    out << "[orbit]\n";
    out << "period_s = " << format_double(config.orbit.period) << "\n";
    out << "semi_major_axis_m = " << format_double(config.orbit.semi_major_axis) << "\n";
    out << "eccentricity = " << format_double(config.orbit.eccentricity) << "\n";
    out << "inclination_rad = " << format_double(config.orbit.inclination) << "\n";
    out << "argument_of_periastron_rad = "
        << format_double(config.orbit.argument_of_periastron) << "\n";
    out << "epoch_phase_rad = " << format_double(config.orbit.epoch_phase) << "\n";
    out << "lensed = " << (config.lensed == LensedBody::a_by_b ? "A_by_B" : "B_by_A") << "\n";
    out << "beam_half_width_rad = " << format_double(config.beam_half_width) << "\n";
    out << "beam_profile = "
        << (config.beam_profile == BeamProfile::tophat ? "tophat" : "gaussian") << "\n";
    out << "\n";
    out << "[integrator]\n";
    out << "method = "
        << (config.integrator.method == IntegratorMethod::rk4_fixed ? "rk4_fixed"
                                                                    : "rk45_adaptive")
        << "\n";
    out << "step_m = " << format_double(config.integrator.step) << "\n";
    out << "rel_tol = " << format_double(config.integrator.rel_tol) << "\n";
    out << "abs_tol = " << format_double(config.integrator.abs_tol) << "\n";
    out << "max_steps = " << config.integrator.max_steps << "\n";
    out << "domain_halfspan_factor = "
        << format_double(config.integrator.domain_halfspan_factor) << "\n";
    out << "field_projection = "
        << (config.index_model.projection == FieldProjection::transverse_b_squared
                ? "transverse"
                : "total")
        << "\n";
    const char* pol = "perpendicular";
    if (config.index_model.polarization == Polarization::parallel) pol = "parallel";
    if (config.index_model.polarization == Polarization::unpolarized_average) pol = "unpolarized";
    out << "polarization = " << pol << "\n";
    out << "\n";
    out << "[lens]\n";
    out << "star = " << config.lens_geometry.lens_star << "\n";
    out << "d_lens_m = " << format_double(config.lens_geometry.d_lens) << "\n";
    out << "d_source_m = " << format_double(config.lens_geometry.d_source) << "\n";
    out << "\n";
    out << "[output]\n";
    out << "format = " << (config.output.format == OutputFormat::csv ? "csv" : "json") << "\n";
    out << "path = " << config.output.path << "\n";
    out << "angles = " << (config.output.angles == AngleUnit::rad ? "rad" : "arcsec") << "\n";
    return out.str();
}

}  // namespace qvlens
