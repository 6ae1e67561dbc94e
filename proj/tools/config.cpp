#include "tether/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <type_traits>
#include <variant>

#include "tether/core/csv.hpp"
#include "tether/core/error.hpp"

namespace tether::cli {

namespace {

constexpr std::pair<Mode, std::string_view> kModeNames[] = {
    {Mode::Ibm2d, "ibm2d"},
    {Mode::Ibm1d, "ibm1d"},
    {Mode::Macro1d, "macro1d"},
    {Mode::Stability, "stability"},
    {Mode::Reconstruct, "reconstruct"},
    {Mode::VerifyAsymptotics, "verify-asymptotics"},
    {Mode::Sweep, "sweep"},
};

std::string_view to_string(ModeSet::Kind kind) noexcept {
    return kind == ModeSet::Kind::Discrete ? "discrete" : "continuous";
}

ModeSet::Kind mode_set_from_string(std::string_view name) {
    if (name == "discrete") return ModeSet::Kind::Discrete;
    if (name == "continuous") return ModeSet::Kind::Continuous;
    throw Error("unknown mode set '" + std::string(name) + "' (expected discrete or continuous)");
}

enum class Range { Any, Positive, NonNegative, Fraction, AtLeastOne };

// Seeds share the size_t alternative.
static_assert(std::is_same_v<std::size_t, std::uint64_t>);

using Ref = std::variant<double*, std::size_t*, int*, bool*, std::string*,
                         KernelFamily*, ClosureOrder*, InitialCondition::Kind*, ModeSet::Kind*,
                         Mode*, std::vector<double>*>;

struct Field {
    std::string_view section;  // empty for top-level keys
    std::string_view key;
    Ref ref;
    Range range = Range::Any;

    std::string path() const {
        return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
    }
};

// Declaration order is the serialisation order.
std::vector<Field> fields(ExperimentConfig& c) {
    auto& p = c.parameters;
    auto& n = c.numerics;
    return {
        {"", "mode", &c.mode},
        {"", "seed", &c.seed},
        {"", "output", &c.output},
        {"domain", "length", &c.domain.length, Range::Positive},
        {"kernel", "family", &c.kernel.family},
        {"kernel", "mass", &c.kernel.mass},
        {"kernel", "radius", &c.kernel.radius, Range::Positive},
        {"repulsion", "family", &c.repulsion.family},
        {"repulsion", "mass", &c.repulsion.mass, Range::NonNegative},
        {"repulsion", "radius", &c.repulsion.radius, Range::Positive},
        {"parameters", "c1", &p.c1},
        {"parameters", "zeta", &p.zeta, Range::Positive},
        {"parameters", "mu", &p.mu, Range::NonNegative},
        {"parameters", "eta", &p.eta, Range::Positive},
        {"parameters", "kappa", &p.kappa, Range::Positive},
        {"parameters", "delta", &p.delta, Range::NonNegative},
        {"parameters", "rho0", &p.rho0, Range::Positive},
        {"parameters", "closure", &p.closure},
        {"parameters", "nu", &p.nu, Range::NonNegative},
        {"parameters", "d_s", &p.d_s, Range::NonNegative},
        {"parameters", "d_o", &p.d_o, Range::NonNegative},
        {"parameters", "r_A", &p.r_A, Range::Positive},
        {"parameters", "N", &p.N},
        {"parameters", "M", &p.M},
        {"numerics", "dt", &n.dt, Range::Positive},
        {"numerics", "n_cells", &n.n_cells, Range::AtLeastOne},
        {"numerics", "t_end", &n.t_end, Range::NonNegative},
        {"numerics", "output_interval", &n.output_interval, Range::Positive},
        {"numerics", "adaptive", &n.adaptive},
        {"numerics", "cfl_target", &n.cfl_target, Range::Fraction},
        {"numerics", "comoving", &n.comoving},
        {"numerics", "stats_radius", &n.stats_radius, Range::NonNegative},
        {"numerics", "density_variance", &n.density_variance, Range::Positive},
        {"numerics", "snapshots", &n.snapshots},
        {"initial", "kind", &c.initial.kind},
        {"initial", "amplitude", &c.initial.amplitude, Range::NonNegative},
        {"initial", "center", &c.initial.center},
        {"initial", "variance", &c.initial.variance, Range::Positive},
        {"stability", "modes", &c.stability.modes},
        {"stability", "l_max", &c.stability.l_max, Range::NonNegative},
        {"stability", "k_max", &c.stability.k_max, Range::NonNegative},
        {"stability", "n_points", &c.stability.n_points, Range::AtLeastOne},
        {"stability", "order", &c.stability.order},
        {"stability", "quartic_denominator", &c.stability.quartic_denominator},
        {"verify", "monte_carlo", &c.verify.monte_carlo},
        {"verify", "anchors", &c.verify.anchors, Range::AtLeastOne},
        {"sweep", "base", &c.sweep.base},
        {"sweep", "parameter", &c.sweep.parameter},
        {"sweep", "values", &c.sweep.values},
        {"sweep", "replicates", &c.sweep.replicates, Range::AtLeastOne},
        {"sweep", "workers", &c.sweep.workers},
        {"sweep", "ibm", &c.sweep.ibm},
    };
}

bool is_section(std::string_view name) {
    ExperimentConfig c;
    for (const auto& f : fields(c))
        if (f.section == name) return true;
    return false;
}

std::string locate(std::string_view source, const YAML::Mark& mark) {
    std::string s(source);
    if (mark.line >= 0) s += ":" + std::to_string(mark.line + 1);
    return s;
}

[[noreturn]] void fail(std::string_view source, const YAML::Node& node, const std::string& msg) {
    throw ConfigError(locate(source, node.Mark()) + ": " + msg);
}

void check_range(const Field& f, double v) {
    const auto name = f.path();
    auto bad = [&](const char* what) {
        throw ConfigError(name + " must be " + what + " (got " + format_double(v) + ")");
    };
    if (!std::isfinite(v)) bad("finite");
    switch (f.range) {
        case Range::Any: break;
        case Range::Positive: if (!(v > 0.0)) bad("positive"); break;
        case Range::NonNegative: if (!(v >= 0.0)) bad("non-negative"); break;
        case Range::Fraction: if (!(v > 0.0 && v <= 1.0)) bad("in (0, 1]"); break;
        case Range::AtLeastOne: if (!(v >= 1.0)) bad("at least 1"); break;
    }
}

double parse_number(const std::string& text, const std::string& name) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(name + " expects a number, got '" + text + "'");
    return v;
}

template <class Int>
Int parse_integer(const std::string& text, const std::string& name) {
    Int v{};
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last) return v;
    if (std::is_unsigned_v<Int> && !text.empty() && text.front() == '-')
        throw ConfigError(name + " must be non-negative (got " + text + ")");
    throw ConfigError(name + " expects an integer, got '" + text + "'");
}

bool parse_bool(const std::string& text, const std::string& name) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError(name + " expects true or false, got '" + text + "'");
}

template <class Parse>
auto parse_enum(const std::string& text, const std::string& name, Parse parse) {
    try {
        return parse(text);
    } catch (const Error& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

void assign(const Field& f, const std::string& text) {
    const auto name = f.path();
    std::visit(
        [&](auto* target) {
            using T = std::remove_pointer_t<decltype(target)>;
            if constexpr (std::is_same_v<T, double>) {
                const double v = parse_number(text, name);
                check_range(f, v);
                *target = v;
            } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, int>) {
                const T v = parse_integer<T>(text, name);
                check_range(f, static_cast<double>(v));
                *target = v;
            } else if constexpr (std::is_same_v<T, bool>) {
                *target = parse_bool(text, name);
            } else if constexpr (std::is_same_v<T, std::string>) {
                *target = text;
            } else if constexpr (std::is_same_v<T, KernelFamily>) {
                *target = parse_enum(text, name, kernel_family_from_string);
            } else if constexpr (std::is_same_v<T, ClosureOrder>) {
                *target = parse_enum(text, name, closure_order_from_string);
            } else if constexpr (std::is_same_v<T, InitialCondition::Kind>) {
                *target = parse_enum(text, name, initial_condition_from_string);
            } else if constexpr (std::is_same_v<T, ModeSet::Kind>) {
                *target = parse_enum(text, name, mode_set_from_string);
            } else if constexpr (std::is_same_v<T, Mode>) {
                *target = parse_enum(text, name, mode_from_string);
            } else {
                throw ConfigError(name + " expects a list");
            }
        },
        f.ref);
}

void assign_node(const Field& f, const YAML::Node& node, std::string_view source) {
    try {
        if (auto* list = std::get_if<std::vector<double>*>(&f.ref)) {
            if (!node.IsSequence()) throw ConfigError(f.path() + " expects a list of numbers");
            std::vector<double> values;
            for (const auto& item : node) {
                if (!item.IsScalar()) fail(source, item, f.path() + " expects a list of numbers");
                values.push_back(parse_number(item.Scalar(), f.path()));
                if (!std::isfinite(values.back()))
                    fail(source, item, f.path() + " entries must be finite");
            }
            **list = std::move(values);
            return;
        }
        if (!node.IsScalar()) throw ConfigError(f.path() + " expects a single value");
        assign(f, node.Scalar());
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.rfind(std::string(source), 0) == 0) throw;
        fail(source, node, what);
    }
}

std::string scalar_text(const Field& f) {
    return std::visit(
        [](auto* v) -> std::string {
            using T = std::remove_pointer_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_double(*v);
            else if constexpr (std::is_same_v<T, bool>) return *v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return *v;
            else if constexpr (std::is_integral_v<T>) return std::to_string(*v);
            else if constexpr (std::is_same_v<T, std::vector<double>>) return {};
            else return std::string(to_string(*v));
        },
        f.ref);
}

Field* find_field(std::vector<Field>& fs, std::string_view path) {
    for (auto& f : fs)
        if (f.path() == path) return &f;
    return nullptr;
}

bool is_numeric(const Field& f) {
    return std::holds_alternative<double*>(f.ref) || std::holds_alternative<std::size_t*>(f.ref) ||
           std::holds_alternative<int*>(f.ref);
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
    for (const auto& [m, name] : kModeNames)
        if (m == mode) return name;
    return "unknown";
}

Mode mode_from_string(std::string_view name) {
    for (const auto& [m, n] : kModeNames)
        if (n == name) return m;
    throw ConfigError("unknown mode '" + std::string(name) + "'");
}

const std::vector<Mode>& all_modes() {
    static const std::vector<Mode> modes = [] {
        std::vector<Mode> out;
        for (const auto& entry : kModeNames) out.push_back(entry.first);
        return out;
    }();
    return modes;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source,
                              const Mode* mode_override) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(locate(source, e.mark) + ": " + e.msg);
    }
    if (!root.IsNull() && !root.IsMap()) fail(source, root, "top level must be a mapping");

    ExperimentConfig config;
    auto fs = fields(config);
    bool has_mode = false;
    bool has_values = false;

    auto set = [&](const std::string& path, const YAML::Node& key, const YAML::Node& value) {
        Field* f = find_field(fs, path);
        if (!f) fail(source, key, "unknown key '" + path + "'");
        assign_node(*f, value, source);
        if (path == "mode") has_mode = true;
        if (path == "sweep.values") has_values = true;
    };

    if (root.IsMap()) {
        for (const auto& entry : root) {
            const auto name = entry.first.Scalar();
            if (is_section(name)) {
                if (entry.second.IsNull()) continue;
                if (!entry.second.IsMap()) fail(source, entry.second, "section '" + name + "' must be a mapping");
                for (const auto& item : entry.second)
                    set(name + "." + item.first.Scalar(), item.first, item.second);
            } else {
                set(name, entry.first, entry.second);
            }
        }
    }

    if (mode_override) {
        config.mode = *mode_override;
    } else if (!has_mode) {
        throw ConfigError(std::string(source) + ": missing required key 'mode'");
    }
    if (config.mode == Mode::Sweep && !has_values)
        throw ConfigError(std::string(source) + ": missing required key 'sweep.values'");
    try {
        validate(config);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(source) + ": " + e.what());
    }
    return config;
}

ExperimentConfig load_config(const std::string& path, const Mode* mode_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path, mode_override);
}

void validate(const ExperimentConfig& c) {
    if (c.numerics.output_interval < c.numerics.dt)
        throw ConfigError("numerics.output_interval must be at least numerics.dt");
    if (c.numerics.n_cells < Grid1D::min_cells)
        throw ConfigError("numerics.n_cells must be at least " + std::to_string(Grid1D::min_cells));
    if (c.parameters.N + c.parameters.M == 0)
        throw ConfigError("parameters.N and parameters.M cannot both be zero");
    if (c.sweep.base == Mode::Sweep) throw ConfigError("sweep.base cannot be sweep");
    if (c.mode == Mode::Sweep) {
        if (c.sweep.values.empty()) throw ConfigError("sweep.values needs at least one value");
        ExperimentConfig probe = c;
        for (double v : c.sweep.values) set_parameter(probe, c.sweep.parameter, v);
    }
}

std::string serialize_config(const ExperimentConfig& config) {
    auto& c = const_cast<ExperimentConfig&>(config);
    const auto fs = fields(c);
    YAML::Emitter out;
    out << YAML::BeginMap;
    std::string_view open;
    for (const auto& f : fs) {
        if (f.section != open) {
            if (!open.empty()) out << YAML::EndMap;
            open = f.section;
            if (!open.empty()) out << YAML::Key << std::string(open) << YAML::Value << YAML::BeginMap;
        }
        out << YAML::Key << std::string(f.key) << YAML::Value;
        if (auto* list = std::get_if<std::vector<double>*>(&f.ref)) {
            out << YAML::Flow << YAML::BeginSeq;
            for (double v : **list) out << format_double(v);
            out << YAML::EndSeq;
        } else if (std::holds_alternative<std::string*>(f.ref)) {
            out << YAML::DoubleQuoted << scalar_text(f);
        } else {
            out << scalar_text(f);
        }
    }
    if (!open.empty()) out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::vector<std::string> sweepable_parameters() {
    ExperimentConfig c;
    std::vector<std::string> out;
    for (const auto& f : fields(c))
        if (is_numeric(f) && f.section != "sweep" && f.section != "verify" && !f.section.empty())
            out.push_back(f.path());
    out.emplace_back("seed");
    return out;
}

void set_parameter(ExperimentConfig& config, std::string_view key, double value) {
    const auto allowed = sweepable_parameters();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ConfigError("sweep.parameter '" + std::string(key) + "' is not a numeric setting");
    auto fs = fields(config);
    Field* f = find_field(fs, key);
    if (!std::holds_alternative<double*>(f->ref)) {
        if (value != std::floor(value) || std::abs(value) > 9.0e15)
            throw ConfigError(std::string(key) + " needs integer values (got " + format_double(value) + ")");
        if (value < 0.0) throw ConfigError(std::string(key) + " must be non-negative");
    }
    check_range(*f, value);
    std::visit(
        [&](auto* target) {
            using T = std::remove_pointer_t<decltype(target)>;
            if constexpr (std::is_arithmetic_v<T> && !std::is_same_v<T, bool>)
                *target = static_cast<T>(value);
        },
        f->ref);
}

double get_parameter(const ExperimentConfig& config, std::string_view key) {
    auto fs = fields(const_cast<ExperimentConfig&>(config));
    const Field* f = find_field(fs, key);
    if (!f || !is_numeric(*f)) throw ConfigError("'" + std::string(key) + "' is not a numeric setting");
    return std::visit(
        [](auto* v) -> double {
            using T = std::remove_pointer_t<decltype(v)>;
            if constexpr (std::is_arithmetic_v<T> && !std::is_same_v<T, bool>)
                return static_cast<double>(*v);
            else
                return 0.0;
        },
        f->ref);
}

MacroParams to_macro_params(const ExperimentConfig& c) {
    MacroParams p;
    p.c1 = c.parameters.c1;
    p.zeta = c.parameters.zeta;
    p.mu = c.parameters.mu;
    p.gamma = c.gamma();
    p.eta = c.parameters.eta;
    p.delta = c.parameters.delta;
    p.rho0 = c.parameters.rho0;
    p.kernel = KernelSpec{c.kernel.family, c.kernel.mass, c.kernel.radius, 1};
    p.closure = c.parameters.closure;
    return p;
}

MacroNumerics to_macro_numerics(const ExperimentConfig& c) {
    MacroNumerics n;
    n.n_cells = c.numerics.n_cells;
    n.dt = c.numerics.dt;
    n.t_end = c.numerics.t_end;
    n.output_interval = c.numerics.output_interval;
    n.adaptive = c.numerics.adaptive;
    n.cfl_target = c.numerics.cfl_target;
    n.comoving = c.numerics.comoving;
    return n;
}

InitialCondition to_initial_condition(const ExperimentConfig& c) {
    InitialCondition ic;
    ic.kind = c.initial.kind;
    ic.amplitude = c.initial.amplitude;
    ic.seed = c.seed;
    ic.center = c.initial.center;
    ic.variance = c.initial.variance;
    return ic;
}

IbmParams to_ibm_params(const ExperimentConfig& c, int dimension) {
    IbmParams p;
    p.kappa = c.parameters.kappa;
    p.eta = c.parameters.eta;
    p.zeta = c.parameters.zeta;
    p.nu = c.parameters.nu;
    p.d_s = c.parameters.d_s;
    p.d_o = c.parameters.d_o;
    p.r_A = c.parameters.r_A;
    p.phi = KernelSpec{c.kernel.family, c.kernel.mass, c.kernel.radius, dimension};
    p.psi = KernelSpec{c.repulsion.family, c.repulsion.mass, c.repulsion.radius, dimension};
    p.dt = c.numerics.dt;
    p.N = c.parameters.N;
    p.M = c.parameters.M;
    return p;
}

IbmNumerics to_ibm_numerics(const ExperimentConfig& c) {
    IbmNumerics n;
    n.t_end = c.numerics.t_end;
    n.output_interval = c.numerics.output_interval;
    n.stats_radius = c.numerics.stats_radius;
    n.seed = c.seed;
    return n;
}

ModeSet to_mode_set(const ExperimentConfig& c) {
    return c.stability.modes == ModeSet::Kind::Discrete
               ? ModeSet::discrete(c.stability.l_max)
               : ModeSet::continuous(c.stability.k_max, c.stability.n_points);
}

DispersionOptions to_dispersion_options(const ExperimentConfig& c) {
    DispersionOptions o;
    o.order = c.stability.order;
    o.quartic_denominator = c.stability.quartic_denominator;
    o.length = c.domain.length;
    return o;
}

VerificationOptions to_verification_options(const ExperimentConfig& c) {
    VerificationOptions o;
    o.seed = c.seed;
    o.monte_carlo = c.verify.monte_carlo;
    o.monte_carlo_anchors = c.verify.anchors;
    return o;
}

}  // namespace tether::cli
