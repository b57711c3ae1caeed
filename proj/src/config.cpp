#include "blowup/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string where(const std::string& key, int line) {
    return line > 0 ? "line " + std::to_string(line) + " ('" + key + "')" : "'" + key + "'";
}

bool parse_long(const std::string& s, long& out) {
    const char* end = s.data() + s.size();
    auto r = std::from_chars(s.data(), end, out);
    return r.ec == std::errc() && r.ptr == end;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (...) {
        return false;
    }
    return used == s.size() && std::isfinite(out);
}

bool parse_flag(const std::string& s, bool& out) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "true" || l == "yes" || l == "on" || l == "1") {
        out = true;
        return true;
    }
    if (l == "false" || l == "no" || l == "off" || l == "0") {
        out = false;
        return true;
    }
    return false;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

void validate(const KeySpec& k, const std::string& v, int line) {
    bool ok = true;
    switch (k.type) {
        case ValueType::Integer: {
            long x;
            ok = parse_long(v, x);
            break;
        }
        case ValueType::Real: {
            double x;
            ok = parse_double(v, x);
            break;
        }
        case ValueType::Flag: {
            bool x;
            ok = parse_flag(v, x);
            break;
        }
        case ValueType::RealList: {
            const auto items = split_list(v);
            ok = !items.empty();
            for (const auto& it : items) {
                double x;
                ok = ok && parse_double(it, x);
            }
            break;
        }
        case ValueType::Text: ok = !v.empty(); break;
    }
    if (!ok) throw ConfigError("malformed value '" + v + "' for " + where(k.key, line));
}

using V = ValueType;

// keys shared by evolve and shoot
std::vector<KeySpec> evolution_keys() {
    return {
        {"d", V::Integer, "5", "space dimension (the evolution is implemented for 5)"},
        {"nr", V::Integer, "48", "radial nodes on (0, 1]"},
        {"nt", V::Integer, "12", "angular nodes"},
        {"axis", V::Integer, "5", "boost axis, 1-based"},
        {"shape", V::Text, "none", "perturbation: none, radial, axis_odd, mixed"},
        {"amplitude", V::Real, "1e-3", "perturbation amplitude"},
        {"width", V::Real, "0.5", "Gaussian width of the perturbation"},
        {"perturb_first", V::Flag, "true", "perturb psi1"},
        {"perturb_second", V::Flag, "false", "perturb psi2"},
        {"T", V::Real, "1", "blowup time of the similarity frame"},
        {"T_window", V::Real, "0.25", "admissible blowup times (1 - w, 1 + w)"},
        {"cfl", V::Real, "0.5", "time step factor"},
        {"dt_max", V::Real, "1e-2", "largest time step"},
        {"tau_max", V::Real, "10", "final similarity time"},
        {"record_every", V::Real, "0.05", "trace spacing in tau"},
        {"guard", V::Real, "70.710678118654755", "blowup guard on max |Psi| (50 sqrt2)"},
        {"modulate", V::Flag, "true", "extract the rapidity at every record"},
        {"alpha_max", V::Real, "0.5", "admissible rapidity bound"},
        {"mode_refresh", V::Real, "1e-2", "recompute modes when alpha moves this far"},
        {"fit_lo", V::Real, "2", "fit window start"},
        {"fit_hi", V::Real, "8", "fit window end"},
        {"fit_residual", V::Real, "0.5", "largest admissible log residual of a fit"},
        {"q_tol", V::Real, "1e-8", "bound on the constraint amplitude after each solve"},
    };
}

std::map<std::string, std::vector<KeySpec>> build_schemas() {
    std::map<std::string, std::vector<KeySpec>> s;
    s["dissipativity"] = {
        {"d", V::Integer, "5", "space dimension"},
        {"nr", V::Integer, "64", "radial nodes"},
        {"nt", V::Integer, "8", "angular nodes"},
        {"samples", V::Integer, "100", "random polynomial pairs"},
        {"degree", V::Integer, "5", "polynomial degree"},
        {"tol", V::Real, "1e-8", "relative margin tolerance"},
        {"zeta_dims", V::RealList, "5, 7, 9, 11", "dimensions for the surface identity check"},
        {"zeta_tol", V::Real, "1e-10", "relative tolerance of the surface identity"},
    };
    s["mode-scan"] = {
        {"re_lo", V::Integer, "-49", "first Re index (Re = index * step)"},
        {"re_hi", V::Integer, "150", "last Re index"},
        {"im_hi", V::Integer, "250", "largest |Im| index"},
        {"step", V::Real, "0.02", "grid step"},
        {"lmax", V::Integer, "8", "largest harmonic degree"},
        {"flag_tol", V::Real, "1e-8", "flag when |1/(Gamma(a) Gamma(b))| is below this"},
        {"separation", V::Real, "1e-3", "required modulus away from flags"},
        {"heat_stride", V::Integer, "5", "heat map subsampling"},
    };
    s["spectrum"] = {
        {"d", V::Integer, "5", "space dimension"},
        {"nr", V::Integer, "64", "radial nodes"},
        {"lmax", V::Integer, "4", "largest harmonic degree (angular nodes = lmax + 1)"},
        {"axis", V::Integer, "5", "boost axis"},
        {"alphas", V::RealList, "0, 0.1", "rapidities along the axis"},
        {"converge_tol", V::Real, "1e-4", "largest eigenvalue drift under refinement"},
        {"refine_factor", V::Real, "1.5", "radial refinement factor"},
        {"re_floor", V::Real, "-0.5", "only eigenvalues with larger real part are asserted"},
        {"gap_tol", V::Real, "1e-6", "distance to the symmetry eigenvalues"},
        {"eigen_nr", V::Integer, "16", "radial nodes for the eigenfunction residuals"},
        {"eigen_nt", V::Integer, "12", "angular nodes for the eigenfunction residuals"},
        {"eigen_alphas", V::RealList, "0, 0.05, 0.1, 0.15", "rapidities for the eigenfunction residuals"},
        {"eigen_tol", V::Real, "1e-9", "sup-norm tolerance of the eigenfunction residuals"},
        {"probe_nr", V::Integer, "16", "radial nodes of the linear flow probe"},
        {"probe_nt", V::Integer, "8", "angular nodes of the linear flow probe"},
        {"probe_tau", V::Real, "10", "length of the linear flow probe"},
        {"probe_step", V::Real, "2.5", "RK4 step of the linear flow probe times the spectral radius"},
        {"rate_tol", V::Real, "1e-3", "tolerance of the symmetry-mode rates 1 and 0"},
        {"deflated_rate_max", V::Real, "-0.6", "largest rate of deflated random data"},
    };
    s["wronskian"] = {
        {"lmax", V::Integer, "6", "largest harmonic degree"},
        {"samples", V::Integer, "91", "sample points per degree"},
        {"rho_lo", V::Real, "0.1", "Wronskian range start"},
        {"rho_hi", V::Real, "0.9", "Wronskian range end"},
        {"closed_tol", V::Real, "1e-10", "closed form against series"},
        {"wronskian_tol", V::Real, "1e-8", "relative Wronskian error"},
        {"hyp_tol", V::Real, "1e-9", "relative residual of the hypergeometric equation"},
    };
    s["ode-check"] = {
        {"rho_lo", V::Real, "0.05", "range start"},
        {"rho_hi", V::Real, "0.95", "range end"},
        {"samples", V::Integer, "91", "sample points"},
        {"c0", V::Real, "0", "coefficient of rho in the particular solution"},
        {"residual_tol", V::Real, "1e-8", "ODE residual tolerance"},
        {"pair_tol", V::Real, "1e-12", "homogeneous pair and Wronskian tolerance"},
        {"blowup_T", V::RealList, "1, 1.2", "frames for the spatially constant blowup check"},
        {"blowup_times", V::RealList, "0.1, 0.3, 0.5, 0.7, 0.9", "times t of the blowup check"},
        {"blowup_tol", V::Real, "1e-6", "relative tolerance against sqrt2 / (1 - t)"},
        {"nr", V::Integer, "16", "radial nodes of the blowup check"},
        {"nt", V::Integer, "4", "angular nodes of the blowup check"},
    };
    s["evolve"] = evolution_keys();
    s["evolve"].push_back({"phi_tol", V::Real, "1e-10", "bound on ||Phi|| for unperturbed data"});
    s["evolve"].push_back({"snapshot", V::Flag, "false", "write the final state as a binary snapshot"});
    s["shoot"] = evolution_keys();
    for (KeySpec k : std::vector<KeySpec>{
             {"T_lo", V::Real, "0.98", "bracket start"},
             {"T_hi", V::Real, "1.02", "bracket end"},
             {"bracket_tol", V::Real, "1e-6", "required bracket width"},
             {"shoot_tol", V::Real, "1e-11", "width at which the root search stops"},
             {"tau_class", V::Real, "10", "classification time"},
             {"p_exit", V::Real, "0.1", "early classification threshold on |p|"},
             {"probe_points", V::Integer, "5", "interior points of the monotonicity scan"},
             {"rate_max", V::Real, "-0.45", "largest admissible decay rate"},
             {"alpha_inf_max", V::Real, "0.05", "bound on the limiting rapidity"},
             {"envelope_factor", V::Real, "2", "envelope constant in front of delta"},
             {"check_phi_rate", V::Text, "auto", "assert the rate of ||Phi||: auto, yes, no"},
             {"check_alpha_rate", V::Text, "auto", "assert the rate of |alpha - alpha_inf|: auto, yes, no"},
         })
        s["shoot"].push_back(k);
    s["fit-rate"] = {
        {"trace", V::Text, "trace.csv", "trace file written by evolve or shoot"},
        {"column", V::Text, "phi_norm", "column to fit against tau"},
        {"fit_lo", V::Real, "2", "window start"},
        {"fit_hi", V::Real, "8", "window end"},
        {"fit_residual", V::Real, "0.5", "largest admissible log residual"},
        {"rate_max", V::Real, "-0.45", "largest admissible rate"},
    };
    s["norm-equivalence"] = {
        {"d", V::Integer, "5", "space dimension"},
        {"nr", V::Integer, "32", "radial nodes"},
        {"nt", V::Integer, "8", "angular nodes"},
        {"samples", V::Integer, "20", "random polynomial pairs"},
        {"degree", V::Integer, "5", "polynomial degree"},
        {"max_spread", V::Real, "100", "bound on max ratio / min ratio"},
    };
    return s;
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
    static const auto s = build_schemas();
    return s;
}

}  // namespace

Config::Config(std::vector<KeySpec> schema) : schema_(std::move(schema)) {
    for (const auto& k : schema_) values_[k.key] = k.fallback;
}

const KeySpec& Config::spec(const std::string& key) const {
    for (const auto& k : schema_)
        if (k.key == key) return k;
    throw ConfigError("unknown key '" + key + "'");
}

void Config::set(const std::string& key, const std::string& value, int line) {
    const KeySpec* k = nullptr;
    for (const auto& s : schema_)
        if (s.key == key) k = &s;
    if (!k) throw ConfigError("unknown key " + where(key, line));
    validate(*k, value, line);
    values_[key] = value;
}

long Config::get_int(const std::string& key) const {
    if (spec(key).type != ValueType::Integer) throw ConfigError("'" + key + "' is not an integer key");
    long x = 0;
    parse_long(values_.at(key), x);
    return x;
}

double Config::get_real(const std::string& key) const {
    const auto t = spec(key).type;
    if (t != ValueType::Real && t != ValueType::Integer) throw ConfigError("'" + key + "' is not a real key");
    double x = 0;
    parse_double(values_.at(key), x);
    return x;
}

std::string Config::get_text(const std::string& key) const {
    spec(key);
    return values_.at(key);
}

bool Config::get_flag(const std::string& key) const {
    if (spec(key).type != ValueType::Flag) throw ConfigError("'" + key + "' is not a flag key");
    bool x = false;
    parse_flag(values_.at(key), x);
    return x;
}

std::vector<double> Config::get_list(const std::string& key) const {
    if (spec(key).type != ValueType::RealList) throw ConfigError("'" + key + "' is not a list key");
    std::vector<double> out;
    for (const auto& it : split_list(values_.at(key))) {
        double x = 0;
        parse_double(it, x);
        out.push_back(x);
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> Config::echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : schema_) out.emplace_back(k.key, values_.at(k.key));
    return out;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"dissipativity", "mode-scan", "spectrum",
                                                   "wronskian",     "ode-check", "evolve",
                                                   "shoot",         "fit-rate",  "norm-equivalence"};
    return names;
}

const std::vector<KeySpec>& schema_for(const std::string& subcommand) {
    const auto it = schemas().find(subcommand);
    if (it == schemas().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
    return it->second;
}

Config default_config(const std::string& subcommand) { return Config(schema_for(subcommand)); }

Config parse_config(const std::string& text, const std::string& subcommand) {
    Config c = default_config(subcommand);
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
        c.set(key, value, line);
    }
    return c;
}

Config load_config(const std::string& path, const std::string& subcommand) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), subcommand);
}

std::string describe_schema(const std::string& subcommand) {
    static const char* names[] = {"int", "real", "text", "flag", "list"};
    std::ostringstream out;
    for (const auto& k : schema_for(subcommand))
        out << "  " << k.key << " (" << names[static_cast<int>(k.type)] << ", default " << k.fallback << "): " << k.help
            << "\n";
    return out.str();
}

}  // namespace blowup
