#include "nlch/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlch {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("config: [" + section + "] " + key + " = '" + v + "' is not a number");
    return out;
}

int to_int(const std::string& section, const std::string& key, const std::string& v) {
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("config: [" + section + "] " + key + " = '" + v + "' is not an integer");
    return out;
}

std::vector<double> to_list(const std::string& section, const std::string& key,
                            const std::string& v) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const std::size_t c = v.find(',', pos);
        const std::string cell = trim(v.substr(pos, c == std::string::npos ? c : c - pos));
        if (!cell.empty())
            out.push_back(to_double(section, key, cell));
        if (c == std::string::npos)
            break;
        pos = c + 1;
    }
    return out;
}

bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
    for (const char* o : opts)
        if (v == o)
            return true;
    return false;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos)
            line = line.substr(0, comment);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (!one_of(section, {"grid", "kernel", "conv", "potential", "initial", "time",
                                  "domain", "outputs"}))
                throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config: key '" + key + "' outside any section");

        auto unknown = [&]() -> ConfigError {
            return ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
        };

        if (section == "grid") {
            if (key == "n") cfg.n = to_int(section, key, val);
            else throw unknown();
        } else if (section == "kernel") {
            if (key == "kind") cfg.kernel_kind = val;
            else if (key == "eta") cfg.eta = to_double(section, key, val);
            else if (key == "a") cfg.mollifier_a = to_double(section, key, val);
            else if (key == "sigma") cfg.sigma = to_double(section, key, val);
            else if (key == "mix_weight") cfg.mix_weight = to_double(section, key, val);
            else throw unknown();
        } else if (section == "conv") {
            if (key == "eps") cfg.eps = to_double(section, key, val);
            else if (key == "alpha") cfg.alpha = to_double(section, key, val);
            else if (key == "mode") cfg.partition_mode = val;
            else if (key == "cache") cfg.cache_path = val;
            else throw unknown();
        } else if (section == "potential") {
            if (key == "kind") cfg.potential_kind = val;
            else if (key == "theta") cfg.theta = to_double(section, key, val);
            else if (key == "omega") cfg.omega = to_double(section, key, val);
            else throw unknown();
        } else if (section == "initial") {
            if (key == "kind") cfg.initial_kind = val;
            else if (key == "a") cfg.initial_a = to_double(section, key, val);
            else if (key == "c") cfg.initial_c = to_double(section, key, val);
            else if (key == "path") cfg.initial_path = val;
            else throw unknown();
        } else if (section == "time") {
            if (key == "t_end") cfg.t_end = to_double(section, key, val);
            else if (key == "abs_tol") cfg.abs_tol = to_double(section, key, val);
            else if (key == "rel_tol") cfg.rel_tol = to_double(section, key, val);
            else if (key == "output_times") cfg.output_times = to_list(section, key, val);
            else throw unknown();
        } else if (section == "domain") {
            if (key == "kind") cfg.domain_kind = val;
            else if (key == "a1") cfg.rect[0] = to_double(section, key, val);
            else if (key == "b1") cfg.rect[1] = to_double(section, key, val);
            else if (key == "a2") cfg.rect[2] = to_double(section, key, val);
            else if (key == "b2") cfg.rect[3] = to_double(section, key, val);
            else if (key == "k") cfg.bulge_k = to_double(section, key, val);
            else throw unknown();
        } else if (section == "outputs") {
            if (key == "dir") cfg.out_dir = val;
            else throw unknown();
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

void RunConfig::validate() const {
    if (n < 2)
        throw ConfigError("config: [grid] n must be at least 2");
    if (!one_of(kernel_kind, {"newt2d", "moll", "mix", "newt3d-reg"}))
        throw ConfigError("config: [kernel] kind '" + kernel_kind + "' unknown");
    if (!(eps > 0.0 && eps < 0.5))
        throw ConfigError("config: [conv] eps must lie in (0, 1/2)");
    if (!(alpha > 0.0))
        throw ConfigError("config: [conv] alpha must be positive");
    if (!one_of(partition_mode, {"maximal", "minimal"}))
        throw ConfigError("config: [conv] mode must be maximal or minimal");
    if (!one_of(potential_kind, {"logarithmic", "regularized", "double-well", "quadratic"}))
        throw ConfigError("config: [potential] kind '" + potential_kind + "' unknown");
    if (!(theta > 0.0))
        throw ConfigError("config: [potential] theta must be positive");
    if (potential_kind == "regularized" && !(omega > 0.0 && omega < 1.0))
        throw ConfigError("config: [potential] omega must lie in (0,1)");
    if (!one_of(initial_kind, {"wave", "compact", "constant", "file"}))
        throw ConfigError("config: [initial] kind '" + initial_kind + "' unknown");
    if (initial_kind == "constant" && !(std::abs(initial_c) < 1.0))
        throw ConfigError("config: [initial] |c| must be below 1");
    if (initial_kind == "file" && initial_path.empty())
        throw ConfigError("config: [initial] kind=file requires a path");
    if (!(t_end > 0.0))
        throw ConfigError("config: [time] t_end must be positive");
    if (!(abs_tol > 0.0 && rel_tol > 0.0))
        throw ConfigError("config: [time] tolerances must be positive");
    if (!one_of(domain_kind, {"square", "rectangle", "bulged"}))
        throw ConfigError("config: [domain] kind '" + domain_kind + "' unknown");
    if (domain_kind == "rectangle" && !(rect[0] < rect[1] && rect[2] < rect[3]))
        throw ConfigError("config: [domain] rectangle corners must satisfy a < b per axis");
    if (domain_kind == "bulged" && !(bulge_k > -0.5 && bulge_k < 0.5))
        throw ConfigError("config: [domain] bulge parameter k must lie in (-1/2, 1/2)");
    if (mollifier_a <= 0.0)
        throw ConfigError("config: [kernel] mollifier radius a must be positive");
}

}  // namespace nlch
