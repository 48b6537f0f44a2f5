#include "dsfl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace dsfl {

std::string to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::kRing: return "ring";
        case TopologyKind::kPath: return "path";
        case TopologyKind::kComplete: return "complete";
    }
    return "complete";
}

TopologyKind parse_topology_kind(const std::string& s) {
    if (s == "ring") return TopologyKind::kRing;
    if (s == "path") return TopologyKind::kPath;
    if (s == "complete") return TopologyKind::kComplete;
    throw std::invalid_argument("unknown topology_kind '" + s + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
    return out;
}

long long parse_int(const std::string& key, const std::string& v) {
    long long out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
}

}  // namespace

std::vector<std::string> validate_config(const SimConfig& cfg) {
    std::vector<std::string> bad;
    if (!(cfg.n_bs >= 1)) bad.push_back("n_bs >= 1");
    if (!(cfg.total_meds >= cfg.n_bs)) bad.push_back("total_meds >= n_bs");
    if (!(cfg.total_meds <= 10 * cfg.n_bs)) bad.push_back("total_meds <= 10*n_bs");
    if (!(cfg.snr_min_db < cfg.snr_max_db)) bad.push_back("snr_min_db < snr_max_db");
    if (!(cfg.power_w > 0)) bad.push_back("power_w > 0");
    if (!(cfg.bandwidth_hz > 0)) bad.push_back("bandwidth_hz > 0");
    if (!(cfg.cr_min >= 0)) bad.push_back("cr_min >= 0");
    if (!(cfg.cr_min <= cfg.cr_max)) bad.push_back("cr_min <= cr_max");
    if (!(cfg.cr_max < 1)) bad.push_back("cr_max < 1");
    if (!(cfg.quant_bits >= 1 && cfg.quant_bits <= 32)) bad.push_back("quant_bits in [1, 32]");
    if (!(cfg.local_iters >= 1)) bad.push_back("local_iters >= 1");
    if (!(cfg.rounds >= 0)) bad.push_back("rounds >= 0");
    if (!(cfg.lr >= 0 && std::isfinite(cfg.lr))) bad.push_back("lr >= 0");
    if (!(cfg.latent_dim >= 1)) bad.push_back("latent_dim >= 1");
    if (!(cfg.image_size >= 8)) bad.push_back("image_size >= 8");
    if (!(cfg.lambda_cls >= 0 && std::isfinite(cfg.lambda_cls))) bad.push_back("lambda_cls >= 0");
    if (!(cfg.dirichlet_alpha > 0)) bad.push_back("dirichlet_alpha > 0");
    if (cfg.dataset_source.empty()) bad.push_back("dataset_source nonempty");
    return bad;
}

std::string serialize_config(const SimConfig& cfg) {
    std::ostringstream os;
    os << "seed = " << cfg.seed << "\n";
    os << "n_bs = " << cfg.n_bs << "\n";
    os << "total_meds = " << cfg.total_meds << "\n";
    os << "topology_kind = " << to_string(cfg.topology_kind) << "\n";
    os << "snr_min_db = " << format_double(cfg.snr_min_db) << "\n";
    os << "snr_max_db = " << format_double(cfg.snr_max_db) << "\n";
    os << "power_w = " << format_double(cfg.power_w) << "\n";
    os << "bandwidth_hz = " << format_double(cfg.bandwidth_hz) << "\n";
    os << "cr_min = " << format_double(cfg.cr_min) << "\n";
    os << "cr_max = " << format_double(cfg.cr_max) << "\n";
    os << "quant_bits = " << cfg.quant_bits << "\n";
    os << "local_iters = " << cfg.local_iters << "\n";
    os << "rounds = " << cfg.rounds << "\n";
    os << "lr = " << format_double(cfg.lr) << "\n";
    os << "latent_dim = " << cfg.latent_dim << "\n";
    os << "image_size = " << cfg.image_size << "\n";
    os << "lambda_cls = " << format_double(cfg.lambda_cls) << "\n";
    os << "dirichlet_alpha = " << format_double(cfg.dirichlet_alpha) << "\n";
    os << "error_feedback = " << (cfg.error_feedback ? "true" : "false") << "\n";
    os << "dataset_source = " << cfg.dataset_source << "\n";
    return os.str();
}

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    std::set<std::string> seen;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");

        if (key == "seed") cfg.seed = parse_u64(key, val);
        else if (key == "n_bs") cfg.n_bs = static_cast<int>(parse_int(key, val));
        else if (key == "total_meds") cfg.total_meds = static_cast<int>(parse_int(key, val));
        else if (key == "topology_kind") cfg.topology_kind = parse_topology_kind(val);
        else if (key == "snr_min_db") cfg.snr_min_db = parse_real(key, val);
        else if (key == "snr_max_db") cfg.snr_max_db = parse_real(key, val);
        else if (key == "power_w") cfg.power_w = parse_real(key, val);
        else if (key == "bandwidth_hz") cfg.bandwidth_hz = parse_real(key, val);
        else if (key == "cr_min") cfg.cr_min = parse_real(key, val);
        else if (key == "cr_max") cfg.cr_max = parse_real(key, val);
        else if (key == "quant_bits") cfg.quant_bits = static_cast<int>(parse_int(key, val));
        else if (key == "local_iters") cfg.local_iters = static_cast<int>(parse_int(key, val));
        else if (key == "rounds") cfg.rounds = static_cast<int>(parse_int(key, val));
        else if (key == "lr") cfg.lr = parse_real(key, val);
        else if (key == "latent_dim") cfg.latent_dim = static_cast<int>(parse_int(key, val));
        else if (key == "image_size") cfg.image_size = static_cast<int>(parse_int(key, val));
        else if (key == "lambda_cls") cfg.lambda_cls = parse_real(key, val);
        else if (key == "dirichlet_alpha") cfg.dirichlet_alpha = parse_real(key, val);
        else if (key == "error_feedback") cfg.error_feedback = parse_bool(key, val);
        else if (key == "dataset_source") cfg.dataset_source = val;
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    return cfg;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return parse_config(os.str());
}

}  // namespace dsfl
