#include "hiresim/config_json.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace hiresim {

using nlohmann::json;

MarketConfig default_market_config() {
  MarketConfig cfg;
  cfg.d = 1;
  GroupSpec g1{"g1", 10, VecXd::Constant(1, 3.0), 2.0, VecXd::Constant(1, 1.0), 10};
  GroupSpec g2{"g2", 2, VecXd::Constant(1, 3.0), 2.0, VecXd::Constant(1, 1.0), 2};
  cfg.groups = {g1, g2};
  cfg.sigma_eps = 2.0;
  cfg.sigma_eta = 0.0;
  cfg.horizon = 1000;
  cfg.lambda_reg = 1.0;
  cfg.delta = 0.1;
  cfg.s_bound = -1.0;
  cfg.a_hybrid = 1.0;
  cfg.k_finalists = 2;
  cfg.seed = 0;
  cfg.radius_variant = RadiusVariant::DetBased;
  return cfg;
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& problem) {
  throw ConfigError(field, problem);
}

void check_known_keys(const json& j, const std::string& where,
                      const std::set<std::string>& known) {
  for (const auto& [key, _] : j.items())
    if (!known.count(key))
      bad(where.empty() ? key : where + "." + key, "is not a recognized field");
}

double get_num(const json& j, const std::string& path, const std::string& key,
               double def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number()) bad(path + key, "must be a number");
  return j.at(key).get<double>();
}

long get_int(const json& j, const std::string& path, const std::string& key,
             long def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number_integer()) bad(path + key, "must be an integer");
  return j.at(key).get<long>();
}

std::string get_str(const json& j, const std::string& path, const std::string& key,
                    const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_string()) bad(path + key, "must be a string");
  return j.at(key).get<std::string>();
}

// A length-d vector; a bare number is broadcast.
VecXd get_vec(const json& j, const std::string& path, const std::string& key, int d,
              const VecXd& def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (v.is_number()) return VecXd::Constant(d, v.get<double>());
  if (!v.is_array()) bad(path + key, "must be a number or an array of numbers");
  if (int(v.size()) != d)
    bad(path + key, "must have length d = " + std::to_string(d));
  VecXd out(d);
  for (int i = 0; i < d; ++i) {
    if (!v[i].is_number()) bad(path + key, "must contain only numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

PolicySpec parse_policy(const std::string& s) {
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? std::string() : s.substr(colon + 1);
  auto num_arg = [&](double def) {
    if (arg.empty()) return def;
    try {
      std::size_t used = 0;
      const double v = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
      return v;
    } catch (const std::exception&) {
      bad("policy", "has a malformed argument '" + arg + "'");
    }
  };
  PolicySpec p;
  if (name == "lf") p.kind = PolicyKind::LaissezFaire;
  else if (name == "ucb") p.kind = PolicyKind::Ucb;
  else if (name == "hybrid") {
    p.kind = PolicyKind::Hybrid;
    p.a = num_arg(-1);
    if (!arg.empty() && p.a < 0) bad("policy", "hybrid scale must be >= 0");
  } else if (name == "lf2s") p.kind = PolicyKind::TwoStageLF;
  else if (name == "rooney") p.kind = PolicyKind::Rooney;
  else if (name == "rooney_then_lf") {
    p.kind = PolicyKind::RooneyThenLF;
    p.switch_round = int(num_arg(100));
  } else if (name == "warmstart_lf") {
    p.kind = PolicyKind::WarmStartLF;
    p.n0_total = int(num_arg(-1));
  } else {
    bad("policy", "unknown policy '" + name + "'");
  }
  return p;
}

SubsidyRule parse_subsidy(const std::string& s) {
  if (s == "none") return SubsidyRule::None;
  if (s == "ucb_index") return SubsidyRule::UcbIndex;
  if (s == "hybrid_index") return SubsidyRule::HybridIndex;
  if (s == "ucb_cost_saving") return SubsidyRule::UcbCostSaving;
  if (s == "hybrid_cost_saving") return SubsidyRule::HybridCostSaving;
  bad("subsidy", "unknown rule '" + s + "'");
}

std::string radius_label(RadiusVariant v) {
  switch (v) {
    case RadiusVariant::DetBased: return "det_based";
    case RadiusVariant::LBased: return "l_based";
    case RadiusVariant::Bayes: return "bayes";
  }
  return "?";
}

RadiusVariant parse_radius(const std::string& s) {
  if (s == "det_based") return RadiusVariant::DetBased;
  if (s == "l_based") return RadiusVariant::LBased;
  if (s == "bayes") return RadiusVariant::Bayes;
  bad("radius", "unknown variant '" + s + "'");
}

SimConfig parse_config_text(const std::string& text) {
  json j;
  const bool blank =
      text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (blank) {
    j = json::object();  // an empty body means "all defaults"
  } else {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      bad("json", std::string("failed to parse: ") + e.what());
    }
  }
  if (!j.is_object()) bad("json", "top level must be an object");
  check_known_keys(j, "",
                   {"d", "groups", "sigma_eps", "sigma_eta", "horizon", "lambda",
                    "delta", "s_bound", "a_hybrid", "k_finalists", "seed", "radius",
                    "policy", "subsidy", "runs"});

  SimConfig sc;
  sc.market = default_market_config();
  MarketConfig& m = sc.market;
  m.d = int(get_int(j, "", "d", m.d));
  if (m.d < 1) bad("d", "must be >= 1");

  if (j.contains("groups")) {
    if (!j.at("groups").is_array()) bad("groups", "must be an array");
    m.groups.clear();
    int gi = 0;
    for (const json& gj : j.at("groups")) {
      const std::string path = "groups[" + std::to_string(gi) + "].";
      if (!gj.is_object()) bad("groups[" + std::to_string(gi) + "]", "must be an object");
      check_known_keys(gj, "groups[" + std::to_string(gi) + "]",
                       {"label", "count", "mu_x", "sigma_x", "theta", "n0"});
      GroupSpec g;
      g.label = get_str(gj, path, "label", "g" + std::to_string(gi + 1));
      g.count = int(get_int(gj, path, "count", 1));
      g.mu_x = get_vec(gj, path, "mu_x", m.d, VecXd::Constant(m.d, 3.0));
      g.sigma_x = get_num(gj, path, "sigma_x", 2.0);
      g.theta = get_vec(gj, path, "theta", m.d, VecXd::Constant(m.d, 1.0));
      g.n0 = int(get_int(gj, path, "n0", g.count));
      m.groups.push_back(std::move(g));
      ++gi;
    }
  } else if (m.d != 1) {
    // default groups were built for d = 1; rebuild their vectors
    for (auto& g : m.groups) {
      g.mu_x = VecXd::Constant(m.d, 3.0);
      g.theta = VecXd::Constant(m.d, 1.0);
    }
  }

  m.sigma_eps = get_num(j, "", "sigma_eps", m.sigma_eps);
  m.sigma_eta = get_num(j, "", "sigma_eta", m.sigma_eta);
  m.horizon = int(get_int(j, "", "horizon", m.horizon));
  m.lambda_reg = get_num(j, "", "lambda", m.lambda_reg);
  m.delta = get_num(j, "", "delta", m.delta);
  m.s_bound = get_num(j, "", "s_bound", m.s_bound);
  m.a_hybrid = get_num(j, "", "a_hybrid", m.a_hybrid);
  m.k_finalists = int(get_int(j, "", "k_finalists", m.k_finalists));
  m.seed = std::uint64_t(get_int(j, "", "seed", long(m.seed)));
  m.radius_variant = parse_radius(get_str(j, "", "radius", radius_label(m.radius_variant)));

  sc.policy = parse_policy(get_str(j, "", "policy", "lf"));
  if (j.contains("subsidy")) sc.subsidy = parse_subsidy(get_str(j, "", "subsidy", "none"));
  sc.runs = get_int(j, "", "runs", sc.runs);
  if (sc.runs < 1) bad("runs", "must be >= 1");

  validate(m);
  validate_policy(m, sc.policy);
  return sc;
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const MarketConfig& cfg) {
  json j;
  j["d"] = cfg.d;
  json groups = json::array();
  for (const auto& g : cfg.groups) {
    json gj;
    gj["label"] = g.label;
    gj["count"] = g.count;
    gj["mu_x"] = std::vector<double>(g.mu_x.data(), g.mu_x.data() + g.mu_x.size());
    gj["sigma_x"] = g.sigma_x;
    gj["theta"] = std::vector<double>(g.theta.data(), g.theta.data() + g.theta.size());
    gj["n0"] = g.n0;
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  j["sigma_eps"] = cfg.sigma_eps;
  j["sigma_eta"] = cfg.sigma_eta;
  j["horizon"] = cfg.horizon;
  j["lambda"] = cfg.lambda_reg;
  j["delta"] = cfg.delta;
  j["s_bound"] = cfg.s_bound;
  j["a_hybrid"] = cfg.a_hybrid;
  j["k_finalists"] = cfg.k_finalists;
  j["seed"] = cfg.seed;
  j["radius"] = radius_label(cfg.radius_variant);
  return j;
}

json to_json(const SimConfig& sc) {
  json j = to_json(sc.market);
  std::string pol = policy_label(sc.policy);
  if (sc.policy.kind == PolicyKind::Hybrid && sc.policy.a >= 0)
    pol += ":" + std::to_string(sc.policy.a);
  if (sc.policy.kind == PolicyKind::RooneyThenLF)
    pol += ":" + std::to_string(sc.policy.switch_round);
  if (sc.policy.kind == PolicyKind::WarmStartLF && sc.policy.n0_total >= 0)
    pol += ":" + std::to_string(sc.policy.n0_total);
  j["policy"] = pol;
  j["subsidy"] = subsidy_label(sc.subsidy);
  j["runs"] = sc.runs;
  return j;
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hiresim
