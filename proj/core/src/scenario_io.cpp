#include "neurotrig/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "neurotrig/errors.hpp"

namespace neurotrig {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& key,
                         const std::string& what) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": key '" << key << "': " << what;
    throw MalformedInputError(os.str());
  }

  void check_keys(const YAML::Node& map, const std::string& path,
                  const std::set<std::string>& allowed) const {
    if (!map.IsMap()) fail(map, path, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, path.empty() ? key : path + "." + key, "unknown key");
    }
  }

  double real(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, key, "expected a number");
    }
  }

  std::size_t count(const YAML::Node& node, const std::string& key) const {
    try {
      const long long v = node.as<long long>();
      if (v < 0) fail(node, key, "expected a nonnegative integer");
      return static_cast<std::size_t>(v);
    } catch (const YAML::Exception&) {
      fail(node, key, "expected an integer");
    }
  }

  bool boolean(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail(node, key, "expected true or false");
    }
  }

  std::string text(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key, "expected a string");
    return node.as<std::string>();
  }

  std::vector<double> reals(const YAML::Node& node, const std::string& key) const {
    if (node.IsScalar()) return {real(node, key)};
    if (!node.IsSequence()) fail(node, key, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < node.size(); ++k) {
      out.push_back(real(node[k], key + "[" + std::to_string(k) + "]"));
    }
    return out;
  }

  /// Either one list shared by every agent or a list of per-agent lists.
  std::vector<std::vector<double>> per_agent(const YAML::Node& node, const std::string& key,
                                             std::size_t agents) const {
    if (node.IsSequence() && node.size() > 0 && node[0].IsSequence()) {
      if (node.size() != agents) {
        fail(node, key, "expected " + std::to_string(agents) + " per-agent lists");
      }
      std::vector<std::vector<double>> out;
      for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(reals(node[i], key + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
    return std::vector<std::vector<double>>(agents, reals(node, key));
  }

 private:
  std::string source_;
};

ControllerGains parse_gains(const Reader& r, const YAML::Node& node, const std::string& path,
                            ControllerGains g) {
  r.check_keys(node, path,
               {"kappa1", "c", "gamma_y0", "sigma_y0", "sigma_w", "gamma_w", "mu_filter"});
  if (node["kappa1"]) g.kappa1 = r.real(node["kappa1"], path + ".kappa1");
  if (node["c"]) g.c = r.reals(node["c"], path + ".c");
  if (node["gamma_y0"]) g.gamma_y0 = r.real(node["gamma_y0"], path + ".gamma_y0");
  if (node["sigma_y0"]) g.sigma_y0 = r.real(node["sigma_y0"], path + ".sigma_y0");
  if (node["sigma_w"]) g.sigma_w = r.reals(node["sigma_w"], path + ".sigma_w");
  if (node["gamma_w"]) g.gamma_w = r.reals(node["gamma_w"], path + ".gamma_w");
  if (node["mu_filter"]) g.mu_filter = r.reals(node["mu_filter"], path + ".mu_filter");
  return g;
}

template <class T>
void emit_list(YAML::Emitter& out, const std::vector<T>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ": YAML syntax error: " << e.msg;
    throw MalformedInputError(os.str());
  }
  Scenario s = Scenario::demo();
  if (root.IsNull()) return s;
  r.check_keys(root, "", {"topology", "plant", "basis", "gains", "thresholds", "reference", "run"});

  if (const auto t = root["topology"]) {
    r.check_keys(t, "topology", {"adjacency", "leader_gains"});
    if (!t["adjacency"] || !t["leader_gains"]) {
      r.fail(t, "topology", "needs both adjacency and leader_gains");
    }
    const auto adj = t["adjacency"];
    if (!adj.IsSequence() || adj.size() == 0) r.fail(adj, "topology.adjacency", "expected a list of rows");
    const auto n = static_cast<Eigen::Index>(adj.size());
    s.topology.adjacency.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string key = "topology.adjacency[" + std::to_string(i) + "]";
      const auto row = r.reals(adj[static_cast<std::size_t>(i)], key);
      if (static_cast<Eigen::Index>(row.size()) != n) {
        r.fail(adj[static_cast<std::size_t>(i)], key,
               "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(n));
      }
      for (Eigen::Index j = 0; j < n; ++j) s.topology.adjacency(i, j) = row[static_cast<std::size_t>(j)];
    }
    const auto mu = r.reals(t["leader_gains"], "topology.leader_gains");
    if (static_cast<Eigen::Index>(mu.size()) != n) {
      r.fail(t["leader_gains"], "topology.leader_gains", "expected " + std::to_string(n) + " entries");
    }
    s.topology.leader_gains = Eigen::Map<const Eigen::VectorXd>(mu.data(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (s.topology.adjacency(i, j) < 0.0) r.fail(adj, "topology.adjacency", "negative weight");
      }
    }
  }
  const std::size_t agents = s.agents();

  if (const auto b = root["basis"]) {
    r.check_keys(b, "basis", {"nodes", "range", "width", "include_leader_estimate"});
    if (b["nodes"]) s.basis.nodes = r.count(b["nodes"], "basis.nodes");
    if (b["range"]) {
      const auto range = r.reals(b["range"], "basis.range");
      if (range.size() != 2) r.fail(b["range"], "basis.range", "expected [lo, hi]");
      s.basis.lo = range[0];
      s.basis.hi = range[1];
    }
    if (b["width"]) s.basis.width = r.real(b["width"], "basis.width");
    if (b["include_leader_estimate"]) {
      s.basis.include_leader_estimate =
          r.boolean(b["include_leader_estimate"], "basis.include_leader_estimate");
    }
  }

  if (const auto p = root["plant"]) {
    r.check_keys(p, "plant",
                 {"family", "order", "initial_state", "weights", "weight_seed", "weight_scale"});
    if (p["family"]) {
      const auto fam = r.text(p["family"], "plant.family");
      if (fam == "demo4") s.plant.family = PlantFamily::kDemo4;
      else if (fam == "in_span") s.plant.family = PlantFamily::kInSpan;
      else if (fam == "integrator") s.plant.family = PlantFamily::kIntegrator;
      else r.fail(p["family"], "plant.family", "expected demo4, in_span or integrator");
    }
    if (p["order"]) s.plant.order = r.count(p["order"], "plant.order");
    if (p["initial_state"]) {
      s.plant.initial_states = r.per_agent(p["initial_state"], "plant.initial_state", agents);
    } else {
      std::vector<double> x0(s.plant.order, 0.0);
      x0[0] = 1.0;
      s.plant.initial_states.assign(agents, x0);
    }
    s.plant.ideal_weights.clear();
    if (s.plant.family == PlantFamily::kInSpan) {
      if (!root["basis"] || !root["basis"]["include_leader_estimate"]) {
        s.basis.include_leader_estimate = false;
      }
      if (p["weights"]) {
        const auto w = p["weights"];
        if (!w.IsSequence()) r.fail(w, "plant.weights", "expected one list per level");
        for (std::size_t k = 0; k < w.size(); ++k) {
          s.plant.ideal_weights.push_back(r.reals(w[k], "plant.weights[" + std::to_string(k) + "]"));
        }
      } else {
        const std::uint64_t seed = p["weight_seed"] ? r.count(p["weight_seed"], "plant.weight_seed") : 7;
        const double scale = p["weight_scale"] ? r.real(p["weight_scale"], "plant.weight_scale") : 0.5;
        s.plant.ideal_weights = sample_ideal_weights(s.plant.order, s.basis.nodes, seed, scale);
      }
    }
  } else if (s.plant.initial_states.size() != agents) {
    s.plant.initial_states.assign(agents, {1.0, 0.0});
  }
  const std::size_t order = s.plant.order;

  if (const auto g = root["gains"]) {
    ControllerGains base = ControllerGains::demo();
    if (g.IsSequence()) {
      if (g.size() != agents) r.fail(g, "gains", "expected " + std::to_string(agents) + " per-agent entries");
      s.gains.clear();
      for (std::size_t i = 0; i < g.size(); ++i) {
        s.gains.push_back(parse_gains(r, g[i], "gains[" + std::to_string(i) + "]", base));
      }
    } else {
      s.gains.assign(agents, parse_gains(r, g, "gains", base));
    }
  } else if (s.gains.size() != agents) {
    s.gains.assign(agents, ControllerGains::demo());
  }

  s.thresholds = Thresholds::uniform(agents, order, 0.01, 0.02, 0.005);
  if (const auto t = root["thresholds"]) {
    r.check_keys(t, "thresholds", {"state", "filter", "leader"});
    if (t["state"]) s.thresholds.state = r.per_agent(t["state"], "thresholds.state", agents);
    if (t["filter"]) s.thresholds.filter = r.per_agent(t["filter"], "thresholds.filter", agents);
    if (t["leader"]) s.thresholds.leader = r.real(t["leader"], "thresholds.leader");
  }

  if (const auto ref = root["reference"]) {
    r.check_keys(ref, "reference", {"kind", "offset", "amplitudes", "frequencies", "value"});
    const std::string kind = ref["kind"] ? r.text(ref["kind"], "reference.kind") : "sines";
    if (kind == "constant") {
      s.reference = ReferenceSignal::constant(ref["value"] ? r.real(ref["value"], "reference.value") : 0.0);
    } else if (kind == "sines") {
      s.reference.offset = ref["offset"] ? r.real(ref["offset"], "reference.offset") : 0.0;
      if (ref["amplitudes"]) s.reference.amplitudes = r.reals(ref["amplitudes"], "reference.amplitudes");
      if (ref["frequencies"]) {
        s.reference.frequencies = r.reals(ref["frequencies"], "reference.frequencies");
      }
      if (s.reference.amplitudes.size() != s.reference.frequencies.size()) {
        r.fail(ref, "reference", "amplitudes and frequencies differ in length");
      }
    } else {
      r.fail(ref["kind"], "reference.kind", "expected sines or constant");
    }
  }

  if (const auto run_node = root["run"]) {
    r.check_keys(run_node, "run", {"horizon", "step", "mode", "seed", "output_stride"});
    if (run_node["horizon"]) s.run.horizon = r.real(run_node["horizon"], "run.horizon");
    if (run_node["step"]) s.run.step = r.real(run_node["step"], "run.step");
    if (run_node["mode"]) {
      const auto mode = r.text(run_node["mode"], "run.mode");
      if (mode == "triggered") s.run.mode = ControlMode::kTriggered;
      else if (mode == "continuous") s.run.mode = ControlMode::kContinuous;
      else r.fail(run_node["mode"], "run.mode", "expected triggered or continuous");
    }
    if (run_node["seed"]) s.run.seed = r.count(run_node["seed"], "run.seed");
    if (run_node["output_stride"]) {
      s.run.output_stride = r.count(run_node["output_stride"], "run.output_stride");
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

void write_scenario(const Scenario& s, std::ostream& os) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "adjacency" << YAML::Value << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < s.topology.adjacency.rows(); ++i) {
    std::vector<double> row(s.topology.adjacency.row(i).begin(), s.topology.adjacency.row(i).end());
    emit_list(out, row);
  }
  out << YAML::EndSeq;
  std::vector<double> mu(s.topology.leader_gains.begin(), s.topology.leader_gains.end());
  out << YAML::Key << "leader_gains" << YAML::Value;
  emit_list(out, mu);
  out << YAML::EndMap;

  out << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << to_string(s.plant.family);
  out << YAML::Key << "order" << YAML::Value << s.plant.order;
  out << YAML::Key << "initial_state" << YAML::Value << YAML::BeginSeq;
  for (const auto& x0 : s.plant.initial_states) emit_list(out, x0);
  out << YAML::EndSeq;
  if (!s.plant.ideal_weights.empty()) {
    out << YAML::Key << "weights" << YAML::Value << YAML::BeginSeq;
    for (const auto& w : s.plant.ideal_weights) emit_list(out, w);
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "basis" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "nodes" << YAML::Value << s.basis.nodes;
  out << YAML::Key << "range" << YAML::Value;
  emit_list(out, std::vector<double>{s.basis.lo, s.basis.hi});
  out << YAML::Key << "width" << YAML::Value << s.basis.width;
  out << YAML::Key << "include_leader_estimate" << YAML::Value << s.basis.include_leader_estimate;
  out << YAML::EndMap;

  out << YAML::Key << "gains" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : s.gains) {
    out << YAML::BeginMap;
    out << YAML::Key << "kappa1" << YAML::Value << g.kappa1;
    out << YAML::Key << "c" << YAML::Value;
    emit_list(out, g.c);
    out << YAML::Key << "gamma_y0" << YAML::Value << g.gamma_y0;
    out << YAML::Key << "sigma_y0" << YAML::Value << g.sigma_y0;
    out << YAML::Key << "sigma_w" << YAML::Value;
    emit_list(out, g.sigma_w);
    out << YAML::Key << "gamma_w" << YAML::Value;
    emit_list(out, g.gamma_w);
    out << YAML::Key << "mu_filter" << YAML::Value;
    emit_list(out, g.mu_filter);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "thresholds" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "state" << YAML::Value << YAML::BeginSeq;
  for (const auto& row : s.thresholds.state) emit_list(out, row);
  out << YAML::EndSeq;
  out << YAML::Key << "filter" << YAML::Value << YAML::BeginSeq;
  for (const auto& row : s.thresholds.filter) emit_list(out, row);
  out << YAML::EndSeq;
  out << YAML::Key << "leader" << YAML::Value << s.thresholds.leader;
  out << YAML::EndMap;

  out << YAML::Key << "reference" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << "sines";
  out << YAML::Key << "offset" << YAML::Value << s.reference.offset;
  out << YAML::Key << "amplitudes" << YAML::Value;
  emit_list(out, s.reference.amplitudes);
  out << YAML::Key << "frequencies" << YAML::Value;
  emit_list(out, s.reference.frequencies);
  out << YAML::EndMap;

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "horizon" << YAML::Value << s.run.horizon;
  out << YAML::Key << "step" << YAML::Value << s.run.step;
  out << YAML::Key << "mode" << YAML::Value << to_string(s.run.mode);
  out << YAML::Key << "seed" << YAML::Value << s.run.seed;
  out << YAML::Key << "output_stride" << YAML::Value << s.run.output_stride;
  out << YAML::EndMap;

  out << YAML::EndMap;
  os << out.c_str() << "\n";
}

void apply_parameter(Scenario& s, const std::string& name, double value) {
  const auto per_level = [&](std::vector<double> ControllerGains::*field) {
    for (auto& g : s.gains) (g.*field).assign((g.*field).size(), value);
  };
  if (name == "thresholds.state") s.thresholds.set_state(value);
  else if (name == "thresholds.filter") s.thresholds.set_filter(value);
  else if (name == "thresholds.leader") s.thresholds.leader = value;
  else if (name == "gains.kappa1") for (auto& g : s.gains) g.kappa1 = value;
  else if (name == "gains.gamma_y0") for (auto& g : s.gains) g.gamma_y0 = value;
  else if (name == "gains.sigma_y0") for (auto& g : s.gains) g.sigma_y0 = value;
  else if (name == "gains.c") per_level(&ControllerGains::c);
  else if (name == "gains.sigma_w") per_level(&ControllerGains::sigma_w);
  else if (name == "gains.gamma_w") per_level(&ControllerGains::gamma_w);
  else if (name == "gains.mu_filter") per_level(&ControllerGains::mu_filter);
  else if (name == "basis.width") s.basis.width = value;
  else if (name == "run.step") s.run.step = value;
  else if (name == "run.horizon") s.run.horizon = value;
  else throw MalformedInputError("unknown sweep parameter '" + name + "'");
}

}  // namespace neurotrig
