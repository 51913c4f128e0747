#include "lsreconn/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

namespace lsreconn {
namespace {

using nlohmann::json;

class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw SchemaError("config: '" + where + "' must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw SchemaError("config: unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
    }
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) {
    throw SchemaError("config: missing required key '" + (where.empty() ? "" : where + ".") + key + "'");
  }
  return obj.at(key);
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? parse_number(obj.at(key), where + "." + key) : fallback;
}

long integer_or(const json& obj, const char* key, long fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const double v = parse_number(obj.at(key), where + "." + key);
  if (v != std::floor(v)) throw SchemaError("config: '" + where + "." + key + "' must be an integer");
  return static_cast<long>(v);
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError("config: '" + where + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::uint64_t seed_or(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_unsigned() && !obj.at(key).is_number_integer()) {
    throw SchemaError(std::string("config: seeds.") + key + " must be a non-negative integer");
  }
  return obj.at(key).get<std::uint64_t>();
}

}  // namespace

double parse_number(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw SchemaError("config: '" + where + "' must be a number");
  std::string s = value.get<std::string>();
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw SchemaError("config: '" + where + "' is empty");
  double sign = 1.0;
  if (s[0] == '-') {
    sign = -1.0;
    s.erase(0, 1);
  }
  double result = 1.0;
  char op = '*';
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find_first_of("*/", pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    double v;
    if (tok == "pi") {
      v = std::numbers::pi;
    } else {
      std::size_t used = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw SchemaError("config: cannot parse '" + value.get<std::string>() + "' at '" + where + "'");
      }
      if (used != tok.size()) {
        throw SchemaError("config: cannot parse '" + value.get<std::string>() + "' at '" + where + "'");
      }
    }
    result = op == '*' ? result * v : result / v;
    if (next == std::string::npos) break;
    op = s[next];
    pos = next + 1;
  }
  return sign * result;
}

RunConfig RunConfig::from_json(const json& doc) {
  allow_keys(doc, "", {"geometry", "net", "cutoffs", "sampler", "train", "eigen", "reference", "seeds", "output"});
  RunConfig rc;

  const json& g = require(doc, "geometry", "");
  allow_keys(g, "geometry", {"dim", "bounds", "cuts_x", "cuts_y"});
  rc.dim = static_cast<int>(integer_or(g, "dim", -1, "geometry"));
  require(g, "dim", "geometry");
  const json& bounds = require(g, "bounds", "geometry");
  if (!bounds.is_array() || static_cast<int>(bounds.size()) != rc.dim) {
    throw SchemaError("config: 'geometry.bounds' needs one [lo, hi] pair per dimension");
  }
  for (int k = 0; k < rc.dim; ++k) {
    const auto pair = number_list(bounds[k], "geometry.bounds[" + std::to_string(k) + "]");
    if (pair.size() != 2) throw SchemaError("config: each bounds entry must be [lo, hi]");
    rc.bounds[k] = {pair[0], pair[1]};
  }
  rc.cuts_x = g.contains("cuts_x") ? number_list(g["cuts_x"], "geometry.cuts_x") : std::vector<double>{};
  rc.cuts_y = g.contains("cuts_y") ? number_list(g["cuts_y"], "geometry.cuts_y") : std::vector<double>{};

  const json& n = require(doc, "net", "");
  allow_keys(n, "net", {"hidden", "n1", "n2"});
  rc.net.input_dim = rc.dim;
  rc.net.hidden.clear();
  for (double h : number_list(require(n, "hidden", "net"), "net.hidden")) rc.net.hidden.push_back(static_cast<int>(h));
  rc.net.n1 = static_cast<int>(integer_or(n, "n1", -1, "net"));
  rc.net.n2 = static_cast<int>(integer_or(n, "n2", -1, "net"));
  require(n, "n1", "net");
  require(n, "n2", "net");

  if (doc.contains("cutoffs")) {
    const json& c = doc["cutoffs"];
    allow_keys(c, "cutoffs", {"delta1", "delta2"});
    if (c.contains("delta1") || c.contains("delta2")) {
      CutoffConfig cc;
      cc.delta1 = parse_number(require(c, "delta1", "cutoffs"), "cutoffs.delta1");
      cc.delta2 = parse_number(require(c, "delta2", "cutoffs"), "cutoffs.delta2");
      rc.cutoffs = cc;
    }
  }

  const json& s = require(doc, "sampler", "");
  allow_keys(s, "sampler", {"n_params", "p_min", "p_max", "n_interior", "n_interface"});
  rc.sampler.n_params = static_cast<int>(integer_or(s, "n_params", rc.sampler.n_params, "sampler"));
  rc.sampler.p_min = number_or(s, "p_min", rc.sampler.p_min, "sampler");
  rc.sampler.p_max = number_or(s, "p_max", rc.sampler.p_max, "sampler");
  rc.sampler.n_interior = static_cast<int>(integer_or(s, "n_interior", rc.sampler.n_interior, "sampler"));
  rc.sampler.n_interface = static_cast<int>(integer_or(s, "n_interface", rc.sampler.n_interface, "sampler"));

  const json& t = require(doc, "train", "");
  allow_keys(t, "train", {"iterations", "lr0", "lr_end", "theta", "ridge", "validation_every", "checkpoint_every"});
  rc.train.iterations = integer_or(t, "iterations", rc.train.iterations, "train");
  rc.train.lr0 = number_or(t, "lr0", rc.train.lr0, "train");
  rc.train.lr_end = number_or(t, "lr_end", rc.train.lr_end, "train");
  rc.train.theta = number_or(t, "theta", rc.train.theta, "train");
  rc.train.ridge = number_or(t, "ridge", rc.train.ridge, "train");
  rc.train.validation_every = static_cast<int>(integer_or(t, "validation_every", rc.train.validation_every, "train"));
  rc.train.checkpoint_every = static_cast<int>(integer_or(t, "checkpoint_every", rc.train.checkpoint_every, "train"));

  if (doc.contains("eigen")) {
    const json& e = doc["eigen"];
    allow_keys(e, "eigen", {"n3", "max_exponent", "include_constant"});
    rc.train.n3 = static_cast<int>(integer_or(e, "n3", rc.train.n3, "eigen"));
    rc.train.selection.max_exponent = number_or(e, "max_exponent", rc.train.selection.max_exponent, "eigen");
    if (e.contains("include_constant")) {
      if (!e["include_constant"].is_boolean()) throw SchemaError("config: 'eigen.include_constant' must be a boolean");
      rc.train.selection.include_constant = e["include_constant"].get<bool>();
    }
  }

  const json& r = require(doc, "reference", "");
  allow_keys(r, "reference", {"rhs", "fem_n", "eval_n", "eval_n_interface", "report_params", "report_seed"});
  if (!require(r, "rhs", "reference").is_string()) throw SchemaError("config: 'reference.rhs' must be a string");
  rc.reference.rhs = r["rhs"].get<std::string>();
  rc.reference.fem_n = static_cast<int>(integer_or(r, "fem_n", rc.reference.fem_n, "reference"));
  rc.reference.eval_n = static_cast<int>(integer_or(r, "eval_n", rc.reference.eval_n, "reference"));
  rc.reference.eval_n_interface =
      static_cast<int>(integer_or(r, "eval_n_interface", rc.reference.eval_n_interface, "reference"));
  rc.reference.report_params = static_cast<int>(integer_or(r, "report_params", rc.reference.report_params, "reference"));
  rc.reference.report_seed = seed_or(r, "report_seed", rc.reference.report_seed);

  if (doc.contains("seeds")) {
    const json& sd = doc["seeds"];
    allow_keys(sd, "seeds", {"params", "interior", "interface", "init", "validation"});
    rc.seeds.params = seed_or(sd, "params", rc.seeds.params);
    rc.seeds.interior = seed_or(sd, "interior", rc.seeds.interior);
    rc.seeds.interface = seed_or(sd, "interface", rc.seeds.interface);
    rc.seeds.init = seed_or(sd, "init", rc.seeds.init);
    rc.seeds.validation = seed_or(sd, "validation", rc.seeds.validation);
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    allow_keys(o, "output", {"dir", "deterministic"});
    if (o.contains("dir")) rc.output_dir = o["dir"].get<std::string>();
    if (o.contains("deterministic")) rc.deterministic = o["deterministic"].get<bool>();
  }

  // Validate by building the problem once.
  (void)rc.problem();

  json resolved = doc;
  resolved["sampler"] = {{"n_params", rc.sampler.n_params},
                         {"p_min", rc.sampler.p_min},
                         {"p_max", rc.sampler.p_max},
                         {"n_interior", rc.sampler.n_interior},
                         {"n_interface", rc.sampler.n_interface}};
  resolved["train"] = {{"iterations", rc.train.iterations},       {"lr0", rc.train.lr0},
                       {"lr_end", rc.train.lr_end},               {"theta", rc.train.theta},
                       {"ridge", rc.train.ridge},
                       {"validation_every", rc.train.validation_every},
                       {"checkpoint_every", rc.train.checkpoint_every}};
  resolved["eigen"] = {{"n3", rc.train.n3},
                       {"max_exponent", rc.train.selection.max_exponent},
                       {"include_constant", rc.train.selection.include_constant}};
  const Problem pr = rc.problem();
  resolved["cutoffs"] = {{"delta1", pr.layout.config().delta1}, {"delta2", pr.layout.config().delta2}};
  resolved["reference"] = {{"rhs", rc.reference.rhs},
                           {"fem_n", rc.reference.fem_n},
                           {"eval_n", rc.reference.eval_n},
                           {"eval_n_interface", rc.reference.eval_n_interface},
                           {"report_params", rc.reference.report_params},
                           {"report_seed", rc.reference.report_seed}};
  resolved["seeds"] = {{"params", rc.seeds.params},     {"interior", rc.seeds.interior},
                       {"interface", rc.seeds.interface}, {"init", rc.seeds.init},
                       {"validation", rc.seeds.validation}};
  resolved["output"] = {{"dir", rc.output_dir}, {"deterministic", rc.deterministic}};
  rc.document = resolved;
  return rc;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return from_json(doc);
}

Problem RunConfig::problem() const {
  Geometry g = Geometry::build_grid(dim, cuts_x, cuts_y, bounds);
  RhsSpec rhs = RhsSpec::from_tag(reference.rhs, g);
  return Problem::make(std::move(g), cutoffs, net, sampler, std::move(rhs), train, seeds);
}

}  // namespace lsreconn
