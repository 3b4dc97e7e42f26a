#include <cmath>
#include <fstream>
#include <set>

#include "degreelab/cli.hpp"

namespace degreelab::cli {

std::optional<Command> parse_command(std::string_view name) {
  if (name == "degrees") return Command::Degrees;
  if (name == "stability") return Command::Stability;
  if (name == "spectral") return Command::Spectral;
  if (name == "green") return Command::Green;
  if (name == "ergodic") return Command::Ergodic;
  if (name == "contraction") return Command::Contraction;
  if (name == "report") return Command::Report;
  if (name == "validate") return Command::Validate;
  return std::nullopt;
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Degrees: return "degrees";
    case Command::Stability: return "stability";
    case Command::Spectral: return "spectral";
    case Command::Green: return "green";
    case Command::Ergodic: return "ergodic";
    case Command::Contraction: return "contraction";
    case Command::Report: return "report";
    case Command::Validate: return "validate";
  }
  return "unknown";
}

namespace {

void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!keys.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown field");
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
  return obj.at(key);
}

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double real_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

Complex complex_number(const Json& v, const std::string& path) {
  if (v.is_number()) return real_number(v, path);
  if (v.is_array() && v.size() == 2)
    return {real_number(v[0], index(path, 0)), real_number(v[1], index(path, 1))};
  throw ConfigError(path, "expected a number or an [re, im] pair");
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex gaussian_integer(const Json& v, const std::string& path) {
  const Complex c = complex_number(v, path);
  if (c.real() != std::round(c.real()) || c.imag() != std::round(c.imag()) || std::abs(c.real()) > 1e6 ||
      std::abs(c.imag()) > 1e6)
    throw ConfigError(path, "expected a Gaussian integer [re, im] with integer parts");
  return c;
}

Rational rational_entry(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number()) return exact_rational(real_number(v, path));
  if (v.is_string()) {
    try {
      return Rational(v.get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError(path, "expected a rational such as \"3/4\"");
    }
  }
  throw ConfigError(path, "expected a number or a rational string");
}

std::vector<Complex> complex_array(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty coefficient array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_number(v[i], index(path, i)));
  return out;
}

int positive_int(const Json& v, const std::string& path, int lo, int hi) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi)
    throw ConfigError(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::pair<ModelParams, Json> parse_model(const Json& model) {
  const std::string path = "model";
  only_keys(model, path, {"family", "params"});
  const Json& family = require(model, path, "family");
  if (!family.is_string()) throw ConfigError(child(path, "family"), "expected a string");
  const std::string name = family.get<std::string>();
  const Json& params = require(model, path, "params");
  const std::string ppath = child(path, "params");
  Json canonical;
  canonical["family"] = name;

  if (name == "polynomial_skew") {
    only_keys(params, ppath, {"q"});
    const Json& q = require(params, ppath, "q");
    const std::string qpath = child(ppath, "q");
    if (!q.is_array() || q.empty()) throw ConfigError(qpath, "expected a nonempty array of coefficient rows");
    SkewParams p;
    Json rows = Json::array();
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!q[i].is_array()) throw ConfigError(index(qpath, i), "expected an array of coefficients");
      std::vector<Complex> row;
      Json jrow = Json::array();
      for (std::size_t j = 0; j < q[i].size(); ++j) {
        row.push_back(complex_number(q[i][j], index(index(qpath, i), j)));
        jrow.push_back(complex_json(row.back()));
      }
      p.q.push_back(std::move(row));
      rows.push_back(std::move(jrow));
    }
    canonical["params"] = {{"q", rows}};
    return {p, canonical};
  }
  if (name == "secant") {
    only_keys(params, ppath, {"p"});
    SecantParams s;
    s.p = complex_array(require(params, ppath, "p"), child(ppath, "p"));
    Json arr = Json::array();
    for (const auto& c : s.p) arr.push_back(complex_json(c));
    canonical["params"] = {{"p", arr}};
    return {s, canonical};
  }
  if (name == "torus_endo") {
    only_keys(params, ppath, {"a", "v"});
    const Json& a = require(params, ppath, "a");
    const std::string apath = child(ppath, "a");
    if (!a.is_array() || a.size() != 2) throw ConfigError(apath, "expected a 2x2 matrix");
    TorusParams t;
    Json ja = Json::array();
    for (std::size_t i = 0; i < 2; ++i) {
      if (!a[i].is_array() || a[i].size() != 2) throw ConfigError(index(apath, i), "expected a row of 2 entries");
      Json row = Json::array();
      for (std::size_t j = 0; j < 2; ++j) {
        t.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            gaussian_integer(a[i][j], index(index(apath, i), j));
        row.push_back(complex_json(t.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      }
      ja.push_back(row);
    }
    Json jv = Json::array({complex_json(0.0), complex_json(0.0)});
    if (params.contains("v")) {
      const Json& v = params.at("v");
      const std::string vpath = child(ppath, "v");
      if (!v.is_array() || v.size() != 2) throw ConfigError(vpath, "expected 2 complex entries");
      for (std::size_t i = 0; i < 2; ++i) {
        t.v(static_cast<Eigen::Index>(i)) = complex_number(v[i], index(vpath, i));
        jv[i] = complex_json(t.v(static_cast<Eigen::Index>(i)));
      }
    }
    canonical["params"] = {{"a", ja}, {"v", jv}};
    return {t, canonical};
  }
  if (name == "cremona_composite") {
    only_keys(params, ppath, {"factors"});
    const Json& factors = require(params, ppath, "factors");
    const std::string fpath = child(ppath, "factors");
    if (!factors.is_array() || factors.empty()) throw ConfigError(fpath, "expected a nonempty array of factors");
    CremonaParams c;
    Json jf = Json::array();
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const std::string ip = index(fpath, i);
      const Json& f = factors[i];
      only_keys(f, ip, {"kind", "k", "matrix"});
      const Json& kind = require(f, ip, "kind");
      if (!kind.is_string()) throw ConfigError(child(ip, "kind"), "expected a string");
      CremonaFactor factor;
      Json jfactor;
      const std::string k = kind.get<std::string>();
      jfactor["kind"] = k;
      if (k == "involution") {
        if (f.contains("k") || f.contains("matrix")) throw ConfigError(ip, "involution takes no parameters");
        factor.kind = CremonaFactor::Kind::Involution;
      } else if (k == "power") {
        if (f.contains("matrix")) throw ConfigError(child(ip, "matrix"), "unknown field for a power factor");
        factor.kind = CremonaFactor::Kind::Power;
        factor.power = positive_int(require(f, ip, "k"), child(ip, "k"), 1, 64);
        jfactor["k"] = factor.power;
      } else if (k == "linear") {
        if (f.contains("k")) throw ConfigError(child(ip, "k"), "unknown field for a linear factor");
        factor.kind = CremonaFactor::Kind::Linear;
        const Json& mat = require(f, ip, "matrix");
        const std::string mp = child(ip, "matrix");
        if (!mat.is_array() || mat.size() != 3) throw ConfigError(mp, "expected a 3x3 matrix");
        factor.linear = RatMatrix(3, 3);
        Json jm = Json::array();
        for (std::size_t r = 0; r < 3; ++r) {
          if (!mat[r].is_array() || mat[r].size() != 3) throw ConfigError(index(mp, r), "expected 3 entries");
          Json row = Json::array();
          for (std::size_t s = 0; s < 3; ++s) {
            const Rational q = rational_entry(mat[r][s], index(index(mp, r), s));
            factor.linear(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = q;
            row.push_back(q.str());
          }
          jm.push_back(row);
        }
        jfactor["matrix"] = jm;
      } else {
        throw ConfigError(child(ip, "kind"), "expected one of involution, power, linear");
      }
      c.factors.push_back(factor);
      jf.push_back(jfactor);
    }
    canonical["params"] = {{"factors", jf}};
    return {c, canonical};
  }
  throw ConfigError(child(path, "family"), "expected one of polynomial_skew, secant, torus_endo, cremona_composite");
}

double tolerance(const Json& v, const std::string& path) {
  const double x = real_number(v, path);
  if (!(x > 0.0)) throw ConfigError(path, "tolerance must be positive");
  return x;
}

}  // namespace

RunConfig parse_config(const Json& doc) {
  only_keys(doc, "", {"model", "command", "tolerances", "seed", "horizon", "n_max", "degree_steps", "tree_depth",
                      "resolution", "slice", "which", "mc_samples", "residual_samples", "lyapunov_steps",
                      "lyapunov_samples", "haar_n"});
  RunConfig cfg;
  auto [params, model] = parse_model(require(doc, "", "model"));
  cfg.params = std::move(params);
  cfg.model = std::move(model);

  if (doc.contains("command")) {
    const Json& c = doc.at("command");
    if (!c.is_string() || !parse_command(c.get<std::string>()))
      throw ConfigError("command", "expected one of degrees, stability, spectral, green, ergodic, contraction, "
                                   "report, validate");
    cfg.command = parse_command(c.get<std::string>());
  }
  if (doc.contains("tolerances")) {
    const Json& t = doc.at("tolerances");
    only_keys(t, "tolerances", {"spectral", "nef", "membership", "green", "cluster_radius", "zero", "residual"});
    auto set = [&](const char* key, double& slot) {
      if (t.contains(key)) slot = tolerance(t.at(key), child("tolerances", key));
    };
    set("spectral", cfg.tolerances.spectral);
    set("nef", cfg.tolerances.nef);
    set("membership", cfg.tolerances.membership);
    set("green", cfg.tolerances.green);
    set("cluster_radius", cfg.tolerances.cluster_radius);
    set("zero", cfg.tolerances.zero);
    set("residual", cfg.tolerances.residual);
  }
  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      throw ConfigError("seed", "expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  auto set_int = [&](const char* key, int& slot, int lo, int hi) {
    if (doc.contains(key)) slot = positive_int(doc.at(key), key, lo, hi);
  };
  set_int("horizon", cfg.horizon, 0, 100000);
  set_int("n_max", cfg.n_max, 1, 200);
  set_int("degree_steps", cfg.degree_steps, 1, 64);
  set_int("tree_depth", cfg.tree_depth, 1, 64);
  set_int("mc_samples", cfg.mc_samples, 1, 10000000);
  set_int("residual_samples", cfg.residual_samples, 1, 100000);
  set_int("lyapunov_steps", cfg.lyapunov_steps, 100, 100000000);
  set_int("lyapunov_samples", cfg.lyapunov_samples, 1, 100000);
  set_int("haar_n", cfg.haar_n, 1, 64);
  if (doc.contains("resolution")) {
    const Json& r = doc.at("resolution");
    if (!r.is_array() || r.size() != 2) throw ConfigError("resolution", "expected [nx, ny]");
    cfg.nx = positive_int(r[0], "resolution[0]", 1, 4096);
    cfg.ny = positive_int(r[1], "resolution[1]", 1, 4096);
  }
  if (doc.contains("slice")) {
    const Json& s = doc.at("slice");
    only_keys(s, "slice", {"origin", "u", "v", "s_range", "t_range"});
    auto pair_of_complex = [&](const char* key, std::array<Complex, 2>& slot) {
      if (!s.contains(key)) return;
      const Json& v = s.at(key);
      const std::string p = child("slice", key);
      if (!v.is_array() || v.size() != 2) throw ConfigError(p, "expected 2 complex entries");
      slot = {complex_number(v[0], index(p, 0)), complex_number(v[1], index(p, 1))};
    };
    auto range = [&](const char* key, std::array<double, 2>& slot) {
      if (!s.contains(key)) return;
      const Json& v = s.at(key);
      const std::string p = child("slice", key);
      if (!v.is_array() || v.size() != 2) throw ConfigError(p, "expected [lo, hi]");
      slot = {real_number(v[0], index(p, 0)), real_number(v[1], index(p, 1))};
      if (!(slot[0] < slot[1])) throw ConfigError(p, "expected lo < hi");
    };
    pair_of_complex("origin", cfg.slice.origin);
    pair_of_complex("u", cfg.slice.u);
    pair_of_complex("v", cfg.slice.v);
    range("s_range", cfg.slice.s_range);
    range("t_range", cfg.slice.t_range);
  }
  if (doc.contains("which")) {
    const Json& w = doc.at("which");
    if (!w.is_string() || (w.get<std::string>() != "plus" && w.get<std::string>() != "minus"))
      throw ConfigError("which", "expected \"plus\" or \"minus\"");
    cfg.which = w.get<std::string>() == "plus" ? GreenWhich::Plus : GreenWhich::Minus;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace degreelab::cli
