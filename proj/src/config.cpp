#include "ifeig/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ifeig/error.hpp"

namespace ifeig {

namespace {

const std::set<std::string> kKeys = {
    "example", "domain", "circles",  "background_k", "coarse_h",  "h1",          "beta",
    "n_levels", "L",     "theta",    "nev",          "mode",      "tol_lambda",  "out_dir",
    "seed",    "clusters", "precond", "record_time", "max_finest_iters", "sweep"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double strict_double(const std::string& t) {
  double v = 0.0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty()) throw std::invalid_argument("not a number: '" + t + "'");
  return v;
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& k) const { return entries_.count(k) != 0; }
  const Entry& get(const std::string& k) const { return entries_.at(k); }

  template <class F>
  auto convert(const std::string& k, F f) const {
    const Entry& e = get(k);
    try {
      return f(e.value);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(k + ": " + ex.what(), e.line);
    }
  }

  double real(const std::string& k) const { return convert(k, parse_real); }
  long long integer(const std::string& k) const {
    return convert(k, [](const std::string& t) {
      long long v = 0;
      const char* end = t.data() + t.size();
      const auto [ptr, ec] = std::from_chars(t.data(), end, v);
      if (ec != std::errc() || ptr != end || t.empty()) throw std::invalid_argument("not an integer: '" + t + "'");
      return v;
    });
  }

 private:
  std::map<std::string, Entry> entries_;
};

std::vector<double> reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item));
  return out;
}

}  // namespace

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string::npos) return strict_double(t);
  const double num = strict_double(trim(t.substr(0, slash)));
  const double den = strict_double(trim(t.substr(slash + 1)));
  if (den == 0.0) throw std::invalid_argument("zero denominator in '" + t + "'");
  return num / den;
}

RunConfig parse_config(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (!kKeys.count(key)) throw ParseError("unknown key '" + key + "'", line_no);
    if (entries.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);
    entries.emplace(key, Entry{value, line_no});
  }
  const Reader r(std::move(entries));

  RunConfig cfg;
  ExampleSpec& spec = cfg.spec;
  if (r.has("example")) {
    const std::string name = r.get("example").value;
    if (name == "custom") {
      spec.name = "custom";
    } else {
      try {
        spec = example_by_name(name);
      } catch (const PreconditionError& e) {
        throw ParseError(e.what(), r.get("example").line);
      }
    }
  } else {
    spec.name = "custom";
  }
  if (spec.name == "custom") {
    for (const char* k : {"domain", "coarse_h", "h1"})
      if (!r.has(k)) throw ConfigError(std::string("custom geometry requires key '") + k + "'");
    spec.plan.nev = 1;
  }

  if (r.has("domain")) {
    const auto d = r.convert("domain", reals);
    if (d.size() != 4) throw ParseError("domain: expected x0,y0,x1,y1", r.get("domain").line);
    spec.geometry.domain = {d[0], d[1], d[2], d[3]};
    if (!(d[2] > d[0] && d[3] > d[1])) throw ConfigError("domain: need x0 < x1 and y0 < y1");
  }
  if (r.has("circles")) {
    spec.geometry.circles.clear();
    spec.circle_k.clear();
    const std::string text = r.get("circles").value;
    if (text != "none") {
      for (const auto& item : split(text, ';')) {
        const auto v = r.convert("circles", [&](const std::string&) { return reals(item); });
        if (v.size() != 4) throw ParseError("circles: expected cx,cy,r,K per circle", r.get("circles").line);
        if (!(v[2] > 0.0)) throw ConfigError("circles: radius must be positive");
        if (!(v[3] > 0.0)) throw ConfigError("circles: coefficient must be positive");
        spec.geometry.circles.push_back({{v[0], v[1]}, v[2]});
        spec.circle_k.push_back(v[3]);
      }
    }
  }
  if (r.has("background_k")) spec.background_k = r.real("background_k");
  LevelPlan& plan = spec.plan;
  if (r.has("coarse_h")) plan.coarse_h = r.real("coarse_h");
  if (r.has("h1")) plan.h1 = r.real("h1");
  if (r.has("beta")) plan.beta = r.real("beta");
  if (r.has("n_levels")) plan.n_levels = static_cast<int>(r.integer("n_levels"));
  if (r.has("L")) plan.L = static_cast<int>(r.integer("L"));
  if (r.has("theta")) plan.theta = r.real("theta");
  if (r.has("nev")) plan.nev = static_cast<int>(r.integer("nev"));
  if (r.has("mode")) {
    try {
      plan.mode = parse_assembly_mode(r.get("mode").value);
    } catch (const PreconditionError& e) {
      throw ParseError(e.what(), r.get("mode").line);
    }
  }
  if (r.has("precond")) {
    const std::string p = r.get("precond").value;
    if (p == "ssor") plan.precond = Preconditioner::ssor;
    else if (p == "none") plan.precond = Preconditioner::none;
    else throw ParseError("precond: expected ssor or none", r.get("precond").line);
  }
  if (r.has("tol_lambda")) spec.tol_lambda = r.real("tol_lambda");
  if (r.has("clusters")) {
    spec.clusters.clear();
    const std::string text = r.get("clusters").value;
    if (text != "none") {
      for (const auto& item : split(text, ';')) {
        std::vector<int> cl;
        for (double v : r.convert("clusters", [&](const std::string&) { return reals(item); })) {
          if (v < 1 || v != static_cast<int>(v)) throw ConfigError("clusters: indices are positive integers");
          cl.push_back(static_cast<int>(v) - 1);
        }
        spec.clusters.push_back(std::move(cl));
      }
    }
  }
  if (r.has("out_dir")) cfg.out_dir = r.get("out_dir").value;
  if (r.has("seed")) {
    const long long s = r.integer("seed");
    if (s < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (r.has("record_time")) {
    const std::string v = r.get("record_time").value;
    if (v == "true") cfg.record_time = true;
    else if (v == "false") cfg.record_time = false;
    else throw ParseError("record_time: expected true or false", r.get("record_time").line);
  }
  if (r.has("max_finest_iters")) cfg.max_finest_iters = static_cast<int>(r.integer("max_finest_iters"));
  if (r.has("sweep")) {
    for (double v : r.convert("sweep", reals)) {
      if (v < 1 || v != static_cast<int>(v)) throw ConfigError("sweep: entries are level counts >= 1");
      cfg.sweep.push_back(static_cast<int>(v));
    }
  }
  plan.seed = cfg.seed;

  try {
    spec.validate();
    plan.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.max_finest_iters < plan.L) throw ConfigError("max_finest_iters must be at least L");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace ifeig
