#include "freqinv/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace freqinv {

using nlohmann::json;

// ---------------------------------------------------------------- scenario

void validate(const Scenario& s) {
  auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
  if (!(s.A > 0.0) || !(s.A < s.A1)) {
    std::ostringstream os;
    os << "need 0 < A < A1 (A = " << s.A << ", A1 = " << s.A1 << ")";
    fail(os.str());
  }
  const Grid3 omega = s.omega_grid();
  const Grid3 outer = s.outer_grid();
  if (embed(outer, omega).half_steps < 1)
    fail("Omega must lie strictly inside G");
  const FrequencyLadder lad = s.ladder();
  if (s.m < 1) fail("m must be at least 1, got " + std::to_string(s.m));
  if (s.n_bar < 1 || s.n_bar > lad.usable_psi()) {
    std::ostringstream os;
    os << "n_bar = " << s.n_bar << " must lie in 1.." << lad.usable_psi()
       << " (usable psi count of the ladder)";
    fail(os.str());
  }
  if (!(s.noise_level >= 0.0)) {
    std::ostringstream os;
    os << "noise_level must be non-negative, got " << s.noise_level;
    fail(os.str());
  }
  const double plateau = s.A - kDefaultCutoffMargin - kDefaultCutoffTransition;
  for (std::size_t n = 0; n < s.inclusions.size(); ++n) {
    const Inclusion& inc = s.inclusions[n];
    std::ostringstream os;
    os << "inclusions[" << n << "]: ";
    if (!(inc.contrast > 1.0)) {
      os << "contrast must exceed 1, got " << inc.contrast;
      fail(os.str());
    }
    if (!(inc.side > 0.0)) {
      os << "side must be positive, got " << inc.side;
      fail(os.str());
    }
    for (std::size_t a = 0; a < 3; ++a) {
      const double extent = std::abs(inc.center[a]) + 0.5 * inc.side;
      if (!(extent < plateau)) {
        os << "extends to |x" << a + 1 << "| = " << extent
           << ", outside the cutoff plateau of half-width " << plateau;
        fail(os.str());
      }
    }
  }
}

namespace {

const std::set<std::string> kScenarioKeys = {
    "name", "A",     "A1",          "step", "k_low",           "k_high",
    "h",    "m",     "n_bar",       "seed", "tail_update_mode", "inclusions",
    "noise_level"};

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: field \"") + key +
                      "\" has the wrong type (" + e.what() + ")");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario: top level must be an object");
  for (const auto& [key, _] : j.items())
    if (!kScenarioKeys.count(key))
      throw ConfigError("scenario: unknown field \"" + key + "\"");

  Scenario s;
  read_field(j, "name", s.name);
  read_field(j, "A", s.A);
  read_field(j, "A1", s.A1);
  read_field(j, "step", s.step);
  read_field(j, "k_low", s.k_low);
  read_field(j, "k_high", s.k_high);
  read_field(j, "h", s.h);
  read_field(j, "m", s.m);
  read_field(j, "n_bar", s.n_bar);
  read_field(j, "noise_level", s.noise_level);
  read_field(j, "seed", s.seed);
  std::string mode = to_string(s.tail_mode);
  read_field(j, "tail_update_mode", mode);
  s.tail_mode = tail_mode_from_string(mode);

  if (j.contains("inclusions")) {
    const json& list = j.at("inclusions");
    if (!list.is_array()) throw ConfigError("scenario: field \"inclusions\" must be an array");
    for (std::size_t n = 0; n < list.size(); ++n) {
      const json& e = list[n];
      const std::string where = "scenario: inclusions[" + std::to_string(n) + "]";
      if (!e.is_object() || !e.contains("center") || !e.contains("side") ||
          !e.contains("contrast"))
        throw ConfigError(where + " needs \"center\", \"side\" and \"contrast\"");
      Inclusion inc;
      try {
        const auto c = e.at("center").get<std::vector<double>>();
        if (c.size() != 3) throw ConfigError(where + ".center must have 3 entries");
        inc.center = {c[0], c[1], c[2]};
        inc.side = e.at("side").get<double>();
        inc.contrast = e.at("contrast").get<double>();
      } catch (const json::exception& ex) {
        throw ConfigError(where + " has a field of the wrong type (" + ex.what() + ")");
      }
      s.inclusions.push_back(inc);
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["A"] = s.A;
  j["A1"] = s.A1;
  j["step"] = s.step;
  j["k_low"] = s.k_low;
  j["k_high"] = s.k_high;
  j["h"] = s.h;
  j["m"] = s.m;
  j["n_bar"] = s.n_bar;
  j["noise_level"] = s.noise_level;
  j["seed"] = s.seed;
  j["tail_update_mode"] = to_string(s.tail_mode);
  j["inclusions"] = json::array();
  for (const auto& inc : s.inclusions)
    j["inclusions"].push_back({{"center", {inc.center[0], inc.center[1], inc.center[2]}},
                               {"side", inc.side},
                               {"contrast", inc.contrast}});
  return j.dump(2) + "\n";
}

// --------------------------------------------------------------------- vtk

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path,
                       std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void vtk_header(std::ostream& os, const Grid3& g, const std::string& title) {
  const int n = g.nodes_per_axis();
  const std::string o = fmt(-g.half_width()), s = fmt(g.step());
  os << "# vtk DataFile Version 3.0\n"
     << title << "\n"
     << "ASCII\n"
     << "DATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << n << ' ' << n << ' ' << n << "\n"
     << "ORIGIN " << o << ' ' << o << ' ' << o << "\n"
     << "SPACING " << s << ' ' << s << ' ' << s << "\n"
     << "POINT_DATA " << g.size() << "\n";
}

template <class Get>
void vtk_array(std::ostream& os, const std::string& name, std::size_t count,
               Get get) {
  os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < count; ++i) os << fmt(get(i)) << "\n";
}

void check_field(const Grid3& g, Eigen::Index size) {
  if (static_cast<std::size_t>(size) != g.size())
    throw ConfigError("vtk: field size does not match the grid");
}

}  // namespace

void write_field_vtk(const std::filesystem::path& path, const Grid3& g,
                     const RealField& f, const std::string& name) {
  check_field(g, f.size());
  auto out = open_out(path);
  vtk_header(out, g, name);
  vtk_array(out, name, g.size(),
            [&](std::size_t i) { return f[static_cast<Eigen::Index>(i)]; });
  if (!out) throw IoError("write failed for " + path.string());
}

void write_field_vtk(const std::filesystem::path& path, const Grid3& g,
                     const ComplexField& f, const std::string& name) {
  check_field(g, f.size());
  auto out = open_out(path);
  vtk_header(out, g, name);
  vtk_array(out, name + "_real", g.size(),
            [&](std::size_t i) { return f[static_cast<Eigen::Index>(i)].real(); });
  vtk_array(out, name + "_imag", g.size(),
            [&](std::size_t i) { return f[static_cast<Eigen::Index>(i)].imag(); });
  if (!out) throw IoError("write failed for " + path.string());
}

VtkFile read_field_vtk(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  for (int i = 0; i < 3; ++i) std::getline(in, line);  // version, title, ASCII
  VtkFile f;
  std::size_t points = 0;
  std::string tok;
  while (in >> tok) {
    if (tok == "DATASET") {
      in >> tok;
    } else if (tok == "DIMENSIONS") {
      int a, b, c;
      in >> a >> b >> c;
      f.dims = a;
    } else if (tok == "ORIGIN") {
      in >> f.origin[0] >> f.origin[1] >> f.origin[2];
    } else if (tok == "SPACING") {
      double b, c;
      in >> f.spacing >> b >> c;
    } else if (tok == "POINT_DATA") {
      in >> points;
    } else if (tok == "SCALARS") {
      VtkArray arr;
      std::string type, comps, lt, table;
      in >> arr.name >> type >> comps >> lt >> table;
      arr.values.resize(static_cast<Eigen::Index>(points));
      for (std::size_t i = 0; i < points; ++i) {
        if (!(in >> tok)) throw IoError("truncated vtk file " + path.string());
        arr.values[static_cast<Eigen::Index>(i)] = std::strtod(tok.c_str(), nullptr);
      }
      f.arrays.push_back(std::move(arr));
    } else {
      throw IoError("unexpected token \"" + tok + "\" in " + path.string());
    }
  }
  return f;
}

// ----------------------------------------------------------------- metrics

std::vector<Point> component_centroids(const Grid3& g, const RealField& c) {
  const double top = c.maxCoeff() - 1.0;
  if (!(top > 0.0)) return {};
  const double level = 0.35 * top;
  const int n = g.nodes_per_axis();
  std::vector<int> label(g.size(), -1);
  std::vector<Point> centroids;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < g.size(); ++seed) {
    if (label[seed] >= 0 || c[static_cast<Eigen::Index>(seed)] - 1.0 < level) continue;
    const int id = static_cast<int>(centroids.size());
    Point acc{};
    double mass = 0.0;
    label[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      const double w = c[static_cast<Eigen::Index>(idx)] - 1.0;
      const Point x = g.point(idx);
      for (std::size_t a = 0; a < 3; ++a) acc[a] += w * x[a];
      mass += w;
      const auto p = g.ijk(idx);
      for (int a = 0; a < 3; ++a)
        for (int d : {-1, 1}) {
          auto q = p;
          q[static_cast<std::size_t>(a)] += d;
          if (q[static_cast<std::size_t>(a)] < 0 || q[static_cast<std::size_t>(a)] >= n)
            continue;
          const std::size_t qi = g.index(q[0], q[1], q[2]);
          if (label[qi] < 0 && c[static_cast<Eigen::Index>(qi)] - 1.0 >= level) {
            label[qi] = id;
            stack.push_back(qi);
          }
        }
    }
    centroids.push_back({acc[0] / mass, acc[1] / mass, acc[2] / mass});
  }
  return centroids;
}

double relative_error_pct(double true_max, double computed_max) {
  return std::abs(true_max / computed_max - 1.0) * 100.0;
}

Summary summarize(const ReconstructionState& st, std::optional<double> true_max) {
  Summary s;
  Eigen::Index at = 0;
  s.max_c = st.c.maxCoeff(&at);
  s.argmax = st.grid.point(static_cast<std::size_t>(at));
  s.centroids = component_centroids(st.grid, st.c);
  s.true_max = true_max;
  if (true_max) s.relative_error_pct = relative_error_pct(*true_max, s.max_c);
  return s;
}

namespace {

json point_json(const Point& p) { return json::array({p[0], p[1], p[2]}); }

json record_json(const IterationRecord& r) {
  json j{{"n", r.n},
         {"i", r.i},
         {"k", r.k},
         {"max_c", r.max_c},
         {"min_c", r.min_c},
         {"argmax", point_json(r.argmax)},
         {"min_abs_u", r.min_abs_u},
         {"q_residual", r.q_residual},
         {"tail_residual", r.tail_residual},
         {"seconds", r.seconds}};
  if (r.error_max) j["error_max"] = *r.error_max;
  return j;
}

}  // namespace

void write_metrics(const std::filesystem::path& path,
                   const std::vector<IterationRecord>& records,
                   const std::optional<Summary>& summary) {
  json j;
  j["iterations"] = json::array();
  for (const auto& r : records) j["iterations"].push_back(record_json(r));
  if (summary) {
    json s{{"max_c", summary->max_c},
           {"argmax", point_json(summary->argmax)},
           {"component_count", summary->centroids.size()},
           {"centroids", json::array()}};
    for (const auto& c : summary->centroids) s["centroids"].push_back(point_json(c));
    if (summary->true_max) s["true_max_c"] = *summary->true_max;
    if (summary->relative_error_pct)
      s["relative_error_pct"] = *summary->relative_error_pct;
    json t = json::object();
    for (const auto& [stage, sec] : summary->stage_seconds) t[stage] = sec;
    s["stage_seconds"] = t;
    j["summary"] = s;
  }
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

void write_iterations_jsonl(const std::filesystem::path& path,
                            const std::vector<IterationRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) out << record_json(r).dump() << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

void write_trace_csv(const std::filesystem::path& path,
                     const MultiFrequencyTrace& trace) {
  auto out = open_out(path);
  out << "x1,x2,x3";
  for (std::size_t n = 0; n < trace.values.size(); ++n) {
    const std::string k = fmt(trace.ladder.k(static_cast<int>(n)));
    out << ",re_g_k" << k << ",im_g_k" << k;
  }
  out << "\n";
  for (std::size_t b = 0; b < trace.nodes.size(); ++b) {
    const Point x = trace.grid.point(trace.nodes[b]);
    out << fmt(x[0]) << ',' << fmt(x[1]) << ',' << fmt(x[2]);
    for (const auto& v : trace.values) {
      const cplx z = v[static_cast<Eigen::Index>(b)];
      out << ',' << fmt(z.real()) << ',' << fmt(z.imag());
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

// ------------------------------------------------------------ binary cache

namespace {

constexpr std::uint32_t kCacheVersion = 1;

class LeWriter {
 public:
  explicit LeWriter(std::ostream& os) : os_(os) {}
  void u32(std::uint32_t v) { bytes(v, 4); }
  void u64(std::uint64_t v) { bytes(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void c128(cplx z) {
    f64(z.real());
    f64(z.imag());
  }

 private:
  void bytes(std::uint64_t v, int count) {
    for (int i = 0; i < count; ++i) os_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::ostream& os_;
};

class LeReader {
 public:
  LeReader(std::istream& is, std::string name) : is_(is), name_(std::move(name)) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  cplx c128() {
    const double re = f64();
    return {re, f64()};
  }

 private:
  std::uint64_t bytes(int count) {
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i) {
      const int c = is_.get();
      if (c == EOF) throw IoError("truncated trace cache " + name_);
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
  }
  std::istream& is_;
  std::string name_;
};

}  // namespace

void write_trace_cache(const std::filesystem::path& path,
                       const SyntheticData& data) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  LeWriter w(out);
  const auto& m = data.measured;
  out.write("IMH1", 4);
  w.u32(kCacheVersion);
  w.f64(m.grid.half_width());
  w.f64(m.grid.step());
  w.u32(static_cast<std::uint32_t>(m.grid.nodes_per_axis()));
  w.f64(m.ladder.k_low);
  w.f64(m.ladder.k_high);
  w.f64(m.ladder.h);
  w.u32(static_cast<std::uint32_t>(m.ladder.N));
  w.u32(static_cast<std::uint32_t>(m.nodes.size()));
  for (std::size_t idx : m.nodes) w.u64(idx);
  for (const auto& v : m.values)
    for (Eigen::Index b = 0; b < v.size(); ++b) w.c128(v[b]);
  const auto& t = data.tail_trace;
  w.f64(t.k);
  w.u32(static_cast<std::uint32_t>(t.nodes.size()));
  for (std::size_t idx : t.nodes) w.u64(idx);
  for (Eigen::Index b = 0; b < t.u.size(); ++b) w.c128(t.u[b]);
  for (const auto& comp : t.grad)
    for (Eigen::Index b = 0; b < comp.size(); ++b) w.c128(comp[b]);
  if (!out) throw IoError("write failed for " + path.string());
}

SyntheticData read_trace_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read trace cache " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "IMH1", 4) != 0)
    throw IoError(path.string() + " is not a trace cache (bad magic)");
  LeReader r(in, path.string());
  if (const auto v = r.u32(); v != kCacheVersion)
    throw IoError("unsupported trace cache version " + std::to_string(v));
  const double A = r.f64();
  const double step = r.f64();
  const std::uint32_t n = r.u32();
  const Grid3 g(A, step);
  if (static_cast<std::uint32_t>(g.nodes_per_axis()) != n)
    throw IoError("trace cache grid descriptor is inconsistent");

  MultiFrequencyTrace m(g);
  m.ladder.k_low = r.f64();
  m.ladder.k_high = r.f64();
  m.ladder.h = r.f64();
  m.ladder.N = static_cast<int>(r.u32());
  const std::uint32_t count = r.u32();
  m.nodes.resize(count);
  for (auto& idx : m.nodes) {
    idx = r.u64();
    if (idx >= g.size()) throw IoError("trace cache node index out of range");
  }
  for (int f = 0; f <= m.ladder.N; ++f) {
    ComplexField v(count);
    for (std::uint32_t b = 0; b < count; ++b) v[b] = r.c128();
    m.values.push_back(std::move(v));
  }
  BoundaryTrace t{g, {}, {}, {}, 0.0};
  t.k = r.f64();
  const std::uint32_t tc = r.u32();
  t.nodes.resize(tc);
  for (auto& idx : t.nodes) {
    idx = r.u64();
    if (idx >= g.size()) throw IoError("trace cache node index out of range");
  }
  t.u.resize(tc);
  for (std::uint32_t b = 0; b < tc; ++b) t.u[b] = r.c128();
  for (auto& comp : t.grad) {
    comp.resize(tc);
    for (std::uint32_t b = 0; b < tc; ++b) comp[b] = r.c128();
  }
  return {std::move(m), std::move(t)};
}

}  // namespace freqinv
