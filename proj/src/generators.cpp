#include "fracdim/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "fracdim/errors.hpp"

namespace fracdim {

GeneratorSpec GeneratorSpec::cantor(double ratio, int depth) {
  if (!(ratio > 0.0 && ratio <= 0.5)) throw DomainError("cantor ratio must lie in (0, 1/2]");
  if (depth < 0) throw DomainError("cantor depth must be >= 0");
  GeneratorSpec s;
  s.kind = Kind::cantor;
  s.ratio = ratio;
  s.depth = depth;
  return s;
}

GeneratorSpec GeneratorSpec::sequence_set(double p, long n_max) {
  if (!(p > 0.0)) throw DomainError("sequence_set exponent must be positive");
  if (n_max < 1) throw DomainError("sequence_set needs n_max >= 1");
  GeneratorSpec s;
  s.kind = Kind::sequence_set;
  s.exponent = p;
  s.n = n_max;
  return s;
}

GeneratorSpec GeneratorSpec::grid(long n, int dim) {
  if (n < 1) throw DomainError("grid needs n >= 1");
  if (dim < 1 || dim > 2) throw DomainError("grid dimension must be 1 or 2");
  GeneratorSpec s;
  s.kind = Kind::grid;
  s.n = n;
  s.dim = dim;
  return s;
}

GeneratorSpec GeneratorSpec::product(GeneratorSpec a, GeneratorSpec b) {
  GeneratorSpec s;
  s.kind = Kind::product;
  s.a = std::make_shared<GeneratorSpec>(std::move(a));
  s.b = std::make_shared<GeneratorSpec>(std::move(b));
  return s;
}

GeneratorSpec GeneratorSpec::set_union(GeneratorSpec a, GeneratorSpec b) {
  GeneratorSpec s;
  s.kind = Kind::set_union;
  s.a = std::make_shared<GeneratorSpec>(std::move(a));
  s.b = std::make_shared<GeneratorSpec>(std::move(b));
  return s;
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class SpecParser {
 public:
  explicit SpecParser(const std::string& t) : t_(t) {}

  std::string ident() {
    skip();
    std::size_t s = i_;
    while (i_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[i_])) || t_[i_] == '_')) ++i_;
    if (s == i_) fail("expected a name");
    return t_.substr(s, i_ - s);
  }

  double number() {
    double v = atom();
    skip();
    if (i_ < t_.size() && t_[i_] == '/') {
      ++i_;
      const double d = atom();
      if (d == 0.0) fail("division by zero");
      v /= d;
    }
    return v;
  }

  void expect(char c) {
    skip();
    if (i_ >= t_.size() || t_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  bool peek(char c) {
    skip();
    return i_ < t_.size() && t_[i_] == c;
  }

  void end() {
    skip();
    if (i_ != t_.size()) fail("trailing characters");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DomainError("bad spec '" + t_ + "' at offset " + std::to_string(i_) + ": " + msg);
  }

 private:
  double atom() {
    skip();
    const char* b = t_.c_str() + i_;
    char* e = nullptr;
    const double v = std::strtod(b, &e);
    if (e == b) fail("expected a number");
    i_ += static_cast<std::size_t>(e - b);
    return v;
  }
  void skip() {
    while (i_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[i_]))) ++i_;
  }

  const std::string& t_;
  std::size_t i_ = 0;
};

long as_count(SpecParser& p, double v, const char* what) {
  if (v != std::floor(v) || v < 0 || v > 1e15) p.fail(std::string(what) + " must be a whole number");
  return static_cast<long>(v);
}

GeneratorSpec parse_one(SpecParser& p) {
  const std::string name = p.ident();
  p.expect('(');
  GeneratorSpec out;
  if (name == "cantor") {
    const double r = p.number();
    p.expect(',');
    const long k = as_count(p, p.number(), "depth");
    out = GeneratorSpec::cantor(r, static_cast<int>(k));
  } else if (name == "sequence_set") {
    const double e = p.number();
    p.expect(',');
    out = GeneratorSpec::sequence_set(e, as_count(p, p.number(), "n_max"));
  } else if (name == "grid") {
    const long n = as_count(p, p.number(), "n");
    int d = 1;
    if (p.peek(',')) {
      p.expect(',');
      d = static_cast<int>(as_count(p, p.number(), "dim"));
    }
    out = GeneratorSpec::grid(n, d);
  } else if (name == "product" || name == "union") {
    GeneratorSpec a = parse_one(p);
    p.expect(',');
    GeneratorSpec b = parse_one(p);
    out = name == "product" ? GeneratorSpec::product(std::move(a), std::move(b))
                            : GeneratorSpec::set_union(std::move(a), std::move(b));
  } else {
    p.fail("unknown generator '" + name + "'");
  }
  p.expect(')');
  return out;
}

double min_gap(const std::vector<std::vector<double>>& pts) {
  if (pts.size() < 2) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  if (pts.front().size() == 1) {
    for (std::size_t i = 1; i < pts.size(); ++i) best = std::min(best, pts[i][0] - pts[i - 1][0]);
    return best;
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < pts[i].size(); ++c) acc += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      best = std::min(best, std::sqrt(acc));
    }
  return best;
}

std::vector<std::vector<double>> build(const GeneratorSpec& s) {
  using K = GeneratorSpec::Kind;
  std::vector<std::vector<double>> pts;
  switch (s.kind) {
    case K::cantor: {
      // Left endpoints of level-depth intervals, then add the interval length.
      std::vector<double> left{0.0};
      double len = 1.0;
      for (int k = 0; k < s.depth; ++k) {
        const double shift = len * (1.0 - s.ratio);
        std::vector<double> next;
        next.reserve(left.size() * 2);
        for (double v : left) next.push_back(v);
        for (double v : left) next.push_back(v + shift);
        left.swap(next);
        len *= s.ratio;
      }
      std::vector<double> all;
      all.reserve(left.size() * 2);
      for (double v : left) {
        all.push_back(v);
        all.push_back(v + len);
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      for (double v : all) pts.push_back({v});
      break;
    }
    case K::sequence_set: {
      pts.push_back({0.0});
      for (long n = s.n; n >= 1; --n) pts.push_back({std::pow(static_cast<double>(n), -s.exponent)});
      break;
    }
    case K::grid: {
      auto at = [&](long i) { return s.n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(s.n - 1); };
      if (s.dim == 1) {
        for (long i = 0; i < s.n; ++i) pts.push_back({at(i)});
      } else {
        for (long i = 0; i < s.n; ++i)
          for (long j = 0; j < s.n; ++j) pts.push_back({at(i), at(j)});
      }
      break;
    }
    case K::product: {
      const auto a = build(*s.a), b = build(*s.b);
      for (const auto& x : a)
        for (const auto& y : b) {
          std::vector<double> v(x);
          v.insert(v.end(), y.begin(), y.end());
          pts.push_back(std::move(v));
        }
      break;
    }
    case K::set_union: {
      pts = build(*s.a);
      auto b = build(*s.b);
      if (!pts.empty() && !b.empty() && pts.front().size() != b.front().size())
        throw DomainError("union of sets with different ambient dimensions");
      pts.insert(pts.end(), b.begin(), b.end());
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      break;
    }
  }
  return pts;
}

}  // namespace

std::string GeneratorSpec::to_string() const {
  switch (kind) {
    case Kind::cantor: return "cantor(" + num(ratio) + "," + std::to_string(depth) + ")";
    case Kind::sequence_set: return "sequence_set(" + num(exponent) + "," + std::to_string(n) + ")";
    case Kind::grid: return "grid(" + std::to_string(n) + "," + std::to_string(dim) + ")";
    case Kind::product: return "product(" + a->to_string() + "," + b->to_string() + ")";
    case Kind::set_union: return "union(" + a->to_string() + "," + b->to_string() + ")";
  }
  return {};
}

GeneratorSpec parse_generator_spec(const std::string& text) {
  SpecParser p(text);
  GeneratorSpec s = parse_one(p);
  p.end();
  return s;
}

std::size_t generated_size(const GeneratorSpec& s) {
  using K = GeneratorSpec::Kind;
  constexpr std::size_t cap = std::numeric_limits<std::size_t>::max() / 4;
  auto mul = [&](std::size_t x, std::size_t y) { return (y && x > cap / y) ? cap : x * y; };
  switch (s.kind) {
    case K::cantor:
      if (s.depth >= 60) return cap;
      return s.ratio == 0.5 ? (std::size_t{1} << s.depth) + 1 : std::size_t{2} << s.depth;
    case K::sequence_set: return static_cast<std::size_t>(s.n) + 1;
    case K::grid: return s.dim == 1 ? static_cast<std::size_t>(s.n) : mul(s.n, s.n);
    case K::product: return mul(generated_size(*s.a), generated_size(*s.b));
    case K::set_union: return std::min(cap, generated_size(*s.a) + generated_size(*s.b));
  }
  return 0;
}

PointSet generate(const GeneratorSpec& spec, std::size_t max_points) {
  const std::size_t n = generated_size(spec);
  if (n > max_points)
    throw CapacityError(spec.to_string() + " has " + std::to_string(n) + " points, budget is " +
                        std::to_string(max_points));
  PointSet out;
  out.points = build(spec);
  out.dim = out.points.front().size();
  out.resolution_floor = min_gap(out.points);
  return out;
}

std::string MapSpec::to_string() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::power: return "power(" + num(param) + ")";
    case Kind::linear: return "linear(" + num(param) + ")";
    case Kind::snowflake_target: return "snowflake_target(" + num(param) + ")";
  }
  return {};
}

double MapSpec::holder_alpha() const {
  switch (kind) {
    case Kind::power: return std::min(param, 1.0);
    case Kind::snowflake_target: return param;
    default: return 1.0;
  }
}

double MapSpec::holder_p() const {
  // Sums of ball coefficients stay bounded once p(1 - alpha) >= 1; use twice that.
  const double a = holder_alpha();
  return a < 1.0 ? 2.0 / (1.0 - a) : 2.0;
}

MapSpec parse_map_spec(const std::string& text) {
  SpecParser p(text);
  const std::string name = p.ident();
  MapSpec m;
  if (name == "identity") {
    if (p.peek('(')) {
      p.expect('(');
      p.expect(')');
    }
  } else {
    p.expect('(');
    const double v = p.number();
    p.expect(')');
    if (name == "power") m = MapSpec::power(v);
    else if (name == "linear") m = MapSpec::linear(v);
    else if (name == "snowflake_target") m = MapSpec::snowflake_target(v);
    else p.fail("unknown map '" + name + "'");
  }
  p.end();
  if (m.kind == MapSpec::Kind::power && !(m.param > 0.0)) throw DomainError("power map needs a > 0");
  if (m.kind == MapSpec::Kind::snowflake_target && !(m.param > 0.0 && m.param <= 1.0))
    throw DomainError("snowflake exponent must lie in (0,1]");
  return m;
}

GeneratedMap generate_map(const MapSpec& spec, const FiniteMetricSpace& source) {
  GeneratedMap out;
  const std::size_t n = source.size();
  if (spec.kind == MapSpec::Kind::identity || spec.kind == MapSpec::Kind::snowflake_target) {
    out.target = std::make_unique<FiniteMetricSpace>(
        spec.kind == MapSpec::Kind::identity ? source : source.snowflake(spec.param));
    out.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.assignment[i] = i;
    return out;
  }
  if (source.ambient_dim() != 1) throw DomainError(spec.to_string() + " needs a one-dimensional source");
  if (spec.kind == MapSpec::Kind::power && !(spec.param > 0.0)) throw DomainError("power map needs a > 0");
  std::map<double, PointId> seen;
  std::vector<std::vector<double>> images;
  out.assignment.resize(n);
  for (PointId i = 0; i < n; ++i) {
    const double x = source.coordinates(i)[0];
    double y;
    if (spec.kind == MapSpec::Kind::power) {
      if (x < 0.0) throw DomainError("power map needs nonnegative samples");
      y = std::pow(x, spec.param);
    } else {
      y = spec.param * x;
    }
    auto [it, fresh] = seen.emplace(y, images.size());
    if (fresh) images.push_back({y});
    out.assignment[i] = it->second;
  }
  out.target = std::make_unique<FiniteMetricSpace>(
      FiniteMetricSpace::from_coordinates(std::move(images), MetricKind::euclidean));
  return out;
}

}  // namespace fracdim
