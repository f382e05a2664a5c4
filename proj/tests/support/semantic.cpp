#include "semantic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "interpreter.hpp"

namespace acc2dc::testing {

namespace {

using Fill = SemanticCase::ArraySpec::Fill;

const char kIndex[] = "ijkl";

class CaseBuilder {
public:
  CaseBuilder(const std::string &family, std::uint64_t seed) : rng_(seed) {
    c_.family = family;
    c_.seed = seed;
    c_.integer = seed % 2 == 0;
  }

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return range(0, 1) == 0; }

  std::string type() const { return c_.integer ? "integer" : "real(8)"; }
  std::string lit(int v) const { return c_.integer ? std::to_string(v) : std::to_string(v) + ".0"; }

  /// Extents n1..nd, each between 1 and 8.
  void dims(int d) {
    for (int k = static_cast<int>(c_.extents.size()); k < d; ++k)
      c_.extents.emplace_back("n" + std::to_string(k + 1), range(1, 8));
  }

  std::vector<std::int64_t> extents(const std::vector<int> &which) const {
    std::vector<std::int64_t> out;
    for (int w : which)
      out.push_back(c_.extents[static_cast<std::size_t>(w)].second);
    return out;
  }

  static std::vector<int> first(int d) {
    std::vector<int> v(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
      v[static_cast<std::size_t>(k)] = k;
    return v;
  }

  void array(const std::string &name, const std::vector<int> &which, Fill fill = Fill::Random) {
    c_.arrays.push_back({name, extents(which), fill});
    std::string decl = "  " + type() + " :: " + name + "(";
    for (std::size_t k = 0; k < which.size(); ++k)
      decl += (k ? "," : "") + std::string("n") + std::to_string(which[k] + 1);
    decls_.push_back(decl + ")");
  }

  void scalar(const std::string &name) {
    c_.scalars.push_back(name);
    decls_.push_back("  " + type() + " :: " + name);
  }

  static std::string ref(const std::string &name, const std::vector<int> &which) {
    std::string s = name + "(";
    for (std::size_t k = 0; k < which.size(); ++k)
      s += (k ? "," : "") + std::string(1, kIndex[which[k]]);
    return s + ")";
  }

  /// Loop nest over dims d-1 .. 0 (outermost first) with `body` innermost.
  void nest(int d, const std::vector<std::string> &body) {
    std::string ind = "  ";
    for (int k = d - 1; k >= 0; --k) {
      code_ << ind << "do " << kIndex[k] << "=1,n" << k + 1 << "\n";
      ind += "  ";
    }
    for (const auto &b : body)
      code_ << (b.rfind("!$acc", 0) == 0 ? "" : ind) << b << "\n";
    for (int k = 0; k < d; ++k) {
      ind.resize(ind.size() - 2);
      code_ << ind << "enddo\n";
    }
  }

  /// Parallel loop directive in one of the equivalent spellings. Returns the
  /// closing line, possibly empty.
  std::string open(const std::string &clauses) {
    switch (range(0, 2)) {
    case 0:
      code_ << "!$acc parallel loop" << clauses << "\n";
      return "";
    case 1:
      code_ << "!$acc parallel default(present)\n!$acc loop" << clauses << "\n";
      return "!$acc end parallel\n";
    default:
      code_ << "!$acc parallel loop &\n!$acc&" << clauses << " default(present)\n";
      return "";
    }
  }

  std::ostringstream &code() { return code_; }

  SemanticCase finish(Mode mode) {
    c_.mode = mode;
    std::ostringstream src;
    src << "subroutine case_" << c_.seed << "(";
    for (std::size_t k = 0; k < c_.extents.size(); ++k)
      src << (k ? ", " : "") << c_.extents[k].first;
    src << ")\n";
    src << "  integer :: ";
    for (std::size_t k = 0; k < c_.extents.size(); ++k)
      src << (k ? ", " : "") << c_.extents[k].first;
    src << "\n";
    for (const auto &d : decls_)
      src << d << "\n";
    src << "  integer :: i, j, k, l\n";
    src << code_.str();
    src << "end subroutine case_" << c_.seed << "\n";
    c_.source = src.str();
    return c_;
  }

private:
  std::mt19937_64 rng_;
  SemanticCase c_;
  std::vector<std::string> decls_;
  std::ostringstream code_;
};

SemanticCase collapse_case(CaseBuilder &b) {
  int d = b.range(1, 4);
  int c = b.range(1, d);
  b.dims(d);
  auto all = CaseBuilder::first(d);
  b.array("a", all);
  b.array("b", all);
  b.array("c", all);
  auto close = b.open(c > 1 || b.coin() ? " collapse(" + std::to_string(c) + ")" : "");
  std::vector<std::string> body{CaseBuilder::ref("a", all) + " = " + CaseBuilder::ref("b", all) +
                                "*" + b.lit(b.range(2, 5)) + " + " + CaseBuilder::ref("c", all)};
  if (b.coin())
    body.push_back(CaseBuilder::ref("c", all) + " = " + CaseBuilder::ref("a", all) + " - i");
  b.nest(d, body);
  b.code() << close;
  return b.finish(Mode::AD);
}

SemanticCase scalar_reduction_case(CaseBuilder &b) {
  int d = b.range(1, 3);
  b.dims(d);
  auto all = CaseBuilder::first(d);
  b.array("a", all);
  b.array("b", all);
  b.scalar("s");
  std::string clauses = d > 1 || b.coin() ? " collapse(" + std::to_string(d) + ")" : "";
  std::vector<std::string> body;
  switch (b.range(0, 2)) {
  case 0:
    clauses += " reduction(+:s)";
    body.push_back("s = s + " + CaseBuilder::ref("a", all) + "*" + CaseBuilder::ref("b", all));
    break;
  case 1:
    clauses += " reduction(max:s)";
    body.push_back("s = max(s, " + CaseBuilder::ref("a", all) + ")");
    break;
  default:
    clauses += " reduction(min:s)";
    body.push_back("s = min(s, " + CaseBuilder::ref("b", all) + ")");
  }
  if (b.coin()) {
    b.scalar("m");
    clauses += " reduction(+:m)";
    body.push_back("m = m + " + CaseBuilder::ref("b", all));
  }
  auto close = b.open(clauses);
  b.nest(d, body);
  b.code() << close;
  return b.finish(Mode::AD2XU);
}

/// Loop nest over d dims with an atomic update of t over a proper subset of
/// the indices.
struct ArrayReductionShape {
  std::vector<int> all, kept;
};

ArrayReductionShape array_reduction_shape(CaseBuilder &b) {
  int d = b.range(2, 3);
  b.dims(d);
  ArrayReductionShape s;
  s.all = CaseBuilder::first(d);
  for (int k = 0; k < d; ++k)
    if (b.coin())
      s.kept.push_back(k);
  if (s.kept.empty())
    s.kept.push_back(b.range(0, d - 1));
  if (static_cast<int>(s.kept.size()) == d)
    s.kept.erase(s.kept.begin() + b.range(0, d - 1));
  return s;
}

SemanticCase array_reduction_dc_case(CaseBuilder &b) {
  auto s = array_reduction_shape(b);
  int d = static_cast<int>(s.all.size());
  b.array("a", s.all);
  b.array("t", s.kept);
  b.code() << "!$acc parallel default(present)\n!$acc loop collapse(" << d << ")\n";
  auto t = CaseBuilder::ref("t", s.kept);
  b.nest(d, {"!$acc atomic update", t + "=" + t + "+" + CaseBuilder::ref("a", s.all) + "*" + b.lit(2)});
  b.code() << "!$acc end parallel\n";
  return b.finish(Mode::AD2XU);
}

SemanticCase array_reduction_interchange_case(CaseBuilder &b) {
  auto s = array_reduction_shape(b);
  int d = static_cast<int>(s.all.size());
  b.array("a", s.all);
  auto t = CaseBuilder::ref("t", s.kept);
  auto a = CaseBuilder::ref("a", s.all);
  std::string update;
  switch (b.range(0, 2)) {
  case 0:
    b.array("t", s.kept, Fill::Zero);
    update = t + "=" + t + "+" + a + "*" + b.lit(3);
    break;
  case 1:
    b.array("t", s.kept, Fill::Lowest);
    update = t + "=max(" + t + "," + a + ")";
    break;
  default:
    b.array("t", s.kept, Fill::Highest);
    update = t + "=min(" + t + "," + a + ")";
  }
  auto close = b.open(" collapse(" + std::to_string(d) + ")");
  b.nest(d, {"!$acc atomic update", update});
  b.code() << close;
  return b.finish(Mode::D2XU);
}

SemanticCase kernels_intrinsic_case(CaseBuilder &b) {
  int r = b.range(1, 3);
  b.dims(r);
  auto all = CaseBuilder::first(r);
  b.array("a", all);
  b.array("b", all);
  b.scalar("s");
  b.scalar("m");
  static const char *fn[] = {"sum", "minval", "maxval"};
  b.code() << "!$acc kernels\n";
  b.code() << "  s = " << fn[b.range(0, 2)] << "(a)\n";
  b.code() << "  m = " << fn[b.range(0, 2)] << "(a*b + " << b.lit(1) << ")\n";
  b.code() << "!$acc end kernels\n";
  return b.finish(Mode::D2XU);
}

SemanticCase kernels_array_case(CaseBuilder &b) {
  int r = b.range(1, 3);
  b.dims(r);
  auto all = CaseBuilder::first(r);
  b.array("a", all);
  b.array("b", all);
  b.array("c", all);
  b.code() << "!$acc kernels\n";
  b.code() << "  a = b*" << b.lit(b.range(2, 4)) << " + c\n";
  if (b.coin())
    b.code() << "  c = a - b\n";
  b.code() << "!$acc end kernels\n";
  return b.finish(Mode::D2XU);
}

SemanticCase kernels_loops_case(CaseBuilder &b) {
  int d = b.range(1, 3);
  b.dims(d);
  auto all = CaseBuilder::first(d);
  b.array("a", all);
  b.array("b", all);
  b.scalar("s");
  std::vector<std::string> body{CaseBuilder::ref("a", all) + " = " + CaseBuilder::ref("b", all) + " + " +
                                b.lit(b.range(1, 9))};
  if (b.coin())
    body.push_back("s = s + " + CaseBuilder::ref("b", all));
  b.code() << "!$acc kernels\n";
  b.nest(d, body);
  b.code() << "!$acc end kernels\n";
  return b.finish(Mode::D2XU);
}

SemanticCase atomic_scalar_case(CaseBuilder &b) {
  int d = b.range(1, 3);
  b.dims(d);
  auto all = CaseBuilder::first(d);
  b.array("a", all);
  b.array("b", all);
  b.scalar("s");
  auto close = b.open(d > 1 ? " collapse(" + std::to_string(d) + ")" : "");
  b.nest(d, {CaseBuilder::ref("b", all) + " = " + CaseBuilder::ref("a", all) + " + " + b.lit(1),
             "!$acc atomic update", "s = s + " + CaseBuilder::ref("a", all)});
  b.code() << close;
  return b.finish(Mode::D2XU);
}

SemanticCase routine_call_case(CaseBuilder &b) {
  int d = b.range(1, 3);
  b.dims(d);
  auto all = CaseBuilder::first(d);
  b.array("a", all);
  b.array("b", all);
  auto close = b.open(d > 1 ? " collapse(" + std::to_string(d) + ")" : "");
  b.nest(d, {CaseBuilder::ref("a", all) + " = f(" + CaseBuilder::ref("b", all) + ") + " +
             CaseBuilder::ref("a", all)});
  b.code() << close;
  return b.finish(Mode::D2XU);
}

template <typename T> T random_value(std::mt19937_64 &rng) {
  if constexpr (std::is_integral_v<T>)
    return std::uniform_int_distribution<T>(-9, 9)(rng);
  else
    return std::uniform_real_distribution<T>(-1.0, 1.0)(rng);
}

template <typename T> void setup(const SemanticCase &c, Interpreter<T> &interp) {
  std::mt19937_64 rng(c.seed * 7919 + 17);
  for (const auto &[name, value] : c.extents)
    interp.scalars[name] = static_cast<T>(value);
  for (const auto &spec : c.arrays) {
    Array<T> a(spec.extents);
    for (auto &x : a.data) {
      switch (spec.fill) {
      case Fill::Random:
        x = random_value<T>(rng);
        break;
      case Fill::Zero:
        x = T{};
        break;
      case Fill::One:
        x = T{1};
        break;
      case Fill::Lowest:
        x = -std::numeric_limits<T>::max();
        break;
      case Fill::Highest:
        x = std::numeric_limits<T>::max();
      }
    }
    interp.arrays[spec.name] = std::move(a);
  }
  for (const auto &s : c.scalars)
    interp.scalars[s] = random_value<T>(rng);
  interp.functions["f"] = [](std::span<const T> args) { return T{2} * args[0] + T{1}; };
}

template <typename T>
bool close_enough(T x, T y, double &max_error) {
  if constexpr (std::is_integral_v<T>) {
    return x == y;
  } else {
    double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
    double err = std::fabs(x - y) / scale;
    max_error = std::max(max_error, err);
    return err <= kFloatTolerance;
  }
}

template <typename T>
SemanticOutcome compare(const SemanticCase &c, const std::string &migrated) {
  SemanticOutcome out;
  Interpreter<T> before, after;
  setup(c, before);
  setup(c, after);
  try {
    before.run(c.source);
    after.run(migrated);
  } catch (const InterpreterError &e) {
    out.detail = std::string("interpreter: ") + e.what();
    return out;
  }
  for (const auto &spec : c.arrays) {
    const auto &x = before.arrays.at(spec.name).data;
    const auto &y = after.arrays.at(spec.name).data;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (!close_enough(x[k], y[k], out.max_error)) {
        std::ostringstream ss;
        ss << spec.name << "[" << k << "]: " << x[k] << " vs " << y[k];
        out.detail = ss.str();
        return out;
      }
  }
  for (const auto &s : c.scalars)
    if (!close_enough(before.scalars.at(s), after.scalars.at(s), out.max_error)) {
      std::ostringstream ss;
      ss << s << ": " << before.scalars.at(s) << " vs " << after.scalars.at(s);
      out.detail = ss.str();
      return out;
    }
  out.ok = true;
  return out;
}

std::string lower(std::string s) {
  for (auto &ch : s)
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

} // namespace

const std::vector<std::string> &semantic_families() {
  static const std::vector<std::string> f{
      "collapse",          "scalar-reduction", "array-reduction-dc", "array-reduction-interchange",
      "kernels-intrinsic", "kernels-array",    "kernels-loops",      "atomic-scalar",
      "routine-call",
  };
  return f;
}

SemanticCase make_semantic_case(const std::string &family, std::uint64_t seed) {
  CaseBuilder b(family, seed);
  if (family == "collapse")
    return collapse_case(b);
  if (family == "scalar-reduction")
    return scalar_reduction_case(b);
  if (family == "array-reduction-dc")
    return array_reduction_dc_case(b);
  if (family == "array-reduction-interchange")
    return array_reduction_interchange_case(b);
  if (family == "kernels-intrinsic")
    return kernels_intrinsic_case(b);
  if (family == "kernels-array")
    return kernels_array_case(b);
  if (family == "kernels-loops")
    return kernels_loops_case(b);
  if (family == "atomic-scalar")
    return atomic_scalar_case(b);
  if (family == "routine-call")
    return routine_call_case(b);
  throw std::invalid_argument("unknown family " + family);
}

SemanticOutcome check_semantic_case(const SemanticCase &c) {
  AnalysisConfig config;
  config.purity_whitelist.insert("f");
  auto src = load_source(c.source, "case.f90");
  auto result = transform_file(src, c.mode, config);
  auto migrated = emit_source(result.output);

  auto text = lower(migrated);
  bool has_dc = text.find("do concurrent") != std::string::npos;
  bool directives_left = text.find("!$acc") != std::string::npos;
  bool full = rewrite_level(c.mode) == RewriteLevel::Full;

  auto out = c.integer ? compare<std::int64_t>(c, migrated) : compare<double>(c, migrated);
  out.converted = has_dc && !(full && directives_left);
  if (!out.converted) {
    out.ok = false;
    out.detail = "not converted:\n" + migrated;
  } else if (!out.ok) {
    out.detail += "\n--- input\n" + c.source + "--- output\n" + migrated;
  }
  return out;
}

} // namespace acc2dc::testing
