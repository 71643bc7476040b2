#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mmhard {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                            boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                              boost::multiprecision::et_off>;

enum class Mode { PaperFaithful, Toy };

// Subset kinds of a level graph. Dummy only appears in instance labels.
enum class Kind : std::uint8_t { S = 0, A = 1, B = 2, D = 3, Dummy = 4 };

struct Violation {
  std::string id;
  std::string detail;
  std::string values;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::vector<std::string> notes;

  void fail(std::string id, std::string detail, std::string values = {}) {
    ok = false;
    violations.push_back({std::move(id), std::move(detail), std::move(values)});
  }

  bool has(const std::string& id) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.id == id; });
  }

  std::string to_string() const {
    std::ostringstream os;
    os << (ok ? "ok" : "FAILED") << "\n";
    for (const auto& v : violations) {
      os << "  violation [" << v.id << "] " << v.detail;
      if (!v.values.empty()) os << " (" << v.values << ")";
      os << "\n";
    }
    for (const auto& n : notes) os << "  note: " << n << "\n";
    return os.str();
  }
};

enum class ParamErrc {
  NonIntegralParameter,
  InfeasibleScale,
  ValidationFailed,
  UndefinedInToyMode,
  PreconditionViolation,
  ParseError,
};

class ParamError : public std::runtime_error {
 public:
  ParamError(ParamErrc code, const std::string& what, ValidationReport report = {})
      : std::runtime_error(what), code_(code), report_(std::move(report)) {}
  ParamErrc code() const { return code_; }
  const ValidationReport& report() const { return report_; }

 private:
  ParamErrc code_;
  ValidationReport report_;
};

struct ParamSet {
  Mode mode = Mode::Toy;
  std::optional<Rational> delta;
  int L = 1;
  std::uint64_t r = 2;
  Rational zeta, xi, gamma, tau;
  std::vector<BigInt> d;  // d_1..d_L
  BigInt N1;

  // Filled by complete().
  std::vector<double> sigma;       // σ_1..σ_{L+1}; empty without δ
  std::vector<Rational> N;         // N_1..N_L
  std::vector<Rational> n_level;   // n_1..n_L
  Rational n_total;
  Rational dummy_count;            // τ·n_L
  double epsilon = 0;
  double log10_epsilon = 0;
};

// ---------------------------------------------------------------------------
// Number helpers

inline std::string to_string(const BigInt& x) { return x.str(); }

inline std::string to_string(const Rational& x) {
  const BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline bool is_integral(const Rational& x) { return boost::multiprecision::denominator(x) == 1; }

inline BigInt to_int(const Rational& x) {
  return boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) { return (a + b - 1) / b; }

inline BigInt ceil_of(const Rational& x) {
  BigInt num = boost::multiprecision::numerator(x);
  BigInt den = boost::multiprecision::denominator(x);
  if (num >= 0) return ceil_div(num, den);
  return -((-num) / den);
}

inline BigInt lcm_big(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return a / boost::multiprecision::gcd(a, b) * b;
}

inline double log_big(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  const auto bits = static_cast<long>(boost::multiprecision::msb(x)) + 1;
  if (bits <= 60) return std::log(x.convert_to<double>());
  const long shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Parses "7", "-3", "1/4" or "0.125" exactly.
namespace detail {

// Decimal only: BigInt's string constructor would read "012" as octal and "0x12" as hex.
inline std::optional<BigInt> parse_decimal(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos) return std::nullopt;
  const auto nz = s.find_first_not_of('0');
  BigInt x = nz == std::string_view::npos ? BigInt(0) : BigInt(std::string(s.substr(nz)));
  return neg ? BigInt(-x) : x;
}

}  // namespace detail

inline Rational parse_rational(const std::string& s) {
  auto fail = [&]() -> Rational {
    throw ParamError(ParamErrc::ParseError, "cannot parse number '" + s + "'");
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto a = detail::parse_decimal(std::string_view(s).substr(0, slash));
    auto b = detail::parse_decimal(std::string_view(s).substr(slash + 1));
    if (!a || !b || *b == 0) return fail();
    return Rational(*a, *b);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    const std::string frac = s.substr(dot + 1);
    std::string whole = s.substr(0, dot);
    if (whole.empty() || whole == "-" || whole == "+") whole += '0';
    auto a = detail::parse_decimal(whole + frac);
    if (!a || frac.find_first_not_of("0123456789") != std::string::npos) return fail();
    return Rational(*a, boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size())));
  }
  auto a = detail::parse_decimal(s);
  if (!a) return fail();
  return Rational(*a);
}

inline std::uint64_t to_u64(const BigInt& x, const char* what) {
  if (x < 0 || x > std::numeric_limits<std::uint64_t>::max())
    throw ParamError(ParamErrc::InfeasibleScale, std::string(what) + " does not fit in 64 bits");
  return x.convert_to<std::uint64_t>();
}

// ---------------------------------------------------------------------------
// Level plans

// Side of a subset inside its level graph. j=1 puts S and A on side 0, B on side 1;
// j=2 mirrors. D quarters 1 and 4 sit on side 0, quarters 2 and 3 on side 1.
inline int subset_side(Kind kind, int part) {
  switch (kind) {
    case Kind::S:
    case Kind::A: return part == 1 ? 0 : 1;
    case Kind::B: return part == 1 ? 1 : 0;
    case Kind::D: return (part == 1 || part == 4) ? 0 : 1;
    default: return 0;
  }
}

// Cover quarters (1 and 3) carry the delusive edges of A; noncover quarters (2 and 4)
// carry those of B.
inline int delusive_quarter(Kind kind, int j) {
  if (kind == Kind::A) return j == 1 ? 3 : 1;
  return j == 1 ? 4 : 2;
}

// Scalar sizes and degrees of one level. Every subset of a kind shares these values,
// so validation works per class and stays cheap even when r is astronomically large.
struct LevelPlan {
  int level = 1;
  BigInt M;       // |S^j| = |A_i^j| = |B_i^j|
  BigInt X;       // ξN_1 at the base, 0 above
  BigInt q;       // quarter size of each D_k
  BigInt copies;  // embedded copies per S/A/B pairing (levels ≥ 2)
  BigInt d;
  BigInt unit;    // edges from each A/B vertex to each D_k (γd/r)
  BigInt xd;      // B_r^1–B_r^2 degree at the base (ξd)
  BigInt T;       // skeleton degree of every non-S vertex: d + γd
  BigInt a_full;  // degree of a D quarter vertex towards one full A/B layer
  BigInt a_r;     // same towards A_r
  BigInt R;       // noncover residual D_k^2–D_{k+1}^1 and D_k^4–D_{k+1}^3
  BigInt rho;     // cover residual D_k^1–D_k^3
  BigInt n;       // vertex count
  BigInt half;
};

namespace detail {

inline void check_size(const Rational& x, const char* name, int level, bool need_even,
                       ValidationReport& rep) {
  std::string where = std::string(name) + " at level " + std::to_string(level);
  if (!is_integral(x)) {
    rep.fail("size-integral", where + " is not an integer", to_string(x));
    return;
  }
  if (x <= 0) {
    rep.fail("size-positive", where + " is not positive", to_string(x));
    return;
  }
  if (need_even && to_int(x) % 2 != 0) rep.fail("subset-even", where + " is odd", to_string(x));
}

// Nearest integer under the 0.5% rounding rule.
inline BigInt round_degree(const Rational& x, const std::string& what, ValidationReport& rep) {
  if (x < 0) {
    rep.fail("degree-negative", what + " is negative", to_string(x));
    return 0;
  }
  if (is_integral(x)) return to_int(x);
  BigInt rounded = to_int(x + Rational(1, 2));
  Rational shift = Rational(rounded) - x;
  if (shift < 0) shift = -shift;
  if (shift * 200 > x) {
    rep.fail("degree-integral", what + " is not an integer and rounding shifts it by more than 0.5%",
             to_string(x));
  } else {
    rep.notes.push_back(what + " rounded from " + to_string(x) + " to " + rounded.str());
  }
  return rounded;
}

inline BigInt exact_degree(const Rational& x, const std::string& what, ValidationReport& rep) {
  if (!is_integral(x)) {
    rep.fail("handshake", what + " is not an integer, so |X|·deg(X,Y) = |Y|·deg(Y,X) fails",
             to_string(x));
    return to_int(x);
  }
  return to_int(x);
}

inline void check_fits(const BigInt& deg, const BigInt& size, const std::string& what,
                       ValidationReport& rep) {
  if (deg > size)
    rep.fail("degree-exceeds-size", what + " exceeds the opposite subset size",
             deg.str() + " > " + size.str());
}

inline Rational base_n_coefficient(const ParamSet& p) {
  const Rational r(p.r);
  return Rational(4) * r + 2 - 2 * p.xi + r * p.zeta;
}

}  // namespace detail

// Recomputes derived fields from the primary ones.
inline void complete(ParamSet& p) {
  p.sigma.clear();
  p.N.clear();
  p.n_level.clear();
  if (p.L < 1) return;
  if (p.delta) {
    const double delta = to_double(*p.delta);
    for (int i = 1; i <= p.L + 1; ++i) p.sigma.push_back(std::pow(delta / 10.0, p.L + 1 - i));
  }
  const Rational r(p.r);
  for (int l = 1; l <= p.L; ++l) {
    Rational N = l == 1 ? Rational(p.N1) : p.n_level.back() / (2 * p.zeta);
    Rational M = l == 1 ? N : 4 * N;
    Rational X = l == 1 ? p.xi * N : Rational(0);
    Rational q = l == 1 ? p.zeta * N / 4 : p.zeta * N;
    p.N.push_back(N);
    p.n_level.push_back((4 * r + 2) * M - 2 * X + 4 * r * q);
  }
  p.dummy_count = p.tau * p.n_level.back();
  p.n_total = p.n_level.back() + p.dummy_count;
  if (p.delta && *p.delta > 0) {
    const double delta = to_double(*p.delta);
    p.log10_epsilon = 100.0 / (delta * delta) * std::log10(delta / 400.0);
    p.epsilon = std::pow(10.0, p.log10_epsilon);
  } else if (p.n_total > 0) {
    Rational e = Rational(p.N1) / (2 * p.n_total);
    p.epsilon = to_double(e);
    p.log10_epsilon = std::log10(p.epsilon);
  }
}

// Plan of level `ell`; violations found on the way are appended to `rep`.
inline LevelPlan plan_level(const ParamSet& p, int ell, ValidationReport& rep) {
  using detail::check_size;
  LevelPlan lp;
  lp.level = ell;
  const Rational r(p.r);
  const std::string at = " at level " + std::to_string(ell);
  const Rational N = p.N.at(ell - 1);
  const Rational M = ell == 1 ? N : 4 * N;
  const Rational X = ell == 1 ? p.xi * N : Rational(0);
  const Rational q = ell == 1 ? p.zeta * N / 4 : p.zeta * N;

  check_size(M, "|S|,|A_i|,|B_i|", ell, true, rep);
  check_size(q, "|D_k^part|", ell, true, rep);
  if (ell == 1) {
    check_size(X, "ξN_1", ell, true, rep);
    check_size(M - X, "|A_r|", ell, true, rep);
  }
  lp.M = to_int(M);
  lp.X = to_int(X);
  lp.q = to_int(q);
  if (lp.q <= 0) return lp;

  const Rational copies = 4 / p.zeta;
  lp.copies = to_int(copies);
  lp.d = p.d.at(ell - 1);
  lp.unit = detail::round_degree(p.gamma * Rational(lp.d) / r, "γd/r" + at, rep);
  lp.xd = ell == 1 ? detail::round_degree(p.xi * Rational(lp.d), "ξd" + at, rep) : BigInt(0);
  lp.T = lp.d + BigInt(p.r) * lp.unit;

  const Rational unit(lp.unit);
  lp.a_full = detail::exact_degree(M * unit / q, "deg(D, A_i)" + at, rep);
  lp.a_r = detail::exact_degree((M - X) * unit / q, "deg(D, A_r)" + at, rep);
  const BigInt R = lp.T - BigInt(p.r) * lp.a_full;
  if (R < 0)
    rep.fail("degree-negative", "negative D-internal degree (noncover residual)" + at, R.str());
  lp.R = R < 0 ? BigInt(0) : R;
  lp.rho = lp.a_full - lp.a_r;
  if (ell == 1 && Rational(lp.xd) * M != X * Rational(lp.d))
    rep.fail("handshake", "|A_r|·d ≠ |B_r|·deg(B_r, A_r)" + at,
             "xd=" + lp.xd.str() + " X=" + lp.X.str() + " M=" + lp.M.str());

  // Simple-graph feasibility per gadget class.
  detail::check_fits(lp.d, lp.M, "block degree d" + at, rep);
  detail::check_fits(lp.unit, lp.q, "delusive degree γd/r" + at, rep);
  detail::check_fits(lp.a_full, lp.M, "deg(D, A_i)" + at, rep);
  detail::check_fits(lp.a_r, lp.M - lp.X, "deg(D, A_r)" + at, rep);
  detail::check_fits(lp.R, lp.q, "noncover residual" + at, rep);
  detail::check_fits(lp.rho, lp.q, "cover residual" + at, rep);
  if (ell == 1) {
    detail::check_fits(lp.xd, lp.M, "ξd" + at, rep);
    if (lp.xd < 1) rep.fail("xi-degree", "ξd must be at least 1 to hold the planted matching", lp.xd.str());
    if (2 * lp.d > lp.M - lp.X)
      rep.fail("no-matching-room", "2d must not exceed |A_r| so the NO matchings avoid block edges",
               "d=" + lp.d.str() + " |A_r|=" + (lp.M - lp.X).str());
  }

  // Degree contract per subset class.
  const BigInt rr(p.r);
  auto contract = [&](const BigInt& got, const char* what) {
    if (got != lp.T)
      rep.fail("contract", std::string(what) + at + " has skeleton degree " + got.str() +
                               " instead of d+γd = " + lp.T.str());
  };
  contract(lp.d + rr * lp.unit, "A_i / B_i (i<r)");
  contract(lp.d + rr * lp.unit, "A_r");
  contract(lp.d - lp.xd + lp.xd + rr * lp.unit, "B_r");
  contract((rr - 1) * lp.a_full + lp.a_r + lp.R + lp.rho, "D cover quarter");
  contract(rr * lp.a_full + lp.R, "D noncover quarter");

  lp.n = 2 * lp.M + 2 * (rr - 1) * lp.M + 2 * (lp.M - lp.X) + 2 * rr * lp.M + 4 * rr * lp.q;
  lp.half = lp.n / 2;
  return lp;
}

inline ValidationReport validate(const ParamSet& p) {
  ValidationReport rep;
  if (p.L < 1) rep.fail("L-min", "L must be at least 1", std::to_string(p.L));
  if (p.r < 2) rep.fail("r-min", "r must be at least 2 for the cyclic D wiring", std::to_string(p.r));
  if (p.r > 0xFFFF) rep.notes.push_back("r exceeds 65535; instances cannot be materialised");
  if (static_cast<int>(p.d.size()) != p.L) {
    rep.fail("d-count", "need one block degree per level",
             std::to_string(p.d.size()) + " vs L=" + std::to_string(p.L));
  }
  if (p.N1 <= 0) rep.fail("size-positive", "N_1 must be positive", p.N1.str());
  auto unit_interval = [&](const Rational& x, const char* name) {
    if (x <= 0 || x >= 1) rep.fail("unit-interval", std::string(name) + " must lie in (0,1)", to_string(x));
  };
  unit_interval(p.zeta, "zeta");
  unit_interval(p.xi, "xi");
  unit_interval(p.gamma, "gamma");
  unit_interval(p.tau, "tau");
  if (!rep.ok) return rep;

  if (!is_integral(4 / p.zeta))
    rep.fail("copies-integral", "embedded copy count 4/ζ not integral", to_string(4 / p.zeta));
  if (p.N.size() != static_cast<std::size_t>(p.L)) {
    rep.fail("not-completed", "derived fields missing; call complete()");
    return rep;
  }
  for (int l = 1; l <= p.L; ++l) {
    const BigInt& dl = p.d[l - 1];
    if (dl < 1) rep.fail("degree-positive", "d_" + std::to_string(l) + " must be positive", dl.str());
    if (l > 1 && dl <= p.d[l - 2])
      rep.fail("degrees-increasing", "d_ℓ must strictly increase",
               p.d[l - 2].str() + " >= " + dl.str());
  }
  if (Rational(p.d.back()) >= p.n_total)
    rep.fail("degrees-increasing", "d_L must be below n", p.d.back().str());
  if (!rep.ok) return rep;

  std::vector<LevelPlan> plans;
  for (int l = 1; l <= p.L; ++l) {
    plans.push_back(plan_level(p, l, rep));
    if (l >= 2) {
      const BigInt& half_below = plans[l - 2].half;
      if (plans[l - 1].copies * half_below != plans[l - 1].M)
        rep.fail("copies-fit", "4/ζ copies of half of level " + std::to_string(l - 1) +
                                   " do not fill a subset of level " + std::to_string(l));
      if (half_below != plans[l - 1].q)
        rep.fail("copies-fit", "D quarter at level " + std::to_string(l) +
                                   " does not match half of level " + std::to_string(l - 1));
    }
  }

  const Rational& t = p.dummy_count;
  if (!is_integral(t) || to_int(t) % 2 != 0)
    rep.fail("dummy-even", "τ·n_L must be an even integer", to_string(t));

  // Cover deficit of the NO construction: (1−ξ)N_1 at the base, times 4/ζ per level.
  Rational deficit = (1 - p.xi) * Rational(p.N1);
  for (int l = 2; l <= p.L; ++l) deficit *= 4 / p.zeta;
  if (deficit - t < Rational(p.N1) / 2)
    rep.fail("gap", "cover deficit minus τn_L is below N_1/2, the YES/NO gap is not guaranteed",
             "deficit=" + to_string(deficit) + " τn_L=" + to_string(t));

  if (p.mode == Mode::PaperFaithful) {
    if (t > Rational(p.N1) / 2) rep.fail("dummy-bound", "τ·n_L exceeds N_1/2", to_string(t));
    const Rational paper_n1 = (2 + 4 * Rational(p.r) + p.zeta * Rational(p.r)) * Rational(p.N1);
    if (paper_n1 != p.n_level[0])
      rep.notes.push_back("n_1 counts |A_r^j| = (1-ξ)N_1: " + to_string(p.n_level[0]) +
                          " vs (2+4r+ζr)N_1 = " + to_string(paper_n1));
    // Closed form deg(D_r, D_r) = d_1 + 1 + γd_1(1 − 4/ζ + 2ξ/ζ) compared with the residual rule.
    const Rational d1(p.d[0]);
    const Rational closed = d1 + 1 + p.gamma * d1 * (1 - 4 / p.zeta + 2 * p.xi / p.zeta);
    if (!plans.empty()) {
      const Rational used(plans[0].R + plans[0].rho);
      if (closed != used)
        rep.notes.push_back("closed-form deg(D_r,D_r) = " + to_string(closed) +
                            " differs from residual-rule D-internal degree " + to_string(used));
    }
  }
  return rep;
}

inline std::vector<LevelPlan> plan_all(const ParamSet& p) {
  ValidationReport rep;
  std::vector<LevelPlan> plans;
  for (int l = 1; l <= p.L; ++l) plans.push_back(plan_level(p, l, rep));
  if (!rep.ok) throw ParamError(ParamErrc::ValidationFailed, "invalid parameters", rep);
  return plans;
}

inline ParamSet toy_params(int L, std::uint64_t r, std::vector<BigInt> d, BigInt N1, Rational zeta,
                           Rational xi, Rational gamma, Rational tau) {
  ParamSet p;
  p.mode = Mode::Toy;
  p.L = L;
  p.r = r;
  p.d = std::move(d);
  p.N1 = std::move(N1);
  p.zeta = std::move(zeta);
  p.xi = std::move(xi);
  p.gamma = std::move(gamma);
  p.tau = std::move(tau);
  complete(p);
  ValidationReport rep = validate(p);
  if (!rep.ok) throw ParamError(ParamErrc::ValidationFailed, "toy parameters invalid:\n" + rep.to_string(), rep);
  return p;
}

// ---------------------------------------------------------------------------
// Paper-faithful derivation

namespace detail {

inline BigInt round_parameter(const Rational& x, const char* name) {
  BigInt rounded = to_int(x + Rational(1, 2));
  Rational shift = Rational(rounded) - x;
  if (shift < 0) shift = -shift;
  if (rounded <= 0 || shift * 200 > x)
    throw ParamError(ParamErrc::NonIntegralParameter,
                     std::string(name) + " = " + to_string(x) + " is not within 0.5% of an integer");
  return rounded;
}

// N_1 must be a multiple of this so that coef·N_1 is a multiple of m.
inline BigInt granule(const Rational& coef, const BigInt& m) {
  const BigInt a = boost::multiprecision::numerator(coef);
  const BigInt b = boost::multiprecision::denominator(coef);
  const BigInt bm = b * m;
  return bm / boost::multiprecision::gcd(a < 0 ? BigInt(-a) : a, bm);
}

inline constexpr unsigned kMaxBits = 8192;

}  // namespace detail

inline ParamSet derive_paper_params(const Rational& delta, const BigInt& scale_hint = 2) {
  if (delta <= 0 || delta > 2)
    throw ParamError(ParamErrc::PreconditionViolation, "delta must lie in (0,2], got " + to_string(delta));
  ParamSet p;
  p.mode = Mode::PaperFaithful;
  p.delta = delta;
  const BigInt L = detail::round_parameter(4 / delta, "L = 4/δ");
  if (L > 4096) throw ParamError(ParamErrc::InfeasibleScale, "L = " + L.str() + " is too large");
  p.L = L.convert_to<int>();
  const Rational base = 10 / delta;
  Rational rr = 1;
  for (int i = 0; i < p.L + 1; ++i) {
    rr *= base;
    if (boost::multiprecision::msb(boost::multiprecision::numerator(rr)) > detail::kMaxBits)
      throw ParamError(ParamErrc::InfeasibleScale, "r = (10/δ)^(L+1) exceeds the size cap");
  }
  const BigInt r = detail::round_parameter(rr, "r = (10/δ)^(L+1)");
  if (r > std::numeric_limits<std::uint64_t>::max())
    throw ParamError(ParamErrc::InfeasibleScale, "r does not fit in 64 bits");
  p.r = r.convert_to<std::uint64_t>();
  const Rational R(r);
  p.zeta = 1 / (R * R);
  p.xi = p.zeta;
  p.gamma = 1 / (R * R * R);
  p.tau = Rational(1) / Rational(boost::multiprecision::pow(BigInt(20) * r * r * r, static_cast<unsigned>(p.L)));
  p.d.assign(p.L, BigInt(0));

  // Size coefficients relative to N_1 and the resulting N_1 granularity.
  const Rational Rr(p.r);
  BigInt G = 2;
  auto need = [&](const Rational& coef, int m) { G = lcm_big(G, detail::granule(coef, m)); };
  Rational Ncoef = 1;
  Rational ncoef = 0;
  for (int l = 1; l <= p.L; ++l) {
    if (l > 1) Ncoef = ncoef / (2 * p.zeta);
    Rational M = l == 1 ? Ncoef : 4 * Ncoef;
    Rational X = l == 1 ? p.xi * Ncoef : Rational(0);
    Rational q = l == 1 ? p.zeta * Ncoef / 4 : p.zeta * Ncoef;
    need(Ncoef, 1);
    need(M, 2);
    need(q, 2);
    if (l == 1) {
      need(X, 2);
      need(M - X, 2);
    }
    ncoef = (4 * Rr + 2) * M - 2 * X + 4 * Rr * q;
  }
  need(p.tau * ncoef, 2);

  // Degree granularity: smallest g with γg/r, (4/ζ)γg/r, (4(1−ξ)/ζ)γg/r and ξg integral.
  const Rational u = p.gamma / Rr;
  BigInt g = 1;
  for (const Rational& c : {u, 4 / p.zeta * u, 4 * (1 - p.xi) / p.zeta * u, p.xi})
    g = lcm_big(g, boost::multiprecision::denominator(c));

  BigInt N1 = G * ceil_div(scale_hint < 1 ? BigInt(1) : scale_hint, G);
  for (int iter = 0; iter < 200; ++iter) {
    p.N1 = N1;
    complete(p);
    if (boost::multiprecision::msb(to_int(p.n_total) + 1) > detail::kMaxBits)
      throw ParamError(ParamErrc::InfeasibleScale, "n exceeds the 8192-bit size cap");
    const double logn = log_big(to_int(p.n_total));
    BigInt prev = 0;
    for (int l = 1; l <= p.L; ++l) {
      const double target = std::exp(p.sigma[l - 1] * logn);
      BigInt want = target < 9e15 ? BigInt(static_cast<long long>(std::ceil(target)))
                                  : BigInt(std::ceil(target));
      BigInt k = std::max(ceil_div(want, g), prev / g + 1);
      p.d[l - 1] = k * g;
      prev = p.d[l - 1];
    }
    // Base-level feasibility: 2d_1 ≤ (1−ξ)N_1 and every D degree fits in a quarter ζN_1/4.
    const Rational d1(p.d[0]);
    const Rational unit = u * d1;
    const Rational T = d1 + Rr * unit;
    const Rational a_full = 4 / p.zeta * unit;
    const Rational Rres = T - Rr * a_full;
    Rational lower = 2 * d1 / (1 - p.xi);
    for (const Rational& deg : {Rres, unit, a_full, 4 * p.xi / p.zeta * unit})
      lower = std::max(lower, 4 * deg / p.zeta);
    const BigInt next = G * ceil_div(std::max(ceil_of(lower), N1), G);
    if (next == N1) break;
    N1 = next;
  }
  complete(p);
  ValidationReport rep = validate(p);
  if (!rep.ok)
    throw ParamError(ParamErrc::ValidationFailed, "paper parameters invalid:\n" + rep.to_string(), rep);
  return p;
}

// g(ℓ) = (L−ℓ+2)δ − 5 Σ_{i=ℓ}^{L} σ_i/σ_{i+1} − 5 Σ_{i=ℓ}^{L−1} σ_i.
inline double g(int ell, const ParamSet& p) {
  if (!p.delta) throw ParamError(ParamErrc::UndefinedInToyMode, "g is undefined without delta");
  if (ell < 1 || ell > p.L)
    throw ParamError(ParamErrc::PreconditionViolation, "ell out of range: " + std::to_string(ell));
  const double delta = to_double(*p.delta);
  double value = (p.L - ell + 2) * delta;
  for (int i = ell; i <= p.L; ++i) value -= 5.0 * p.sigma[i - 1] / p.sigma[i];
  for (int i = ell; i <= p.L - 1; ++i) value -= 5.0 * p.sigma[i - 1];
  return value;
}

// ---------------------------------------------------------------------------
// Key-value text format: one `key = value` per line, '#' starts a comment.

inline std::string to_kv(const ParamSet& p) {
  std::ostringstream os;
  os << "mode = " << (p.mode == Mode::PaperFaithful ? "paper" : "toy") << "\n";
  if (p.delta) os << "delta = " << to_string(*p.delta) << "\n";
  os << "L = " << p.L << "\n";
  os << "r = " << p.r << "\n";
  os << "d = ";
  for (std::size_t i = 0; i < p.d.size(); ++i) os << (i ? "," : "") << p.d[i].str();
  os << "\n";
  os << "N1 = " << p.N1.str() << "\n";
  os << "zeta = " << to_string(p.zeta) << "\n";
  os << "xi = " << to_string(p.xi) << "\n";
  os << "gamma = " << to_string(p.gamma) << "\n";
  os << "tau = " << to_string(p.tau) << "\n";
  return os.str();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Sets one primary field. Derived fields are stale until complete().
inline void apply_kv(ParamSet& p, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  auto as_int = [&]() {
    Rational x = parse_rational(value);
    if (!is_integral(x)) throw ParamError(ParamErrc::ParseError, key + " must be an integer");
    return to_int(x);
  };
  if (key == "mode") {
    if (value == "paper") p.mode = Mode::PaperFaithful;
    else if (value == "toy") p.mode = Mode::Toy;
    else throw ParamError(ParamErrc::ParseError, "mode must be paper or toy");
  } else if (key == "delta") {
    p.delta = parse_rational(value);
  } else if (key == "L") {
    p.L = as_int().convert_to<int>();
  } else if (key == "r") {
    p.r = as_int().convert_to<std::uint64_t>();
  } else if (key == "d") {
    p.d.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      Rational x = parse_rational(trim(item));
      if (!is_integral(x)) throw ParamError(ParamErrc::ParseError, "d entries must be integers");
      p.d.push_back(to_int(x));
    }
  } else if (key == "N1") {
    p.N1 = as_int();
  } else if (key == "zeta") {
    p.zeta = parse_rational(value);
  } else if (key == "xi") {
    p.xi = parse_rational(value);
  } else if (key == "gamma") {
    p.gamma = parse_rational(value);
  } else if (key == "tau") {
    p.tau = parse_rational(value);
  } else {
    throw ParamError(ParamErrc::ParseError, "unknown parameter key '" + key + "'");
  }
}

// Fills ζ, ξ, γ, τ with the asymptotic defaults when left unset (zero).
inline void default_ratios(ParamSet& p) {
  const Rational r(p.r);
  if (p.zeta == 0) p.zeta = 1 / (r * r);
  if (p.xi == 0) p.xi = 1 / (r * r);
  if (p.gamma == 0) p.gamma = 1 / (r * r * r);
  if (p.tau == 0 && p.L >= 1)
    p.tau = Rational(1) / Rational(boost::multiprecision::pow(BigInt(20) * p.r * p.r * p.r,
                                                              static_cast<unsigned>(p.L)));
}

inline ParamSet from_kv(const std::string& text) {
  ParamSet p;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParamError(ParamErrc::ParseError, "expected key = value: " + line);
    apply_kv(p, line.substr(0, eq), line.substr(eq + 1));
  }
  default_ratios(p);
  complete(p);
  return p;
}

inline bool operator==(const ParamSet& a, const ParamSet& b) { return to_kv(a) == to_kv(b); }

}  // namespace mmhard
