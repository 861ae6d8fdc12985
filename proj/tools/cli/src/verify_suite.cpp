#include "kovtop_cli/verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "kovtop/abel.hpp"
#include "kovtop/clebsch.hpp"
#include "kovtop/errors.hpp"
#include "kovtop/koetter.hpp"
#include "kovtop/kov_vars.hpp"
#include "kovtop/lax.hpp"
#include "kovtop/reference.hpp"
#include "kovtop/theta.hpp"
#include "kovtop_cli/transform.hpp"

namespace kovtop::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kPointStates = 100;
constexpr std::size_t kConservationTrajectories = 5;
constexpr std::size_t kFamilySize = 3;
// Point states and the constraint checks live on |m2| >= this, the floor of
// the state generator.
constexpr double kPointMinAbsM2 = 0.1;
constexpr double kCoarseDt = 0.02;
constexpr double kFineDt = 0.01;

void raise(double& acc, double v) {
  if (std::isnan(v) || v > acc) acc = std::isnan(v) ? kInf : v;
}

RealPoly abs_poly(const RealPoly& p) {
  std::vector<double> c = p.coeffs();
  for (auto& x : c) x = std::abs(x);
  return RealPoly(std::move(c));
}

// Sum of absolute values of the terms of the Lie-Poisson bracket; the size of
// what cancels when {F, G} = 0.
double bracket_scale(const Jet& f, const Jet& g, const EuclideanState& s) {
  static constexpr int kTriples[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                         {1, 0, 2}, {2, 1, 0}, {0, 2, 1}};
  double acc = 0;
  for (const auto& t : kTriples) {
    const int i = t[0], j = t[1], k = t[2];
    acc += std::abs(s.m(k)) * std::abs(f.grad[i]) * std::abs(g.grad[j]);
    acc += std::abs(s.n(k)) * (std::abs(f.grad[i]) * std::abs(g.grad[3 + j]) +
                               std::abs(f.grad[3 + i]) * std::abs(g.grad[j]));
  }
  return acc;
}

double relative(Complex residual, double scale) {
  return std::abs(residual) / std::max(1.0, scale);
}

class Context {
 public:
  explicit Context(const SuiteOptions& opt) : opt_(opt) {}

  std::uint64_t seed() const { return opt_.seed; }
  const SuiteOptions& options() const { return opt_; }

  IntegralSet constants(const IntegralSet& in) const {
    if (opt_.corrupt_h1 == 0) return in;
    return IntegralSet::from_constants(in.h1 + opt_.corrupt_h1, in.k2, in.c3,
                                       in.c4);
  }
  IntegralSet constants(const EuclideanState& s) const {
    return constants(integrals(s));
  }
  IntegralSet constants(const Trajectory& tr) const {
    return constants(tr.reference_integrals());
  }

  const std::vector<EuclideanState>& states() {
    if (!states_) {
      StateSampler sampler(opt_.seed + 1);
      states_.emplace();
      for (std::size_t k = 0; k < kPointStates; ++k)
        states_->push_back(sampler.next());
    }
    return *states_;
  }

  const std::vector<Trajectory>& conservation() {
    if (!conservation_) {
      conservation_.emplace();
      if (opt_.input) {
        conservation_->push_back(*opt_.input);
      } else {
        StateSampler sampler(opt_.seed);
        for (std::size_t k = 0; k < kConservationTrajectories; ++k)
          conservation_->push_back(integrate(sampler.next(), opt_.conservation));
      }
    }
    return *conservation_;
  }

  const std::vector<EuclideanState>& family() {
    if (!family_)
      family_ = reference::family_states(opt_.seed + 2, kFamilySize);
    return *family_;
  }

  const std::vector<Trajectory>& lax_family() {
    return family_at(lax_, reference::kLaxSampleDt);
  }
  const std::vector<Trajectory>& chart_family() {
    return family_at(chart_, reference::kChartSampleDt);
  }

  // (coarse, fine) pairs of the reference family for dt-halving.
  const std::vector<std::pair<Trajectory, Trajectory>>& halving() {
    if (!halving_) {
      halving_.emplace();
      for (const auto& s : family())
        halving_->emplace_back(integrate(s, reference::config(kCoarseDt)),
                               integrate(s, reference::config(kFineDt)));
    }
    return *halving_;
  }

  const std::vector<XySeries>& xy() {
    if (!xy_) {
      xy_.emplace();
      XyOptions o;
      o.min_window_abs_m2 = reference::kChartWindowMinAbsM2;
      for (const auto& tr : chart_family()) xy_->push_back(to_xy(tr, o));
    }
    return *xy_;
  }

  const std::vector<AbelJacobiStream>& abel() {
    if (!abel_) {
      abel_.emplace();
      AbelOptions o;
      o.min_window_abs_m2 = reference::kChartWindowMinAbsM2;
      for (const auto& tr : chart_family())
        abel_->push_back(abel_jacobi_stream(tr, o));
    }
    return *abel_;
  }

  const std::vector<ClebschSeries>& clebsch() {
    if (!clebsch_) {
      clebsch_.emplace();
      for (const auto& tr : chart_family())
        clebsch_->push_back(
            map_kovalevskaya(tr, reference::kChartWindowMinAbsM2));
    }
    return *clebsch_;
  }

 private:
  const std::vector<Trajectory>& family_at(
      std::optional<std::vector<Trajectory>>& slot, double dt) {
    if (!slot) {
      slot.emplace();
      if (opt_.input) {
        slot->push_back(*opt_.input);
      } else {
        for (const auto& s : family())
          slot->push_back(integrate(s, reference::config(dt)));
      }
    }
    return *slot;
  }

  const SuiteOptions& opt_;
  std::optional<std::vector<EuclideanState>> states_, family_;
  std::optional<std::vector<Trajectory>> conservation_, lax_, chart_;
  std::optional<std::vector<std::pair<Trajectory, Trajectory>>> halving_;
  std::optional<std::vector<XySeries>> xy_;
  std::optional<std::vector<AbelJacobiStream>> abel_;
  std::optional<std::vector<ClebschSeries>> clebsch_;
};

// Calls f(i) at interior samples whose stencil window keeps the chart bound;
// the others are counted as chart exclusions.
template <class F>
void for_window(const Trajectory& tr, CheckResult& r, F&& f) {
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (!tr.interior(i)) continue;
    if (window_min_abs_m2(tr, i) < reference::kChartWindowMinAbsM2) {
      ++r.excluded_chart;
      continue;
    }
    ++r.samples;
    f(i);
  }
}

// Calls f(i, fg) at samples with |m2| >= kPointMinAbsM2.
template <class F>
void for_chart(const Trajectory& tr, CheckResult& r, F&& f) {
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (std::abs(tr.state(i).m(1)) < kPointMinAbsM2) {
      ++r.excluded_chart;
      continue;
    }
    ++r.samples;
    f(i, to_fg(tr.state(i)));
  }
}

Vec6 fg_vector(const EuclideanState& s) {
  const FgCoords fg = to_fg(s);
  Vec6 v;
  v << fg.f, fg.g;
  return v;
}

// ---- criterion 1 ----------------------------------------------------------

void check_conservation(Context& c, CheckResult& r) {
  for (const auto& tr : c.conservation()) {
    raise(r.value, integral_drift(tr).max());
    r.samples += tr.size();
  }
  r.note = std::to_string(c.conservation().size()) + " trajectories";
}

// ---- criterion 2 ----------------------------------------------------------

void check_flow(Context& c, CheckResult& r) {
  const Observable H = observables::hamiltonian();
  for (const auto& s : c.states()) {
    const Vec6 d = eom(s);
    for (int k = 0; k < 6; ++k) {
      const Observable x = k < 3 ? observables::m(k) : observables::n(k - 3);
      raise(r.value, std::abs(poisson_bracket(H, x, s) - d(k)));
    }
    ++r.samples;
  }
}

// ---- criterion 3 ----------------------------------------------------------

void check_lax3_invariants(Context& c, CheckResult& r) {
  for (const auto& s : c.states()) {
    const IntegralSet in = c.constants(s);
    const Mat3 L = build_l2_m2(s).L2;
    raise(r.value, std::abs(L.trace() - 2 * in.h1));
    raise(r.value, std::abs(det_l2_block(L) - in.h2));
    ++r.samples;
  }
}

void check_lax3_residual(Context& c, CheckResult& r) {
  for (const auto& tr : c.lax_family())
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (!tr.interior(i)) continue;
      raise(r.value, lax_residual(tr, LaxKind::three_by_three, tr.time(i)));
      ++r.samples;
    }
  r.note = "sample_dt " + format_double(c.lax_family().front().sample_dt());
}

void check_lax3_isospectral(Context& c, CheckResult& r) {
  for (const auto& tr : c.lax_family()) {
    const auto c0 = isospectral_coefficients(tr.state(0));
    for (const auto& s : tr.states()) {
      const auto ck = isospectral_coefficients(s);
      for (int k = 0; k < 2; ++k)
        raise(r.value,
              std::abs(ck[k] - c0[k]) / std::max(1.0, std::abs(c0[k])));
      ++r.samples;
    }
  }
}

// Smallest observed order log2(r(dt) / r(dt/2)) over the family, where r is
// the max residual over the coarse-grid times.
template <class Residual>
double halving_order(Context& c, CheckResult& r, bool window,
                     Residual&& residual) {
  double order = kInf;
  for (const auto& [coarse, fine] : c.halving()) {
    double rc = 0, rf = 0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      if (!coarse.interior(i)) continue;
      if (window &&
          window_min_abs_m2(coarse, i) < reference::kChartWindowMinAbsM2) {
        ++r.excluded_chart;
        continue;
      }
      const double t = coarse.time(i);
      raise(rc, residual(coarse, t));
      raise(rf, residual(fine, t));
      ++r.samples;
    }
    order = std::min(order, rf > 0 ? std::log2(rc / rf) : kInf);
  }
  return order;
}

void check_lax3_convergence(Context& c, CheckResult& r) {
  r.value = halving_order(c, r, false, [](const Trajectory& tr, double t) {
    return lax_residual(tr, LaxKind::three_by_three, t);
  });
  r.note = "sample_dt " + format_double(kCoarseDt) + " vs " +
           format_double(kFineDt);
}

// ---- criterion 4 ----------------------------------------------------------

void check_chart_constraints(Context& c, CheckResult& r) {
  auto one = [&r](const FgCoords& fg) {
    raise(r.value, std::abs(fg.unit_residual()));
    raise(r.value, std::abs(fg.orthogonality_residual()));
  };
  for (const auto& s : c.states()) {
    one(to_fg(s));
    ++r.samples;
  }
  for (const auto& tr : c.chart_family())
    for_chart(tr, r, [&](std::size_t, const FgCoords& fg) { one(fg); });
}

void check_split(Context& c, CheckResult& r) {
  auto one = [&r](const FgCoords& fg, const IntegralSet& in,
                  const IntegralSet& truth) {
    const SpectralVars sv = s_forms(fg, in);
    raise(r.value, std::abs(sv.S1 + sv.T1 - 2 * truth.h1));
    raise(r.value, std::abs(sv.S2 + sv.T2 - truth.h2));
  };
  for (const auto& s : c.states()) {
    one(to_fg(s), c.constants(s), integrals(s));
    ++r.samples;
  }
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    for_chart(tr, r, [&](std::size_t i, const FgCoords& fg) {
      one(fg, in, integrals(tr.state(i)));
    });
  }
}

// ---- criterion 5 ----------------------------------------------------------

void note_absolute(CheckResult& r, double absolute) {
  r.note = "scaled by the bracket term size; max |bracket| " +
           format_double(absolute);
}

void check_bracket_s1s2(Context& c, CheckResult& r) {
  double abs_max = 0;
  for (const auto& s : c.states()) {
    try {
      const Jet a = observables::s1()(s), b = observables::s2()(s);
      const Complex v = poisson_bracket(a, b, s);
      raise(r.value, relative(v, bracket_scale(a, b, s)));
      raise(abs_max, std::abs(v));
      ++r.samples;
    } catch (const RootCollision&) {
      ++r.excluded_collision;
    }
  }
  note_absolute(r, abs_max);
}

void check_bracket_t1t2(Context& c, CheckResult& r) {
  double abs_max = 0;
  for (const auto& s : c.states()) {
    const Jet a = observables::T1()(s), b = observables::T2()(s);
    const Complex v = poisson_bracket(a, b, s);
    raise(r.value, relative(v, bracket_scale(a, b, s)));
    raise(abs_max, std::abs(v));
    ++r.samples;
  }
  note_absolute(r, abs_max);
}

void check_bracket_mixed(Context& c, CheckResult& r) {
  double abs_max = 0;
  for (const auto& s : c.states()) {
    const Jet h1 = observables::h1_jet(s), h2 = observables::h2_jet(s);
    const Jet S1 = observables::S1()(s), S2 = observables::S2()(s);
    const Complex v =
        2.0 * poisson_bracket(h1, S2, s) - poisson_bracket(h2, S1, s);
    const double scale =
        2 * bracket_scale(h1, S2, s) + bracket_scale(h2, S1, s);
    raise(r.value, relative(v, scale));
    raise(abs_max, std::abs(v));
    ++r.samples;
  }
  note_absolute(r, abs_max);
}

void check_bracket_lambda(Context& c, CheckResult& r) {
  double abs_max = 0;
  for (const auto& s : c.states()) {
    for (double lambda : kDefaultLambdas) {
      const Jet a = observables::S1_lambda(lambda)(s);
      const Jet b = observables::S2_lambda(lambda)(s);
      const Complex v = poisson_bracket(a, b, s);
      raise(r.value, relative(v, bracket_scale(a, b, s)));
      raise(abs_max, std::abs(v));
    }
    ++r.samples;
  }
  note_absolute(r, abs_max);
  r.note += "; lambda in {0, 1, -1, 5}";
}

// ---- criterion 6 ----------------------------------------------------------

void check_pushforward(Context& c, CheckResult& r) {
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    for_window(tr, r, [&](std::size_t i) {
      const Vec6 d = time_derivative(tr, i, fg_vector);
      const FgRates rates = fg_eom(to_fg(tr.state(i)), in);
      Vec6 e;
      e << rates.df, rates.dg;
      raise(r.value, (d - e).cwiseAbs().maxCoeff());
    });
  }
}

void check_f2_forms(Context& c, CheckResult& r) {
  for (const auto& s : c.states()) {
    const FgRates rates = fg_eom(to_fg(s), c.constants(s));
    raise(r.value, std::abs(rates.df(1) - rates.df2_alt));
    ++r.samples;
  }
}

double second_derivative_max(const Trajectory& tr, std::size_t i,
                             const IntegralSet& in) {
  const Vec3 d2 = second_time_derivative(
      tr, i, [](const EuclideanState& s) { return Vec3(to_fg(s).f); });
  const Vec3 rhs = fg_second_derivative(to_fg(tr.state(i)), in);
  return (d2 - rhs).cwiseAbs().maxCoeff();
}

void check_second_derivative(Context& c, CheckResult& r) {
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    for_window(tr, r, [&](std::size_t i) {
      raise(r.value, second_derivative_max(tr, i, in));
    });
  }
}

void check_second_derivative_convergence(Context& c, CheckResult& r) {
  r.value = halving_order(c, r, true, [&](const Trajectory& tr, double t) {
    return second_derivative_max(tr, tr.interior_index(t), c.constants(tr));
  });
  r.note = "sample_dt " + format_double(kCoarseDt) + " vs " +
           format_double(kFineDt);
}

// ---- criterion 7 ----------------------------------------------------------

void small_lax(Context& c, CheckResult& r, LaxKind kind) {
  for (const auto& tr : c.chart_family())
    for_window(tr, r, [&](std::size_t i) {
      try {
        raise(r.value, lax_residual(tr, kind, tr.time(i)));
      } catch (const ConstraintViolation&) {
        --r.samples;
        ++r.excluded_other;
      }
    });
}

void check_lax_f(Context& c, CheckResult& r) {
  small_lax(c, r, LaxKind::small_f);
}
void check_lax_g(Context& c, CheckResult& r) {
  small_lax(c, r, LaxKind::small_g);
}

void check_det_l(Context& c, CheckResult& r) {
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    for_chart(tr, r, [&](std::size_t, const FgCoords& fg) {
      raise(r.value,
            std::abs(build_small_lax(fg, in, kInf).L.determinant() - 1));
    });
  }
}

// ---- criterion 8 ----------------------------------------------------------

void check_koetter(Context& c, CheckResult& r) {
  const RealPoly two_s{0.0, 2.0};
  for (const auto& s : c.states()) {
    const FgCoords fg = to_fg(s);
    const IntegralSet in = c.constants(s);
    const KovPolynomials polys = build_polynomials(in, fg);
    const SpectralVars sv = s_forms(fg, in);
    const RealPoly scale = two_s * abs_poly(spectral_f_poly(sv)) +
                           abs_poly(polys.q2) * abs_poly(polys.q2) +
                           abs_poly(polys.p3) * abs_poly(polys.q1);
    raise(r.value, koetter_coefficient_residual(polys, sv).max_abs() /
                       std::max(1.0, scale.max_abs()));
    ++r.samples;
  }
  r.note = "relative to the largest coefficient of the cancelling terms";
}

void check_p5(Context& c, CheckResult& r) {
  for (const auto& s : c.states()) {
    const IntegralSet in = c.constants(s);
    const KovPolynomials polys = build_polynomials(in, to_fg(s));
    const RealPoly scale = abs_poly(polys.p3) * abs_poly(polys.p2);
    raise(r.value, (polys.p5 - p5_expanded(in)).max_abs() /
                       std::max(1.0, scale.max_abs()));
    ++r.samples;
  }
  r.note = "P3 * P2 against the expanded product, relative to its size";
}

// ---- criterion 9 ----------------------------------------------------------

void xy_counts(const XySeries& xs, CheckResult& r) {
  r.samples += xs.samples.size();
  r.excluded_chart += xs.excluded_chart;
  r.excluded_collision += xs.excluded_collision;
}

void check_x_squared(Context& c, CheckResult& r) {
  for (const auto& xs : c.xy()) {
    raise(r.value, xs.max_eq47);
    xy_counts(xs, r);
  }
}

void check_node_relation(Context& c, CheckResult& r) {
  for (const auto& xs : c.xy()) {
    raise(r.value, xs.max_eq55);
    xy_counts(xs, r);
  }
}

void check_roundtrip_f(Context& c, CheckResult& r) {
  const auto& family = c.chart_family();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const XySeries& xs = c.xy()[k];
    xy_counts(xs, r);
    for (const auto& smp : xs.samples) {
      const FgCoords fg = to_fg(family[k].state(smp.index));
      try {
        raise(r.value,
              (from_x(smp.x, xs.branches) - fg.f).cwiseAbs().maxCoeff());
      } catch (const NumericalFailure&) {
        r.value = kInf;
      }
    }
  }
}

void check_roundtrip_g(Context& c, CheckResult& r) {
  const auto& family = c.chart_family();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const XySeries& xs = c.xy()[k];
    r.excluded_chart += xs.excluded_chart;
    r.excluded_collision += xs.excluded_collision;
    r.excluded_other += xs.y48_unchecked;
    for (const auto& smp : xs.samples) {
      if (!smp.y48_checked) continue;
      ++r.samples;
      const FgCoords fg = to_fg(family[k].state(smp.index));
      try {
        raise(r.value,
              (from_y(smp.y48, xs.branches) - fg.g).cwiseAbs().maxCoeff());
      } catch (const NumericalFailure&) {
        r.value = kInf;
      }
    }
  }
  r.note = "y from the difference quotient; samples with s_i near a root "
           "a_k counted as other exclusions";
}

void check_branch_continuity(Context& c, CheckResult& r) {
  double jumps = 0;
  for (const auto& xs : c.xy()) {
    jumps += static_cast<double>(xs.branch_jumps);
    xy_counts(xs, r);
  }
  r.value = jumps;
}

// ---- criterion 10 ---------------------------------------------------------

void check_clebsch_selffit(Context& c, CheckResult& r) {
  std::mt19937_64 eng(c.seed() + 5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ClebschState st;
  for (int k = 0; k < 3; ++k) st.p(k) = u(eng);
  for (int k = 0; k < 3; ++k) st.l(k) = u(eng);
  st.l -= (st.lp() / st.pp()) * st.p;
  const CVec3 b(0.3, -0.7, 1.1);
  st.B = b.asDiagonal();
  const Dopri5Options opt{10.0, 1e-12, 1e-14, 0.01, 10'000'000};
  const ClebschSeries series = series_from(integrate_clebsch(st, opt));
  const ClebschFit fit = fit_diagonal_b(series);
  r.value = (fit.B - trace_free(b)).cwiseAbs().maxCoeff();
  r.samples = fit.samples;
  r.note = "B = diag(0.3, -0.7, 1.1), trace-free gauge; fit residual " +
           format_double(fit.residual());
}

void check_clebsch_fit(Context& c, CheckResult& r) {
  for (const auto& s : c.clebsch()) {
    const ClebschFit fit = fit_diagonal_b(s);
    raise(r.value, fit.residual());
    r.samples += s.size();
    r.excluded_chart += s.excluded;
  }
}

void check_clebsch_window(Context& c, CheckResult& r) {
  for (const auto& s : c.clebsch()) {
    const std::size_t half = s.size() / 2;
    const ClebschFit a = fit_diagonal_b(s.slice(0, half));
    const ClebschFit b = fit_diagonal_b(s.slice(half, s.size()));
    const ClebschFit all = fit_diagonal_b(s);
    raise(r.value, (a.B - b.B).cwiseAbs().maxCoeff() /
                       std::max(1.0, all.B.cwiseAbs().maxCoeff()));
    r.samples += s.size();
    r.excluded_chart += s.excluded;
  }
  r.note = "first against second half of the usable samples";
}

void check_lp(Context& c, CheckResult& r) {
  double unit = 0;
  for (const auto& s : c.clebsch()) {
    raise(r.value, s.max_lp);
    raise(unit, s.max_unit_p);
    r.samples += s.size();
    r.excluded_chart += s.excluded;
  }
  r.note = "max |(p, p) - 1| " + format_double(unit);
}

// ---- criterion 11 ---------------------------------------------------------

void check_eq60_stencil(Context& c, CheckResult& r) {
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    for_window(tr, r, [&](std::size_t i) {
      const SpectralVars sv = s_forms(to_fg(tr.state(i)), in);
      const WeierstrassTriple w = build_fgh(sv, sdot_stencil(tr, i), in);
      raise(r.value, eq60_relative_residual(w, in));
    });
  }
}

void check_eq60_bracket(Context& c, CheckResult& r) {
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    for_window(tr, r, [&](std::size_t i) {
      const EuclideanState& s = tr.state(i);
      const WeierstrassTriple w =
          build_fgh(s_forms(to_fg(s), in), sdot_bracket(s), in);
      raise(r.value, eq60_relative_residual(w, in));
    });
  }
}

void check_abel(Context& c, CheckResult& r) {
  for (const auto& st : c.abel()) {
    raise(r.value, st.max_residual());
    r.samples += st.checked();
    r.excluded_chart += st.excluded_chart;
    r.excluded_collision += st.excluded_collision;
    r.excluded_other += st.near_branch;
  }
  r.note = "all checked interior samples; near-branch samples excluded";
}

void check_u1(Context& c, CheckResult& r) {
  for (const auto& st : c.abel()) {
    const AbelIncrements inc = abel_increments(st);
    raise(r.value, inc.max_u1_drift());
    for (const auto& seg : inc.segments) r.samples += seg.t.size();
    r.excluded_other += inc.rejected_gaps;
  }
  r.note = "per segment; other exclusions are rejected gaps";
}

void check_u2(Context& c, CheckResult& r) {
  for (const auto& st : c.abel()) {
    const AbelIncrements inc = abel_increments(st);
    raise(r.value, inc.max_slope_error());
    for (const auto& seg : inc.segments) r.samples += seg.t.size();
    r.excluded_other += inc.rejected_gaps;
  }
  r.note = "|du2/dt - i| per segment";
}

// ---- criterion 12 ---------------------------------------------------------

constexpr std::size_t kSpectralStride = 10;
constexpr std::size_t kSpectralS = 5;
constexpr std::size_t kCommutatorTimes = 20;

void check_spectral_det(Context& c, CheckResult& r) {
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    const RealPoly p5 = p5_expanded(in);
    std::size_t seen = 0;
    for_window(tr, r, [&](std::size_t i) {
      if (seen++ % kSpectralStride != 0) {
        --r.samples;
        return;
      }
      const EuclideanState& s = tr.state(i);
      const SpectralVars sv = s_forms(to_fg(s), in);
      const WeierstrassTriple w = build_fgh(sv, sdot_bracket(s), in);
      const std::array<Complex, 2> avoid{sv.s1, sv.s2};
      for (Complex z : spectral_points(c.seed() + 3 + i, kSpectralS, avoid)) {
        try {
          const Complex two_p5 = 2.0 * p5(z);
          raise(r.value, relative(spectral_lax(w, sv.T1, z).det - two_p5,
                                  std::abs(two_p5)));
        } catch (const RootCollision&) {
          ++r.excluded_collision;
        }
      }
    });
  }
  r.note = "every " + std::to_string(kSpectralStride) + "th usable sample, " +
           std::to_string(kSpectralS) + " points s each";
}

void check_spectral_isospectral(Context& c, CheckResult& r) {
  const std::vector<Complex> pts =
      spectral_points(c.seed() + 3, kSpectralS, std::span<const Complex>{});
  for (const auto& tr : c.chart_family()) {
    const IntegralSet in = c.constants(tr);
    std::vector<std::optional<Complex>> first(pts.size());
    for_window(tr, r, [&](std::size_t i) {
      const SpectralVars sv = s_forms(to_fg(tr.state(i)), in);
      const WeierstrassTriple w = build_fgh(sv, sdot_stencil(tr, i), in);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        try {
          const Complex d = spectral_lax(w, sv.T1, pts[k]).det;
          if (!first[k]) first[k] = d;
          raise(r.value, relative(d - *first[k], std::abs(*first[k])));
        } catch (const RootCollision&) {
          ++r.excluded_collision;
        }
      }
    });
  }
  r.note = "det L(s) with stencil rates against its first usable value";
}

void check_spectral_commutator(Context& c, CheckResult& r) {
  std::vector<std::pair<std::size_t, std::size_t>> usable;  // (traj, sample)
  const auto& family = c.chart_family();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const Trajectory& tr = family[k];
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (!tr.interior(i)) continue;
      if (window_min_abs_m2(tr, i) < reference::kChartWindowMinAbsM2)
        ++r.excluded_chart;
      else
        usable.emplace_back(k, i);
    }
  }
  if (usable.empty()) {
    r.value = kInf;
    r.note = "no usable samples";
    return;
  }
  const std::size_t n = std::min(kCommutatorTimes, usable.size());
  for (std::size_t q = 0; q < n; ++q) {
    const auto [k, i] = usable[(q * usable.size()) / n];
    const Trajectory& tr = family[k];
    const SpectralVars sv =
        s_forms(to_fg(tr.state(i)), tr.reference_integrals());
    const std::array<Complex, 2> avoid{sv.s1, sv.s2};
    for (Complex z : spectral_points(c.seed() + 3 + q, kSpectralS, avoid)) {
      try {
        raise(r.value, spectral_lax_residual(tr, i, z));
        ++r.samples;
      } catch (const RootCollision&) {
        ++r.excluded_collision;
      }
    }
  }
  r.note = std::to_string(n) + " times x " + std::to_string(kSpectralS) +
           " points s";
}

// ---- criterion 13 ---------------------------------------------------------

struct ThetaSample {
  CVec2 u;
  PeriodMatrix tau;
};

std::vector<ThetaSample> theta_samples(std::uint64_t seed, std::size_t count,
                                       bool diagonal) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im_u(-0.25, 0.25),
      diag(0.8, 1.2), off(-0.2, 0.2);
  std::vector<ThetaSample> out;
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::Matrix2cd t;
    const double b = diagonal ? 0.0 : off(eng);
    const double rb = diagonal ? 0.0 : re(eng);
    t(0, 0) = Complex(re(eng), diag(eng));
    t(1, 1) = Complex(re(eng), diag(eng));
    t(0, 1) = t(1, 0) = Complex(rb, b);
    CVec2 u;
    u(0) = Complex(re(eng), im_u(eng));
    u(1) = Complex(re(eng), im_u(eng));
    out.push_back({u, PeriodMatrix(t)});
  }
  return out;
}

constexpr std::size_t kThetaPoints = 10;

ThetaConfig theta_config() {
  ThetaConfig cfg;
  cfg.N = 8;
  cfg.auto_raise = false;
  return cfg;
}

Complex theta(std::string_view name, const CVec2& u, const PeriodMatrix& tau) {
  return theta_eval(named_characteristic(name), u, tau, theta_config()).value;
}

template <class F>
void theta_loop(Context& c, CheckResult& r, bool diagonal, F&& f) {
  try {
    for (const auto& smp : theta_samples(c.seed() + 4, kThetaPoints, diagonal))
      for (auto name : kCharacteristicNames) {
        f(name, smp);
        ++r.samples;
      }
  } catch (const NumericalFailure& e) {
    r.value = kInf;
    r.note = e.what();
  }
}

void check_characteristics(Context&, CheckResult& r) {
  struct Row {
    const char* name;
    Characteristic ch;
  };
  const Row table[] = {{"theta1", {{1, 0}, {1, 1}}},
                       {"theta2", {{0, 1}, {0, 1}}},
                       {"theta3", {{1, 1}, {1, 0}}},
                       {"theta14", {{0, 0}, {0, 1}}},
                       {"theta24", {{1, 1}, {1, 1}}},
                       {"theta34", {{0, 1}, {0, 0}}},
                       {"theta0", {{0, 0}, {0, 0}}}};
  double mismatches = 0;
  for (const auto& row : table) {
    if (!(named_characteristic(row.name) == row.ch)) mismatches += 1;
    ++r.samples;
  }
  r.value = mismatches;
}

void check_odd_vanishing(Context& c, CheckResult& r) {
  const CVec2 zero = CVec2::Zero();
  theta_loop(c, r, false, [&](std::string_view name, const ThetaSample& s) {
    if (named_characteristic(name).odd())
      raise(r.value, std::abs(theta(name, zero, s.tau)));
  });
}

void check_parity(Context& c, CheckResult& r) {
  theta_loop(c, r, false, [&](std::string_view name, const ThetaSample& s) {
    const double sign = named_characteristic(name).odd() ? -1.0 : 1.0;
    const Complex v = theta(name, s.u, s.tau);
    raise(r.value, relative(theta(name, -s.u, s.tau) - sign * v, std::abs(v)));
  });
  r.note = "relative to max(1, |theta|)";
}

void check_quasi_one(Context& c, CheckResult& r) {
  theta_loop(c, r, false, [&](std::string_view name, const ThetaSample& s) {
    const Characteristic ch = named_characteristic(name);
    const Complex v = theta(name, s.u, s.tau);
    for (int l = 0; l < 2; ++l) {
      CVec2 w = s.u;
      w(l) += 1.0;
      const Complex factor =
          std::exp(Complex(0, std::numbers::pi * ch.eps[l]));
      raise(r.value, relative(theta(name, w, s.tau) - factor * v, std::abs(v)));
    }
  });
  r.note = "relative to max(1, |theta|)";
}

void check_quasi_tau(Context& c, CheckResult& r) {
  theta_loop(c, r, false, [&](std::string_view name, const ThetaSample& s) {
    const Characteristic ch = named_characteristic(name);
    const Complex v = theta(name, s.u, s.tau);
    const auto& t = s.tau.tau();
    for (int l = 0; l < 2; ++l) {
      const CVec2 w = s.u + t.col(l);
      const Complex factor =
          std::exp(Complex(0, -std::numbers::pi) *
                   (t(l, l) + 2.0 * s.u(l) + static_cast<double>(ch.delta[l])));
      const Complex shifted = theta(name, w, s.tau);
      raise(r.value, relative(shifted - factor * v,
                              std::max(std::abs(shifted), std::abs(v))));
    }
  });
  r.note = "relative to max(1, |theta|)";
}

// Genus-1 series with characteristic [e; d], summed independently of the
// genus-2 evaluator.
Complex theta_genus1(int e, int d, Complex z, Complex t) {
  Complex acc = 0;
  for (int n = -40; n <= 40; ++n) {
    const double k = n + 0.5 * e;
    acc += std::exp(Complex(0, std::numbers::pi) *
                    (k * k * t + k * (2.0 * z + static_cast<double>(d))));
  }
  return acc;
}

void check_factorization(Context& c, CheckResult& r) {
  theta_loop(c, r, true, [&](std::string_view name, const ThetaSample& s) {
    const Characteristic ch = named_characteristic(name);
    const auto& t = s.tau.tau();
    const Complex product =
        theta_genus1(ch.eps[0], ch.delta[0], s.u(0), t(0, 0)) *
        theta_genus1(ch.eps[1], ch.delta[1], s.u(1), t(1, 1));
    raise(r.value,
          relative(theta(name, s.u, s.tau) - product, std::abs(product)));
  });
  r.note = "diagonal tau against a product of genus-1 series";
}

// ---- criterion 14 ---------------------------------------------------------

std::string simulate_bytes(const Trajectory& tr, const RunInfo& info) {
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  os << dump(sidecar_json(tr, info));
  write_transform_csv(os, transform(tr));
  return os.str();
}

void check_determinism(Context& c, CheckResult& r) {
  const RunInfo info{c.seed(), c.options().conservation};
  std::string out[2];
  for (auto& o : out) {
    StateSampler sampler(c.seed());
    o = simulate_bytes(integrate(sampler.next(), info.config), info);
  }
  r.value = out[0] == out[1] ? 0.0 : 1.0;
  r.samples = 2;
  r.note = "trajectory CSV, sidecar JSON and transform CSV, " +
           std::to_string(out[0].size()) + " bytes";
}

// ---- registry -------------------------------------------------------------

struct Entry {
  CheckInfo info;
  double threshold;
  Comparison comparison;
  std::function<void(Context&, CheckResult&)> run;
};

const std::vector<Entry>& registry() {
  using C = Comparison;
  static const std::vector<Entry> entries = {
      {{"Eq7-10-conservation", 1, "relative drift of h1, k2, c3, c4"},
       1e-8, C::less, check_conservation},
      {{"Eq4-5-hamiltonian-flow", 2, "eom against the bracket flow {H, x}"},
       1e-12, C::less, check_flow},
      {{"Eq14-lax3-trace-det", 3, "trace L2 = 2 h1, det of the L2 block = h2"},
       1e-10, C::less, check_lax3_invariants},
      {{"Eq12-lax3-residual", 3, "stencil dL2/dt - [L2, M2]"},
       1e-6, C::less, check_lax3_residual},
      {{"Eq15-lax3-isospectral", 3, "drift of the coefficients of det(sI - L2)"},
       1e-8, C::less, check_lax3_isospectral},
      {{"Eq12-lax3-convergence", 3, "observed stencil order under dt halving"},
       3.5, C::at_least, check_lax3_convergence},
      {{"Eq32-chart-constraints", 4, "f1 f3 - f2^2 = 1 and f1 g3 + 2 f2 g2 + f3 g1 = 0"},
       1e-10, C::less, check_chart_constraints},
      {{"Eq20-split", 4, "S1 + T1 = 2 h1 and S2 + T2 = h2"},
       1e-8, C::less, check_split},
      {{"Eq29-bracket-s1s2", 5, "{s1, s2} with analytic gradients"},
       1e-8, C::less, check_bracket_s1s2},
      {{"Eq30-bracket-T1T2", 5, "{T1, T2}"},
       1e-8, C::less, check_bracket_t1t2},
      {{"Eq30-mixed-H1S2-H2S1", 5, "2 {H1, S2} - {H2, S1}"},
       1e-8, C::less, check_bracket_mixed},
      {{"Eq31-lambda-family", 5, "{S1(lambda), S2(lambda)}"},
       1e-8, C::less, check_bracket_lambda},
      {{"Eq33-34-pushforward", 6, "stencil d(f, g)/dt against the chart equations"},
       1e-6, C::less, check_pushforward},
      {{"Eq33-f2dot-forms", 6, "the two forms of df2/dt"},
       1e-10, C::less, check_f2_forms},
      {{"Eq35-38-second-derivative", 6, "stencil f'' against the second-order equations"},
       1e-5, C::less, check_second_derivative},
      {{"Eq35-38-convergence", 6, "observed stencil order under dt halving"},
       3.5, C::at_least, check_second_derivative_convergence},
      {{"Eq39-lax-small-f", 7, "dL/dt - [L, M]"},
       1e-6, C::less, check_lax_f},
      {{"Eq41-lax-small-g", 7, "dM/dt - [L, N]"},
       1e-6, C::less, check_lax_g},
      {{"Eq40-det-L", 7, "det L = 1"},
       1e-8, C::less, check_det_l},
      {{"Eq45-koetter-identity", 8, "-2 s F = Q2^2 - P3 Q1 coefficientwise"},
       1e-10, C::less, check_koetter},
      {{"Eq46-P5-convolution", 8, "P5 = P3 P2"},
       1e-14, C::less, check_p5},
      {{"Eq47-x-squared", 9, "x_j^2 = (s1 - a_j)(s2 - a_j)"},
       1e-8, C::less, check_x_squared},
      {{"Eq55-node-relation", 9, "Q2(a_j) = i sqrt(2 a_j) x_j"},
       1e-8, C::less, check_node_relation},
      {{"Eq49-51-roundtrip-f", 9, "f -> x -> f"},
       1e-7, C::less, check_roundtrip_f},
      {{"Eq52-54-roundtrip-g", 9, "g -> y -> g"},
       1e-6, C::less, check_roundtrip_g},
      {{"Eq48-branch-continuity", 9, "unexplained jumps in x and y"},
       0.0, C::equal_zero, check_branch_continuity},
      {{"Eq44-clebsch-selffit", 10, "B recovered from a synthetic Clebsch run"},
       1e-6, C::less, check_clebsch_selffit},
      {{"Eq44-clebsch-fit", 10, "Clebsch equations on the Koetter image"},
       1e-5, C::less, check_clebsch_fit},
      {{"Eq44-clebsch-window", 10, "B agreement between window halves"},
       1e-5, C::less, check_clebsch_window},
      {{"Eq32-lp-orthogonality", 10, "(l, p) on the mapped stream"},
       1e-7, C::less, check_lp},
      {{"Eq60-FH-G2", 11, "F H - G^2 = 2 P5 with stencil rates"},
       1e-6, C::less, check_eq60_stencil},
      {{"Eq60-FH-G2-bracket", 11, "F H - G^2 = 2 P5 with bracket rates"},
       1e-10, C::less, check_eq60_bracket},
      {{"Eq66-abel-jacobi", 11, "s_i' = i (s_i - s_j)^-1 sqrt(2 P5(s_i))"},
       1e-5, C::less, check_abel},
      {{"Eq66-u1-constant", 11, "drift of u1"},
       1e-5, C::less, check_u1},
      {{"Eq66-u2-slope", 11, "du2/dt = i"},
       1e-5, C::less, check_u2},
      {{"Eq68-det-2P5", 12, "det L(s) = 2 P5(s)"},
       1e-6, C::less, check_spectral_det},
      {{"Eq68-isospectral", 12, "drift of det L(s) along the flow"},
       1e-5, C::less, check_spectral_isospectral},
      {{"Eq67-spectral-lax", 12, "dL(s)/dt - [L(s), M(s)]"},
       1e-5, C::less, check_spectral_commutator},
      {{"Eq57-characteristics", 13, "named characteristics table"},
       0.0, C::equal_zero, check_characteristics},
      {{"Eq58-odd-vanishing", 13, "odd theta at u = 0"},
       1e-12, C::less, check_odd_vanishing},
      {{"Eq58-parity", 13, "theta(-u) = (-1)^(eps.delta) theta(u)"},
       1e-12, C::less, check_parity},
      {{"Eq58-quasi-period-1", 13, "theta(u + e_l) = exp(i pi eps_l) theta(u)"},
       1e-12, C::less, check_quasi_one},
      {{"Eq58-quasi-period-tau", 13, "theta(u + tau e_l) law"},
       1e-12, C::less, check_quasi_tau},
      {{"Eq58-diagonal-factorization", 13, "diagonal tau factorizes"},
       1e-12, C::less, check_factorization},
      {{"Det-simulate-bytes", 14, "two seeded runs give identical bytes"},
       0.0, C::equal_zero, check_determinism},
  };
  return entries;
}

bool passes(const CheckResult& r) {
  if (std::isnan(r.value)) return false;
  switch (r.comparison) {
    case Comparison::less:
      return r.value < r.threshold;
    case Comparison::equal_zero:
      return r.value == 0.0;
    case Comparison::at_least:
      return r.value >= r.threshold;
  }
  return false;
}

bool selected(const std::string& tag, const std::vector<std::string>& only) {
  if (only.empty()) return true;
  return std::any_of(only.begin(), only.end(), [&](const std::string& p) {
    return tag.compare(0, p.size(), p) == 0;
  });
}

}  // namespace

const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::less:
      return "<";
    case Comparison::equal_zero:
      return "==";
    case Comparison::at_least:
      return ">=";
  }
  return "?";
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> catalog = [] {
    std::vector<CheckInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return catalog;
}

VerificationReport run_suite(const SuiteOptions& opt) {
  for (const auto& p : opt.only) {
    const bool hit = std::any_of(
        registry().begin(), registry().end(),
        [&](const Entry& e) { return selected(e.info.tag, {p}); });
    if (!hit) throw ConfigError("--only '" + p + "' matches no check");
  }
  VerificationReport report;
  report.seed = opt.seed;
  report.source = opt.input ? opt.input_name : "seeded";
  Context ctx(opt);
  for (const auto& e : registry()) {
    if (!selected(e.info.tag, opt.only)) continue;
    CheckResult r;
    r.tag = e.info.tag;
    r.criterion = e.info.criterion;
    r.description = e.info.description;
    r.threshold = e.threshold;
    r.comparison = e.comparison;
    try {
      e.run(ctx, r);
    } catch (const Error& err) {
      r.value = kInf;
      r.note = std::string("aborted: ") + err.what();
    }
    r.pass = passes(r);
    report.checks.push_back(std::move(r));
  }
  return report;
}

Json report_json(const VerificationReport& report) {
  Json j;
  j["seed"] = report.seed;
  j["source"] = report.source;
  j["all_pass"] = report.all_pass();
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json e;
    e["tag"] = c.tag;
    e["criterion"] = c.criterion;
    e["description"] = c.description;
    if (std::isfinite(c.value))
      e["value"] = c.value;
    else
      e["value"] = format_double(c.value);
    e["comparison"] = to_string(c.comparison);
    e["threshold"] = c.threshold;
    e["pass"] = c.pass;
    e["samples"] = c.samples;
    e["excluded_chart"] = c.excluded_chart;
    e["excluded_collision"] = c.excluded_collision;
    e["excluded_other"] = c.excluded_other;
    e["note"] = c.note;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

VerificationReport report_from_json(const Json& j) {
  try {
    VerificationReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.source = j.at("source").get<std::string>();
    for (const auto& e : j.at("checks")) {
      CheckResult c;
      c.tag = e.at("tag").get<std::string>();
      c.criterion = e.at("criterion").get<int>();
      c.description = e.at("description").get<std::string>();
      const auto& v = e.at("value");
      c.value = v.is_string() ? parse_double(v.get<std::string>())
                              : v.get<double>();
      const std::string cmp = e.at("comparison").get<std::string>();
      c.comparison = cmp == "<"    ? Comparison::less
                     : cmp == "==" ? Comparison::equal_zero
                     : cmp == ">=" ? Comparison::at_least
                                   : throw ConfigError("bad comparison " + cmp);
      c.threshold = e.at("threshold").get<double>();
      c.pass = e.at("pass").get<bool>();
      c.samples = e.at("samples").get<std::size_t>();
      c.excluded_chart = e.at("excluded_chart").get<std::size_t>();
      c.excluded_collision = e.at("excluded_collision").get<std::size_t>();
      c.excluded_other = e.at("excluded_other").get<std::size_t>();
      c.note = e.at("note").get<std::string>();
      r.checks.push_back(std::move(c));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed verification report: ") +
                      e.what());
  }
}

std::string report_table(const VerificationReport& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "seed %llu, source %s\n",
                static_cast<unsigned long long>(report.seed),
                report.source.c_str());
  os << line;
  std::snprintf(line, sizeof line, "%-28s %4s %11s %2s %9s %8s %7s %5s %5s %s\n",
                "check", "crit", "value", "", "threshold", "samples", "chart",
                "coll", "other", "result");
  os << line;
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line,
                  "%-28s %4d %11.3e %2s %9.1e %8zu %7zu %5zu %5zu %s\n",
                  c.tag.c_str(), c.criterion, c.value,
                  to_string(c.comparison), c.threshold, c.samples,
                  c.excluded_chart, c.excluded_collision, c.excluded_other,
                  c.pass ? "PASS" : "FAIL");
    os << line;
  }
  const auto failed = std::count_if(report.checks.begin(), report.checks.end(),
                                    [](const CheckResult& c) { return !c.pass; });
  std::snprintf(line, sizeof line, "%zu checks, %ld failed\n",
                report.checks.size(), static_cast<long>(failed));
  os << line;
  return os.str();
}

}  // namespace kovtop::cli
