#include "kndirac/tortoise_inverter.hpp"

#include <cmath>
#include <limits>

namespace kn {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// log(w + e^s) without overflow for large s
double log_w_plus_exp(double w, double s) {
  double lw = std::log(w);
  if (s > lw) return s + std::log1p(w * std::exp(-s));
  return lw + std::log1p(std::exp(s) / w);
}

}  // namespace

TortoiseInverter::TortoiseInverter(const SpacetimeParams& p, Branch b)
    : p_(p), branch_(b), h_(horizons(p)) {
  w_ = h_.r_plus - h_.r_minus;
  cp_ = (h_.r_plus * h_.r_plus + p.a * p.a) / w_;
  cm_ = (h_.r_minus * h_.r_minus + p.a * p.a) / w_;
  upper_ = std::log(0.5 * w_);
  double rmid = 0.5 * (h_.r_plus + h_.r_minus);
  rstar_mid_ = rmid + (cp_ - cm_) * upper_;
}

// increasing function of s whose root is the wanted point
double TortoiseInverter::residual(Var v, double s, double rstar, double* deriv) const {
  double e = std::exp(s);
  switch (v) {
    case Var::ext_plus: {
      double f = h_.r_plus + e + cp_ * s - cm_ * log_w_plus_exp(w_, s) - rstar;
      *deriv = e + cp_ - cm_ * e / (w_ + e);
      return f;
    }
    case Var::int_minus: {
      double lg = std::log(w_) + std::log1p(-e / w_);
      double g = h_.r_minus + e + cp_ * lg - cm_ * s - rstar;
      *deriv = -(e - cp_ * e / (w_ - e) - cm_);
      return -g;
    }
    case Var::int_plus: {
      double lg = std::log(w_) + std::log1p(-e / w_);
      double f = h_.r_plus - e + cp_ * s - cm_ * lg - rstar;
      *deriv = -e + cp_ + cm_ * e / (w_ - e);
      return f;
    }
  }
  return 0.0;
}

TortoiseRoot TortoiseInverter::make_root(Var v, double s, int iters) const {
  double e = std::exp(s);
  TortoiseRoot out{};
  out.iterations = iters;
  out.eps = v == Var::ext_plus ? 1 : -1;
  switch (v) {
    case Var::ext_plus:
      out.r = h_.r_plus + e;
      out.from_plus = e;
      out.from_minus = w_ + e;
      out.log_from_plus = s;
      out.log_from_minus = log_w_plus_exp(w_, s);
      break;
    case Var::int_minus:
      out.r = h_.r_minus + e;
      out.from_minus = e;
      out.from_plus = -(w_ - e);
      out.log_from_minus = s;
      out.log_from_plus = std::log(w_) + std::log1p(-e / w_);
      break;
    case Var::int_plus:
      out.r = h_.r_plus - e;
      out.from_plus = -e;
      out.from_minus = w_ - e;
      out.log_from_plus = s;
      out.log_from_minus = std::log(w_) + std::log1p(-e / w_);
      break;
  }
  return out;
}

TortoiseRoot TortoiseInverter::solve(Var v, double rstar, double guess, double upper) {
  double scale = std::max(1.0, std::abs(rstar));
  double d = 0.0;
  int iters = 0;
  double s = std::min(guess, upper);
  double f = residual(v, s, rstar, &d);
  // plain Newton from a good (warm) guess; bracketing below if it misbehaves
  {
    double ts = s, tf = f, td = d;
    for (int j = 0; j < 6; ++j) {
      if (std::abs(tf) <= 1e-14 * scale) return make_root(v, ts, iters);
      double sn = ts - tf / td;
      if (!std::isfinite(sn) || sn > upper) break;
      double fn = residual(v, sn, rstar, &td);
      ++iters;
      if (!(std::abs(fn) < std::abs(tf))) break;
      ts = sn;
      tf = fn;
    }
  }
  double lo, hi, flo, fhi;
  if (f > 0.0) {
    hi = s;
    fhi = f;
    double step = 1.0;
    lo = s - step;
    while ((flo = residual(v, lo, rstar, &d)) > 0.0) {
      hi = lo;
      fhi = flo;
      step *= 2.0;
      lo -= step;
      if (++iters > max_iterations || !std::isfinite(lo))
        throw DomainError("r* = " + std::to_string(rstar) + " outside the " + to_string(branch_) +
                          " branch");
    }
  } else {
    lo = s;
    flo = f;
    double step = 1.0;
    hi = std::min(s + step, upper);
    while ((fhi = residual(v, hi, rstar, &d)) < 0.0) {
      if (hi >= upper) {
        // rounding at the branch midpoint
        if (std::abs(fhi) <= 1e-12 * scale) return make_root(v, hi, iters);
        throw NumericalError("tortoise inversion: no bracket below the branch midpoint");
      }
      lo = hi;
      flo = fhi;
      step *= 2.0;
      hi = std::min(hi + step, upper);
      if (++iters > max_iterations) throw NumericalError("tortoise inversion: bracket search failed");
    }
  }
  (void)flo;
  (void)fhi;
  s = (s > lo && s < hi) ? s : 0.5 * (lo + hi);
  if (!std::isfinite(s)) s = lo;
  for (; iters < max_iterations; ++iters) {
    f = residual(v, s, rstar, &d);
    if (std::abs(f) <= 1e-14 * scale) return make_root(v, s, iters);
    if (f > 0.0)
      hi = s;
    else
      lo = s;
    double sn = s - f / d;
    if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
    if (std::abs(sn - s) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(s)) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(s))) {
      double fn = residual(v, sn, rstar, &d);
      if (std::abs(fn) <= 1e-12 * scale) return make_root(v, sn, iters + 1);
      throw NumericalError("tortoise inversion stalled with residual " + std::to_string(fn));
    }
    s = sn;
  }
  f = residual(v, s, rstar, &d);
  if (std::abs(f) <= 1e-12 * scale) return make_root(v, s, iters);
  throw NumericalError("tortoise inversion did not converge in " + std::to_string(max_iterations) +
                       " iterations");
}

TortoiseRoot TortoiseInverter::operator()(double rstar) {
  if (!std::isfinite(rstar)) throw DomainError("r* must be finite");
  Var v;
  double upper, guess;
  double lw = std::log(w_);
  if (branch_ == Branch::exterior) {
    v = Var::ext_plus;
    upper = inf;
    guess = rstar > h_.r_plus + 1.0 ? std::log(rstar - h_.r_plus) : (rstar - h_.r_plus + cm_ * lw) / cp_;
  } else if (rstar >= rstar_mid_) {
    v = Var::int_minus;
    upper = upper_;
    if (cm_ == 0.0) {
      // r_- = 0: the interior r* range is bounded above
      double top = cp_ * lw;
      if (rstar >= top) throw DomainError("r* beyond the interior range (no Cauchy horizon)");
      guess = upper_ - 1.0;
    } else {
      guess = (h_.r_minus + cp_ * lw - rstar) / cm_;
    }
  } else {
    v = Var::int_plus;
    upper = upper_;
    guess = (rstar - h_.r_plus + cm_ * lw) / cp_;
  }
  if (have_last_ && last_var_ == v) guess = last_s_;
  TortoiseRoot root = solve(v, rstar, guess, upper);
  have_last_ = true;
  last_var_ = v;
  last_s_ = v == Var::int_minus ? root.log_from_minus : root.log_from_plus;
  return root;
}

}  // namespace kn
