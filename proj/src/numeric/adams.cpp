#include "bic/numeric/adams.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bic/error.hpp"

namespace bic::numeric {

namespace {

constexpr std::array<double, 4> kGaussX = {0.1834346424956498, 0.5255324099163290,
                                           0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGaussW = {0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

double growth(double est, int exponent) {
  if (est <= 0.0) return 2.0;
  return std::min(2.0, 0.9 * std::pow(est, -1.0 / exponent));
}

}  // namespace

std::vector<double> lagrange_integral_weights(std::span<const double> nodes, double a, double b) {
  const std::size_t m = nodes.size();
  std::vector<double> w(m, 0.0);
  if (m == 0 || a == b) return w;
  if (m > 16) throw InvalidParameter("at most 16 interpolation nodes are supported");
  std::vector<double> denom(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      if (i != j) denom[j] *= nodes[j] - nodes[i];
    }
  }
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t g = 0; g < 8; ++g) {
    const double xi = (g < 4 ? -1.0 : 1.0) * kGaussX[g % 4];
    const double x = mid + half * xi;
    const double wg = kGaussW[g % 4] * half;
    for (std::size_t j = 0; j < m; ++j) {
      double prod = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (i != j) prod *= x - nodes[i];
      }
      w[j] += wg * prod / denom[j];
    }
  }
  return w;
}

AdamsIntegrator::AdamsIntegrator(Rhs rhs, std::vector<value_type> y0, double t0, Options options)
    : rhs_(std::move(rhs)), opt_(options), n_(y0.size()), t_(t0), t_prev_(t0), y_(std::move(y0)) {
  if (!(opt_.rel_tol > 0.0) || !(opt_.abs_tol >= 0.0)) {
    throw InvalidParameter("integrator tolerances must be positive");
  }
  if (opt_.max_order < 1 || opt_.max_order > 12) {
    throw InvalidParameter("Adams order must lie in [1, 12]");
  }
  y_prev_ = y_;
  y_pred_.resize(n_);
  f_tmp_.resize(n_);
  f_pred_.resize(n_);
  work_lo_.resize(n_);
  work_mid_.resize(n_);
  work_hi_.resize(n_);
  work_top_.resize(n_);

  Node first{t_, std::vector<value_type>(n_)};
  eval(t_, y_, first.f);
  history_.push_front(std::move(first));

  double ynorm = 0.0;
  double fnorm = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    ynorm += std::norm(y_[i]);
    fnorm += std::norm(history_.front().f[i]);
  }
  ynorm = std::sqrt(ynorm);
  fnorm = std::sqrt(fnorm);
  y_scale_ = ynorm;
  if (opt_.initial_step > 0.0) {
    h_ = opt_.initial_step;
  } else {
    const double tol = opt_.abs_tol + opt_.rel_tol * ynorm;
    const double rate = fnorm / std::max(ynorm, 1e-300);
    h_ = 0.5 * std::sqrt(tol / std::max(fnorm, 1e-300)) / std::max(1.0, rate);
    h_ = std::clamp(h_, 1e-10, 1e-2);
  }
  if (opt_.max_step > 0.0) h_ = std::min(h_, opt_.max_step);
  stats_.step = h_;
}

void AdamsIntegrator::eval(double t, std::span<const value_type> y, std::span<value_type> out) {
  rhs_(t, y, out);
  ++stats_.rhs_evaluations;
}

double AdamsIntegrator::scaled_norm(std::span<const value_type> delta) const {
  double s = 0.0;
  for (const auto& d : delta) s += std::norm(d);
  return std::sqrt(s) / (opt_.abs_tol + opt_.rel_tol * y_scale_);
}

void AdamsIntegrator::step() {
  std::vector<double> nodes;
  nodes.reserve(16);
  int rejects_in_row = 0;

  // y + sum_j w_j f_j with the corrector nodes {t_new, history_[0..q-2]}.
  auto corrector = [&](int q, double t_new, std::vector<value_type>& out) {
    nodes.clear();
    nodes.push_back(t_new);
    for (int j = 0; j < q - 1; ++j) nodes.push_back(history_[j].t);
    const auto w = lagrange_integral_weights(nodes, t_, t_new);
    for (std::size_t i = 0; i < n_; ++i) out[i] = y_[i] + w[0] * f_pred_[i];
    for (int j = 0; j < q - 1; ++j) {
      const auto& f = history_[j].f;
      const double wj = w[j + 1];
      for (std::size_t i = 0; i < n_; ++i) out[i] += wj * f[i];
    }
  };
  auto diff_norm = [&](const std::vector<value_type>& a, const std::vector<value_type>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s) / (opt_.abs_tol + opt_.rel_tol * y_scale_);
  };

  for (;;) {
    if (stats_.accepted + stats_.rejected >= opt_.max_steps) {
      throw IntegratorFailure("maximum number of integrator steps exceeded", t_);
    }
    double h = h_;
    if (opt_.max_step > 0.0) h = std::min(h, opt_.max_step);
    const double t_new = t_ + h;
    if (!(t_new > t_) || h < 1e-14 * std::max(1.0, std::abs(t_))) {
      throw IntegratorFailure("step size underflow (h = " + std::to_string(h) + ")", t_);
    }
    const int p = std::min<int>(order_, static_cast<int>(history_.size()));

    nodes.clear();
    for (int j = 0; j < p; ++j) nodes.push_back(history_[j].t);
    const auto wp = lagrange_integral_weights(nodes, t_, t_new);
    std::copy(y_.begin(), y_.end(), y_pred_.begin());
    for (int j = 0; j < p; ++j) {
      const auto& f = history_[j].f;
      for (std::size_t i = 0; i < n_; ++i) y_pred_[i] += wp[j] * f[i];
    }
    eval(t_new, y_pred_, f_pred_);

    corrector(p + 1, t_new, work_mid_);
    corrector(p, t_new, work_lo_);
    const double est = diff_norm(work_mid_, work_lo_);

    if (!(est <= 1.0)) {
      ++stats_.rejected;
      ++rejects_in_row;
      const double factor = std::isfinite(est) ? std::max(0.2, 0.9 * std::pow(est, -1.0 / (p + 1))) : 0.2;
      h_ = h * std::min(factor, 0.9);
      if (rejects_in_row >= 2 && order_ > 1) order_ = std::max(1, p - 1);
      continue;
    }

    double est_lower = -1.0;
    if (p >= 2) {
      corrector(p - 1, t_new, work_hi_);
      est_lower = diff_norm(work_lo_, work_hi_);
    }
    double est_higher = -1.0;
    if (p + 1 <= opt_.max_order && static_cast<int>(history_.size()) >= p + 1) {
      corrector(p + 2, t_new, work_top_);
      est_higher = diff_norm(work_top_, work_mid_);
    }

    y_prev_.swap(y_);
    y_.swap(work_mid_);
    t_prev_ = t_;
    t_ = t_new;

    Node node{t_, {}};
    if (history_.size() > static_cast<std::size_t>(opt_.max_order + 2)) {
      node.f = std::move(history_.back().f);
      history_.pop_back();
    } else {
      node.f.resize(n_);
    }
    eval(t_, y_, node.f);
    history_.push_front(std::move(node));

    dense_t_.assign(1, t_);
    dense_f_.assign(1, &f_pred_);
    for (int j = 1; j <= p; ++j) {
      dense_t_.push_back(history_[j].t);
      dense_f_.push_back(&history_[j].f);
    }

    double ynorm = 0.0;
    for (const auto& v : y_) ynorm += std::norm(v);
    y_scale_ = std::sqrt(ynorm);

    int q = p;
    double best = growth(est, p + 1);
    if (est_lower >= 0.0) {
      const double g = growth(est_lower, p);
      if (g > best) {
        best = g;
        q = p - 1;
      }
    }
    if (est_higher >= 0.0) {
      const double g = growth(est_higher, p + 2);
      if (g >= best) {
        best = g;
        q = p + 1;
      }
    }
    if (rejects_in_row > 0) best = std::min(best, 1.0);
    if (best > 1.0 && best < 1.2) best = 1.0;
    order_ = q;
    h_ = h * std::clamp(best, 0.2, 2.0);

    ++stats_.accepted;
    stats_.order = order_;
    stats_.step = h_;
    return;
  }
}

void AdamsIntegrator::interpolate(double t_out, std::span<value_type> y_out) const {
  const auto w = lagrange_integral_weights(dense_t_, t_prev_, t_out);
  std::copy(y_prev_.begin(), y_prev_.end(), y_out.begin());
  for (std::size_t j = 0; j < dense_t_.size(); ++j) {
    const auto& f = *dense_f_[j];
    for (std::size_t i = 0; i < n_; ++i) y_out[i] += w[j] * f[i];
  }
}

void AdamsIntegrator::advance_to(double t_out, std::span<value_type> y_out) {
  if (y_out.size() != n_) throw InvalidParameter("output buffer has the wrong dimension");
  if (t_out < t_prev_) throw InvalidParameter("cannot interpolate before the last accepted step");
  while (t_ < t_out) step();
  if (t_out == t_ || stats_.accepted == 0) {
    std::copy(y_.begin(), y_.end(), y_out.begin());
  } else {
    interpolate(t_out, y_out);
  }
}

}  // namespace bic::numeric
