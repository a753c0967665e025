// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/jacobians.hpp"

namespace uwbisac {

namespace {

using Trip = std::vector<Eigen::Triplet<double>>;

ParamLayout plain_layout(std::string_view base, int n) {
  ParamLayout p;
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(std::string(base) + std::to_string(i));
  p.add_block(std::string(base), v);
  return p;
}

StructMatrix finish(const Trip& t, ParamLayout rows, ParamLayout cols) {
  SparseMatrix m(rows.size(), cols.size());
  m.setFromTriplets(t.begin(), t.end());
  return {std::move(m), std::move(rows), std::move(cols)};
}

ScenarioConfig shape_only(int L, int n_f) {
  ScenarioConfig sc;
  sc.n_f = n_f;
  sc.paths.resize(L);
  return sc;
}

// Column indices of theta for path l (0-based).
struct ThetaCols {
  const ParamLayout& t;
  Eigen::Index tau1() const { return t.block("tau1").begin; }
  Eigen::Index dtau(int l) const { return t.block("dtau").begin + l - 1; }
  Eigen::Index fd1() const { return t.block("fd1").begin; }
  Eigen::Index dfd(int l) const { return t.block("dfd").begin + l - 1; }
  Eigen::Index alpha(int l) const { return t.block("alpha").begin + l; }
  Eigen::Index q() const { return t.block("dtau_q").begin; }
  Eigen::Index phi_bpsk() const { return t.block("phi_bpsk").begin; }
};

// Row r carries H's row l (times `scale`) on the delay or Doppler columns.
void add_h_row(Trip& t, Eigen::Index r, int l, Eigen::Index c1, Eigen::Index cl, double scale) {
  if (scale == 0.0) return;
  t.emplace_back(r, c1, scale);
  if (l > 0) t.emplace_back(r, cl, scale);
}

void add_delay_row(Trip& t, const ThetaCols& c, Eigen::Index r, int l) {
  add_h_row(t, r, l, c.tau1(), l > 0 ? c.dtau(l) : -1, 1.0);
}

void add_phase_row(Trip& t, const ThetaCols& c, Eigen::Index r, int l, int k, double t_f) {
  add_h_row(t, r, l, c.fd1(), l > 0 ? c.dfd(l) : -1, 2.0 * kPi * k * t_f);
}

void check_selector(JacobianSelector sel, int L, int n_f, int p, int d) {
  if (L < 1 || n_f < 1) throw std::invalid_argument("L and n_f must be >= 1");
  if (sel.scheme == Scheme::SensingOnly && sel.decoupling != Decoupling::None)
    throw std::invalid_argument("sensing-only takes no decoupling");
  if (sel.decoupling == Decoupling::Differential && sel.scheme != Scheme::Ppm)
    throw std::invalid_argument("differential decoupling requires PPM");
  if (sel.decoupling == Decoupling::Pilot && (p < 1 || d < 0 || p + d != n_f))
    throw std::invalid_argument("pilot frame dimensions must satisfy p >= 1, p + d = n_f");
}

}  // namespace

StructMatrix h_matrix(int L) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  Trip t;
  for (int l = 0; l < L; ++l) {
    t.emplace_back(l, 0, 1.0);
    if (l > 0) t.emplace_back(l, l, 1.0);
  }
  return finish(t, plain_layout("tau", L), plain_layout("theta", L));
}

StructMatrix e_vector(int L) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  Trip t;
  for (int l = 0; l < L; ++l) t.emplace_back(l, 0, 1.0);
  return finish(t, plain_layout("tau", L), plain_layout("shift", 1));
}

StructMatrix jacobian(JacobianSelector sel, int L, int n_f, int p, int d, double t_f) {
  check_selector(sel, L, n_f, p, d);
  if (sel.decoupling == Decoupling::Differential) return differential_jacobians(L, n_f, t_f).j_diff;

  ModulationConfig mod;
  mod.scheme = sel.scheme;
  mod.decoupling = sel.decoupling;
  mod.pilots = p;
  mod.data = d;
  ParamLayout rows = eta_layout(shape_only(L, n_f), mod);
  ParamLayout cols = theta_layout(L, sel.scheme);
  const ThetaCols c{cols};
  Trip t;

  auto alpha_block = [&](std::string_view name) {
    const auto b = rows.block(name).begin;
    for (int l = 0; l < L; ++l) t.emplace_back(b + l, c.alpha(l), 1.0);
  };

  if (sel.decoupling == Decoupling::Pilot) {
    const auto tp = rows.block("tau_p").begin, td = rows.block("tau_d").begin;
    const auto pp = rows.block("phi_p").begin, pd = rows.block("phi_d").begin;
    for (int l = 0; l < L; ++l) {
      add_delay_row(t, c, tp + l, l);
      add_delay_row(t, c, td + l, l);
      if (sel.scheme == Scheme::Ppm) t.emplace_back(td + l, c.q(), 1.0);
    }
    for (int k = 0; k < n_f; ++k)
      for (int l = 0; l < L; ++l) {
        const auto r = k < p ? pp + k * L + l : pd + (k - p) * L + l;
        add_phase_row(t, c, r, l, k, t_f);
        // data pulses share one unknown phase offset
        if (sel.scheme == Scheme::Bpsk && k >= p) t.emplace_back(r, c.phi_bpsk(), 1.0);
      }
    alpha_block("alpha_p");
    alpha_block("alpha_d");
    return finish(t, std::move(rows), std::move(cols));
  }

  const auto tb = rows.blocks()[0].begin, pb = rows.blocks()[1].begin;
  for (int l = 0; l < L; ++l) {
    add_delay_row(t, c, tb + l, l);
    if (sel.scheme == Scheme::Ppm) t.emplace_back(tb + l, c.q(), 1.0);
  }
  for (int k = 0; k < n_f; ++k)
    for (int l = 0; l < L; ++l) {
      add_phase_row(t, c, pb + k * L + l, l, k, t_f);
      if (sel.scheme == Scheme::Bpsk && k > 0) t.emplace_back(pb + k * L + l, c.phi_bpsk(), 2.0 * kPi * k * t_f);
    }
  alpha_block("alpha");
  return finish(t, std::move(rows), std::move(cols));
}

StructMatrix jacobian(const ScenarioConfig& sc, const ModulationConfig& mod) {
  return jacobian({mod.scheme, mod.decoupling}, sc.num_paths(), sc.n_f, mod.pilots, mod.data, sc.t_f);
}

DifferentialJacobians differential_jacobians(int L, int n_f, double t_f) {
  if (L < 1 || n_f < 1) throw std::invalid_argument("L and n_f must be >= 1");
  ModulationConfig mod = ModulationConfig::ppm(n_f, Decoupling::Differential);
  ParamLayout eta = eta_layout(shape_only(L, n_f), mod);
  ParamLayout varpi = varpi_layout(L, n_f);
  ParamLayout theta = theta_layout(L, Scheme::Ppm);

  const auto tref = eta.block("t_ref").begin, tb = eta.block("t").begin;
  const auto time = varpi.block("time").begin;
  auto d_col = [&](int k, int l) { return time + 2 * k * L + l; };
  auto t_col = [&](int k, int l) { return time + 2 * k * L + L + l; };

  // Banded reference/data difference pattern: t_ref = -d_0,
  // t^k = d_k + t^k - d_{k+1}.
  Trip p;
  for (int l = 0; l < L; ++l) p.emplace_back(tref + l, d_col(0, l), -1.0);
  for (int k = 0; k < n_f; ++k)
    for (int l = 0; l < L; ++l) {
      const auto r = tb + k * L + l;
      p.emplace_back(r, d_col(k, l), 1.0);
      p.emplace_back(r, t_col(k, l), 1.0);
      if (k + 1 < n_f) p.emplace_back(r, d_col(k + 1, l), -1.0);
    }
  const auto ep = eta.block("phi").begin, vp = varpi.block("phi").begin;
  for (Eigen::Index i = 0; i < eta.block("phi").size; ++i) p.emplace_back(ep + i, vp + i, 1.0);
  const auto ea = eta.block("alpha").begin, va = varpi.block("alpha").begin;
  for (int l = 0; l < L; ++l) p.emplace_back(ea + l, va + l, 1.0);

  const ThetaCols c{theta};
  Trip j;
  for (int k = 0; k < n_f; ++k)
    for (int l = 0; l < L; ++l) {
      j.emplace_back(d_col(k, l), c.q(), 1.0);
      add_delay_row(j, c, t_col(k, l), l);
      j.emplace_back(t_col(k, l), c.q(), 1.0);
      add_phase_row(j, c, vp + k * L + l, l, k, t_f);
    }
  for (int l = 0; l < L; ++l) j.emplace_back(va + l, c.alpha(l), 1.0);

  return {finish(p, eta, varpi), finish(j, varpi, theta)};
}

Eigen::MatrixXd congruence(const StructMatrix& j, const SparseMatrix& a) {
  if (a.rows() != j.data.rows() || a.cols() != j.data.rows()) throw std::invalid_argument("dimension mismatch");
  const SparseMatrix r = j.data.transpose() * a * j.data;
  return Eigen::MatrixXd(r);
}

Eigen::MatrixXd congruence(const StructMatrix& j, const Eigen::MatrixXd& a) {
  if (a.rows() != j.data.rows() || a.cols() != j.data.rows()) throw std::invalid_argument("dimension mismatch");
  const Eigen::MatrixXd jd = j.dense();
  return jd.transpose() * a * jd;
}

}  // namespace uwbisac
