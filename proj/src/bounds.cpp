// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/bounds.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace uwbisac {

namespace {

Eigen::VectorXd inv_sqrt_diag(const Eigen::MatrixXd& f) {
  Eigen::VectorXd s(f.rows());
  for (Eigen::Index i = 0; i < f.rows(); ++i) s[i] = f(i, i) > 0.0 ? 1.0 / std::sqrt(f(i, i)) : 0.0;
  return s;
}

Eigen::MatrixXd equilibrate(const Eigen::MatrixXd& f) {
  const Eigen::VectorXd s = inv_sqrt_diag(f);
  return s.asDiagonal() * f * s.asDiagonal();
}

Eigen::MatrixXd sub(const Eigen::MatrixXd& f, const std::vector<Eigen::Index>& r, const std::vector<Eigen::Index>& c) {
  Eigen::MatrixXd m(r.size(), c.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) m(i, j) = f(r[i], c[j]);
  return m;
}

// Inverse of an SPD matrix through its equilibrated Cholesky factor.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& f) {
  const Eigen::VectorXd s = inv_sqrt_diag(f);
  Eigen::LLT<Eigen::MatrixXd> llt(s.asDiagonal() * f * s.asDiagonal());
  if (llt.info() != Eigen::Success) throw std::runtime_error("matrix not positive definite");
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(f.rows(), f.cols()));
  return s.asDiagonal() * inv * s.asDiagonal();
}

std::vector<std::string> names_of(const ParamLayout* layout, const std::vector<Eigen::Index>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(layout ? layout->names()[i] : std::to_string(i));
  return out;
}

}  // namespace

SingularityReport singularity_report(const Eigen::MatrixXd& fim, double tol) {
  SingularityReport r;
  const Eigen::Index n = fim.rows();
  if (n == 0) return r;
  std::vector<Eigen::Index> live;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (fim(i, i) > 0.0)
      live.push_back(i);
    else
      r.zero_columns.push_back(i);
  }
  const Eigen::MatrixXd s = equilibrate(fim);
  if (!live.empty()) {
    const Eigen::MatrixXd sl = sub(s, live, live);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sl + sl.transpose()), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd sv = es.eigenvalues().cwiseAbs();
    const double smax = sv.maxCoeff();
    r.rank = (sv.array() > tol * smax).count();
    r.min_sv_ratio = r.zero_columns.empty() ? sv.minCoeff() / smax : 0.0;
    for (std::size_t a = 0; a < live.size(); ++a)
      for (std::size_t b = a + 1; b < live.size(); ++b) {
        const auto ci = s.col(live[a]), cj = s.col(live[b]);
        const double norm = std::max(ci.norm(), cj.norm());
        const double d = std::min((ci - cj).norm(), (ci + cj).norm());
        if (d < tol * norm) r.coupled_columns.emplace_back(live[a], live[b]);
      }
  }
  r.singular = r.rank < n;
  return r;
}

LabeledMatrix closed_form_theta_fim(const ScenarioConfig& sc, const ModulationConfig& mod) {
  sc.validate(mod.max_delay_shift());
  mod.validate(sc);
  sc.check_separation();
  const int L = sc.num_paths();
  const int N = sc.n_f;
  const int P = mod.pilots, D = mod.data;
  const double t_f = sc.t_f;

  Eigen::VectorXd lt(L), lp(L), la(L), lta(L);
  for (int l = 0; l < L; ++l) {
    const auto s = single_pulse_info(sc, l);
    lt[l] = s.tau;
    lp[l] = s.phi;
    la[l] = s.alpha;
    lta[l] = s.tau_alpha;
  }
  const Eigen::MatrixXd H = h_matrix(L).dense();
  const Eigen::VectorXd E = Eigen::VectorXd::Ones(L);

  // Per-block multipliers of the single-pulse diagonals.
  double n_tt = N, n_aa = N, n_ta = N;
  double n_tq = 0, n_qq = 0, n_qa = 0;
  double b = coeff_b_closed(0, N, t_f), c_fp = 0, c_pp = 0;
  const bool pilot = mod.decoupling == Decoupling::Pilot;
  switch (mod.scheme) {
    case Scheme::SensingOnly: break;
    case Scheme::Ppm:
      if (mod.decoupling == Decoupling::Differential) {
        n_tq = 2.0 * N;
        n_qq = 5.0 * N - 1.0 + mod.sfd_weight;
        n_qa = N + 1.0;
      } else {
        n_tq = n_qq = n_qa = pilot ? D : N;
      }
      break;
    case Scheme::Bpsk:
      c_fp = pilot ? coeff_a_closed(P, N, t_f) : b;
      c_pp = pilot ? static_cast<double>(D) : b;
      break;
  }

  const ParamLayout layout = theta_layout(L, mod.scheme);
  const auto f = layout.block("fd1").begin;
  const auto a = layout.block("alpha").begin;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(layout.size(), layout.size());
  F.block(0, 0, L, L) = n_tt * H.transpose() * lt.asDiagonal() * H;
  F.block(f, f, L, L) = b * H.transpose() * lp.asDiagonal() * H;
  F.block(a, a, L, L) = n_aa * la.asDiagonal().toDenseMatrix();
  F.block(0, a, L, L) = n_ta * H.transpose() * lta.asDiagonal();
  F.block(a, 0, L, L) = F.block(0, a, L, L).transpose();
  if (mod.scheme == Scheme::Ppm) {
    const auto q = layout.block("dtau_q").begin;
    F.block(0, q, L, 1) = n_tq * H.transpose() * lt.asDiagonal() * E;
    F.block(q, 0, 1, L) = F.block(0, q, L, 1).transpose();
    F(q, q) = n_qq * E.dot(lt.asDiagonal() * E);
    F.block(q, a, 1, L) = n_qa * (lta.asDiagonal() * E).transpose();
    F.block(a, q, L, 1) = F.block(q, a, 1, L).transpose();
  }
  if (mod.scheme == Scheme::Bpsk) {
    const auto p = layout.block("phi_bpsk").begin;
    F.block(f, p, L, 1) = c_fp * H.transpose() * lp.asDiagonal() * E;
    F.block(p, f, 1, L) = F.block(f, p, L, 1).transpose();
    F(p, p) = c_pp * E.dot(lp.asDiagonal() * E);
  }
  return {std::move(F), layout};
}

SparseMatrix apply_independence_zeroing(const SparseMatrix& varpi_fim, int L, int n_f) {
  const Eigen::Index time_end = 2LL * n_f * L;
  auto pair_of = [&](Eigen::Index i) { return i / (2 * L); };
  auto is_d = [&](Eigen::Index i) { return (i % (2 * L)) < L; };
  std::vector<Eigen::Triplet<double>> keep;
  for (int c = 0; c < varpi_fim.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(varpi_fim, c); it; ++it) {
      const Eigen::Index r = it.row();
      const bool both_time = r < time_end && c < time_end;
      if (both_time && pair_of(r) != pair_of(c) && (is_d(r) || is_d(c))) continue;
      keep.emplace_back(r, c, it.value());
    }
  SparseMatrix out(varpi_fim.rows(), varpi_fim.cols());
  out.setFromTriplets(keep.begin(), keep.end());
  return out;
}

LabeledMatrix theta_fim_from_eta(const SparseMatrix& eta_fim, const ScenarioConfig& sc,
                                 const ModulationConfig& mod) {
  const int L = sc.num_paths();
  if (mod.decoupling == Decoupling::Differential) {
    const auto dj = differential_jacobians(L, sc.n_f, sc.t_f);
    const SparseMatrix raw = dj.p_diff.data.transpose() * eta_fim * dj.p_diff.data;
    const SparseMatrix z = apply_independence_zeroing(raw, L, sc.n_f);
    return {congruence(dj.j_diff, z), dj.j_diff.cols};
  }
  const auto j = jacobian(sc, mod);
  return {congruence(j, eta_fim), j.cols};
}

LabeledMatrix theta_fim_from_eta(const LabeledMatrix& eta_fim, const ScenarioConfig& sc,
                                 const ModulationConfig& mod) {
  return theta_fim_from_eta(SparseMatrix(eta_fim.data.sparseView(0.0, 0.0)), sc, mod);
}

LabeledMatrix assemble_theta_fim(const ScenarioConfig& sc, const ModulationConfig& mod) {
  const auto eta = observation_fim_analytic(sc, mod);
  auto product = theta_fim_from_eta(eta.data, sc, mod);
  product.data = 0.5 * (product.data + product.data.transpose()).eval();
  const auto closed = closed_form_theta_fim(sc, mod);
  const double diff = max_scaled_difference(product.data, closed.data, 1e-300);
  if (!(diff <= kAssemblyTol)) {
    std::ostringstream os;
    os << "theta FIM product and closed-form assembly disagree (scaled difference " << diff << ")";
    throw std::logic_error(os.str());
  }
  return product;
}

Eigen::MatrixXd efim(const Eigen::MatrixXd& fim, const std::vector<Eigen::Index>& target,
                     const ParamLayout* layout, double tol) {
  const Eigen::Index n = fim.rows();
  if (target.empty()) throw std::invalid_argument("empty EFIM target");
  std::vector<bool> in(n, false);
  for (auto t : target) {
    if (t < 0 || t >= n) throw std::out_of_range("EFIM target outside matrix");
    in[t] = true;
  }
  // Only nuisance parameters linked to the target through nonzero entries
  // enter the Schur complement; structurally decoupled blocks drop out exactly.
  std::vector<bool> linked = in;
  std::vector<Eigen::Index> stack(target.begin(), target.end());
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v)
      if (!linked[v] && (fim(u, v) != 0.0 || fim(v, u) != 0.0)) {
        linked[v] = true;
        stack.push_back(v);
      }
  }
  std::vector<Eigen::Index> rest;
  for (Eigen::Index i = 0; i < n; ++i)
    if (linked[i] && !in[i]) rest.push_back(i);
  const Eigen::MatrixXd A = sub(fim, target, target);
  if (rest.empty()) return A;
  const Eigen::MatrixXd C = sub(fim, rest, rest);
  const auto rep = singularity_report(C, tol);
  if (rep.singular) {
    std::vector<Eigen::Index> bad;
    for (auto [i, j] : rep.coupled_columns) {
      bad.push_back(rest[i]);
      bad.push_back(rest[j]);
    }
    for (auto z : rep.zero_columns) bad.push_back(rest[z]);
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    auto names = names_of(layout, bad);
    std::ostringstream os;
    os << "nuisance block is singular (rank " << rep.rank << " of " << C.rows() << ")";
    if (!names.empty()) {
      os << "; coupled or unobservable:";
      for (const auto& s : names) os << ' ' << s;
    }
    throw CoupledParametersError(os.str(), names);
  }
  const Eigen::MatrixXd B = sub(fim, rest, target);
  Eigen::MatrixXd e = A - B.transpose() * spd_inverse(C) * B;
  return 0.5 * (e + e.transpose());
}

Eigen::MatrixXd efim(const LabeledMatrix& fim, std::string_view block, double tol) {
  const auto& b = fim.layout.block(block);
  std::vector<Eigen::Index> t(b.size);
  std::iota(t.begin(), t.end(), b.begin);
  return efim(fim.data, t, &fim.layout, tol);
}

double crlb(const LabeledMatrix& fim, std::string_view entry, double tol) {
  const Eigen::Index i = fim.layout.index_of(entry);
  const double e = efim(fim.data, {i}, &fim.layout, tol)(0, 0);
  // A target coupled to a nuisance cancels down to roundoff, not to zero.
  if (!(e > tol * fim.data(i, i)))
    throw CoupledParametersError("parameter " + std::string(entry) + " carries no information beyond its nuisance",
                                 {std::string(entry)});
  return 1.0 / e;
}

double range_crlb(const LabeledMatrix& fim, double tol) {
  return kSpeedOfLight * kSpeedOfLight * crlb(fim, "tau1", tol);
}

std::optional<double> CrlbReport::value(std::string_view entry) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == entry) return crlb[i];
  throw std::out_of_range("unknown parameter " + std::string(entry));
}

CrlbReport crlb_report(const LabeledMatrix& fim, double tol) {
  CrlbReport r;
  const Eigen::Index n = fim.data.rows();
  r.names = fim.layout.names();
  r.crlb.assign(n, std::nullopt);
  const auto rep = singularity_report(fim.data, tol);
  r.singular = rep.singular;
  r.rank = rep.rank;
  r.min_sv_ratio = rep.min_sv_ratio;
  r.coupled_columns = rep.coupled_columns;

  // Connected blocks of the equilibrated matrix; singular blocks stay empty.
  const Eigen::MatrixXd s = equilibrate(fim.data);
  std::vector<int> comp(n, -1);
  int nc = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<Eigen::Index> stack{i};
    comp[i] = nc;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v)
        if (comp[v] < 0 && (rep.singular ? std::abs(s(u, v)) > tol : true)) {
          comp[v] = nc;
          stack.push_back(v);
        }
    }
    ++nc;
  }
  for (int c = 0; c < nc; ++c) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (comp[i] == c) idx.push_back(i);
    const Eigen::MatrixXd blk = sub(fim.data, idx, idx);
    if (singularity_report(blk, tol).singular) continue;
    const Eigen::MatrixXd inv = spd_inverse(blk);
    for (std::size_t k = 0; k < idx.size(); ++k) r.crlb[idx[k]] = inv(k, k);
  }
  const auto t = r.value("tau1");
  if (t) r.range_crlb = kSpeedOfLight * kSpeedOfLight * *t;
  return r;
}

double comm_efim_ppm(const ScenarioConfig& sc, const ModulationConfig& mod) {
  if (mod.scheme != Scheme::Ppm || mod.decoupling != Decoupling::Pilot)
    throw std::invalid_argument("communication EFIM needs pilot-decoupled PPM");
  if (mod.pilots < 1 || mod.data < 1) throw std::invalid_argument("communication EFIM needs P >= 1 and D >= 1");
  const auto fim = assemble_theta_fim(sc, mod);
  return efim(fim, "dtau_q")(0, 0);
}

DifferentialResult differential_pipeline(const ScenarioConfig& sc, const ModulationConfig& mod, double tol) {
  if (mod.scheme != Scheme::Ppm || mod.decoupling != Decoupling::Differential)
    throw std::invalid_argument("differential pipeline needs differential PPM");
  const int L = sc.num_paths();
  DifferentialResult r;
  r.eta_fim = observation_fim_analytic(sc, mod);
  const auto dj = differential_jacobians(L, sc.n_f, sc.t_f);
  r.varpi_fim_raw = {dj.p_diff.data.transpose() * r.eta_fim.data * dj.p_diff.data, dj.p_diff.cols};
  r.varpi_fim = {apply_independence_zeroing(r.varpi_fim_raw.data, L, sc.n_f), dj.p_diff.cols};
  r.theta_fim = assemble_theta_fim(sc, mod);

  // Doppler must be decoupled from the delay/data blocks.
  const auto& lay = r.theta_fim.layout;
  const auto f = lay.block("fd1").begin;
  const auto q = lay.block("dtau_q").begin;
  const auto a = lay.block("alpha").begin;
  if (r.theta_fim.data.block(f, 0, L, q + 1).cwiseAbs().maxCoeff() != 0.0 ||
      r.theta_fim.data.block(f, a, L, L).cwiseAbs().maxCoeff() != 0.0)
    throw std::logic_error("Doppler block is not decoupled in the differential FIM");

  double lsum = 0.0;
  for (int l = 0; l < L; ++l) lsum += single_pulse_info(sc, l).tau;
  r.delay_data_multiplier = r.theta_fim.data(0, q) / lsum;
  r.data_data_multiplier = r.theta_fim.data(q, q) / lsum;
  r.report = crlb_report(r.theta_fim, tol);
  return r;
}

}  // namespace uwbisac
