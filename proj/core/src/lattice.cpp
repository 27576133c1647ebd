#include "fermibath/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace fermibath {

LatticeGeometry LatticeGeometry::square(int L) {
  if (L < 2) throw std::invalid_argument("lattice size must be at least 2");
  if (L % 2 != 0) throw std::invalid_argument("lattice size must be even");
  return LatticeGeometry(L);
}

int LatticeGeometry::city_block(int a, int b) const {
  auto [ra, ca] = site_coords(a);
  auto [rb, cb] = site_coords(b);
  return std::abs(ra - rb) + std::abs(ca - cb);
}

std::vector<std::pair<int, int>> LatticeGeometry::bonds() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(2 * L_ * (L_ - 1));
  for (int r = 0; r < L_; ++r) {
    for (int c = 0; c < L_; ++c) {
      int s = site_index(r, c);
      if (c + 1 < L_) out.emplace_back(s, site_index(r, c + 1));
      if (r + 1 < L_) out.emplace_back(s, site_index(r + 1, c));
    }
  }
  return out;
}

std::vector<int> ModeLayout::left_canonical() const {
  return {canonical_from_lr_.begin(), canonical_from_lr_.begin() + n_left_};
}

std::vector<int> ModeLayout::right_canonical() const {
  return {canonical_from_lr_.begin() + n_left_, canonical_from_lr_.end()};
}

std::vector<int> ModeLayout::system_canonical() const {
  std::vector<int> out(num_sites_);
  for (int n = 0; n < num_sites_; ++n) out[n] = n;
  return out;
}

ModeLayout make_mode_layout(const LatticeGeometry& geom, int bath_modes_per_site) {
  if (bath_modes_per_site < 0)
    throw std::invalid_argument("bath mode count must be nonnegative");
  ModeLayout layout;
  layout.num_sites_ = geom.num_sites();
  layout.modes_per_site_ = bath_modes_per_site;
  layout.site_left_.resize(layout.num_sites_);
  for (int n = 0; n < layout.num_sites_; ++n)
    layout.site_left_[n] = geom.is_left(n) ? 1 : 0;

  const int dim = layout.dim();
  layout.canonical_from_lr_.reserve(dim);
  for (int pass = 0; pass < 2; ++pass) {
    const bool want_left = (pass == 0);
    for (int i = 0; i < dim; ++i) {
      if (layout.mode_is_left(i) == want_left)
        layout.canonical_from_lr_.push_back(i);
    }
    if (want_left)
      layout.n_left_ = static_cast<int>(layout.canonical_from_lr_.size());
  }
  layout.lr_from_canonical_.resize(dim);
  for (int k = 0; k < dim; ++k)
    layout.lr_from_canonical_[layout.canonical_from_lr_[k]] = k;
  return layout;
}

SingleParticleHamiltonian build_system_hamiltonian(const LatticeGeometry& geom,
                                                   double J, double h_s) {
  const int N = geom.num_sites();
  SingleParticleHamiltonian h;
  h.matrix = Eigen::MatrixXd::Zero(N, N);
  h.matrix.diagonal().setConstant(h_s);
  for (auto [a, b] : geom.bonds()) {
    h.matrix(a, b) = -J;
    h.matrix(b, a) = -J;
  }
  return h;
}

double bath_coupling(double gamma, double omega_m, int M, double omega_max,
                     double h_s) {
  return std::sqrt(gamma * (omega_m / M) * (omega_max / (std::numbers::pi * h_s)));
}

std::pair<SingleParticleHamiltonian, ModeLayout> build_total_hamiltonian(
    const LatticeGeometry& geom, double J, double h_s, double gamma, int M,
    double omega_max) {
  if (M < 1) throw std::invalid_argument("bath mode count M must be positive");
  if (omega_max <= 0.0) throw std::invalid_argument("omega_max must be positive");
  if (h_s <= 0.0) throw std::invalid_argument("h_s must be positive");
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");

  const int N = geom.num_sites();
  ModeLayout layout = make_mode_layout(geom, M);
  const int D = layout.dim();

  SingleParticleHamiltonian h;
  h.matrix = Eigen::MatrixXd::Zero(D, D);
  h.matrix.topLeftCorner(N, N) = build_system_hamiltonian(geom, J, h_s).matrix;

  for (int m = 1; m <= M; ++m) {
    const double omega_m = m * omega_max / M;
    const double V = bath_coupling(gamma, omega_m, M, omega_max, h_s);
    for (int n = 0; n < N; ++n) {
      const int bm = layout.bath_mode(n, m);
      h.matrix(bm, bm) = omega_m;
      h.matrix(n, bm) = -V;
      h.matrix(bm, n) = -V;
    }
  }
  return {std::move(h), std::move(layout)};
}

namespace {

Eigen::MatrixXcd permute(const Eigen::MatrixXcd& C, const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  if (C.rows() != n || C.cols() != n)
    throw std::invalid_argument("matrix dimension does not match mode layout");
  Eigen::MatrixXcd out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = C(perm[i], perm[j]);
  return out;
}

}  // namespace

Eigen::MatrixXcd reorder_to_partitions(const ModeLayout& layout,
                                       const Eigen::MatrixXcd& C) {
  return permute(C, layout.canonical_from_lr());
}

Eigen::MatrixXcd reorder_from_partitions(const ModeLayout& layout,
                                         const Eigen::MatrixXcd& C_lr) {
  return permute(C_lr, layout.lr_from_canonical());
}

}  // namespace fermibath
