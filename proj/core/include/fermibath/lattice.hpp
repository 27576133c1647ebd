#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace fermibath {

enum class Partition { Left, Right };

// L x L open-boundary square lattice with a straight vertical half cut.
// Sites are indexed row-major; columns 0 .. L/2-1 form the left partition.
class LatticeGeometry {
 public:
  // Throws std::invalid_argument unless L is even and >= 2.
  static LatticeGeometry square(int L);

  int linear_size() const { return L_; }
  int num_sites() const { return L_ * L_; }

  int site_index(int row, int col) const { return row * L_ + col; }
  std::pair<int, int> site_coords(int site) const {
    return {site / L_, site % L_};
  }

  Partition partition_of(int site) const {
    return (site % L_) < L_ / 2 ? Partition::Left : Partition::Right;
  }
  bool is_left(int site) const { return partition_of(site) == Partition::Left; }

  int city_block(int a, int b) const;

  // Unordered nearest-neighbour pairs; 2L(L-1) of them on an open square.
  std::vector<std::pair<int, int>> bonds() const;

 private:
  explicit LatticeGeometry(int L) : L_(L) {}
  int L_;
};

// Real symmetric coefficient matrix h with H = sum_ij h_ij c_i^dag c_j.
struct SingleParticleHamiltonian {
  Eigen::MatrixXd matrix;
  int dim() const { return static_cast<int>(matrix.rows()); }
};

// Mode bookkeeping for N system sites with M bath modes each.
//
// Canonical order: system sites 0..N-1 first, then bath modes grouped by
// site, with (site n, bath mode m) at N + n*M + (m-1) for m = 1..M.
// L/R order: every left-partition mode (ascending canonical index), then
// every right-partition mode. A bath mode inherits the partition of its site.
class ModeLayout {
 public:
  ModeLayout() = default;

  int num_sites() const { return num_sites_; }
  int bath_modes_per_site() const { return modes_per_site_; }
  int dim() const { return num_sites_ * (modes_per_site_ + 1); }
  int n_left() const { return n_left_; }

  int system_mode(int site) const { return site; }
  int bath_mode(int site, int m) const {
    return num_sites_ + site * modes_per_site_ + (m - 1);
  }

  bool mode_is_system(int canonical) const { return canonical < num_sites_; }
  int mode_site(int canonical) const {
    return canonical < num_sites_
               ? canonical
               : (canonical - num_sites_) / modes_per_site_;
  }
  bool mode_is_left(int canonical) const {
    return site_left_[static_cast<std::size_t>(mode_site(canonical))] != 0;
  }

  // canonical index occupying each L/R position
  const std::vector<int>& canonical_from_lr() const { return canonical_from_lr_; }
  // L/R position of each canonical index
  const std::vector<int>& lr_from_canonical() const { return lr_from_canonical_; }

  std::vector<int> left_canonical() const;
  std::vector<int> right_canonical() const;
  std::vector<int> system_canonical() const;

 private:
  friend ModeLayout make_mode_layout(const LatticeGeometry&, int);

  int num_sites_ = 0;
  int modes_per_site_ = 0;
  int n_left_ = 0;
  std::vector<std::uint8_t> site_left_;
  std::vector<int> canonical_from_lr_;
  std::vector<int> lr_from_canonical_;
};

ModeLayout make_mode_layout(const LatticeGeometry& geom, int bath_modes_per_site);

// Nearest-neighbour hopping -J with on-site energy h_s, open boundaries.
SingleParticleHamiltonian build_system_hamiltonian(const LatticeGeometry& geom,
                                                   double J, double h_s);

// System-bath coupling magnitude V(omega_m).
double bath_coupling(double gamma, double omega_m, int M, double omega_max,
                     double h_s);

// Star-discretized bath: M modes per site at omega_m = m*omega_max/M,
// each coupled only to its own system site with strength -V(omega_m).
std::pair<SingleParticleHamiltonian, ModeLayout> build_total_hamiltonian(
    const LatticeGeometry& geom, double J, double h_s, double gamma, int M,
    double omega_max);

// Similarity transform taking a canonical-order matrix into L/R order.
Eigen::MatrixXcd reorder_to_partitions(const ModeLayout& layout,
                                       const Eigen::MatrixXcd& C);
Eigen::MatrixXcd reorder_from_partitions(const ModeLayout& layout,
                                         const Eigen::MatrixXcd& C_lr);

}  // namespace fermibath
