#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "rfmle/random_fields.hpp"

namespace rfmle {

/// Samples z(s_i, t_j) on a regular grid; values(i, j) with i along s.
struct Grid {
  double s0 = 0.0;
  double ds = 0.0;
  double t0 = 0.0;
  double dt = 0.0;
  Eigen::MatrixXd values;

  double s(Eigen::Index i) const { return s0 + ds * static_cast<double>(i); }
  double t(Eigen::Index j) const { return t0 + dt * static_cast<double>(j); }
  double s_end() const { return s(values.rows() - 1); }
  double t_end() const { return t(values.cols() - 1); }
};

/// CSV with header `s,t,z`, s outer and t inner. Both axes must be regular to
/// 1e-9 of their pitch; throws ParseError otherwise and IoError if unreadable.
Grid read_grid_csv(std::istream& in);
Grid read_grid_csv(const std::string& path);
void write_grid_csv(std::ostream& out, const Grid& grid);

/// Samples a field on ns x nt points spanning [s0, s1] x [t0, t1].
Grid sample_grid(const Field& z, double s0, double s1, int ns, double t0, double t1, int nt);

/// Bicubic Hermite interpolant of gridded observations. Node slopes are
/// central differences (one-sided on the edges), so the partials used by the
/// stochastic integrals are those of the interpolant.
class GridField : public Field {
 public:
  explicit GridField(Grid grid);

  Jet jet(double s, double t) const override;
  double s_extent() const override { return grid_.s_end(); }
  double t_extent() const override { return grid_.t_end(); }

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Eigen::MatrixXd zs_;   // dz/ds at the nodes
  Eigen::MatrixXd zt_;   // dz/dt
  Eigen::MatrixXd zst_;  // d2z/dsdt
};

}  // namespace rfmle
