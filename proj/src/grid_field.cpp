#include "rfmle/grid_field.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "rfmle/error.hpp"

namespace rfmle {

namespace {

struct Row {
  double s, t, z;
};

// Distinct values of a regular axis; throws unless evenly spaced.
std::vector<double> check_axis(const std::vector<double>& x, const char* name) {
  if (x.size() < 2) throw Error(Errc::parse_error, std::string("grid needs at least 2 ") + name + " values");
  const double pitch = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(pitch > 0.0)) throw Error(Errc::parse_error, std::string(name) + " axis is not increasing");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double expected = x.front() + pitch * static_cast<double>(i);
    if (std::abs(x[i] - expected) > 1e-9 * std::max(pitch, std::abs(expected))) {
      std::ostringstream os;
      os << name << " axis is not regular near " << x[i];
      throw Error(Errc::parse_error, os.str());
    }
  }
  return x;
}

// Hermite basis on [0, 1] and first derivatives.
struct Hermite {
  double h00, h10, h01, h11;
  double d00, d10, d01, d11;

  explicit Hermite(double x) {
    const double x2 = x * x, x3 = x2 * x;
    h00 = 2 * x3 - 3 * x2 + 1;
    h10 = x3 - 2 * x2 + x;
    h01 = -2 * x3 + 3 * x2;
    h11 = x3 - x2;
    d00 = 6 * x2 - 6 * x;
    d10 = 3 * x2 - 4 * x + 1;
    d01 = -6 * x2 + 6 * x;
    d11 = 3 * x2 - 2 * x;
  }
};

// Central differences along rows (axis 0) or columns (axis 1).
Eigen::MatrixXd node_slopes(const Eigen::MatrixXd& v, int axis, double pitch) {
  Eigen::MatrixXd d(v.rows(), v.cols());
  const Eigen::Index n = axis == 0 ? v.rows() : v.cols();
  auto at = [&](Eigen::Index k, Eigen::Index other) { return axis == 0 ? v(k, other) : v(other, k); };
  auto put = [&](Eigen::Index k, Eigen::Index other, double x) {
    if (axis == 0)
      d(k, other) = x;
    else
      d(other, k) = x;
  };
  const Eigen::Index m = axis == 0 ? v.cols() : v.rows();
  for (Eigen::Index o = 0; o < m; ++o) {
    put(0, o, (at(1, o) - at(0, o)) / pitch);
    put(n - 1, o, (at(n - 1, o) - at(n - 2, o)) / pitch);
    for (Eigen::Index k = 1; k + 1 < n; ++k) put(k, o, (at(k + 1, o) - at(k - 1, o)) / (2.0 * pitch));
  }
  return d;
}

}  // namespace

Grid read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::parse_error, "empty grid file");
  line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }),
             line.end());
  if (line != "s,t,z") throw Error(Errc::parse_error, "grid header must be 's,t,z'");

  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Row r{};
    if (!(ls >> r.s >> r.t >> r.z)) {
      std::ostringstream os;
      os << "bad grid row at line " << lineno;
      throw Error(Errc::parse_error, os.str());
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(Errc::parse_error, "grid has no rows");

  // t varies fastest: the first block of equal s gives the t axis.
  std::vector<double> t_axis;
  for (const Row& r : rows) {
    if (r.s != rows.front().s) break;
    t_axis.push_back(r.t);
  }
  const std::size_t nt = t_axis.size();
  if (rows.size() % nt != 0) throw Error(Errc::parse_error, "grid rows do not form a rectangle");
  const std::size_t ns = rows.size() / nt;
  std::vector<double> s_axis(ns);
  for (std::size_t i = 0; i < ns; ++i) s_axis[i] = rows[i * nt].s;
  check_axis(s_axis, "s");
  check_axis(t_axis, "t");

  Grid g;
  g.s0 = s_axis.front();
  g.ds = (s_axis.back() - s_axis.front()) / static_cast<double>(ns - 1);
  g.t0 = t_axis.front();
  g.dt = (t_axis.back() - t_axis.front()) / static_cast<double>(nt - 1);
  g.values.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nt));
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const Row& r = rows[i * nt + j];
      if (r.s != s_axis[i] || r.t != t_axis[j]) {
        std::ostringstream os;
        os << "grid row " << i * nt + j + 2 << " breaks the s-outer, t-inner order";
        throw Error(Errc::parse_error, os.str());
      }
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.z;
    }
  }
  return g;
}

Grid read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open grid file '" + path + "'");
  return read_grid_csv(in);
}

void write_grid_csv(std::ostream& out, const Grid& grid) {
  out << "s,t,z\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i)
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j)
      out << grid.s(i) << ',' << grid.t(j) << ',' << grid.values(i, j) << '\n';
}

Grid sample_grid(const Field& z, double s0, double s1, int ns, double t0, double t1, int nt) {
  if (ns < 2 || nt < 2 || !(s1 > s0) || !(t1 > t0))
    throw Error(Errc::invalid_argument, "grid needs at least 2 x 2 points on a nonempty box");
  Grid g;
  g.s0 = s0;
  g.ds = (s1 - s0) / (ns - 1);
  g.t0 = t0;
  g.dt = (t1 - t0) / (nt - 1);
  g.values.resize(ns, nt);
  for (int i = 0; i < ns; ++i) {
    const Field::Column col = z.column(g.s(i));
    for (int j = 0; j < nt; ++j) g.values(i, j) = col(g.t(j)).value;
  }
  return g;
}

GridField::GridField(Grid grid) : grid_(std::move(grid)) {
  if (grid_.values.rows() < 2 || grid_.values.cols() < 2)
    throw Error(Errc::invalid_argument, "grid needs at least 2 x 2 points");
  zs_ = node_slopes(grid_.values, 0, grid_.ds);
  zt_ = node_slopes(grid_.values, 1, grid_.dt);
  zst_ = node_slopes(zs_, 1, grid_.dt);
}

Jet GridField::jet(double s, double t) const {
  const double slack = 1e-12;
  const double xs = (s - grid_.s0) / grid_.ds;
  const double xt = (t - grid_.t0) / grid_.dt;
  const auto ns = static_cast<double>(grid_.values.rows() - 1);
  const auto nt = static_cast<double>(grid_.values.cols() - 1);
  if (!(xs >= -slack && xs <= ns + slack && xt >= -slack && xt <= nt + slack)) {
    std::ostringstream os;
    os << "(" << s << ", " << t << ") outside the observation grid";
    throw Error(Errc::out_of_rectangle, os.str());
  }
  const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::max(0.0, std::floor(xs))),
                                                grid_.values.rows() - 2);
  const Eigen::Index j = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::max(0.0, std::floor(xt))),
                                                grid_.values.cols() - 2);
  const Hermite hs(xs - static_cast<double>(i));
  const Hermite ht(xt - static_cast<double>(j));
  const double ds = grid_.ds, dt = grid_.dt;

  // Basis values and derivatives along s for the corners 0 and 1, each
  // paired with the value-weight and the slope-weight.
  const double vs[2][2] = {{hs.h00, hs.h10 * ds}, {hs.h01, hs.h11 * ds}};
  const double ws[2][2] = {{hs.d00 / ds, hs.d10}, {hs.d01 / ds, hs.d11}};
  const double vt[2][2] = {{ht.h00, ht.h10 * dt}, {ht.h01, ht.h11 * dt}};
  const double wt[2][2] = {{ht.d00 / dt, ht.d10}, {ht.d01 / dt, ht.d11}};

  Jet out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Eigen::Index ii = i + a, jj = j + b;
      // Node data: z, z_s, z_t, z_st.
      const double f[2][2] = {{grid_.values(ii, jj), zt_(ii, jj)}, {zs_(ii, jj), zst_(ii, jj)}};
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
          out.value += f[p][q] * vs[a][p] * vt[b][q];
          out.d1 += f[p][q] * ws[a][p] * vt[b][q];
          out.d2 += f[p][q] * vs[a][p] * wt[b][q];
          out.d12 += f[p][q] * ws[a][p] * wt[b][q];
        }
      }
    }
  }
  return out;
}

}  // namespace rfmle
