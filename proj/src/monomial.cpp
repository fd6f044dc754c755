#include "biotvem/monomial.hpp"

#include <Eigen/QR>
#include <algorithm>

namespace biotvem {

namespace {

std::vector<std::array<int, 3>> graded_lex_exponents(int dim, int degree) {
  std::vector<std::array<int, 3>> out;
  for (int d = 0; d <= degree; ++d) {
    if (dim == 1) {
      out.push_back({d, 0, 0});
    } else if (dim == 2) {
      for (int t1 = d; t1 >= 0; --t1) out.push_back({t1, d - t1, 0});
    } else {
      for (int t1 = d; t1 >= 0; --t1)
        for (int t2 = d - t1; t2 >= 0; --t2) out.push_back({t1, t2, d - t1 - t2});
    }
  }
  return out;
}

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

} // namespace

MonomialBasis::MonomialBasis(int dim, int degree, const VecX& center, double h)
    : dim_(dim), degree_(degree), center_(center), h_(h),
      exps_(graded_lex_exponents(dim, degree)) {
  if (dim < 1 || dim > 3 || degree < 0 || h <= 0.0 || center.size() != dim)
    throw Error(ErrorKind::Internal, "invalid monomial basis descriptor");
}

int MonomialBasis::count(int dim, int degree) {
  // C(degree + dim, dim)
  long num = 1, den = 1;
  for (int i = 1; i <= dim; ++i) {
    num *= degree + i;
    den *= i;
  }
  return static_cast<int>(num / den);
}

int MonomialBasis::member_degree(int i) const {
  return exps_[i][0] + exps_[i][1] + exps_[i][2];
}

int MonomialBasis::index_of(const std::array<int, 3>& t) const {
  for (int i = 0; i < size(); ++i)
    if (exps_[i] == t) return i;
  return -1;
}

double MonomialBasis::value(int i, const VecX& x) const {
  double v = 1.0;
  for (int j = 0; j < dim_; ++j) v *= ipow((x[j] - center_[j]) / h_, exps_[i][j]);
  return v;
}

VecX MonomialBasis::grad(int i, const VecX& x) const {
  VecX g = VecX::Zero(dim_);
  for (int j = 0; j < dim_; ++j) {
    if (exps_[i][j] == 0) continue;
    double v = exps_[i][j] / h_;
    for (int l = 0; l < dim_; ++l) {
      int e = exps_[i][l] - (l == j ? 1 : 0);
      v *= ipow((x[l] - center_[l]) / h_, e);
    }
    g[j] = v;
  }
  return g;
}

MatX MonomialBasis::hessian(int i, const VecX& x) const {
  MatX H = MatX::Zero(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    for (int k = j; k < dim_; ++k) {
      std::array<int, 3> e = exps_[i];
      double c = 1.0;
      for (int d : {j, k}) {
        if (e[d] == 0) { c = 0.0; break; }
        c *= e[d] / h_;
        e[d] -= 1;
      }
      if (c != 0.0)
        for (int l = 0; l < dim_; ++l) c *= ipow((x[l] - center_[l]) / h_, e[l]);
      H(j, k) = c;
      H(k, j) = c;
    }
  return H;
}

double MonomialBasis::laplacian(int i, const VecX& x) const {
  return hessian(i, x).trace();
}

VecX MonomialBasis::values(const VecX& x) const {
  VecX v(size());
  for (int i = 0; i < size(); ++i) v[i] = value(i, x);
  return v;
}

VecX MonomialBasis::derivative_coefficients(int i, int j) const {
  VecX c = VecX::Zero(size());
  if (exps_[i][j] > 0) {
    std::array<int, 3> e = exps_[i];
    e[j] -= 1;
    int idx = index_of(e);
    c[idx] = exps_[i][j] / h_;
  }
  return c;
}

int ComplementBasis::dimension(int dim, int degree) {
  if (dim == 3)
    return 3 * MonomialBasis::count(3, degree) - MonomialBasis::count(3, degree + 1) + 1;
  return 2 * MonomialBasis::count(2, degree) - (MonomialBasis::count(2, degree + 1) - 1);
}

ComplementBasis::ComplementBasis(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::Internal, "complement basis: dim");
  const int nm = MonomialBasis::count(dim, degree);
  const int target = dimension(dim, degree);
  if (target == 0) {
    members_ = MatX::Zero(dim * nm, 0);
    return;
  }
  // Candidates: y ^ (m_a e_i) in 3D (y = scaled coordinate), y_perp m_a in 2D.
  // Products of scaled monomials add exponents; coefficients stay +-1.
  std::vector<std::array<int, 3>> exps = graded_lex_exponents(dim, degree);
  std::vector<std::array<int, 3>> exps_lo = graded_lex_exponents(dim, degree - 1);
  auto idx_of = [&](std::array<int, 3> t) {
    for (size_t i = 0; i < exps.size(); ++i)
      if (exps[i] == t) return static_cast<int>(i);
    throw Error(ErrorKind::Internal, "complement basis: exponent lookup");
  };
  std::vector<VecX> candidates;
  if (dim == 3) {
    // y ^ (m e_i): components via the Levi-Civita pattern.
    // y ^ e_0 = (0, y2, -y1); y ^ e_1 = (-y2, 0, y0); y ^ e_2 = (y1, -y0, 0).
    for (const auto& t : exps_lo)
      for (int i = 0; i < 3; ++i) {
        VecX c = VecX::Zero(3 * nm);
        auto add = [&](int comp, int ycoord, double s) {
          std::array<int, 3> e = t;
          e[ycoord] += 1;
          c[comp * nm + idx_of(e)] = s;
        };
        if (i == 0) { add(1, 2, 1.0); add(2, 1, -1.0); }
        if (i == 1) { add(0, 2, -1.0); add(2, 0, 1.0); }
        if (i == 2) { add(0, 1, 1.0); add(1, 0, -1.0); }
        candidates.push_back(c);
      }
  } else {
    // y_perp m = (y2 m, -y1 m)
    for (const auto& t : exps_lo) {
      VecX c = VecX::Zero(2 * nm);
      std::array<int, 3> e = t;
      e[1] += 1;
      c[0 * nm + idx_of(e)] = 1.0;
      e = t;
      e[0] += 1;
      c[1 * nm + idx_of(e)] = -1.0;
      candidates.push_back(c);
    }
  }
  MatX C(dim * nm, static_cast<int>(candidates.size()));
  for (size_t j = 0; j < candidates.size(); ++j) C.col(static_cast<int>(j)) = candidates[j];
  Eigen::ColPivHouseholderQR<MatX> qr(C);
  qr.setThreshold(1e-10);
  if (qr.rank() != target)
    throw Error(ErrorKind::Internal, "complement basis rank mismatch");
  // Deterministic independent subset: first `target` pivot columns.
  members_.resize(dim * nm, target);
  const auto& perm = qr.colsPermutation().indices();
  std::vector<int> pick(perm.data(), perm.data() + target);
  std::sort(pick.begin(), pick.end());
  for (int j = 0; j < target; ++j) members_.col(j) = C.col(pick[j]);
}

} // namespace biotvem
