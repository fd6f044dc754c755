#include "biotvem/errors.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace biotvem {

ErrorReport compute_errors(const CoupledProblem& prob, const DofLayout& layout,
                           const SolutionFields& fields) {
  const PolyMesh3& mesh = *prob.mesh;
  const SurfaceMesh2& surface = *prob.surface;
  const ElementSet& es = *prob.elements;
  const ManufacturedCase& mc = *prob.mcase;

  ErrorReport rep;
  rep.h_bulk = mesh.mesh_size();
  rep.h_plate = surface.mesh_size();
  rep.iterations = fields.iterations;

  double eu2 = 0.0, ep2 = 0.0;
  double nu2 = 0.0, np2 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const StokesCellElement& elem = es.cells[c];
    VecX local(elem.ndof());
    {
      std::vector<int> g = cell_dof_globals(mesh, elem, layout);
      for (int k = 0; k < elem.ndof(); ++k) local[k] = fields.full[g[k]];
    }
    const PressureElement& pe = es.pressures[c];
    VecX pc(4);
    for (int a = 0; a < 4; ++a) pc[a] = fields.full[layout.p(c, a)];

    const QuadRule& q = elem.quad();
    for (int k = 0; k < q.size(); ++k) {
      const Vec3 x = q.points.row(k).transpose();
      const double wq = q.weights[k];
      const Vec3 ue = mc.u(x);
      const Mat3 ge = mc.grad_u(x);
      Vec3 du = ue - elem.eval_pi_nabla(local, x);
      Mat3 dg = ge - elem.eval_pi_nabla_grad(local, x);
      eu2 += wq * (du.squaredNorm() + dg.squaredNorm());
      nu2 += wq * (ue.squaredNorm() + ge.squaredNorm());
      double ph = 0.0;
      for (int a = 0; a < 4; ++a) ph += pc[a] * pe.mono1.value(a, x);
      const double pex = mc.p(x);
      const double dp = pex - ph;
      ep2 += wq * dp * dp;
      np2 += wq * pex * pex;
    }
  }

  double ephi2 = 0.0, ew2 = 0.0;
  double nphi2 = 0.0, nw2 = 0.0;
  const Vec3 t1 = surface.tangent1(), t2 = surface.tangent2();
  for (int pl = 0; pl < surface.num_polygons(); ++pl) {
    const PlatePressureElement& ppe = es.ppressures[pl];
    const PlateElement& we = es.plates[pl];
    const SurfacePolygon& poly = surface.polygon(pl);
    const int nv = static_cast<int>(poly.vertices.size());
    VecX phil(nv), wl(3 * nv);
    for (int l = 0; l < nv; ++l) {
      phil[l] = fields.full[layout.phi(poly.vertices[l])];
      for (int cmp = 0; cmp < 3; ++cmp)
        wl[3 * l + cmp] = fields.full[layout.w(poly.vertices[l], cmp)];
    }
    const Mat2 Hh2 = we.eval_hess(wl);
    const QuadRule& q = we.quad();
    for (int k = 0; k < q.size(); ++k) {
      const Vec2 x = q.points.row(k).transpose();
      const Vec3 x3 = surface.to3d(x);
      const double wq = q.weights[k];

      const double phie = mc.phi(x3);
      const double dphi = phie - ppe.eval(phil, x);
      const Vec3 gphi3 = mc.grad_phi(x3);
      const Vec2 gphit(t1.dot(gphi3), t2.dot(gphi3));
      Vec2 dgp = gphit - ppe.eval_grad(phil, x);
      ephi2 += wq * (dphi * dphi + dgp.squaredNorm());
      nphi2 += wq * (phie * phie + gphit.squaredNorm());

      const double wex = mc.w(x3);
      const double dw = wex - we.eval(wl, x);
      const Vec3 gw3 = mc.grad_w(x3);
      const Vec2 gwt(t1.dot(gw3), t2.dot(gw3));
      Vec2 dgw = gwt - we.eval_grad(wl, x);
      const Mat3 H3 = mc.hess_w(x3);
      Mat2 He;
      He(0, 0) = t1.dot(H3 * t1);
      He(0, 1) = t1.dot(H3 * t2);
      He(1, 0) = t2.dot(H3 * t1);
      He(1, 1) = t2.dot(H3 * t2);
      ew2 += wq * (dw * dw + dgw.squaredNorm() + (He - Hh2).squaredNorm());
      nw2 += wq * (wex * wex + gwt.squaredNorm() + He.squaredNorm());
    }
  }

  rep.abs_u = std::sqrt(eu2);
  rep.abs_p = std::sqrt(ep2);
  rep.abs_phi = std::sqrt(ephi2);
  rep.abs_w = std::sqrt(ew2);
  rep.norm_u = std::sqrt(nu2);
  rep.norm_p = std::sqrt(np2);
  rep.norm_phi = std::sqrt(nphi2);
  rep.norm_w = std::sqrt(nw2);
  // The convergence table uses relative errors per field and combines them in
  // the Euclidean sense for the total column.
  auto rel = [](double e, double n) { return n > 0.0 ? e / n : e; };
  rep.e_u = rel(rep.abs_u, rep.norm_u);
  rep.e_p = rel(rep.abs_p, rep.norm_p);
  rep.e_phi = rel(rep.abs_phi, rep.norm_phi);
  rep.e_w = rel(rep.abs_w, rep.norm_w);
  rep.e_total = std::sqrt(rep.e_u * rep.e_u + rep.e_p * rep.e_p + rep.e_phi * rep.e_phi +
                          rep.e_w * rep.e_w);
  return rep;
}

namespace {

double rate(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0) || !(h0 > 0.0) || !(h1 > 0.0) || h0 == h1)
    return std::numeric_limits<double>::quiet_NaN();
  return std::log(e0 / e1) / std::log(h0 / h1);
}

} // namespace

EOCTable eoc(const std::vector<ErrorReport>& reports) {
  EOCTable table;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < reports.size(); ++i) {
    EOCRow row;
    row.report = reports[i];
    if (i == 0) {
      row.r_total = row.r_u = row.r_p = row.r_w = row.r_phi = nan;
    } else {
      const ErrorReport& a = reports[i - 1];
      const ErrorReport& b = reports[i];
      row.r_total = rate(a.e_total, b.e_total, a.h_bulk, b.h_bulk);
      row.r_u = rate(a.e_u, b.e_u, a.h_bulk, b.h_bulk);
      row.r_p = rate(a.e_p, b.e_p, a.h_bulk, b.h_bulk);
      row.r_w = rate(a.e_w, b.e_w, a.h_plate, b.h_plate);
      row.r_phi = rate(a.e_phi, b.e_phi, a.h_plate, b.h_plate);
    }
    table.push_back(row);
  }
  return table;
}

std::string format_eoc_table(const EOCTable& table) {
  std::ostringstream os;
  os << std::setw(6) << "level" << std::setw(11) << "h_bulk" << std::setw(12) << "e_u"
     << std::setw(7) << "r_u" << std::setw(12) << "e_p" << std::setw(7) << "r_p"
     << std::setw(12) << "e_phi" << std::setw(7) << "r_phi" << std::setw(12) << "e_w"
     << std::setw(7) << "r_w" << std::setw(12) << "e_total" << std::setw(8) << "r_total"
     << std::setw(7) << "iters" << "\n";
  for (size_t i = 0; i < table.size(); ++i) {
    const EOCRow& r = table[i];
    auto num = [&os](double v, int w, int prec) {
      os << std::setw(w);
      if (std::isnan(v))
        os << "-";
      else
        os << std::setprecision(prec) << v;
    };
    os << std::setw(6) << i;
    os << std::scientific;
    num(r.report.h_bulk, 11, 3);
    num(r.report.e_u, 12, 3);
    os << std::fixed;
    num(r.r_u, 7, 2);
    os << std::scientific;
    num(r.report.e_p, 12, 3);
    os << std::fixed;
    num(r.r_p, 7, 2);
    os << std::scientific;
    num(r.report.e_phi, 12, 3);
    os << std::fixed;
    num(r.r_phi, 7, 2);
    os << std::scientific;
    num(r.report.e_w, 12, 3);
    os << std::fixed;
    num(r.r_w, 7, 2);
    os << std::scientific;
    num(r.report.e_total, 12, 3);
    os << std::fixed;
    num(r.r_total, 8, 2);
    os << std::setw(7) << r.report.iterations << "\n";
  }
  return os.str();
}

std::string eoc_csv(const EOCTable& table) {
  std::ostringstream os;
  os << "level,h_bulk,h_plate,e_total,r_total,e_u,r_u,e_p,r_p,e_w,r_w,e_phi,r_phi,iters\n";
  os << std::setprecision(16);
  auto num = [&os](double v) {
    if (std::isnan(v))
      os << "nan";
    else
      os << v;
  };
  for (size_t i = 0; i < table.size(); ++i) {
    const EOCRow& r = table[i];
    os << i << ",";
    num(r.report.h_bulk);
    os << ",";
    num(r.report.h_plate);
    os << ",";
    num(r.report.e_total);
    os << ",";
    num(r.r_total);
    os << ",";
    num(r.report.e_u);
    os << ",";
    num(r.r_u);
    os << ",";
    num(r.report.e_p);
    os << ",";
    num(r.r_p);
    os << ",";
    num(r.report.e_w);
    os << ",";
    num(r.r_w);
    os << ",";
    num(r.report.e_phi);
    os << ",";
    num(r.r_phi);
    os << "," << r.report.iterations << "\n";
  }
  return os.str();
}

} // namespace biotvem
