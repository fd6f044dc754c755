#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace biotvem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Error categories map to CLI exit diagnostics ("<category>: <message>").
enum class ErrorKind { Parse, Topology, Geometry, Config, Assembly, Solver, Internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  const char* kind_name() const {
    switch (kind_) {
      case ErrorKind::Parse: return "parse-error";
      case ErrorKind::Topology: return "topology-error";
      case ErrorKind::Geometry: return "geometry-error";
      case ErrorKind::Config: return "config-error";
      case ErrorKind::Assembly: return "assembly-error";
      case ErrorKind::Solver: return "solver-error";
      default: return "internal-error";
    }
  }
private:
  ErrorKind kind_;
};

} // namespace biotvem
