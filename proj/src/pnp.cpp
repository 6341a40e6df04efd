// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/pnp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "posesym/error.hpp"
#include "posesym/symmetry.hpp"

namespace posesym {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

void CameraModel::validate() const {
  const Eigen::Matrix3d& k = intrinsics;
  if (!k.allFinite()) throw DataError("camera intrinsics are not finite");
  if (k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0) {
    throw DataError("camera intrinsics must be upper triangular");
  }
  if (!(k(0, 0) > 0.0 && k(1, 1) > 0.0 && k(2, 2) > 0.0)) {
    throw DataError("camera focal entries must be positive");
  }
  if (!is_valid_pose(extrinsics, 1e-6)) throw DataError("camera extrinsics are not rigid");
}

Eigen::Vector2d CameraModel::project(const Eigen::Vector3d& camera_point) const {
  const Eigen::Vector3d h = intrinsics * camera_point;
  return h.head<2>() / h.z();
}

std::size_t CorrespondenceSet::total() const {
  std::size_t n = 0;
  for (const auto& v : views) n += v.size();
  return n;
}

namespace {

void check_inputs(const CorrespondenceSet& corr, std::span<const CameraModel> cams) {
  if (corr.views.size() != cams.size()) {
    throw DataError("correspondence views and cameras differ in count");
  }
  for (const auto& c : cams) c.validate();
  if (corr.total() < 3) {
    throw DataError("underdetermined: at least 3 correspondences are required");
  }
  Eigen::MatrixXd pts(3, corr.total());
  std::size_t i = 0;
  for (const auto& view : corr.views)
    for (const auto& c : view) pts.col(i++) = c.object_point;
  const Eigen::Vector3d mean = pts.rowwise().mean();
  pts.colwise() -= mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(pts);
  const auto s = svd.singularValues();
  if (!(s(0) > 0.0) || !(s(1) > 1e-9 * s(0))) {
    throw DataError("degenerate correspondences: object points are collinear");
  }
}

CorrespondenceSet undistorted(const CorrespondenceSet& corr, const UndistortFn& fn) {
  if (!fn) return corr;
  CorrespondenceSet out = corr;
  for (std::size_t j = 0; j < out.views.size(); ++j)
    for (auto& c : out.views[j]) c.pixel = fn(j, c.pixel);
  return out;
}

double cost_of(const Pose& pose, const CorrespondenceSet& corr,
               std::span<const CameraModel> cams) {
  Eigen::VectorXd r;
  pnp_residuals_and_jacobian(pose, corr, cams, r, nullptr);
  return r.squaredNorm();
}

// Similarity normalization: centroid to origin, mean distance sqrt(dim).
template <int Dim>
Eigen::Matrix<double, Dim + 1, Dim + 1> normalizer(
    const std::vector<Eigen::Matrix<double, Dim, 1>>& pts) {
  Eigen::Matrix<double, Dim, 1> mean = Eigen::Matrix<double, Dim, 1>::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double spread = 0.0;
  for (const auto& p : pts) spread += (p - mean).norm();
  spread /= static_cast<double>(pts.size());
  const double s = spread > 0.0 ? std::sqrt(double(Dim)) / spread : 1.0;
  Eigen::Matrix<double, Dim + 1, Dim + 1> t = Eigen::Matrix<double, Dim + 1, Dim + 1>::Identity();
  t.template topLeftCorner<Dim, Dim>() *= s;
  t.template topRightCorner<Dim, 1>() = -s * mean;
  return t;
}

// Camera-frame transform from a single view with a DLT on normalized image
// coordinates. Requires >= 6 non-coplanar points.
Pose dlt_camera_pose(const std::vector<Eigen::Vector3d>& x,
                     const std::vector<Eigen::Vector2d>& uv) {
  const auto tx = normalizer<3>(x);
  const auto tu = normalizer<2>(uv);
  const std::size_t n = x.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 12);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4d xh = tx * x[i].homogeneous();
    const Eigen::Vector3d uh = tu * uv[i].homogeneous();
    a.block<1, 4>(2 * i, 0) = xh.transpose();
    a.block<1, 4>(2 * i, 8) = -uh.x() * xh.transpose();
    a.block<1, 4>(2 * i + 1, 4) = xh.transpose();
    a.block<1, 4>(2 * i + 1, 8) = -uh.y() * xh.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd v = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> pn;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) pn(r, c) = v(4 * r + c);
  Eigen::Matrix<double, 3, 4> p = tu.inverse() * pn * tx;
  Eigen::Matrix3d m = p.leftCols<3>();
  if (m.determinant() < 0) {
    p = -p;
    m = -m;
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> msvd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double scale = msvd.singularValues().mean();
  if (!(scale > 0.0)) throw NumericalError("DLT initialization failed");
  return {project_to_rotation(m), p.col(3) / scale};
}

// Camera-frame transform from coplanar points via a plane homography.
Pose homography_camera_pose(const std::vector<Eigen::Vector3d>& x,
                            const std::vector<Eigen::Vector2d>& uv) {
  const std::size_t n = x.size();
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : x) c += p;
  c /= static_cast<double>(n);
  Eigen::MatrixXd centered(3, n);
  for (std::size_t i = 0; i < n; ++i) centered.col(i) = x[i] - c;
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(centered, Eigen::ComputeFullU);
  const Eigen::Vector3d b1 = psvd.matrixU().col(0), b2 = psvd.matrixU().col(1);
  const Eigen::Vector3d b3 = b1.cross(b2);

  std::vector<Eigen::Vector2d> plane(n);
  for (std::size_t i = 0; i < n; ++i) plane[i] = {b1.dot(x[i] - c), b2.dot(x[i] - c)};
  const auto tp = normalizer<2>(plane);
  const auto tu = normalizer<2>(uv);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d ph = tp * plane[i].homogeneous();
    const Eigen::Vector3d uh = tu * uv[i].homogeneous();
    a.block<1, 3>(2 * i, 0) = ph.transpose();
    a.block<1, 3>(2 * i, 6) = -uh.x() * ph.transpose();
    a.block<1, 3>(2 * i + 1, 3) = ph.transpose();
    a.block<1, 3>(2 * i + 1, 6) = -uh.y() * ph.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd v = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col) hn(r, col) = v(3 * r + col);
  Eigen::Matrix3d h = tu.inverse() * hn * tp;
  if (h(2, 2) < 0) h = -h;  // plane centroid in front of the camera
  const double scale = 0.5 * (h.col(0).norm() + h.col(1).norm());
  if (!(scale > 0.0)) throw NumericalError("homography initialization failed");
  const Eigen::Vector3d r1 = h.col(0) / scale, r2 = h.col(1) / scale;
  Eigen::Matrix3d rb;
  rb << r1, r2, r1.cross(r2);
  Eigen::Matrix3d basis;
  basis << b1, b2, b3;
  const Eigen::Matrix3d m = project_to_rotation(rb * basis.transpose());
  return {m, h.col(2) / scale - m * c};
}

struct LmOutcome {
  Pose pose;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

LmOutcome levenberg_marquardt(Pose pose, const CorrespondenceSet& corr,
                              std::span<const CameraModel> cams, int max_iterations,
                              double step_tolerance) {
  LmOutcome out;
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  pnp_residuals_and_jacobian(pose, corr, cams, r, &j);
  double cost = r.squaredNorm();
  out.trace.push_back(cost);
  Matrix6d a = j.transpose() * j;
  Vector6d g = j.transpose() * r;
  double mu = 1e-3 * a.diagonal().maxCoeff();
  double nu = 2.0;
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const Matrix6d damped = a + mu * Matrix6d::Identity();
    const Vector6d step = damped.ldlt().solve(-g);
    if (!step.allFinite()) break;
    const Pose candidate = apply_increment(pose, step);
    Eigen::VectorXd r_new;
    pnp_residuals_and_jacobian(candidate, corr, cams, r_new, nullptr);
    const double cost_new = r_new.squaredNorm();
    const double predicted = cost - (r + j * step).squaredNorm();
    const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;
    if (cost_new <= cost && (rho > 0.0 || cost_new == cost)) {
      pose = candidate;
      cost = cost_new;
      out.trace.push_back(cost);
      pnp_residuals_and_jacobian(pose, corr, cams, r, &j);
      a = j.transpose() * j;
      g = j.transpose() * r;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (step.norm() < step_tolerance || cost == 0.0) {
        out.converged = true;
        break;
      }
    } else {
      if (step.norm() < step_tolerance) {
        out.converged = true;
        break;
      }
      mu *= nu;
      nu *= 2.0;
    }
  }
  out.pose = pose;
  return out;
}

// Linear estimate from one view, when that view has enough points.
std::optional<Pose> linear_estimate(const std::vector<Correspondence>& view, const CameraModel& cam) {
  const Eigen::Matrix3d kinv = cam.intrinsics.inverse();
  std::vector<Eigen::Vector3d> x;
  std::vector<Eigen::Vector2d> uv;
  for (const auto& c : view) {
    x.push_back(c.object_point);
    uv.push_back((kinv * c.pixel.homogeneous()).hnormalized());
  }
  if (x.size() < 4) return std::nullopt;
  Eigen::MatrixXd centered(3, x.size());
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : x) mean += p;
  mean /= static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) centered.col(i) = x[i] - mean;
  const auto s = Eigen::JacobiSVD<Eigen::MatrixXd>(centered).singularValues();
  const double planarity = s(0) > 0.0 ? s(2) / s(0) : 0.0;
  try {
    if (x.size() >= 6 && planarity > 1e-3) return cam.extrinsics.inverse().compose(dlt_camera_pose(x, uv));
    if (planarity <= 1e-3) return cam.extrinsics.inverse().compose(homography_camera_pose(x, uv));
  } catch (const NumericalError&) {
  }
  return std::nullopt;
}

// Starts from the 24 axis-aligned orientations in front of the view with the
// most points, depth guessed from the image spread.
std::vector<Pose> multi_starts(const CorrespondenceSet& corr, std::span<const CameraModel> cams) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < corr.views.size(); ++j) {
    if (corr.views[j].size() > corr.views[best].size()) best = j;
  }
  const auto& view = corr.views[best];
  const CameraModel& cam = cams[best];
  const Eigen::Matrix3d kinv = cam.intrinsics.inverse();
  Eigen::Vector3d cx = Eigen::Vector3d::Zero();
  Eigen::Vector2d cu = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> uv;
  for (const auto& c : view) {
    uv.push_back((kinv * c.pixel.homogeneous()).hnormalized());
    cx += c.object_point;
    cu += uv.back();
  }
  cx /= static_cast<double>(view.size());
  cu /= static_cast<double>(view.size());
  double sx = 0.0, su = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    sx += (view[i].object_point - cx).norm();
    su += (uv[i] - cu).norm();
  }
  const double depth = su > 0.0 ? sx / su : 1.0;
  std::vector<Pose> starts;
  for (const auto& rot : octahedral_group()) {
    starts.push_back(cam.extrinsics.inverse().compose(Pose{rot, depth * cu.homogeneous() - rot * cx}));
  }
  return starts;
}

}  // namespace

void pnp_residuals_and_jacobian(const Pose& pose, const CorrespondenceSet& corr,
                                std::span<const CameraModel> cams, Eigen::VectorXd& residuals,
                                Eigen::MatrixXd* jacobian) {
  const std::size_t n = corr.total();
  residuals.resize(2 * n);
  if (jacobian) jacobian->resize(2 * n, 6);
  std::size_t row = 0;
  for (std::size_t j = 0; j < corr.views.size(); ++j) {
    const CameraModel& cam = cams[j];
    const Eigen::Matrix3d& k = cam.intrinsics;
    const Eigen::Matrix3d& rc = cam.extrinsics.rotation;
    for (const auto& c : corr.views[j]) {
      const Eigen::Vector3d rx = pose.rotation * c.object_point;
      const Eigen::Vector3d y = rc * (rx + pose.translation) + cam.extrinsics.translation;
      const Eigen::Vector3d h = k * y;
      const Eigen::Vector2d uv = h.head<2>() / h.z();
      residuals.segment<2>(row) = uv - c.pixel;
      if (jacobian) {
        // d(uv)/dy, then dy/dω = −Rc [R X]×, dy/dδt = Rc.
        Eigen::Matrix<double, 2, 3> duv;
        duv.row(0) = (k.row(0) - uv.x() * k.row(2)) / h.z();
        duv.row(1) = (k.row(1) - uv.y() * k.row(2)) / h.z();
        Eigen::Matrix3d skew;
        skew << 0, -rx.z(), rx.y(), rx.z(), 0, -rx.x(), -rx.y(), rx.x(), 0;
        jacobian->block<2, 3>(row, 0) = -duv * rc * skew;
        jacobian->block<2, 3>(row, 3) = duv * rc;
      }
      row += 2;
    }
  }
}

Pose apply_increment(const Pose& pose, const Vector6d& delta) {
  return {so3_exp(delta.head<3>()) * pose.rotation, pose.translation + delta.tail<3>()};
}

ResidualReport reprojection_residuals(const Pose& pose, const CorrespondenceSet& corr,
                                      std::span<const CameraModel> cams) {
  if (corr.views.size() != cams.size()) {
    throw DataError("correspondence views and cameras differ in count");
  }
  ResidualReport rep;
  double acc = 0.0;
  std::size_t front = 0;
  for (std::size_t j = 0; j < corr.views.size(); ++j) {
    for (const auto& c : corr.views[j]) {
      const Eigen::Vector3d y = cams[j].extrinsics.apply(pose.apply(c.object_point));
      if (!(y.z() > 0.0)) {
        rep.errors.push_back(std::numeric_limits<double>::infinity());
        rep.behind_camera.push_back(true);
        continue;
      }
      const double e = (cams[j].project(y) - c.pixel).norm();
      rep.errors.push_back(e);
      rep.behind_camera.push_back(false);
      acc += e * e;
      ++front;
    }
  }
  rep.rms = front == 0 ? std::numeric_limits<double>::infinity()
                       : std::sqrt(acc / static_cast<double>(front));
  return rep;
}

PnpResult solve_multiview_pnp(const CorrespondenceSet& corr_in,
                              std::span<const CameraModel> cams, const std::optional<Pose>& init,
                              const PnpOptions& options) {
  check_inputs(corr_in, cams);
  const CorrespondenceSet corr = undistorted(corr_in, options.undistort);
  auto run = [&](const Pose& start, int iterations) {
    return levenberg_marquardt(start, corr, cams, iterations, options.step_tolerance);
  };
  auto acceptable = [&](const auto& r) {
    return r.converged && reprojection_residuals(r.pose, corr, cams).rms <= options.max_rms;
  };
  auto better = [&](const auto& a, const auto& b) {
    return cost_of(a.pose, corr, cams) < cost_of(b.pose, corr, cams);
  };
  std::optional<decltype(run(Pose{}, 1))> best;
  if (init) {
    best = run(*init, options.max_iterations);
  } else {
    // a linear start per view; noisy views can give a poor one
    for (std::size_t j = 0; j < corr.views.size(); ++j) {
      if (const auto start = linear_estimate(corr.views[j], cams[j])) {
        auto r = run(*start, options.max_iterations);
        if (!best || better(r, *best)) best = std::move(r);
      }
    }
    if (!best || !acceptable(*best)) {
      for (const Pose& start : multi_starts(corr, cams)) {
        auto r = run(start, 30);
        if (!best || better(r, *best)) best = std::move(r);
      }
      if (!acceptable(*best)) {
        auto r = run(best->pose, options.max_iterations);
        if (!better(*best, r)) best = std::move(r);
      }
    }
  }
  auto& lm = *best;
  PnpResult out;
  out.pose = {project_to_rotation(lm.pose.rotation), lm.pose.translation};
  out.iterations = lm.iterations;
  out.cost_trace = std::move(lm.trace);
  out.rms = reprojection_residuals(out.pose, corr, cams).rms;
  out.converged = lm.converged && out.rms <= options.max_rms;
  return out;
}

Matrix6d pose_covariance(const Pose& pose, const CorrespondenceSet& corr,
                         std::span<const CameraModel> cams, double sigma) {
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  pnp_residuals_and_jacobian(pose, corr, cams, r, &j);
  const Matrix6d info = j.transpose() * j;
  return sigma * sigma * info.inverse();
}

}  // namespace posesym
