#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "support.hpp"
#include "tpa/coherent.hpp"

namespace tpa {
namespace {

using Mat = Eigen::Matrix3cd;

// Direct Lindblad integration in the (g, e, f) basis with a fixed RK4 step:
// L1 = √Γe |g><e|, L2 = √Γf |e><f|, H_drive = Σ i α*_j L_j − i α_j L_j†.
struct Lindblad {
  Atom atom;
  CoherentDrive drive;

  Mat rhs(const Mat& rho, double t) const {
    Mat l1 = Mat::Zero(), l2 = Mat::Zero(), h = Mat::Zero();
    l1(0, 1) = std::sqrt(atom.gamma_e);
    l2(1, 2) = std::sqrt(atom.gamma_f);
    h(1, 1) = atom.delta1;
    h(2, 2) = atom.delta1 + atom.delta2;
    const double a1 = std::sqrt(drive.n1) * gaussian_envelope(drive.omega1, 0.0, t);
    const double a2 = std::sqrt(drive.n2) * gaussian_envelope(drive.omega2, drive.mu, t);
    const std::complex<double> i{0.0, 1.0};
    h += i * a1 * l1 - i * a1 * l1.adjoint() + i * a2 * l2 - i * a2 * l2.adjoint();
    Mat out = -i * (h * rho - rho * h);
    for (const Mat* l : {&l1, &l2}) {
      const Mat ld = l->adjoint();
      out += (*l) * rho * ld - 0.5 * (ld * (*l) * rho + rho * ld * (*l));
    }
    return out;
  }

  Mat run(double t0, double t1, double dt) const {
    Mat rho = Mat::Zero();
    rho(0, 0) = 1.0;
    const int n = int(std::ceil((t1 - t0) / dt));
    const double h = (t1 - t0) / n;
    double t = t0;
    for (int k = 0; k < n; ++k, t = t0 + k * h) {
      const Mat k1 = rhs(rho, t), k2 = rhs(rho + 0.5 * h * k1, t + 0.5 * h);
      const Mat k3 = rhs(rho + 0.5 * h * k2, t + 0.5 * h), k4 = rhs(rho + h * k3, t + h);
      rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
  }
};

Mat as_matrix(const DensityMatrix& d) {
  const auto f = d.full();
  Mat m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = f[3 * r + c];
  return m;
}

TEST(Coherent, MatchesDirectLindbladIntegration) {
  const std::vector<std::pair<Atom, CoherentDrive>> cases{
      {atom_from_ratio(1.0), {1.0, 1.0, 1.2, 1.9, 0.8}},
      {atom_from_ratio(0.3, 0.6, -0.4), {0.5, 2.0, 0.7, 2.5, 1.5}},
  };
  for (const auto& [atom, drive] : cases) {
    const TimeWindow w = coherent_window(atom, drive, 5);
    const DensityTrajectory traj = evolve(atom, drive, w);
    const Lindblad ref{atom, drive};
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
      const Mat expect = ref.run(w.t_start, traj.times[k], 1e-3);
      EXPECT_LT((as_matrix(traj.states[k]) - expect).cwiseAbs().maxCoeff(), 1e-6) << "t = " << traj.times[k];
    }
  }
}

TEST(Coherent, TraceAndPositivity) {
  testing::Rng rng(41);
  for (int k = 0; k < 10; ++k) {
    const Atom atom = testing::random_atom(rng, k % 2 == 1);
    const CoherentDrive d{testing::uniform(rng, 0.0, 3.0), testing::uniform(rng, 0.0, 3.0),
                          testing::log_uniform(rng, 0.3, 3.0), testing::log_uniform(rng, 0.3, 3.0),
                          testing::uniform(rng, -1.0, 2.0)};
    const DensityTrajectory traj = evolve(atom, d, coherent_window(atom, d, 50));
    for (const auto& s : traj.states) {
      EXPECT_NEAR(s.trace(), 1.0, 1e-8);
      const Eigen::SelfAdjointEigenSolver<Mat> es(as_matrix(s));
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-7);
    }
  }
}

TEST(Coherent, CoherencesStayRealOnResonance) {
  const Atom atom = atom_from_ratio(0.7);
  const CoherentDrive d{1.0, 1.0, 0.9, 1.6, 0.5};
  for (const auto& s : evolve(atom, d, coherent_window(atom, d, 40)).states) {
    EXPECT_EQ(s.ge.imag(), 0.0);
    EXPECT_EQ(s.gf.imag(), 0.0);
    EXPECT_EQ(s.ef.imag(), 0.0);
  }
}

TEST(Coherent, EmptyDriveLeavesGroundState) {
  const Atom atom = atom_from_ratio(1.0);
  const CoherentDrive d{0.0, 0.0, 1.0, 1.0, 0.0};
  for (const auto& s : evolve(atom, d, coherent_window(atom, d, 20)).states) {
    EXPECT_EQ(s.ff, 0.0);
    EXPECT_EQ(s.gg, 1.0);
  }
  EXPECT_EQ(pf_max_coherent(atom, d).p_max, 0.0);
}

TEST(Coherent, PeakMatchesTrajectoryMaximum) {
  const Atom atom = atom_from_ratio(0.01);
  const CoherentDrive d{1.0, 1.0, 0.024, 2.4, 60.0};
  const Peak p = pf_max_coherent(atom, d);
  EXPECT_NEAR(p.p_max, 0.2295, 5e-4);
  double best = 0.0;
  for (const auto& s : evolve(atom, d, coherent_window(atom, d)).states) best = std::max(best, s.ff);
  EXPECT_GE(p.p_max, best - 1e-10);
}

TEST(Coherent, ErrorsAreTyped) {
  const Atom atom = atom_from_ratio(1.0);
  EXPECT_THROW(validate(CoherentDrive{-1.0, 1.0, 1.0, 1.0, 0.0}), Error);
  EXPECT_THROW(validate(CoherentDrive{1.0, 1.0, 0.0, 1.0, 0.0}), Error);
  const CoherentDrive d{1.0, 1.0, 1.0, 1.0, 0.0};
  try {
    evolve(atom, d, {-0.5, 0.5, 10, false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::window_too_small);
  }
  CoherentOptions tight;
  tight.max_steps = 5;
  try {
    evolve(atom, d, coherent_window(atom, d, 10), tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::tolerance_unreachable);
  }
}

}  // namespace
}  // namespace tpa
