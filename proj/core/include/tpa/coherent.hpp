#pragma once

// Three-level atom driven by two coherent Gaussian pulses (Lindblad
// evolution of the 3x3 density matrix).

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "tpa/absorption.hpp"
#include "tpa/model.hpp"
#include "tpa/report.hpp"

namespace tpa {

// Pulse j carries n_j photons on average in the real envelope
// (Ω_j²/2π)^{1/4} exp(−Ω_j²(t − μ_j)²/4), with μ_1 = 0 and μ_2 = mu.
struct CoherentDrive {
  double n1 = 1.0;
  double n2 = 1.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double mu = 0.0;
};

void validate(const CoherentDrive& drive);

double gaussian_envelope(double omega, double center, double t);

// Independent entries of the Hermitian density matrix.
struct DensityMatrix {
  double gg = 1.0, ee = 0.0, ff = 0.0;
  std::complex<double> ge, gf, ef;

  double trace() const { return gg + ee + ff; }
  // Row-major 3x3 in the (g, e, f) basis.
  std::array<std::complex<double>, 9> full() const;
};

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

struct CoherentOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  long max_steps = 2'000'000;
};

// Starts 9√2/Ω before the earlier pulse peak (the ground state is exact
// there to ~1e-30) and ends 10/Γf after the later pulse has passed.
TimeWindow coherent_window(const Atom& atom, const CoherentDrive& drive, int n_samples = 2000);

// Starts in the ground state at window.t_start and samples the requested grid.
DensityTrajectory evolve(const Atom& atom, const CoherentDrive& drive, const TimeWindow& window,
                         const CoherentOptions& opt = {});

// Maximum of ρ_ff over coherent_window, golden-refined between samples.
Peak pf_max_coherent(const Atom& atom, const CoherentDrive& drive, const CoherentOptions& opt = {});

void write_trajectory_csv(const std::string& path, const DensityTrajectory& traj, const Metadata& meta);

}  // namespace tpa
