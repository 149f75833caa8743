// Copyright 2026 The fluxshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fluxshot/model.h"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "fluxshot/constants.h"
#include "fluxshot/errors.h"

namespace fluxshot {

namespace {

constexpr std::size_t kConvergenceLevels = 6;

std::complex<double> expm1c(std::complex<double> z) {
    if (std::abs(z) < 1e-5) {
        return z * (1.0 + z * (0.5 + z / 6.0));
    }
    return std::exp(z) - 1.0;
}

// Cavity driven at constant eps with a fixed ordinary-frequency pull.
struct CavityPiece {
    std::complex<double> lambda;  // kappa/2 + i Delta, 1/s
    std::complex<double> steady;

    std::complex<double> at(std::complex<double> alpha0, double t) const {
        return steady + (alpha0 - steady) * std::exp(-lambda * t);
    }
    // Integral of alpha over [0, t].
    std::complex<double> integral(std::complex<double> alpha0, double t) const {
        return steady * t + (alpha0 - steady) * (-expm1c(-lambda * t)) / lambda;
    }
};

CavityPiece make_piece(const CavityParams& cavity, double chi_mhz, double drive_amp,
                       double drive_freq_ghz) {
    const double delta_mhz = (drive_freq_ghz - cavity.omega_r_ghz) * 1e3 - chi_mhz;
    const std::complex<double> lambda(0.5 * angular_from_mhz(cavity.kappa_total_mhz()),
                                      angular_from_mhz(delta_mhz));
    const double sqrt_kappa_s = std::sqrt(angular_from_mhz(cavity.kappa_s_mhz));
    return {lambda, -sqrt_kappa_s * drive_amp / lambda};
}

double wrap_angle(double a) {
    a = std::remainder(a, kTwoPi);
    return a;
}

}  // namespace

void FluxoniumParams::validate() const {
    if (!(e_j >= 0.0) || !(e_c > 0.0) || !(e_l > 0.0)) {
        throw ParameterError("fluxonium energies need e_j >= 0 and e_c, e_l > 0");
    }
    if (!std::isfinite(phi_ext) || !std::isfinite(e_j) || !std::isfinite(e_c) ||
        !std::isfinite(e_l)) {
        throw ParameterError("fluxonium parameters must be finite");
    }
}

double EnergySpectrum::transition(Level from, Level to) const {
    const auto a = index_of(from);
    const auto b = index_of(to);
    if (a >= levels.size() || b >= levels.size()) {
        throw LookupError("spectrum does not contain the requested level");
    }
    return levels[b] - levels[a];
}

std::vector<double> fluxonium_eigenvalues(const FluxoniumParams& params, int basis_size) {
    params.validate();
    if (basis_size < 2) {
        throw ParameterError("basis_size must be at least 2");
    }
    const auto n = static_cast<Eigen::Index>(basis_size);
    const double plasma = std::sqrt(8.0 * params.e_c * params.e_l);
    const double osc_length = std::pow(8.0 * params.e_c / params.e_l, 0.25);

    // phi = l (a + a^dag) / sqrt(2); its eigenbasis is a Gauss-Hermite grid in
    // which the cosine potential is diagonal.
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double element = osc_length * std::sqrt(static_cast<double>(k + 1) / 2.0);
        phi(k, k + 1) = element;
        phi(k + 1, k) = element;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> phi_solver(phi);
    const Eigen::VectorXd nodes = phi_solver.eigenvalues();
    const Eigen::MatrixXd& u = phi_solver.eigenvectors();
    Eigen::VectorXd cosines(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        cosines(k) = std::cos(nodes(k) - params.phi_ext);
    }

    Eigen::MatrixXd h = -params.e_j * (u * cosines.asDiagonal() * u.transpose());
    for (Eigen::Index k = 0; k < n; ++k) {
        h(k, k) += plasma * (static_cast<double>(k) + 0.5);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& values = solver.eigenvalues();
    return {values.data(), values.data() + values.size()};
}

EnergySpectrum diagonalize(const FluxoniumParams& params, int basis_size,
                           const DiagonalizeOptions& options) {
    params.validate();
    if (basis_size < 20) {
        throw ParameterError("basis_size must be at least 20");
    }
    int size = basis_size;
    std::vector<double> current = fluxonium_eigenvalues(params, size);
    double last_change = 0.0;
    while (2 * size <= options.max_basis_size) {
        std::vector<double> doubled = fluxonium_eigenvalues(params, 2 * size);
        last_change = 0.0;
        for (std::size_t k = 0; k < kConvergenceLevels; ++k) {
            last_change = std::max(last_change, std::abs(doubled[k] - current[k]));
        }
        if (last_change < options.tolerance_ghz) {
            EnergySpectrum spectrum;
            spectrum.basis_size = size;
            spectrum.converged = true;
            const std::size_t count = std::min(options.reported_levels, current.size());
            spectrum.levels.reserve(count);
            for (std::size_t k = 0; k < count; ++k) {
                spectrum.levels.push_back(current[k] - current[0]);
            }
            return spectrum;
        }
        size *= 2;
        current = std::move(doubled);
    }
    std::ostringstream msg;
    msg << "fluxonium spectrum not converged at basis size " << size
        << "; last change of the lowest levels " << last_change * 1e6 << " kHz (e_j=" << params.e_j
        << ", e_c=" << params.e_c << ", e_l=" << params.e_l << ")";
    throw ConvergenceError(msg.str());
}

double CavityParams::chi(Level level) const {
    auto it = chi_mhz.find(level);
    if (it == chi_mhz.end()) {
        throw LookupError("no dispersive shift configured for level " +
                          std::string(level_name(level)));
    }
    return it->second;
}

void CavityParams::validate() const {
    if (!(omega_r_ghz > 0.0)) {
        throw ParameterError("cavity frequency must be positive");
    }
    if (kappa_s_mhz < 0.0 || kappa_w_mhz < 0.0 || kappa_int_mhz < 0.0) {
        throw ParameterError("cavity couplings must be non-negative");
    }
    if (!(kappa_total_mhz() > 0.0)) {
        throw ParameterError("total cavity linewidth must be positive");
    }
    if (!chi_mhz.contains(Level::g) || !chi_mhz.contains(Level::e)) {
        throw ParameterError("dispersive shifts for g and e are required");
    }
}

double detuning_mhz(const CavityParams& cavity, double drive_freq_ghz, Level level) {
    return (drive_freq_ghz - cavity.omega_r_ghz) * 1e3 - cavity.chi(level);
}

std::complex<double> reflection(const CavityParams& cavity, double drive_freq_ghz, Level level) {
    const double delta = detuning_mhz(cavity, drive_freq_ghz, level);
    if (std::isinf(delta)) {
        return {1.0, 0.0};
    }
    const std::complex<double> denom(0.5 * cavity.kappa_total_mhz(), -delta);
    return 1.0 - cavity.kappa_s_mhz / denom;
}

double pointer_separation_angle(const CavityParams& cavity, double drive_freq_ghz) {
    const double diff = std::arg(reflection(cavity, drive_freq_ghz, Level::g)) -
                        std::arg(reflection(cavity, drive_freq_ghz, Level::e));
    return std::abs(wrap_angle(diff));
}

std::complex<double> cavity_decay_constant(const CavityParams& cavity, double drive_freq_ghz,
                                           Level level) {
    return make_piece(cavity, cavity.chi(level), 0.0, drive_freq_ghz).lambda;
}

std::complex<double> steady_amplitude(const CavityParams& cavity, Level level, double drive_amp,
                                      double drive_freq_ghz) {
    return make_piece(cavity, cavity.chi(level), drive_amp, drive_freq_ghz).steady;
}

std::complex<double> cavity_field(const CavityParams& cavity, Level level, double drive_amp,
                                  double drive_freq_ghz, std::complex<double> alpha0, double t) {
    return make_piece(cavity, cavity.chi(level), drive_amp, drive_freq_ghz).at(alpha0, t);
}

PointerTrajectory ring_up(const CavityParams& cavity, Level level, double drive_amp,
                          double drive_freq_ghz, double duration, double dt) {
    cavity.validate();
    if (!(duration > 0.0)) {
        throw ParameterError("ring_up duration must be positive");
    }
    const double kappa = angular_from_mhz(cavity.kappa_total_mhz());
    if (!(dt > 0.0) || dt > 0.05 / kappa) {
        throw DiscretizationError("ring_up step must satisfy 0 < dt <= 0.05/kappa_tot");
    }
    const std::complex<double> lambda = cavity_decay_constant(cavity, drive_freq_ghz, level);
    const double source = std::sqrt(angular_from_mhz(cavity.kappa_s_mhz)) * drive_amp;
    auto rhs = [&](std::complex<double> a) { return -lambda * a - source; };

    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
    const double h = duration / static_cast<double>(steps);
    PointerTrajectory traj;
    traj.level = level;
    traj.times.reserve(steps + 1);
    traj.alpha.reserve(steps + 1);
    std::complex<double> a(0.0, 0.0);
    traj.times.push_back(0.0);
    traj.alpha.push_back(a);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto k1 = rhs(a);
        const auto k2 = rhs(a + 0.5 * h * k1);
        const auto k3 = rhs(a + 0.5 * h * k2);
        const auto k4 = rhs(a + h * k3);
        a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.times.push_back(h * static_cast<double>(k + 1));
        traj.alpha.push_back(a);
    }
    return traj;
}

double steady_photon_number(const CavityParams& cavity, Level level, double drive_amp,
                            double drive_freq_ghz) {
    return std::norm(steady_amplitude(cavity, level, drive_amp, drive_freq_ghz));
}

double nominal_photon_number(const CavityParams& cavity, double drive_amp, double drive_freq_ghz) {
    return 0.5 * (steady_photon_number(cavity, Level::g, drive_amp, drive_freq_ghz) +
                  steady_photon_number(cavity, Level::e, drive_amp, drive_freq_ghz));
}

double drive_for_photon_number(const CavityParams& cavity, double n_bar, double drive_freq_ghz) {
    if (n_bar < 0.0) {
        throw ParameterError("photon number must be non-negative");
    }
    const double per_unit = nominal_photon_number(cavity, 1.0, drive_freq_ghz);
    if (!(per_unit > 0.0)) {
        throw ParameterError("strong port does not couple to the cavity");
    }
    return std::sqrt(n_bar / per_unit);
}

double mean_chi_ge(const CavityParams& cavity) {
    return 0.5 * (cavity.chi(Level::g) + cavity.chi(Level::e));
}

namespace {

// Drive amplitude active at time t (segments laid end to end from 0).
double drive_at(std::span<const DriveSegment> drive, double t) {
    double start = 0.0;
    for (const auto& seg : drive) {
        if (t < start + seg.duration) {
            return seg.drive_amp;
        }
        start += seg.duration;
    }
    return 0.0;
}

std::vector<double> drive_boundaries(std::span<const DriveSegment> drive) {
    std::vector<double> out;
    double t = 0.0;
    for (const auto& seg : drive) {
        if (seg.duration < 0.0) {
            throw ParameterError("drive segment duration must be non-negative");
        }
        t += seg.duration;
        out.push_back(t);
    }
    return out;
}

}  // namespace

std::vector<std::complex<double>> integrate_reflected(const CavityParams& cavity,
                                                      double drive_freq_ghz,
                                                      std::span<const DriveSegment> drive,
                                                      const LevelTrajectory& path,
                                                      std::span<const Window> windows) {
    std::vector<double> cuts = drive_boundaries(drive);
    double horizon = cuts.empty() ? 0.0 : cuts.back();
    for (const auto& w : windows) {
        if (!(w.end >= w.start) || w.start < 0.0) {
            throw ParameterError("integration window must satisfy 0 <= start <= end");
        }
        cuts.push_back(w.start);
        cuts.push_back(w.end);
        horizon = std::max(horizon, w.end);
    }
    for (double t : path.jump_times) {
        if (t < horizon) {
            cuts.push_back(t);
        }
    }
    cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double sqrt_kappa_s = std::sqrt(angular_from_mhz(cavity.kappa_s_mhz));
    std::vector<std::complex<double>> out(windows.size(), {0.0, 0.0});
    std::complex<double> alpha(0.0, 0.0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double t0 = cuts[k];
        const double t1 = cuts[k + 1];
        const double span = t1 - t0;
        const double mid = 0.5 * (t0 + t1);
        const double eps = drive_at(drive, mid);
        const Level level = path.level_at(mid);
        const CavityPiece piece = make_piece(cavity, cavity.chi(level), eps, drive_freq_ghz);
        for (std::size_t w = 0; w < windows.size(); ++w) {
            if (t0 >= windows[w].start && t1 <= windows[w].end) {
                out[w] += eps * span + sqrt_kappa_s * piece.integral(alpha, span);
            }
        }
        alpha = piece.at(alpha, span);
    }
    return out;
}

std::vector<std::complex<double>> sample_reflected(const CavityParams& cavity,
                                                   double drive_freq_ghz,
                                                   std::span<const DriveSegment> drive,
                                                   const LevelTrajectory& path,
                                                   std::span<const double> times) {
    std::vector<double> cuts = drive_boundaries(drive);
    cuts.insert(cuts.end(), path.jump_times.begin(), path.jump_times.end());
    std::sort(cuts.begin(), cuts.end());

    const double sqrt_kappa_s = std::sqrt(angular_from_mhz(cavity.kappa_s_mhz));
    std::vector<std::complex<double>> out;
    out.reserve(times.size());
    std::complex<double> alpha(0.0, 0.0);
    double now = 0.0;
    std::size_t next_cut = 0;
    // Advance alpha from `now` to `target` through every breakpoint on the way.
    auto advance = [&](double target) {
        while (now < target) {
            while (next_cut < cuts.size() && cuts[next_cut] <= now) {
                ++next_cut;
            }
            const double stop = next_cut < cuts.size() ? std::min(cuts[next_cut], target) : target;
            const double mid = 0.5 * (now + stop);
            const CavityPiece piece = make_piece(cavity, cavity.chi(path.level_at(mid)),
                                                 drive_at(drive, mid), drive_freq_ghz);
            alpha = piece.at(alpha, stop - now);
            now = stop;
        }
    };
    for (double t : times) {
        if (t < now) {
            throw ParameterError("sample times must be ascending");
        }
        advance(t);
        out.push_back(drive_at(drive, t) + sqrt_kappa_s * alpha);
    }
    return out;
}

std::vector<FieldSegment> nominal_field_segments(const CavityParams& cavity,
                                                 double drive_freq_ghz,
                                                 std::span<const DriveSegment> drive) {
    const double chi = mean_chi_ge(cavity);
    std::vector<FieldSegment> out;
    std::complex<double> alpha(0.0, 0.0);
    double t = 0.0;
    for (const auto& seg : drive) {
        if (seg.duration < 0.0) {
            throw ParameterError("drive segment duration must be non-negative");
        }
        if (seg.duration == 0.0) {
            continue;
        }
        const CavityPiece piece = make_piece(cavity, chi, seg.drive_amp, drive_freq_ghz);
        out.push_back({t, t + seg.duration, alpha, piece.steady, piece.lambda});
        alpha = piece.at(alpha, seg.duration);
        t += seg.duration;
    }
    const CavityPiece ring_down = make_piece(cavity, chi, 0.0, drive_freq_ghz);
    out.push_back({t, std::numeric_limits<double>::infinity(), alpha, ring_down.steady,
                   ring_down.lambda});
    return out;
}

std::vector<std::complex<double>> nominal_field(const CavityParams& cavity, double drive_freq_ghz,
                                                std::span<const DriveSegment> drive,
                                                std::span<const double> times) {
    const auto segments = nominal_field_segments(cavity, drive_freq_ghz, drive);
    std::vector<std::complex<double>> out;
    out.reserve(times.size());
    std::size_t k = 0;
    for (double t : times) {
        while (k + 1 < segments.size() && t >= segments[k].end) {
            ++k;
        }
        out.push_back(segments[k].at(t));
    }
    return out;
}

double analytic_f_factor_db(const CavityParams& cavity, double drive_freq_ghz) {
    const double gamma = 0.5 * (std::abs(reflection(cavity, drive_freq_ghz, Level::g)) +
                                std::abs(reflection(cavity, drive_freq_ghz, Level::e)));
    const double ratio = 0.25 * cavity.kappa_s_mhz / cavity.kappa_total_mhz() * gamma * gamma;
    return 10.0 * std::log10(ratio);
}

}  // namespace fluxshot
