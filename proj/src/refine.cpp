#include "shapetrack/refine.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace shapetrack {

namespace {

// Quadratic basis over the 3^4 sample grid: 1, u0..u3, u_i^2, u_i u_j
// (15 coefficients). The design matrix is constant, so its pseudo-inverse is
// computed once.
Eigen::Matrix<double, 15, 81> facet_solver() {
    Eigen::Matrix<double, 81, 15> design;
    int row = 0;
    for (int is = -1; is <= 1; ++is) {
        for (int it = -1; it <= 1; ++it) {
            for (int iy = -1; iy <= 1; ++iy) {
                for (int ix = -1; ix <= 1; ++ix) {
                    const double u[4] = {static_cast<double>(ix), static_cast<double>(iy),
                                         static_cast<double>(it), static_cast<double>(is)};
                    int col = 0;
                    design(row, col++) = 1.0;
                    for (int a = 0; a < 4; ++a) design(row, col++) = u[a];
                    for (int a = 0; a < 4; ++a)
                        for (int b = a; b < 4; ++b) design(row, col++) = u[a] * u[b];
                    ++row;
                }
            }
        }
    }
    return (design.transpose() * design).ldlt().solve(design.transpose());
}

}  // namespace

FacetResult facet_refine(const ScoreNeighborhood& nb) {
    static const Eigen::Matrix<double, 15, 81> kSolver = facet_solver();

    Eigen::Matrix<double, 81, 1> samples;
    int row = 0;
    for (int is = -1; is <= 1; ++is)
        for (int it = -1; it <= 1; ++it)
            for (int iy = -1; iy <= 1; ++iy)
                for (int ix = -1; ix <= 1; ++ix)
                    samples(row++) = nb.at(ix, iy, it, is);

    const Eigen::Matrix<double, 15, 1> coeff = kSolver * samples;

    // q(u) = c + g^T u + 1/2 u^T H u
    const double c = coeff(0);
    Eigen::Vector4d g = coeff.segment<4>(1);
    Eigen::Matrix4d H;
    int k = 5;
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
            const double q_ab = coeff(k++);
            if (a == b) {
                H(a, a) = 2.0 * q_ab;
            } else {
                H(a, b) = q_ab;
                H(b, a) = q_ab;
            }
        }
    }

    FacetResult res;
    res.pose = nb.center_pose;
    res.score = nb.at(0, 0, 0, 0);

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(H);
    if (eig.info() != Eigen::Success || eig.eigenvalues().maxCoeff() >= 0.0) {
        res.degenerate = true;
        return res;
    }
    const Eigen::Vector4d u = -H.ldlt().solve(g);
    if (u.cwiseAbs().maxCoeff() > 1.0) {
        res.degenerate = true;  // vertex outside the cell, keep the grid optimum
        return res;
    }

    res.pose.tx += u(0) * nb.steps.dx;
    res.pose.ty += u(1) * nb.steps.dy;
    res.pose.theta += u(2) * nb.steps.dtheta;
    res.pose.sigma += u(3) * nb.steps.dsigma;
    res.score = c + g.dot(u) + 0.5 * u.dot(H * u);
    return res;
}

std::optional<NormalMatch> find_normal_match(const GradientField& field, const Vec2& p_prime,
                                             const Vec2& n_hat, double max_len, double cos_tol,
                                             int model_index) {
    if (max_len <= 0.0) return std::nullopt;

    constexpr double kStep = 0.5;
    const int half = static_cast<int>(std::floor(max_len / kStep + 1e-9));
    const int count = 2 * half + 1;
    if (count < 3) return std::nullopt;

    // Amplitude profile along p' + t n_hat, t in [-max_len, max_len].
    std::vector<double> amp(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = (i - half) * kStep;
        amp[static_cast<size_t>(i)] = sample_amplitude(field, p_prime + t * n_hat);
    }

    int best = -1;
    double best_abs_t = 0.0;
    double best_amp = 0.0;
    for (int i = 1; i + 1 < count; ++i) {
        const double a = amp[static_cast<size_t>(i)];
        if (a < kZeroGradientEps) continue;
        if (!(a >= amp[static_cast<size_t>(i + 1)] && a > amp[static_cast<size_t>(i - 1)])) {
            continue;
        }
        const double t = (i - half) * kStep;
        const Vec2 e = sample_direction(field, p_prime + t * n_hat, Interp::Bilinear);
        const double en = e.norm();
        if (en < kZeroGradientEps) continue;
        if (std::fabs(e.dot(n_hat)) / en < cos_tol) continue;

        const double abs_t = std::fabs(t);
        // Nearest match wins; amplitude only breaks exact-distance ties.
        if (best < 0 || abs_t < best_abs_t || (abs_t == best_abs_t && a > best_amp)) {
            best = i;
            best_abs_t = abs_t;
            best_amp = a;
        }
    }
    if (best < 0) return std::nullopt;

    // Parabola refinement along the line (offsets in kStep units).
    const double am = amp[static_cast<size_t>(best - 1)];
    const double a0 = amp[static_cast<size_t>(best)];
    const double ap = amp[static_cast<size_t>(best + 1)];
    const double denom = am - 2.0 * a0 + ap;
    double delta = 0.0;
    if (denom < 0.0) delta = std::clamp((am - ap) / (2.0 * denom), -0.5, 0.5);

    NormalMatch m;
    m.model_index = model_index;
    m.n_hat = n_hat;
    m.offset = (best - half + delta) * kStep;
    m.q = p_prime + m.offset * n_hat;
    return m;
}

std::vector<NormalMatch> find_normal_matches(const ShapeModel& model, const GradientField& field,
                                             const Pose& pose, double max_len, double cos_tol) {
    std::vector<NormalMatch> matches;
    matches.reserve(model.points.size());
    for (size_t i = 0; i < model.points.size(); ++i) {
        const ModelPoint& mp = model.points[i];
        const Vec2 p_prime = transform_point(mp.p, pose);
        const Vec2 n_hat = rotate_direction(mp.d, pose.theta);
        auto m = find_normal_match(field, p_prime, n_hat, max_len, cos_tol, static_cast<int>(i));
        if (m) matches.push_back(*m);
    }
    return matches;
}

SimilarityParams SimilarityParams::from_pose(const Pose& p) {
    return {p.sigma * std::cos(p.theta), p.sigma * std::sin(p.theta), p.tx, p.ty};
}

Pose SimilarityParams::to_pose() const {
    return {tx, ty, std::atan2(b, a), std::hypot(a, b)};
}

double point_line_residual(const Vec2& p, const Vec2& n_hat, const Vec2& q,
                           const SimilarityParams& s) {
    const Vec2 tp{s.a * p.x - s.b * p.y + s.tx, s.b * p.x + s.a * p.y + s.ty};
    return n_hat.dot(tp - q);
}

void point_line_jacobian(const Vec2& p, const Vec2& n_hat, double row[4]) {
    row[0] = n_hat.x * p.x + n_hat.y * p.y;   // d/da
    row[1] = -n_hat.x * p.y + n_hat.y * p.x;  // d/db
    row[2] = n_hat.x;                         // d/dtx
    row[3] = n_hat.y;                         // d/dty
}

std::optional<Pose> least_squares_pose(const ShapeModel& model,
                                       std::span<const NormalMatch> matches, const Pose& init) {
    if (matches.size() < 4) return std::nullopt;

    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtb = Eigen::Vector4d::Zero();
    for (const NormalMatch& m : matches) {
        const Vec2& p = model.points[static_cast<size_t>(m.model_index)].p;
        double row[4];
        point_line_jacobian(p, m.n_hat, row);
        const double rhs = m.n_hat.dot(m.q);
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) jtj(r, c) += row[r] * row[c];
            jtb(r) += row[r] * rhs;
        }
    }

    // Matches on parallel lines leave a translation direction unobservable.
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(jtj);
    if (eig.info() != Eigen::Success) return std::nullopt;
    const double max_ev = eig.eigenvalues().maxCoeff();
    if (max_ev <= 0.0 || eig.eigenvalues().minCoeff() < 1e-10 * max_ev) return std::nullopt;

    const Eigen::Vector4d x = jtj.ldlt().solve(jtb);
    const SimilarityParams sol{x(0), x(1), x(2), x(3)};
    if (std::hypot(sol.a, sol.b) < 1e-9) return std::nullopt;

    Pose pose = sol.to_pose();
    // Keep theta in init's branch so small refinements never wrap.
    pose.theta = init.theta + normalize_angle(pose.theta - init.theta);
    return pose;
}

}  // namespace shapetrack
