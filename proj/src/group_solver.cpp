#include "group_solver.hpp"

#include <cointbreak/errors.hpp>
#include <cointbreak/stage1.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cointbreak::detail {

namespace {

constexpr std::size_t kBurst = 10;      // BCD sweeps between Newton attempts
constexpr std::size_t kNewtonSteps = 40;

} // namespace

GroupSolver::GroupSolver(GroupProblem problem) : p_(std::move(problem)) {
    if (p_.gram.rows() != p_.size() || p_.gram.cols() != p_.size() || p_.cross.size() != p_.size()) {
        throw InputError("reduced problem dimensions are inconsistent");
    }
    lipschitz_.resize(p_.groups());
    for (Eigen::Index j = 0; j < p_.groups(); ++j) {
        const auto o = p_.offset(j);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(p_.gram.block(o, o, p_.width, p_.width),
                                                  Eigen::EigenvaluesOnly);
        lipschitz_(j) = eig.eigenvalues().maxCoeff();
    }
    if (p_.unpen > 0) {
        unpen_solver_.compute(p_.gram.topLeftCorner(p_.unpen, p_.unpen));
    }
}

double GroupSolver::penalty(const Vector& beta) const {
    double out = 0.0;
    for (Eigen::Index j = 0; j < p_.groups(); ++j) {
        out += p_.weights[static_cast<std::size_t>(j)] * beta.segment(p_.offset(j), p_.width).norm();
    }
    return out;
}

double GroupSolver::violation(const Vector& beta, double lambda) const {
    const Vector grad = 2.0 * (p_.gram * beta - p_.cross);
    double worst = p_.unpen > 0 ? grad.head(p_.unpen).cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index j = 0; j < p_.groups(); ++j) {
        const auto o = p_.offset(j);
        const double thresh = lambda * p_.weights[static_cast<std::size_t>(j)];
        const double norm = beta.segment(o, p_.width).norm();
        if (norm > 0.0) {
            worst = std::max(worst, (grad.segment(o, p_.width) + thresh * beta.segment(o, p_.width) / norm).norm());
        } else {
            worst = std::max(worst, grad.segment(o, p_.width).norm() - thresh);
        }
    }
    return std::max(0.0, worst);
}

// q = gram * beta - cross is kept current across every block update.
void GroupSolver::sweep(double lambda, Vector& beta, Vector& q) const {
    const Eigen::Index u = p_.unpen;
    if (u > 0) {
        const Vector rhs = p_.gram.topLeftCorner(u, u) * beta.head(u) - q.head(u);
        const Vector updated = unpen_solver_.solve(rhs);
        const Vector step = updated - beta.head(u);
        beta.head(u) = updated;
        q.noalias() += p_.gram.leftCols(u) * step;
    }
    for (Eigen::Index j = 0; j < p_.groups(); ++j) {
        const double lip = lipschitz_(j);
        if (!(lip > 0.0)) {
            continue;
        }
        const auto o = p_.offset(j);
        const Vector current = beta.segment(o, p_.width);
        const Vector v = current - q.segment(o, p_.width) / lip;
        const Vector updated =
            group_soft_threshold(v, lambda * p_.weights[static_cast<std::size_t>(j)] / (2.0 * lip));
        const Vector step = updated - current;
        if (step.squaredNorm() == 0.0) {
            continue;
        }
        beta.segment(o, p_.width) = updated;
        q.noalias() += p_.gram.middleCols(o, p_.width) * step;
    }
}

bool GroupSolver::newton(double lambda, Vector& beta, Vector& q, double tol) const {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < p_.groups(); ++j) {
        if (beta.segment(p_.offset(j), p_.width).norm() > 0.0) {
            support.push_back(j);
        }
    }
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < p_.unpen; ++i) {
        idx.push_back(i);
    }
    for (auto j : support) {
        for (Eigen::Index c = 0; c < p_.width; ++c) {
            idx.push_back(p_.offset(j) + c);
        }
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    if (m == 0) {
        return false;
    }
    Matrix base(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
            base(a, b) = 2.0 * p_.gram(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
    }

    auto group_penalty = [&](const Vector& b) {
        double out = 0.0;
        for (auto j : support) {
            out += p_.weights[static_cast<std::size_t>(j)] * b.segment(p_.offset(j), p_.width).norm();
        }
        return lambda * out;
    };

    for (std::size_t step = 0; step < kNewtonSteps; ++step) {
        Vector grad(m);
        Matrix hess = base;
        for (Eigen::Index a = 0; a < m; ++a) {
            grad(a) = 2.0 * q(idx[static_cast<std::size_t>(a)]);
        }
        Eigen::Index pos = p_.unpen;
        for (auto j : support) {
            const Vector b = beta.segment(p_.offset(j), p_.width);
            const double norm = b.norm();
            // A vanishing group makes the curvature blow up; leave it to BCD.
            if (!(norm > 1e-12 * std::max(1.0, beta.cwiseAbs().maxCoeff()))) {
                return false;
            }
            const double s = lambda * p_.weights[static_cast<std::size_t>(j)];
            const Vector unit = b / norm;
            grad.segment(pos, p_.width) += s * unit;
            hess.block(pos, pos, p_.width, p_.width) +=
                (s / norm) * (Matrix::Identity(p_.width, p_.width) - unit * unit.transpose());
            pos += p_.width;
        }
        if (grad.cwiseAbs().maxCoeff() <= 0.1 * tol) {
            return true;
        }
        Eigen::LDLT<Matrix> ldlt(hess);
        if (ldlt.info() != Eigen::Success) {
            return false;
        }
        const Vector dir_sub = -ldlt.solve(grad);
        if (!dir_sub.allFinite()) {
            return false;
        }
        const double slope = grad.dot(dir_sub);
        if (!(slope < 0.0)) {
            return false;
        }
        Vector dir = Vector::Zero(beta.size());
        for (Eigen::Index a = 0; a < m; ++a) {
            dir(idx[static_cast<std::size_t>(a)]) = dir_sub(a);
        }
        const Vector gdir = p_.gram * dir;
        const double curv = dir.dot(gdir);
        const double lin = 2.0 * q.dot(dir);
        const double pen0 = group_penalty(beta);
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            // Exact objective change; avoids the cancellation in yy - 2 cross'b + b'Gb.
            const double change = t * lin + t * t * curv + group_penalty(beta + t * dir) - pen0;
            if (change <= 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            return false;
        }
        beta.noalias() += t * dir;
        q.noalias() += t * gdir;
    }
    return false;
}

GroupSolveResult GroupSolver::solve(double lambda, Vector& beta, double tol, std::size_t max_iter) const {
    if (beta.size() != p_.size()) {
        beta = Vector::Zero(p_.size());
    }
    GroupSolveResult out;
    Vector q = p_.gram * beta - p_.cross;
    out.violation = violation(beta, lambda);
    while (out.violation > tol && out.sweeps < max_iter) {
        const std::size_t burst = std::min(kBurst, max_iter - out.sweeps);
        for (std::size_t s = 0; s < burst; ++s) {
            sweep(lambda, beta, q);
        }
        out.sweeps += burst;
        q = p_.gram * beta - p_.cross;
        out.violation = violation(beta, lambda);
        if (out.violation <= tol) {
            break;
        }
        newton(lambda, beta, q, tol);
        q = p_.gram * beta - p_.cross;
        out.violation = violation(beta, lambda);
    }
    out.converged = out.violation <= tol;
    return out;
}

} // namespace cointbreak::detail
