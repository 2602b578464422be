#pragma once

#include <cointbreak/design.hpp>

#include <cstddef>
#include <vector>

namespace cointbreak::detail {

// min_b  yy - 2 cross'b + b' gram b + lambda sum_j w_j ||b_j||
// (the first three terms are SSR / T). The leading `unpen` coordinates are
// unpenalized; the rest form groups of `width` coordinates.
struct GroupProblem {
    Matrix gram;
    Vector cross;
    double yy = 0.0;
    Eigen::Index unpen = 0;
    Eigen::Index width = 1;
    std::vector<double> weights;

    Eigen::Index groups() const { return static_cast<Eigen::Index>(weights.size()); }
    Eigen::Index offset(Eigen::Index group) const { return unpen + group * width; }
    Eigen::Index size() const { return unpen + groups() * width; }
};

struct GroupSolveResult {
    double violation = 0.0;
    std::size_t sweeps = 0;
    bool converged = false;
};

// Cyclic block coordinate descent (exact step on the unpenalized block,
// majorized steps on groups) alternated with damped Newton steps on the
// current support. Monotone in the objective.
class GroupSolver {
public:
    explicit GroupSolver(GroupProblem problem);

    const GroupProblem& problem() const { return p_; }

    GroupSolveResult solve(double lambda, Vector& beta, double tol, std::size_t max_iter) const;

    // Largest KKT residual (gradient scale of the objective above).
    double violation(const Vector& beta, double lambda) const;
    double penalty(const Vector& beta) const;

private:
    void sweep(double lambda, Vector& beta, Vector& q) const;
    bool newton(double lambda, Vector& beta, Vector& q, double tol) const;

    GroupProblem p_;
    Vector lipschitz_;
    Eigen::LDLT<Matrix> unpen_solver_;
};

} // namespace cointbreak::detail
