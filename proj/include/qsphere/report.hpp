#pragma once

#include <chrono>
#include <functional>
#include <limits>
#include <string>

#include "qsphere/linalg.hpp"

namespace qsphere {

/// One row of an iterate trace. Fields a solver does not produce stay NaN.
struct IterationRecord {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    int k = 0;
    double objective = nan;
    double primal_residual = nan;  // ‖x − y‖ (ADMM)
    double nrmG = nan;
    double lagrangian = nan;       // L_ρ(x, y, w) (ADMM)
    double step_norm = nan;        // ‖Δy‖ for ADMM, ‖Δx‖∞ for RN/SCF
    double inner_tolerance = nan;  // ε_k (ADMM)
    double inner_residual = nan;   // achieved ‖∇_y L‖ (ADMM)
    double y_norm = nan;           // ‖y‖ (ADMM)
    double sigma = nan;            // regularization (RN)
    bool accepted = true;          // RN trial acceptance
};

using IterationObserver = std::function<void(const IterationRecord&)>;

struct SolveReport {
    std::string method;
    Vector x;
    double objective = 0.0;
    double lambda = 0.0;
    double nrmG = 0.0;
    bool converged = false;
    int iterations = 0;
    int inner_iterations = 0;
    double wall_seconds = 0.0;
    std::string message;
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace qsphere
