#include "twosided/numerics.hpp"

#include <algorithm>
#include <limits>

namespace twosided {

void StepperConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("StepperConfig: dt must be finite and > 0");
    if (halving_limit < 1)
        throw std::invalid_argument("StepperConfig: halving_limit must be >= 1");
    if (stride < 1)
        throw std::invalid_argument("StepperConfig: stride must be >= 1");
    if (!(convergence_tol > 0.0))
        throw std::invalid_argument("StepperConfig: convergence_tol must be > 0");
    if (max_steps < 1)
        throw std::invalid_argument("StepperConfig: max_steps must be >= 1");
}

namespace detail {

std::size_t step_count(double duration, double dt, std::size_t max_steps)
{
    if (duration == 0.0)
        return 0;
    // Tolerate representation error in duration/dt (1.0/1e-3 must give 1000).
    const double raw = std::ceil(duration / dt * (1.0 - 1e-12));
    if (raw > static_cast<double>(max_steps)) {
        std::ostringstream msg;
        msg << "rk4_integrate: " << raw << " steps exceed max_steps = " << max_steps;
        throw numerical_error(msg.str());
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

} // namespace detail

Eigen::VectorXd dense_solve(const Eigen::MatrixXd &A, const Eigen::VectorXd &b)
{
    const Eigen::Index k = A.rows();
    if (k == 0 || A.cols() != k || b.size() != k)
        throw std::invalid_argument("dense_solve: A must be square and match b");
    if (k > 16)
        throw std::invalid_argument("dense_solve: systems larger than 16x16 are not supported");
    if (!A.allFinite() || !b.allFinite())
        throw numerical_error("dense_solve: non-finite input");

    const double scale = A.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        throw numerical_error("no unique stationary state (zero matrix)");
    const double pivot_floor = 1e-13 * scale;

    Eigen::MatrixXd M = A;
    Eigen::VectorXd x = b;
    for (Eigen::Index col = 0; col < k; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index row = col + 1; row < k; ++row)
            if (std::abs(M(row, col)) > std::abs(M(pivot, col)))
                pivot = row;
        if (std::abs(M(pivot, col)) < pivot_floor) {
            std::ostringstream msg;
            msg << "no unique stationary state (pivot " << M(pivot, col) << " in column " << col
                << " below " << pivot_floor << ")";
            throw numerical_error(msg.str());
        }
        if (pivot != col) {
            M.row(pivot).swap(M.row(col));
            std::swap(x(pivot), x(col));
        }
        for (Eigen::Index row = col + 1; row < k; ++row) {
            const double f = M(row, col) / M(col, col);
            if (f == 0.0)
                continue;
            M.row(row).tail(k - col) -= f * M.row(col).tail(k - col);
            x(row) -= f * x(col);
        }
    }
    for (Eigen::Index row = k - 1; row >= 0; --row) {
        double acc = x(row);
        for (Eigen::Index col = row + 1; col < k; ++col)
            acc -= M(row, col) * x(col);
        x(row) = acc / M(row, row);
    }

    const double residual = (A * x - b).cwiseAbs().maxCoeff();
    const double bound = 1e-12 * (1.0 + b.cwiseAbs().maxCoeff()) * std::max(1.0, scale);
    if (!(residual < bound)) {
        std::ostringstream msg;
        msg << "dense_solve: residual " << residual << " exceeds " << bound
            << " (ill-conditioned system)";
        throw numerical_error(msg.str());
    }
    return x;
}

ReducedPhase reduce_phase(double phi)
{
    if (!std::isfinite(phi))
        throw std::invalid_argument("reduce_phase: phase must be finite");
    constexpr double pi = std::numbers::pi;
    const double multiple = std::nearbyint(phi / pi);
    // Plain multiply-subtract: a phase constructed as multiple * pi reduces to 0.
    double residual = phi - multiple * pi;
    if (std::abs(residual) < 1e-12)
        residual = 0.0;
    return {residual, std::fmod(std::abs(multiple), 2.0) == 1.0};
}

double reduced_sin(double phi)
{
    const ReducedPhase p = reduce_phase(phi);
    if (p.residual == 0.0)
        return 0.0;
    const double s = std::sin(p.residual);
    return p.odd_multiple ? -s : s;
}

std::complex<double> reduced_unit_phasor(double phi)
{
    const ReducedPhase p = reduce_phase(phi);
    const std::complex<double> z = std::polar(1.0, p.residual);
    return p.odd_multiple ? -z : z;
}

std::vector<double> linspace(double start, double stop, std::size_t n)
{
    std::vector<double> out;
    if (n == 0)
        return out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(start);
        return out;
    }
    const double span = stop - start;
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(start + span * (static_cast<double>(i) / denom));
    out.back() = stop;
    return out;
}

} // namespace twosided
