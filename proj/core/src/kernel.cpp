#include "vulnet/kernel.hpp"

#include "vulnet/detail/csv.hpp"
#include "vulnet/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace vulnet {

namespace {

Eigen::VectorXd column_sums_of(const Eigen::SparseMatrix<double>& K) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(K.cols());
    for (Eigen::Index j = 0; j < K.outerSize(); ++j) {
        double s = 0.0; // inner iterator walks rows ascending: fixed order
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, j); it; ++it) {
            s += it.value();
        }
        sums[j] = s;
    }
    return sums;
}

} // namespace

std::string StabilityReport::to_text() const {
    std::string out = "stability bound=" + detail::format_double(colsum_bound);
    out += " estimate=";
    out += spectral_estimate ? detail::format_double(*spectral_estimate) : "none";
    char buf[32];
    std::snprintf(buf, sizeof(buf), " iterations=%zu", power_iterations);
    out += buf;
    out += certified ? " certified=true" : " certified=false";
    out += " saturated=";
    if (saturated_columns.empty()) {
        out += "none";
    } else {
        for (std::size_t i = 0; i < saturated_columns.size(); ++i) {
            if (i > 0) out += ',';
            out += std::to_string(saturated_columns[i]);
        }
    }
    return out;
}

StabilityReport parse_stability_report(const std::string& text) {
    auto fields = detail::split_fields(text, ' ');
    if (fields.empty() || fields[0] != "stability") {
        throw ParseError("not a stability record: '" + text + "'");
    }
    StabilityReport rep;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        auto eq = fields[i].find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("malformed stability field: '" + std::string(fields[i]) + "'");
        }
        auto key = fields[i].substr(0, eq);
        auto value = fields[i].substr(eq + 1);
        if (key == "bound") {
            if (!detail::parse_double(value, rep.colsum_bound)) {
                throw ParseError("bad bound value in stability record");
            }
        } else if (key == "estimate") {
            if (value != "none") {
                double est = 0.0;
                if (!detail::parse_double(value, est)) {
                    throw ParseError("bad estimate value in stability record");
                }
                rep.spectral_estimate = est;
            }
        } else if (key == "iterations") {
            rep.power_iterations = static_cast<std::size_t>(std::stoull(std::string(value)));
        } else if (key == "certified") {
            rep.certified = value == "true";
        } else if (key == "saturated") {
            if (value != "none") {
                for (auto col : detail::split_fields(value, ',')) {
                    rep.saturated_columns.push_back(
                        static_cast<std::uint32_t>(std::stoul(std::string(col))));
                }
            }
        } else {
            throw ParseError("unknown stability field '" + std::string(key) + "'");
        }
    }
    return rep;
}

PropagationKernel build_kernel(const AllocationMatrix& A, const LeakageRates& beta) {
    const Eigen::Index n = A.shares.cols();
    if (A.shares.rows() != n) {
        throw ArgumentError("allocation matrix must be square");
    }
    if (beta.beta.size() != n) {
        throw ArgumentError("leakage vector length does not match allocation matrix");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(beta.beta[j] >= 0.0) || !(beta.beta[j] <= 1.0)) {
            throw ArgumentError("leakage rates must lie in [0, 1]");
        }
    }

    PropagationKernel kernel;
    kernel.K = A.shares;
    kernel.beta = beta.beta;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double retention = 1.0 - beta.beta[j];
        for (Eigen::SparseMatrix<double>::InnerIterator it(kernel.K, j); it; ++it) {
            it.valueRef() *= retention;
        }
    }
    kernel.column_sums = column_sums_of(kernel.K);
    kernel.colsum_bound = n > 0 ? kernel.column_sums.maxCoeff() : 0.0;
    return kernel;
}

StabilityReport validate_kernel(PropagationKernel& kernel) {
    constexpr double kCertMargin = 1e-8;
    constexpr double kRatioTolerance = 1e-10;
    constexpr std::size_t kIterationCap = 10000;
    constexpr std::size_t kWindow = 10;

    StabilityReport rep;
    rep.colsum_bound = kernel.colsum_bound;
    const Eigen::Index n = kernel.K.cols();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (kernel.column_sums[j] >= 1.0) {
            rep.saturated_columns.push_back(static_cast<std::uint32_t>(j));
        }
    }

    if (rep.colsum_bound < 1.0) {
        rep.certified = true;
        kernel.certificate = rep;
        return rep;
    }

    // The column-sum bound is inconclusive; estimate the spectral radius by
    // the 1-norm growth ratio, averaged over a trailing window so periodic
    // structures (which make single ratios oscillate) still settle.
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    std::array<double, kWindow> ratios{};
    std::size_t filled = 0;
    double estimate = 0.0;
    double previous_estimate = -1.0;
    std::size_t iterations = 0;
    for (std::size_t it = 1; it <= kIterationCap; ++it) {
        iterations = it;
        x = kernel.K * x;
        const double norm = x.lpNorm<1>();
        if (norm == 0.0) {
            estimate = 0.0; // nilpotent: some power annihilated the start vector
            break;
        }
        ratios[(it - 1) % kWindow] = norm;
        if (filled < kWindow) ++filled;
        double sum = 0.0;
        for (std::size_t k = 0; k < filled; ++k) sum += ratios[k];
        estimate = sum / static_cast<double>(filled);
        if (filled == kWindow && std::abs(estimate - previous_estimate) < kRatioTolerance) {
            break;
        }
        previous_estimate = estimate;
        x /= norm; // keep the iterate scaled; the ratio is the next 1-norm
    }
    rep.spectral_estimate = estimate;
    rep.power_iterations = iterations;
    rep.certified = estimate < 1.0 - kCertMargin;
    kernel.certificate = rep;
    if (!rep.certified) {
        throw StabilityError("kernel not certifiably stable: column-sum bound " +
                                 detail::format_double(rep.colsum_bound) +
                                 ", spectral estimate " + detail::format_double(estimate),
                             rep.saturated_columns);
    }
    return rep;
}

namespace {

Eigen::VectorXd dense_transposed_solve(const PropagationKernel& kernel,
                                       const Eigen::VectorXd& m) {
    const Eigen::Index n = kernel.K.cols();
    Eigen::MatrixXd M = Eigen::MatrixXd(kernel.K.transpose());
    M = Eigen::MatrixXd::Identity(n, n) - M;
    return M.partialPivLu().solve(m);
}

} // namespace

Eigen::VectorXd leontief_row_solve(const PropagationKernel& kernel, const Eigen::VectorXd& m,
                                   const SolveOptions& options) {
    if (!kernel.certified()) {
        throw StabilityError("row solve refuses an uncertified kernel",
                             kernel.certificate.saturated_columns);
    }
    const Eigen::Index n = kernel.K.cols();
    if (m.size() != n) {
        throw ArgumentError("selector length does not match kernel size");
    }
    if (options.initial_guess && options.initial_guess->size() != n) {
        throw ArgumentError("initial guess length does not match kernel size");
    }

    const double m_scale = 1.0 + (n > 0 ? m.lpNorm<Eigen::Infinity>() : 0.0);
    const double internal_target = options.residual_tolerance * m_scale;
    const double contract = 1e-9 * m_scale;

    Eigen::VectorXd v = options.initial_guess ? *options.initial_guess : m;
    bool converged = false;

    if (kernel.colsum_bound < 1.0 && n > 0) {
        // Fixed-point iteration v <- m + K^T v. The error contracts at
        // least by the column-sum bound per step (usually much faster, at
        // the spectral rate), and the iterate stays exactly nonnegative
        // for nonnegative m and start. The cap is sized so a stagnating
        // iteration costs at most about one dense factorization before
        // the fallback takes over.
        const double log_bound = std::log(kernel.colsum_bound);
        double predicted = std::log(1e-18) / (log_bound < 0.0 ? log_bound : -1e-3);
        const double nnz = static_cast<double>(kernel.K.nonZeros());
        const double lu_equivalent =
            (2.0 / 3.0) * std::pow(static_cast<double>(n), 3) / std::max(2.0 * nnz, 1.0);
        const auto cap = static_cast<std::size_t>(
            std::clamp(std::max(predicted, lu_equivalent), 200.0, 5e5));

        Eigen::VectorXd next(n);
        for (std::size_t it = 0; it < cap; ++it) {
            next.noalias() = kernel.K.transpose() * v;
            next += m;
            const double step = (next - v).lpNorm<Eigen::Infinity>();
            v.swap(next);
            if (step <= internal_target) {
                converged = true;
                break;
            }
        }
    }

    if (!converged) {
        if (n > 4096) {
            throw SolveError("iteration failed to converge and the problem is too large "
                             "for the dense fallback");
        }
        if (n > 0) v = dense_transposed_solve(kernel, m);
    }

    Eigen::VectorXd residual = kernel.K.transpose() * v;
    residual += m;
    residual -= v;
    const double res = n > 0 ? residual.lpNorm<Eigen::Infinity>() : 0.0;
    if (res > contract) {
        throw SolveError("row solve residual " + detail::format_double(res) +
                         " exceeds contract " + detail::format_double(contract));
    }
    return v;
}

Eigen::MatrixXd neumann_cumulative(const PropagationKernel& kernel, std::size_t T) {
    const Eigen::Index n = kernel.K.cols();
    if (n > 512) {
        throw SizeGuardError("truncated-series accumulation is an oracle, guarded to N <= 512");
    }
    if (T < 1) {
        throw ArgumentError("series horizon must be at least 1");
    }
    Eigen::MatrixXd total = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t t = 1; t < T; ++t) {
        power = (kernel.K * power).eval();
        total += power;
        if ((power.array() == 0.0).all()) break; // nilpotent: series already exact
    }
    return total;
}

} // namespace vulnet
